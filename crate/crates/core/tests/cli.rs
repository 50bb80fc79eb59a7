use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hardy-lab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const NORMAL_EXAMPLE: &str = r#"{"u":{"kind":"kernel_deriv","w":[0.125,-0.125]},
    "phi":{"kind":"mobius","a":[0,1],"b":[1,1],"c":[1,-1],"d":[0,8]}}"#;

#[test]
fn composition_operator_matrix_is_diagonal() {
    let out = run(
        &[
            "matrix",
            "--m",
            "0",
            "--trunc",
            "6",
            "--format",
            "csv",
            "--u",
            r#"{"kind":"poly","coeffs":[[1,0]]}"#,
            "--phi",
            r#"{"kind":"poly","coeffs":[[0,0],[0.5,0]]}"#,
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next(), Some("m,n,re,im"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (m, n): (i32, i32) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let re: f64 = f[2].parse().unwrap();
        let want = if m == n { 0.5f64.powi(n) } else { 0.0 };
        assert_eq!(re, want, "entry ({m},{n})");
    }
}

#[test]
fn hypothesis_violation_exit_code() {
    let stdin = r#"{"u":{"kind":"poly","coeffs":[[0,0],[1,0]]},"phi":{"kind":"poly","coeffs":[[0,0],[1,0]]}}"#;
    let out = run(&["matrix", "--trunc", "8"], stdin);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sup norm"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["matrix"], "not json").status.code(), Some(2));
    assert_eq!(
        run(&["check", "--u", r#"{"kind":"poly","coeffs":[[1,0]]}"#], "")
            .status
            .code(),
        Some(2)
    );
    let bad_alpha = r#"{"u":{"kind":"symmetric_form_u","a":[1,0],"b":[0.3,0],"alpha":[2,0]},"phi":{"kind":"poly","coeffs":[[0,0]]}}"#;
    assert_eq!(run(&["check"], bad_alpha).status.code(), Some(2));
    assert_eq!(
        run(&["spectrum", "--a", "1", "--c", "0"], "").status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"], "").status.code(), Some(2));
}

#[test]
fn check_normal_example_reports_hermitian_matrix() {
    let out = run(&["check"], NORMAL_EXAMPLE);
    let v = json(&out);
    assert_eq!(v["checks"]["normal"]["flag"], true);
    assert_eq!(v["result"]["analytic"]["normal"], true);
    // the matrix is Hermitian, contradicting the analytic self-adjoint verdict
    assert_eq!(v["checks"]["self_adjoint"]["flag"], true);
    assert_eq!(
        v["result"]["inconsistent_checks"],
        serde_json::json!(["self_adjoint"])
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn check_symmetric_pair_and_perturbation() {
    let pair = r#"{"u":{"kind":"symmetric_form_u","a":[1,0],"b":[0.3,0],"alpha":[1,0]},
                   "phi":{"kind":"symmetric_form_phi","b":[0.3,0],"c":[0.1,0],"alpha":[1,0]}}"#;
    let v = json(&run(&["check", "--lambda", "1,0", "--alpha", "1,0"], pair));
    assert_eq!(v["checks"]["complex_symmetric"]["flag"], true);

    let perturbed = r#"{"u":{"kind":"poly","coeffs":[[0,0],[1,0],[0.6,0],[0.27,0],[0.1,0]]},
                        "phi":{"kind":"symmetric_form_phi","b":[0.3,0],"c":[0.1,0],"alpha":[1,0]}}"#;
    let out = run(&["check"], perturbed);
    let v = json(&out);
    assert_eq!(v["checks"]["complex_symmetric"]["flag"], false);
    assert!(
        v["checks"]["complex_symmetric"]["residual"]
            .as_f64()
            .unwrap()
            >= 1e-3
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn spectrum_examples() {
    let v = json(&run(&["spectrum", "--a", "1", "--c", "0.9"], ""));
    let audit = &v["result"]["audit"];
    assert!((audit["oracle_norm"].as_f64().unwrap() - 3.8742).abs() < 1e-4);
    assert!((audit["paper_norm"].as_f64().unwrap() - 3.4868).abs() < 1e-4);

    let v = json(&run(
        &["spectrum", "--a", "0", "--c", "0.5", "--trunc", "16"],
        "",
    ));
    assert_eq!(v["result"]["audit"]["oracle_norm"], 0.0);
    assert!(v["result"]["spectrum"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e == 0.0));
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let a = run(&["classify", "--trunc", "48"], NORMAL_EXAMPLE);
    let b = run(&["classify", "--trunc", "48"], NORMAL_EXAMPLE);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn verify_partial_run_names_failures() {
    let out = run(
        &[
            "verify",
            "--trunc",
            "32",
            "--skip",
            "C1,conjugation,kernel,symmetry,spectral,agreement,self_adjoint,lemma",
        ],
        "",
    );
    let v = json(&out);
    let ids: Vec<&str> = v["result"]["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["C7", "C10"]);
    assert_eq!(v["result"]["failing"], serde_json::json!(["C7"]));
    assert_eq!(v["result"]["seed"], 42);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failing: C7"));

    let out = run(
        &[
            "verify",
            "--trunc",
            "32",
            "--skip",
            "C1,C2,C3,C4,C5,C6,normal,C8,C9,AGREE",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_small_truncation_fails() {
    let out = run(
        &[
            "verify",
            "--trunc",
            "16",
            "--skip",
            "symmetry,agreement,self_adjoint,C1,C2",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let spectral = v["result"]["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["id"] == "C9")
        .unwrap();
    assert_eq!(spectral["status"], "error");
}
