//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

use std::process::Command;

use hardy_lab::suite::{run_criterion, CriterionResult, SuiteConfig};

fn line(n: usize, passed: bool, title: &str, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    if detail.is_empty() {
        println!("{tag} criterion {n:>2}: {title}");
    } else {
        println!("{tag} criterion {n:>2}: {title} [{detail}]");
    }
}

fn summarize(r: &CriterionResult) -> String {
    let metrics = r
        .metrics
        .iter()
        .filter(|(k, _)| {
            !k.contains('/') || k.ends_with("oracle_norm") || k.ends_with("paper_norm")
        })
        .map(|(k, v)| format!("{k}={v:.3e}"))
        .collect::<Vec<_>>()
        .join(" ");
    match (r.detail.is_empty(), metrics.is_empty()) {
        (true, _) => metrics,
        (false, true) => r.detail.clone(),
        (false, false) => format!("{}; {metrics}", r.detail),
    }
}

fn end_to_end() -> (bool, String) {
    let dir = std::env::temp_dir().join(format!("hardy-lab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let report_path = dir.join("verify.json");
    let status = Command::new(env!("CARGO_BIN_EXE_hardy-lab"))
        .args(["verify", "--trunc", "128", "--seed", "42", "--out"])
        .arg(&report_path)
        .stderr(std::process::Stdio::null())
        .status()
        .expect("run hardy-lab verify");
    let text = std::fs::read_to_string(&report_path).unwrap_or_default();
    let _ = std::fs::remove_dir_all(&dir);
    let Ok(report) = serde_json::from_str::<serde_json::Value>(&text) else {
        return (
            false,
            format!("exit {:?}, no readable report", status.code()),
        );
    };
    let suite = &report["result"];
    let inconsistencies = suite["inconsistencies"].as_u64().unwrap_or(u64::MAX);
    let runs = suite["classifier_runs"].as_u64().unwrap_or(0);
    let failing: Vec<String> = suite["failing"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_str().map(String::from))
                .collect()
        })
        .unwrap_or_default();
    let ok = status.code() == Some(0) && inconsistencies == 0 && runs > 0;
    let detail = format!(
        "exit={} classifier_runs={runs} inconsistencies={inconsistencies} failing={failing:?}",
        status.code().map_or("signal".into(), |c| c.to_string()),
    );
    (ok, detail)
}

fn main() {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    for (n, id) in ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10"]
        .iter()
        .enumerate()
    {
        let r = run_criterion(id, &cfg).expect("known criterion");
        line(n + 1, r.passed(), &r.title, &summarize(&r));
        if !r.passed() {
            failed.push(n + 1);
        }
    }
    let (ok, detail) = end_to_end();
    line(
        11,
        ok,
        "verify --trunc 128 --seed 42 exits 0 with zero inconsistencies",
        &detail,
    );
    if !ok {
        failed.push(11);
    }
    if !failed.is_empty() {
        println!(
            "acceptance: {} of 11 criteria failed: {failed:?}",
            failed.len()
        );
        std::process::exit(1);
    }
    println!("acceptance: all 11 criteria passed");
}
