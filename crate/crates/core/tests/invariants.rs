use hardy_lab::classify::{sigma_map, SymmetricFormParams};
use hardy_lab::operators::{
    adjoint, apply_conjugation, build_operator, conjugated_adjoint, inner_product, kernel_vector,
    Conjugation, KernelOrder,
};
use hardy_lab::series::{MobiusMap, PowerSeries};
use hardy_lab::spectral::diagonal_spectrum;
use hardy_lab::Complex64;
use proptest::prelude::*;

const N: usize = 24;

fn disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn unit() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(|t| Complex64::from_polar(1.0, t))
}

fn series(len: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec(disk(1.0), len).prop_map(|c| PowerSeries::new(c).unwrap())
}

fn self_map() -> impl Strategy<Value = MobiusMap> {
    (disk(1.0), disk(0.8), disk(0.5), disk(0.3)).prop_filter_map(
        "not a self-map",
        |(a, b, c, d)| {
            let m = MobiusMap::new(a, b, c, Complex64::new(1.0, 0.0) + d).ok()?;
            (m.sup_norm().ok()? <= 0.8).then_some(m)
        },
    )
}

fn max_abs(s: &PowerSeries) -> f64 {
    s.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_is_antiunitary(f in series(N), g in series(N), l in unit(), a in unit()) {
        let cj = Conjugation::new(l, a).unwrap();
        let lhs = inner_product(&apply_conjugation(&cj, &f), &apply_conjugation(&cj, &g)).unwrap();
        prop_assert!((lhs - inner_product(&g, &f).unwrap()).norm() < 1e-12);
        let back = apply_conjugation(&cj, &apply_conjugation(&cj, &f));
        prop_assert!(max_abs(&back.sub(&f).unwrap()) < 1e-13);
    }

    #[test]
    fn adjoint_pairing(u in series(4), phi in self_map(), f in series(N), g in series(N)) {
        let op = build_operator(&u.resized(N), &phi.to_series(N).unwrap(), 1, N).unwrap();
        let lhs = inner_product(&op.apply(&f).unwrap(), &g).unwrap();
        let rhs = inner_product(&f, &adjoint(&op).apply(&g).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn kernel_identity(u in series(4), phi in self_map(), w in disk(0.8)) {
        let n = 128;
        let op = build_operator(&u.resized(n), &phi.to_series(n).unwrap(), 1, n).unwrap();
        let lhs = adjoint(&op).apply(&kernel_vector(w, KernelOrder::Value, n).unwrap().coeffs).unwrap();
        let rhs = kernel_vector(phi.eval(w), KernelOrder::Derivative, n).unwrap().coeffs.scale(u.eval(w).conj());
        prop_assert!(lhs.sub(&rhs).unwrap().h2_norm_sq().sqrt() < 1e-8);
    }

    #[test]
    fn product_is_commutative_and_associative(f in series(N), g in series(N), h in series(N)) {
        let fg = f.mul(&g).unwrap();
        prop_assert!(max_abs(&fg.sub(&g.mul(&f).unwrap()).unwrap()) < 1e-12);
        let left = fg.mul(&h).unwrap();
        let right = f.mul(&g.mul(&h).unwrap()).unwrap();
        prop_assert!(max_abs(&left.sub(&right).unwrap()) < 1e-10);
    }

    #[test]
    fn conjugated_adjoint_is_lambda_free(u in series(3), phi in self_map(), l1 in unit(), l2 in unit(), a in unit()) {
        let op = build_operator(&u.resized(16), &phi.to_series(16).unwrap(), 1, 16).unwrap();
        let x = conjugated_adjoint(&op, &Conjugation::new(l1, a).unwrap());
        let y = conjugated_adjoint(&op, &Conjugation::new(l2, a).unwrap());
        prop_assert_eq!(x.entries(), y.entries());
    }

    #[test]
    fn sigma_is_an_involution(phi in self_map(), z in disk(0.9)) {
        let twice = sigma_map(&sigma_map(&phi));
        prop_assert_eq!(twice, phi);
        prop_assert!((twice.eval(z) - phi.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn series_agree_with_closed_forms(a in disk(2.0), b in disk(0.6), c in disk(0.5), alpha in unit(), z in disk(0.3)) {
        let p = SymmetricFormParams { a, b, c, alpha };
        let n = 96;
        let u_closed = a * z / (Complex64::new(1.0, 0.0) - alpha * b * z).powi(2);
        let phi_closed = b + c * z / (Complex64::new(1.0, 0.0) - alpha * b * z);
        prop_assert!((p.u(n).unwrap().eval(z) - u_closed).norm() < 1e-12);
        prop_assert!((p.phi(n).unwrap().eval(z) - phi_closed).norm() < 1e-12);
        prop_assert!((p.phi_mobius().unwrap().eval(z) - phi_closed).norm() < 1e-12);
    }

    #[test]
    fn argmax_follows_floor_rule(c in 0.05f64..0.97) {
        let s = diagonal_spectrum(1.0, c, 256).unwrap();
        let x = 1.0 / (1.0 - c);
        if (x - x.round()).abs() > 1e-9 * x {
            prop_assert_eq!(s.k_star, (x.floor() as usize).max(1));
        } else {
            prop_assert!(s.k_star + 1 == x.round() as usize || s.k_star == x.round() as usize);
        }
        prop_assert!((s.norm - s.k_star as f64 * c.powi(s.k_star as i32 - 1)).abs() < 1e-12 * s.norm);
    }
}

#[test]
fn argmax_on_integer_grid() {
    for (c, k_star, ties) in [
        (0.5, 1, vec![1, 2]),
        (0.75, 3, vec![3, 4]),
        (0.8, 4, vec![4, 5]),
        (0.9, 9, vec![9, 10]),
    ] {
        let s = diagonal_spectrum(1.0, c, 128).unwrap();
        assert_eq!(s.k_star, k_star, "c = {c}");
        assert_eq!(s.maximizers(), ties, "c = {c}");
        assert!((s.norm * c - s.paper_norm).abs() <= 1e-12 * s.paper_norm);
    }
}
