//! Monomial-basis matrices of `D^m_{u,phi} f = u * f^(m)(phi)`, reproducing
//! kernels, the conjugations `C_{lambda,alpha}` and the brute-force class
//! checks on truncated matrices.
//!
//! The basis `{z^n}` is orthonormal in H2, so the adjoint of a compressed
//! operator is the conjugate transpose with no Gram correction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{PowerSeries, DEFAULT_BOUNDARY_SAMPLES};

/// Default tolerance for identities that survive compression entrywise.
pub const TOL_ENTRYWISE: f64 = 1e-9;
/// Default tolerance for checks built from matrix products.
pub const TOL_PRODUCT: f64 = 1e-6;

const UNIT_TOL: f64 = 1e-12;

/// Where an [`OperatorMatrix`] came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub u: PowerSeries,
    pub phi: PowerSeries,
    pub order: usize,
    /// Sampled sup norm of the truncated symbol.
    pub phi_sup_norm: f64,
}

/// `N x N` matrix of an operator; `entries[(m, n)]` is the coefficient of
/// `z^m` in the image of `z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    meta: Option<Provenance>,
}

impl OperatorMatrix {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "operator matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            entries,
            meta: None,
        })
    }

    pub fn identity(trunc: usize) -> Self {
        Self {
            entries: DMatrix::identity(trunc, trunc),
            meta: None,
        }
    }

    pub fn trunc(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn meta(&self) -> Option<&Provenance> {
        self.meta.as_ref()
    }

    /// Apply to a coefficient vector of the same truncation.
    pub fn apply(&self, f: &PowerSeries) -> Result<PowerSeries> {
        if f.trunc() != self.trunc() {
            return Err(Error::TruncationMismatch {
                left: self.trunc(),
                right: f.trunc(),
            });
        }
        let v = DVector::from_column_slice(f.coeffs());
        PowerSeries::new((&self.entries * v).iter().copied().collect())
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).norm()
    }
}

/// Matrix of `D^m_{u,phi}` on the first `trunc` monomials.
///
/// Column `n` is the truncated expansion of `u * n!/(n-m)! * phi^(n-m)`, zero
/// for `n < m`. Coefficients below the truncation are exact: the low-order
/// coefficients of a product only see low-order coefficients of the factors.
pub fn build_operator(
    u: &PowerSeries,
    phi: &PowerSeries,
    order: usize,
    trunc: usize,
) -> Result<OperatorMatrix> {
    if trunc == 0 {
        return Err(Error::EmptySeries);
    }
    for (name, s) in [("u", u), ("phi", phi)] {
        if s.trunc() < trunc {
            return Err(Error::InvalidParameter(format!(
                "{name} has {} coefficients, need at least {trunc}",
                s.trunc()
            )));
        }
    }
    let u = u.resized(trunc);
    let phi = phi.resized(trunc);
    let phi_sup_norm = phi.boundary_sup_norm(DEFAULT_BOUNDARY_SAMPLES);
    if phi_sup_norm >= 1.0 {
        return Err(Error::NotSelfMap {
            sup_norm: phi_sup_norm,
        });
    }

    let mut entries = DMatrix::zeros(trunc, trunc);
    let mut weighted_power = u.clone(); // u * phi^(n - m)
    for n in order..trunc {
        let falling: f64 = ((n - order + 1)..=n).map(|k| k as f64).product();
        for (row, c) in weighted_power.coeffs().iter().enumerate() {
            entries[(row, n)] = c * falling;
        }
        if n + 1 < trunc {
            weighted_power = weighted_power.mul(&phi)?;
        }
    }
    Ok(OperatorMatrix {
        entries,
        meta: Some(Provenance {
            u,
            phi,
            order,
            phi_sup_norm,
        }),
    })
}

/// Order of a reproducing kernel: 0 evaluates `f(w)`, 1 evaluates `f'(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelOrder {
    Value,
    Derivative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelVector {
    pub w: Complex64,
    pub order: KernelOrder,
    pub coeffs: PowerSeries,
}

/// `K_w = 1/(1 - conj(w) z)` or `K^(1)_w = z/(1 - conj(w) z)^2`.
pub fn kernel_vector(w: Complex64, order: KernelOrder, trunc: usize) -> Result<KernelVector> {
    if w.norm() >= 1.0 {
        return Err(Error::OutsideDisk(format!("w = {w}")));
    }
    let trunc = trunc.max(1);
    let wc = w.conj();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); trunc];
    match order {
        KernelOrder::Value => {
            let mut p = Complex64::new(1.0, 0.0);
            for slot in coeffs.iter_mut() {
                *slot = p;
                p *= wc;
            }
        }
        KernelOrder::Derivative => {
            let mut p = Complex64::new(1.0, 0.0);
            for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
                *slot = p * n as f64;
                p *= wc;
            }
        }
    }
    Ok(KernelVector {
        w,
        order,
        coeffs: PowerSeries::new(coeffs)?,
    })
}

/// `sum a_n conj(b_n)` over the truncation.
pub fn inner_product(f: &PowerSeries, g: &PowerSeries) -> Result<Complex64> {
    if f.trunc() != g.trunc() {
        return Err(Error::TruncationMismatch {
            left: f.trunc(),
            right: g.trunc(),
        });
    }
    Ok(f.coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// Conjugate transpose.
pub fn adjoint(op: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix {
        entries: op.entries.adjoint(),
        meta: None,
    }
}

/// `C_{lambda,alpha} f(z) = lambda * conj(f(conj(alpha z)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conjugation {
    #[serde(with = "crate::report::complex_pair")]
    lambda: Complex64,
    #[serde(with = "crate::report::complex_pair")]
    alpha: Complex64,
}

impl Conjugation {
    pub fn new(lambda: Complex64, alpha: Complex64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("alpha", alpha)] {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidParameter(format!(
                    "{name} must have modulus 1, got {}",
                    v.norm()
                )));
            }
        }
        Ok(Self { lambda, alpha })
    }

    /// `C_{1,1}`: coefficientwise complex conjugation.
    pub fn standard() -> Self {
        Self {
            lambda: Complex64::new(1.0, 0.0),
            alpha: Complex64::new(1.0, 0.0),
        }
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// `lambda * alpha^k`, the diagonal factor on `z^k`.
    fn weights(&self, trunc: usize) -> Vec<Complex64> {
        alpha_powers(self.alpha, trunc)
            .into_iter()
            .map(|p| self.lambda * p)
            .collect()
    }
}

fn alpha_powers(alpha: Complex64, trunc: usize) -> Vec<Complex64> {
    let mut w = Vec::with_capacity(trunc);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..trunc {
        w.push(p);
        p *= alpha;
    }
    w
}

/// Coefficientwise `lambda * alpha^n * conj(a_n)`.
pub fn apply_conjugation(conj: &Conjugation, f: &PowerSeries) -> PowerSeries {
    let w = conj.weights(f.trunc());
    PowerSeries::new(
        f.coeffs()
            .iter()
            .zip(w)
            .map(|(a, l)| l * a.conj())
            .collect(),
    )
    .expect("nonempty by construction")
}

/// Matrix of `C T* C`: entry `(m, n)` is `L_m conj(L_n) T[n][m]` with
/// `L_k = lambda alpha^k`. Since `|lambda| = 1` the factor reduces to
/// `alpha^m conj(alpha^n)`, and it is evaluated that way so the result does
/// not depend on `lambda` even at rounding level.
pub fn conjugated_adjoint(op: &OperatorMatrix, conj: &Conjugation) -> OperatorMatrix {
    let n = op.trunc();
    let w = alpha_powers(conj.alpha, n);
    let entries = DMatrix::from_fn(n, n, |r, c| w[r] * w[c].conj() * op.entries[(c, r)]);
    OperatorMatrix {
        entries,
        meta: None,
    }
}

/// Outcome of a brute-force matrix check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub flag: bool,
    pub residual: f64,
    pub tol: f64,
}

impl CheckOutcome {
    fn new(residual: f64, tol: f64) -> Self {
        Self {
            flag: residual <= tol,
            residual,
            tol,
        }
    }
}

/// `|| M - C M* C ||_F <= tol`.
pub fn check_complex_symmetric(op: &OperatorMatrix, conj: &Conjugation, tol: f64) -> CheckOutcome {
    CheckOutcome::new(op.frobenius_distance(&conjugated_adjoint(op, conj)), tol)
}

/// `|| M - M* ||_F <= tol`.
pub fn check_self_adjoint(op: &OperatorMatrix, tol: f64) -> CheckOutcome {
    CheckOutcome::new(op.frobenius_distance(&adjoint(op)), tol)
}

/// `|| M M* - M* M ||_F <= tol`. Compression does not commute with
/// products, so `tol` has to absorb a geometric tail in the truncation.
pub fn check_normal(op: &OperatorMatrix, tol: f64) -> CheckOutcome {
    let m = &op.entries;
    let h = m.adjoint();
    CheckOutcome::new((m * &h - &h * m).norm(), tol)
}

/// `|| M* M - I ||_F <= tol`.
pub fn check_unitary(op: &OperatorMatrix, tol: f64) -> CheckOutcome {
    let m = &op.entries;
    let gram = m.adjoint() * m;
    let n = op.trunc();
    CheckOutcome::new((gram - DMatrix::identity(n, n)).norm(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::symmetric_form_phi;
    use crate::series::symmetric_form_u;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(xs: &[f64]) -> PowerSeries {
        PowerSeries::from_real(xs).unwrap()
    }

    fn poly(xs: &[f64], n: usize) -> PowerSeries {
        real(xs).resized(n)
    }

    /// Column `n` straight from the definition: u * n * phi^(n-1), with the
    /// power formed by naive repeated multiplication.
    fn naive_column(u: &PowerSeries, phi: &PowerSeries, n: usize) -> PowerSeries {
        if n == 0 {
            return PowerSeries::zeros(u.trunc());
        }
        let mut p = PowerSeries::unit(u.trunc());
        for _ in 0..n - 1 {
            p = p.mul(phi).unwrap();
        }
        u.mul(&p).unwrap().scale(c(n as f64, 0.0))
    }

    #[test]
    fn build_diagonal_example() {
        let m = build_operator(&poly(&[0., 1.], 4), &poly(&[0., 0.5], 4), 1, 4).unwrap();
        let want = [0.0, 1.0, 1.0, 0.75];
        for (r, &d) in want.iter().enumerate() {
            for k in 0..4 {
                let w = if r == k { d } else { 0.0 };
                assert!((m.entry(r, k) - c(w, 0.)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn build_composition_example() {
        let m = build_operator(&poly(&[1.], 3), &poly(&[0., 0.5], 3), 0, 3).unwrap();
        let want =
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(1., 0.), c(0.5, 0.), c(0.25, 0.)]));
        assert!((m.entries() - want).norm() < 1e-15);
    }

    #[test]
    fn build_matches_naive_columns_and_kills_constants() {
        let n = 12;
        let u = PowerSeries::new(
            (0..n)
                .map(|k| c(0.3 / (k + 1) as f64, 0.1 * k as f64 / 12.0))
                .collect(),
        )
        .unwrap();
        let phi = symmetric_form_phi(c(0.2, 0.1), c(0.3, -0.1), c(0., 1.), n).unwrap();
        let m = build_operator(&u, &phi, 1, n).unwrap();
        for k in 0..n {
            let col = naive_column(&u, &phi, k);
            for r in 0..n {
                assert!((m.entry(r, k) - col.coeff(r)).norm() < 1e-14);
            }
        }
        assert!((0..n).all(|r| m.entry(r, 0) == c(0., 0.)));
    }

    #[test]
    fn build_general_order() {
        // m = 2: column n is u * n (n-1) phi^(n-2)
        let n = 6;
        let m = build_operator(&poly(&[0., 1.], n), &poly(&[0., 0.5], n), 2, n).unwrap();
        for k in 0..n {
            let want = if k >= 2 && k - 1 < n {
                (k * (k - 1)) as f64 * 0.5f64.powi(k as i32 - 2)
            } else {
                0.0
            };
            if k >= 2 {
                assert!((m.entry(k - 1, k).re - want).abs() < 1e-14);
            } else {
                assert!((0..n).all(|r| m.entry(r, k) == c(0., 0.)));
            }
        }
    }

    #[test]
    fn build_rejects_non_self_map() {
        let err = build_operator(&poly(&[0., 1.], 8), &poly(&[0., 1.], 8), 1, 8).unwrap_err();
        assert!(matches!(err, Error::NotSelfMap { .. }));
        assert!(build_operator(&poly(&[0., 1.], 4), &poly(&[0., 0.5], 4), 1, 8).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_vector(c(0.5, 0.), KernelOrder::Value, 4).unwrap();
        assert_eq!(k.coeffs, real(&[1., 0.5, 0.25, 0.125]));
        let k = kernel_vector(c(0.5, 0.), KernelOrder::Derivative, 4).unwrap();
        assert_eq!(k.coeffs, real(&[0., 1., 1., 0.75]));
        let k = kernel_vector(c(0., 0.), KernelOrder::Derivative, 4).unwrap();
        assert_eq!(k.coeffs, real(&[0., 1., 0., 0.]));
        assert!(kernel_vector(c(0.6, 0.8), KernelOrder::Value, 4).is_err());
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(
            inner_product(&real(&[1., 2.]), &real(&[1., 1.])).unwrap(),
            c(3., 0.)
        );
        let n = 64;
        let f = poly(&[1., 0., 1.], n);
        let k = kernel_vector(c(0.5, 0.), KernelOrder::Value, n).unwrap();
        assert!((inner_product(&f, &k.coeffs).unwrap() - c(1.25, 0.)).norm() < 1e-15);
        let f = poly(&[0., 0., 0., 1.], n);
        let k1 = kernel_vector(c(0.5, 0.), KernelOrder::Derivative, n).unwrap();
        assert!((inner_product(&f, &k1.coeffs).unwrap() - c(0.75, 0.)).norm() < 1e-15);
        assert!(inner_product(&real(&[1.]), &real(&[1., 2.])).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let d = OperatorMatrix::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(1., 2.),
            c(-0.5, 0.25),
        ])))
        .unwrap();
        let a = adjoint(&d);
        assert_eq!(a.entry(0, 0), c(1., -2.));
        assert_eq!(a.entry(1, 1), c(-0.5, -0.25));
        assert_eq!(adjoint(&a).entries(), d.entries());
    }

    #[test]
    fn adjoint_on_kernels_for_diagonal_example() {
        let n = 64;
        let u = poly(&[0., 1.], n);
        let phi = poly(&[0., 0.5], n);
        let m = build_operator(&u, &phi, 1, n).unwrap();
        let w = c(0.3, -0.4);
        let lhs = adjoint(&m)
            .apply(&kernel_vector(w, KernelOrder::Value, n).unwrap().coeffs)
            .unwrap();
        let rhs = kernel_vector(phi.eval(w), KernelOrder::Derivative, n)
            .unwrap()
            .coeffs
            .scale(u.eval(w).conj());
        assert!(lhs.sub(&rhs).unwrap().h2_norm_sq().sqrt() < 1e-14);
    }

    #[test]
    fn conjugation_examples() {
        let f = real(&[1., -2., 0.5]);
        assert_eq!(apply_conjugation(&Conjugation::standard(), &f), f);
        let cj = Conjugation::new(c(1., 0.), c(-1., 0.)).unwrap();
        let g = PowerSeries::new(vec![c(0., 1.), c(1., 0.)]).unwrap();
        assert_eq!(
            apply_conjugation(&cj, &g),
            PowerSeries::new(vec![c(0., -1.), c(-1., 0.)]).unwrap()
        );
        let cj = Conjugation::new(
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, -1.3),
        )
        .unwrap();
        let h = PowerSeries::new(vec![c(0.3, 0.2), c(-1., 4.), c(2., -0.7)]).unwrap();
        let back = apply_conjugation(&cj, &apply_conjugation(&cj, &h));
        assert!(back
            .sub(&h)
            .unwrap()
            .coeffs()
            .iter()
            .all(|d| d.norm() < 1e-14));
        assert!(Conjugation::new(c(1.1, 0.), c(1., 0.)).is_err());
    }

    #[test]
    fn conjugated_adjoint_examples() {
        let d = OperatorMatrix::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(1., 0.),
            c(-2., 0.),
            c(0.5, 0.),
        ])))
        .unwrap();
        assert_eq!(
            conjugated_adjoint(&d, &Conjugation::standard()).entries(),
            d.entries()
        );

        let n = 64;
        let one = c(1., 0.);
        let u = symmetric_form_u(one, c(0.3, 0.), one, n).unwrap();
        let phi = symmetric_form_phi(c(0.3, 0.), c(0.1, 0.), one, n).unwrap();
        let m = build_operator(&u, &phi, 1, n).unwrap();
        let cm = conjugated_adjoint(&m, &Conjugation::standard());
        assert!(m
            .entries()
            .iter()
            .zip(cm.entries().iter())
            .all(|(a, b)| (a - b).norm() <= 1e-10));

        let g = OperatorMatrix::from_matrix(DMatrix::from_fn(3, 3, |r, k| {
            c(r as f64 + 0.5, k as f64 - 1.0)
        }))
        .unwrap();
        let cj = Conjugation::new(one, c(0., 1.)).unwrap();
        let out = conjugated_adjoint(&g, &cj);
        assert!((out.entry(0, 1) - c(0., -1.) * g.entry(1, 0)).norm() < 1e-15);
    }

    #[test]
    fn complex_symmetric_examples() {
        let n = 128;
        let one = c(1., 0.);
        let diag = build_operator(
            &symmetric_form_u(one, c(0., 0.), one, n).unwrap(),
            &symmetric_form_phi(c(0., 0.), c(0.5, 0.), one, n).unwrap(),
            1,
            n,
        )
        .unwrap();
        let out = check_complex_symmetric(&diag, &Conjugation::standard(), 1e-13);
        assert!(out.flag && out.residual <= 1e-13);

        let fam = build_operator(
            &symmetric_form_u(one, c(0.3, 0.), one, n).unwrap(),
            &symmetric_form_phi(c(0.3, 0.), c(0.1, 0.), one, n).unwrap(),
            1,
            n,
        )
        .unwrap();
        assert!(check_complex_symmetric(&fam, &Conjugation::standard(), TOL_ENTRYWISE).flag);

        let wrong = build_operator(&poly(&[0., 0., 1.], n), &poly(&[0., 0.5], n), 1, n).unwrap();
        let out = check_complex_symmetric(&wrong, &Conjugation::standard(), TOL_ENTRYWISE);
        assert!(!out.flag && out.residual >= 0.1, "{}", out.residual);
    }

    #[test]
    fn self_adjoint_examples() {
        let n = 128;
        let m = build_operator(&poly(&[0., 1.], n), &poly(&[0., 0.5], n), 1, n).unwrap();
        assert!(check_self_adjoint(&m, TOL_ENTRYWISE).flag);

        let one = c(1., 0.);
        let b = c(0.3, 0.);
        let phi = symmetric_form_phi(b, c(0.1, 0.), one, n).unwrap();
        let m = build_operator(&symmetric_form_u(one, b, one, n).unwrap(), &phi, 1, n).unwrap();
        assert!(check_self_adjoint(&m, TOL_ENTRYWISE).flag);

        let ai = c(0., 1.);
        let m = build_operator(&symmetric_form_u(ai, b, one, n).unwrap(), &phi, 1, n).unwrap();
        let out = check_self_adjoint(&m, TOL_ENTRYWISE);
        // entry (1,1) is a itself, so the residual is at least |a - conj(a)|
        assert!(!out.flag && out.residual >= 0.5 * (ai - ai.conj()).norm());
    }

    #[test]
    fn normal_and_unitary_examples() {
        let n = 64;
        let m = build_operator(&poly(&[0., 1.], n), &poly(&[0., 0.5], n), 1, n).unwrap();
        assert!(check_normal(&m, TOL_PRODUCT).flag);
        let u = check_unitary(&m, TOL_PRODUCT);
        assert!(!u.flag && u.residual >= 1.0);
        assert!(check_unitary(&OperatorMatrix::identity(5), 1e-15).flag);

        // commutator computed by explicit loops as an independent oracle
        let m = build_operator(&poly(&[0., 1.], n), &poly(&[0.3, 0.2], n), 1, n).unwrap();
        let e = m.entries();
        let mut comm = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = c(0., 0.);
                for k in 0..n {
                    s += e[(i, k)] * e[(j, k)].conj() - e[(k, i)].conj() * e[(k, j)];
                }
                comm += s.norm_sqr();
            }
        }
        let out = check_normal(&m, TOL_PRODUCT);
        assert!((out.residual - comm.sqrt()).abs() < 1e-12);
        assert!(!out.flag);
    }
}
