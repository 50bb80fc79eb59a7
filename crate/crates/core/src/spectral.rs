//! Spectrum and norm of the diagonal family `u = a z`, `phi = c z`, power
//! iteration for the norm of a general truncated matrix, and truncation
//! convergence studies.
//!
//! For the diagonal family `D(z^n) = a z * n (c z)^(n-1) = n a c^(n-1) z^n`.
//! The closed-form norm `a k c^k` with `k = floor(1/(1-c))` is recorded next
//! to the measured maximum but never used as ground truth: the two differ by
//! one factor of `c` whenever the maximizing index is `k`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::operators::{
    build_operator, check_complex_symmetric, check_normal, check_self_adjoint, check_unitary,
    inner_product, kernel_vector, Conjugation, KernelOrder, OperatorMatrix,
};
use crate::report::complex_pair;
use crate::series::PowerSeries;

/// Relative gap below which two diagonal entries count as a tie.
pub const TIE_TOL: f64 = 1e-12;
/// Absolute residual below which a convergence sequence is at rounding level.
pub const ROUNDING_FLOOR: f64 = 1e-12;
/// Allowed relative increase between consecutive residuals in a study.
pub const MONOTONE_SLACK: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSpectrum {
    pub a: f64,
    pub c: f64,
    /// Eigenvalue on `z^n`, read off the built matrix.
    pub entries: Vec<f64>,
    pub k_star: usize,
    pub norm: f64,
    /// `floor(1/(1-c))`, snapped to the nearest integer when `1/(1-c)` is one
    /// up to rounding.
    pub paper_k: usize,
    /// `|a| k c^k` with `k = paper_k`.
    pub paper_norm: f64,
    pub trunc: usize,
    /// Largest off-diagonal modulus in the built matrix.
    pub off_diagonal_max: f64,
}

/// Side-by-side comparison of the measured and closed-form norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormAudit {
    pub oracle_norm: f64,
    pub paper_norm: f64,
    pub k_star: usize,
    pub paper_k: usize,
    /// `oracle_norm / paper_norm`; `None` for the zero operator.
    pub ratio: Option<f64>,
    pub a_sign: f64,
}

impl DiagonalSpectrum {
    pub fn audit(&self) -> NormAudit {
        NormAudit {
            oracle_norm: self.norm,
            paper_norm: self.paper_norm,
            k_star: self.k_star,
            paper_k: self.paper_k,
            ratio: (self.paper_norm != 0.0).then(|| self.norm / self.paper_norm),
            a_sign: if self.a < 0.0 { -1.0 } else { 1.0 },
        }
    }

    /// Indices whose modulus ties with the maximum.
    pub fn maximizers(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| self.norm > 0.0 && (self.norm - e.abs()) <= TIE_TOL * self.norm)
            .map(|(n, _)| n)
            .collect()
    }
}

/// `floor(1/(1-c))` with integer snapping.
pub fn closed_form_index(c: f64) -> usize {
    let x = 1.0 / (1.0 - c);
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// Smallest truncation for which `n c^(n-1)` is past its peak everywhere
/// beyond the matrix: `2/(1-c)`.
pub fn min_certified_trunc(c: f64) -> usize {
    (2.0 / (1.0 - c)).ceil() as usize
}

fn validate_diagonal(a: f64, c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "c must lie in (0, 1), got {c}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "a must be finite, got {a}"
        )));
    }
    Ok(())
}

fn diagonal_operator(a: f64, c: f64, trunc: usize) -> Result<OperatorMatrix> {
    let u = PowerSeries::monomial(1, Complex64::new(a, 0.0), trunc);
    let phi = PowerSeries::monomial(1, Complex64::new(c, 0.0), trunc);
    build_operator(&u, &phi, 1, trunc)
}

pub fn diagonal_spectrum(a: f64, c: f64, trunc: usize) -> Result<DiagonalSpectrum> {
    validate_diagonal(a, c)?;
    let need = min_certified_trunc(c);
    if trunc < need {
        return Err(Error::InvalidParameter(format!(
            "truncation {trunc} cannot certify the tail for c = {c}; need at least {need}"
        )));
    }
    let op = diagonal_operator(a, c, trunc)?;
    let e = op.entries();
    let entries: Vec<f64> = (0..trunc).map(|n| e[(n, n)].re).collect();
    let mut off_diagonal_max: f64 = 0.0;
    for row in 0..trunc {
        for col in 0..trunc {
            let z = e[(row, col)];
            if row != col {
                off_diagonal_max = off_diagonal_max.max(z.norm());
            } else {
                off_diagonal_max = off_diagonal_max.max(z.im.abs());
            }
        }
    }
    let norm = entries.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let k_star = entries
        .iter()
        .position(|x| norm - x.abs() <= TIE_TOL * norm)
        .unwrap_or(0);
    let paper_k = closed_form_index(c);
    let paper_norm = a.abs() * paper_k as f64 * c.powi(paper_k as i32);
    Ok(DiagonalSpectrum {
        a,
        c,
        entries,
        k_star,
        norm,
        paper_k,
        paper_norm,
        trunc,
        off_diagonal_max,
    })
}

/// `|| M e_n - lambda_n e_n ||` for the diagonal family.
pub fn eigenvector_check(a: f64, c: f64, n: usize, trunc: usize) -> Result<f64> {
    validate_diagonal(a, c)?;
    if n >= trunc {
        return Err(Error::InvalidParameter(format!(
            "index {n} outside truncation {trunc}"
        )));
    }
    let op = diagonal_operator(a, c, trunc)?;
    let lambda = op.entry(n, n);
    let col = op.entries().column(n);
    Ok(col
        .iter()
        .enumerate()
        .map(|(row, z)| {
            let target = if row == n {
                lambda
            } else {
                Complex64::new(0.0, 0.0)
            };
            (z - target).norm_sqr()
        })
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub rel_change: f64,
    pub trunc: usize,
    pub converged: bool,
    pub seed: u64,
}

struct PowerRun {
    value: f64,
    iterations: usize,
    rel_change: f64,
    converged: bool,
}

fn power_run(
    op: &OperatorMatrix,
    start: DVector<Complex64>,
    max_iter: usize,
    rel_tol: f64,
) -> PowerRun {
    let m = op.entries();
    let h = m.adjoint();
    let mut v = start;
    let norm = v.norm();
    if norm == 0.0 {
        return PowerRun {
            value: 0.0,
            iterations: 1,
            rel_change: 0.0,
            converged: true,
        };
    }
    v /= Complex64::new(norm, 0.0);
    let mut value = 0.0;
    let mut rel_change = f64::INFINITY;
    for it in 1..=max_iter {
        let mv = m * &v;
        let next = mv.norm();
        if next == 0.0 {
            return PowerRun {
                value: 0.0,
                iterations: it,
                rel_change: 0.0,
                converged: true,
            };
        }
        rel_change = (next - value).abs() / next;
        value = next;
        if rel_change <= rel_tol {
            return PowerRun {
                value,
                iterations: it,
                rel_change,
                converged: true,
            };
        }
        let w = &h * mv;
        let wn = w.norm();
        if wn == 0.0 {
            return PowerRun {
                value,
                iterations: it,
                rel_change,
                converged: true,
            };
        }
        v = w / Complex64::new(wn, 0.0);
    }
    PowerRun {
        value,
        iterations: max_iter,
        rel_change,
        converged: false,
    }
}

/// Largest singular value by power iteration on `M* M`, started from the
/// normalized all-ones vector and from one seeded random vector.
pub fn operator_norm_estimate(
    op: &OperatorMatrix,
    max_iter: usize,
    rel_tol: f64,
    seed: u64,
) -> NormEstimate {
    let n = op.trunc();
    let ones = DVector::from_element(n, Complex64::new(1.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = DVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let first = power_run(op, ones, max_iter, rel_tol);
    let second = power_run(op, random, max_iter, rel_tol);
    let best = if second.value > first.value {
        &second
    } else {
        &first
    };
    NormEstimate {
        value: best.value,
        iterations: first.iterations + second.iterations,
        rel_change: best.rel_change,
        trunc: n,
        converged: first.converged && second.converged,
        seed,
    }
}

/// Quantity tracked by [`truncation_convergence_study`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum StudyCheck {
    ComplexSymmetric {
        #[serde(with = "complex_pair")]
        lambda: Complex64,
        #[serde(with = "complex_pair")]
        alpha: Complex64,
    },
    SelfAdjoint,
    Normal,
    Unitary,
    /// `|<u_N, K_w> - u(w)|` with `u(w)` from the closed form.
    Reproducing {
        #[serde(with = "complex_pair")]
        w: Complex64,
    },
}

impl StudyCheck {
    pub fn is_product_based(&self) -> bool {
        matches!(self, StudyCheck::Normal | StudyCheck::Unitary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub check: StudyCheck,
    pub rows: Vec<(usize, f64)>,
    /// Each residual is at most 10% above its predecessor, or at rounding level.
    pub non_increasing: bool,
    pub final_below_tol: bool,
    pub tol: f64,
}

pub fn truncation_convergence_study(
    u_spec: &FunctionSpec,
    phi_spec: &FunctionSpec,
    check: StudyCheck,
    truncs: &[usize],
    tol: f64,
) -> Result<ConvergenceStudy> {
    if truncs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "truncations must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(truncs.len());
    for &n in truncs {
        let u = u_spec.series(n)?;
        let residual = match check {
            StudyCheck::Reproducing { w } => {
                let k = kernel_vector(w, KernelOrder::Value, n)?;
                (inner_product(&u, &k.coeffs)? - u_spec.eval(w)).norm()
            }
            _ => {
                let op = build_operator(&u, &phi_spec.series(n)?, 1, n)?;
                match check {
                    StudyCheck::ComplexSymmetric { lambda, alpha } => {
                        check_complex_symmetric(&op, &Conjugation::new(lambda, alpha)?, tol)
                            .residual
                    }
                    StudyCheck::SelfAdjoint => check_self_adjoint(&op, tol).residual,
                    StudyCheck::Normal => check_normal(&op, tol).residual,
                    StudyCheck::Unitary => check_unitary(&op, tol).residual,
                    StudyCheck::Reproducing { .. } => unreachable!(),
                }
            }
        };
        rows.push((n, residual));
    }
    let non_increasing = rows
        .windows(2)
        .all(|w| w[1].1 <= (1.0 + MONOTONE_SLACK) * w[0].1 + ROUNDING_FLOOR);
    let final_below_tol = rows.last().is_some_and(|r| r.1 <= tol);
    Ok(ConvergenceStudy {
        check,
        rows,
        non_increasing,
        final_below_tol,
        tol,
    })
}
