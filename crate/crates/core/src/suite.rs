//! Regression suite over every closed-form claim in scope.
//!
//! Each criterion is deterministic given `(trunc, seed)`: randomized
//! instances come from a ChaCha stream seeded from the suite seed and the
//! criterion index, so skipping one criterion does not shift the others.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{
    check_adjoint_lemma, check_normality_condition, classify_self_adjoint, classify_symmetry,
    ClassificationReport, SymmetricFormParams,
};
use crate::error::Result;
use crate::function::FunctionSpec;
use crate::operators::{
    adjoint, apply_conjugation, build_operator, check_complex_symmetric, check_normal,
    check_self_adjoint, inner_product, kernel_vector, Conjugation, KernelOrder, TOL_ENTRYWISE,
    TOL_PRODUCT,
};
use crate::series::{MobiusMap, PowerSeries, DEFAULT_TRUNC};
use crate::spectral::{
    closed_form_index, diagonal_spectrum, operator_norm_estimate, truncation_convergence_study,
    StudyCheck,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trunc: usize,
    pub seed: u64,
    pub tol_entrywise: f64,
    pub tol_product: f64,
    /// Criterion ids (`C1`..`C10`, `AGREE`) or group names to leave out.
    pub skip: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trunc: DEFAULT_TRUNC,
            seed: 42,
            tol_entrywise: TOL_ENTRYWISE,
            tol_product: TOL_PRODUCT,
            skip: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A product-based check failed at a truncation too small for the
    /// geometric tail to fall under its tolerance.
    TailLimited,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub group: String,
    pub title: String,
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
    pub detail: String,
    pub classifier_runs: usize,
    pub inconsistencies: usize,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub trunc: usize,
    pub seed: u64,
    pub tol_entrywise: f64,
    pub tol_product: f64,
    pub skipped: Vec<String>,
    pub results: Vec<CriterionResult>,
    pub classifier_runs: usize,
    pub inconsistencies: usize,
    pub failing: Vec<String>,
    pub all_passed: bool,
}

/// `(id, group, title)` of every criterion, in run order.
pub const CRITERIA: &[(&str, &str, &str)] = &[
    (
        "C1",
        "reproducing",
        "reproducing kernels evaluate f(w) and f'(w)",
    ),
    (
        "C2",
        "conjugation",
        "C_{lambda,alpha} is antiunitary and involutive",
    ),
    (
        "C3",
        "kernel",
        "adjoint maps K_w to conj(u(w)) K^(1)_{phi(w)}",
    ),
    (
        "C4",
        "symmetry",
        "symmetric-form parameters give C-symmetric matrices",
    ),
    (
        "C5",
        "symmetry",
        "perturbed out-of-family instances are not C-symmetric",
    ),
    (
        "C6",
        "lemma",
        "adjoint of D_{K1_sigma(0),phi} is D_{K1_phi(0),sigma}",
    ),
    (
        "C7",
        "normal",
        "normality example: normal and not self-adjoint",
    ),
    (
        "C8",
        "self_adjoint",
        "real parameters self-adjoint, imaginary shifts not",
    ),
    (
        "C9",
        "spectral",
        "diagonal family spectrum, norm and closed-form audit",
    ),
    (
        "C10",
        "convergence",
        "normality residual decays with truncation",
    ),
    (
        "AGREE",
        "agreement",
        "analytic verdicts match matrix oracle on 200 instances",
    ),
];

struct Outcome {
    ok: bool,
    metrics: BTreeMap<String, f64>,
    detail: String,
    classifier_runs: usize,
    inconsistencies: usize,
    tail_limited: bool,
}

impl Outcome {
    fn new() -> Self {
        Self {
            ok: true,
            metrics: BTreeMap::new(),
            detail: String::new(),
            classifier_runs: 0,
            inconsistencies: 0,
            tail_limited: false,
        }
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn count(&mut self, report: &ClassificationReport) {
        self.classifier_runs += 1;
        self.inconsistencies += report.inconsistencies();
    }
}

fn is_skipped(cfg: &SuiteConfig, id: &str, group: &str) -> bool {
    cfg.skip
        .iter()
        .any(|s| s.eq_ignore_ascii_case(id) || s.eq_ignore_ascii_case(group))
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for (id, group, _) in CRITERIA {
        if is_skipped(cfg, id, group) {
            skipped.push(id.to_string());
            continue;
        }
        results.push(run_criterion(id, cfg).expect("id comes from CRITERIA"));
    }
    let failing: Vec<String> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.id.clone())
        .collect();
    SuiteReport {
        trunc: cfg.trunc,
        seed: cfg.seed,
        tol_entrywise: cfg.tol_entrywise,
        tol_product: cfg.tol_product,
        skipped,
        classifier_runs: results.iter().map(|r| r.classifier_runs).sum(),
        inconsistencies: results.iter().map(|r| r.inconsistencies).sum(),
        all_passed: failing.is_empty(),
        failing,
        results,
    }
}

/// Run one criterion by id; `None` for an unknown id.
pub fn run_criterion(id: &str, cfg: &SuiteConfig) -> Option<CriterionResult> {
    let index = CRITERIA
        .iter()
        .position(|(cid, _, _)| cid.eq_ignore_ascii_case(id))?;
    let (cid, group, title) = CRITERIA[index];
    let mut rng = ChaCha8Rng::seed_from_u64(
        cfg.seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1)),
    );
    let run = match cid {
        "C1" => reproducing(cfg, &mut rng),
        "C2" => conjugation_axioms(cfg, &mut rng),
        "C3" => kernel_identity(cfg, &mut rng),
        "C4" => symmetry_forward(cfg, &mut rng),
        "C5" => symmetry_converse(cfg, &mut rng),
        "C6" => adjoint_lemma(cfg, &mut rng),
        "C7" => normal_example(cfg),
        "C8" => self_adjoint_both_ways(cfg, &mut rng),
        "C9" => spectral_audit(cfg),
        "C10" => normal_convergence(cfg),
        "AGREE" => agreement(cfg, &mut rng),
        _ => unreachable!(),
    };
    Some(match run {
        Ok(out) => CriterionResult {
            id: cid.to_string(),
            group: group.to_string(),
            title: title.to_string(),
            status: if out.ok {
                Status::Pass
            } else if out.tail_limited {
                Status::TailLimited
            } else {
                Status::Fail
            },
            metrics: out.metrics,
            detail: out.detail,
            classifier_runs: out.classifier_runs,
            inconsistencies: out.inconsistencies,
        },
        Err(e) => CriterionResult {
            id: cid.to_string(),
            group: group.to_string(),
            title: title.to_string(),
            status: Status::Error,
            metrics: BTreeMap::new(),
            detail: e.to_string(),
            classifier_runs: 0,
            inconsistencies: 0,
        },
    })
}

// ---- random instances ----

fn in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
}

fn on_circle(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

/// Linear fractional self-map with `0.05 < sup |phi| <= max_sup`.
pub fn random_mobius(rng: &mut ChaCha8Rng, max_sup: f64) -> MobiusMap {
    loop {
        let d = ONE + in_disk(rng, 0.3);
        let Ok(m) = MobiusMap::new(in_disk(rng, 1.0), in_disk(rng, 0.8), in_disk(rng, 0.5), d)
        else {
            continue;
        };
        if let Ok(sup) = m.sup_norm() {
            if sup > 0.05 && sup <= max_sup {
                return m;
            }
        }
    }
}

/// Symmetric-form parameters whose symbol is a self-map with sup norm at most `max_sup`.
pub fn random_symmetric_params(rng: &mut ChaCha8Rng, max_sup: f64) -> SymmetricFormParams {
    loop {
        let a = in_disk(rng, 2.0);
        if a.norm() < 0.3 {
            continue;
        }
        let p = SymmetricFormParams {
            a,
            b: in_disk(rng, 0.6),
            c: in_disk(rng, 0.5),
            alpha: on_circle(rng),
        };
        if let Ok(sup) = p.phi_mobius().and_then(|m| m.sup_norm()) {
            if sup < max_sup {
                return p;
            }
        }
    }
}

fn random_real_params(rng: &mut ChaCha8Rng) -> SymmetricFormParams {
    loop {
        let mag = rng.random_range(0.5..2.0);
        let a = if rng.random::<bool>() { mag } else { -mag };
        let p = SymmetricFormParams {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(rng.random_range(-0.6..0.6), 0.0),
            c: Complex64::new(rng.random_range(-0.5..0.5), 0.0),
            alpha: ONE,
        };
        if p.c.norm() < 0.05 {
            continue;
        }
        if let Ok(sup) = p.phi_mobius().and_then(|m| m.sup_norm()) {
            // leave room for the imaginary shifts of C8
            if sup < 0.85 {
                return p;
            }
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<Complex64> {
    let degree = rng.random_range(0..=max_degree);
    let mut coeffs: Vec<Complex64> = (0..=degree).map(|_| in_disk(rng, 1.0)).collect();
    if coeffs.iter().all(|z| z.norm() < 1e-3) {
        coeffs[0] = ONE;
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

/// Out-of-family instance: an in-family pair with one coefficient of index
/// >= 2 of `u` or `phi` moved by 0.02..0.1.
fn perturbed_pair(rng: &mut ChaCha8Rng, trunc: usize) -> Result<(PowerSeries, PowerSeries)> {
    loop {
        let p = random_symmetric_params(rng, 0.8);
        let mut u = p.u(trunc)?;
        let mut phi = p.phi(trunc)?;
        let k = rng.random_range(2..6).min(trunc - 1);
        let delta =
            Complex64::from_polar(rng.random_range(0.02..0.1), rng.random_range(0.0..2.0 * PI));
        let bump = PowerSeries::monomial(k, delta, trunc);
        if rng.random::<bool>() {
            u = u.add(&bump)?;
        } else {
            phi = phi.add(&bump)?;
        }
        if phi.boundary_sup_norm(1024) < 0.95 {
            return Ok((u, phi));
        }
    }
}

/// The linear fractional map of the normality example.
pub fn normality_example_map() -> MobiusMap {
    MobiusMap::new(
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(1.0, -1.0),
        Complex64::new(0.0, 8.0),
    )
    .expect("nondegenerate")
}

/// `(u, phi)` specs of the normality example: `u = K^(1)_{sigma(0)}`.
pub fn normality_example_specs() -> (FunctionSpec, FunctionSpec) {
    let m = normality_example_map();
    let cond = check_normality_condition(&m).expect("d != 0");
    (
        FunctionSpec::KernelDeriv {
            w: cond.weight_point,
        },
        FunctionSpec::from_mobius(&m),
    )
}

// ---- criteria ----

fn reproducing(_cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = 256;
    let polys: Vec<Vec<Complex64>> = (0..50).map(|_| random_poly(rng, 32)).collect();
    let points: Vec<Complex64> = (0..20).map(|_| in_disk(rng, 0.8)).collect();
    let (mut value_err, mut deriv_err) = (0.0f64, 0.0f64);
    for coeffs in &polys {
        let f = PowerSeries::new(coeffs.clone())?.resized(n);
        let deriv: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a * k as f64)
            .collect();
        for &w in &points {
            let kw = kernel_vector(w, KernelOrder::Value, n)?;
            let k1 = kernel_vector(w, KernelOrder::Derivative, n)?;
            value_err = value_err.max((inner_product(&f, &kw.coeffs)? - horner(coeffs, w)).norm());
            deriv_err = deriv_err.max((inner_product(&f, &k1.coeffs)? - horner(&deriv, w)).norm());
        }
    }
    out.metric("trunc", n as f64);
    out.metric("max_value_error", value_err);
    out.metric("max_derivative_error", deriv_err);
    out.require(
        value_err <= 1e-10,
        format!("|<f,K_w> - f(w)| = {value_err:.3e} > 1e-10"),
    );
    out.require(
        deriv_err <= 1e-10,
        format!("|<f,K1_w> - f'(w)| = {deriv_err:.3e} > 1e-10"),
    );
    Ok(out)
}

fn conjugation_axioms(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    let conjugations = [
        Conjugation::standard(),
        Conjugation::new(Complex64::new(0.0, 1.0), ONE)?,
        Conjugation::new(ONE, Complex64::new(-1.0, 0.0))?,
        Conjugation::new(
            Complex64::from_polar(1.0, 0.7),
            Complex64::from_polar(1.0, -1.9),
        )?,
        Conjugation::new(
            Complex64::from_polar(1.0, PI / 5.0),
            Complex64::new(0.0, 1.0),
        )?,
    ];
    let series: Vec<PowerSeries> = (0..100)
        .map(|_| {
            let raw = PowerSeries::new((0..n).map(|_| in_disk(rng, 1.0)).collect())?;
            let norm = raw.h2_norm_sq().sqrt();
            Ok(raw.scale(Complex64::new(1.0 / norm, 0.0)))
        })
        .collect::<Result<_>>()?;
    let (mut antiunitary, mut involution) = (0.0f64, 0.0f64);
    for cj in &conjugations {
        for (k, f) in series.iter().enumerate() {
            let g = &series[(k + 1) % series.len()];
            let cf = apply_conjugation(cj, f);
            let cg = apply_conjugation(cj, g);
            antiunitary = antiunitary.max((inner_product(&cf, &cg)? - inner_product(g, f)?).norm());
            let back = apply_conjugation(cj, &cf);
            let diff = back
                .sub(f)?
                .coeffs()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            involution = involution.max(diff);
        }
    }
    out.metric("max_antiunitary_error", antiunitary);
    out.metric("max_involution_error", involution);
    out.require(
        antiunitary <= 1e-13,
        format!("<Cf,Cg> - <g,f> = {antiunitary:.3e} > 1e-13"),
    );
    out.require(
        involution <= 1e-13,
        format!("C^2 f - f = {involution:.3e} > 1e-13"),
    );
    Ok(out)
}

fn kernel_identity(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u_coeffs = random_poly(rng, 8);
        let phi = random_mobius(rng, 0.8);
        let w = in_disk(rng, 0.8);
        let u = PowerSeries::new(u_coeffs.clone())?.resized(n);
        let op = build_operator(&u, &phi.to_series(n)?, 1, n)?;
        let lhs = adjoint(&op).apply(&kernel_vector(w, KernelOrder::Value, n)?.coeffs)?;
        let rhs = kernel_vector(phi.eval(w), KernelOrder::Derivative, n)?
            .coeffs
            .scale(horner(&u_coeffs, w).conj());
        worst = worst.max(lhs.sub(&rhs)?.h2_norm_sq().sqrt());
    }
    out.metric("max_vector_residual", worst);
    out.require(
        worst <= 1e-8,
        format!("kernel identity residual {worst:.3e} > 1e-8"),
    );
    Ok(out)
}

fn symmetry_forward(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    let mut worst = 0.0f64;
    let mut claimed = 0;
    for _ in 0..50 {
        let p = random_symmetric_params(rng, 1.0);
        let (u, phi) = (p.u(n)?, p.phi(n)?);
        let cj = Conjugation::new(on_circle(rng), p.alpha)?;
        let op = build_operator(&u, &phi, 1, n)?;
        worst = worst.max(check_complex_symmetric(&op, &cj, cfg.tol_entrywise).residual);
        let report = classify_symmetry(&u, &phi, &cj, n, cfg.tol_entrywise)?;
        if report.symmetric_flag() == Some(true) {
            claimed += 1;
        }
        out.count(&report);
    }
    out.metric("max_residual", worst);
    out.metric("classified_symmetric", claimed as f64);
    out.require(worst <= 1e-9, format!("max residual {worst:.3e} > 1e-9"));
    out.require(
        claimed == 50,
        format!("classifier accepted only {claimed}/50"),
    );
    Ok(out)
}

fn symmetry_converse(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    let mut least = f64::INFINITY;
    let mut rejected = 0;
    for _ in 0..50 {
        let (u, phi) = perturbed_pair(rng, n)?;
        let alpha = extract_alpha_hint(&u, &phi);
        let cj = Conjugation::new(ONE, alpha)?;
        let report = classify_symmetry(&u, &phi, &cj, n, cfg.tol_entrywise)?;
        out.count(&report);
        if report.symmetric_flag() == Some(false) {
            rejected += 1;
        }
        least = least.min(report.residuals["complex_symmetric"]);
    }
    out.metric("min_residual", least);
    out.metric("classified_not_symmetric", rejected as f64);
    out.require(least >= 1e-3, format!("min residual {least:.3e} < 1e-3"));
    out.require(
        rejected == 50,
        format!("classifier rejected only {rejected}/50"),
    );
    Ok(out)
}

/// The perturbation leaves `phi(0)`, `phi'(0)` and `phi''(0)` or `u` intact
/// in most cases; `alpha` is recovered from `phi''(0) = 2 alpha b c` when
/// possible so the conjugation tested is the one the unperturbed pair was
/// symmetric for.
fn extract_alpha_hint(u: &PowerSeries, phi: &PowerSeries) -> Complex64 {
    let (a, b, c) = (u.coeff(1), phi.coeff(0), phi.coeff(1));
    if a.norm() > 1e-12 && b.norm() > 1e-12 {
        // u''(0)/2 = 2 a alpha b
        let alpha = u.coeff(2) / (2.0 * a * b);
        if (alpha.norm() - 1.0).abs() < 1e-9 {
            return alpha / alpha.norm();
        }
    }
    if b.norm() > 1e-12 && c.norm() > 1e-12 {
        let alpha = phi.coeff(2) / (c * b);
        if (alpha.norm() - 1.0).abs() < 1e-9 {
            return alpha / alpha.norm();
        }
    }
    ONE
}

fn adjoint_lemma(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let mut maps: Vec<MobiusMap> = (0..20).map(|_| random_mobius(rng, 0.8)).collect();
    maps.push(normality_example_map());
    let mut worst = 0.0f64;
    for m in &maps {
        worst = worst.max(check_adjoint_lemma(m, cfg.trunc, 1e-10)?.residual);
    }
    let example = check_adjoint_lemma(&normality_example_map(), cfg.trunc, 1e-10)?;
    out.metric("max_residual", worst);
    out.metric("example_residual", example.residual);
    out.require(worst <= 1e-10, format!("max residual {worst:.3e} > 1e-10"));
    Ok(out)
}

fn normal_example(cfg: &SuiteConfig) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    let (u_spec, phi_spec) = normality_example_specs();
    let sup = phi_spec.sup_norm(n)?.value;
    let op = build_operator(&u_spec.series(n)?, &phi_spec.series(n)?, 1, n)?;
    let normal = check_normal(&op, cfg.tol_product);
    let self_adj = check_self_adjoint(&op, cfg.tol_entrywise);
    out.metric("normal_residual", normal.residual);
    out.metric("self_adjoint_residual", self_adj.residual);
    out.metric("phi_sup_norm", sup);
    out.require(
        normal.flag,
        format!(
            "commutator residual {:.3e} > {:.0e}",
            normal.residual, cfg.tol_product
        ),
    );
    out.require(
        self_adj.residual >= 0.01,
        format!(
            "self-adjoint residual {:.3e} < 0.01 (the matrix is Hermitian)",
            self_adj.residual
        ),
    );
    // only the product-based half can be a truncation artifact
    out.tail_limited = !normal.flag
        && self_adj.residual >= 0.01
        && (n as f64) * sup.powi(n as i32) > cfg.tol_product;
    Ok(out)
}

fn self_adjoint_both_ways(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    let shift = Complex64::new(0.0, 0.1);
    let (mut worst_real, mut least_shifted) = (0.0f64, f64::INFINITY);
    let mut instances = 0;
    while instances < 20 {
        let p = random_real_params(rng);
        let shifted = [
            SymmetricFormParams {
                a: p.a + shift,
                ..p
            },
            SymmetricFormParams {
                b: p.b + shift,
                ..p
            },
            SymmetricFormParams {
                c: p.c + shift,
                ..p
            },
        ];
        if shifted.iter().any(|q| {
            q.phi_mobius()
                .and_then(|m| m.sup_norm())
                .map_or(true, |s| s >= 0.95)
        }) {
            continue;
        }
        instances += 1;
        for (k, q) in std::iter::once(&p).chain(shifted.iter()).enumerate() {
            let (u, phi) = (q.u(n)?, q.phi(n)?);
            let op = build_operator(&u, &phi, 1, n)?;
            let residual = check_self_adjoint(&op, cfg.tol_entrywise).residual;
            let report = classify_self_adjoint(&u, &phi, n, cfg.tol_entrywise)?;
            out.count(&report);
            if k == 0 {
                worst_real = worst_real.max(residual);
            } else {
                least_shifted = least_shifted.min(residual);
            }
        }
    }
    out.metric("max_real_residual", worst_real);
    out.metric("min_shifted_residual", least_shifted);
    out.require(
        worst_real <= 1e-9,
        format!("real-parameter residual {worst_real:.3e} > 1e-9"),
    );
    out.require(
        least_shifted >= 1e-3,
        format!("shifted residual {least_shifted:.3e} < 1e-3"),
    );
    out.require(
        out.inconsistencies == 0,
        format!("{} classifier inconsistencies", out.inconsistencies),
    );
    Ok(out)
}

fn spectral_audit(cfg: &SuiteConfig) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    for c in [0.3, 0.5, 0.7, 0.9, 0.95] {
        let s = diagonal_spectrum(1.0, c, n)?;
        out.metric(&format!("c={c}/oracle_norm"), s.norm);
        out.metric(&format!("c={c}/paper_norm"), s.paper_norm);
        out.metric(&format!("c={c}/k_star"), s.k_star as f64);
        out.metric(&format!("c={c}/paper_k"), s.paper_k as f64);

        out.require(
            s.off_diagonal_max <= 1e-14,
            format!("c={c}: off-diagonal {:.3e}", s.off_diagonal_max),
        );

        let entry_err = (0..n)
            .map(|k| {
                let want = k as f64 * c.powi(k as i32 - 1);
                (s.entries[k] - want).abs() / want.abs().max(1.0)
            })
            .fold(0.0, f64::max);
        out.require(
            entry_err <= 1e-13,
            format!("c={c}: entry error {entry_err:.3e}"),
        );

        // brute-force argmax against floor(1/(1-c)), ties at integer 1/(1-c)
        let x = 1.0 / (1.0 - c);
        let integer = (x - x.round()).abs() <= 1e-9 * x;
        let k = closed_form_index(c);
        let argmax_ok = if integer {
            s.k_star == k - 1 || s.k_star == k
        } else {
            s.k_star == x.floor() as usize
        };
        out.require(
            argmax_ok,
            format!("c={c}: k_star {} vs floor(1/(1-c)) {}", s.k_star, k),
        );

        let op = build_operator(
            &PowerSeries::monomial(1, ONE, n),
            &PowerSeries::monomial(1, Complex64::new(c, 0.0), n),
            1,
            n,
        )?;
        let est = operator_norm_estimate(&op, 200_000, 1e-15, cfg.seed);
        out.metric(&format!("c={c}/power_iteration_norm"), est.value);
        out.require(
            est.converged,
            format!("c={c}: power iteration did not converge"),
        );
        out.require(
            (est.value - s.norm).abs() <= 1e-10,
            format!(
                "c={c}: power iteration {:.12} vs brute force {:.12}",
                est.value, s.norm
            ),
        );

        if s.maximizers().contains(&s.paper_k) {
            let gap = (s.norm * c - s.paper_norm).abs();
            out.metric(&format!("c={c}/oracle_times_c_minus_closed_form"), gap);
            out.require(
                gap <= 1e-12 * s.paper_norm,
                format!("c={c}: oracle*c - closed form = {gap:.3e}"),
            );
        }
    }
    Ok(out)
}

fn normal_convergence(cfg: &SuiteConfig) -> Result<Outcome> {
    let mut out = Outcome::new();
    let (u_spec, phi_spec) = normality_example_specs();
    let study = truncation_convergence_study(
        &u_spec,
        &phi_spec,
        StudyCheck::Normal,
        &[16, 32, 64, 128],
        cfg.tol_product,
    )?;
    for (n, r) in &study.rows {
        out.metric(&format!("N={n}"), *r);
    }
    out.require(
        study.non_increasing,
        "residuals not non-increasing within 10%",
    );
    out.require(study.final_below_tol, "final residual above tolerance");
    Ok(out)
}

fn agreement(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = cfg.trunc;
    let mut disagreements = Vec::new();
    for k in 0..200 {
        let (u, phi, alpha) = match k % 4 {
            0 => {
                let p = random_symmetric_params(rng, 0.95);
                (p.u(n)?, p.phi(n)?, p.alpha)
            }
            1 => {
                let p = random_real_params(rng);
                (p.u(n)?, p.phi(n)?, ONE)
            }
            _ => {
                let (u, phi) = perturbed_pair(rng, n)?;
                let alpha = extract_alpha_hint(&u, &phi);
                (u, phi, alpha)
            }
        };
        let cj = Conjugation::new(on_circle(rng), alpha)?;
        let sym = classify_symmetry(&u, &phi, &cj, n, cfg.tol_entrywise)?;
        let sa = classify_self_adjoint(&u, &phi, n, cfg.tol_entrywise)?;
        for r in [&sym, &sa] {
            out.count(r);
            if !r.is_consistent() {
                disagreements.push(k);
            }
        }
    }
    out.metric("instances", 200.0);
    out.metric("disagreements", disagreements.len() as f64);
    out.require(
        disagreements.is_empty(),
        format!("analytic and oracle verdicts disagree on instances {disagreements:?}"),
    );
    Ok(out)
}
