//! Truncated complex power series and the rational families that feed the
//! operator builders.
//!
//! Every series in one computation shares a single truncation `N`; index `n`
//! of the coefficient vector is the coefficient of `z^n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of retained Maclaurin coefficients.
pub const DEFAULT_TRUNC: usize = 128;

/// Default number of boundary samples for sup-norm estimates of general series.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self { coeffs })
    }

    /// Real coefficients, mostly for tests and examples.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(trunc: usize) -> Self {
        Self {
            coeffs: vec![ZERO; trunc.max(1)],
        }
    }

    /// The constant series `1`.
    pub fn unit(trunc: usize) -> Self {
        Self::monomial(0, ONE, trunc)
    }

    /// `scale * z^k`, or the zero series when `k >= trunc`.
    pub fn monomial(k: usize, scale: Complex64, trunc: usize) -> Self {
        let mut s = Self::zeros(trunc);
        if k < s.coeffs.len() {
            s.coeffs[k] = scale;
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^n`; zero past the truncation.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    /// Drop or zero-pad to exactly `trunc` coefficients.
    pub fn resized(&self, trunc: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(trunc.max(1), ZERO);
        Self { coeffs }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= tol)
    }

    pub fn h2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.trunc() != other.trunc() {
            return Err(Error::TruncationMismatch {
                left: self.trunc(),
                right: other.trunc(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { coeffs })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Cauchy product truncated to the common length.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.trunc();
        let mut out = vec![ZERO; n];
        // Leading zeros are common (z * ..., u with u(0) = 0); skip them.
        let lead = other.coeffs.iter().position(|c| *c != ZERO).unwrap_or(n);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for j in lead..n - i {
                out[i + j] += a * other.coeffs[j];
            }
        }
        Self { coeffs: out }
    }

    /// `f'`, keeping the truncation (last coefficient becomes zero).
    pub fn derivative(&self) -> Self {
        let n = self.trunc();
        let mut coeffs = vec![ZERO; n];
        for (k, (slot, a)) in coeffs.iter_mut().zip(&self.coeffs[1..]).enumerate() {
            *slot = a * (k + 1) as f64;
        }
        Self { coeffs }
    }

    /// `f^k` by repeated squaring of truncated products; `f^0 = 1`.
    pub fn pow(&self, mut k: usize) -> Self {
        let mut acc = Self::unit(self.trunc());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// Max of `|f|` over `samples` equally spaced points of the unit circle.
    /// This is a lower bound on the sup norm over the closed disk; the
    /// sampling gap is of order `|f'|_inf * pi / samples`.
    pub fn boundary_sup_norm(&self, samples: usize) -> f64 {
        let samples = samples.max(1);
        (0..samples)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / samples as f64;
                self.eval(Complex64::from_polar(1.0, theta)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Linear fractional map `(a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    #[serde(with = "crate::report::complex_pair")]
    pub a: Complex64,
    #[serde(with = "crate::report::complex_pair")]
    pub b: Complex64,
    #[serde(with = "crate::report::complex_pair")]
    pub c: Complex64,
    #[serde(with = "crate::report::complex_pair")]
    pub d: Complex64,
}

/// A circle `{ z : |z - center| = radius }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskCircle {
    #[serde(with = "crate::report::complex_pair")]
    pub center: Complex64,
    pub radius: f64,
}

impl DiskCircle {
    /// Largest modulus on the circle (and on the disk it bounds).
    pub fn max_modulus(&self) -> f64 {
        self.center.norm() + self.radius
    }
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = (a.norm() * d.norm())
            .max(b.norm() * c.norm())
            .max(f64::MIN_POSITIVE);
        if det.norm() <= 1e-14 * scale || det.norm() == 0.0 {
            return Err(Error::DegenerateMap);
        }
        Ok(Self { a, b, c, d })
    }

    /// `scale * z`.
    pub fn dilation(scale: Complex64) -> Self {
        Self {
            a: scale,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Whether the pole `-d/c` lies strictly outside the closed unit disk.
    pub fn is_expandable(&self) -> bool {
        self.d.norm() > self.c.norm()
    }

    /// Maclaurin coefficients from the geometric expansion of `1/(cz + d)`.
    pub fn to_series(&self, trunc: usize) -> Result<PowerSeries> {
        if !self.is_expandable() {
            return Err(Error::NotExpandable(format!(
                "pole -d/c has modulus {:.6} <= 1",
                self.d.norm() / self.c.norm()
            )));
        }
        let trunc = trunc.max(1);
        let ratio = -self.c / self.d;
        let mut geo = Vec::with_capacity(trunc);
        let mut term = ONE / self.d;
        for _ in 0..trunc {
            geo.push(term);
            term *= ratio;
        }
        let mut coeffs = vec![ZERO; trunc];
        coeffs[0] = self.b * geo[0];
        for n in 1..trunc {
            coeffs[n] = self.b * geo[n] + self.a * geo[n - 1];
        }
        PowerSeries::new(coeffs)
    }

    /// Image of the unit circle.
    pub fn image_circle(&self) -> Result<DiskCircle> {
        let denom = self.d.norm_sqr() - self.c.norm_sqr();
        let scale = self.d.norm_sqr().max(self.c.norm_sqr());
        if denom.abs() <= 1e-14 * scale {
            return Err(Error::UnboundedImage);
        }
        let center = (self.b * self.d.conj() - self.a * self.c.conj()) / denom;
        let radius = self.det().norm() / denom.abs();
        Ok(DiskCircle { center, radius })
    }

    /// `sup |phi|` over the closed disk. Requires the pole outside the
    /// closed disk; otherwise the map is unbounded there.
    pub fn sup_norm(&self) -> Result<f64> {
        if !self.is_expandable() {
            return Err(Error::NotExpandable(
                "pole on or inside the closed unit disk".into(),
            ));
        }
        Ok(self.image_circle()?.max_modulus())
    }
}

fn check_inside(b: Complex64) -> Result<()> {
    if b.norm() >= 1.0 {
        return Err(Error::OutsideDisk(format!("b = {b}")));
    }
    Ok(())
}

/// Coefficients of `a z / (1 - alpha b z)^2`, i.e. `a n (alpha b)^(n-1)`.
pub fn symmetric_form_u(
    a: Complex64,
    b: Complex64,
    alpha: Complex64,
    trunc: usize,
) -> Result<PowerSeries> {
    check_inside(b)?;
    let q = alpha * b;
    let mut coeffs = vec![ZERO; trunc.max(1)];
    let mut qp = ONE;
    for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
        *slot = a * n as f64 * qp;
        qp *= q;
    }
    PowerSeries::new(coeffs)
}

/// Coefficients of `b + c z / (1 - alpha b z)`: `[b, c, c (alpha b), c (alpha b)^2, ...]`.
pub fn symmetric_form_phi(
    b: Complex64,
    c: Complex64,
    alpha: Complex64,
    trunc: usize,
) -> Result<PowerSeries> {
    check_inside(b)?;
    let q = alpha * b;
    let mut coeffs = vec![ZERO; trunc.max(1)];
    coeffs[0] = b;
    let mut term = c;
    for slot in coeffs.iter_mut().skip(1) {
        *slot = term;
        term *= q;
    }
    PowerSeries::new(coeffs)
}

/// The same symbol as [`symmetric_form_phi`] written as one fraction:
/// `((c - alpha b^2) z + b) / (-alpha b z + 1)`.
pub fn symmetric_form_phi_mobius(
    b: Complex64,
    c: Complex64,
    alpha: Complex64,
) -> Result<MobiusMap> {
    check_inside(b)?;
    MobiusMap::new(c - alpha * b * b, b, -alpha * b, ONE)
}
