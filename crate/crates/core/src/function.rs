//! Input descriptions of weights and symbols that can be re-expanded at any
//! truncation and evaluated in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{kernel_vector, KernelOrder};
use crate::report::{complex_list, complex_pair};
use crate::series::{
    symmetric_form_phi, symmetric_form_phi_mobius, symmetric_form_u, MobiusMap, PowerSeries,
    DEFAULT_BOUNDARY_SAMPLES,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Finite list of Maclaurin coefficients.
    Poly {
        #[serde(with = "complex_list")]
        coeffs: Vec<Complex64>,
    },
    /// `(a z + b) / (c z + d)`.
    Mobius {
        #[serde(with = "complex_pair")]
        a: Complex64,
        #[serde(with = "complex_pair")]
        b: Complex64,
        #[serde(with = "complex_pair")]
        c: Complex64,
        #[serde(with = "complex_pair")]
        d: Complex64,
    },
    /// `a z / (1 - alpha b z)^2`.
    SymmetricFormU {
        #[serde(with = "complex_pair")]
        a: Complex64,
        #[serde(with = "complex_pair")]
        b: Complex64,
        #[serde(with = "complex_pair")]
        alpha: Complex64,
    },
    /// `b + c z / (1 - alpha b z)`.
    SymmetricFormPhi {
        #[serde(with = "complex_pair")]
        b: Complex64,
        #[serde(with = "complex_pair")]
        c: Complex64,
        #[serde(with = "complex_pair")]
        alpha: Complex64,
    },
    /// `K^(1)_w(z) = z / (1 - conj(w) z)^2`.
    KernelDeriv {
        #[serde(with = "complex_pair")]
        w: Complex64,
    },
}

/// Sup norm over the closed disk, exact for linear fractional maps and a
/// boundary-sampled lower bound otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    pub exact: bool,
}

impl FunctionSpec {
    pub fn poly(coeffs: Vec<Complex64>) -> Self {
        FunctionSpec::Poly { coeffs }
    }

    pub fn from_mobius(m: &MobiusMap) -> Self {
        FunctionSpec::Mobius {
            a: m.a,
            b: m.b,
            c: m.c,
            d: m.d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Poly { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidParameter(
                        "poly needs at least one coefficient".into(),
                    ));
                }
                if coeffs.iter().any(|z| !z.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "poly coefficients must be finite".into(),
                    ));
                }
            }
            FunctionSpec::Mobius { a, b, c, d } => {
                MobiusMap::new(*a, *b, *c, *d)?;
            }
            FunctionSpec::SymmetricFormU { b, alpha, .. }
            | FunctionSpec::SymmetricFormPhi { b, alpha, .. } => {
                if b.norm() >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "|b| must be < 1, got {}",
                        b.norm()
                    )));
                }
                if (alpha.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "|alpha| must be 1, got {}",
                        alpha.norm()
                    )));
                }
            }
            FunctionSpec::KernelDeriv { w } => {
                if w.norm() >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "|w| must be < 1, got {}",
                        w.norm()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The map as a linear fractional transformation, when it is one.
    pub fn as_mobius(&self) -> Option<MobiusMap> {
        match self {
            FunctionSpec::Mobius { a, b, c, d } => MobiusMap::new(*a, *b, *c, *d).ok(),
            FunctionSpec::SymmetricFormPhi { b, c, alpha } => {
                symmetric_form_phi_mobius(*b, *c, *alpha).ok()
            }
            FunctionSpec::Poly { coeffs }
                if coeffs
                    .iter()
                    .skip(2)
                    .all(|z| *z == Complex64::new(0.0, 0.0)) =>
            {
                let a = coeffs.get(1).copied().unwrap_or_default();
                MobiusMap::new(a, coeffs[0], Complex64::new(0.0, 0.0), ONE).ok()
            }
            _ => None,
        }
    }

    pub fn series(&self, trunc: usize) -> Result<PowerSeries> {
        self.validate()?;
        match self {
            FunctionSpec::Poly { coeffs } => {
                PowerSeries::new(coeffs.clone()).map(|s| s.resized(trunc))
            }
            FunctionSpec::Mobius { a, b, c, d } => MobiusMap::new(*a, *b, *c, *d)?.to_series(trunc),
            FunctionSpec::SymmetricFormU { a, b, alpha } => symmetric_form_u(*a, *b, *alpha, trunc),
            FunctionSpec::SymmetricFormPhi { b, c, alpha } => {
                symmetric_form_phi(*b, *c, *alpha, trunc)
            }
            FunctionSpec::KernelDeriv { w } => {
                Ok(kernel_vector(*w, KernelOrder::Derivative, trunc)?.coeffs)
            }
        }
    }

    /// Closed-form value at `z` (no truncation).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            FunctionSpec::Poly { coeffs } => coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c),
            FunctionSpec::Mobius { a, b, c, d } => (a * z + b) / (c * z + d),
            FunctionSpec::SymmetricFormU { a, b, alpha } => {
                let den = ONE - alpha * b * z;
                a * z / (den * den)
            }
            FunctionSpec::SymmetricFormPhi { b, c, alpha } => b + c * z / (ONE - alpha * b * z),
            FunctionSpec::KernelDeriv { w } => {
                let den = ONE - w.conj() * z;
                z / (den * den)
            }
        }
    }

    /// Sup norm on the closed disk: image-circle formula for linear
    /// fractional maps, `samples` boundary points of the truncated series
    /// otherwise.
    pub fn sup_norm(&self, trunc: usize) -> Result<SupNorm> {
        self.validate()?;
        if let Some(m) = self.as_mobius() {
            return Ok(SupNorm {
                value: m.sup_norm()?,
                exact: true,
            });
        }
        Ok(SupNorm {
            value: self
                .series(trunc)?
                .boundary_sup_norm(DEFAULT_BOUNDARY_SAMPLES),
            exact: false,
        })
    }
}
