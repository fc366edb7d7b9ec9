//! The line `X_λ = (1 − λ)ϱ* + λϱ` through the maximally mixed state and
//! the hyperplanes perpendicular to it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigen, hs_inner, BipartiteOperator, Dims, SchmidtSpectrum};

/// Default tolerance for the `Zero` side of a hyperplane.
pub const DEFAULT_SIDE_TOL: f64 = 1e-9;

const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;
const DISTINCT_TOL: f64 = 1e-10;

/// How the family's state was built. Pure Schmidt-form families unlock the
/// closed forms and constructive certificates.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyOrigin {
    PureSchmidt(SchmidtSpectrum),
    General,
}

#[derive(Debug, Clone)]
pub struct OneParamFamily {
    rho: BipartiteOperator,
    rho_star: BipartiteOperator,
    hs_rho_sq: f64,
    origin: FamilyOrigin,
}

impl OneParamFamily {
    /// Family through an arbitrary state `ϱ ≠ ϱ*`.
    pub fn new(rho: BipartiteOperator) -> Result<Self> {
        Self::with_origin(rho, FamilyOrigin::General)
    }

    /// Family through the pure state `Σ p_i |ii⟩`.
    pub fn pure(spectrum: &SchmidtSpectrum) -> Result<Self> {
        Self::with_origin(spectrum.density(), FamilyOrigin::PureSchmidt(spectrum.clone()))
    }

    fn with_origin(rho: BipartiteOperator, origin: FamilyOrigin) -> Result<Self> {
        rho.require_hermitian()?;
        rho.require_unit_trace(TRACE_TOL)?;
        let min_eig = hermitian_eigen(&rho)?.min_value();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidFamily(format!("ϱ is not positive semidefinite (min eigenvalue {min_eig:e})")));
        }
        let dims = rho.dims();
        let rho_star = BipartiteOperator::maximally_mixed(dims);
        if rho.max_abs_diff(&rho_star) <= DISTINCT_TOL {
            return Err(Error::InvalidFamily("ϱ coincides with the maximally mixed state".into()));
        }
        let hs_rho_sq = hs_inner(&rho, &rho)?;
        if hs_rho_sq - 1.0 / dims.total() as f64 <= 0.0 {
            return Err(Error::InvalidFamily("‖ϱ‖² must exceed 1/mn".into()));
        }
        Ok(Self { rho, rho_star, hs_rho_sq, origin })
    }

    pub fn dims(&self) -> Dims {
        self.rho.dims()
    }

    pub fn rho(&self) -> &BipartiteOperator {
        &self.rho
    }

    pub fn rho_star(&self) -> &BipartiteOperator {
        &self.rho_star
    }

    pub fn origin(&self) -> &FamilyOrigin {
        &self.origin
    }

    pub fn spectrum(&self) -> Option<&SchmidtSpectrum> {
        match &self.origin {
            FamilyOrigin::PureSchmidt(s) => Some(s),
            FamilyOrigin::General => None,
        }
    }

    /// `⟨ϱ|ϱ⟩`.
    pub fn hs_rho_sq(&self) -> f64 {
        self.hs_rho_sq
    }

    /// `‖ϱ − ϱ*‖² = ⟨ϱ|ϱ⟩ − 1/mn`.
    pub fn excess(&self) -> f64 {
        self.hs_rho_sq - self.inv_mn()
    }

    fn inv_mn(&self) -> f64 {
        1.0 / self.dims().total() as f64
    }

    /// `X_λ`.
    pub fn state_at(&self, lambda: f64) -> BipartiteOperator {
        &(&self.rho_star * (1.0 - lambda)) + &(&self.rho * lambda)
    }

    /// `⟨X_ν|X_λ⟩ = (‖ϱ‖² − 1/mn)·ν·λ + 1/mn`.
    pub fn pairing(&self, nu: f64, lambda: f64) -> f64 {
        self.excess() * nu * lambda + self.inv_mn()
    }

    /// The unique `μ` with `⟨X_ν|X_μ⟩ = 0`.
    pub fn orthogonal_partner(&self, nu: f64) -> Result<f64> {
        if nu == 0.0 || !nu.is_finite() {
            return Err(Error::OutOfRange(format!("orthogonal partner undefined for ν = {nu}")));
        }
        Ok(-1.0 / (self.dims().total() as f64 * self.excess() * nu))
    }

    /// `⟨X − X_ν|ϱ − ϱ*⟩`.
    pub fn side_value(&self, nu: f64, x: &BipartiteOperator) -> Result<f64> {
        if x.dims() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims().to_string(), actual: x.dims().to_string() });
        }
        // Both X and X_ν have unit trace, so pairing with ϱ* cancels.
        Ok(hs_inner(x, &self.rho)? - self.pairing(nu, 1.0))
    }

    pub fn hyperplane_side(&self, nu: f64, x: &BipartiteOperator, tol: f64) -> Result<HyperplaneSide> {
        x.require_unit_trace(1e-10)?;
        let value = self.side_value(nu, x)?;
        Ok(HyperplaneSide::classify(value, tol))
    }

    /// `⟨X − X_ν|ϱ − ϱ*⟩`, evaluated through `X_λ − ϱ* = λ(ϱ − ϱ*)`.
    pub fn perpendicularity_residual(&self, nu: f64, x: &BipartiteOperator, lambda: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Err(Error::OutOfRange("λ must be nonzero".into()));
        }
        let diff = x - &self.state_at(nu);
        let direction = &self.state_at(lambda) - &self.rho_star;
        Ok(hs_inner(&diff, &direction)? / lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HyperplaneSide {
    Minus,
    Zero,
    Plus,
}

impl HyperplaneSide {
    pub fn classify(value: f64, tol: f64) -> Self {
        if value.abs() <= tol {
            Self::Zero
        } else if value > 0.0 {
            Self::Plus
        } else {
            Self::Minus
        }
    }
}
