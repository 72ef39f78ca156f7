use super::{herm_eig, CMatrix};
use crate::error::{Error, Result};
use crate::tol;

/// Scalar functions applied through the spectral theorem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatFn {
    /// `h^q` for positive `h`; negative `q` requires `h` invertible.
    Power(f64),
    /// Principal logarithm of a positive definite matrix.
    Log,
    /// Exponential of a Hermitian matrix.
    Exp,
}

/// Functional calculus `V f(Λ) V*` on a Hermitian matrix.
pub fn mat_fn(h: &CMatrix, f: MatFn) -> Result<CMatrix> {
    let eig = herm_eig(h)?;
    let lo = eig.values[0];
    let hi = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rank_floor = tol::RANK_TOL * hi;
    match f {
        MatFn::Exp => Ok(eig.map(f64::exp)),
        MatFn::Log => {
            if lo <= rank_floor || hi == 0.0 {
                return Err(Error::Singular("logarithm of a matrix without positive spectrum".into()));
            }
            Ok(eig.map(f64::ln))
        }
        MatFn::Power(q) => {
            if lo < -tol::TOL_EIG * h.frob_norm() {
                return Err(Error::NotPositive { min_eigenvalue: lo });
            }
            if q == 0.0 {
                return Ok(CMatrix::identity(h.dim()));
            }
            if q < 0.0 && (lo <= rank_floor || hi == 0.0) {
                return Err(Error::Singular("negative power of a singular matrix".into()));
            }
            Ok(eig.map(|l| if l <= 0.0 { 0.0 } else { l.powf(q) }))
        }
    }
}
