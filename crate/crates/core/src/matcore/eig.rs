use super::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol;

/// Spectral decomposition `h = V diag(values) V*` of a Hermitian matrix,
/// eigenvalues ascending, eigenvectors in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigDecomp {
    /// `V diag(f(λ)) V*`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        CMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation. Eigenvalues are
/// returned ascending.
pub fn herm_eig(h: &CMatrix) -> Result<EigDecomp> {
    let n = h.dim();
    let scale = h.frob_norm();
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    if h.hermitian_defect() > tol::TOL_HERM * scale {
        return Err(Error::NotHermitian { defect: h.hermitian_defect() / scale.max(f64::MIN_POSITIVE) });
    }
    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);
    if scale == 0.0 {
        return Ok(EigDecomp { values: vec![0.0; n], vectors: v });
    }

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // negligible pivots are flushed instead of rotated
                if r <= 1e-18 * scale || r <= 0.5 * f64::EPSILON * (app * aqq).abs().sqrt() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on coordinates (p, q):
                //   col p of G: (c, -s·conj(phase)), col q of G: (s, c·conj(phase))
                let gpp = C64::new(c, 0.0);
                let gqp = -phase.conj() * s;
                let gpq = C64::new(s, 0.0);
                let gqq = phase.conj() * c;
                // A <- A G
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * gpp + aiq * gqp;
                    a[(i, q)] = aip * gpq + aiq * gqq;
                }
                // A <- G* A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = gpp.conj() * apj + gqp.conj() * aqj;
                    a[(q, j)] = gpq.conj() * apj + gqq.conj() * aqj;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * gpp + viq * gqp;
                    v[(i, q)] = vip * gpq + viq * gqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &v.column(i));
    }
    Ok(EigDecomp { values, vectors })
}
