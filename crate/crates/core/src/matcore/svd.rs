use super::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tol;

/// `f = W diag(σ) V*` with `σ` descending. Columns of `left` for zero
/// singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub left: CMatrix,
    pub sigma: Vec<f64>,
    pub right: CMatrix,
}

/// `f = u |f|` with `u` the minimal partial isometry (vanishing on the kernel
/// of `|f|`).
#[derive(Clone, Debug)]
pub struct PolarDecomp {
    pub isometry_part: CMatrix,
    pub modulus: CMatrix,
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns of a working copy of `f` are rotated pairwise until mutually
/// orthogonal; the accumulated rotations form `V` and the column norms are
/// the singular values. Small singular values come out with high relative
/// accuracy, which the determinant depends on.
pub fn svd(f: &CMatrix) -> Svd {
    let n = f.dim();
    let mut u = f.clone();
    let mut v = CMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..n {
                    let a = u[(k, i)];
                    let b = u[(k, j)];
                    alpha += a.norm_sqr();
                    beta += b.norm_sqr();
                    gamma += a.conj() * b;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // column j is rephased by conj(phase) so that the pair has a real
                // inner product, then rotated as in the real case
                let pc = phase.conj();
                for k in 0..n {
                    let a = u[(k, i)];
                    let b = u[(k, j)] * pc;
                    u[(k, i)] = a * c - b * s;
                    u[(k, j)] = a * s + b * c;
                    let a = v[(k, i)];
                    let b = v[(k, j)] * pc;
                    v[(k, i)] = a * c - b * s;
                    v[(k, j)] = a * s + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| u.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut left = CMatrix::zeros(n);
    let mut right = CMatrix::zeros(n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        right.set_column(k, &v.column(j));
        if s > 0.0 {
            let col: Vec<C64> = u.column(j).iter().map(|z| z / s).collect();
            left.set_column(k, &col);
        }
    }
    Svd { left, sigma, right }
}

/// Singular values, descending.
pub fn singular_values(f: &CMatrix) -> Vec<f64> {
    svd(f).sigma
}

/// Polar decomposition with the singular-value cutoff `rank_tol·σ_max`.
pub fn polar(f: &CMatrix) -> PolarDecomp {
    let n = f.dim();
    let d = svd(f);
    let cutoff = tol::RANK_TOL * d.sigma.first().copied().unwrap_or(0.0);
    let mut isometry_part = CMatrix::zeros(n);
    let mut modulus = CMatrix::zeros(n);
    for k in 0..n {
        let s = d.sigma[k];
        for i in 0..n {
            for j in 0..n {
                let vv = d.right[(i, k)] * d.right[(j, k)].conj();
                modulus[(i, j)] += vv * s;
                if s > cutoff {
                    isometry_part[(i, j)] += d.left[(i, k)] * d.right[(j, k)].conj();
                }
            }
        }
    }
    PolarDecomp { isometry_part, modulus: modulus.hermitian_part() }
}

/// Gram-Schmidt on the columns of `p` in index order, keeping vectors whose
/// residual exceeds `floor`.
fn column_basis(p: &CMatrix, floor: f64) -> Vec<Vec<C64>> {
    let n = p.dim();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for j in 0..n {
        let mut r = p.column(j);
        for _ in 0..2 {
            for b in &basis {
                let c: C64 = b.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nr > floor {
            basis.push(r.iter().map(|z| z / nr).collect());
        }
    }
    basis
}

/// Extends a partial isometry to a unitary by pairing orthonormal bases of
/// its kernel and cokernel, both taken from the columns of the complementary
/// projections in index order.
pub fn unitary_extend(u: &CMatrix) -> Result<CMatrix> {
    let n = u.dim();
    let one = CMatrix::identity(n);
    let ustar_u = &u.adjoint() * u;
    let u_ustar = u * &u.adjoint();
    let tol_p = tol::TOL_EIG * (n as f64).sqrt().max(1.0) * 10.0;
    let p_defect = (&(&ustar_u * &ustar_u) - &ustar_u).frob_norm();
    let q_defect = (&(&u_ustar * &u_ustar) - &u_ustar).frob_norm();
    if p_defect > tol_p || q_defect > tol_p {
        return Err(Error::NotPartialIsometry { defect: p_defect.max(q_defect) });
    }
    let kernel = column_basis(&(&one - &ustar_u), 1e-6);
    let cokernel = column_basis(&(&one - &u_ustar), 1e-6);
    if kernel.len() != cokernel.len() {
        return Err(Error::NotPartialIsometry { defect: (kernel.len() as f64 - cokernel.len() as f64).abs() });
    }
    let mut w = u.clone();
    for (k, c) in kernel.iter().zip(&cokernel) {
        for i in 0..n {
            for j in 0..n {
                w[(i, j)] += c[i] * k[j].conj();
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::herm_eig;
    use proptest::prelude::*;

    fn from_raw(n: usize, raw: &[f64]) -> CMatrix {
        CMatrix::from_fn(n, |i, j| C64::new(raw[2 * (i * n + j)], raw[2 * (i * n + j) + 1]))
    }

    #[test]
    fn singular_value_examples() {
        let flip = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = singular_values(&flip);
        assert!(s.iter().all(|x| (x - 1.0).abs() < 1e-15));
        let nil = CMatrix::unit(2, 0, 1);
        assert_eq!(singular_values(&nil), vec![1.0, 0.0]);
        let d = CMatrix::from_real_diag(&[2.0, -3.0]);
        assert_eq!(singular_values(&d), vec![3.0, 2.0]);
    }

    #[test]
    fn polar_examples() {
        let pos = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let p = polar(&pos);
        assert!(p.isometry_part.dist(&CMatrix::identity(2)) < 1e-13);
        assert!(p.modulus.dist(&pos) < 1e-13);

        let flip = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let p = polar(&flip);
        assert!(p.isometry_part.dist(&flip) < 1e-14);
        assert!(p.modulus.dist(&CMatrix::identity(2)) < 1e-14);

        let p = polar(&CMatrix::zeros(2));
        assert_eq!(p.isometry_part, CMatrix::zeros(2));
        assert_eq!(p.modulus, CMatrix::zeros(2));
    }

    #[test]
    fn positive_semidefinite_gives_support_projection() {
        let f = CMatrix::from_real_diag(&[3.0, 0.0]);
        let p = polar(&f);
        assert!(p.isometry_part.dist(&CMatrix::unit(2, 0, 0)) < 1e-15);
    }

    #[test]
    fn unitary_extend_examples() {
        let flip = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(unitary_extend(&flip).unwrap().dist(&flip) < 1e-15);
        let e11 = CMatrix::unit(2, 0, 0);
        assert!(unitary_extend(&e11).unwrap().dist(&CMatrix::identity(2)) < 1e-15);
        assert!(unitary_extend(&CMatrix::zeros(1)).unwrap().dist(&CMatrix::identity(1)) < 1e-15);
        assert!(matches!(unitary_extend(&CMatrix::from_real_diag(&[2.0, 0.0])), Err(Error::NotPartialIsometry { .. })));
    }

    #[test]
    fn unitary_extend_rank_one_off_diagonal() {
        let e12 = CMatrix::unit(3, 0, 1);
        let w = unitary_extend(&e12).unwrap();
        assert!((&w.adjoint() * &w).dist(&CMatrix::identity(3)) < 1e-14);
        assert!((&w * &CMatrix::unit(3, 1, 1)).dist(&e12) < 1e-14);
    }

    proptest! {
        #[test]
        fn polar_round_trip(n in 1usize..9, raw in proptest::collection::vec(-2.0f64..2.0, 128)) {
            let f = from_raw(n, &raw);
            let p = polar(&f);
            let back = &p.isometry_part * &p.modulus;
            prop_assert!(back.dist(&f) <= tol::TOL_EIG * f.frob_norm() + 1e-300);
            let uu = &p.isometry_part.adjoint() * &p.isometry_part;
            prop_assert!((&uu * &uu).dist(&uu) <= 1e-10);
            let e = herm_eig(&p.modulus).unwrap();
            prop_assert!(e.values[0] >= -1e-12 * f.frob_norm());
        }

        #[test]
        fn adjoint_has_same_singular_values(n in 1usize..9, raw in proptest::collection::vec(-2.0f64..2.0, 128)) {
            let f = from_raw(n, &raw);
            let a = singular_values(&f);
            let b = singular_values(&f.adjoint());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= tol::TOL_EIG * f.frob_norm() + 1e-300);
            }
        }

        #[test]
        fn squares_are_eigenvalues_of_gram(n in 1usize..7, raw in proptest::collection::vec(-2.0f64..2.0, 72)) {
            let f = from_raw(n, &raw);
            let mut s2: Vec<f64> = singular_values(&f).iter().map(|s| s * s).collect();
            s2.reverse();
            let e = herm_eig(&(&f.adjoint() * &f)).unwrap();
            for (x, y) in s2.iter().zip(&e.values) {
                prop_assert!((x - y).abs() <= 1e-12 * f.frob_norm_sqr() + 1e-300);
            }
        }
    }
}
