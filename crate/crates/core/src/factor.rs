//! Positive, inner-outer and Riesz factorizations in the algebra.
//!
//! Canonical form: every outer factor `h` is normalized so that `Φ(h)` is
//! positive definite, which fixes the `D`-unitary freedom in `f = u h`.

use serde::Serialize;

use crate::algebra::SubAlg;
use crate::error::{Error, Result};
use crate::fkdet::fk_det;
use crate::matcore::{
    check_pd, inverse, mat_fn, orthonormalize, polar, singular_values, trace_state, unitary_extend, CMatrix, Inner,
    MatFn, C64, ZERO,
};
use crate::tol;

/// `f = inner_u · outer_h` with `inner_u` unitary and `outer_h` outer in `A`.
#[derive(Clone, Debug, Serialize)]
pub struct InnerOuter {
    pub inner_u: CMatrix,
    pub outer_h: CMatrix,
}

/// `x = y z` with `y ∈ H^p`, `z ∈ H^q` and `1/p + 1/q = 1/r`.
#[derive(Clone, Debug, Serialize)]
pub struct RieszPair {
    pub y: CMatrix,
    pub z: CMatrix,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub norm_y_p: f64,
    pub norm_z_q: f64,
    pub norm_x_r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OuterDiagnostics {
    pub outer: bool,
    pub in_algebra: bool,
    /// `‖h x − 1‖_F / ‖1‖_F` for `x = P_A(h⁻¹)`; `None` if `h` is singular.
    pub certificate_residual: Option<f64>,
    pub delta: f64,
    pub delta_phi: f64,
    pub abs_tau: f64,
}

fn require_block(alg: &SubAlg) -> Result<()> {
    if alg.partition().is_none() {
        return Err(Error::RequiresBlockAlgebra);
    }
    Ok(())
}

fn check_dim(x: &CMatrix, alg: &SubAlg) -> Result<()> {
    if x.dim() != alg.n() {
        return Err(Error::DimensionMismatch(alg.n(), x.dim()));
    }
    Ok(())
}

/// Upper-triangular `R` with positive diagonal and `R* R = b`.
fn scalar_cholesky(b: &CMatrix) -> Result<CMatrix> {
    let n = b.dim();
    let mut r = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = b[(j, j)].re;
        for k in 0..j {
            d -= r[(k, j)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositive { min_eigenvalue: d });
        }
        let rjj = d.sqrt();
        r[(j, j)] = C64::new(rjj, 0.0);
        for i in j + 1..n {
            let mut s = b[(j, i)];
            for k in 0..j {
                s -= r[(k, j)].conj() * r[(k, i)];
            }
            r[(j, i)] = s / rjj;
        }
    }
    Ok(r)
}

/// Householder QR: `f = q r` with `q` unitary and `r` upper triangular.
pub fn householder_qr(f: &CMatrix) -> (CMatrix, CMatrix) {
    let n = f.dim();
    let mut r = f.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(l, vl)| vl.conj() * r[(k + l, j)]).sum();
            for (l, vl) in v.iter().enumerate() {
                r[(k + l, j)] -= *vl * s * 2.0;
            }
        }
        for i in 0..n {
            let s: C64 = v.iter().enumerate().map(|(l, vl)| q[(i, k + l)] * vl).sum();
            for (l, vl) in v.iter().enumerate() {
                q[(i, k + l)] -= s * vl.conj() * 2.0;
            }
        }
        r[(k, k)] = alpha;
        for i in k + 1..n {
            r[(i, k)] = ZERO;
        }
    }
    (q, r)
}

/// `D`-unitary `w` with `w* Φ(h)` positive definite.
fn canonical_phase(h: &CMatrix, alg: &SubAlg) -> Result<CMatrix> {
    let phi = crate::algebra::expectation(h, alg)?;
    let s = singular_values(&phi);
    if s[0] == 0.0 || s[s.len() - 1] <= tol::RANK_TOL * s[0] {
        return Err(Error::Singular("Φ(h) is singular on a block".into()));
    }
    let w = polar(&phi).isometry_part;
    crate::algebra::expectation(&w, alg)
}

/// Normal form `(u w, w* h)` with `Φ(w* h)` positive definite.
pub fn canonicalize(pair: &InnerOuter, alg: &SubAlg) -> Result<InnerOuter> {
    check_dim(&pair.outer_h, alg)?;
    check_dim(&pair.inner_u, alg)?;
    let w = canonical_phase(&pair.outer_h, alg)?;
    let h = alg.project_a(&(&w.adjoint() * &pair.outer_h));
    Ok(InnerOuter { inner_u: &pair.inner_u * &w, outer_h: h })
}

/// Relative distance between two factorizations.
pub fn pair_distance(a: &InnerOuter, b: &InnerOuter) -> f64 {
    let du = a.inner_u.dist(&b.inner_u) / a.inner_u.frob_norm().max(f64::MIN_POSITIVE);
    let dh = a.outer_h.dist(&b.outer_h) / a.outer_h.frob_norm().max(f64::MIN_POSITIVE);
    du.max(dh)
}

/// Block upper-triangular `a` with `a* a = b` and `Φ(a)` positive definite.
pub fn cholesky_in_a(b: &CMatrix, alg: &SubAlg) -> Result<CMatrix> {
    require_block(alg)?;
    check_dim(b, alg)?;
    check_pd(b)?;
    let r = scalar_cholesky(&b.hermitian_part())?;
    let w = canonical_phase(&r, alg)?;
    Ok(alg.project_a(&(&w.adjoint() * &r)))
}

/// Factor `a ∈ A` with `a b a* = 1` (so `a* a = b⁻¹`), built from the
/// `b`-weighted projection `p` of `1` onto `A_0` and `e = ((1−p) b (1−p)*)^{-1/2}`.
pub fn factor_via_weighted_projection(b: &CMatrix, alg: &SubAlg) -> Result<CMatrix> {
    check_dim(b, alg)?;
    check_pd(b)?;
    let n = alg.n();
    let b = b.hermitian_part();
    let inner = Inner::Weighted(b.clone());
    let basis = orthonormalize(alg.a0_basis(), &inner);
    let one = CMatrix::identity(n);
    let mut p = CMatrix::zeros(n);
    for e in &basis {
        let c = inner.apply(&one, e);
        p = &p + &e.scale(c);
    }
    let one_minus_p = &one - &p;
    let x = (&(&one_minus_p * &b) * &one_minus_p.adjoint()).hermitian_part();
    let off = alg.residual_outside_d(&x);
    if off > WEIGHTED_D_TOL * x.frob_norm() {
        return Err(Error::NotSubdiagonal(format!(
            "(1 − p) b (1 − p)* leaves D (relative residual {:e})",
            off / x.frob_norm()
        )));
    }
    let x = crate::algebra::expectation(&x, alg)?.hermitian_part();
    let e = mat_fn(&x, MatFn::Power(-0.5))?;
    let e = crate::algebra::expectation(&e, alg)?;
    Ok(alg.project_a(&(&e * &one_minus_p)))
}

// Relative off-D residual accepted for (1 − p) b (1 − p)*; rounding in the
// weighted Gram-Schmidt grows with the condition number of b.
const WEIGHTED_D_TOL: f64 = 1e-8;

fn check_factorable(f: &CMatrix) -> Result<f64> {
    let delta = fk_det(f);
    let floor = tol::DET_FLOOR * f.op_norm();
    if delta <= floor {
        return Err(Error::NotFactorable { delta, floor });
    }
    Ok(delta)
}

/// Canonical inner-outer factorization through Householder QR.
pub fn inner_outer(f: &CMatrix, alg: &SubAlg) -> Result<InnerOuter> {
    require_block(alg)?;
    check_dim(f, alg)?;
    check_factorable(f)?;
    let (q, r) = householder_qr(f);
    canonicalize(&InnerOuter { inner_u: q, outer_h: r }, alg)
}

/// Inner-outer factorization from the polar part of `f − v`, where `v` is
/// the trace projection of `f` onto `span(f A_0)`.
pub fn inner_outer_via_projection(f: &CMatrix, alg: &SubAlg) -> Result<InnerOuter> {
    check_dim(f, alg)?;
    check_factorable(f)?;
    let fa0: Vec<CMatrix> = alg.a0_basis().iter().map(|a| f * a).collect();
    let span = orthonormalize(&fa0, &Inner::Trace);
    let v = crate::algebra::project(f, &span);
    let u = unitary_extend(&polar(&(f - &v)).isometry_part)?;
    let h = &u.adjoint() * f;
    let res = alg.residual_outside_a(&h);
    if res > tol::CROSS_TOL * h.frob_norm() {
        return Err(Error::Decomposition(format!("u* f is not in A (residual {res:e})")));
    }
    canonicalize(&InnerOuter { inner_u: u, outer_h: alg.project_a(&h) }, alg)
}

/// Outer test: `h ∈ A` and `h x = 1` for some `x ∈ A`.
pub fn is_outer(h: &CMatrix, alg: &SubAlg) -> Result<OuterDiagnostics> {
    check_dim(h, alg)?;
    let n = alg.n();
    let in_algebra = alg.contains_approx(h);
    let delta = fk_det(h);
    let delta_phi = fk_det(&crate::algebra::expectation(h, alg)?);
    let abs_tau = trace_state(h).norm();
    let certificate_residual = if delta > tol::DET_FLOOR * h.op_norm() {
        inverse(h).ok().map(|inv| {
            let x = alg.project_a(&inv);
            (&(h * &x) - &CMatrix::identity(n)).frob_norm() / (n as f64).sqrt()
        })
    } else {
        None
    };
    let outer = in_algebra && certificate_residual.is_some_and(|r| r <= tol::OUTER_CERT_TOL);
    Ok(OuterDiagnostics { outer, in_algebra, certificate_residual, delta, delta_phi, abs_tau })
}

/// `span(A h) = A`, the left-sided outer condition.
pub fn left_span_is_full(h: &CMatrix, alg: &SubAlg) -> bool {
    if !alg.contains_approx(h) {
        return false;
    }
    let ah: Vec<CMatrix> = alg.a_basis().iter().map(|a| a * h).collect();
    let scale = alg.a_basis().iter().map(|a| a.norm2()).fold(0.0, f64::max) * h.op_norm();
    let span = crate::matcore::orthonormalize_with_floor(&ah, &Inner::Trace, tol::DET_FLOOR * scale);
    span.len() == alg.dim_a()
}

/// `(Δ(a), Δ(Φ(a)))`.
pub fn jensen_check(a: &CMatrix, alg: &SubAlg) -> Result<(f64, f64)> {
    check_dim(a, alg)?;
    if !alg.contains_approx(a) {
        return Err(Error::NotInAlgebra { residual: alg.residual_outside_a(a) });
    }
    Ok((fk_det(a), fk_det(&crate::algebra::expectation(a, alg)?)))
}

fn schatten(x: &CMatrix, s: f64) -> f64 {
    let sv = singular_values(x);
    if s.is_infinite() {
        return sv[0];
    }
    (sv.iter().map(|v| v.powf(s)).sum::<f64>() / sv.len() as f64).powf(1.0 / s)
}

/// `x = y z` with `z = cholesky_in_A((x* x)^{r/q})` and `y = x z⁻¹`.
///
/// `q` may be infinite. With `regularize = Some(ε)` the factorization is of
/// `x + ε·1`, which admits singular `x`.
pub fn riesz_factor(x: &CMatrix, p: f64, q: f64, r: f64, alg: &SubAlg, regularize: Option<f64>) -> Result<RieszPair> {
    require_block(alg)?;
    check_dim(x, alg)?;
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::InvalidArgument(format!("exponent {name} must be positive, got {v}")));
        }
    }
    if r.is_infinite() || p.is_infinite() {
        return Err(Error::InvalidArgument("only q may be infinite".into()));
    }
    let mismatch = (1.0 / p + 1.0 / q - 1.0 / r).abs();
    if mismatch > 1e-12 {
        return Err(Error::ExponentMismatch(format!("1/{p} + 1/{q} − 1/{r} = {mismatch:e}")));
    }
    if !alg.contains_approx(x) {
        return Err(Error::NotInAlgebra { residual: alg.residual_outside_a(x) });
    }
    let mut x = alg.project_a(x);
    if let Some(eps) = regularize {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidArgument(format!("regularization must be positive, got {eps}")));
        }
        x = &x + &CMatrix::identity(alg.n()).scale_re(eps);
    }
    check_factorable(&x)?;
    let xx = (&x.adjoint() * &x).hermitian_part();
    let z = if q.is_infinite() {
        CMatrix::identity(alg.n())
    } else {
        cholesky_in_a(&mat_fn(&xx, MatFn::Power(r / q))?, alg)?
    };
    let zinv = alg.project_a(&inverse(&z)?);
    let y = &x * &zinv;
    Ok(RieszPair { norm_y_p: schatten(&y, p), norm_z_q: schatten(&z, q), norm_x_r: schatten(&x, r), y, z, p, q, r })
}

/// Outer `h` with `|h|^p = f`.
pub fn outer_with_modulus(f: &CMatrix, p: f64, alg: &SubAlg) -> Result<CMatrix> {
    if p.is_nan() || p <= 0.0 || p.is_infinite() {
        return Err(Error::InvalidArgument(format!("exponent must be positive and finite, got {p}")));
    }
    check_pd(f)?;
    cholesky_in_a(&mat_fn(f, MatFn::Power(2.0 / p))?, alg)
}

/// Outcome of the search for an outer square root.
#[derive(Clone, Debug, Serialize)]
pub struct SquareRootOutcome {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub root_is_outer: bool,
}

/// Denman-Beavers iteration for `s² = h`; every iterate stays in `A`.
pub fn outer_square_root(h: &CMatrix, alg: &SubAlg) -> Result<(CMatrix, SquareRootOutcome)> {
    check_dim(h, alg)?;
    let n = alg.n();
    let mut y = alg.project_a(h);
    let mut z = CMatrix::identity(n);
    let mut iterations = 0;
    let scale = h.frob_norm().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for k in 1..=100 {
        iterations = k;
        let yi = alg.project_a(&inverse(&y)?);
        let zi = alg.project_a(&inverse(&z)?);
        let y_next = (&y + &zi).scale_re(0.5);
        let z_next = (&z + &yi).scale_re(0.5);
        let step = y_next.dist(&y);
        y = y_next;
        z = z_next;
        if step <= 1e-14 * y.frob_norm() {
            converged = true;
            break;
        }
    }
    let residual = (&(&y * &y) - h).frob_norm() / scale;
    let root_is_outer = is_outer(&y, alg)?.outer;
    Ok((y, SquareRootOutcome { converged: converged && residual <= 1e-8, iterations, residual, root_is_outer }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_d_unitary, random_element, BlockPartition, Flavor};
    use crate::matcore::{determinant, C64};
    use crate::rng;
    use proptest::prelude::*;

    fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
        a.dist(b) / b.frob_norm()
    }

    fn blocks(n: usize) -> Vec<SubAlg> {
        BlockPartition::all(n).into_iter().map(SubAlg::block_upper).collect()
    }

    #[test]
    fn cholesky_examples() {
        let t2 = SubAlg::upper_triangular(2);
        let b = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let a = cholesky_in_a(&b, &t2).unwrap();
        let s = std::f64::consts::SQRT_2;
        let expect = CMatrix::from_real_rows(&[&[s, 1.0 / s], &[0.0, 1.0 / s]]);
        assert!(a.dist(&expect) < 1e-15);
        assert_eq!(cholesky_in_a(&CMatrix::identity(3), &SubAlg::upper_triangular(3)).unwrap(), CMatrix::identity(3));
        let full = SubAlg::block_upper(BlockPartition::full(2));
        let root = mat_fn(&b, MatFn::Power(0.5)).unwrap();
        assert!(cholesky_in_a(&b, &full).unwrap().dist(&root) < 1e-14);
        assert!(matches!(cholesky_in_a(&CMatrix::from_real_diag(&[1.0, -1.0]), &t2), Err(Error::NotPositive { .. })));
        assert!(matches!(cholesky_in_a(&b, &SubAlg::a_neg()), Err(Error::RequiresBlockAlgebra)));
    }

    #[test]
    fn weighted_projection_examples() {
        let t2 = SubAlg::upper_triangular(2);
        assert!(
            factor_via_weighted_projection(&CMatrix::identity(2), &t2).unwrap().dist(&CMatrix::identity(2)) < 1e-15
        );
        let a = factor_via_weighted_projection(&CMatrix::from_real_diag(&[1.0, 4.0]), &t2).unwrap();
        assert!(a.dist(&CMatrix::from_real_diag(&[1.0, 0.5])) < 1e-15);
    }

    #[test]
    fn weighted_projection_fails_off_subdiagonal() {
        let alg = SubAlg::a_neg();
        let b = CMatrix::from_real_rows(&[&[2.0, 0.5, 0.3], &[0.5, 2.0, 0.4], &[0.3, 0.4, 2.0]]);
        assert!(matches!(factor_via_weighted_projection(&b, &alg), Err(Error::NotSubdiagonal(_))));
    }

    #[test]
    fn cross_method_agreement() {
        for n in 1..=5 {
            for (k, alg) in blocks(n).iter().enumerate() {
                let b = random_element(alg, Flavor::PositiveInvertibleInM, (n * 100 + k) as u64, 1e4).unwrap();
                let a = cholesky_in_a(&b, alg).unwrap();
                assert!(rel(&(&a.adjoint() * &a), &b) <= 1e-10);
                assert!(alg.contains(&a));
                let binv = inverse(&b).unwrap().hermitian_part();
                let a2 = factor_via_weighted_projection(&binv, alg).unwrap();
                assert!(rel(&a2, &a) <= 1e-8, "n={n} k={k} {}", rel(&a2, &a));
            }
        }
    }

    #[test]
    fn inner_outer_examples() {
        let t2 = SubAlg::upper_triangular(2);
        let flip = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        for io in [inner_outer(&flip, &t2).unwrap(), inner_outer_via_projection(&flip, &t2).unwrap()] {
            assert!(io.inner_u.dist(&flip) < 1e-12);
            assert!(io.outer_h.dist(&CMatrix::identity(2)) < 1e-12);
        }
        let f = CMatrix::from_real_diag(&[2.0, 3.0]);
        for io in [inner_outer(&f, &t2).unwrap(), inner_outer_via_projection(&f, &t2).unwrap()] {
            assert!(io.inner_u.dist(&CMatrix::identity(2)) < 1e-14);
            assert!(io.outer_h.dist(&f) < 1e-14);
        }
        let one = SubAlg::upper_triangular(1);
        let z = CMatrix::from_diag(&[C64::new(0.0, -3.0)]);
        let io = inner_outer_via_projection(&z, &one).unwrap();
        assert!((io.inner_u[(0, 0)] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((io.outer_h[(0, 0)] - C64::new(3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(inner_outer(&CMatrix::unit(2, 0, 1), &t2), Err(Error::NotFactorable { .. })));
    }

    #[test]
    fn inner_outer_of_outer_input_is_inner() {
        let alg = SubAlg::block_upper(BlockPartition::parse("2,1").unwrap());
        let f = random_element(&alg, Flavor::InvertibleInA, 4, 100.0).unwrap();
        let io = inner_outer(&f, &alg).unwrap();
        assert!(alg.contains_d(&io.inner_u, 1e-12));
    }

    #[test]
    fn inner_outer_invariants() {
        for n in 1..=5 {
            for (k, alg) in blocks(n).iter().enumerate() {
                let mut r = rng::stream(n as u64, k as u64);
                let f = rng::gaussian_matrix(n, &mut r);
                let a = inner_outer(&f, alg).unwrap();
                let b = inner_outer_via_projection(&f, alg).unwrap();
                let u = &a.inner_u;
                assert!(rel(&(u * &a.outer_h), &f) <= 1e-10);
                assert!((&u.adjoint() * u).dist(&CMatrix::identity(n)) <= 1e-10);
                assert!(alg.contains(&a.outer_h) && alg.contains(&b.outer_h));
                assert!(pair_distance(&a, &b) <= 1e-8, "{}", pair_distance(&a, &b));
                let (dh, dphi) = jensen_check(&a.outer_h, alg).unwrap();
                assert!((dh - fk_det(&f)).abs() <= 1e-9 * dh && (dh - dphi).abs() <= 1e-9 * dh);
                let diag = is_outer(&a.outer_h, alg).unwrap();
                assert!(diag.outer && diag.certificate_residual.unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn canonicalize_removes_d_unitaries() {
        let alg = SubAlg::block_upper(BlockPartition::parse("1,2").unwrap());
        let f = rng::gaussian_matrix(3, &mut rng::stream(1, 1));
        let io = inner_outer(&f, &alg).unwrap();
        assert!(pair_distance(&canonicalize(&io, &alg).unwrap(), &io) < 1e-14);
        let w = random_d_unitary(&alg, 9).unwrap();
        let moved = InnerOuter { inner_u: &io.inner_u * &w, outer_h: &w.adjoint() * &io.outer_h };
        assert!(pair_distance(&canonicalize(&moved, &alg).unwrap(), &io) < 1e-12);
    }

    #[test]
    fn outer_examples() {
        let t2 = SubAlg::upper_triangular(2);
        assert!(is_outer(&CMatrix::identity(2), &t2).unwrap().outer);
        assert!(!is_outer(&CMatrix::unit(2, 0, 1), &t2).unwrap().outer);
        assert!(!is_outer(&CMatrix::unit(2, 1, 0), &t2).unwrap().outer);
        let h = &CMatrix::from_real_diag(&[2.0, 1.0]) + &CMatrix::unit(2, 0, 1);
        let d = is_outer(&h, &t2).unwrap();
        assert!(d.outer);
        assert!((d.delta - 2f64.sqrt()).abs() < 1e-14 && (d.delta_phi - 2f64.sqrt()).abs() < 1e-14);
        assert!((d.abs_tau - 1.5).abs() < 1e-15);
        // |τ(h)| strictly between 0 and Δ(h)
        let h = &CMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]) + &CMatrix::unit(2, 0, 1);
        let d = is_outer(&h, &t2).unwrap();
        assert!(d.outer && d.abs_tau > 0.0 && d.abs_tau < d.delta);
    }

    #[test]
    fn jensen_examples() {
        let t2 = SubAlg::upper_triangular(2);
        assert_eq!(jensen_check(&CMatrix::identity(2), &t2).unwrap(), (1.0, 1.0));
        let (a, b) = jensen_check(&CMatrix::from_real_rows(&[&[1.0, 5.0], &[0.0, 2.0]]), &t2).unwrap();
        assert!((a - 2f64.sqrt()).abs() < 1e-14 && (b - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(jensen_check(&CMatrix::unit(2, 0, 1), &t2).unwrap(), (0.0, 0.0));
        assert!(matches!(jensen_check(&CMatrix::unit(2, 1, 0), &t2), Err(Error::NotInAlgebra { .. })));
    }

    #[test]
    fn riesz_examples() {
        let t2 = SubAlg::upper_triangular(2);
        let x = CMatrix::from_real_diag(&[4.0, 1.0]);
        let rp = riesz_factor(&x, 2.0, 2.0, 1.0, &t2, None).unwrap();
        assert!(rp.y.dist(&CMatrix::from_real_diag(&[2.0, 1.0])) < 1e-14);
        assert!(rp.z.dist(&CMatrix::from_real_diag(&[2.0, 1.0])) < 1e-14);
        let one = riesz_factor(&CMatrix::identity(2), 2.0, 2.0, 1.0, &t2, None).unwrap();
        assert!(one.y.dist(&CMatrix::identity(2)) < 1e-15 && one.z.dist(&CMatrix::identity(2)) < 1e-15);
        let deg = riesz_factor(&x, 3.0, f64::INFINITY, 3.0, &t2, None).unwrap();
        assert_eq!(deg.z, CMatrix::identity(2));
        assert!(deg.y.dist(&x) < 1e-15);
        assert!(matches!(riesz_factor(&x, 2.0, 2.0, 2.0, &t2, None), Err(Error::ExponentMismatch(_))));
        let sing = CMatrix::unit(2, 0, 1);
        assert!(matches!(riesz_factor(&sing, 2.0, 2.0, 1.0, &t2, None), Err(Error::NotFactorable { .. })));
        let reg = riesz_factor(&sing, 2.0, 2.0, 1.0, &t2, Some(1e-3)).unwrap();
        let xe = &sing + &CMatrix::identity(2).scale_re(1e-3);
        assert!(rel(&(&reg.y * &reg.z), &xe) < 1e-10);
    }

    #[test]
    fn riesz_random() {
        for n in 1..=4 {
            for (k, alg) in blocks(n).iter().enumerate() {
                let x = random_element(alg, Flavor::InvertibleInA, (7 * n + k) as u64, 100.0).unwrap();
                for (p, q, r) in [(2.0, 2.0, 1.0), (4.0, 4.0 / 3.0, 1.0), (3.0, 6.0, 2.0)] {
                    let rp = riesz_factor(&x, p, q, r, alg, None).unwrap();
                    assert!(rel(&(&rp.y * &rp.z), &x) <= 1e-10);
                    assert!(alg.contains(&rp.y) && alg.contains(&rp.z));
                    assert!((rp.norm_z_q.powf(q) - rp.norm_x_r.powf(r)).abs() <= 1e-9 * rp.norm_x_r.powf(r));
                }
            }
        }
    }

    #[test]
    fn modulus_examples() {
        let t2 = SubAlg::upper_triangular(2);
        assert!(outer_with_modulus(&CMatrix::identity(2), 3.0, &t2).unwrap().dist(&CMatrix::identity(2)) < 1e-15);
        let h = outer_with_modulus(&CMatrix::from_real_diag(&[1.0, 16.0]), 2.0, &t2).unwrap();
        assert!(polar(&h).modulus.dist(&CMatrix::from_real_diag(&[1.0, 4.0])) < 1e-13);
        let alg = SubAlg::block_upper(BlockPartition::parse("2,2").unwrap());
        let g = rng::gaussian_matrix(4, &mut rng::stream(2, 2));
        let f = polar(&g).modulus;
        let h = outer_with_modulus(&f, 1.0, &alg).unwrap();
        let (sf, sh) = (singular_values(&f), singular_values(&h));
        assert!(sf.iter().zip(&sh).all(|(a, b)| (a - b).abs() < 1e-10 * sf[0]));
        assert!(is_outer(&h, &alg).unwrap().outer);
        assert!((fk_det(&f) - fk_det(&h)).abs() <= 1e-9 * fk_det(&f));
    }

    #[test]
    fn outer_products_and_left_symmetry() {
        let alg = SubAlg::block_upper(BlockPartition::parse("1,2,1").unwrap());
        for s in 0..20 {
            let h1 = random_element(&alg, Flavor::InvertibleInA, s, 100.0).unwrap();
            let h2 = random_element(&alg, Flavor::InvertibleInA, s + 1000, 100.0).unwrap();
            let prod = &h1 * &h2;
            assert!(is_outer(&prod, &alg).unwrap().outer);
            assert!(left_span_is_full(&prod, &alg));
            let sing = &h1 * &CMatrix::from_real_diag(&[1.0, 1.0, 0.0, 1.0]);
            assert!(!is_outer(&sing, &alg).unwrap().outer);
            assert!(!left_span_is_full(&sing, &alg));
        }
    }

    #[test]
    fn square_roots_of_outers() {
        let alg = SubAlg::block_upper(BlockPartition::parse("2,1").unwrap());
        let h = random_element(&alg, Flavor::InvertibleInA, 3, 50.0).unwrap();
        let (s, out) = outer_square_root(&h, &alg).unwrap();
        assert!(out.converged && out.root_is_outer);
        assert!(alg.contains(&s));
    }

    proptest! {
        #[test]
        fn qr_reconstructs(n in 1usize..7, seed in any::<u64>()) {
            let f = rng::gaussian_matrix(n, &mut rng::stream(seed, 3));
            let (q, r) = householder_qr(&f);
            prop_assert!(rel(&(&q * &r), &f) <= 1e-13);
            prop_assert!((&q.adjoint() * &q).dist(&CMatrix::identity(n)) <= 1e-13);
            for i in 0..n {
                for j in 0..i {
                    prop_assert_eq!(r[(i, j)], ZERO);
                }
            }
            let d = determinant(&r).norm();
            prop_assert!((d - determinant(&f).norm()).abs() <= 1e-10 * d.max(1.0));
        }
    }
}
