use super::{axpy, check_psd, hs_inner_unchecked, weighted_inner_unchecked, CMatrix, C64};
use crate::error::Result;
use crate::tol;

/// Inner product on `M_n` used for orthonormalization.
#[derive(Clone, Debug)]
pub enum Inner {
    /// `τ(y* x)`
    Trace,
    /// `τ(h^{1/2} y* x h^{1/2})` for a positive weight `h`.
    Weighted(CMatrix),
}

impl Inner {
    pub fn weighted(h: &CMatrix) -> Result<Self> {
        check_psd(h)?;
        Ok(Inner::Weighted(h.clone()))
    }

    pub fn apply(&self, x: &CMatrix, y: &CMatrix) -> C64 {
        match self {
            Inner::Trace => hs_inner_unchecked(x, y),
            Inner::Weighted(h) => weighted_inner_unchecked(x, y, h),
        }
    }

    pub fn norm(&self, x: &CMatrix) -> f64 {
        self.apply(x, x).re.max(0.0).sqrt()
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Vectors whose residual norm is at most `rank_tol` times the largest input
/// norm are dropped. Output order follows input order.
pub fn orthonormalize(vectors: &[CMatrix], inner: &Inner) -> Vec<CMatrix> {
    let max_norm = vectors.iter().map(|v| inner.norm(v)).fold(0.0, f64::max);
    orthonormalize_with_floor(vectors, inner, tol::RANK_TOL * max_norm)
}

/// As [`orthonormalize`], with an explicit absolute drop threshold.
pub fn orthonormalize_with_floor(vectors: &[CMatrix], inner: &Inner, floor: f64) -> Vec<CMatrix> {
    let mut basis: Vec<CMatrix> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner.apply(&r, b);
                axpy(&mut r, -c, b);
            }
        }
        let nr = inner.norm(&r);
        if nr > floor && nr > 0.0 {
            basis.push(r.scale_re(1.0 / nr));
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicate_unit_is_dropped() {
        let e11 = CMatrix::unit(2, 0, 0);
        let out = orthonormalize(&[e11.clone(), e11.clone()], &Inner::Trace);
        assert_eq!(out.len(), 1);
        assert!(out[0].dist(&e11.scale_re(2f64.sqrt())) < 1e-15);
    }

    #[test]
    fn empty_input() {
        assert!(orthonormalize(&[], &Inner::Trace).is_empty());
    }

    #[test]
    fn identity_and_nilpotent() {
        let one = CMatrix::identity(2);
        let e12 = CMatrix::unit(2, 0, 1);
        let out = orthonormalize(&[one.clone(), e12.clone()], &Inner::Trace);
        assert_eq!(out.len(), 2);
        assert!(out[0].dist(&one) < 1e-15);
        assert!(out[1].dist(&e12.scale_re(2f64.sqrt())) < 1e-15);
    }

    #[test]
    fn weighted_orthonormality() {
        let h = CMatrix::from_real_rows(&[&[2.0, 0.3], &[0.3, 1.0]]);
        let inner = Inner::weighted(&h).unwrap();
        let vs = vec![CMatrix::identity(2), CMatrix::unit(2, 0, 1), CMatrix::unit(2, 1, 0)];
        let out = orthonormalize(&vs, &inner);
        for (i, a) in out.iter().enumerate() {
            for (j, b) in out.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((inner.apply(a, b) - C64::new(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn idempotent(n in 1usize..5, k in 1usize..6, raw in proptest::collection::vec(-1.0f64..1.0, 200)) {
            let vs: Vec<CMatrix> = (0..k)
                .map(|t| CMatrix::from_fn(n, |i, j| {
                    let idx = (t * 25 + i * 5 + j) * 2 % 200;
                    C64::new(raw[idx], raw[idx + 1])
                }))
                .collect();
            let once = orthonormalize(&vs, &Inner::Trace);
            let twice = orthonormalize(&once, &Inner::Trace);
            prop_assert_eq!(once.len(), twice.len());
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!(a.dist(b) <= 1e-11 * (n as f64));
            }
        }
    }
}
