//! Right-invariant subspaces of `L²(M)`: wandering subspaces, the type
//! decomposition and the partial-isometry (Beurling) form.

use serde::Serialize;

use crate::algebra::{residual_off, SubAlg};
use crate::error::{Error, Result};
use crate::matcore::{herm_eig, hs_inner_unchecked, orthonormalize, orthonormalize_with_floor, polar, CMatrix, Inner};
use crate::rng;
use crate::tol;

// Absolute drop threshold for residual families built from unit vectors.
const ABS_FLOOR: f64 = 1e-9;

/// Subspace of `M_n` with a trace-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    n: usize,
    basis: Vec<CMatrix>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let s = (n as f64).sqrt();
        let basis = (0..n * n).map(|k| CMatrix::unit(n, k / n, k % n).scale_re(s)).collect();
        Subspace { n, basis }
    }

    /// Span of arbitrary vectors.
    pub fn span(n: usize, vectors: &[CMatrix]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch(n, v.dim()));
        }
        Ok(Subspace { n, basis: orthonormalize(vectors, &Inner::Trace) })
    }

    fn span_abs(n: usize, vectors: &[CMatrix]) -> Self {
        Subspace { n, basis: orthonormalize_with_floor(vectors, &Inner::Trace, ABS_FLOOR) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn project(&self, x: &CMatrix) -> CMatrix {
        crate::algebra::project(x, &self.basis)
    }

    /// `‖x − P x‖₂ ≤ TOL_SUB · ‖x‖₂`.
    pub fn contains(&self, x: &CMatrix) -> bool {
        residual_off(x, &self.basis).norm2() <= tol::TOL_SUB * x.norm2()
    }

    /// Largest sine of the principal angles; `1` when dimensions differ.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.dim() != other.dim() {
            return 1.0;
        }
        if self.is_zero() {
            return 0.0;
        }
        let one_sided = |a: &Subspace, b: &Subspace| {
            let r: Vec<CMatrix> = b.basis.iter().map(|v| residual_off(v, &a.basis)).collect();
            let g = CMatrix::from_fn(r.len(), |i, j| hs_inner_unchecked(&r[j], &r[i]));
            let e = herm_eig(&g.hermitian_part()).expect("Gram matrix is Hermitian");
            e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
        };
        one_sided(self, other).max(one_sided(other, self))
    }

    /// Span of the union.
    pub fn join(&self, other: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span_abs(self.n, &v)
    }
}

fn products(k: &Subspace, right: &[CMatrix]) -> Vec<CMatrix> {
    k.basis.iter().flat_map(|x| right.iter().map(move |a| x * a)).collect()
}

fn invariance_residual(k: &Subspace, alg: &SubAlg) -> f64 {
    products(k, alg.a_basis())
        .iter()
        .map(|x| residual_off(x, &k.basis).norm2() / x.norm2().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// `K a ⊂ K` for every `a ∈ A`.
pub fn is_invariant(k: &Subspace, alg: &SubAlg) -> bool {
    k.n == alg.n() && invariance_residual(k, alg) <= tol::TOL_SUB
}

fn require_invariant(k: &Subspace, alg: &SubAlg) -> Result<()> {
    if k.n != alg.n() {
        return Err(Error::DimensionMismatch(alg.n(), k.n));
    }
    let residual = invariance_residual(k, alg);
    if residual > tol::TOL_SUB {
        return Err(Error::NotInvariant { residual });
    }
    Ok(())
}

/// `W = K ⊖ span(K A_0)`.
pub fn wandering(k: &Subspace, alg: &SubAlg) -> Result<Subspace> {
    require_invariant(k, alg)?;
    let ka0 = Subspace::span_abs(k.n, &products(k, alg.a0_basis()));
    let r: Vec<CMatrix> = k.basis.iter().map(|x| residual_off(x, &ka0.basis)).collect();
    Ok(Subspace::span_abs(k.n, &r))
}

#[derive(Clone, Debug)]
pub struct TypeSplit {
    pub k1: Subspace,
    pub k2: Subspace,
    /// Steps until `span(K A_0^m)` stabilized.
    pub chain_length: usize,
}

/// `K = K1 ⊕ K2` with `K1 = span(W A)` and `K2 = ∩_m span(K A_0^m)`.
pub fn type_split(k: &Subspace, alg: &SubAlg) -> Result<TypeSplit> {
    let w = wandering(k, alg)?;
    let n = k.n;
    let mut s = k.clone();
    let mut chain_length = 0;
    loop {
        let next = Subspace::span_abs(n, &products(&s, alg.a0_basis()));
        chain_length += 1;
        let stable = next.dim() == s.dim();
        s = next;
        if stable || s.is_zero() || chain_length > n * n {
            break;
        }
    }
    let k1 = Subspace::span_abs(n, &products(&w, alg.a_basis()));
    let k2 = s;
    let sum = k1.join(&k2);
    let dist = sum.distance(k);
    if dist > tol::TOL_SUB {
        return Err(Error::Decomposition(format!("K1 ⊕ K2 differs from K (distance {dist:e})")));
    }
    for x in &k1.basis {
        for y in &k2.basis {
            let overlap = hs_inner_unchecked(x, y).norm();
            let column = (&x.adjoint() * y).frob_norm();
            if overlap > tol::TOL_SUB || column > tol::TOL_ALG * x.frob_norm() * y.frob_norm() {
                return Err(Error::Decomposition("K1 and K2 do not form a column sum".into()));
            }
        }
    }
    Ok(TypeSplit { k1, k2, chain_length })
}

#[derive(Clone, Debug, Serialize)]
pub struct BeurlingResiduals {
    /// Largest off-`D` part of `w_i* w_j` over wandering basis pairs.
    pub wandering_gram_off_d: f64,
    /// Largest distance of an eigenvalue of `u_i* u_i` from `{0, 1}`.
    pub projection_defect: f64,
    /// Largest off-`D` part of `u_i* u_i`.
    pub modulus_off_d: f64,
    /// Largest `‖u_i* u_j‖_F` for `i ≠ j`.
    pub cross_products: f64,
    /// Principal-angle distance between `K` and `span(∪ u_i A) ⊕ K2`.
    pub reconstruction: f64,
}

#[derive(Clone, Debug)]
pub struct BeurlingDecomp {
    pub isometries: Vec<CMatrix>,
    pub type2_part: Subspace,
    pub residuals: BeurlingResiduals,
}

/// Partial isometries `u_i` with `|u_i| ∈ D`, mutually orthogonal ranges and
/// `K = ⊕ u_i A ⊕ K2`.
///
/// Module Gram-Schmidt over `D` on the wandering subspace: the wandering
/// vector of largest norm (ties broken by larger lexicographic entries) is
/// replaced by its polar part `u`, and `u Φ(u* w')` is removed from the rest.
/// Isometries with mutually orthogonal initial projections are then summed,
/// so that `K = u A` yields a single `u`.
pub fn beurling_extract(k: &Subspace, alg: &SubAlg) -> Result<BeurlingDecomp> {
    let split = type_split(k, alg)?;
    let w = wandering(k, alg)?;
    let mut gram_off_d = 0.0f64;
    for a in &w.basis {
        for b in &w.basis {
            let g = &a.adjoint() * b;
            let r = alg.residual_outside_d(&g) / (a.frob_norm() * b.frob_norm());
            gram_off_d = gram_off_d.max(r);
        }
    }
    if gram_off_d > tol::TOL_ALG {
        return Err(Error::NotSubdiagonal(format!("W* W leaves D (relative residual {gram_off_d:e})")));
    }

    let mut pending = w.basis.clone();
    let mut found: Vec<CMatrix> = Vec::new();
    while !pending.is_empty() {
        let pick = pending
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.frob_norm().total_cmp(&b.frob_norm()).then_with(|| a.lex_cmp_abs(b)))
            .map(|(i, _)| i)
            .expect("nonempty");
        let wv = pending.swap_remove(pick);
        if wv.frob_norm() <= ABS_FLOOR {
            break;
        }
        let u = polar(&wv).isometry_part;
        let rest: Vec<CMatrix> = pending
            .iter()
            .map(|x| {
                let c = crate::algebra::expectation(&(&u.adjoint() * x), alg).expect("same dimension");
                x - &(&u * &c)
            })
            .collect();
        pending = orthonormalize_with_floor(&rest, &Inner::Trace, ABS_FLOOR);
        found.push(u);
    }

    let isometries = merge(found, alg)?;
    let n = k.n;
    let mut projection_defect = 0.0f64;
    let mut modulus_off_d = 0.0f64;
    let mut cross = 0.0f64;
    for (i, u) in isometries.iter().enumerate() {
        let p = (&u.adjoint() * u).hermitian_part();
        let e = herm_eig(&p)?;
        for l in &e.values {
            projection_defect = projection_defect.max(l.abs().min((l - 1.0).abs()));
        }
        modulus_off_d = modulus_off_d.max(alg.residual_outside_d(&p));
        for v in &isometries[i + 1..] {
            cross = cross.max((&u.adjoint() * v).frob_norm());
        }
    }
    let generated: Vec<CMatrix> = isometries.iter().flat_map(|u| alg.a_basis().iter().map(move |a| u * a)).collect();
    let rebuilt = Subspace::span_abs(n, &generated).join(&split.k2);
    let reconstruction = rebuilt.distance(k);
    Ok(BeurlingDecomp {
        isometries,
        type2_part: split.k2,
        residuals: BeurlingResiduals {
            wandering_gram_off_d: gram_off_d,
            projection_defect,
            modulus_off_d,
            cross_products: cross,
            reconstruction,
        },
    })
}

/// Orthonormal vectors spanning the range (`inside`) or the kernel of a
/// projection, restricted to the coordinates `[off, off + len)`.
fn block_vectors(p: &CMatrix, off: usize, len: usize, inside: bool) -> Result<Vec<Vec<crate::matcore::C64>>> {
    let e = herm_eig(&p.sub_block(off, len).hermitian_part())?;
    Ok((0..len).filter(|&k| (e.values[k] > 0.5) == inside).map(|k| e.vectors.column(k)).collect())
}

/// Groups partial isometries into sums `Σ u_i v_i`, where `v_i ∈ D` are
/// partial isometries with `v_i v_i* = |u_i|` moving initial projections so
/// that they are mutually orthogonal within a group. Since `u_i v_i A = u_i A`
/// the generated subspace is unchanged.
///
/// Block algebras place each `u_i` in the first group with room in every
/// diagonal block; explicit algebras only merge isometries whose initial
/// projections are already orthogonal.
fn merge(us: Vec<CMatrix>, alg: &SubAlg) -> Result<Vec<CMatrix>> {
    let mut groups: Vec<(CMatrix, CMatrix)> = Vec::new();
    for u in us {
        let p = (&u.adjoint() * &u).hermitian_part();
        let mut placed = false;
        for (g, q) in groups.iter_mut() {
            let moved = match alg.partition() {
                None => ((&p * &*q).frob_norm() <= tol::TOL_SUB).then(|| u.clone()),
                Some(part) => {
                    let n = alg.n();
                    let mut v = CMatrix::zeros(n);
                    let mut fits = true;
                    for (off, len) in part.blocks() {
                        let range = block_vectors(&p, off, len, true)?;
                        let free = block_vectors(q, off, len, false)?;
                        if range.len() > free.len() {
                            fits = false;
                            break;
                        }
                        for (a, b) in range.iter().zip(&free) {
                            for i in 0..len {
                                for j in 0..len {
                                    v[(off + i, off + j)] += a[i] * b[j].conj();
                                }
                            }
                        }
                    }
                    fits.then(|| &u * &v)
                }
            };
            if let Some(m) = moved {
                let pm = (&m.adjoint() * &m).hermitian_part();
                *g = &*g + &m;
                *q = &*q + &pm;
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push((u, p));
        }
    }
    Ok(groups.into_iter().map(|(g, _)| g).collect())
}

/// `span{g_j a}` for Gaussian `g_j` and `a` over a basis of `A`.
pub fn random_invariant_subspace(alg: &SubAlg, seed: u64, generators: usize) -> Result<Subspace> {
    if generators == 0 {
        return Err(Error::InvalidArgument("at least one generator is required".into()));
    }
    let n = alg.n();
    let mut r = rng::stream(seed, 0);
    let gs: Vec<CMatrix> = (0..generators).map(|_| rng::gaussian_matrix(n, &mut r)).collect();
    let v: Vec<CMatrix> = gs.iter().flat_map(|g| alg.a_basis().iter().map(move |a| g * a)).collect();
    Subspace::span(n, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BlockPartition;

    fn e(i: usize, j: usize) -> CMatrix {
        CMatrix::unit(2, i, j)
    }

    #[test]
    fn invariance_examples() {
        let t2 = SubAlg::upper_triangular(2);
        let k = Subspace::span(2, &[e(0, 0), e(0, 1)]).unwrap();
        assert!(is_invariant(&k, &t2));
        assert!(!is_invariant(&Subspace::span(2, &[e(1, 0)]).unwrap(), &t2));
        assert!(is_invariant(&Subspace::full(2), &t2));
        assert!(is_invariant(&Subspace::zero(2), &t2));
    }

    #[test]
    fn wandering_examples() {
        let t2 = SubAlg::upper_triangular(2);
        let k = Subspace::span(2, &[e(0, 0), e(0, 1)]).unwrap();
        let w = wandering(&k, &t2).unwrap();
        assert_eq!(w.dim(), 1);
        assert!(w.basis()[0].dist(&e(0, 0).scale_re(2f64.sqrt())) < 1e-15);
        assert!(wandering(&Subspace::zero(2), &t2).unwrap().is_zero());
        let full = wandering(&Subspace::full(2), &t2).unwrap();
        let expect = Subspace::span(2, &[e(0, 0), e(1, 0)]).unwrap();
        assert!(full.distance(&expect) < 1e-14);
        assert!(matches!(wandering(&Subspace::span(2, &[e(1, 0)]).unwrap(), &t2), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn extraction_examples() {
        let t2 = SubAlg::upper_triangular(2);
        let k = Subspace::span(2, &[e(0, 0), e(0, 1)]).unwrap();
        let d = beurling_extract(&k, &t2).unwrap();
        assert_eq!(d.isometries.len(), 1);
        assert!(d.isometries[0].dist(&e(0, 0)) < 1e-14);
        let d = beurling_extract(&Subspace::full(2), &t2).unwrap();
        assert_eq!(d.isometries.len(), 2);
        assert!(d.type2_part.is_zero());
        assert!(d.residuals.reconstruction < 1e-12);
        assert!(d.residuals.cross_products < 1e-12);
        let units = [e(0, 0), e(1, 0)];
        for u in &d.isometries {
            assert!(units.iter().any(|x| x.dist(u) < 1e-12), "{u:?}");
        }
    }

    #[test]
    fn unitary_orbit_gives_single_isometry() {
        let alg = SubAlg::block_upper(BlockPartition::parse("1,2").unwrap());
        let u = polar(&rng::gaussian_matrix(3, &mut rng::stream(4, 4))).isometry_part;
        let ua: Vec<CMatrix> = alg.a_basis().iter().map(|a| &u * a).collect();
        let k = Subspace::span(3, &ua).unwrap();
        let d = beurling_extract(&k, &alg).unwrap();
        assert_eq!(d.isometries.len(), 1);
        let v = &d.isometries[0];
        // v = u w for a D-unitary w
        let w = &u.adjoint() * v;
        assert!(alg.residual_outside_d(&w) < 1e-10);
        assert!((&w.adjoint() * &w).dist(&CMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn random_subspaces_decompose() {
        for n in 1..=4 {
            for (idx, p) in BlockPartition::all(n).into_iter().enumerate() {
                let alg = SubAlg::block_upper(p);
                for g in 1..=2 {
                    let k = random_invariant_subspace(&alg, (n * 10 + idx) as u64, g).unwrap();
                    assert!(is_invariant(&k, &alg));
                    let w = wandering(&k, &alg).unwrap();
                    for x in w.basis() {
                        for y in k.basis() {
                            for a0 in alg.a0_basis() {
                                assert!(hs_inner_unchecked(x, &(y * a0)).norm() < 1e-10);
                            }
                        }
                    }
                    let d = beurling_extract(&k, &alg).unwrap();
                    let r = &d.residuals;
                    assert!(d.type2_part.is_zero());
                    assert!(r.wandering_gram_off_d <= 1e-10 && r.projection_defect <= 1e-8);
                    assert!(r.cross_products <= 1e-10 && r.reconstruction <= 1e-8, "{r:?}");
                    assert!(r.modulus_off_d <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn generic_generators_fill_the_space() {
        let alg = SubAlg::upper_triangular(2);
        let k = random_invariant_subspace(&alg, 3, 4).unwrap();
        assert_eq!(k.dim(), 4);
        let k2 = random_invariant_subspace(&alg, 3, 4).unwrap();
        assert!(k.distance(&k2) < 1e-14);
        assert!(random_invariant_subspace(&alg, 3, 0).is_err());
    }

    #[test]
    fn non_subdiagonal_wandering_gram() {
        let alg = SubAlg::a_neg();
        // K = M_3 is invariant; its wandering space is K ⊖ M_3 E_13
        let d = beurling_extract(&Subspace::full(3), &alg);
        match d {
            Err(Error::NotSubdiagonal(_)) => {}
            Ok(d) => assert!(d.residuals.wandering_gram_off_d > 0.0),
            Err(e) => panic!("{e}"),
        }
    }
}
