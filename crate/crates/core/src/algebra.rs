//! Tracial subalgebras of `(M_n, τ)`: block upper-triangular algebras given
//! by a partition, and algebras generated by an explicit list of matrices.
//!
//! Every algebra caches trace-orthonormal bases of `A`, of the diagonal
//! `D = A ∩ A*` and of `A_0 = A ⊖ D`, the kernel of the conditional
//! expectation inside `A`. Block algebras additionally use their entry masks
//! so that expectation and membership are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    axpy, herm_eig, hs_inner_unchecked, orthonormalize, polar, singular_values, CMatrix, Inner, C64, ZERO,
};
use crate::rng;
use crate::tol;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    n: usize,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPartition("partition has no blocks".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition(format!("zero block size in {sizes:?}")));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        Ok(BlockPartition { sizes, offsets, n: acc })
    }

    /// `(1, 1, …, 1)`: the upper-triangular matrices.
    pub fn scalar(n: usize) -> Self {
        Self::new(vec![1; n]).expect("n >= 1")
    }

    /// `(n)`: the whole matrix algebra.
    pub fn full(n: usize) -> Self {
        Self::new(vec![n]).expect("n >= 1")
    }

    /// Parses `"2,1,3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let sizes = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::InvalidPartition(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sizes)
    }

    /// All ordered partitions (compositions) of `n`.
    pub fn all(n: usize) -> Vec<BlockPartition> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << (n - 1)) {
            let mut sizes = Vec::new();
            let mut cur = 1;
            for bit in 0..n - 1 {
                if mask & (1 << bit) != 0 {
                    sizes.push(cur);
                    cur = 1;
                } else {
                    cur += 1;
                }
            }
            sizes.push(cur);
            out.push(BlockPartition::new(sizes).expect("valid composition"));
        }
        out
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_scalar(&self) -> bool {
        self.sizes.iter().all(|&s| s == 1)
    }

    /// `(offset, size)` of each block.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.offsets.iter().copied().zip(self.sizes.iter().copied())
    }

    /// Index of the block containing row/column `i`.
    pub fn block_of(&self, i: usize) -> usize {
        match self.offsets.binary_search(&i) {
            Ok(b) => b,
            Err(b) => b - 1,
        }
    }
}

impl TryFrom<Vec<usize>> for BlockPartition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BlockPartition> for Vec<usize> {
    fn from(p: BlockPartition) -> Self {
        p.sizes
    }
}

impl std::fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

#[derive(Clone, Debug)]
pub enum AlgebraKind {
    BlockUpper(BlockPartition),
    /// Algebra generated (with the identity) by the stored matrices.
    Explicit(Vec<CMatrix>),
}

#[derive(Clone, Debug)]
pub struct SubAlg {
    n: usize,
    kind: AlgebraKind,
    a_basis: Vec<CMatrix>,
    a0_basis: Vec<CMatrix>,
    d_basis: Vec<CMatrix>,
}

/// Result of a structural check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub witness: Option<CMatrix>,
    pub dimension: Option<usize>,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Gaussian element of `A`.
    General,
    /// Element of `A` with inverse in `A`, condition number at most the cap.
    InvertibleInA,
    /// Positive definite element of `M` with spectrum in `[1/cap, 1]`.
    PositiveInvertibleInM,
    /// Hermitian Gaussian element of `M`.
    Selfadjoint,
}

// Eigenvalues of a Gram matrix below this are treated as exact null
// directions; those between it and ILL_POSED_HI make the algebra ill-posed.
const NULL_EIG: f64 = 1e-18;
const ILL_POSED_HI: f64 = 1e-8;

impl SubAlg {
    pub fn block_upper(partition: BlockPartition) -> Self {
        let n = partition.n();
        let s = (n as f64).sqrt();
        let mut a_basis = Vec::new();
        let mut a0_basis = Vec::new();
        let mut d_basis = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (bi, bj) = (partition.block_of(i), partition.block_of(j));
                if bi > bj {
                    continue;
                }
                let e = CMatrix::unit(n, i, j).scale_re(s);
                if bi == bj {
                    d_basis.push(e.clone());
                } else {
                    a0_basis.push(e.clone());
                }
                a_basis.push(e);
            }
        }
        SubAlg { n, kind: AlgebraKind::BlockUpper(partition), a_basis, a0_basis, d_basis }
    }

    /// Upper-triangular matrices `T_n`.
    pub fn upper_triangular(n: usize) -> Self {
        Self::block_upper(BlockPartition::scalar(n))
    }

    /// Closes `generators ∪ {1}` under multiplication and computes `D` and
    /// `A_0` by trace-orthogonal projection.
    pub fn explicit(n: usize, generators: Vec<CMatrix>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch(n, g.dim()));
        }
        let mut span: Vec<CMatrix> = std::iter::once(CMatrix::identity(n)).chain(generators.iter().cloned()).collect();
        let mut basis = orthonormalize(&span, &Inner::Trace);
        let mut converged = false;
        for _ in 0..=n * n {
            span = basis.clone();
            for a in &basis {
                for b in &basis {
                    span.push(a * b);
                }
            }
            let next = orthonormalize(&span, &Inner::Trace);
            let grew = next.len() > basis.len();
            basis = next;
            if !grew {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::IllPosedAlgebra("multiplicative closure did not stabilize".into()));
        }
        let a_basis = basis;

        // D = A ∩ A*: coefficient vectors c with Σ c_i a_i ∈ A*.
        let adj: Vec<CMatrix> = a_basis.iter().map(|a| a.adjoint()).collect();
        let residuals: Vec<CMatrix> = a_basis.iter().map(|a| residual_off(a, &adj)).collect();
        let m = a_basis.len();
        let gram = CMatrix::from_fn(m, |i, j| hs_inner_unchecked(&residuals[j], &residuals[i]));
        let eig = herm_eig(&gram.hermitian_part())?;
        let mut d_candidates = Vec::new();
        for (k, &lambda) in eig.values.iter().enumerate() {
            if lambda <= NULL_EIG {
                let mut d = CMatrix::zeros(n);
                for (i, a) in a_basis.iter().enumerate() {
                    axpy(&mut d, eig.vectors[(i, k)], a);
                }
                d_candidates.push(d);
            } else if lambda < ILL_POSED_HI {
                return Err(Error::IllPosedAlgebra(format!(
                    "diagonal A ∩ A* is numerically ambiguous (Gram eigenvalue {lambda:e})"
                )));
            }
        }
        // canonical orthonormal basis of D starting from the identity
        d_candidates.insert(0, CMatrix::identity(n));
        let d_basis = orthonormalize(&d_candidates, &Inner::Trace);
        let a0_raw: Vec<CMatrix> = a_basis.iter().map(|a| residual_off(a, &d_basis)).collect();
        let a0_basis = orthonormalize_abs(&a0_raw);
        if a0_basis.len() + d_basis.len() != a_basis.len() {
            return Err(Error::IllPosedAlgebra("dim D + dim A_0 != dim A".into()));
        }
        Ok(SubAlg { n, kind: AlgebraKind::Explicit(generators), a_basis, a0_basis, d_basis })
    }

    /// `diag(3) ⊕ span{E_13}` in `M_3`: a tracial subalgebra that is not
    /// maximal subdiagonal.
    pub fn a_neg() -> Self {
        let g = vec![CMatrix::unit(3, 0, 0), CMatrix::unit(3, 1, 1), CMatrix::unit(3, 2, 2), CMatrix::unit(3, 0, 2)];
        Self::explicit(3, g).expect("A_neg is well-posed")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn partition(&self) -> Option<&BlockPartition> {
        match &self.kind {
            AlgebraKind::BlockUpper(p) => Some(p),
            AlgebraKind::Explicit(_) => None,
        }
    }

    /// True when the algebra is block upper-triangular with all blocks of size
    /// one.
    pub fn is_scalar_partition(&self) -> bool {
        self.partition().is_some_and(|p| p.is_scalar())
    }

    pub fn a_basis(&self) -> &[CMatrix] {
        &self.a_basis
    }

    pub fn a0_basis(&self) -> &[CMatrix] {
        &self.a0_basis
    }

    pub fn d_basis(&self) -> &[CMatrix] {
        &self.d_basis
    }

    pub fn dim_a(&self) -> usize {
        self.a_basis.len()
    }

    /// Whether entry `(i, j)` is allowed in `A` (block algebras only).
    pub fn mask_a(&self, i: usize, j: usize) -> Option<bool> {
        self.partition().map(|p| p.block_of(i) <= p.block_of(j))
    }

    pub fn mask_d(&self, i: usize, j: usize) -> Option<bool> {
        self.partition().map(|p| p.block_of(i) == p.block_of(j))
    }

    fn check_dim(&self, x: &CMatrix) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, x.dim()));
        }
        Ok(())
    }

    /// Trace-orthogonal projection onto `A`.
    pub fn project_a(&self, x: &CMatrix) -> CMatrix {
        match &self.kind {
            AlgebraKind::BlockUpper(p) => mask(x, |i, j| p.block_of(i) <= p.block_of(j)),
            AlgebraKind::Explicit(_) => project(x, &self.a_basis),
        }
    }

    /// Trace-orthogonal projection onto `A_0`.
    pub fn project_a0(&self, x: &CMatrix) -> CMatrix {
        match &self.kind {
            AlgebraKind::BlockUpper(p) => mask(x, |i, j| p.block_of(i) < p.block_of(j)),
            AlgebraKind::Explicit(_) => project(x, &self.a0_basis),
        }
    }

    fn project_d(&self, x: &CMatrix) -> CMatrix {
        match &self.kind {
            AlgebraKind::BlockUpper(p) => mask(x, |i, j| p.block_of(i) == p.block_of(j)),
            AlgebraKind::Explicit(_) => project(x, &self.d_basis),
        }
    }

    /// `‖x − P_A x‖_F`.
    pub fn residual_outside_a(&self, x: &CMatrix) -> f64 {
        x.dist(&self.project_a(x))
    }

    /// `‖x − Φ(x)‖_F`.
    pub fn residual_outside_d(&self, x: &CMatrix) -> f64 {
        x.dist(&self.project_d(x))
    }

    /// Exact mask test for block algebras, `tol_alg`-relative otherwise.
    pub fn contains(&self, x: &CMatrix) -> bool {
        match &self.kind {
            AlgebraKind::BlockUpper(_) => self.residual_outside_a(x) == 0.0,
            AlgebraKind::Explicit(_) => self.residual_outside_a(x) <= tol::TOL_ALG * x.frob_norm().max(1.0),
        }
    }

    /// Membership within `tol_alg · ‖x‖_F` for every kind of algebra.
    pub fn contains_approx(&self, x: &CMatrix) -> bool {
        self.residual_outside_a(x) <= tol::TOL_ALG * x.frob_norm().max(f64::MIN_POSITIVE)
    }

    pub fn contains_d(&self, x: &CMatrix, rel_tol: f64) -> bool {
        self.residual_outside_d(x) <= rel_tol * x.frob_norm().max(f64::MIN_POSITIVE)
    }

    /// Orthonormal basis of `span(A ∪ A*)`.
    fn symmetric_span(&self) -> Vec<CMatrix> {
        let mut v = self.a_basis.clone();
        v.extend(self.a_basis.iter().map(|a| a.adjoint()));
        orthonormalize(&v, &Inner::Trace)
    }
}

fn mask(x: &CMatrix, keep: impl Fn(usize, usize) -> bool) -> CMatrix {
    CMatrix::from_fn(x.dim(), |i, j| if keep(i, j) { x[(i, j)] } else { ZERO })
}

/// Projection onto the span of a trace-orthonormal family.
pub(crate) fn project(x: &CMatrix, basis: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::zeros(x.dim());
    for b in basis {
        axpy(&mut out, hs_inner_unchecked(x, b), b);
    }
    out
}

/// Component of `x` trace-orthogonal to the span of an orthonormal family.
pub(crate) fn residual_off(x: &CMatrix, basis: &[CMatrix]) -> CMatrix {
    let mut r = x.clone();
    for _ in 0..2 {
        for b in basis {
            let c = hs_inner_unchecked(&r, b);
            axpy(&mut r, -c, b);
        }
    }
    r
}

// Orthonormalization with an absolute floor, for residual families whose
// largest member may itself be negligible.
fn orthonormalize_abs(v: &[CMatrix]) -> Vec<CMatrix> {
    crate::matcore::orthonormalize_with_floor(v, &Inner::Trace, 1e-9)
}

/// First element of the trace-orthogonal complement of an orthonormal family,
/// obtained by projecting matrix units in row-major order.
fn complement_element(n: usize, basis: &[CMatrix]) -> Option<CMatrix> {
    for i in 0..n {
        for j in 0..n {
            let r = residual_off(&CMatrix::unit(n, i, j), basis);
            if r.frob_norm() > 1e-6 {
                return Some(r);
            }
        }
    }
    None
}

/// Hermitian representative of a `*`-closed complement, unit trace norm.
fn hermitian_witness(c: &CMatrix) -> CMatrix {
    let sym = c + &c.adjoint();
    let k = if sym.frob_norm() > 1e-9 * c.frob_norm() { sym } else { (c - &c.adjoint()).scale(C64::new(0.0, 1.0)) };
    k.scale_re(1.0 / k.norm2())
}

/// Trace-preserving conditional expectation `Φ` onto `D`.
pub fn expectation(x: &CMatrix, alg: &SubAlg) -> Result<CMatrix> {
    alg.check_dim(x)?;
    Ok(alg.project_d(x))
}

/// `Φ(ab) = Φ(a)Φ(b)` over all pairs of basis elements of `A`.
pub fn check_multiplicative_expectation(alg: &SubAlg) -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut holds = true;
    let phis: Vec<CMatrix> = alg.a_basis.iter().map(|a| alg.project_d(a)).collect();
    for (a, pa) in alg.a_basis.iter().zip(&phis) {
        for (b, pb) in alg.a_basis.iter().zip(&phis) {
            let ab = a * b;
            let res = alg.project_d(&ab).dist(&(pa * pb));
            let scale = a.frob_norm() * b.frob_norm();
            let rel = res / scale;
            worst = worst.max(rel);
            if rel > tol::TOL_ALG && holds {
                holds = false;
                witness = Some(ab);
            }
        }
    }
    CheckOutcome { holds, witness, dimension: None, residual: worst }
}

/// `A + A* = M`: reports `dim span(A ∪ A*)`.
pub fn check_density(alg: &SubAlg) -> CheckOutcome {
    let n = alg.n;
    let span = alg.symmetric_span();
    let dim = span.len();
    let holds = dim == n * n;
    let witness = if holds { None } else { complement_element(n, &span).map(|c| hermitian_witness(&c)) };
    let residual = witness.as_ref().map_or(0.0, |w| residual_off(w, &span).norm2());
    CheckOutcome { holds, witness, dimension: Some(dim), residual }
}

/// `A = {x : τ(x a₀) = 0 for all a₀ ∈ A_0}`: reports the annihilator dimension.
pub fn check_tau_maximal(alg: &SubAlg) -> CheckOutcome {
    let n = alg.n;
    // τ(x a₀) = ⟨x, a₀*⟩, so the annihilator is the complement of A_0*.
    let a0_adj: Vec<CMatrix> = alg.a0_basis.iter().map(|a| a.adjoint()).collect();
    let ann_dim = n * n - a0_adj.len();
    let mut containment = 0.0f64;
    for a in &alg.a_basis {
        for b in &alg.a0_basis {
            let t = crate::matcore::trace_state(&(a * b)).norm();
            containment = containment.max(t / (a.norm2() * b.norm2()));
        }
    }
    let holds = ann_dim == alg.dim_a() && containment <= tol::TOL_ALG;
    let witness = if holds {
        None
    } else {
        let mut v = a0_adj.clone();
        v.extend(alg.a_basis.iter().cloned());
        let joint = orthonormalize(&v, &Inner::Trace);
        complement_element(n, &joint).map(|c| c.scale_re(1.0 / c.norm2()))
    };
    CheckOutcome { holds, witness, dimension: Some(ann_dim), residual: containment }
}

/// Real dimension of the Hermitian `k` with `τ(f k) = 0` for every `f ∈ A`;
/// the unique normal state extension property holds iff it is zero.
pub fn check_unique_extension(alg: &SubAlg) -> CheckOutcome {
    let n = alg.n;
    let herm = hermitian_unit_basis(n);
    let cols = herm.len();
    // real constraint rows: Re and Im of τ(a_i H_m)
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * alg.dim_a());
    for a in &alg.a_basis {
        let vals: Vec<C64> = herm.iter().map(|h| crate::matcore::trace_state(&(a * h))).collect();
        rows.push(vals.iter().map(|z| z.re).collect());
        rows.push(vals.iter().map(|z| z.im).collect());
    }
    let gram = CMatrix::from_fn(cols, |i, j| C64::new(rows.iter().map(|r| r[i] * r[j]).sum(), 0.0));
    let eig = herm_eig(&gram).expect("Gram matrix is symmetric");
    let top = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    let null: Vec<usize> = (0..cols).filter(|&k| eig.values[k] <= 1e-10 * top).collect();
    let d = null.len();
    let witness = null.first().map(|&k| {
        let mut w = CMatrix::zeros(n);
        for (m, h) in herm.iter().enumerate() {
            axpy(&mut w, C64::new(eig.vectors[(m, k)].re, 0.0), h);
        }
        w.scale_re(1.0 / w.norm2())
    });
    let residual = null.iter().map(|&k| eig.values[k].max(0.0).sqrt()).fold(0.0, f64::max);
    CheckOutcome { holds: d == 0, witness, dimension: Some(d), residual }
}

/// Real orthonormal (in `Re tr`) basis of the Hermitian matrices.
fn hermitian_unit_basis(n: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.push(CMatrix::unit(n, i, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut re = CMatrix::zeros(n);
            re[(i, j)] = C64::new(s, 0.0);
            re[(j, i)] = C64::new(s, 0.0);
            out.push(re);
            let mut im = CMatrix::zeros(n);
            im[(i, j)] = C64::new(0.0, s);
            im[(j, i)] = C64::new(0.0, -s);
            out.push(im);
        }
    }
    out
}

fn condition_number(x: &CMatrix) -> f64 {
    let s = singular_values(x);
    let lo = *s.last().unwrap();
    if lo == 0.0 {
        f64::INFINITY
    } else {
        s[0] / lo
    }
}

/// Shifts a spectrum upward so that `max/min ≤ ratio`.
fn shift_for_ratio(lo: f64, hi: f64, ratio: f64) -> f64 {
    if hi <= ratio * lo {
        0.0
    } else {
        (hi - ratio * lo) / (ratio - 1.0)
    }
}

/// Random element of the requested flavor, deterministic in `seed`.
pub fn random_element(alg: &SubAlg, flavor: Flavor, seed: u64, cond_cap: f64) -> Result<CMatrix> {
    if cond_cap.is_nan() || cond_cap <= 1.0 {
        return Err(Error::InvalidArgument(format!("cond_cap must exceed 1, got {cond_cap}")));
    }
    let n = alg.n;
    let mut rng = rng::stream(seed, 0);
    let g = rng::gaussian_matrix(n, &mut rng);
    match flavor {
        Flavor::General => Ok(alg.project_a(&g)),
        Flavor::Selfadjoint => Ok((&g + &g.adjoint()).scale_re(std::f64::consts::FRAC_1_SQRT_2)),
        Flavor::PositiveInvertibleInM => {
            let w = (&g * &g.adjoint()).hermitian_part();
            let eig = herm_eig(&w)?;
            let lo = eig.values[0].max(0.0);
            let hi = *eig.values.last().unwrap();
            let c = shift_for_ratio(lo, hi, cond_cap);
            let top = hi + c;
            Ok(eig.map(|l| ((l.max(0.0) + c) / top).max(1.0 / cond_cap)).hermitian_part())
        }
        Flavor::InvertibleInA => {
            let x = alg.project_a(&g);
            let d = alg.project_d(&x);
            let a0 = &x - &d;
            // condition the diagonal part inside D, then shrink the nilpotent
            // part until the whole element meets the cap
            let pd = polar(&d);
            let w = crate::matcore::unitary_extend(&pd.isometry_part)?;
            let eig = herm_eig(&pd.modulus)?;
            let lo = eig.values[0].max(0.0);
            let hi = *eig.values.last().unwrap();
            let target = cond_cap.sqrt();
            let c = shift_for_ratio(lo, hi, target);
            let conditioned = &pd.modulus + &CMatrix::identity(n).scale_re(c);
            let d_new = alg.project_d(&(&w * &conditioned));
            let mut t = 1.0;
            for _ in 0..60 {
                let mut cand = d_new.clone();
                axpy(&mut cand, C64::new(t, 0.0), &a0);
                if condition_number(&cand) <= cond_cap {
                    return Ok(cand);
                }
                t *= 0.5;
            }
            Ok(d_new)
        }
    }
}

/// Random `D`-unitary: polar part of a Gaussian element of `D`.
pub fn random_d_unitary(alg: &SubAlg, seed: u64) -> Result<CMatrix> {
    let mut rng = rng::stream(seed, 1);
    let g = rng::gaussian_matrix(alg.n, &mut rng);
    let d = alg.project_d(&g);
    let p = polar(&d);
    let w = crate::matcore::unitary_extend(&p.isometry_part)?;
    Ok(alg.project_d(&w))
}
