//! Dense complex matrices and the linear algebra the rest of the crate is
//! built on: normalized trace, trace inner products, Hermitian eigensolver,
//! singular values, polar decomposition, functional calculus and
//! Gram-Schmidt over matrix-valued vectors.

mod eig;
mod func;
mod gram;
mod lu;
mod svd;

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub use eig::{herm_eig, EigDecomp};
pub use func::{mat_fn, MatFn};
pub use gram::{orthonormalize, orthonormalize_with_floor, Inner};
pub use lu::{determinant, inverse, solve_vec};
pub use svd::{polar, singular_values, svd, unitary_extend, PolarDecomp, Svd};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        CMatrix { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major data; fails on non-square or
    /// non-finite input.
    pub fn from_vec(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Shape(format!("expected {} entries for n = {n}, got {}", n * n, data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_real_diag(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&v)
    }

    /// Matrix unit `E_ij` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = ONE;
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        CMatrix { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Unnormalized trace.
    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn frob_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sqr().sqrt()
    }

    /// Norm induced by the normalized trace, `τ(x*x)^{1/2}`.
    pub fn norm2(&self) -> f64 {
        (self.frob_norm_sqr() / self.n as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator (spectral) norm.
    pub fn op_norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// Frobenius distance from Hermitian, `‖x − x*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol * self.frob_norm().max(f64::MIN_POSITIVE)
    }

    pub fn dist(&self, other: &CMatrix) -> f64 {
        (self - other).frob_norm()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, z) in col.iter().enumerate() {
            self[(i, j)] = *z;
        }
    }

    /// Copy of the square sub-block starting at `(r0, r0)` of size `len`.
    pub fn sub_block(&self, r0: usize, len: usize) -> CMatrix {
        CMatrix::from_fn(len, |i, j| self[(r0 + i, r0 + j)])
    }

    pub fn set_sub_block(&mut self, r0: usize, block: &CMatrix) {
        for i in 0..block.n {
            for j in 0..block.n {
                self[(r0 + i, r0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// Lexicographic comparison of entry moduli, used for deterministic
    /// tie-breaking.
    pub fn lex_cmp_abs(&self, other: &CMatrix) -> std::cmp::Ordering {
        for (a, b) in self.data.iter().zip(&other.data) {
            match a.norm().partial_cmp(&b.norm()) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        std::cmp::Ordering::Equal
    }

    fn check_same(&self, other: &CMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in product");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        &self * &rhs
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in sum");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: CMatrix) -> CMatrix {
        &self + &rhs
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in difference");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: CMatrix) -> CMatrix {
        &self - &rhs
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

/// `a += s·b`
pub(crate) fn axpy(a: &mut CMatrix, s: C64, b: &CMatrix) {
    for (x, y) in a.data.iter_mut().zip(&b.data) {
        *x += s * y;
    }
}

/// Normalized trace `τ(x) = tr(x)/n`.
pub fn trace_state(x: &CMatrix) -> C64 {
    x.trace() / x.n as f64
}

/// `τ(y* x)` without forming the product.
pub(crate) fn hs_inner_unchecked(x: &CMatrix, y: &CMatrix) -> C64 {
    let s: C64 = x.data.iter().zip(&y.data).map(|(a, b)| b.conj() * a).sum();
    s / x.n as f64
}

/// Trace inner product `⟨x, y⟩ = τ(y* x)`, linear in `x`.
pub fn hs_inner(x: &CMatrix, y: &CMatrix) -> Result<C64> {
    x.check_same(y)?;
    Ok(hs_inner_unchecked(x, y))
}

/// Weighted inner product `τ(h^{1/2} y* x h^{1/2})` for a positive weight `h`.
pub fn weighted_inner(x: &CMatrix, y: &CMatrix, h: &CMatrix) -> Result<C64> {
    x.check_same(y)?;
    x.check_same(h)?;
    check_psd(h)?;
    Ok(weighted_inner_unchecked(x, y, h))
}

/// `τ(h y* x) = τ(x h y*)`, which equals the symmetric form by cyclicity.
pub(crate) fn weighted_inner_unchecked(x: &CMatrix, y: &CMatrix, h: &CMatrix) -> C64 {
    let xh = x * h;
    hs_inner_unchecked(&xh, y)
}

/// Fails unless `h` is Hermitian with spectrum bounded below by
/// `−tol_eig·‖h‖_F`.
pub fn check_psd(h: &CMatrix) -> Result<()> {
    let eig = herm_eig(h)?;
    let floor = -tol::TOL_EIG * h.frob_norm();
    match eig.values.first() {
        Some(&lo) if lo < floor => Err(Error::NotPositive { min_eigenvalue: lo }),
        _ => Ok(()),
    }
}

/// Fails unless `h` is Hermitian and positive definite beyond `rank_tol`.
pub fn check_pd(h: &CMatrix) -> Result<EigDecomp> {
    let eig = herm_eig(h)?;
    let lo = eig.values[0];
    let hi = eig.values[eig.values.len() - 1].abs().max(lo.abs());
    if lo <= tol::RANK_TOL * hi || hi == 0.0 {
        return Err(Error::NotPositive { min_eigenvalue: lo });
    }
    Ok(eig)
}
