//! Szegő-type minimizations whose infimum equals the Fuglede-Kadison
//! determinant on a subdiagonal algebra.
//!
//! The feasible set is `{a + d : a ∈ A_0, d ∈ D, Δ(d) ≥ 1}`. Positive `d`
//! suffice (a `D`-unitary phase can be absorbed into `a`), and by
//! homogeneity the optimum sits on `Δ(d) = 1`, so `d = exp(s)` with `s`
//! Hermitian in `D` and `τ(s) = 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::SubAlg;
use crate::error::{Error, Result};
use crate::fkdet::fk_det;
use crate::matcore::{
    axpy, check_psd, herm_eig, hs_inner, mat_fn, orthonormalize, polar, CMatrix, EigDecomp, Inner, MatFn, C64,
};
use crate::rng;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    /// Closed-form gradients through the Daleckii-Krein formula.
    Analytic,
    /// Central differences with step `FD_STEP · max(1, |coordinate|)`.
    CentralDifference,
}

#[derive(Clone, Debug)]
pub struct SzegoOpts {
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
    pub gradient: GradientMode,
}

impl Default for SzegoOpts {
    fn default() -> Self {
        SzegoOpts {
            restarts: tol::RESTARTS,
            max_iters: tol::MAX_ITERS,
            grad_tol: tol::GRAD_TOL,
            seed: 0,
            gradient: GradientMode::Analytic,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SzegoResult {
    pub value: f64,
    pub argmin_a: CMatrix,
    pub argmin_d: CMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    pub grad_norm: f64,
    /// `Δ(h)` from singular values, for comparison.
    pub delta: f64,
}

/// Left and right infima of `τ(|h^{q/p} a|^p)^{1/q}`.
#[derive(Clone, Debug, Serialize)]
pub struct LpGeneralResult {
    pub left: SzegoResult,
    pub right: SzegoResult,
}

/// Relative tolerance for comparing a Szegő value with `Δ(h)`.
pub fn opt_tol_for(alg: &SubAlg) -> f64 {
    if alg.is_scalar_partition() {
        tol::OPT_TOL_SCALAR
    } else {
        tol::OPT_TOL_BLOCK
    }
}

/// Traceless Hermitian basis of `D`, orthonormal for `Re τ(y* x)`.
pub fn traceless_hermitian_basis(alg: &SubAlg) -> Vec<CMatrix> {
    let n = alg.n();
    let mut gens = vec![CMatrix::identity(n)];
    for d in alg.d_basis() {
        gens.push((d + &d.adjoint()).scale_re(0.5));
        gens.push((d - &d.adjoint()).scale(C64::new(0.0, 0.5)));
    }
    let mut basis = orthonormalize(&gens, &Inner::Trace);
    basis.remove(0);
    basis.into_iter().map(|b| b.hermitian_part()).collect()
}

fn combine(coords: &[f64], basis: &[CMatrix], n: usize) -> CMatrix {
    let mut s = CMatrix::zeros(n);
    for (c, b) in coords.iter().zip(basis) {
        axpy(&mut s, C64::new(*c, 0.0), b);
    }
    s
}

/// `V (Γ ∘ V* m V) V*` for the divided differences `Γ` of `f` on the
/// spectrum of `eig`; this is the adjoint of the Fréchet derivative of `f`
/// under the pairing `τ(x y)`.
fn dk_adjoint(eig: &EigDecomp, m: &CMatrix, divided: impl Fn(f64, f64) -> f64) -> CMatrix {
    let v = &eig.vectors;
    let mt = &(&v.adjoint() * m) * v;
    let n = m.dim();
    let g = CMatrix::from_fn(n, |i, j| mt[(i, j)] * divided(eig.values[i], eig.values[j]));
    &(v * &g) * &v.adjoint()
}

fn exp_divided(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d.abs() < 1e-12 {
        (0.5 * (a + b)).exp()
    } else {
        b.exp() * d.exp_m1() / d
    }
}

fn power_divided(e: f64) -> impl Fn(f64, f64) -> f64 {
    move |a: f64, b: f64| {
        let (a, b) = (a.max(f64::MIN_POSITIVE), b.max(f64::MIN_POSITIVE));
        let d = a - b;
        if d.abs() <= 1e-6 * a.max(b) {
            e * (0.5 * (a + b)).powf(e - 1.0)
        } else {
            (a.powf(e) - b.powf(e)) / d
        }
    }
}

struct OptRun {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient descent with Barzilai-Borwein trial steps and Armijo
/// backtracking (factor 0.5). The sufficient-decrease test allows a few ulps
/// of slack so that steps remain possible near the minimum.
/// Objective returning its value and gradient.
type ValueGrad<'a> = dyn Fn(&[f64]) -> (f64, Vec<f64>) + Sync + 'a;

fn descend(obj: &ValueGrad<'_>, x0: Vec<f64>, max_iters: usize, grad_tol: f64) -> OptRun {
    let mut x = x0;
    let (mut f, mut g) = obj(&x);
    let mut alpha = 1.0 / norm(&g).max(1.0);
    let mut iterations = 0;
    while iterations < max_iters {
        let gn = norm(&g);
        if gn <= grad_tol * f.abs().max(1.0) {
            return OptRun { x, value: f, iterations, grad_norm: gn, converged: true };
        }
        iterations += 1;
        let mut step = alpha;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
            let (fnew, gnew) = obj(&xn);
            if fnew.is_finite() && fnew <= f - 1e-4 * step * gn * gn + 8.0 * f64::EPSILON * f.abs() {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        alpha = if sy > 0.0 { (dot(&s, &s) / sy).min(1e8) } else { (2.0 * step).min(1e8) };
        x = xn;
        f = fnew;
        g = gnew;
    }
    let gn = norm(&g);
    OptRun { x, value: f, iterations, grad_norm: gn, converged: gn <= grad_tol * f.abs().max(1.0) }
}

fn central_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> (f64, Vec<f64>) {
    let v = f(x);
    let mut g = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = tol::FD_STEP * x[i].abs().max(1.0);
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g.push((fp - fm) / (2.0 * h));
    }
    (v, g)
}

/// Runs `restarts` descents in parallel from `x = 0` and Gaussian draws
/// (standard deviation 0.5) on the first `random_dims` coordinates, and
/// returns the lowest value (ties broken by restart index).
fn multistart(obj: &ValueGrad<'_>, dims: usize, random_dims: usize, opts: &SzegoOpts) -> (OptRun, usize) {
    let restarts = opts.restarts.max(1);
    let runs: Vec<OptRun> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut x0 = vec![0.0; dims];
            if r > 0 {
                let mut g = rng::stream(opts.seed, 1000 + r as u64);
                for v in x0.iter_mut().take(random_dims) {
                    *v = 0.5 * rng::gaussian(&mut g);
                }
            }
            descend(obj, x0, opts.max_iters, opts.grad_tol)
        })
        .collect();
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one restart");
    (best, restarts)
}

fn check_input(h: &CMatrix, alg: &SubAlg) -> Result<()> {
    if h.dim() != alg.n() {
        return Err(Error::DimensionMismatch(alg.n(), h.dim()));
    }
    check_psd(h)
}

/// `d = exp(s)` and the spectral decomposition of `s`.
fn d_of(theta: &[f64], basis: &[CMatrix], alg: &SubAlg) -> (CMatrix, EigDecomp) {
    let s = combine(theta, basis, alg.n());
    let eig = herm_eig(&s).expect("combination of Hermitian matrices");
    let d = eig.map(f64::exp).hermitian_part();
    (d, eig)
}

/// `τ(h |a + d|²)` for explicit `a`, `d`.
pub fn l2_objective(h: &CMatrix, a: &CMatrix, d: &CMatrix) -> f64 {
    let x = a + d;
    crate::matcore::trace_state(&(&(h * &x.adjoint()) * &x)).re
}

/// `inf τ(h |a + d|²)` with the inner minimization over `a ∈ A_0` solved
/// exactly as an `h`-weighted projection.
pub fn szego_l2(h: &CMatrix, alg: &SubAlg, opts: &SzegoOpts) -> Result<SzegoResult> {
    check_input(h, alg)?;
    let h = h.hermitian_part();
    let sbasis = traceless_hermitian_basis(alg);
    let inner = Inner::Weighted(h.clone());
    let wbasis = orthonormalize(alg.a0_basis(), &inner);

    // residual x = d − P_h d and its value
    let solve = |theta: &[f64]| {
        let (d, eig) = d_of(theta, &sbasis, alg);
        let mut x = d.clone();
        for e in &wbasis {
            axpy(&mut x, -inner.apply(&d, e), e);
        }
        let value = inner.apply(&x, &x).re;
        (d, eig, x, value)
    };
    let analytic = |theta: &[f64]| {
        let (_, eig, x, value) = solve(theta);
        let m = &h * &x.adjoint();
        let g = dk_adjoint(&eig, &m, exp_divided);
        let grad = sbasis.iter().map(|sk| 2.0 * crate::matcore::trace_state(&(sk * &g)).re).collect();
        (value, grad)
    };
    let fd = |theta: &[f64]| central_difference(&|t: &[f64]| solve(t).3, theta);
    let dims = sbasis.len();
    let (best, restarts_used) = match opts.gradient {
        GradientMode::Analytic => multistart(&analytic, dims, dims, opts),
        GradientMode::CentralDifference => multistart(&fd, dims, dims, opts),
    };
    let (d, _, x, value) = solve(&best.x);
    let argmin_a = alg.project_a0(&(&x - &d));
    Ok(SzegoResult {
        value,
        argmin_a,
        argmin_d: crate::algebra::expectation(&d, alg)?,
        iterations: best.iterations,
        converged: best.converged,
        restarts_used,
        grad_norm: best.grad_norm,
        delta: fk_det(&h),
    })
}

/// `w |L a R|^p` under the trace, raised to `outer`.
struct PowerObjective {
    weight: Option<CMatrix>,
    left: Option<CMatrix>,
    right: Option<CMatrix>,
    p: f64,
    outer: f64,
}

impl PowerObjective {
    fn x_of(&self, a: &CMatrix) -> CMatrix {
        let mut x = a.clone();
        if let Some(l) = &self.left {
            x = l * &x;
        }
        if let Some(r) = &self.right {
            x = &x * r;
        }
        x
    }

    fn value(&self, a: &CMatrix) -> f64 {
        let x = self.x_of(a);
        let sv = crate::matcore::svd(&x);
        let n = x.dim();
        let base = match &self.weight {
            None => sv.sigma.iter().map(|s| s.powf(self.p)).sum::<f64>() / n as f64,
            Some(w) => {
                // τ(w V Σ^p V*)
                let mut t = 0.0;
                for (k, s) in sv.sigma.iter().enumerate() {
                    let col = sv.right.column(k);
                    let wv = w.mat_vec(&col);
                    let q: C64 = col.iter().zip(&wv).map(|(a, b)| a.conj() * b).sum();
                    t += q.re * s.powf(self.p);
                }
                t / n as f64
            }
        };
        base.max(0.0).powf(self.outer)
    }

    /// Value and the matrix `G` with `dF = Re τ(G* da)`.
    fn value_grad(&self, a: &CMatrix) -> (f64, CMatrix) {
        let x = self.x_of(a);
        let n = x.dim();
        let b = (&x.adjoint() * &x).hermitian_part();
        let eig = herm_eig(&b).expect("Gram matrix is Hermitian");
        let e = self.p / 2.0;
        let w = self.weight.clone().unwrap_or_else(|| CMatrix::identity(n));
        let base = self.value_base(&eig, &w);
        let k = dk_adjoint(&eig, &w, power_divided(e)).hermitian_part();
        let mut g = (&x * &k).scale_re(2.0);
        if let Some(l) = &self.left {
            g = &l.adjoint() * &g;
        }
        if let Some(r) = &self.right {
            g = &g * &r.adjoint();
        }
        let base = base.max(f64::MIN_POSITIVE);
        let value = base.powf(self.outer);
        let chain = self.outer * base.powf(self.outer - 1.0);
        (value, g.scale_re(chain))
    }

    fn value_base(&self, eig: &EigDecomp, w: &CMatrix) -> f64 {
        let e = self.p / 2.0;
        let bp = eig.map(|l| l.max(0.0).powf(e));
        crate::matcore::trace_state(&(w * &bp)).re
    }
}

/// Joint parametrization `(θ, Re z, Im z)` with `d = exp(Σ θ_k s_k)` and
/// `a = Σ z_k e_k`.
struct Joint<'a> {
    alg: &'a SubAlg,
    sbasis: Vec<CMatrix>,
    abasis: Vec<CMatrix>,
}

impl<'a> Joint<'a> {
    fn new(alg: &'a SubAlg) -> Self {
        Joint { alg, sbasis: traceless_hermitian_basis(alg), abasis: alg.a0_basis().to_vec() }
    }

    fn dims(&self) -> usize {
        self.sbasis.len() + 2 * self.abasis.len()
    }

    fn split(&self, v: &[f64]) -> (CMatrix, EigDecomp, CMatrix) {
        let m = self.sbasis.len();
        let (d, eig) = d_of(&v[..m], &self.sbasis, self.alg);
        let mut a = CMatrix::zeros(self.alg.n());
        for (k, e) in self.abasis.iter().enumerate() {
            axpy(&mut a, C64::new(v[m + 2 * k], v[m + 2 * k + 1]), e);
        }
        (d, eig, a)
    }

    fn value(&self, obj: &PowerObjective, v: &[f64]) -> f64 {
        let (d, _, a) = self.split(v);
        obj.value(&(&a + &d))
    }

    fn value_grad(&self, obj: &PowerObjective, v: &[f64]) -> (f64, Vec<f64>) {
        let (d, eig, a) = self.split(v);
        let (value, g) = obj.value_grad(&(&a + &d));
        let gd = dk_adjoint(&eig, &g.adjoint(), exp_divided);
        let mut grad: Vec<f64> = self.sbasis.iter().map(|sk| crate::matcore::trace_state(&(sk * &gd)).re).collect();
        let i = C64::new(0.0, 1.0);
        for e in &self.abasis {
            // Re τ(G* e) = Re ⟨e, G⟩
            let c = hs_inner(e, &g).expect("same dimension");
            grad.push(c.re);
            grad.push((c * i).re);
        }
        (value, grad)
    }

    fn run(&self, obj: &PowerObjective, opts: &SzegoOpts, delta: f64) -> Result<SzegoResult> {
        let analytic = |v: &[f64]| self.value_grad(obj, v);
        let fd = |v: &[f64]| central_difference(&|t: &[f64]| self.value(obj, t), v);
        let dims = self.dims();
        let (best, restarts_used) = match opts.gradient {
            GradientMode::Analytic => multistart(&analytic, dims, self.sbasis.len(), opts),
            GradientMode::CentralDifference => multistart(&fd, dims, self.sbasis.len(), opts),
        };
        let (d, _, a) = self.split(&best.x);
        Ok(SzegoResult {
            value: self.value(obj, &best.x),
            argmin_a: self.alg.project_a0(&a),
            argmin_d: crate::algebra::expectation(&d, self.alg)?,
            iterations: best.iterations,
            converged: best.converged,
            restarts_used,
            grad_norm: best.grad_norm,
            delta,
        })
    }
}

fn check_p(p: f64, min: f64) -> Result<()> {
    if p.is_nan() || p < min || p.is_infinite() {
        return Err(Error::InvalidArgument(format!("exponent {p} out of range")));
    }
    Ok(())
}

/// `inf τ(h |a + d|^p)` for `p ≥ 1`.
pub fn szego_l1p(h: &CMatrix, p: f64, alg: &SubAlg, opts: &SzegoOpts) -> Result<SzegoResult> {
    check_input(h, alg)?;
    check_p(p, 1.0)?;
    let h = h.hermitian_part();
    let obj = PowerObjective { weight: Some(h.clone()), left: None, right: None, p, outer: 1.0 };
    Joint::new(alg).run(&obj, opts, fk_det(&h))
}

/// `inf τ(|h^{q/p} a|^p)^{1/q}` and the mirrored `inf τ(|a h^{q/p}|^p)^{1/q}`
/// over `a = a₀ + d`.
pub fn szego_lp_general(h: &CMatrix, p: f64, q: f64, alg: &SubAlg, opts: &SzegoOpts) -> Result<LpGeneralResult> {
    check_input(h, alg)?;
    check_p(p, f64::MIN_POSITIVE)?;
    check_p(q, f64::MIN_POSITIVE)?;
    let h = h.hermitian_part();
    let c = mat_fn(&h, MatFn::Power(q / p))?;
    let delta = fk_det(&h);
    let joint = Joint::new(alg);
    let left = PowerObjective { weight: None, left: Some(c.clone()), right: None, p, outer: 1.0 / q };
    let right = PowerObjective { weight: None, left: None, right: Some(c), p, outer: 1.0 / q };
    Ok(LpGeneralResult { left: joint.run(&left, opts, delta)?, right: joint.run(&right, opts, delta)? })
}

#[derive(Clone, Debug, Serialize)]
pub struct DetZeroOutcome {
    /// `‖c − P c‖_F / ‖c‖_F` for `c = h^{q/p}` and `P` the projection onto
    /// `span(c A_0)`; zero when `c = 0`.
    pub distance: f64,
    pub det: f64,
    /// False only if `Δ(h) > DET_FLOOR·‖h‖` while `distance ≤ DIST_FLOOR`.
    pub consistent: bool,
}

/// Distance from `h^{q/p}` to `span(h^{q/p} A_0)` against `Δ(h)`.
pub fn det_zero_criterion(h: &CMatrix, p: f64, q: f64, alg: &SubAlg) -> Result<DetZeroOutcome> {
    check_input(h, alg)?;
    check_p(p, f64::MIN_POSITIVE)?;
    check_p(q, f64::MIN_POSITIVE)?;
    let h = h.hermitian_part();
    let c = mat_fn(&h, MatFn::Power(q / p))?;
    let det = fk_det(&h);
    let cn = c.frob_norm();
    let distance = if cn == 0.0 {
        0.0
    } else {
        let span = orthonormalize(&alg.a0_basis().iter().map(|a| &c * a).collect::<Vec<_>>(), &Inner::Trace);
        crate::algebra::residual_off(&c, &span).frob_norm() / cn
    };
    let consistent = !(det > tol::DET_FLOOR * h.op_norm() && distance <= tol::DIST_FLOOR);
    Ok(DetZeroOutcome { distance, det, consistent })
}

/// `(w* a, |d|)` for the polar phase `w` of `d`.
pub fn absorb_phase(a: &CMatrix, d: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let pd = polar(d);
    let w = crate::matcore::unitary_extend(&pd.isometry_part)?;
    Ok((&w.adjoint() * a, pd.modulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_element, BlockPartition, Flavor};

    fn quick() -> SzegoOpts {
        SzegoOpts { restarts: 2, ..SzegoOpts::default() }
    }

    #[test]
    fn l2_identity_and_hand_case() {
        let t2 = SubAlg::upper_triangular(2);
        let r = szego_l2(&CMatrix::identity(2), &t2, &quick()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.argmin_d.dist(&CMatrix::identity(2)) < 1e-8);
        let r = szego_l2(&CMatrix::from_real_diag(&[1.0, 4.0]), &t2, &quick()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
        assert!(r.converged);
        assert!(r.argmin_a.max_abs() < 1e-8);
        let d = r.argmin_d.diagonal();
        assert!((d[0].re - 2f64.sqrt()).abs() < 1e-6 && (d[1].re - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(fk_det(&r.argmin_d) >= 1.0 - 1e-9);
    }

    #[test]
    fn l2_random_matches_determinant() {
        for n in 2..=4 {
            for p in BlockPartition::all(n) {
                let alg = SubAlg::block_upper(p.clone());
                let h = random_element(&alg, Flavor::PositiveInvertibleInM, n as u64 * 31, 100.0).unwrap();
                let r = szego_l2(&h, &alg, &quick()).unwrap();
                let tol = opt_tol_for(&alg);
                assert!(r.converged, "{p}");
                assert!((r.value - r.delta).abs() <= tol * r.delta.max(1.0), "{p}: {} vs {}", r.value, r.delta);
                assert!(r.value >= r.delta - tol);
            }
        }
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let alg = SubAlg::block_upper(BlockPartition::parse("1,2").unwrap());
        let h = random_element(&alg, Flavor::PositiveInvertibleInM, 3, 20.0).unwrap();
        let joint = Joint::new(&alg);
        for p in [1.0, 2.0, 3.0] {
            let obj = PowerObjective { weight: Some(h.clone()), left: None, right: None, p, outer: 1.0 };
            let v: Vec<f64> = (0..joint.dims()).map(|k| 0.1 * ((k as f64) * 1.3).sin()).collect();
            let (fa, ga) = joint.value_grad(&obj, &v);
            let (ff, gf) = central_difference(&|t: &[f64]| joint.value(&obj, t), &v);
            assert!((fa - ff).abs() < 1e-12 * ff);
            for (a, b) in ga.iter().zip(&gf) {
                assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "p={p}: {a} vs {b}");
            }
        }
        let c = mat_fn(&h, MatFn::Power(0.5)).unwrap();
        let obj = PowerObjective { weight: None, left: None, right: Some(c), p: 4.0, outer: 0.5 };
        let v: Vec<f64> = (0..joint.dims()).map(|k| 0.2 * ((k as f64) * 0.7).cos()).collect();
        let (_, ga) = joint.value_grad(&obj, &v);
        let (_, gf) = central_difference(&|t: &[f64]| joint.value(&obj, t), &v);
        for (a, b) in ga.iter().zip(&gf) {
            assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn l1p_cases() {
        let t2 = SubAlg::upper_triangular(2);
        let h = CMatrix::from_real_diag(&[1.0, 4.0]);
        let r = szego_l1p(&h, 1.0, &t2, &quick()).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-4 * 2.0, "{}", r.value);
        let r = szego_l1p(&CMatrix::identity(2), 3.0, &t2, &quick()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        let r2 = szego_l1p(&h, 2.0, &t2, &quick()).unwrap();
        let l2 = szego_l2(&h, &t2, &quick()).unwrap();
        assert!((r2.value - l2.value).abs() <= 1e-4 * l2.value);
        let fd = SzegoOpts { gradient: GradientMode::CentralDifference, ..quick() };
        let r = szego_l1p(&h, 1.0, &t2, &fd).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-4 * 2.0);
        assert!(szego_l1p(&h, 0.5, &t2, &quick()).is_err());
    }

    #[test]
    fn lp_general_cases() {
        let t2 = SubAlg::upper_triangular(2);
        let h = CMatrix::from_real_diag(&[1.0, 4.0]);
        let r = szego_lp_general(&h, 4.0, 2.0, &t2, &quick()).unwrap();
        assert!((r.left.value - 2.0).abs() <= 1e-3 * 2.0, "{}", r.left.value);
        assert!((r.right.value - 2.0).abs() <= 1e-3 * 2.0, "{}", r.right.value);
        let r = szego_lp_general(&CMatrix::identity(2), 2.0, 1.0, &t2, &quick()).unwrap();
        assert!((r.left.value - 1.0).abs() < 1e-8);
        let alg = SubAlg::block_upper(BlockPartition::parse("1,1,1").unwrap());
        let h = random_element(&alg, Flavor::PositiveInvertibleInM, 8, 20.0).unwrap();
        let r = szego_lp_general(&h, 2.0, 1.0, &alg, &quick()).unwrap();
        let l2 = szego_l2(&h, &alg, &quick()).unwrap();
        assert!((r.left.value - l2.value).abs() <= 1e-3 * l2.value);
    }

    #[test]
    fn phase_absorption_and_scaling() {
        let alg = SubAlg::block_upper(BlockPartition::parse("2,1").unwrap());
        for seed in 0..10 {
            let h = random_element(&alg, Flavor::PositiveInvertibleInM, seed, 50.0).unwrap();
            let x = random_element(&alg, Flavor::General, seed + 100, 50.0).unwrap();
            let d = crate::algebra::expectation(&x, &alg).unwrap();
            let a = alg.project_a0(&x);
            let f = l2_objective(&h, &a, &d);
            let (wa, md) = absorb_phase(&a, &d).unwrap();
            assert!(alg.contains(&alg.project_a0(&wa)) && alg.project_a0(&wa).dist(&wa) < 1e-12);
            assert!((l2_objective(&h, &wa, &md) - f).abs() <= 1e-12 * f);
            let t = 1.7;
            let ft = l2_objective(&h, &a.scale_re(t), &d.scale_re(t));
            assert!((ft - t * t * f).abs() <= 1e-12 * ft);
        }
    }

    #[test]
    fn det_zero_examples() {
        let t2 = SubAlg::upper_triangular(2);
        let o = det_zero_criterion(&CMatrix::from_real_diag(&[1.0, 4.0]), 2.0, 1.0, &t2).unwrap();
        assert!(o.distance > tol::DIST_FLOOR && o.consistent);
        let o = det_zero_criterion(&CMatrix::zeros(2), 2.0, 1.0, &t2).unwrap();
        assert_eq!((o.distance, o.det), (0.0, 0.0));
        let full = SubAlg::block_upper(BlockPartition::full(2));
        let o = det_zero_criterion(&CMatrix::from_real_diag(&[1.0, 0.0]), 2.0, 1.0, &full).unwrap();
        assert_eq!(o.det, 0.0);
        assert!((o.distance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_control_on_a_neg() {
        let alg = SubAlg::a_neg();
        let h = CMatrix::from_real_rows(&[&[1.0, 0.9, 0.0], &[0.9, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let r = szego_l2(&h, &alg, &quick()).unwrap();
        assert!(r.value > r.delta + 10.0 * opt_tol_for(&alg), "{} vs {}", r.value, r.delta);
    }

    #[test]
    fn restarts_are_deterministic() {
        let alg = SubAlg::upper_triangular(3);
        let h = random_element(&alg, Flavor::PositiveInvertibleInM, 1, 10.0).unwrap();
        let o = SzegoOpts { restarts: 4, seed: 5, ..SzegoOpts::default() };
        let a = szego_l2(&h, &alg, &o).unwrap();
        let b = szego_l2(&h, &alg, &o).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.argmin_d, b.argmin_d);
        assert_eq!(a.restarts_used, 4);
    }
}
