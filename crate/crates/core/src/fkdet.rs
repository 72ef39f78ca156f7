//! Fuglede-Kadison determinant `Δ(f) = exp τ(log |f|)`.

use crate::algebra::SubAlg;
use crate::error::{Error, Result};
use crate::matcore::{herm_eig, mat_fn, singular_values, CMatrix, MatFn};
use crate::report::{SuiteReport, SuiteRun};
use crate::rng;
use crate::tol;

/// Geometric mean of the singular values; zero when any singular value is
/// at most `RANK_TOL · σ_max`.
pub fn fk_det(f: &CMatrix) -> f64 {
    let s = singular_values(f);
    let top = s[0];
    if top == 0.0 || s.iter().any(|&x| x <= tol::RANK_TOL * top) {
        return 0.0;
    }
    let mean_log = s.iter().map(|x| x.ln()).sum::<f64>() / s.len() as f64;
    mean_log.exp()
}

/// `Δ(|f| + ε·1)`, which decreases to `Δ(f)` as `ε ↓ 0`.
pub fn fk_det_regularized(f: &CMatrix, eps: f64) -> f64 {
    let s = singular_values(f);
    let mean_log = s.iter().map(|x| (x + eps).ln()).sum::<f64>() / s.len() as f64;
    mean_log.exp()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Residuals of the four determinant axioms on one seeded instance, plus the
/// `|det|^{1/n}` cross-check. Every entry should be at most `REL_TOL_DET`.
#[derive(Clone, Debug, Default)]
pub struct AxiomResiduals {
    pub adjoint_modulus: f64,
    pub monotone: f64,
    pub power: f64,
    pub multiplicative: f64,
    pub oracle: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        [self.adjoint_modulus, self.monotone, self.power, self.multiplicative, self.oracle]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn positive(n: usize, rng: &mut impl rand::Rng, cond: f64) -> CMatrix {
    let g = rng::gaussian_matrix(n, rng);
    let e = herm_eig(&(&g * &g.adjoint()).hermitian_part()).expect("Gram matrix is Hermitian");
    let lo = e.values[0].max(0.0);
    let hi = e.values[n - 1];
    let shift = if hi <= cond * lo { 0.0 } else { (hi - cond * lo) / (cond - 1.0) };
    e.map(|l| l.max(0.0) + shift).hermitian_part()
}

pub fn axiom_instance(seed: u64, index: u64, n: usize) -> AxiomResiduals {
    let mut r = rng::stream(seed, index);
    let h = rng::gaussian_matrix(n, &mut r);
    let b = rng::gaussian_matrix(n, &mut r);
    let mut out = AxiomResiduals::default();

    let dh = fk_det(&h);
    let modulus = crate::matcore::polar(&h).modulus;
    out.adjoint_modulus = rel_err(dh, fk_det(&h.adjoint())).max(rel_err(dh, fk_det(&modulus)));

    let g = positive(n, &mut r, 1e3);
    let extra = {
        let x = rng::gaussian_matrix(n, &mut r);
        (&x * &x.adjoint()).hermitian_part().scale_re(0.5)
    };
    let hg = &g + &extra;
    let (dhg, dg) = (fk_det(&hg), fk_det(&g));
    out.monotone = ((dg - dhg) / dhg).max(0.0);

    let p = positive(n, &mut r, 50.0);
    let dp = fk_det(&p);
    for q in [0.5, 2.0, 3.0] {
        let pq = mat_fn(&p, MatFn::Power(q)).expect("positive input");
        out.power = out.power.max(rel_err(fk_det(&pq), dp.powf(q)));
    }

    let db = fk_det(&b);
    let prod = dh * db;
    out.multiplicative = rel_err(fk_det(&(&h * &b)), prod).max(rel_err(fk_det(&(&b * &h)), prod));

    let lu = crate::matcore::determinant(&h).norm().powf(1.0 / n as f64);
    out.oracle = rel_err(dh, lu);
    out
}

/// Random-instance check of `Δ(h) = Δ(h*) = Δ(|h|)`, monotonicity,
/// `Δ(h^q) = Δ(h)^q` and multiplicativity.
pub fn det_axiom_suite(seed: u64, n: usize, trials: usize) -> Result<SuiteReport> {
    if trials == 0 || n == 0 {
        return Err(Error::InvalidArgument("trials and n must be positive".into()));
    }
    let mut run = SuiteRun::new(
        "det-axioms",
        "determinant axioms: adjoint and modulus invariance, monotonicity, powers, multiplicativity",
    );
    for i in 0..trials {
        let res = axiom_instance(seed, i as u64, n);
        let m = res.max();
        run.record(m <= tol::REL_TOL_DET, m);
    }
    Ok(run.finish())
}

/// Symmetric geometric grid in `(-1, 1) \ {0}`: magnitudes from `0.5` down
/// to `1e-8`, each tried with `+t` before `-t`.
fn ah_grid(points: usize) -> Vec<f64> {
    let m = (points / 2).max(1);
    let ratio = if m > 1 { (1e-8f64 / 0.5).powf(1.0 / (m - 1) as f64) } else { 1.0 };
    let mut out = Vec::with_capacity(2 * m);
    let mut t = 0.5;
    for _ in 0..m {
        out.push(t);
        out.push(-t);
        t *= ratio;
    }
    out
}

/// First grid point `t` with `Δ(1 − t h) < 1 − AH_MARGIN`, refining the grid
/// up to `AH_GRID_MAX` points. `None` for `h = 0`.
pub fn arens_hoffman_witness(h: &CMatrix, alg: &SubAlg, grid: usize) -> Result<Option<f64>> {
    if h.dim() != alg.n() {
        return Err(Error::DimensionMismatch(alg.n(), h.dim()));
    }
    let defect = h.hermitian_defect();
    if defect > tol::TOL_HERM {
        return Err(Error::NotHermitian { defect });
    }
    if h.max_abs() == 0.0 {
        return Ok(None);
    }
    let one = CMatrix::identity(h.dim());
    let mut points = grid.max(2);
    loop {
        for t in ah_grid(points) {
            if fk_det(&(&one - &h.scale_re(t))) < 1.0 - tol::AH_MARGIN {
                return Ok(Some(t));
            }
        }
        if points >= tol::AH_GRID_MAX {
            return Ok(None);
        }
        points = (points * 2).min(tol::AH_GRID_MAX);
    }
}
