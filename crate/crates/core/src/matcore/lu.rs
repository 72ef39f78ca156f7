use super::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

// Doolittle elimination with partial pivoting; exact zero pivots mark the
// matrix singular.
fn factor(x: &CMatrix) -> Lu {
    let n = x.dim();
    let mut lu = x.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut singular = false;
    for k in 0..n {
        let (piv, best) =
            (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if best == 0.0 {
            singular = true;
            continue;
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / d;
            lu[(i, k)] = m;
            if m == ZERO {
                continue;
            }
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= m * t;
            }
        }
    }
    Lu { lu, perm, sign, singular }
}

/// Ordinary determinant via LU with partial pivoting.
pub fn determinant(x: &CMatrix) -> C64 {
    let f = factor(x);
    if f.singular {
        return ZERO;
    }
    let mut d = C64::new(f.sign, 0.0);
    for i in 0..x.dim() {
        d *= f.lu[(i, i)];
    }
    d
}

fn solve_factored(f: &Lu, b: &[C64]) -> Vec<C64> {
    let n = b.len();
    let mut y: Vec<C64> = f.perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for k in 0..i {
            let t = f.lu[(i, k)] * y[k];
            y[i] -= t;
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let t = f.lu[(i, k)] * y[k];
            y[i] -= t;
        }
        y[i] /= f.lu[(i, i)];
    }
    y
}

/// Solves `x v = b`.
pub fn solve_vec(x: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let f = factor(x);
    if f.singular {
        return Err(Error::Singular("linear solve with singular matrix".into()));
    }
    Ok(solve_factored(&f, b))
}

pub fn inverse(x: &CMatrix) -> Result<CMatrix> {
    let n = x.dim();
    let f = factor(x);
    if f.singular {
        return Err(Error::Singular("inverse of singular matrix".into()));
    }
    let mut inv = CMatrix::zeros(n);
    let mut e = vec![ZERO; n];
    for j in 0..n {
        e.iter_mut().for_each(|z| *z = ZERO);
        e[j] = ONE;
        inv.set_column(j, &solve_factored(&f, &e));
    }
    Ok(inv)
}
