//! JSON formats for matrices, algebras and subspaces.
//!
//! Matrix: `{"n": 2, "entries": [[[re, im], [re, im]], [[re, im], [re, im]]]}`,
//! row-major. Algebra: `{"n": 3, "kind": "block_upper", "partition": [2, 1]}`
//! or `{"kind": "explicit", "basis": [matrix, ...]}`. Subspace:
//! `{"n": 2, "basis": [matrix, ...]}`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraKind, BlockPartition, SubAlg};
use crate::beurling::Subspace;
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.dim();
        let entries = (0..n).map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        MatrixFile { n, entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        self.to_matrix_at("")
    }

    fn to_matrix_at(&self, ctx: &str) -> Result<CMatrix> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Shape(format!("{ctx}n must be at least 1")));
        }
        if self.entries.len() != n {
            return Err(Error::Shape(format!("{ctx}expected {n} rows, found {}", self.entries.len())));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("{ctx}row {i}: expected {n} entries, found {}", row.len())));
            }
            for (j, [re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::Shape(format!("{ctx}entry ({i}, {j}) is not finite")));
                }
                data.push(C64::new(*re, *im));
            }
        }
        CMatrix::from_vec(n, data)
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Shape(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let f: MatrixFile = serde_json::from_str(text).map_err(json_error)?;
    f.to_matrix()
}

pub fn matrix_to_json(m: &CMatrix) -> serde_json::Value {
    serde_json::to_value(MatrixFile::from_matrix(m)).expect("matrix serializes")
}

/// `diag:1,4` or `id:3`; `None` if `arg` is not a shorthand.
pub fn parse_shorthand(arg: &str) -> Option<Result<CMatrix>> {
    if let Some(rest) = arg.strip_prefix("diag:") {
        let vals: std::result::Result<Vec<f64>, _> = rest.split(',').map(|t| t.trim().parse::<f64>()).collect();
        return Some(match vals {
            Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(CMatrix::from_real_diag(&v)),
            Ok(_) => Err(Error::Shape(format!("{arg:?}: diagonal must be nonempty and finite"))),
            Err(e) => Err(Error::Shape(format!("{arg:?}: {e}"))),
        });
    }
    if let Some(rest) = arg.strip_prefix("id:") {
        return Some(match rest.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(CMatrix::identity(n)),
            Ok(_) => Err(Error::Shape(format!("{arg:?}: dimension must be at least 1"))),
            Err(e) => Err(Error::Shape(format!("{arg:?}: {e}"))),
        });
    }
    None
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraFile {
    BlockUpper {
        #[serde(default)]
        n: Option<usize>,
        partition: Vec<usize>,
    },
    Explicit {
        #[serde(default)]
        n: Option<usize>,
        basis: Vec<MatrixFile>,
    },
}

impl AlgebraFile {
    pub fn describe(alg: &SubAlg) -> Self {
        match alg.kind() {
            AlgebraKind::BlockUpper(p) => AlgebraFile::BlockUpper { n: Some(p.n()), partition: p.sizes().to_vec() },
            AlgebraKind::Explicit(g) => {
                AlgebraFile::Explicit { n: Some(alg.n()), basis: g.iter().map(MatrixFile::from_matrix).collect() }
            }
        }
    }

    pub fn build(&self) -> Result<SubAlg> {
        match self {
            AlgebraFile::BlockUpper { n, partition } => {
                let p = BlockPartition::new(partition.clone())?;
                if let Some(n) = n {
                    if *n != p.n() {
                        return Err(Error::InvalidPartition(format!("partition sums to {}, but n = {n}", p.n())));
                    }
                }
                Ok(SubAlg::block_upper(p))
            }
            AlgebraFile::Explicit { n, basis } => {
                let mats = basis
                    .iter()
                    .enumerate()
                    .map(|(k, m)| m.to_matrix_at(&format!("basis[{k}]: ")))
                    .collect::<Result<Vec<_>>>()?;
                let dim = match (n, mats.first()) {
                    (Some(n), _) => *n,
                    (None, Some(m)) => m.dim(),
                    (None, None) => return Err(Error::Shape("explicit algebra needs n or a basis".into())),
                };
                if let Some((k, m)) = mats.iter().enumerate().find(|(_, m)| m.dim() != dim) {
                    return Err(Error::Shape(format!("basis[{k}]: dimension {} differs from n = {dim}", m.dim())));
                }
                SubAlg::explicit(dim, mats)
            }
        }
    }
}

pub fn parse_algebra(text: &str) -> Result<SubAlg> {
    let f: AlgebraFile = serde_json::from_str(text).map_err(json_error)?;
    f.build()
}

pub fn algebra_to_json(alg: &SubAlg) -> serde_json::Value {
    serde_json::to_value(AlgebraFile::describe(alg)).expect("descriptor serializes")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceFile {
    pub n: usize,
    pub basis: Vec<MatrixFile>,
}

pub fn parse_subspace(text: &str) -> Result<Subspace> {
    let f: SubspaceFile = serde_json::from_str(text).map_err(json_error)?;
    let mats = f
        .basis
        .iter()
        .enumerate()
        .map(|(k, m)| m.to_matrix_at(&format!("basis[{k}]: ")))
        .collect::<Result<Vec<_>>>()?;
    if let Some((k, m)) = mats.iter().enumerate().find(|(_, m)| m.dim() != f.n) {
        return Err(Error::Shape(format!("basis[{k}]: dimension {} differs from n = {}", m.dim(), f.n)));
    }
    Subspace::span(f.n, &mats)
}

pub fn subspace_to_json(k: &Subspace) -> serde_json::Value {
    let f = SubspaceFile { n: k.n(), basis: k.basis().iter().map(MatrixFile::from_matrix).collect() };
    serde_json::to_value(f).expect("subspace serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(3, |i, j| C64::new(i as f64 - 0.5, j as f64 * 1e-300));
        let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        assert_eq!(parse_matrix(&text).unwrap(), m);
    }

    #[test]
    fn malformed_matrices_name_the_location() {
        let e = parse_matrix(r#"{"n": 2, "entries": [[[1,0],[0,0]], [[0,0]]]}"#).unwrap_err();
        assert!(e.to_string().contains("row 1"), "{e}");
        let e = parse_matrix(r#"{"n": 2, "entries": [[[1,0],[0,0]]"#).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        assert!(parse_matrix(r#"{"n": 0, "entries": []}"#).is_err());
        assert!(parse_matrix(r#"{"n": 1, "entries": [[[1,0]]], "extra": 1}"#).is_err());
    }

    #[test]
    fn shorthands() {
        assert_eq!(parse_shorthand("diag:1,4").unwrap().unwrap(), CMatrix::from_real_diag(&[1.0, 4.0]));
        assert_eq!(parse_shorthand("id:3").unwrap().unwrap(), CMatrix::identity(3));
        assert!(parse_shorthand("id:0").unwrap().is_err());
        assert!(parse_shorthand("diag:1,x").unwrap().is_err());
        assert!(parse_shorthand("b.json").is_none());
    }

    #[test]
    fn algebra_descriptors() {
        let a = parse_algebra(r#"{"n": 3, "kind": "block_upper", "partition": [2, 1]}"#).unwrap();
        assert_eq!(a.partition().unwrap().sizes(), &[2, 1]);
        assert!(parse_algebra(r#"{"n": 4, "kind": "block_upper", "partition": [2, 1]}"#).is_err());
        let neg = SubAlg::a_neg();
        let text = serde_json::to_string(&algebra_to_json(&neg)).unwrap();
        let back = parse_algebra(&text).unwrap();
        assert_eq!(back.dim_a(), 4);
        assert!(parse_algebra(r#"{"kind": "explicit", "basis": []}"#).is_err());
    }

    #[test]
    fn subspace_round_trip() {
        let k = Subspace::span(2, &[CMatrix::unit(2, 0, 0), CMatrix::unit(2, 0, 1)]).unwrap();
        let text = serde_json::to_string(&subspace_to_json(&k)).unwrap();
        let back = parse_subspace(&text).unwrap();
        assert!(back.distance(&k) < 1e-15);
    }
}
