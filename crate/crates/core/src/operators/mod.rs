//! Truncated matrices of T_g, M_{g′}, M_{g″}, M_{z^j} and Q_μ in orthonormal
//! monomial bases, with certificates for the dropped part.

mod assemble;
mod io;
mod tail;
mod toeplitz;

pub use assemble::{
    assemble_mgprime, assemble_mgprime_in, assemble_mgsecond, assemble_mgsecond_in, assemble_monomial_multiplication,
    assemble_tg, assemble_tg_in,
};
pub use io::{read_binary, read_csv_triplets, write_binary, write_csv_triplets, MATRIX_MAGIC, MATRIX_VERSION};
pub use tail::{truncation_report, FarDecay, TailModel, TruncationReport};
pub use toeplitz::{assemble_toeplitz, assemble_toeplitz_in};

use crate::hyperbolic::MeasureRep;
use crate::spaces::{SpaceParams, Symbol};
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    IntegrationTg,
    MultiplicationGprime,
    MultiplicationGsecond,
    MultiplicationMonomial(usize),
    ToeplitzQmu,
}

/// Target space of an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Codomain {
    Dirichlet(SpaceParams),
    /// A²_β with basis z^n/‖z^n‖_{A²_β}.
    Bergman(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorInput {
    Symbol(Symbol),
    Measure(MeasureRep),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub input: OperatorInput,
    pub domain: SpaceParams,
    pub codomain: Codomain,
    /// Largest basis index kept; matrices are (N+1)×(N+1).
    pub n: usize,
}

impl OperatorSpec {
    pub fn symbol(&self) -> Option<&Symbol> {
        match &self.input {
            OperatorInput::Symbol(s) => Some(s),
            OperatorInput::Measure(_) => None,
        }
    }
}

/// Matrix storage: dense, or a set of lower diagonals `row = col + offset`.
#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Dense(DMatrix<Complex64>),
    Diagonals {
        dim: usize,
        /// (offset, values indexed by column)
        diags: Vec<(usize, Vec<Complex64>)>,
    },
}

impl Entries {
    pub fn dim(&self) -> usize {
        match self {
            Entries::Dense(m) => m.nrows(),
            Entries::Diagonals { dim, .. } => *dim,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match self {
            Entries::Dense(m) => m[(row, col)],
            Entries::Diagonals { diags, .. } => {
                if row < col {
                    return Complex64::new(0.0, 0.0);
                }
                let off = row - col;
                diags
                    .iter()
                    .find(|(o, _)| *o == off)
                    .map(|(_, v)| v[col])
                    .unwrap_or(Complex64::new(0.0, 0.0))
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            Entries::Dense(m) => m.clone(),
            Entries::Diagonals { dim, diags } => {
                let mut m = DMatrix::from_element(*dim, *dim, Complex64::new(0.0, 0.0));
                for (off, v) in diags {
                    for (col, x) in v.iter().enumerate() {
                        if col + off < *dim {
                            m[(col + off, col)] += *x;
                        }
                    }
                }
                m
            }
        }
    }

    /// Nonzero entries in column-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        let d = self.dim();
        let mut out = Vec::new();
        match self {
            Entries::Dense(m) => {
                for col in 0..d {
                    for row in 0..d {
                        let v = m[(row, col)];
                        if v != Complex64::new(0.0, 0.0) {
                            out.push((row, col, v));
                        }
                    }
                }
            }
            Entries::Diagonals { diags, .. } => {
                for col in 0..d {
                    let mut col_entries: Vec<(usize, Complex64)> = diags
                        .iter()
                        .filter(|(o, _)| col + o < d)
                        .map(|(o, v)| (col + o, v[col]))
                        .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
                        .collect();
                    col_entries.sort_by_key(|e| e.0);
                    out.extend(col_entries.into_iter().map(|(r, v)| (r, col, v)));
                }
            }
        }
        out
    }

    pub fn is_real(&self) -> bool {
        match self {
            Entries::Dense(m) => m.iter().all(|v| v.im == 0.0),
            Entries::Diagonals { diags, .. } => diags.iter().all(|(_, v)| v.iter().all(|x| x.im == 0.0)),
        }
    }

    pub fn all_finite(&self) -> bool {
        let ok = |v: &Complex64| v.re.is_finite() && v.im.is_finite();
        match self {
            Entries::Dense(m) => m.iter().all(ok),
            Entries::Diagonals { diags, .. } => diags.iter().all(|(_, v)| v.iter().all(ok)),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        crate::special::compensated_sum(self.triplets().into_iter().map(|t| t.2.norm_sqr()))
    }

    /// Column norms ‖A e_k‖.
    pub fn column_norms(&self) -> Vec<f64> {
        let d = self.dim();
        let mut s = vec![0.0; d];
        for (_, col, v) in self.triplets() {
            s[col] += v.norm_sqr();
        }
        s.into_iter().map(f64::sqrt).collect()
    }

    /// y = A x.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        let mut y = vec![Complex64::new(0.0, 0.0); d];
        match self {
            Entries::Dense(m) => {
                for col in 0..d {
                    let xc = x[col];
                    if xc == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for row in 0..d {
                        y[row] += m[(row, col)] * xc;
                    }
                }
            }
            Entries::Diagonals { diags, .. } => {
                for (off, v) in diags {
                    for col in 0..d.saturating_sub(*off) {
                        y[col + off] += v[col] * x[col];
                    }
                }
            }
        }
        y
    }

    /// Single nonzero lower diagonal, if that is the whole structure.
    pub fn single_diagonal(&self) -> Option<(usize, Vec<Complex64>)> {
        match self {
            Entries::Diagonals { dim, diags } if diags.len() == 1 => {
                let (off, v) = &diags[0];
                let keep = dim.saturating_sub(*off);
                Some((*off, v[..keep].to_vec()))
            }
            _ => None,
        }
    }
}

/// Assembled operator together with its truncation metadata.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub entries: Entries,
    pub spec: OperatorSpec,
    /// Largest lower offset with a nonzero diagonal, for banded storage.
    pub bandwidth: Option<usize>,
    /// Bound on the squared Frobenius norm of everything outside the block.
    pub tail_certificate: f64,
    pub tail: TailModel,
    /// Set when the symbol was constant (T_g = 0).
    pub constant_symbol: bool,
    pub warnings: Vec<String>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}
