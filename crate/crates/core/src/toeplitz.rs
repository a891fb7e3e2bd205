//! Truncated matrices of analytic Toeplitz operators `F ↦ Θ·F` for matrix-polynomial symbols.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{flat_index, TruncationParams};
use crate::matrix::DenseMatrix;
use crate::scalar::{RawNumber, Scalar};

/// `Θ(z) = Σ_t C_t z^t` with `m×m` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSymbol<T> {
    m: usize,
    coeffs: BTreeMap<usize, DenseMatrix<T>>,
}

impl<T: Scalar> MatrixSymbol<T> {
    pub fn new(m: usize, coeffs: Vec<(usize, DenseMatrix<T>)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Symbol("symbol size m must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (t, c) in coeffs {
            if c.rows() != m || c.cols() != m {
                return Err(Error::Shape(format!(
                    "coefficient of z^{t} is {}x{}, expected {m}x{m}",
                    c.rows(),
                    c.cols()
                )));
            }
            if map.insert(t, c).is_some() {
                return Err(Error::Symbol(format!("power z^{t} listed twice")));
            }
        }
        Ok(MatrixSymbol { m, coeffs: map })
    }

    /// `z^t · I_m`.
    pub fn monomial(m: usize, t: usize) -> Self {
        MatrixSymbol {
            m,
            coeffs: BTreeMap::from([(t, DenseMatrix::identity(m))]),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Highest power with a stored coefficient (0 for the empty symbol).
    pub fn degree(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (usize, &DenseMatrix<T>)> {
        self.coeffs.iter().map(|(&t, c)| (t, c))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SymbolFile =
            serde_json::from_str(text).map_err(|e| Error::Symbol(e.to_string()))?;
        let mut coeffs = Vec::with_capacity(file.coeffs.len());
        for term in file.coeffs {
            let rows = term
                .matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| Ok(T::from_parts(T::parse_real(&e.re)?, T::parse_real(&e.im)?)))
                        .collect::<Result<Vec<T>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            coeffs.push((term.t, DenseMatrix::from_rows(rows)?));
        }
        Self::new(file.m, coeffs)
    }
}

/// On-disk symbol format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFile {
    pub m: usize,
    pub coeffs: Vec<SymbolTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub t: usize,
    pub matrix: Vec<Vec<SymbolEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub re: RawNumber,
    #[serde(default)]
    pub im: RawNumber,
}

/// `L×L` truncated unilateral shift: ones at `(k+1, k)`.
pub fn scalar_shift<T: Scalar>(len: usize) -> DenseMatrix<T> {
    DenseMatrix::from_unit_entries(len, (0..len.saturating_sub(1)).map(|k| (k + 1, k)))
}

/// Matrix of `F ↦ Θ·F` compressed to degrees below `N`; block `(p+t, p)` is `C_t`.
pub fn toeplitz_matrix<T: Scalar>(
    symbol: &MatrixSymbol<T>,
    params: &TruncationParams,
) -> Result<DenseMatrix<T>> {
    if symbol.m != params.m() {
        return Err(Error::Shape(format!(
            "symbol has size {} but the space has m = {}",
            symbol.m,
            params.m()
        )));
    }
    let m = params.m();
    let cutoff = params.degree_cutoff();
    let mut out = DenseMatrix::zeros(params.dim(), params.dim());
    for (&t, c) in &symbol.coeffs {
        for p in 0..cutoff.saturating_sub(t) {
            for row in 1..=m {
                for col in 1..=m {
                    let v = &c[(row - 1, col - 1)];
                    if !v.is_zero() {
                        out[(flat_index(row, p + t, params)?, flat_index(col, p, params)?)] =
                            v.clone();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Matrix of multiplication by `z` on the truncated `C^m`-valued space.
pub fn vector_shift<T: Scalar>(params: &TruncationParams) -> DenseMatrix<T> {
    power_of_z(params, 1)
}

/// Matrix of `T_{z^n}`.
pub fn power_symbol<T: Scalar>(params: &TruncationParams) -> DenseMatrix<T> {
    power_of_z(params, params.n())
}

fn power_of_z<T: Scalar>(params: &TruncationParams, t: usize) -> DenseMatrix<T> {
    let m = params.m();
    let cutoff = params.degree_cutoff();
    DenseMatrix::from_unit_entries(
        params.dim(),
        (0..cutoff.saturating_sub(t))
            .flat_map(|p| (0..m).map(move |i| ((p + t) * m + i, p * m + i))),
    )
}

/// Checks `T_z·T_Θ = T_Θ·T_z` on the columns of degree `p ≤ N − 2 − deg Θ`, the range
/// where neither product is affected by compression.
pub fn commutes_with_shift_on_window<T: Scalar>(
    operator: &DenseMatrix<T>,
    symbol_degree: usize,
    params: &TruncationParams,
    tol: f64,
) -> Result<bool> {
    let shift = vector_shift::<T>(params);
    let diff = shift.commutator(operator)?;
    let window = params.degree_cutoff().saturating_sub(symbol_degree + 1);
    let cols = window * params.m();
    let rows: Vec<usize> = (0..params.dim()).collect();
    let cols: Vec<usize> = (0..cols).collect();
    Ok(diff.submatrix(&rows, &cols).is_zero_matrix(tol))
}
