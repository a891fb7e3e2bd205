//! Kernel and rank computations shared by the exact and floating paths.
//!
//! Exact systems are eliminated sparsely, row by row, into reduced echelon
//! form; the kernel basis is then read off with an identity block on the free
//! columns. Floating systems go through an SVD and refuse to decide a rank when
//! a singular value sits within one decade of the threshold.

use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Sparse row: `(column, value)` pairs, strictly increasing in column, no stored zeros.
pub type SparseRow<F> = Vec<(usize, F)>;

/// Computes `row - factor * pivot` on sorted sparse rows.
fn sub_scaled<F: Field>(row: &[(usize, F)], factor: &F, pivot: &[(usize, F)]) -> SparseRow<F> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < pivot.len() {
        let take_row = b >= pivot.len() || (a < row.len() && row[a].0 < pivot[b].0);
        let take_pivot = a >= row.len() || (b < pivot.len() && pivot[b].0 < row[a].0);
        if take_row {
            out.push(row[a].clone());
            a += 1;
        } else if take_pivot {
            let v = -(factor.clone() * pivot[b].1.clone());
            if !v.is_zero() {
                out.push((pivot[b].0, v));
            }
            b += 1;
        } else {
            let v = row[a].1.clone() - factor.clone() * pivot[b].1.clone();
            if !v.is_zero() {
                out.push((row[a].0, v));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

/// Incremental exact row echelon form.
#[derive(Debug, Clone)]
pub struct Echelon<F> {
    ncols: usize,
    // leading column -> row normalized to a leading 1
    pivots: BTreeMap<usize, SparseRow<F>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Adds a row; returns `true` when it was independent of the rows seen so far.
    pub fn insert(&mut self, mut row: SparseRow<F>) -> bool {
        row.retain(|(c, v)| {
            debug_assert!(*c < self.ncols);
            !v.is_zero()
        });
        row.sort_by_key(|(c, _)| *c);
        self.reduce(&mut row, 0);
        let Some((lead, lead_value)) = row.first().cloned() else {
            return false;
        };
        let inv = F::one() / lead_value;
        for entry in row.iter_mut().skip(1) {
            entry.1 = entry.1.clone() * inv.clone();
        }
        row[0].1 = F::one();
        self.pivots.insert(lead, row);
        true
    }

    fn reduce(&self, row: &mut SparseRow<F>, start: usize) {
        let mut pos = start;
        while pos < row.len() {
            match self.pivots.get(&row[pos].0) {
                Some(pivot) => {
                    let factor = row[pos].1.clone();
                    *row = sub_scaled(row, &factor, pivot);
                }
                None => pos += 1,
            }
        }
    }

    /// Back-substitutes so that every pivot column is zero outside its own row.
    fn into_reduced(mut self) -> BTreeMap<usize, SparseRow<F>> {
        let leads: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for lead in leads {
            let mut row = self.pivots.remove(&lead).expect("pivot present");
            self.reduce(&mut row, 1);
            self.pivots.insert(lead, row);
        }
        self.pivots
    }

    /// Rows of the reduced echelon form, ordered by leading column.
    pub fn into_reduced_rows(self) -> Vec<SparseRow<F>> {
        self.into_reduced().into_values().collect()
    }

    /// Kernel basis with an identity block on the free columns, ordered by free column.
    pub fn kernel_basis(self) -> Vec<SparseRow<F>> {
        let ncols = self.ncols;
        let reduced = self.into_reduced();
        let mut kernel: BTreeMap<usize, SparseRow<F>> = (0..ncols)
            .filter(|c| !reduced.contains_key(c))
            .map(|c| (c, vec![(c, F::one())]))
            .collect();
        for (&lead, row) in &reduced {
            for (col, value) in row.iter().skip(1) {
                kernel
                    .get_mut(col)
                    .expect("non-leading entries of a reduced row are free columns")
                    .push((lead, -value.clone()));
            }
        }
        kernel
            .into_values()
            .map(|mut v| {
                v.sort_by_key(|(c, _)| *c);
                v
            })
            .collect()
    }
}

/// Kernel basis in reduced echelon form (rows ordered by leading column).
pub fn exact_kernel<F: Field>(rows: Vec<SparseRow<F>>, ncols: usize) -> Vec<SparseRow<F>> {
    let mut system = Echelon::new(ncols);
    for row in rows {
        system.insert(row);
    }
    let mut normalized = Echelon::new(ncols);
    for v in system.kernel_basis() {
        normalized.insert(v);
    }
    normalized.into_reduced_rows()
}

/// Result of a thresholded SVD: numerical rank and an orthonormal kernel basis.
struct SvdSplit<F> {
    rank: usize,
    kernel: Vec<Vec<F>>,
}

fn svd_split<F>(rows: &[SparseRow<F>], ncols: usize, tol: f64) -> Result<SvdSplit<F>>
where
    F: ComplexField<RealField = f64> + Copy,
{
    if ncols == 0 {
        return Ok(SvdSplit {
            rank: 0,
            kernel: Vec::new(),
        });
    }
    let nrows = rows.len().max(ncols);
    let mut dense = DMatrix::<F>::zeros(nrows, ncols);
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            dense[(r, c)] = v;
        }
    }
    let svd = dense.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        let kernel = (0..ncols)
            .map(|c| {
                let mut v = vec![F::zero(); ncols];
                v[c] = F::one();
                v
            })
            .collect();
        return Ok(SvdSplit { rank: 0, kernel });
    }
    let threshold = tol * sigma_max;
    let mut rank = 0;
    let mut kernel = Vec::new();
    for (idx, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > threshold / 10.0 && sigma < threshold * 10.0 {
            return Err(Error::RankAmbiguity { sigma, threshold });
        }
        if sigma >= threshold * 10.0 {
            rank += 1;
        } else {
            kernel.push(v_t.row(idx).iter().map(|x| x.conjugate()).collect());
        }
    }
    // v_t has min(nrows, ncols) = ncols rows, so every column direction is accounted for
    debug_assert_eq!(rank + kernel.len(), ncols);
    Ok(SvdSplit { rank, kernel })
}

/// Numerical rank of a sparse floating system.
pub fn svd_rank<F>(rows: &[SparseRow<F>], ncols: usize, tol: f64) -> Result<usize>
where
    F: ComplexField<RealField = f64> + Copy,
{
    svd_split(rows, ncols, tol).map(|s| s.rank)
}

/// Kernel of a sparse floating system, normalized to reduced echelon form.
pub fn svd_kernel<F>(rows: &[SparseRow<F>], ncols: usize, tol: f64) -> Result<Vec<SparseRow<F>>>
where
    F: ComplexField<RealField = f64> + Copy,
{
    let split = svd_split(rows, ncols, tol)?;
    let mut basis = split.kernel;
    rref_float(&mut basis, ncols, tol);
    Ok(basis
        .into_iter()
        .map(|v| {
            v.into_iter()
                .enumerate()
                .filter(|(_, x)| x.modulus() > tol)
                .collect()
        })
        .collect())
}

/// In-place reduced echelon form with partial pivoting; rows are linearly independent on entry.
fn rref_float<F>(rows: &mut [Vec<F>], ncols: usize, tol: f64)
where
    F: ComplexField<RealField = f64> + Copy,
{
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let (best, best_mod) = (r..rows.len())
            .map(|i| (i, rows[i][c].modulus()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_mod <= tol {
            continue;
        }
        rows.swap(r, best);
        let inv = F::one() / rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            let factor = row[c];
            if i != r && factor.modulus() > 0.0 {
                for (x, &p) in row.iter_mut().zip(&pivot) {
                    *x -= factor * p;
                }
            }
        }
        r += 1;
    }
}
