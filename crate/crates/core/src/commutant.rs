//! Commutants by brute force: the kernel of `P ↦ AP − PA` on vectorized `P`.
//!
//! `P` is vectorized row-major (`P_{rs}` is unknown `r·d + s`). The self-adjoint
//! variant works over the reals with one unknown per diagonal entry and two
//! (real and imaginary part) per strictly upper entry.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::SparseRow;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CommutantBasis<T> {
    pub operator_dim: usize,
    pub basis: Vec<DenseMatrix<T>>,
}

impl<T> CommutantBasis<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn require_square<T: Scalar>(a: &DenseMatrix<T>) -> Result<usize> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(Error::Shape(format!(
            "operator must be square, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}

/// Nonzero pattern of `A`: per row the nonzero columns, per column the nonzero rows.
struct Pattern {
    by_row: Vec<Vec<usize>>,
    by_col: Vec<Vec<usize>>,
}

impl Pattern {
    fn of<T: Scalar>(a: &DenseMatrix<T>) -> Self {
        let d = a.rows();
        let mut by_row = vec![Vec::new(); d];
        let mut by_col = vec![Vec::new(); d];
        for r in 0..d {
            for c in 0..d {
                if !a[(r, c)].is_zero() {
                    by_row[r].push(c);
                    by_col[c].push(r);
                }
            }
        }
        Pattern { by_row, by_col }
    }
}

fn finish_row<F: crate::scalar::Field>(acc: BTreeMap<usize, F>) -> SparseRow<F> {
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Basis of `{P : AP = PA}`, reduced echelon form over the vectorized coordinates.
pub fn commutant_basis<T: Scalar>(a: &DenseMatrix<T>, tol: f64) -> Result<CommutantBasis<T>> {
    let d = require_square(a)?;
    let pattern = Pattern::of(a);
    let mut rows = Vec::with_capacity(d * d);
    for r in 0..d {
        for s in 0..d {
            let mut acc: BTreeMap<usize, T> = BTreeMap::new();
            for &k in &pattern.by_row[r] {
                let e = acc.entry(k * d + s).or_insert_with(T::zero);
                *e = e.clone() + a[(r, k)].clone();
            }
            for &k in &pattern.by_col[s] {
                let e = acc.entry(r * d + k).or_insert_with(T::zero);
                *e = e.clone() - a[(k, s)].clone();
            }
            let row = finish_row(acc);
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    let kernel = T::kernel(rows, d * d, tol)?;
    let basis = kernel
        .into_iter()
        .map(|v| {
            let mut p = DenseMatrix::zeros(d, d);
            for (u, x) in v {
                p[(u / d, u % d)] = x;
            }
            p
        })
        .collect();
    Ok(CommutantBasis {
        operator_dim: d,
        basis,
    })
}

/// Real unknowns parametrizing a Hermitian `d×d` matrix.
struct HermitianCoords {
    d: usize,
    // first unknown of the (r, s) slot for r <= s
    offset: Vec<usize>,
    count: usize,
}

impl HermitianCoords {
    fn new(d: usize) -> Self {
        let mut offset = vec![usize::MAX; d * d];
        let mut next = 0;
        for r in 0..d {
            for s in r..d {
                offset[r * d + s] = next;
                next += if r == s { 1 } else { 2 };
            }
        }
        HermitianCoords {
            d,
            offset,
            count: next,
        }
    }

    /// `P_{rs}` as a combination of real unknowns with complex coefficients.
    fn entry<T: Scalar>(&self, r: usize, s: usize) -> Vec<(usize, T)> {
        let i = T::from_parts(T::Real::zero(), T::Real::one());
        if r == s {
            vec![(self.offset[r * self.d + s], T::one())]
        } else if r < s {
            let base = self.offset[r * self.d + s];
            vec![(base, T::one()), (base + 1, i)]
        } else {
            let base = self.offset[s * self.d + r];
            vec![(base, T::one()), (base + 1, -i)]
        }
    }
}

/// Real dimension of `{P : AP = PA, P = P*}`.
pub fn selfadjoint_commutant_dim<T: Scalar>(a: &DenseMatrix<T>, tol: f64) -> Result<usize> {
    let d = require_square(a)?;
    let pattern = Pattern::of(a);
    let coords = HermitianCoords::new(d);
    let mut rows: Vec<SparseRow<T::Real>> = Vec::with_capacity(2 * d * d);
    for u in 0..d {
        for v in 0..d {
            let mut acc: BTreeMap<usize, T> = BTreeMap::new();
            for &k in &pattern.by_row[u] {
                for (id, c) in coords.entry::<T>(k, v) {
                    let e = acc.entry(id).or_insert_with(T::zero);
                    *e = e.clone() + a[(u, k)].clone() * c;
                }
            }
            for &k in &pattern.by_col[v] {
                for (id, c) in coords.entry::<T>(u, k) {
                    let e = acc.entry(id).or_insert_with(T::zero);
                    *e = e.clone() - c * a[(k, v)].clone();
                }
            }
            let re: BTreeMap<usize, T::Real> = acc.iter().map(|(&id, c)| (id, c.re())).collect();
            let im: BTreeMap<usize, T::Real> = acc.iter().map(|(&id, c)| (id, c.im())).collect();
            for row in [finish_row(re), finish_row(im)] {
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    T::real_nullity(rows, coords.count, tol)
}

/// True iff `P` is zero strictly above the diagonal and constant along every diagonal.
pub fn is_lower_toeplitz<T: Scalar>(p: &DenseMatrix<T>, tol: f64) -> bool {
    if !p.is_square() {
        return false;
    }
    let n = p.rows();
    (0..n).all(|r| {
        (0..n).all(|c| {
            if c > r {
                p[(r, c)].is_negligible(tol)
            } else {
                (p[(r, c)].clone() - p[(r - c, 0)].clone()).is_negligible(tol)
            }
        })
    })
}

/// `P = P*` and `P² = P`.
pub fn is_projection<T: Scalar>(p: &DenseMatrix<T>, tol: f64) -> bool {
    if !p.is_square() {
        return false;
    }
    p.approx_eq(&p.adjoint(), tol) && p.matmul(p).map(|sq| sq.approx_eq(p, tol)).unwrap_or(false)
}

/// `AB = BA`.
pub fn commutes<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>, tol: f64) -> Result<bool> {
    Ok(a.matmul(b)?.approx_eq(&b.matmul(a)?, tol))
}

/// Compression of `A` to the coordinate span of `indices`, which must be `A`-invariant.
pub fn restrict<T: Scalar>(
    a: &DenseMatrix<T>,
    indices: &[usize],
    tol: f64,
) -> Result<DenseMatrix<T>> {
    let d = require_square(a)?;
    let mut inside = vec![false; d];
    for &f in indices {
        match inside.get_mut(f) {
            Some(slot) if !*slot => *slot = true,
            Some(_) => return Err(Error::Index(format!("index {f} listed twice"))),
            None => return Err(Error::Index(format!("index {f} outside 0..{d}"))),
        }
    }
    for &s in indices {
        if let Some(r) = (0..d).find(|&r| !inside[r] && !a[(r, s)].is_negligible(tol)) {
            return Err(Error::Invariance(format!(
                "basis vector {s} is mapped onto coordinate {r} outside the span"
            )));
        }
    }
    Ok(a.submatrix(indices, indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{channel_basis, decomposed_shift};
    use crate::hardy::TruncationParams;
    use crate::scalar::GaussRational;
    use crate::toeplitz::{power_symbol, scalar_shift};
    use num_complex::Complex64;

    type Q = GaussRational;

    fn diag(values: &[i64]) -> DenseMatrix<Q> {
        DenseMatrix::from_fn(values.len(), values.len(), |r, c| {
            if r == c {
                Q::from_i64(values[r])
            } else {
                Q::zero()
            }
        })
    }

    /// Commutant dimension by an independent dense route: rank of the Kronecker
    /// operator `I⊗A − Aᵀ⊗I` written out entry by entry.
    fn kronecker_commutant_dim(a: &DenseMatrix<Q>) -> usize {
        let d = a.rows();
        let big = DenseMatrix::from_fn(d * d, d * d, |row, col| {
            let (r, s) = (row / d, row % d);
            let (k, l) = (col / d, col % d);
            let mut v = Q::zero();
            if l == s {
                v += a[(r, k)].clone();
            }
            if k == r {
                v -= a[(l, s)].clone();
            }
            v
        });
        d * d - big.rank(0.0).unwrap()
    }

    #[test]
    fn shift_commutant_is_polynomials_in_shift() {
        let j = scalar_shift::<Q>(3);
        let basis = commutant_basis(&j, 0.0).unwrap();
        assert_eq!(basis.dim(), 3);
        let expected = vec![DenseMatrix::identity(3), j.clone(), j.matmul(&j).unwrap()];
        assert_eq!(basis.basis, expected);
        assert_eq!(kronecker_commutant_dim(&j), 3);
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(
            commutant_basis(&DenseMatrix::<Q>::identity(3), 0.0)
                .unwrap()
                .dim(),
            9
        );
        assert_eq!(commutant_basis(&diag(&[1, 2]), 0.0).unwrap().dim(), 2);
        assert_eq!(
            commutant_basis(&DenseMatrix::<Q>::zeros(2, 2), 0.0)
                .unwrap()
                .dim(),
            4
        );
        assert!(matches!(
            commutant_basis(&DenseMatrix::<Q>::zeros(2, 3), 0.0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn commutant_agrees_with_kronecker_oracle() {
        let p = TruncationParams::new(2, 2, 2).unwrap();
        let samples = vec![
            power_symbol::<Q>(&p),
            diag(&[1, 1, 2]),
            decomposed_shift::<Q>(&TruncationParams::new(1, 2, 3).unwrap()),
            DenseMatrix::from_rows(vec![
                vec![Q::from_i64(1), Q::from_i64(2)],
                vec![Q::from_i64(3), Q::from_i64(4)],
            ])
            .unwrap(),
        ];
        for a in samples {
            let basis = commutant_basis(&a, 0.0).unwrap();
            assert_eq!(basis.dim(), kronecker_commutant_dim(&a));
            for b in &basis.basis {
                assert!(commutes(&a, b, 0.0).unwrap());
            }
        }
    }

    #[test]
    fn float_commutant_matches_exact() {
        let j = scalar_shift::<Complex64>(4);
        let basis = commutant_basis(&j, 1e-9).unwrap();
        assert_eq!(basis.dim(), 4);
        for b in &basis.basis {
            assert!(is_lower_toeplitz(b, 1e-9));
            assert!(commutes(&j, b, 1e-9).unwrap());
        }
    }

    #[test]
    fn lower_toeplitz_examples() {
        assert!(is_lower_toeplitz(&DenseMatrix::<Q>::identity(3), 0.0));
        assert!(is_lower_toeplitz(&scalar_shift::<Q>(4), 0.0));
        let mut p = DenseMatrix::<Q>::identity(3);
        p[(0, 1)] = Q::one();
        assert!(!is_lower_toeplitz(&p, 0.0));
        let mut q = DenseMatrix::<Q>::identity(3);
        q[(2, 2)] = Q::from_i64(2);
        assert!(!is_lower_toeplitz(&q, 0.0));
    }

    #[test]
    fn selfadjoint_dim_examples() {
        for k in 1..6 {
            assert_eq!(
                selfadjoint_commutant_dim(&scalar_shift::<Q>(k), 0.0).unwrap(),
                1
            );
        }
        let two = decomposed_shift::<Q>(&TruncationParams::new(2, 1, 2).unwrap());
        assert_eq!(selfadjoint_commutant_dim(&two, 0.0).unwrap(), 4);
        for d in 1..4 {
            assert_eq!(
                selfadjoint_commutant_dim(&DenseMatrix::<Q>::identity(d), 0.0).unwrap(),
                d * d
            );
        }
        assert_eq!(
            selfadjoint_commutant_dim(&diag(&[1, 2, 3]), 0.0).unwrap(),
            3
        );
    }

    #[test]
    fn selfadjoint_dim_float_mode() {
        let two = decomposed_shift::<Complex64>(&TruncationParams::new(2, 1, 2).unwrap());
        assert_eq!(selfadjoint_commutant_dim(&two, 1e-9).unwrap(), 4);
    }

    #[test]
    fn selfadjoint_dim_handles_complex_entries() {
        // A = [[0, i], [0, 0]]: commuting Hermitian matrices are real multiples of I
        let i = Q::from_parts(Zero::zero(), One::one());
        let a =
            DenseMatrix::from_rows(vec![vec![Q::zero(), i], vec![Q::zero(), Q::zero()]]).unwrap();
        assert_eq!(selfadjoint_commutant_dim(&a, 0.0).unwrap(), 1);
        // A = diag(i, -i) is normal with distinct eigenvalues: Hermitian commutant is diagonal reals
        let b = DenseMatrix::from_rows(vec![
            vec![Q::from_parts(Zero::zero(), One::one()), Q::zero()],
            vec![Q::zero(), -Q::from_parts(Zero::zero(), One::one())],
        ])
        .unwrap();
        assert_eq!(selfadjoint_commutant_dim(&b, 0.0).unwrap(), 2);
    }

    #[test]
    fn projection_examples() {
        assert!(is_projection(&DenseMatrix::<Q>::zeros(3, 3), 0.0));
        assert!(is_projection(&DenseMatrix::<Q>::identity(3), 0.0));
        assert!(!is_projection(&scalar_shift::<Q>(2), 0.0));
        // averaging projection across two coordinates
        let half = Q::one() / Q::from_i64(2);
        let avg = DenseMatrix::from_fn(2, 2, |_, _| half.clone());
        assert!(is_projection(&avg, 0.0));
    }

    #[test]
    fn restrict_examples() {
        let p = TruncationParams::new(1, 2, 2).unwrap();
        let t = power_symbol::<Q>(&p);
        let basis = channel_basis(1, 0, &p).unwrap();
        assert_eq!(
            restrict(&t, &basis.flat_indices, 0.0).unwrap(),
            scalar_shift(2)
        );
        let id = DenseMatrix::<Q>::identity(4);
        assert_eq!(
            restrict(&id, &basis.flat_indices, 0.0).unwrap(),
            DenseMatrix::identity(2)
        );
        assert!(matches!(
            restrict(&t, &[0, 1], 0.0),
            Err(Error::Invariance(_))
        ));
        assert!(matches!(restrict(&t, &[0, 9], 0.0), Err(Error::Index(_))));
        assert!(matches!(restrict(&t, &[0, 0], 0.0), Err(Error::Index(_))));
    }
}
