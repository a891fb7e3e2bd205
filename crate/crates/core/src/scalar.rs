//! Scalar fields: exact Gaussian rationals and double-precision complex numbers.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SparseRow};

/// Exact complex numbers with rational real and imaginary parts.
pub type GaussRational = Complex<BigRational>;

/// Relative tolerance used in float mode unless the caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Arithmetic mode of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// The operations a field needs for elimination.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + Debug
        + PartialEq
        + Send
        + Sync
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
{
}

/// A number that can be written as a JSON number or as a rational string `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawNumber {
    Text(String),
    Number(serde_json::Number),
}

impl Default for RawNumber {
    fn default() -> Self {
        RawNumber::Text("0".to_string())
    }
}

/// Complex scalar field used for matrix entries.
///
/// The two implementations differ in how zero is decided: exact scalars compare
/// structurally and ignore `tol`, floating scalars compare against `tol`.
pub trait Scalar: Field {
    type Real: Field;
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn conj(&self) -> Self;
    fn norm_sqr(&self) -> Self::Real;
    fn to_c64(&self) -> Complex64;
    fn real_to_f64(r: &Self::Real) -> f64;

    /// Modulus, as a float, for scaling tolerances.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    fn is_negligible(&self, tol: f64) -> bool;

    fn parse_real(raw: &RawNumber) -> Result<Self::Real>;

    /// Kernel of the sparse system `rows · x = 0`, reduced echelon form.
    fn kernel(rows: Vec<SparseRow<Self>>, ncols: usize, tol: f64) -> Result<Vec<SparseRow<Self>>>;

    fn rank(rows: Vec<SparseRow<Self>>, ncols: usize, tol: f64) -> Result<usize>;

    /// Dimension of the kernel of a system over the real subfield.
    fn real_nullity(rows: Vec<SparseRow<Self::Real>>, ncols: usize, tol: f64) -> Result<usize>;
}

fn parse_rational(text: &str) -> Option<BigRational> {
    BigRational::from_str(text.trim()).ok()
}

impl Scalar for GaussRational {
    type Real = BigRational;
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(v.into()), BigRational::zero())
    }

    fn from_parts(re: BigRational, im: BigRational) -> Self {
        Complex::new(re, im)
    }

    fn re(&self) -> BigRational {
        self.re.clone()
    }

    fn im(&self) -> BigRational {
        self.im.clone()
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn norm_sqr(&self) -> BigRational {
        Complex::norm_sqr(self)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(Self::real_to_f64(&self.re), Self::real_to_f64(&self.im))
    }

    fn real_to_f64(r: &BigRational) -> f64 {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn parse_real(raw: &RawNumber) -> Result<BigRational> {
        match raw {
            RawNumber::Text(text) => parse_rational(text)
                .ok_or_else(|| Error::Symbol(format!("not a rational number: {text:?}"))),
            RawNumber::Number(n) => n
                .as_i64()
                .map(|v| BigRational::from_integer(v.into()))
                .ok_or_else(|| {
                    Error::Symbol(format!(
                        "non-integer JSON number {n} in exact mode; write it as \"p/q\" or use float mode"
                    ))
                }),
        }
    }

    fn kernel(rows: Vec<SparseRow<Self>>, ncols: usize, _tol: f64) -> Result<Vec<SparseRow<Self>>> {
        Ok(linalg::exact_kernel(rows, ncols))
    }

    fn rank(rows: Vec<SparseRow<Self>>, ncols: usize, _tol: f64) -> Result<usize> {
        let mut system = linalg::Echelon::new(ncols);
        for row in rows {
            system.insert(row);
        }
        Ok(system.rank())
    }

    fn real_nullity(rows: Vec<SparseRow<BigRational>>, ncols: usize, _tol: f64) -> Result<usize> {
        let mut system = linalg::Echelon::new(ncols);
        for row in rows {
            system.insert(row);
        }
        Ok(system.nullity())
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn re(&self) -> f64 {
        self.re
    }

    fn im(&self) -> f64 {
        self.im
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn norm_sqr(&self) -> f64 {
        Complex::norm_sqr(self)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn real_to_f64(r: &f64) -> f64 {
        *r
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    fn parse_real(raw: &RawNumber) -> Result<f64> {
        let parsed = match raw {
            RawNumber::Text(text) => parse_rational(text)
                .and_then(|q| q.to_f64())
                .or_else(|| text.trim().parse::<f64>().ok()),
            RawNumber::Number(n) => n.as_f64(),
        };
        parsed
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Symbol(format!("not a finite number: {raw:?}")))
    }

    fn kernel(rows: Vec<SparseRow<Self>>, ncols: usize, tol: f64) -> Result<Vec<SparseRow<Self>>> {
        linalg::svd_kernel(&rows, ncols, tol)
    }

    fn rank(rows: Vec<SparseRow<Self>>, ncols: usize, tol: f64) -> Result<usize> {
        linalg::svd_rank(&rows, ncols, tol)
    }

    fn real_nullity(rows: Vec<SparseRow<f64>>, ncols: usize, tol: f64) -> Result<usize> {
        linalg::svd_rank(&rows, ncols, tol).map(|rank| ncols - rank)
    }
}
