//! The truncated `C^m`-valued Hardy space: basis indexing, coefficient vectors,
//! inner product and norm.
//!
//! A function `F = Σ a_{ip} e_i z^p` with degrees `p < N` is stored as a flat
//! vector of length `d = m·N`, degree-major: `a_{ip}` lives at `p·m + (i − 1)`.
//! With that ordering, multiplication by `z` is a block subdiagonal shift.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The triple `(m, n, K)`: vector dimension, power of `z`, and blocks per channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct TruncationParams {
    m: usize,
    n: usize,
    blocks: usize,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    m: usize,
    n: usize,
    #[serde(rename = "K")]
    blocks: usize,
}

impl TryFrom<ParamsRepr> for TruncationParams {
    type Error = Error;

    fn try_from(r: ParamsRepr) -> Result<Self> {
        TruncationParams::new(r.m, r.n, r.blocks)
    }
}

impl From<TruncationParams> for ParamsRepr {
    fn from(p: TruncationParams) -> Self {
        ParamsRepr {
            m: p.m,
            n: p.n,
            blocks: p.blocks,
        }
    }
}

impl TruncationParams {
    pub fn new(m: usize, n: usize, blocks: usize) -> Result<Self> {
        if m == 0 || n == 0 || blocks == 0 {
            return Err(Error::InvalidParams(format!(
                "m, n and K must all be positive (got m={m}, n={n}, K={blocks})"
            )));
        }
        m.checked_mul(n)
            .and_then(|r| r.checked_mul(blocks))
            .ok_or_else(|| Error::InvalidParams("dimension overflows usize".into()))?;
        Ok(TruncationParams { m, n, blocks })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `K`, the length of every channel.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// `N = n·K`: degrees `0..N` are retained.
    pub fn degree_cutoff(&self) -> usize {
        self.n * self.blocks
    }

    /// `d = m·N`.
    pub fn dim(&self) -> usize {
        self.m * self.degree_cutoff()
    }

    /// `r = m·n`.
    pub fn channel_count(&self) -> usize {
        self.m * self.n
    }
}

/// The basis element `e_i z^p`; `component` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub component: usize,
    pub degree: usize,
}

pub fn flat_index(component: usize, degree: usize, params: &TruncationParams) -> Result<usize> {
    if component == 0 || component > params.m {
        return Err(Error::Index(format!(
            "component {component} outside 1..={}",
            params.m
        )));
    }
    if degree >= params.degree_cutoff() {
        return Err(Error::Index(format!(
            "degree {degree} outside 0..{}",
            params.degree_cutoff()
        )));
    }
    Ok(degree * params.m + (component - 1))
}

pub fn unflat_index(flat: usize, params: &TruncationParams) -> Result<BasisIndex> {
    if flat >= params.dim() {
        return Err(Error::Index(format!(
            "flat index {flat} outside 0..{}",
            params.dim()
        )));
    }
    Ok(BasisIndex {
        component: flat % params.m + 1,
        degree: flat / params.m,
    })
}

/// Coefficients of a truncated `C^m`-valued polynomial in flat order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> CoeffVector<T> {
    pub fn zeros(params: &TruncationParams) -> Self {
        CoeffVector {
            entries: vec![T::zero(); params.dim()],
        }
    }

    pub fn from_entries(entries: Vec<T>) -> Self {
        CoeffVector { entries }
    }

    /// The unit vector `e_i z^p`.
    pub fn basis(component: usize, degree: usize, params: &TruncationParams) -> Result<Self> {
        let mut v = Self::zeros(params);
        v.entries[flat_index(component, degree, params)?] = T::one();
        Ok(v)
    }

    /// Builds `Σ c · e_i z^p` from `(i, p, c)` triples.
    pub fn from_terms(
        params: &TruncationParams,
        terms: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut v = Self::zeros(params);
        for (i, p, c) in terms {
            let f = flat_index(i, p, params)?;
            v.entries[f] = v.entries[f].clone() + c;
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    /// Coefficient `a_{ip}`.
    pub fn coefficient(
        &self,
        component: usize,
        degree: usize,
        params: &TruncationParams,
    ) -> Result<&T> {
        let f = flat_index(component, degree, params)?;
        self.entries.get(f).ok_or_else(|| {
            Error::Shape(format!("vector of length {} has no index {f}", self.dim()))
        })
    }
}

/// `⟨F, G⟩ = Σ F_f · conj(G_f)`: linear in the first slot.
pub fn inner_product<T: Scalar>(f: &CoeffVector<T>, g: &CoeffVector<T>) -> Result<T> {
    if f.dim() != g.dim() {
        return Err(Error::Shape(format!(
            "inner product of vectors of length {} and {}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(f.entries
        .iter()
        .zip(&g.entries)
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.conj()))
}

/// `‖F‖`: the squared norm in the scalar's real field plus its square root as a float.
#[derive(Debug, Clone, PartialEq)]
pub struct Norm<R> {
    pub squared: R,
    pub value: f64,
}

pub fn norm<T: Scalar>(f: &CoeffVector<T>) -> Norm<T::Real> {
    let squared = f
        .entries
        .iter()
        .fold(T::Real::zero(), |acc, a| acc + a.norm_sqr());
    let value = T::real_to_f64(&squared).sqrt();
    Norm { squared, value }
}
