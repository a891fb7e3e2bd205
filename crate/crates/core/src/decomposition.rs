//! Channel decomposition of the truncated space under `T_{z^n}` and the
//! permutation that conjugates `T_{z^n}` onto `mn` copies of the scalar shift.
//!
//! Channel `(i, j)` is spanned by `e_i z^{nk+j}`, `k = 0..K`. Channels are
//! ordered `c = j·m + (i − 1)`, and in decomposed coordinates channel `c`
//! occupies positions `c·K .. (c+1)·K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{flat_index, TruncationParams};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use crate::toeplitz::{power_symbol, scalar_shift};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Channel {
    /// `i`, 1-based.
    pub component: usize,
    /// `j` in `0..n`.
    pub residue: usize,
    /// `c = j·m + (i − 1)`.
    pub ordinal: usize,
}

impl Channel {
    pub fn new(component: usize, residue: usize, params: &TruncationParams) -> Result<Self> {
        if component == 0 || component > params.m() {
            return Err(Error::Index(format!(
                "component {component} outside 1..={}",
                params.m()
            )));
        }
        if residue >= params.n() {
            return Err(Error::Index(format!(
                "residue {residue} outside 0..{}",
                params.n()
            )));
        }
        Ok(Channel {
            component,
            residue,
            ordinal: residue * params.m() + component - 1,
        })
    }

    pub fn from_ordinal(ordinal: usize, params: &TruncationParams) -> Result<Self> {
        if ordinal >= params.channel_count() {
            return Err(Error::Index(format!(
                "channel {ordinal} outside 0..{}",
                params.channel_count()
            )));
        }
        Channel::new(ordinal % params.m() + 1, ordinal / params.m(), params)
    }
}

/// All `mn` channels in ordinal order.
pub fn channels(params: &TruncationParams) -> Vec<Channel> {
    (0..params.channel_count())
        .map(|c| Channel::from_ordinal(c, params).expect("ordinal in range"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelBasis {
    pub channel: Channel,
    /// Entry `k` is the flat index of `e_i z^{nk+j}`.
    pub flat_indices: Vec<usize>,
}

pub fn channel_basis(
    component: usize,
    residue: usize,
    params: &TruncationParams,
) -> Result<ChannelBasis> {
    let channel = Channel::new(component, residue, params)?;
    basis_for_channel(channel, params)
}

pub fn basis_for_channel(channel: Channel, params: &TruncationParams) -> Result<ChannelBasis> {
    let flat_indices = (0..params.blocks())
        .map(|k| flat_index(channel.component, params.n() * k + channel.residue, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelBasis {
        channel,
        flat_indices,
    })
}

/// True iff the channel bases are pairwise disjoint and cover `0..d`.
pub fn partition_check(params: &TruncationParams) -> bool {
    let mut hits = vec![0usize; params.dim()];
    for channel in channels(params) {
        let Ok(basis) = basis_for_channel(channel, params) else {
            return false;
        };
        for f in basis.flat_indices {
            match hits.get_mut(f) {
                Some(h) => *h += 1,
                None => return false,
            }
        }
    }
    hits.iter().all(|&h| h == 1)
}

/// Permutation `X` taking decomposed coordinates to flat coordinates: column `c·K + k`
/// has its 1 at the flat index of `e_i z^{nk+j}`.
pub fn build_intertwiner<T: Scalar>(params: &TruncationParams) -> DenseMatrix<T> {
    let k_len = params.blocks();
    DenseMatrix::from_unit_entries(
        params.dim(),
        channels(params).into_iter().flat_map(|ch| {
            let basis = basis_for_channel(ch, params).expect("channel in range");
            basis
                .flat_indices
                .into_iter()
                .enumerate()
                .map(move |(k, row)| (row, ch.ordinal * k_len + k))
        }),
    )
}

/// `⊕_1^{mn}` of the `K×K` scalar shift.
pub fn decomposed_shift<T: Scalar>(params: &TruncationParams) -> DenseMatrix<T> {
    let blocks = vec![scalar_shift::<T>(params.blocks()); params.channel_count()];
    DenseMatrix::direct_sum(&blocks)
}

/// Diagonal 0/1 projection onto the span of one channel, in flat coordinates.
pub fn channel_projection<T: Scalar>(
    basis: &ChannelBasis,
    params: &TruncationParams,
) -> DenseMatrix<T> {
    DenseMatrix::from_unit_entries(params.dim(), basis.flat_indices.iter().map(|&f| (f, f)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub unitary: bool,
    pub intertwines: bool,
    pub channels: Vec<ChannelBasis>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.unitary && self.intertwines
    }
}

/// Checks `X*X = XX* = I` and `X*·T_{z^n}·X = ⊕ J_K` entrywise.
pub fn verify_equivalence<T: Scalar>(
    params: &TruncationParams,
    tol: f64,
) -> Result<EquivalenceReport> {
    let x = build_intertwiner::<T>(params);
    let x_adj = x.adjoint();
    let identity = DenseMatrix::identity(params.dim());
    let unitary =
        x_adj.matmul(&x)?.approx_eq(&identity, tol) && x.matmul(&x_adj)?.approx_eq(&identity, tol);
    let conjugated = x_adj.matmul(&power_symbol::<T>(params))?.matmul(&x)?;
    let intertwines = conjugated.approx_eq(&decomposed_shift(params), tol);
    let channels = channels(params)
        .into_iter()
        .map(|c| basis_for_channel(c, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceReport {
        unitary,
        intertwines,
        channels,
    })
}
