//! The coordinate-diagonal reducing subspaces of `T_{z^n}`: one per subset of
//! channels, `2^{mn}` in all, with the `mn` single channels as minimal members.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commutant::{commutes, restrict, selfadjoint_commutant_dim};
use crate::decomposition::{basis_for_channel, build_intertwiner, channels, Channel};
use crate::error::{Error, Result};
use crate::hardy::TruncationParams;
use crate::matrix::DenseMatrix;
use crate::scalar::{Scalar, DEFAULT_TOL};
use crate::toeplitz::power_symbol;

/// Widest mask representable; sampling mode is limited to this many channels.
pub const MAX_MASK_BITS: usize = 63;

/// Default enumeration cap in channel bits.
pub const DEFAULT_CAP_BITS: usize = 20;

/// Subset of channels; bit `c` selects channel `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelMask {
    bits: u64,
    width: usize,
}

impl ChannelMask {
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        if width > MAX_MASK_BITS {
            return Err(Error::Cap {
                bits: width,
                cap: MAX_MASK_BITS,
            });
        }
        if bits >> width != 0 {
            return Err(Error::Shape(format!(
                "mask {bits:#b} wider than {width} bits"
            )));
        }
        Ok(ChannelMask { bits, width })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let word = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (c, &b)| if b { acc | (1 << c) } else { acc });
        if bits.len() > MAX_MASK_BITS {
            return Err(Error::Cap {
                bits: bits.len(),
                cap: MAX_MASK_BITS,
            });
        }
        ChannelMask::new(word, bits.len())
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn contains(&self, channel: usize) -> bool {
        channel < self.width && self.bits >> channel & 1 == 1
    }

    pub fn popcount(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn complement(&self) -> Self {
        ChannelMask {
            bits: !self.bits & full_word(self.width),
            width: self.width,
        }
    }

    /// Character `c` is the bit of channel `c`.
    pub fn bitstring(&self) -> String {
        (0..self.width)
            .map(|c| if self.contains(c) { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(s: &str) -> Result<Self> {
        let bools = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Shape(format!("invalid mask character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        ChannelMask::from_bools(&bools)
    }
}

impl Serialize for ChannelMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.bitstring())
    }
}

impl<'de> Deserialize<'de> for ChannelMask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ChannelMask::parse_bitstring(&s).map_err(serde::de::Error::custom)
    }
}

fn full_word(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_width(mask: &ChannelMask, params: &TruncationParams) -> Result<()> {
    if mask.width != params.channel_count() {
        return Err(Error::Shape(format!(
            "mask has {} bits but there are {} channels",
            mask.width,
            params.channel_count()
        )));
    }
    Ok(())
}

/// Flat positions covered by the channels selected in `mask`, ascending.
pub fn mask_support(mask: &ChannelMask, params: &TruncationParams) -> Result<Vec<usize>> {
    check_width(mask, params)?;
    let mut support = Vec::with_capacity(mask.popcount() * params.blocks());
    for ch in channels(params)
        .into_iter()
        .filter(|c| mask.contains(c.ordinal))
    {
        support.extend(basis_for_channel(ch, params)?.flat_indices);
    }
    support.sort_unstable();
    Ok(support)
}

/// Orthogonal projection onto the selected channels, in flat coordinates.
pub fn mask_projection<T: Scalar>(
    mask: &ChannelMask,
    params: &TruncationParams,
) -> Result<DenseMatrix<T>> {
    let support = mask_support(mask, params)?;
    Ok(DenseMatrix::from_unit_entries(
        params.dim(),
        support.into_iter().map(|f| (f, f)),
    ))
}

/// The block-diagonal projection `diag(G_{10}, …, G_{m,n−1})` with `G = I_K` on selected
/// channels and `O` elsewhere, in decomposed coordinates.
pub fn block_diagonal_projection<T: Scalar>(
    mask: &ChannelMask,
    params: &TruncationParams,
) -> Result<DenseMatrix<T>> {
    check_width(mask, params)?;
    let k = params.blocks();
    Ok(DenseMatrix::from_unit_entries(
        params.dim(),
        (0..params.channel_count())
            .filter(|&c| mask.contains(c))
            .flat_map(|c| (c * k..(c + 1) * k).map(|p| (p, p))),
    ))
}

/// `X·G·X*`: a block-diagonal projection carried back to flat coordinates.
pub fn transported_projection<T: Scalar>(
    mask: &ChannelMask,
    params: &TruncationParams,
) -> Result<DenseMatrix<T>> {
    let x = build_intertwiner::<T>(params);
    let g = block_diagonal_projection(mask, params)?;
    x.matmul(&g)?.matmul(&x.adjoint())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEntry {
    pub mask: ChannelMask,
    pub subspace_dim: usize,
    pub is_reducing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Minimality {
    pub channel: Channel,
    pub is_minimal: bool,
    pub restricted_selfadjoint_commutant_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LatticeCounts {
    pub total_masks: u64,
    pub checked_masks: u64,
    pub reducing_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub params: TruncationParams,
    pub entries: Vec<LatticeEntry>,
    pub minimal_channels: Vec<Minimality>,
    pub full_selfadjoint_commutant_dim: usize,
    pub counts: LatticeCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationOptions {
    pub cap_bits: usize,
    pub sampling: Option<Sampling>,
    pub tol: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            cap_bits: DEFAULT_CAP_BITS,
            sampling: None,
            tol: DEFAULT_TOL,
        }
    }
}

fn masks_to_check(width: usize, opts: &EnumerationOptions) -> Result<Vec<u64>> {
    if width > MAX_MASK_BITS {
        return Err(Error::Cap {
            bits: width,
            cap: MAX_MASK_BITS,
        });
    }
    let total = 1u64 << width;
    match opts.sampling {
        None if width > opts.cap_bits => Err(Error::Cap {
            bits: width,
            cap: opts.cap_bits,
        }),
        None => Ok((0..total).collect()),
        Some(Sampling { samples, seed }) => {
            let want = samples.min(total);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = BTreeSet::new();
            while (picked.len() as u64) < want {
                picked.insert(rng.gen::<u64>() & full_word(width));
            }
            Ok(picked.into_iter().collect())
        }
    }
}

/// Restricts `T_{z^n}` to one channel and measures its self-adjoint commutant;
/// dimension 1 leaves only the projections 0 and I.
pub fn check_minimal<T: Scalar>(
    channel: Channel,
    params: &TruncationParams,
    tol: f64,
) -> Result<Minimality> {
    let basis = basis_for_channel(channel, params)?;
    let dim = restricted_selfadjoint_dim::<T>(&basis.flat_indices, params, tol)?;
    Ok(Minimality {
        channel,
        is_minimal: dim == 1,
        restricted_selfadjoint_commutant_dim: dim,
    })
}

/// Self-adjoint commutant dimension of `T_{z^n}` restricted to an invariant coordinate span.
pub fn restricted_selfadjoint_dim<T: Scalar>(
    indices: &[usize],
    params: &TruncationParams,
    tol: f64,
) -> Result<usize> {
    let restricted = restrict(&power_symbol::<T>(params), indices, tol)?;
    selfadjoint_commutant_dim(&restricted, tol)
}

pub fn enumerate_lattice<T: Scalar>(
    params: &TruncationParams,
    opts: &EnumerationOptions,
) -> Result<LatticeReport> {
    let width = params.channel_count();
    let masks = masks_to_check(width, opts)?;
    let operator = power_symbol::<T>(params);
    let entries = masks
        .par_iter()
        .map(|&bits| {
            let mask = ChannelMask::new(bits, width)?;
            let projection = mask_projection::<T>(&mask, params)?;
            Ok(LatticeEntry {
                mask,
                subspace_dim: params.blocks() * mask.popcount(),
                is_reducing: commutes(&projection, &operator, opts.tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let minimal_channels = channels(params)
        .into_par_iter()
        .map(|ch| check_minimal::<T>(ch, params, opts.tol))
        .collect::<Result<Vec<_>>>()?;
    let full_selfadjoint_commutant_dim = selfadjoint_commutant_dim(&operator, opts.tol)?;
    let counts = LatticeCounts {
        total_masks: 1u64 << width,
        checked_masks: entries.len() as u64,
        reducing_count: entries.iter().filter(|e| e.is_reducing).count() as u64,
    };
    Ok(LatticeReport {
        params: *params,
        entries,
        minimal_channels,
        full_selfadjoint_commutant_dim,
        counts,
        sampling: opts.sampling,
    })
}

/// True iff no two entries select the same set of flat coordinates.
pub fn distinct_supports(report: &LatticeReport) -> Result<bool> {
    let mut seen = HashSet::with_capacity(report.entries.len());
    for entry in &report.entries {
        if !seen.insert(mask_support(&entry.mask, &report.params)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Diagonal of a 0/1 diagonal matrix as a bitset; `None` if the matrix is not of that form.
fn diagonal_bits<T: Scalar>(p: &DenseMatrix<T>) -> Option<Vec<u64>> {
    let d = p.rows();
    let mut bits = vec![0u64; d.div_ceil(64)];
    for (r, c) in p.support(0.0) {
        if r != c || p[(r, c)] != T::one() {
            return None;
        }
        bits[r / 64] |= 1 << (r % 64);
    }
    Some(bits)
}

fn complement_bits(bits: &[u64], d: usize) -> Vec<u64> {
    bits.iter()
        .enumerate()
        .map(|(w, &x)| {
            let live = (d - 64 * w).min(64);
            !x & full_word(live)
        })
        .collect()
}

/// Checks that the family in `report` is a Boolean lattice of projections: closed under
/// complement, meet and join, with `P_{¬c} = I − P_c`, `P_{c∧c'} = P_c·P_{c'}` and
/// `P_{c∨c'} = P_c + P_{c'} − P_c·P_{c'}`.
///
/// Mask projections are first verified to be diagonal with 0/1 entries, so the
/// products reduce to bitwise operations on their diagonals.
pub fn lattice_closure_check<T: Scalar>(report: &LatticeReport) -> bool {
    if report.sampling.is_some() {
        return false;
    }
    let params = &report.params;
    let d = params.dim();
    let mut diagonals: HashMap<ChannelMask, Vec<u64>> =
        HashMap::with_capacity(report.entries.len());
    for entry in &report.entries {
        let Ok(p) = mask_projection::<T>(&entry.mask, params) else {
            return false;
        };
        match diagonal_bits(&p) {
            Some(bits) => diagonals.insert(entry.mask, bits),
            None => return false,
        };
    }
    let complements_ok = diagonals.iter().all(|(mask, bits)| {
        diagonals
            .get(&mask.complement())
            .is_some_and(|c| *c == complement_bits(bits, d))
    });
    if !complements_ok {
        return false;
    }
    let family: Vec<(&ChannelMask, &Vec<u64>)> = diagonals.iter().collect();
    family.par_iter().all(|&(a, da)| {
        family.iter().all(|&(b, db)| {
            let meet = ChannelMask {
                bits: a.bits & b.bits,
                width: a.width,
            };
            let join = ChannelMask {
                bits: a.bits | b.bits,
                width: a.width,
            };
            let meet_ok = diagonals.get(&meet).is_some_and(|dm| {
                dm.iter()
                    .zip(da.iter().zip(db))
                    .all(|(m, (x, y))| *m == x & y)
            });
            let join_ok = diagonals.get(&join).is_some_and(|dj| {
                dj.iter()
                    .zip(da.iter().zip(db))
                    .all(|(j, (x, y))| *j == x | y)
            });
            meet_ok && join_ok
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutant::is_projection;
    use crate::scalar::GaussRational;
    use num_complex::Complex64;

    type Q = GaussRational;

    fn params(m: usize, n: usize, k: usize) -> TruncationParams {
        TruncationParams::new(m, n, k).unwrap()
    }

    fn exact() -> EnumerationOptions {
        EnumerationOptions::default()
    }

    #[test]
    fn mask_bitstrings() {
        let mask = ChannelMask::new(0b0101, 4).unwrap();
        assert_eq!(mask.bitstring(), "1010");
        assert_eq!(ChannelMask::parse_bitstring("1010").unwrap(), mask);
        assert_eq!(mask.complement().bitstring(), "0101");
        assert!(ChannelMask::new(0b10000, 4).is_err());
        assert!(ChannelMask::parse_bitstring("10x").is_err());
        let json = serde_json::to_string(&mask).unwrap();
        assert_eq!(json, "\"1010\"");
    }

    #[test]
    fn mask_projection_examples() {
        let p = params(1, 2, 2);
        let zero = mask_projection::<Q>(&ChannelMask::new(0, 2).unwrap(), &p).unwrap();
        assert!(zero.is_zero_matrix(0.0));
        let all = mask_projection::<Q>(&ChannelMask::new(0b11, 2).unwrap(), &p).unwrap();
        assert_eq!(all, DenseMatrix::identity(4));
        let first =
            mask_projection::<Q>(&ChannelMask::from_bools(&[true, false]).unwrap(), &p).unwrap();
        assert_eq!(first.support(0.0), vec![(0, 0), (2, 2)]);
        assert!(matches!(
            mask_projection::<Q>(&ChannelMask::new(0, 3).unwrap(), &p),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn mask_projections_are_projections_of_expected_rank() {
        let p = params(2, 2, 3);
        for bits in 0..16 {
            let mask = ChannelMask::new(bits, 4).unwrap();
            let proj = mask_projection::<Q>(&mask, &p).unwrap();
            assert!(is_projection(&proj, 0.0));
            assert_eq!(proj.rank(0.0).unwrap(), 3 * mask.popcount());
        }
    }

    #[test]
    fn enumerate_examples() {
        let single = enumerate_lattice::<Q>(&params(1, 1, 3), &exact()).unwrap();
        assert_eq!(single.entries.len(), 2);
        assert!(single.entries.iter().all(|e| e.is_reducing));
        assert_eq!(single.full_selfadjoint_commutant_dim, 1);

        let four = enumerate_lattice::<Q>(&params(2, 2, 3), &exact()).unwrap();
        assert_eq!(four.counts.total_masks, 16);
        assert_eq!(four.counts.reducing_count, 16);
        assert_eq!(
            four.entries.iter().filter(|e| e.subspace_dim == 3).count(),
            4
        );
        assert!(distinct_supports(&four).unwrap());

        let small = enumerate_lattice::<Q>(&params(1, 2, 2), &exact()).unwrap();
        let dims: Vec<usize> = small.entries.iter().map(|e| e.subspace_dim).collect();
        assert_eq!(dims, vec![0, 2, 2, 4]);
    }

    #[test]
    fn enumeration_cap() {
        let err = enumerate_lattice::<Q>(&params(5, 5, 2), &exact()).unwrap_err();
        assert_eq!(err, Error::Cap { bits: 25, cap: 20 });
        let opts = EnumerationOptions {
            cap_bits: 3,
            ..exact()
        };
        assert!(enumerate_lattice::<Q>(&params(2, 2, 2), &opts).is_err());
    }

    #[test]
    fn sampling_mode_is_deterministic() {
        let opts = EnumerationOptions {
            sampling: Some(Sampling {
                samples: 12,
                seed: 7,
            }),
            ..exact()
        };
        let p = params(5, 5, 1);
        let a = enumerate_lattice::<Q>(&p, &opts).unwrap();
        let b = enumerate_lattice::<Q>(&p, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.checked_masks, 12);
        assert_eq!(a.counts.total_masks, 1 << 25);
        assert_eq!(a.counts.reducing_count, 12);
        assert!(!lattice_closure_check::<Q>(&a));
    }

    #[test]
    fn minimality_examples() {
        for (m, n, k) in [(1, 1, 1), (2, 2, 3), (3, 1, 2)] {
            let p = params(m, n, k);
            for ch in channels(&p) {
                let result = check_minimal::<Q>(ch, &p, 0.0).unwrap();
                assert!(result.is_minimal);
                assert_eq!(result.restricted_selfadjoint_commutant_dim, 1);
            }
        }
        let p = params(2, 1, 2);
        let union = mask_support(&ChannelMask::new(0b11, 2).unwrap(), &p).unwrap();
        assert_eq!(restricted_selfadjoint_dim::<Q>(&union, &p, 0.0).unwrap(), 4);
    }

    #[test]
    fn closure_examples() {
        let single = enumerate_lattice::<Q>(&params(1, 1, 2), &exact()).unwrap();
        assert!(lattice_closure_check::<Q>(&single));
        let four = enumerate_lattice::<Q>(&params(2, 2, 2), &exact()).unwrap();
        assert!(lattice_closure_check::<Q>(&four));
        let mut missing = four.clone();
        missing.entries.retain(|e| e.mask.bits() == 0b0001);
        assert!(!lattice_closure_check::<Q>(&missing));
    }

    #[test]
    fn transported_block_projections_match_masks() {
        let p = params(2, 3, 2);
        for bits in 0..64 {
            let mask = ChannelMask::new(bits, 6).unwrap();
            assert_eq!(
                transported_projection::<Q>(&mask, &p).unwrap(),
                mask_projection::<Q>(&mask, &p).unwrap()
            );
        }
    }

    #[test]
    fn float_mode_lattice() {
        let report = enumerate_lattice::<Complex64>(&params(2, 1, 2), &exact()).unwrap();
        assert_eq!(report.counts.reducing_count, 4);
        assert_eq!(report.full_selfadjoint_commutant_dim, 4);
        assert!(lattice_closure_check::<Complex64>(&report));
    }
}
