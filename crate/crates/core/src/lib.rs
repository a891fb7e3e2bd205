//! Finite-truncation models of analytic Toeplitz operators on the `C^m`-valued
//! Hardy space.
//!
//! The crate builds the matrix of `T_{z^n}` on polynomials of degree below
//! `N = nK`, the permutation conjugating it onto `mn` copies of the truncated
//! unilateral shift, exact commutants, and the lattice of coordinate-diagonal
//! reducing subspaces.
//!
//! ```
//! use hardyshift::{verify_equivalence, GaussRational, TruncationParams};
//!
//! let params = TruncationParams::new(2, 3, 2).unwrap();
//! let report = verify_equivalence::<GaussRational>(&params, 0.0).unwrap();
//! assert!(report.unitary && report.intertwines);
//! ```

pub mod commutant;
pub mod decomposition;
pub mod error;
pub mod hardy;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod scalar;
pub mod toeplitz;

pub use commutant::{
    commutant_basis, commutes, is_lower_toeplitz, is_projection, restrict,
    selfadjoint_commutant_dim, CommutantBasis,
};
pub use decomposition::{
    basis_for_channel, build_intertwiner, channel_basis, channel_projection, channels,
    decomposed_shift, partition_check, verify_equivalence, Channel, ChannelBasis,
    EquivalenceReport,
};
pub use error::{Error, Result};
pub use hardy::{
    flat_index, inner_product, norm, unflat_index, BasisIndex, CoeffVector, Norm, TruncationParams,
};
pub use lattice::{
    block_diagonal_projection, check_minimal, distinct_supports, enumerate_lattice,
    lattice_closure_check, mask_projection, transported_projection, ChannelMask,
    EnumerationOptions, LatticeCounts, LatticeEntry, LatticeReport, Minimality, Sampling,
};
pub use matrix::DenseMatrix;
pub use scalar::{GaussRational, Mode, Scalar, DEFAULT_TOL};
pub use toeplitz::{
    commutes_with_shift_on_window, power_symbol, scalar_shift, toeplitz_matrix, vector_shift,
    MatrixSymbol,
};
