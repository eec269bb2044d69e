//! Exact combinatorics of affine Weyl groups acting on coweight lattices.
//!
//! The crate computes, with no floating point anywhere:
//!
//! * root data and characteristic-zero Weyl characters of the dual group
//!   ([`rootdata`]),
//! * the affine Weyl group `W_aff = W_f ⋉ ZR∨` with its Coxeter structure,
//!   length, Bruhat order and the three level-`n` actions on coweights
//!   ([`affine`]),
//! * alcove geometry: affine roots, fundamental domains, facet stabilizers
//!   ([`alcove`]),
//! * the block decomposition of the coweight lattice under the dot action at
//!   level `l`, and the matching census of `μ_l`-fixed-point components
//!   ([`linkage`]),
//! * the antispherical module of the affine Hecke algebra, ordinary and
//!   parabolic Kazhdan-Lusztig polynomials, and ingestion of externally
//!   computed `l`-canonical data ([`hecke`]),
//! * tilting and simple character formulas evaluated down to weight
//!   multiplicities ([`charformula`]).
//!
//! A batch CLI over all of this lives in [`cli`] (binary `alcomb`).
//!
//! ```
//! use alcomb::charformula::{expand_to_weights, principal_block, tilting_character};
//! use alcomb::rootdata::Isogeny;
//! use alcomb::{KlTable, LinkageContext, PCanTable, RootDatum};
//!
//! let datum = RootDatum::from_type("A1", Isogeny::Adjoint)?;
//! let ctx = LinkageContext::new(datum, 3)?;
//! let kl = KlTable::new(ctx.group().clone());
//! let table = PCanTable::fallback(&ctx);
//! let block = principal_block(&ctx)?;
//!
//! // T(6): the tilting module indexed by w = s_0 s_1 in the block of 0.
//! let w = ctx.group().from_word(&[1, 0])?;
//! let t = tilting_character(&ctx, &block, &w, &table, &kl)?;
//! assert_eq!(t.coeff(&[6]), 1);
//! assert_eq!(t.coeff(&[4]), 1);
//! assert_eq!(expand_to_weights(ctx.datum(), &t)?.total(), 12);
//! # Ok::<(), alcomb::Error>(())
//! ```

// Index loops over small matrices are the clearest form for this code.
#![allow(clippy::needless_range_loop)]

pub mod affine;
pub mod alcove;
pub mod charformula;
pub mod cli;
pub mod hecke;
pub mod laurent;
pub mod linkage;
pub mod matrix;
pub mod rootdata;

use thiserror::Error;

/// Crate-wide error type.
///
/// `Validation` covers bad user input (exit code 2 in the CLI), `DataFile`
/// covers malformed or mismatched data files (exit code 3), and `Invariant`
/// flags internal postcondition failures that should never trigger on
/// correct inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("data file error: {0}")]
    DataFile(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use affine::{ActionMode, AffineWeylElt, WaffGroup};
pub use alcove::{AffineRoot, FacetDescriptor, FacetKind, RatPoint};
pub use charformula::{Basis, CharacterExpr, HatMap, YRegion};
pub use hecke::{AsphElt, KlTable, PCanMode, PCanTable};
pub use laurent::LaurentPoly;
pub use linkage::{Block, ComponentDescriptor, LinkageContext};
pub use rootdata::{Character, RootDatum};
