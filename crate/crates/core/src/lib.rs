//! Dimension bounds for exceptional parameter sets of parametrized
//! self-similar systems, with rigorous separation checks and two worked
//! families.
//!
//! * [`ifs`]: affine systems, words, addresses and the coding metric.
//! * [`moran`]: similarity dimension and general dimension equations.
//! * [`certify`]: Hölder-type bounds, the displacement bound and piece
//!   disjointness certificates.
//! * [`separation`]: interval branch-and-bound for `K_j ∩ K_k = ∅`.
//! * [`cases`]: the exact-overlap and one-point families.
//! * [`report`] and [`cli`]: canonical output and the `genpos` command.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cases;
pub mod certify;
pub mod cli;
pub mod error;
pub mod family;
pub mod ifs;
pub mod interval;
pub mod moran;
pub mod report;
pub mod separation;

pub use error::{GenposError, Result};
pub use family::{FamilyDescriptor, FamilyKind};
pub use ifs::{AffineMap, Address, IFSystem, RatioVector, Word};
pub use separation::{SeparationVerdict, Status};
