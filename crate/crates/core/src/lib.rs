//! Criss-cross deletion correcting codes for `n x n` binary arrays.
//!
//! A criss-cross deletion removes one whole row and one whole column. This
//! crate provides the CrissCross code family `C_n(a, b, c, d)` with an
//! explicit decoder, the q-ary VT component codes it is built from, exact
//! deletion/insertion ball computations, and an exhaustive verification
//! harness for the combinatorial statements the construction rests on.

pub mod analysis;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod error;
pub mod grid;
pub mod limits;
pub mod rng;
pub mod verify;
pub mod vt;

pub use code::{CodeParams, StructuralReport};
pub use decoder::{decode, DecodeTrace};
pub use error::{Error, Result};
pub use grid::{format_grid, parse_grid, BitGrid, DeletionSpec};
pub use vt::{QaryWord, VtLabel};
