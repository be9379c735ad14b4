//! Enumeration guards and default verification scopes.
//!
//! Every exhaustive routine checks its job size against one of these before
//! doing any work, and refuses rather than silently sampling.

/// Largest number of candidate grids a single exact ball enumeration may visit.
pub const MAX_BALL_CANDIDATES: u128 = 1 << 26;

/// Largest dimension (rows or columns) of a grid produced by exhaustive insertion.
pub const MAX_INSERTION_DIM: usize = 6;

/// Largest `q^m` for a VT coset census.
pub const MAX_VT_CENSUS_WORDS: u128 = 1 << 24;

/// Largest constrained sub-region state space for structural counting.
pub const MAX_STRUCTURAL_STATES: u128 = 1 << 24;

/// Largest `2^(n^2)` for a good/bad census.
pub const MAX_CENSUS_GRIDS: u128 = 1 << 25;

/// Largest `q^m` for which exhaustive coset disjointness is checked.
pub const MAX_VT_DISJOINTNESS_WORDS: u128 = 1 << 16;

/// Default number of sampled pairs for sampled equivalence checks.
pub const DEFAULT_SAMPLED_PAIRS: usize = 10_000;

/// Default number of random arrays for the ball-size lower bound at n in {6, 8}.
pub const DEFAULT_BALL_BOUND_SAMPLES: usize = 100_000;

/// Hard cap on rejection-sampling attempts per constrained block in the sampler.
pub const SAMPLER_MAX_ATTEMPTS: usize = 1 << 20;
