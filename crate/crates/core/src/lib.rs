//! Nonadaptive semiquantitative group testing schemes that locate a burst of
//! consecutive positives among `n` items.
//!
//! Each test (a row of a 0/1 matrix) reports how many thresholds the number of
//! positives it contains reaches. Two families are provided:
//!
//! * fixed-length bursts: a sketch [`sketch::build_k`] that separates far-apart
//!   heads stacked over a refinement [`refine::build_r`] that separates nearby
//!   ones, assembled by [`refine::build_fixed_scheme`];
//! * bursts of length at most `ℓ` under saturation thresholds `(1, …, s)`,
//!   assembled by [`bounded::build_bounded_scheme`].
//!
//! Every builder checks its output with the exhaustive oracle in [`oracle`]
//! before returning it.

pub mod bounded;
pub mod error;
pub mod gray;
pub mod io;
pub mod model;
pub mod oracle;
pub mod refine;
pub mod report;
pub mod sketch;

pub use error::{Error, Result};
pub use model::{
    outcome, quantize, BinaryMatrix, Burst, BurstSpace, Component, Decoded, OutcomeVector, Role,
    Scheme, Thresholds,
};
pub use oracle::{check_distinguishable, PairPredicate};
pub use report::{BuildOptions, BuildReport, Deviation, Verification};
