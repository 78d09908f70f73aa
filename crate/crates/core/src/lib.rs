//! Egalitarian allocation of indivisible resources under additive
//! preferences, with tooling to quantify how profitable lying about
//! preferences is and how robust lies are to misestimating the other
//! agents.
//!
//! The crate provides:
//!
//! - an exact max-min solver over all `n^m` allocations ([`exact`]);
//! - a genetic solver for larger instances ([`ga`]);
//! - predefined lying strategies, a closed-form optimal lie for the
//!   unlimited setting, and a bilevel search for optimal lies ([`deception`]);
//! - noise experiments that perturb the liar's estimate of the other
//!   agents' preferences ([`robustness`]);
//! - an instance file format and deterministic reports ([`io`]).
//!
//! All randomness is seeded [`rand_chacha::ChaCha8Rng`] via the substream
//! scheme in [`rng`], so every result is reproducible from a `u64` seed.

pub mod deception;
pub mod error;
pub mod exact;
pub mod ga;
pub mod io;
pub mod model;
pub mod rng;
pub mod robustness;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Allocation, Mode, PreferenceProfile, ProblemInstance};
pub use solver::Solver;
