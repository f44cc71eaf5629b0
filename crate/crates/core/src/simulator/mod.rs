//! Monte Carlo evaluation of the random coding scheme and an exact
//! enumeration oracle for tiny instances.
//!
//! Codewords are addressable: the symbols of message `w` in rate class `i`
//! of user `k` come from a generator seeded by `(seed, k, i, w)`, so only
//! the classes the receiver searches are ever stored and an out-of-region
//! transmitted codeword is drawn on demand.

mod codebook;
mod decoder;
mod exact;
mod seed;
mod threshold;
mod trials;

pub use codebook::{codeword_count, Codebook, CodebookSpec};
pub use decoder::{Decoder, Outcome};
pub use exact::{exact_ensemble_error, ENUMERATION_LIMIT};
pub use seed::{mix, trial_seed};
pub use threshold::{compute_threshold, ThresholdParams, ThresholdTable};
pub use trials::{empirical_p_es, run_trials, wilson_radius_95, Condition, ErrorKind, Scenario, SimOutcome};

/// Default cap on stored codeword symbols per codebook.
pub const DEFAULT_MEMORY_BUDGET: u128 = 50_000_000;
