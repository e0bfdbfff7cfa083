//! Exact counting, exact sampling and local statistics of uniformly random
//! permutations with a prescribed number of inversions.

pub mod asymptotics;
pub mod error;
pub mod experiments;
pub mod permutation;
pub mod qcount;
pub mod sampler;

pub use error::{Error, Result};
pub use permutation::{InversionSequence, Permutation};
pub use qcount::{CoefficientVector, ExactProbability};
pub use sampler::{PermSampler, RngStream, SamplerKind, TiltParams};
