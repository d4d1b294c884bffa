//! Seeded randomized mechanisms.
//!
//! Every sampler takes an explicit [`RandomStream`]; there is no global RNG.
//! Parallel trial loops derive one substream per trial from a master seed so
//! results do not depend on scheduling.

mod alg1;
mod noise;
mod stream;
mod subsample;

pub use alg1::{run_alg1, simulate_alg1, Alg1Trials, BinaryPovm};
pub use noise::{
    gaussian_variance, laplace_density, laplace_scale, laplace_worst_ratio, noisy_query,
    randomized_response, rr_probabilities, sample_noise, NoiseKind, NoiseSpec,
};
pub use stream::RandomStream;
pub use subsample::{
    l2_sample, subsampled_model, tuple_weights, ConstantOutput, IdentityOutput, PerRowResponse,
    PerSampleResponse, RecordDomain, SampleMechanism, TableMechanism, ENUMERATION_LIMIT,
};
