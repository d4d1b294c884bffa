//! Differential-privacy amplification for quantum encodings, quantum-inspired
//! l2 subsampling and quantum channels satisfying mixing conditions.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, Hermitian spectra, trace distance,
//!   POVM probabilities.
//! * [`encodings`]: basis, amplitude and rotation feature maps, kernels and
//!   minimum adjacent kernels.
//! * [`channels`]: Kraus channels, the named qubit channels, Bloch
//!   representation, Dobrushin and Doeblin checks.
//! * [`privacy`]: closed-form privacy parameters and amplification rules.
//! * [`mechanisms`]: seeded samplers, randomized response, l2 sampling and the
//!   encode-measure-average-perturb pipeline.
//! * [`auditor`]: exact hockey-stick audits of finite mechanisms and
//!   measurement-ratio audits of channels.
//!
//! Search-heavy routines fan out over rayon when the `parallel` feature is
//! enabled (the default) and run sequentially otherwise; see [`Parallelism`].

pub mod auditor;
pub mod channels;
pub mod encodings;
pub mod error;
pub mod linalg;
pub mod mechanisms;
mod par;
mod sphere;
pub mod privacy;
pub mod tol;

pub use error::{Error, Result};
pub use par::Parallelism;

pub use num_complex::Complex64 as C64;
