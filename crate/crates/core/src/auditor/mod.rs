//! Empirical verification of privacy bounds.
//!
//! Finite classical mechanisms are audited exactly with the hockey-stick
//! divergence. Channels are audited by maximising measurement likelihood
//! ratios over state pairs at a given trace distance. Channel audits are
//! one-sided: a reported violation comes with a reproducible witness, but a
//! pass only means the search found nothing larger.

mod classical;
mod models;
mod quantum;

use serde::Serialize;

pub use classical::{audit_classical, hockey_stick, MechanismModel};
pub use models::{audit_subsampling_theorem, encoding_measurement_model, SubsamplingAudit};
pub use quantum::{
    audit_channel_qdp, dinkelbach_qubit_ratio, worst_case_measurement_ratio, QdpSearch,
    QuantumWitness, RatioResult,
};

use crate::linalg::ComplexMatrix;
use crate::privacy::Epsilon;

/// Slack on `delta` comparisons in exact audits.
pub const DELTA_SLACK: f64 = crate::tol::AUDIT_EXACT;
/// Slack on `epsilon` comparisons in channel audits.
pub const EPS_SLACK: f64 = crate::tol::AUDIT_CHANNEL;

/// Parameters the audit was run against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claim {
    pub epsilon: Epsilon,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

/// Where the largest likelihood ratio was found.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Classical {
        input: String,
        neighbor: String,
        outcome: String,
        /// Probability of `outcome` on `input`.
        p: f64,
        /// Probability of `outcome` on `neighbor`.
        q: f64,
    },
    Quantum(QuantumWitness),
}

impl Witness {
    /// `ln(p / q)` from the stored probabilities.
    pub fn epsilon(&self) -> Epsilon {
        let (p, q) = match self {
            Witness::Classical { p, q, .. } => (*p, *q),
            Witness::Quantum(w) => (w.p, w.q),
        };
        ratio_epsilon(p, q)
    }
}

pub(crate) fn ratio_epsilon(p: f64, q: f64) -> Epsilon {
    if q > 0.0 {
        Epsilon::from_ratio(p / q)
    } else if p > 0.0 {
        Epsilon::INFINITE
    } else {
        Epsilon::ZERO
    }
}

/// Search budget actually spent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchInfo {
    /// `[azimuth, polar]` of the projector grid, or `[samples, 1]` off qubits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    /// Input pairs examined (ordered pairs for classical audits).
    pub pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub eps_hat: Epsilon,
    /// Largest `delta` needed at the claimed epsilon.
    pub delta_hat: f64,
    pub satisfied: bool,
    pub claimed: Claim,
    pub witness: Option<Witness>,
    pub search: SearchInfo,
}

pub(crate) fn projector_from_bloch(n: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = crate::linalg::paulis();
    let m = &(&(&ComplexMatrix::identity(2) + &x.scale_real(n[0])) + &y.scale_real(n[1]))
        + &z.scale_real(n[2]);
    m.scale_real(0.5)
}
