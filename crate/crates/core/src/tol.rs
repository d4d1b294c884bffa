//! Default numeric tolerances shared by every module.
//!
//! Calls that take an explicit tolerance use these as their defaults; the
//! constants are the single knob property tests tune against.

/// Structural invariants: PSD, unit trace, normalisation, Kraus completeness.
pub const INVARIANT: f64 = 1e-10;

/// Analytic identities checked numerically (distance identities, sums).
pub const IDENTITY: f64 = 1e-9;

/// Entrywise Hermiticity check.
pub const HERMITIAN: f64 = 1e-12;

/// Comparison of complex dataset entries when deciding neighbourhood.
pub const ENTRY_EQ: f64 = 1e-12;

/// Slack on finite-model audits.
pub const AUDIT_EXACT: f64 = 1e-12;

/// Slack on channel audits against a claimed epsilon.
pub const AUDIT_CHANNEL: f64 = 1e-6;

/// Overridable bundle of the constants above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub invariant: f64,
    pub identity: f64,
    pub hermitian: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            invariant: INVARIANT,
            identity: IDENTITY,
            hermitian: HERMITIAN,
        }
    }
}
