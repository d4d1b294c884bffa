//! Closed-form privacy parameters and amplification rules.
//!
//! Everything here is plain arithmetic on validated parameters. An infinite
//! privacy loss is represented by [`Epsilon::INFINITE`], which every formula
//! degrades to instead of overflowing, and which serialises as `"inf"`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_unit, Error, Result};

/// Non-negative privacy loss, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epsilon(f64);

impl Epsilon {
    pub const ZERO: Epsilon = Epsilon(0.0);
    pub const INFINITE: Epsilon = Epsilon(f64::INFINITY);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() || v < 0.0 {
            return Err(Error::validation(format!("epsilon = {v} must be non-negative")));
        }
        Ok(Epsilon(v))
    }

    /// `ln(ratio)` floored at zero; infinite ratios map to the sentinel.
    pub fn from_ratio(ratio: f64) -> Self {
        if ratio.is_infinite() {
            Epsilon::INFINITE
        } else {
            Epsilon(ratio.ln().max(0.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `e^epsilon`, infinite for the sentinel.
    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Epsilon::new(v).map_err(serde::de::Error::custom),
            Repr::Str(s) if s == "inf" => Ok(Epsilon::INFINITE),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("invalid epsilon {s:?}"))),
        }
    }
}

/// `(epsilon, delta)` differential privacy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpParams {
    pub epsilon: Epsilon,
    pub delta: f64,
}

impl DpParams {
    pub fn new(epsilon: Epsilon, delta: f64) -> Result<Self> {
        check_unit("delta", delta)?;
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(Epsilon::new(epsilon)?, 0.0)
    }
}

/// `(tau, epsilon, delta)` quantum differential privacy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QdpParams {
    pub tau: f64,
    pub epsilon: Epsilon,
    pub delta: f64,
}

impl QdpParams {
    pub fn new(tau: f64, epsilon: Epsilon, delta: f64) -> Result<Self> {
        check_unit("tau", tau)?;
        check_unit("delta", delta)?;
        Ok(Self { tau, epsilon, delta })
    }
}

/// Privacy loss as a function of the trace-distance radius.
///
/// Curves need not stay below 1; the channel curves in this module do not.
pub trait EpsilonCurve {
    fn eval(&self, tau: f64) -> Epsilon;
}

impl<F: Fn(f64) -> Epsilon> EpsilonCurve for F {
    fn eval(&self, tau: f64) -> Epsilon {
        self(tau)
    }
}

/// Spot-checks monotonicity on `points + 1` evenly spaced radii in `[0, 1]`.
pub fn is_monotone(curve: &dyn EpsilonCurve, points: usize) -> bool {
    let vals: Vec<Epsilon> = (0..=points)
        .map(|k| curve.eval(k as f64 / points.max(1) as f64))
        .collect();
    vals.windows(2).all(|w| w[0] <= w[1])
}

/// `(0, sqrt(1 - kappa_hat))`: what an encoding with minimum adjacent kernel
/// `kappa_hat` guarantees for any downstream measurement.
pub fn encoding_adp_delta(kappa_hat: f64) -> Result<DpParams> {
    check_unit("kappa_hat", kappa_hat)?;
    DpParams::new(Epsilon::ZERO, (1.0 - kappa_hat).sqrt())
}

/// Transfers a QDP guarantee on encoded states back to the classical inputs.
///
/// Requires the neighbourhood `tau` to cover `sqrt(1 - kappa_hat)`, the
/// largest trace distance between encodings of neighbouring inputs.
pub fn quantum_to_classical(q: &QdpParams, kappa_hat: f64) -> Result<DpParams> {
    check_unit("kappa_hat", kappa_hat)?;
    let required = (1.0 - kappa_hat).sqrt();
    if q.tau < required - 1e-12 {
        return Err(Error::InsufficientNeighborhood { tau: q.tau, required });
    }
    DpParams::new(q.epsilon, q.delta)
}

fn check_positive_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("epsilon = {eps} must be positive and finite")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("t = {t} must be non-negative")))
    }
}

/// Laplace scale `(sqrt(1 - kappa_hat) + t) / epsilon` for the
/// encode-measure-average pipeline.
pub fn alg1_laplace_scale(kappa_hat: f64, t: f64, eps: f64) -> Result<f64> {
    check_unit("kappa_hat", kappa_hat)?;
    check_t(t)?;
    check_positive_eps(eps)?;
    Ok(((1.0 - kappa_hat).sqrt() + t) / eps)
}

/// Gaussian variance `2 ln(1.25/delta) (sqrt(1 - kappa_hat) + t)^2 / epsilon^2`.
pub fn alg1_gaussian_sigma2(kappa_hat: f64, t: f64, eps: f64, delta: f64) -> Result<f64> {
    check_unit("kappa_hat", kappa_hat)?;
    check_t(t)?;
    check_positive_eps(eps)?;
    if !(delta > 0.0 && delta < 1.25) {
        return Err(Error::validation(format!("delta = {delta} must lie in (0, 1.25)")));
    }
    let shift = (1.0 - kappa_hat).sqrt() + t;
    Ok(2.0 * (1.25 / delta).ln() * shift * shift / (eps * eps))
}

/// Failure probability of the mean-concentration step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureProb {
    /// `min(1, 4 exp(-m t^2))`.
    pub printed: f64,
    /// `min(1, 4 exp(-m t^2 / 2))`, from Hoeffding with deviation `t/2` per
    /// mean. Default in reports.
    pub conservative: f64,
}

pub fn alg1_failure_prob(m: u64, t: f64) -> Result<FailureProb> {
    if m == 0 {
        return Err(Error::validation("m must be at least 1"));
    }
    check_t(t)?;
    let m = m as f64;
    Ok(FailureProb {
        printed: (4.0 * (-m * t * t).exp()).min(1.0),
        conservative: (4.0 * (-m * t * t / 2.0).exp()).min(1.0),
    })
}

fn check_sampling(gamma: f64, m: u64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::validation(format!("Gamma = {gamma} must lie in (0, 1]")));
    }
    if m == 0 {
        return Err(Error::validation("m must be at least 1"));
    }
    let p = gamma * m as f64;
    if p > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "m * Gamma = {p} exceeds 1; the sampling bound needs it to be a probability"
        )));
    }
    Ok(p.min(1.0))
}

/// Amplification by l2 (Born-rule) subsampling:
/// `(ln(1 + (e^eps - 1) Gamma m), delta Gamma m)`.
pub fn subsample_amplify(base: &DpParams, gamma: f64, m: u64) -> Result<DpParams> {
    let p = check_sampling(gamma, m)?;
    let epsilon = if base.epsilon.is_infinite() {
        Epsilon::INFINITE
    } else {
        // ln_1p(p * expm1(eps)) keeps small epsilons exact.
        Epsilon::new((p * base.epsilon.value().exp_m1()).ln_1p())?
    };
    DpParams::new(epsilon, base.delta * p)
}

/// `(0, Gamma m)` for an arbitrary downstream algorithm.
pub fn subsample_adp(gamma: f64, m: u64) -> Result<DpParams> {
    let p = check_sampling(gamma, m)?;
    DpParams::new(Epsilon::ZERO, p)
}

/// Post-processing by a `gamma`-Dobrushin channel: `(tau, curve(gamma tau), 0)`.
pub fn qpp_amplify(curve: &dyn EpsilonCurve, gamma: f64, tau: f64) -> Result<QdpParams> {
    check_unit("gamma", gamma)?;
    check_unit("tau", tau)?;
    QdpParams::new(tau, curve.eval(gamma * tau), 0.0)
}

fn check_dim2(dim: usize) -> Result<()> {
    if dim >= 2 {
        Ok(())
    } else {
        Err(Error::validation("dimension must be at least 2"))
    }
}

/// Depolarizing channel: `ln(1 + ((1-p)/p) d D)`.
pub fn eps_depolarizing(p: f64, d: f64, dim: usize) -> Result<Epsilon> {
    check_unit("p", p)?;
    check_unit("d", d)?;
    check_dim2(dim)?;
    if d == 0.0 {
        return Ok(Epsilon::ZERO);
    }
    if p == 0.0 {
        return Ok(Epsilon::INFINITE);
    }
    Epsilon::new(((1.0 - p) / p * d * dim as f64).ln_1p())
}

/// Phase-amplitude damping:
/// `ln(1 + 2 d s / (1 - s))` with `s = sqrt(1-gamma) sqrt(1-lambda)`.
pub fn eps_pad(gamma: f64, lambda: f64, d: f64) -> Result<Epsilon> {
    check_unit("gamma", gamma)?;
    check_unit("lambda", lambda)?;
    check_unit("d", d)?;
    if d == 0.0 {
        return Ok(Epsilon::ZERO);
    }
    let s = (1.0 - gamma).sqrt() * (1.0 - lambda).sqrt();
    if s >= 1.0 {
        return Ok(Epsilon::INFINITE);
    }
    Epsilon::new((2.0 * d * s / (1.0 - s)).ln_1p())
}

/// Unital `gamma`-Dobrushin qubit channel: `ln(1 + 2 d gamma)`.
pub fn eps_unital_dobrushin(gamma: f64, d: f64) -> Result<Epsilon> {
    check_unit("gamma", gamma)?;
    check_unit("d", d)?;
    Epsilon::new((2.0 * d * gamma).ln_1p())
}

/// PAD after depolarizing, multiplicative form `(1 - p) eps_pad(gamma, lambda, d)`.
pub fn eps_pad_dep(p: f64, gamma: f64, lambda: f64, d: f64) -> Result<Epsilon> {
    check_unit("p", p)?;
    let pad = eps_pad(gamma, lambda, d)?;
    if p == 1.0 || pad == Epsilon::ZERO {
        return Ok(Epsilon::ZERO);
    }
    if pad.is_infinite() {
        return Ok(Epsilon::INFINITE);
    }
    Epsilon::new((1.0 - p) * pad.value())
}

/// PAD after depolarizing via post-processing amplification:
/// `eps_pad(gamma, lambda, (1 - p) d)`, the depolarizing channel being
/// `(1-p)`-Dobrushin.
pub fn eps_pad_dep_compositional(p: f64, gamma: f64, lambda: f64, d: f64) -> Result<Epsilon> {
    check_unit("p", p)?;
    check_unit("gamma", gamma)?;
    check_unit("lambda", lambda)?;
    let curve = |tau: f64| eps_pad(gamma, lambda, tau).unwrap_or(Epsilon::INFINITE);
    Ok(qpp_amplify(&curve, 1.0 - p, d)?.epsilon)
}
