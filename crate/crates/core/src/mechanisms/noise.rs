use serde::{Deserialize, Serialize};

use super::RandomStream;
use crate::error::{check_unit, Error, Result};
use crate::privacy::{DpParams, Epsilon};

/// Additive noise distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseSpec {
    None,
    Laplace { scale: f64 },
    Gaussian { variance: f64 },
}

impl NoiseSpec {
    pub fn laplace(scale: f64) -> Result<Self> {
        let s = NoiseSpec::Laplace { scale };
        s.validate()?;
        Ok(s)
    }

    pub fn gaussian(variance: f64) -> Result<Self> {
        let s = NoiseSpec::Gaussian { variance };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let v = match *self {
            NoiseSpec::None => return Ok(()),
            NoiseSpec::Laplace { scale } => scale,
            NoiseSpec::Gaussian { variance } => variance,
        };
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(Error::validation(format!("noise parameter {v} must be non-negative")))
        }
    }

    /// Variance of one draw.
    pub fn variance(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Laplace { scale } => 2.0 * scale * scale,
            NoiseSpec::Gaussian { variance } => variance,
        }
    }
}

/// One noise draw. Laplace uses a branch-symmetric inverse CDF on a single
/// open uniform, Gaussian uses Box-Muller on two uniforms. Degenerate
/// parameters return exactly 0 without consuming randomness.
pub fn sample_noise(spec: &NoiseSpec, stream: &mut RandomStream) -> f64 {
    match *spec {
        NoiseSpec::None => 0.0,
        NoiseSpec::Laplace { scale: 0.0 } => 0.0,
        NoiseSpec::Gaussian { variance: 0.0 } => 0.0,
        NoiseSpec::Laplace { scale } => {
            let u = stream.uniform_open();
            if u < 0.5 {
                scale * (2.0 * u).ln()
            } else {
                -scale * (2.0 * (1.0 - u)).ln()
            }
        }
        NoiseSpec::Gaussian { variance } => variance.sqrt() * stream.standard_normal(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Laplace,
    Gaussian,
}

fn check_sensitivity(delta_f: f64) -> Result<()> {
    if delta_f.is_finite() && delta_f >= 0.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("sensitivity {delta_f} must be non-negative")))
    }
}

fn finite_positive(eps: Epsilon) -> Result<f64> {
    let e = eps.value();
    if e.is_finite() && e > 0.0 {
        Ok(e)
    } else {
        Err(Error::validation(format!("epsilon = {eps} must be positive and finite")))
    }
}

/// Laplace scale `Delta / epsilon`.
pub fn laplace_scale(delta_f: f64, eps: f64) -> Result<f64> {
    check_sensitivity(delta_f)?;
    let e = finite_positive(Epsilon::new(eps)?)?;
    Ok(delta_f / e)
}

/// Gaussian variance `2 ln(1.25/delta) Delta^2 / epsilon^2`.
pub fn gaussian_variance(delta_f: f64, eps: f64, delta: f64) -> Result<f64> {
    check_sensitivity(delta_f)?;
    let e = finite_positive(Epsilon::new(eps)?)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::validation(format!("delta = {delta} must lie in (0, 1)")));
    }
    Ok(2.0 * (1.25 / delta).ln() * delta_f * delta_f / (e * e))
}

/// Density of `Laplace(0, b)` at `eta`.
pub fn laplace_density(eta: f64, b: f64) -> f64 {
    (-eta.abs() / b).exp() / (2.0 * b)
}

/// `sup_y f(y - v) / f(y - v')` over outputs `y` for `|v - v'| = Delta`.
///
/// Attained at any `y` outside the open interval between the two centres; we
/// evaluate it at `y = v` from the two log-densities.
pub fn laplace_worst_ratio(delta_f: f64, b: f64) -> f64 {
    let (v, v_prime) = (0.0f64, delta_f);
    let y = v;
    let log_ratio = ((y - v_prime).abs() - (y - v).abs()) / b;
    log_ratio.exp()
}

/// `value + eta` with `eta` calibrated to `dp` and sensitivity `delta_f`.
pub fn noisy_query(
    value: f64,
    delta_f: f64,
    dp: &DpParams,
    kind: NoiseKind,
    stream: &mut RandomStream,
) -> Result<f64> {
    let spec = match kind {
        NoiseKind::Laplace => {
            if dp.delta != 0.0 {
                return Err(Error::validation("Laplace calibration needs delta = 0"));
            }
            NoiseSpec::laplace(laplace_scale(delta_f, dp.epsilon.value())?)?
        }
        NoiseKind::Gaussian => {
            NoiseSpec::gaussian(gaussian_variance(delta_f, dp.epsilon.value(), dp.delta)?)?
        }
    };
    if delta_f == 0.0 {
        return Ok(value);
    }
    Ok(value + sample_noise(&spec, stream))
}

/// `(keep, flip)` probabilities of randomized response.
///
/// `flip` is computed as `1 - keep`, which is exact because `keep >= 1/2`, so
/// the pair sums to 1 exactly.
pub fn rr_probabilities(eps: Epsilon, delta: f64) -> Result<(f64, f64)> {
    check_unit("delta", delta)?;
    let keep = if eps.is_infinite() {
        1.0
    } else {
        let e = eps.exp();
        (e + delta) / (1.0 + e)
    };
    if !(0.0..=1.0).contains(&keep) {
        return Err(Error::validation(format!("keep probability {keep} outside [0, 1]")));
    }
    Ok((keep, 1.0 - keep))
}

/// Keeps each bit independently with probability `(e^eps + delta)/(1 + e^eps)`.
pub fn randomized_response(
    bits: &[u8],
    eps: Epsilon,
    delta: f64,
    stream: &mut RandomStream,
) -> Result<Vec<u8>> {
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::validation(format!("bit value {b} is not 0 or 1")));
    }
    let (keep, _) = rr_probabilities(eps, delta)?;
    Ok(bits
        .iter()
        .map(|&b| if stream.bernoulli(keep) { b } else { 1 - b })
        .collect())
}
