use serde::{Deserialize, Serialize};

use super::{ratio_epsilon, AuditReport, Claim, SearchInfo, Witness, DELTA_SLACK};
use crate::error::{Error, Result};
use crate::par::argmax_map;
use crate::privacy::{DpParams, Epsilon};
use crate::Parallelism;

const SUM_TOL: f64 = 1e-12;

/// Finite mechanism: one outcome distribution per input, plus the inputs
/// that count as neighbours.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismModel {
    inputs: Vec<String>,
    outcomes: Vec<String>,
    distributions: Vec<Vec<f64>>,
    #[serde(serialize_with = "serialize_pairs")]
    neighbors: Vec<(usize, usize)>,
}

fn check_distribution(p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: p.len(),
        });
    }
    if let Some(bad) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::validation(format!("probability {bad} is not a non-negative number")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::validation(format!("probabilities sum to {s}, expected 1")));
    }
    Ok(())
}

impl MechanismModel {
    pub fn new(
        inputs: Vec<String>,
        outcomes: Vec<String>,
        distributions: Vec<Vec<f64>>,
        neighbors: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if inputs.is_empty() || outcomes.is_empty() {
            return Err(Error::validation("model needs at least one input and one outcome"));
        }
        if distributions.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: distributions.len(),
            });
        }
        for d in &distributions {
            check_distribution(d, outcomes.len())?;
        }
        if let Some(&(a, b)) = neighbors.iter().find(|(a, b)| *a >= inputs.len() || *b >= inputs.len()) {
            return Err(Error::validation(format!("neighbour pair ({a}, {b}) out of range")));
        }
        Ok(Self {
            inputs,
            outcomes,
            distributions,
            neighbors,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.distributions
    }

    pub fn neighbors(&self) -> &[(usize, usize)] {
        &self.neighbors
    }

    pub fn distribution_of(&self, input: &str) -> Option<&[f64]> {
        self.inputs
            .iter()
            .position(|i| i == input)
            .map(|k| self.distributions[k].as_slice())
    }
}

fn serialize_pairs<S: serde::Serializer>(pairs: &[(usize, usize)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(pairs.iter().map(|&(a, b)| [a, b]))
}

/// JSON form: neighbours are named by input identifier.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    inputs: Vec<String>,
    outcomes: Vec<String>,
    distributions: Vec<Vec<f64>>,
    neighbors: Vec<(NameOrIndex, NameOrIndex)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NameOrIndex {
    Index(usize),
    Name(String),
}

impl<'de> Deserialize<'de> for MechanismModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ModelRepr::deserialize(d)?;
        let lookup = |n: &NameOrIndex| match n {
            NameOrIndex::Index(i) => Ok(*i),
            NameOrIndex::Name(s) => r
                .inputs
                .iter()
                .position(|i| i == s)
                .ok_or_else(|| D::Error::custom(format!("unknown input {s:?} in neighbours"))),
        };
        let pairs = r
            .neighbors
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        MechanismModel::new(r.inputs.clone(), r.outcomes.clone(), r.distributions.clone(), pairs)
            .map_err(D::Error::custom)
    }
}

/// `sum_o max(P(o) - e^eps Q(o), 0)`, the smallest `delta` for which the pair
/// satisfies the DP inequality at `eps`. For infinite `eps` only outcomes
/// with `Q(o) = 0` contribute.
pub fn hockey_stick(p: &[f64], q: &[f64], eps: Epsilon) -> Result<f64> {
    check_distribution(p, p.len())?;
    check_distribution(q, p.len())?;
    Ok(hockey_stick_unchecked(p, q, eps))
}

fn hockey_stick_unchecked(p: &[f64], q: &[f64], eps: Epsilon) -> f64 {
    let s: f64 = if eps.is_infinite() {
        p.iter().zip(q).filter(|(_, &qo)| qo == 0.0).map(|(po, _)| po).sum()
    } else {
        let c = eps.exp();
        p.iter().zip(q).map(|(po, qo)| (po - c * qo).max(0.0)).sum()
    };
    s.clamp(0.0, 1.0)
}

/// Exact audit over every neighbour pair in both directions.
pub fn audit_classical(model: &MechanismModel, claimed: &DpParams) -> AuditReport {
    audit_classical_with(model, claimed, Parallelism::default())
}

pub(crate) fn audit_classical_with(model: &MechanismModel, claimed: &DpParams, mode: Parallelism) -> AuditReport {
    let ordered: Vec<(usize, usize)> = model
        .neighbors
        .iter()
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .collect();
    let dists = &model.distributions;

    // Largest log-ratio, witnessed by (pair, outcome).
    let best = argmax_map(ordered.len(), mode, |k| {
        let (a, b) = ordered[k];
        let (p, q) = (&dists[a], &dists[b]);
        let mut top = (f64::NEG_INFINITY, 0usize);
        for (o, (po, qo)) in p.iter().zip(q).enumerate() {
            let v = ratio_epsilon(*po, *qo).value();
            if *po > 0.0 && v > top.0 {
                top = (v, o);
            }
        }
        (top.0, top.1)
    });
    let delta_hat = argmax_map(ordered.len(), mode, |k| {
        let (a, b) = ordered[k];
        (hockey_stick_unchecked(&dists[a], &dists[b], claimed.epsilon), ())
    })
    .map_or(0.0, |b| b.1);

    let (eps_hat, witness) = match best {
        Some((k, v, o)) if v > f64::NEG_INFINITY => {
            let (a, b) = ordered[k];
            let w = Witness::Classical {
                input: model.inputs[a].clone(),
                neighbor: model.inputs[b].clone(),
                outcome: model.outcomes[o].clone(),
                p: dists[a][o],
                q: dists[b][o],
            };
            (w.epsilon(), Some(w))
        }
        _ => (Epsilon::ZERO, None),
    };

    AuditReport {
        eps_hat,
        delta_hat,
        satisfied: delta_hat <= claimed.delta + DELTA_SLACK,
        claimed: Claim {
            epsilon: claimed.epsilon,
            delta: claimed.delta,
            tau: None,
        },
        witness,
        search: SearchInfo {
            grid: None,
            pairs: ordered.len(),
            seed: None,
            exact: true,
        },
    }
}
