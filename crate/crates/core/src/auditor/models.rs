use serde::Serialize;

use super::{audit_classical, AuditReport, MechanismModel};
use crate::encodings::{are_neighbors, encode, gamma, Dataset, EncodingSpec};
use crate::error::Result;
use crate::linalg::{povm_probabilities, Povm};
use crate::mechanisms::{subsampled_model, RecordDomain, SampleMechanism};
use crate::privacy::{subsample_amplify, DpParams};

/// "Encode, then measure once with `povm`" as a finite mechanism over
/// `datasets`; neighbours are the pairs differing in one entry.
pub fn encoding_measurement_model(datasets: &[Dataset], spec: &EncodingSpec, povm: &Povm) -> Result<MechanismModel> {
    let mut dists = Vec::with_capacity(datasets.len());
    for x in datasets {
        dists.push(povm_probabilities(povm, &encode(x, spec)?.density())?);
    }
    // Clamping in the Born rule can leave sums a few ulps away from 1.
    for d in &mut dists {
        let s: f64 = d.iter().sum();
        d.iter_mut().for_each(|p| *p /= s);
    }
    let mut pairs = Vec::new();
    for i in 0..datasets.len() {
        for j in i + 1..datasets.len() {
            if are_neighbors(&datasets[i], &datasets[j])? {
                pairs.push((i, j));
            }
        }
    }
    let names = datasets.iter().map(dataset_name).collect();
    let outcomes = povm.labels().iter().map(|l| l.to_string()).collect();
    MechanismModel::new(names, outcomes, dists, pairs)
}

fn dataset_name(x: &Dataset) -> String {
    match x {
        Dataset::Basis(v) => format!("{v:?}"),
        Dataset::Rotation(v) => format!("{v:?}"),
        Dataset::Amplitude(v) => format!("{:?}", v.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>()),
    }
}

/// Subsampling audit: exact model plus the bound it was checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsamplingAudit {
    pub mechanism: String,
    pub gamma: f64,
    pub m: usize,
    pub base: DpParams,
    /// `subsample_amplify(base, gamma, m)`.
    pub bound: DpParams,
    pub report: AuditReport,
}

/// Builds the exact l2-subsampled model of `base` and audits it against the
/// amplified parameters.
pub fn audit_subsampling_theorem(
    x: &Dataset,
    base: &dyn SampleMechanism,
    base_dp: &DpParams,
    m: usize,
    domain: &RecordDomain,
) -> Result<SubsamplingAudit> {
    let g = gamma(x)?;
    let bound = subsample_amplify(base_dp, g, m as u64)?;
    let model = subsampled_model(x, base, m, domain)?;
    let report = audit_classical(&model, &bound);
    Ok(SubsamplingAudit {
        mechanism: base.name(),
        gamma: g,
        m,
        base: *base_dp,
        bound,
        report,
    })
}
