use super::noise::rr_probabilities;
use super::RandomStream;
use crate::auditor::MechanismModel;
use crate::encodings::Dataset;
use crate::error::{Error, Result};
use crate::privacy::Epsilon;

/// Largest number of index tuples (and of record vectors) enumerated exactly.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// `m` independent Born-rule draws of an index (0-based) from `|x_i|^2`.
pub fn l2_sample(x: &Dataset, m: usize, stream: &mut RandomStream) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::validation("m must be at least 1"));
    }
    let w = x.born_weights()?;
    let mut cum = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    for p in &w {
        acc += p;
        cum.push(acc);
    }
    // Rounding may leave the total a hair below 1; fall back to the last
    // index that carries weight.
    let last = w.iter().rposition(|&p| p > 0.0).expect("normalised dataset");
    Ok((0..m)
        .map(|_| {
            let u = stream.uniform() * acc;
            cum.iter().position(|&c| u < c).unwrap_or(last)
        })
        .collect())
}

fn power(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

fn check_budget(base: usize, exp: usize) -> Result<()> {
    let required = power(base, exp);
    if required > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded {
            required,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Digits of `index` in base `radix`, most significant first.
fn digits(mut index: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % radix;
        index /= radix;
    }
    out
}

/// Probability of every index tuple in `[n]^m` (first position most
/// significant), i.e. products of Born weights.
pub fn tuple_weights(x: &Dataset, m: usize) -> Result<Vec<f64>> {
    let w = x.born_weights()?;
    if m == 0 {
        return Err(Error::validation("m must be at least 1"));
    }
    check_budget(w.len(), m)?;
    let total = power(w.len(), m) as usize;
    Ok((0..total)
        .map(|t| digits(t, w.len(), m).iter().map(|&i| w[i]).product())
        .collect())
}

/// All record vectors of a fixed-size table whose rows take values in
/// `0..values`. Neighbours differ in exactly one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordDomain {
    pub rows: usize,
    pub values: usize,
}

impl RecordDomain {
    pub fn binary(rows: usize) -> Self {
        Self { rows, values: 2 }
    }

    pub fn records(&self) -> Result<Vec<Vec<u64>>> {
        if self.rows == 0 || self.values == 0 {
            return Err(Error::validation("record domain must be non-empty"));
        }
        check_budget(self.values, self.rows)?;
        let total = power(self.values, self.rows) as usize;
        Ok((0..total)
            .map(|r| digits(r, self.values, self.rows).into_iter().map(|d| d as u64).collect())
            .collect())
    }

    /// Index pairs `(a, b)`, `a < b`, of records differing in one row.
    pub fn neighbor_pairs(records: &[Vec<u64>]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..records.len() {
            for b in a + 1..records.len() {
                let diff = records[a].iter().zip(&records[b]).filter(|(x, y)| x != y).count();
                if diff == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// A mechanism run on the `m` sampled rows, each given as `(row, record)`.
pub trait SampleMechanism: Sync {
    fn name(&self) -> String;

    fn check(&self, _m: usize, _values: usize) -> Result<()> {
        Ok(())
    }

    fn outcomes(&self, m: usize, values: usize) -> Vec<String>;

    fn distribution(&self, sample: &[(usize, u64)], values: usize) -> Vec<f64>;
}

fn tuple_labels(m: usize, values: usize) -> Vec<String> {
    (0..power(values, m) as usize)
        .map(|o| {
            digits(o, values, m)
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(if values > 10 { "," } else { "" })
        })
        .collect()
}

fn value_index(values_seen: impl Iterator<Item = u64>, radix: usize) -> usize {
    values_seen.fold(0usize, |acc, v| acc * radix + v as usize)
}

fn require_binary(values: usize) -> Result<()> {
    if values == 2 {
        Ok(())
    } else {
        Err(Error::validation("randomized response needs binary records"))
    }
}

/// Randomized response applied independently to every sampled value, so a
/// row drawn twice gets two independent coins.
#[derive(Debug, Clone, Copy)]
pub struct PerSampleResponse {
    pub eps: Epsilon,
}

impl SampleMechanism for PerSampleResponse {
    fn name(&self) -> String {
        format!("per-sample randomized response (eps = {})", self.eps)
    }

    fn check(&self, _m: usize, values: usize) -> Result<()> {
        require_binary(values)
    }

    fn outcomes(&self, m: usize, values: usize) -> Vec<String> {
        tuple_labels(m, values)
    }

    fn distribution(&self, sample: &[(usize, u64)], _values: usize) -> Vec<f64> {
        let (keep, flip) = rr_probabilities(self.eps, 0.0).expect("valid epsilon");
        let m = sample.len();
        (0..1usize << m)
            .map(|o| {
                let bits = digits(o, 2, m);
                sample
                    .iter()
                    .zip(&bits)
                    .map(|(&(_, r), &b)| if b as u64 == r { keep } else { flip })
                    .product()
            })
            .collect()
    }
}

/// Randomized response with one coin per distinct sampled row: every copy of
/// a row reports the same (possibly flipped) bit. Changing one row then
/// changes one coin's input, so the mechanism is `eps`-DP in the row.
#[derive(Debug, Clone, Copy)]
pub struct PerRowResponse {
    pub eps: Epsilon,
}

impl SampleMechanism for PerRowResponse {
    fn name(&self) -> String {
        format!("per-row randomized response (eps = {})", self.eps)
    }

    fn check(&self, _m: usize, values: usize) -> Result<()> {
        require_binary(values)
    }

    fn outcomes(&self, m: usize, values: usize) -> Vec<String> {
        tuple_labels(m, values)
    }

    fn distribution(&self, sample: &[(usize, u64)], _values: usize) -> Vec<f64> {
        let (keep, flip) = rr_probabilities(self.eps, 0.0).expect("valid epsilon");
        let m = sample.len();
        (0..1usize << m)
            .map(|o| {
                let bits = digits(o, 2, m);
                let mut p = 1.0;
                let mut seen: Vec<(usize, usize)> = Vec::new();
                for (&(row, r), &b) in sample.iter().zip(&bits) {
                    match seen.iter().find(|(sr, _)| *sr == row) {
                        Some(&(_, sb)) if sb != b => return 0.0,
                        Some(_) => {}
                        None => {
                            seen.push((row, b));
                            p *= if b as u64 == r { keep } else { flip };
                        }
                    }
                }
                p
            })
            .collect()
    }
}

/// Outputs the sampled values verbatim.
#[derive(Debug, Clone, Copy)]
pub struct IdentityOutput;

impl SampleMechanism for IdentityOutput {
    fn name(&self) -> String {
        "identity output".into()
    }

    fn outcomes(&self, m: usize, values: usize) -> Vec<String> {
        tuple_labels(m, values)
    }

    fn distribution(&self, sample: &[(usize, u64)], values: usize) -> Vec<f64> {
        let mut out = vec![0.0; power(values, sample.len()) as usize];
        out[value_index(sample.iter().map(|s| s.1), values)] = 1.0;
        out
    }
}

/// Ignores its input.
#[derive(Debug, Clone, Copy)]
pub struct ConstantOutput;

impl SampleMechanism for ConstantOutput {
    fn name(&self) -> String {
        "constant output".into()
    }

    fn outcomes(&self, _m: usize, _values: usize) -> Vec<String> {
        vec!["constant".into()]
    }

    fn distribution(&self, _sample: &[(usize, u64)], _values: usize) -> Vec<f64> {
        vec![1.0]
    }
}

/// Arbitrary mechanism on value tuples, given as one outcome distribution
/// per tuple (first sampled value most significant).
#[derive(Debug, Clone)]
pub struct TableMechanism {
    pub outcomes: Vec<String>,
    pub table: Vec<Vec<f64>>,
}

impl SampleMechanism for TableMechanism {
    fn name(&self) -> String {
        "table mechanism".into()
    }

    fn check(&self, m: usize, values: usize) -> Result<()> {
        let rows = power(values, m);
        if self.table.len() as u128 != rows {
            return Err(Error::validation(format!(
                "table has {} rows, expected {rows}",
                self.table.len()
            )));
        }
        for row in &self.table {
            if row.len() != self.outcomes.len() {
                return Err(Error::validation("table row length differs from outcome count"));
            }
        }
        Ok(())
    }

    fn outcomes(&self, _m: usize, _values: usize) -> Vec<String> {
        self.outcomes.clone()
    }

    fn distribution(&self, sample: &[(usize, u64)], values: usize) -> Vec<f64> {
        self.table[value_index(sample.iter().map(|s| s.1), values)].clone()
    }
}

/// Exact outcome distribution of "l2-sample `m` rows, then run `base`" on
/// every record vector of `domain`; neighbours differ in one record.
///
/// The sampling weights come from the amplitude dataset `x` and are the same
/// for every record vector.
pub fn subsampled_model(
    x: &Dataset,
    base: &dyn SampleMechanism,
    m: usize,
    domain: &RecordDomain,
) -> Result<MechanismModel> {
    let n = x.len();
    if domain.rows != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: domain.rows,
        });
    }
    base.check(m, domain.values)?;
    let weights = tuple_weights(x, m)?;
    let records = domain.records()?;
    let outcomes = base.outcomes(m, domain.values);
    let tuples: Vec<(Vec<usize>, f64)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(t, &w)| (digits(t, n, m), w))
        .collect();

    let dists: Vec<Vec<f64>> = records
        .iter()
        .map(|r| {
            let mut acc = vec![0.0; outcomes.len()];
            for (idx, w) in &tuples {
                let sample: Vec<(usize, u64)> = idx.iter().map(|&i| (i, r[i])).collect();
                for (a, p) in acc.iter_mut().zip(base.distribution(&sample, domain.values)) {
                    *a += w * p;
                }
            }
            acc
        })
        .collect();

    let names = records
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    let pairs = RecordDomain::neighbor_pairs(&records);
    MechanismModel::new(names, outcomes, dists, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_sampling_examples() {
        let mut s = RandomStream::new(4);
        let x = Dataset::amplitude_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(l2_sample(&x, 500, &mut s).unwrap().iter().all(|&i| i == 0));

        let x = Dataset::amplitude_real(&[0.6, 0.8]).unwrap();
        let n = 100_000;
        let hits = l2_sample(&x, n, &mut s).unwrap().iter().filter(|&&i| i == 1).count();
        let f = hits as f64 / n as f64;
        assert!((f - 0.64).abs() < 3.0 * (0.64 * 0.36 / n as f64).sqrt());

        assert!(l2_sample(&Dataset::basis(vec![1]).unwrap(), 1, &mut s).is_err());
    }

    #[test]
    fn tuple_weight_example() {
        let x = Dataset::amplitude_real(&[0.6, 0.8]).unwrap();
        let w = tuple_weights(&x, 2).unwrap();
        for (a, b) in w.iter().zip([0.1296, 0.2304, 0.2304, 0.4096]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let big = Dataset::amplitude_real(&vec![0.1; 100]).unwrap();
        assert!(matches!(tuple_weights(&big, 4), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn identity_output_marginal() {
        let x = Dataset::amplitude_real(&[std::f64::consts::FRAC_1_SQRT_2; 2]).unwrap();
        let model = subsampled_model(&x, &IdentityOutput, 1, &RecordDomain::binary(2)).unwrap();
        // Record vector (0, 1) is input index 1.
        let d = &model.distributions()[1];
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn point_mass_dataset_reduces_to_base() {
        let x = Dataset::amplitude_real(&[1.0, 0.0, 0.0]).unwrap();
        let base = PerSampleResponse { eps: Epsilon::new(3f64.ln()).unwrap() };
        let model = subsampled_model(&x, &base, 1, &RecordDomain::binary(3)).unwrap();
        for (r, d) in model.inputs().iter().zip(model.distributions()) {
            let first = r.starts_with('1');
            let expect = if first { [0.25, 0.75] } else { [0.75, 0.25] };
            assert!((d[0] - expect[0]).abs() < 1e-15 && (d[1] - expect[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn per_row_response_shares_coins() {
        let base = PerRowResponse { eps: Epsilon::new(3f64.ln()).unwrap() };
        let same = base.distribution(&[(0, 1), (0, 1)], 2);
        assert_eq!(same[1], 0.0);
        assert_eq!(same[2], 0.0);
        assert!((same[3] - 0.75).abs() < 1e-15);
        let apart = base.distribution(&[(0, 1), (1, 1)], 2);
        assert!((apart[3] - 0.5625).abs() < 1e-15);
        assert!((apart.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn table_mechanism_checks_shape() {
        let t = TableMechanism {
            outcomes: vec!["a".into(), "b".into()],
            table: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert!(t.check(1, 2).is_ok());
        assert!(t.check(2, 2).is_err());
    }
}
