//! Classical-to-quantum feature maps and the kernels they induce.
//!
//! Three encodings are supported:
//!
//! * **basis**: `x -> (1/sqrt n) sum_i |x_i>` over `b`-bit computational basis
//!   states. Duplicate entries accumulate amplitude and the result is
//!   renormalised, so the map is total.
//! * **amplitude**: a normalised complex vector is used directly as the state.
//! * **rotation**: `n` angles map to the `2^n`-dimensional product state whose
//!   amplitude on bitstring `q` is `prod_k cos(x_k)^{q_k} sin(x_k)^{1-q_k}`.
//!   Note the cosine sits on `q_k = 1`; the opposite convention is common
//!   elsewhere. `q_1` is the most significant bit of the basis index.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{trace_distance, PureState};
use crate::{tol, C64};

/// Largest state dimension exponent the encoders will allocate (`2^20`).
pub const MAX_QUBITS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Basis,
    Amplitude,
    Rotation,
}

impl EncodingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EncodingKind::Basis => "basis",
            EncodingKind::Amplitude => "amplitude",
            EncodingKind::Rotation => "rotation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub kind: EncodingKind,
    /// Register width, basis encoding only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bit_width: Option<u32>,
}

impl EncodingSpec {
    pub fn basis(bit_width: u32) -> Self {
        Self {
            kind: EncodingKind::Basis,
            bit_width: Some(bit_width),
        }
    }

    pub fn amplitude() -> Self {
        Self {
            kind: EncodingKind::Amplitude,
            bit_width: None,
        }
    }

    pub fn rotation() -> Self {
        Self {
            kind: EncodingKind::Rotation,
            bit_width: None,
        }
    }
}

/// A classical input vector in one of the three encoding modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Amplitude(Vec<C64>),
    Basis(Vec<u64>),
    Rotation(Vec<f64>),
}

impl Dataset {
    pub fn amplitude(values: Vec<C64>) -> Result<Self> {
        non_empty(values.len())?;
        let norm2: f64 = values.iter().map(C64::norm_sqr).sum();
        if (norm2 - 1.0).abs() > tol::INVARIANT {
            return Err(Error::validation(format!(
                "amplitude dataset has squared norm {norm2}, expected 1"
            )));
        }
        Ok(Dataset::Amplitude(values))
    }

    /// Real amplitudes, a common special case.
    pub fn amplitude_real(values: &[f64]) -> Result<Self> {
        Self::amplitude(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(values: Vec<u64>) -> Result<Self> {
        non_empty(values.len())?;
        Ok(Dataset::Basis(values))
    }

    pub fn rotation(values: Vec<f64>) -> Result<Self> {
        non_empty(values.len())?;
        if let Some(bad) = values
            .iter()
            .find(|v| !(0.0..=std::f64::consts::TAU).contains(*v))
        {
            return Err(Error::validation(format!(
                "rotation angle {bad} outside [0, 2pi]"
            )));
        }
        Ok(Dataset::Rotation(values))
    }

    pub fn kind(&self) -> EncodingKind {
        match self {
            Dataset::Amplitude(_) => EncodingKind::Amplitude,
            Dataset::Basis(_) => EncodingKind::Basis,
            Dataset::Rotation(_) => EncodingKind::Rotation,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Dataset::Amplitude(v) => v.len(),
            Dataset::Basis(v) => v.len(),
            Dataset::Rotation(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Born weights `|x_i|^2` of an amplitude dataset.
    pub fn born_weights(&self) -> Result<Vec<f64>> {
        match self {
            Dataset::Amplitude(v) => Ok(v.iter().map(C64::norm_sqr).collect()),
            _ => Err(Error::validation(
                "Born weights are defined for amplitude datasets only",
            )),
        }
    }
}

fn non_empty(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::validation("dataset must contain at least one entry"))
    } else {
        Ok(())
    }
}

fn check_mode(x: &Dataset, spec: &EncodingSpec) -> Result<()> {
    if x.kind() != spec.kind {
        return Err(Error::validation(format!(
            "{} dataset cannot use {} encoding",
            x.kind().as_str(),
            spec.kind.as_str()
        )));
    }
    Ok(())
}

/// Feature map `x -> |phi(x)>`.
pub fn encode(x: &Dataset, spec: &EncodingSpec) -> Result<PureState> {
    check_mode(x, spec)?;
    match x {
        Dataset::Amplitude(v) => PureState::new(v.clone()),
        Dataset::Basis(values) => {
            let b = spec
                .bit_width
                .ok_or_else(|| Error::validation("basis encoding needs a bit width"))?;
            if b == 0 {
                return Err(Error::validation("bit width must be positive"));
            }
            if b > MAX_QUBITS {
                return Err(Error::UnsupportedDimension {
                    dim: b as usize,
                    reason: "basis register wider than 20 bits",
                });
            }
            let dim = 1usize << b;
            let w = 1.0 / (values.len() as f64).sqrt();
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            for &v in values {
                if v >= dim as u64 {
                    return Err(Error::validation(format!(
                        "entry {v} does not fit in {b} bits"
                    )));
                }
                amps[v as usize] += w;
            }
            PureState::normalized(amps)
        }
        Dataset::Rotation(angles) => {
            let n = angles.len();
            if n as u32 > MAX_QUBITS {
                return Err(Error::UnsupportedDimension {
                    dim: n,
                    reason: "rotation encoding of more than 20 angles",
                });
            }
            let (cos, sin): (Vec<f64>, Vec<f64>) = angles.iter().map(|a| (a.cos(), a.sin())).unzip();
            let amps = (0..1usize << n)
                .map(|idx| {
                    let amp: f64 = (0..n)
                        .map(|k| {
                            let bit = (idx >> (n - 1 - k)) & 1;
                            if bit == 1 {
                                cos[k]
                            } else {
                                sin[k]
                            }
                        })
                        .product();
                    C64::new(amp, 0.0)
                })
                .collect();
            PureState::normalized(amps)
        }
    }
}

/// Kernel value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KernelValue(f64);

impl KernelValue {
    pub fn new(v: f64) -> Result<Self> {
        if !(-tol::INVARIANT..=1.0 + tol::INVARIANT).contains(&v) {
            return Err(Error::validation(format!("kernel value {v} outside [0, 1]")));
        }
        Ok(Self(v.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_pair(x: &Dataset, y: &Dataset) -> Result<()> {
    if x.kind() != y.kind() {
        return Err(Error::validation("datasets use different modes"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Quantum kernel `|<phi(x)|phi(x')>|^2`.
pub fn kernel(x: &Dataset, x_prime: &Dataset, spec: &EncodingSpec) -> Result<KernelValue> {
    check_pair(x, x_prime)?;
    let a = encode(x, spec)?;
    let b = encode(x_prime, spec)?;
    KernelValue::new(a.inner(&b)?.norm_sqr())
}

/// Closed-form minimum adjacent kernel: `1 - 1/n` (basis), `1 - Gamma`
/// (amplitude), `0` (rotation).
///
/// The basis value equals the *unsquared* overlap `(n-1)/n` of two
/// distinct-entry neighbours; the squared overlap that [`kernel`] computes
/// is `((n-1)/n)^2` (see [`basis_distinct_neighbor_kernel`]).
pub fn min_adjacent_kernel(spec: &EncodingSpec, n: usize, gamma: Option<f64>) -> Result<KernelValue> {
    if n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    match spec.kind {
        EncodingKind::Basis => KernelValue::new(1.0 - 1.0 / n as f64),
        EncodingKind::Amplitude => {
            let g = gamma.ok_or_else(|| {
                Error::validation("amplitude encoding needs Gamma(x) for its minimum kernel")
            })?;
            crate::error::check_unit("Gamma", g)?;
            KernelValue::new(1.0 - g)
        }
        EncodingKind::Rotation => KernelValue::new(0.0),
    }
}

/// Squared overlap of two basis encodings with distinct entries that differ
/// in one entry: `((n-1)/n)^2`.
pub fn basis_distinct_neighbor_kernel(n: usize) -> f64 {
    let r = (n as f64 - 1.0) / n as f64;
    r * r
}

/// `Gamma(x) = max_j |x_j|^2` of an amplitude dataset.
pub fn gamma(x: &Dataset) -> Result<f64> {
    match x {
        Dataset::Amplitude(v) if v.is_empty() => Err(Error::validation("empty dataset")),
        Dataset::Amplitude(v) => Ok(v.iter().map(C64::norm_sqr).fold(0.0, f64::max).min(1.0)),
        _ => Err(Error::validation(
            "Gamma is defined for amplitude datasets only",
        )),
    }
}

/// Datasets differing in exactly one entry.
pub fn are_neighbors(x: &Dataset, x_prime: &Dataset) -> Result<bool> {
    check_pair(x, x_prime)?;
    let differing = match (x, x_prime) {
        (Dataset::Amplitude(a), Dataset::Amplitude(b)) => a
            .iter()
            .zip(b)
            .filter(|(p, q)| (*p - *q).norm() > tol::ENTRY_EQ)
            .count(),
        (Dataset::Basis(a), Dataset::Basis(b)) => a.iter().zip(b).filter(|(p, q)| p != q).count(),
        (Dataset::Rotation(a), Dataset::Rotation(b)) => a
            .iter()
            .zip(b)
            .filter(|(p, q)| (*p - *q).abs() > tol::ENTRY_EQ)
            .count(),
        _ => unreachable!("modes checked above"),
    };
    Ok(differing == 1)
}

/// Smallest kernel over all neighbouring pairs in `datasets`, with the
/// largest trace distance between their encodings. `None` when no pair is
/// adjacent.
pub fn enumerate_adjacent(datasets: &[Dataset], spec: &EncodingSpec) -> Result<Option<AdjacentExtremes>> {
    let states = datasets
        .iter()
        .map(|x| encode(x, spec))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Option<AdjacentExtremes> = None;
    for i in 0..datasets.len() {
        for j in (i + 1)..datasets.len() {
            if !are_neighbors(&datasets[i], &datasets[j])? {
                continue;
            }
            let k = states[i].inner(&states[j])?.norm_sqr();
            let d = trace_distance(&states[i].density(), &states[j].density())?;
            let e = out.get_or_insert(AdjacentExtremes {
                min_kernel: k,
                max_trace_distance: d,
                pairs: 0,
            });
            e.min_kernel = e.min_kernel.min(k);
            e.max_trace_distance = e.max_trace_distance.max(d);
            e.pairs += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjacentExtremes {
    pub min_kernel: f64,
    pub max_trace_distance: f64,
    pub pairs: usize,
}

/// JSON form `{"mode": ..., "values": [...], "bit_width": b?}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetDoc {
    pub dataset: Dataset,
    pub bit_width: Option<u32>,
}

impl DatasetDoc {
    /// Encoding spec implied by the document's mode and bit width.
    pub fn spec(&self) -> EncodingSpec {
        EncodingSpec {
            kind: self.dataset.kind(),
            bit_width: self.bit_width,
        }
    }
}

impl Serialize for DatasetDoc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let values: Vec<Value> = match &self.dataset {
            Dataset::Amplitude(v) => v.iter().map(|z| serde_json::json!([z.re, z.im])).collect(),
            Dataset::Basis(v) => v.iter().map(|&b| Value::from(b)).collect(),
            Dataset::Rotation(v) => v.iter().map(|&a| Value::from(a)).collect(),
        };
        let mut map = serde_json::Map::new();
        map.insert("mode".into(), Value::from(self.dataset.kind().as_str()));
        map.insert("values".into(), Value::Array(values));
        if let Some(b) = self.bit_width {
            map.insert("bit_width".into(), Value::from(b));
        }
        Value::Object(map).serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetRepr {
    mode: EncodingKind,
    values: Vec<Value>,
    #[serde(default)]
    bit_width: Option<u32>,
}

fn complex_entry(v: &Value) -> Option<C64> {
    match v {
        Value::Number(n) => n.as_f64().map(|re| C64::new(re, 0.0)),
        Value::Array(a) if a.len() == 2 => Some(C64::new(a[0].as_f64()?, a[1].as_f64()?)),
        _ => None,
    }
}

impl<'de> Deserialize<'de> for DatasetDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DatasetRepr::deserialize(d)?;
        let bad = |what: &str| D::Error::custom(format!("invalid {what} entry"));
        let dataset = match r.mode {
            EncodingKind::Amplitude => {
                let v = r
                    .values
                    .iter()
                    .map(|e| complex_entry(e).ok_or_else(|| bad("amplitude")))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Dataset::amplitude(v)
            }
            EncodingKind::Basis => {
                let v = r
                    .values
                    .iter()
                    .map(|e| e.as_u64().ok_or_else(|| bad("basis")))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Dataset::basis(v)
            }
            EncodingKind::Rotation => {
                let v = r
                    .values
                    .iter()
                    .map(|e| e.as_f64().ok_or_else(|| bad("rotation")))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Dataset::rotation(v)
            }
        }
        .map_err(D::Error::custom)?;
        Ok(DatasetDoc {
            dataset,
            bit_width: r.bit_width,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn amp(v: &[f64]) -> Dataset {
        Dataset::amplitude_real(v).unwrap()
    }

    #[test]
    fn encode_examples() {
        let psi = encode(&amp(&[1.0, 0.0, 0.0, 0.0]), &EncodingSpec::amplitude()).unwrap();
        assert_eq!(psi, PureState::basis(4, 0));

        let psi = encode(&Dataset::basis(vec![0, 1]).unwrap(), &EncodingSpec::basis(1)).unwrap();
        for a in psi.amplitudes() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15);
        }

        let psi = encode(&Dataset::rotation(vec![0.0]).unwrap(), &EncodingSpec::rotation()).unwrap();
        assert_eq!(psi.amplitudes()[0].re, 0.0);
        assert_eq!(psi.amplitudes()[1].re, 1.0);
    }

    #[test]
    fn encode_errors() {
        assert!(Dataset::amplitude_real(&[1.0, 1.0]).is_err());
        let wide = Dataset::basis(vec![4]).unwrap();
        assert!(encode(&wide, &EncodingSpec::basis(2)).is_err());
        assert!(encode(&wide, &EncodingSpec::amplitude()).is_err());
        assert!(Dataset::rotation(vec![7.0]).is_err());
    }

    #[test]
    fn duplicate_basis_entries_merge() {
        let psi = encode(&Dataset::basis(vec![2, 2, 1]).unwrap(), &EncodingSpec::basis(2)).unwrap();
        let a = psi.amplitudes();
        assert!((a[2].re / a[1].re - 2.0).abs() < 1e-14);
        let norm: f64 = a.iter().map(C64::norm_sqr).sum();
        assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_examples() {
        let x = amp(&[0.6, 0.8]);
        assert!((kernel(&x, &x, &EncodingSpec::amplitude()).unwrap().value() - 1.0).abs() < 1e-12);

        let r0 = Dataset::rotation(vec![0.0]).unwrap();
        let r1 = Dataset::rotation(vec![FRAC_PI_2]).unwrap();
        assert!(kernel(&r0, &r1, &EncodingSpec::rotation()).unwrap().value() < 1e-30);

        let a = Dataset::basis(vec![0, 1]).unwrap();
        let b = Dataset::basis(vec![0, 2]).unwrap();
        let k = kernel(&a, &b, &EncodingSpec::basis(2)).unwrap().value();
        assert!((k - 0.25).abs() < 1e-14);

        let short = Dataset::basis(vec![0]).unwrap();
        assert!(kernel(&a, &short, &EncodingSpec::basis(2)).is_err());
    }

    #[test]
    fn min_adjacent_kernel_table() {
        let k = min_adjacent_kernel(&EncodingSpec::basis(3), 4, None).unwrap();
        assert_eq!(k.value(), 0.75);
        let k = min_adjacent_kernel(&EncodingSpec::amplitude(), 2, Some(0.64)).unwrap();
        assert!((k.value() - 0.36).abs() < 1e-15);
        let k = min_adjacent_kernel(&EncodingSpec::rotation(), 5, None).unwrap();
        assert_eq!(k.value(), 0.0);
        assert!(min_adjacent_kernel(&EncodingSpec::amplitude(), 2, None).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma(&amp(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap() - 0.5).abs() < 1e-15);
        assert!((gamma(&amp(&[0.6, 0.8])).unwrap() - 0.64).abs() < 1e-15);
        let u = vec![0.1; 100];
        assert!((gamma(&amp(&u)).unwrap() - 0.01).abs() < 1e-15);
        assert!(gamma(&Dataset::basis(vec![1]).unwrap()).is_err());
    }

    #[test]
    fn neighbour_examples() {
        let x = Dataset::basis(vec![1, 2, 3, 4]).unwrap();
        assert!(!are_neighbors(&x, &x).unwrap());
        let y = Dataset::basis(vec![1, 2, 7, 4]).unwrap();
        assert!(are_neighbors(&x, &y).unwrap());
        let z = Dataset::basis(vec![1, 9, 7, 4]).unwrap();
        assert!(!are_neighbors(&x, &z).unwrap());
        assert!(are_neighbors(&x, &Dataset::basis(vec![1]).unwrap()).is_err());
    }

    #[test]
    fn dataset_json_round_trip() {
        let text = r#"{"bit_width":3,"mode":"basis","values":[1,5,2]}"#;
        let doc: DatasetDoc = serde_json::from_str(text).unwrap();
        assert_eq!(doc.spec(), EncodingSpec::basis(3));
        assert_eq!(serde_json::to_string(&doc).unwrap(), text);

        let text = r#"{"mode":"amplitude","values":[[0.5,0.0],[0.0,-0.5],[0.5,0.0],[0.5,0.0]]}"#;
        let doc: DatasetDoc = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&doc).unwrap(), text);

        assert!(serde_json::from_str::<DatasetDoc>(r#"{"mode":"amplitude","values":[1,1]}"#).is_err());
    }
}
