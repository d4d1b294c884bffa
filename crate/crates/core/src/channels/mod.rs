//! Quantum operations in Kraus form.

mod bloch;
mod contraction;

use serde::{Deserialize, Serialize};

pub use bloch::{bloch_rep, BlochRep};
pub use contraction::{
    doeblin_check, doeblin_min_eigenvalue, doeblin_to_dobrushin, dobrushin_estimate, DobrushinEstimate,
    DobrushinMethod, DobrushinSearch,
};

use crate::error::{check_dim, check_unit, Error, Result};
use crate::linalg::{paulis, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::mechanisms::RandomStream;
use crate::{tol, C64};

/// Largest depolarizing dimension with a Heisenberg-Weyl Kraus set.
pub const MAX_DEPOLARIZING_DIM: usize = 8;

/// `rho -> sum_i B_i rho B_i^†`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<ComplexMatrix>,
    trace_preserving: bool,
}

impl KrausChannel {
    /// Validates shapes and `sum B^†B <= I` (equality when `trace_preserving`).
    pub fn new(ops: Vec<ComplexMatrix>, trace_preserving: bool) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::validation("a channel needs at least one Kraus operator"))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for op in &ops {
            if op.rows() != dim_out || op.cols() != dim_in {
                return Err(Error::validation(format!(
                    "Kraus operator is {}x{}, expected {dim_out}x{dim_in}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        let ch = Self {
            dim_in,
            dim_out,
            ops,
            trace_preserving,
        };
        ch.validate(tol::INVARIANT)?;
        Ok(ch)
    }

    /// Like [`KrausChannel::new`] but infers trace preservation.
    pub fn infer(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let mut ch = Self::new(ops, false)?;
        ch.trace_preserving = ch.completeness_defect() <= tol::INVARIANT;
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            ops: vec![ComplexMatrix::identity(dim)],
            trace_preserving: true,
        }
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u], true)
    }

    /// Checks the Kraus completeness invariant at `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let sum = self.completeness();
        let slack = HermitianMatrix::from_trusted(&ComplexMatrix::identity(self.dim_in) - &sum);
        let min = slack.min_eigenvalue();
        if min < -tol {
            return Err(Error::validation(format!(
                "Kraus operators are trace increasing (min eigenvalue of I - sum B^†B is {min:e})"
            )));
        }
        if self.trace_preserving {
            let defect = self.completeness_defect();
            if defect > tol {
                return Err(Error::validation(format!(
                    "Kraus operators are not trace preserving (|sum B^†B - I| = {defect:e})"
                )));
            }
        }
        Ok(())
    }

    /// `sum_i B_i^† B_i`.
    pub fn completeness(&self) -> ComplexMatrix {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim_in, self.dim_in), |acc, b| {
                &acc + &(&b.adjoint() * b)
            })
    }

    pub fn completeness_defect(&self) -> f64 {
        self.completeness()
            .max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Action on an arbitrary `dim_in x dim_in` operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() {
            return Err(Error::validation("channel input must be square"));
        }
        check_dim(self.dim_in, x.rows())?;
        Ok(self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim_out, self.dim_out), |acc, b| {
                &acc + &(&(b * x) * &b.adjoint())
            }))
    }

    /// Output state; requires a trace-preserving channel.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if !self.trace_preserving {
            return Err(Error::Precondition(
                "apply needs a trace-preserving channel; use apply_operator".into(),
            ));
        }
        Ok(DensityMatrix::from_trusted(self.apply_operator(rho.matrix())?))
    }
}

/// Kraus set of `outer ∘ inner`: all products `A_j B_i`.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    check_dim(outer.dim_in, inner.dim_out)?;
    let ops = outer
        .ops
        .iter()
        .flat_map(|a| inner.ops.iter().map(move |b| a * b))
        .collect();
    let ch = KrausChannel {
        dim_in: inner.dim_in,
        dim_out: outer.dim_out,
        ops,
        trace_preserving: outer.trace_preserving && inner.trace_preserving,
    };
    ch.validate(tol::INVARIANT)?;
    Ok(ch)
}

/// Choi matrix `sum_ij |i><j| ⊗ Phi(|i><j|)` (input factor first).
pub fn choi(channel: &KrausChannel) -> HermitianMatrix {
    let (din, dout) = (channel.dim_in, channel.dim_out);
    let mut out = ComplexMatrix::zeros(din * dout, din * dout);
    for i in 0..din {
        for j in 0..din {
            let mut eij = ComplexMatrix::zeros(din, din);
            eij[(i, j)] = C64::new(1.0, 0.0);
            let block = channel.apply_operator(&eij).expect("dimensions match");
            for k in 0..dout {
                for l in 0..dout {
                    out[(i * dout + k, j * dout + l)] = block[(k, l)];
                }
            }
        }
    }
    HermitianMatrix::from_trusted(out)
}

/// Declarative description of a channel; the JSON wire form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity {
        #[serde(default = "qubit")]
        dim: usize,
    },
    Depolarizing {
        p: f64,
        #[serde(default = "qubit")]
        dim: usize,
    },
    /// Generalized amplitude damping.
    Gad { p: f64, gamma: f64 },
    /// Phase damping.
    Pd { lambda: f64 },
    /// Phase-amplitude damping, `GAD ∘ PD`.
    Pad { p: f64, gamma: f64, lambda: f64 },
    Compose {
        outer: Box<ChannelSpec>,
        inner: Box<ChannelSpec>,
    },
    Kraus { dim: usize, ops: Vec<ComplexMatrix> },
}

fn qubit() -> usize {
    2
}

impl ChannelSpec {
    pub fn depolarizing(p: f64, dim: usize) -> Self {
        ChannelSpec::Depolarizing { p, dim }
    }

    pub fn gad(p: f64, gamma: f64) -> Self {
        ChannelSpec::Gad { p, gamma }
    }

    pub fn pd(lambda: f64) -> Self {
        ChannelSpec::Pd { lambda }
    }

    pub fn pad(p: f64, gamma: f64, lambda: f64) -> Self {
        ChannelSpec::Pad { p, gamma, lambda }
    }

    pub fn compose(outer: ChannelSpec, inner: ChannelSpec) -> Self {
        ChannelSpec::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }
}

/// Builds the Kraus representation of a spec.
pub fn build_channel(spec: &ChannelSpec) -> Result<KrausChannel> {
    match spec {
        ChannelSpec::Identity { dim } => {
            if *dim == 0 {
                return Err(Error::validation("dimension must be positive"));
            }
            Ok(KrausChannel::identity(*dim))
        }
        ChannelSpec::Depolarizing { p, dim } => depolarizing(*p, *dim),
        ChannelSpec::Gad { p, gamma } => gad(*p, *gamma),
        ChannelSpec::Pd { lambda } => phase_damping(*lambda),
        ChannelSpec::Pad { p, gamma, lambda } => {
            compose(&gad(*p, *gamma)?, &phase_damping(*lambda)?)
        }
        ChannelSpec::Compose { outer, inner } => compose(&build_channel(outer)?, &build_channel(inner)?),
        ChannelSpec::Kraus { dim, ops } => {
            if ops.iter().any(|op| op.cols() != *dim) {
                return Err(Error::validation(format!(
                    "Kraus operators must have {dim} columns"
                )));
            }
            KrausChannel::infer(ops.clone())
        }
    }
}

fn real_op(entries: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &entries).expect("2x2")
}

/// Depolarizing channel `p I/D + (1-p) rho`.
///
/// Qubits use the Pauli Kraus set; `2 < D <= 8` uses Heisenberg-Weyl
/// operators `X^a Z^b` with weight `p/D^2` (plus `1 - p` on the identity).
pub fn depolarizing(p: f64, dim: usize) -> Result<KrausChannel> {
    check_unit("p", p)?;
    if dim < 2 {
        return Err(Error::validation("depolarizing dimension must be at least 2"));
    }
    if dim > MAX_DEPOLARIZING_DIM {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "depolarizing Kraus sets are built for D <= 8",
        });
    }
    if p == 0.0 {
        return Ok(KrausChannel::identity(dim));
    }
    let ops = if dim == 2 {
        let [x, y, z] = paulis();
        let w = (p / 4.0).sqrt();
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt()),
            x.scale_real(w),
            y.scale_real(w),
            z.scale_real(w),
        ]
    } else {
        let d2 = (dim * dim) as f64;
        let mut ops = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let weight = if a == 0 && b == 0 {
                    1.0 - p + p / d2
                } else {
                    p / d2
                };
                ops.push(weyl(dim, a, b).scale_real(weight.sqrt()));
            }
        }
        ops
    };
    KrausChannel::new(ops, true)
}

/// `X^a Z^b` with `X|j> = |j+1>`, `Z|j> = w^j |j>`.
fn weyl(dim: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        let phase = std::f64::consts::TAU * ((b * j) % dim) as f64 / dim as f64;
        m[((j + a) % dim, j)] = C64::from_polar(1.0, phase);
    }
    m
}

/// Exact affine depolarizing map on an operator, `p Tr(X) I/D + (1-p) X`.
pub fn depolarize_exact(p: f64, x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows();
    let tr = x.trace();
    &ComplexMatrix::identity(d).scale(tr * (p / d as f64)) + &x.scale_real(1.0 - p)
}

/// Generalized amplitude damping with parameters `p` and `gamma`.
pub fn gad(p: f64, gamma: f64) -> Result<KrausChannel> {
    check_unit("p", p)?;
    check_unit("gamma", gamma)?;
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let (sg, sk) = (gamma.sqrt(), (1.0 - gamma).sqrt());
    let ops = vec![
        real_op([sp, 0.0, 0.0, sp * sk]),
        real_op([0.0, sp * sg, 0.0, 0.0]),
        real_op([sq * sk, 0.0, 0.0, sq]),
        real_op([0.0, 0.0, sq * sg, 0.0]),
    ];
    KrausChannel::new(ops, true)
}

/// Phase damping, `E0 = diag(1, sqrt(1-lambda))`, `E1 = diag(0, sqrt(lambda))`.
pub fn phase_damping(lambda: f64) -> Result<KrausChannel> {
    check_unit("lambda", lambda)?;
    let ops = vec![
        real_op([1.0, 0.0, 0.0, (1.0 - lambda).sqrt()]),
        real_op([0.0, 0.0, 0.0, lambda.sqrt()]),
    ];
    KrausChannel::new(ops, true)
}

/// Random trace-preserving channel from a random isometry with `n_ops`
/// Kraus blocks.
pub fn random_channel(dim: usize, n_ops: usize, rng: &mut RandomStream) -> KrausChannel {
    let rows = dim * n_ops;
    // Columns of the stacked isometry, orthonormalised by Gram-Schmidt.
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..rows)
            .map(|_| C64::new(rng.standard_normal(), rng.standard_normal()))
            .collect();
        for c in &cols {
            let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= ci * overlap;
            }
        }
        let norm = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let ops = (0..n_ops)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for (j, col) in cols.iter().enumerate() {
                    m[(i, j)] = col[k * dim + i];
                }
            }
            m
        })
        .collect();
    KrausChannel::new(ops, true).expect("isometry blocks are trace preserving")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random, trace_distance, PureState};

    fn states(seed: u64, n: usize, d: usize) -> Vec<DensityMatrix> {
        let mut rng = RandomStream::new(seed);
        (0..n).map(|_| random::density(d, &mut rng)).collect()
    }

    #[test]
    fn depolarizing_zero_is_identity() {
        let ch = build_channel(&ChannelSpec::depolarizing(0.0, 2)).unwrap();
        assert_eq!(ch.kraus_ops().len(), 1);
        assert_eq!(ch.kraus_ops()[0], ComplexMatrix::identity(2));
    }

    #[test]
    fn gad_is_trace_preserving_on_grid() {
        for i in 0..=10 {
            for j in 0..=10 {
                let ch = gad(i as f64 / 10.0, j as f64 / 10.0).unwrap();
                assert!(ch.completeness_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn printed_phase_damping_fails_validation() {
        // E0 = diag(1, sqrt(l)), E1 = diag(0, sqrt(l)) gives sum E^†E = diag(1, 2l).
        let l: f64 = 0.3;
        let ops = vec![
            ComplexMatrix::diag_real(&[1.0, l.sqrt()]),
            ComplexMatrix::diag_real(&[0.0, l.sqrt()]),
        ];
        let sum = KrausChannel::new(ops.clone(), false).unwrap().completeness();
        assert!((sum[(1, 1)].re - 2.0 * l).abs() < 1e-15);
        assert!(KrausChannel::new(ops, true).is_err());
        assert!(phase_damping(l).unwrap().completeness_defect() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(build_channel(&ChannelSpec::depolarizing(1.5, 2)).is_err());
        assert!(build_channel(&ChannelSpec::gad(0.5, -0.1)).is_err());
        assert!(matches!(
            build_channel(&ChannelSpec::depolarizing(0.5, 9)),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(build_channel(&ChannelSpec::depolarizing(0.5, 1)).is_err());
    }

    #[test]
    fn apply_examples() {
        let rho = states(1, 1, 2).remove(0);
        let id = KrausChannel::identity(2);
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let full = depolarizing(1.0, 2).unwrap();
        let out = full.apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-15);

        let half = depolarizing(0.5, 2).unwrap();
        let out = half.apply(&PureState::basis(2, 0).density()).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[0.75, 0.25])) < 1e-15);

        assert!(half.apply(&DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn weyl_depolarizing_matches_affine_form() {
        for d in 3..=MAX_DEPOLARIZING_DIM {
            let ch = depolarizing(0.37, d).unwrap();
            assert!(ch.completeness_defect() < 1e-12, "D = {d}");
            for rho in states(d as u64, 3, d) {
                let kraus = ch.apply(&rho).unwrap();
                let exact = depolarize_exact(0.37, rho.matrix());
                assert!(kraus.matrix().max_abs_diff(&exact) < 1e-12, "D = {d}");
            }
        }
    }

    #[test]
    fn compose_examples() {
        let e = gad(0.3, 0.6).unwrap();
        let id = KrausChannel::identity(2);
        let both = compose(&id, &e).unwrap();
        for rho in states(2, 5, 2) {
            let a = both.apply(&rho).unwrap();
            let b = e.apply(&rho).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
        }

        let pad = build_channel(&ChannelSpec::pad(0.3, 0.6, 0.2)).unwrap();
        let manual = compose(&gad(0.3, 0.6).unwrap(), &phase_damping(0.2).unwrap()).unwrap();
        for rho in states(3, 10, 2) {
            let a = pad.apply(&rho).unwrap();
            let b = gad(0.3, 0.6)
                .unwrap()
                .apply(&phase_damping(0.2).unwrap().apply(&rho).unwrap())
                .unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
            assert!(manual.apply(&rho).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-10);
        }

        let constant = compose(&depolarizing(1.0, 2).unwrap(), &e).unwrap();
        for rho in states(4, 5, 2) {
            let out = constant.apply(&rho).unwrap();
            assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-14);
        }

        assert!(compose(&KrausChannel::identity(3), &e).is_err());
    }

    #[test]
    fn channels_contract_trace_distance() {
        let specs = [
            ChannelSpec::depolarizing(0.3, 2),
            ChannelSpec::gad(0.2, 0.7),
            ChannelSpec::pd(0.4),
            ChannelSpec::pad(0.9, 0.1, 0.5),
        ];
        let st = states(5, 40, 2);
        for spec in &specs {
            let ch = build_channel(spec).unwrap();
            for pair in st.chunks(2) {
                let before = trace_distance(&pair[0], &pair[1]).unwrap();
                let after = trace_distance(&ch.apply(&pair[0]).unwrap(), &ch.apply(&pair[1]).unwrap()).unwrap();
                assert!(after <= before + 1e-9, "{spec:?}");
            }
        }
    }

    #[test]
    fn compose_is_associative_on_states() {
        let mut rng = RandomStream::new(9);
        let a = random_channel(2, 3, &mut rng);
        let b = random_channel(2, 2, &mut rng);
        let c = random_channel(2, 4, &mut rng);
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        for rho in states(10, 10, 2) {
            let l = left.apply(&rho).unwrap();
            let r = right.apply(&rho).unwrap();
            let seq = a.apply(&b.apply(&c.apply(&rho).unwrap()).unwrap()).unwrap();
            assert!(l.matrix().max_abs_diff(r.matrix()) < 1e-10);
            assert!(l.matrix().max_abs_diff(seq.matrix()) < 1e-10);
        }
    }

    #[test]
    fn choi_examples() {
        let c = choi(&KrausChannel::identity(2));
        let e = c.eigenvalues();
        assert!((e[3] - 2.0).abs() < 1e-12 && e[..3].iter().all(|l| l.abs() < 1e-12));

        let c = choi(&depolarizing(1.0, 2).unwrap());
        let expected = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(2).scale_real(0.5));
        assert!(c.matrix().max_abs_diff(&expected) < 1e-15);

        let mut rng = RandomStream::new(11);
        for _ in 0..10 {
            let ch = random_channel(2, 3, &mut rng);
            assert!(crate::linalg::is_psd(&choi(&ch), 1e-10));
        }
    }

    #[test]
    fn channel_json() {
        let text = r#"{"kind":"compose","outer":{"kind":"pad","p":0.5,"gamma":0.3,"lambda":0.1},"inner":{"kind":"depolarizing","p":0.2}}"#;
        let spec: ChannelSpec = serde_json::from_str(text).unwrap();
        assert_eq!(
            spec,
            ChannelSpec::compose(ChannelSpec::pad(0.5, 0.3, 0.1), ChannelSpec::depolarizing(0.2, 2))
        );
        let text = r#"{"kind":"kraus","dim":2,"ops":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let spec: ChannelSpec = serde_json::from_str(text).unwrap();
        let ch = build_channel(&spec).unwrap();
        assert!(ch.is_trace_preserving());
        assert!(serde_json::from_str::<ChannelSpec>(r#"{"kind":"gad","p":0.1}"#).is_err());
    }
}
