use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigenvalues;
use super::matrix::{paulis, ComplexMatrix};
use crate::error::{check_dim, Error, Result};
use crate::{tol, C64};

/// Square matrix equal to its conjugate transpose within [`tol::HERMITIAN`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, tol::HERMITIAN)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::validation(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.max_abs_diff(&m.adjoint());
        if defect > tol {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (max |A - A^†| = {defect:e})"
            )));
        }
        Ok(Self(m))
    }

    /// Skips the Hermiticity check; callers guarantee it by construction.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.0.entries(), self.dim())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Unit-trace positive semidefinite operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(m)?;
        let trace = h.0.trace();
        if (trace.re - 1.0).abs() > tol::INVARIANT || trace.im.abs() > tol::INVARIANT {
            return Err(Error::validation(format!(
                "density matrix trace {trace} differs from 1"
            )));
        }
        let min = h.min_eigenvalue();
        if min < -tol::INVARIANT {
            return Err(Error::validation(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self(h))
    }

    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(HermitianMatrix::from_trusted(m))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self::from_trusted(ComplexMatrix::outer(&psi.amps, &psi.amps))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// Qubit state `(I + r.sigma)/2`; requires `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1.0 + tol::INVARIANT {
            return Err(Error::validation(format!(
                "Bloch vector norm {norm} exceeds 1"
            )));
        }
        let [x, y, z] = paulis();
        let m = &(&(&ComplexMatrix::identity(2) + &x.scale_real(r[0])) + &y.scale_real(r[1]))
            + &z.scale_real(r[2]);
        Ok(Self::from_trusted(m.scale_real(0.5)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }

    /// Bloch vector `(Tr[X rho], Tr[Y rho], Tr[Z rho])` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                dim: self.dim(),
                reason: "Bloch vectors are defined for qubits only",
            });
        }
        let p = paulis();
        Ok([0, 1, 2].map(|k| p[k].trace_of_product(self.matrix()).re))
    }

    /// `(1 - s) self + s other`.
    pub fn mix(&self, other: &Self, s: f64) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        crate::error::check_unit("mixing weight", s)?;
        Ok(Self::from_trusted(
            &self.matrix().scale_real(1.0 - s) + &other.matrix().scale_real(s),
        ))
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::validation("state vector must be non-empty"));
        }
        let norm2: f64 = amps.iter().map(C64::norm_sqr).sum();
        if (norm2 - 1.0).abs() > tol::INVARIANT {
            return Err(Error::validation(format!(
                "amplitudes have squared norm {norm2}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::validation("cannot normalise a zero vector"));
        }
        Ok(Self {
            amps: amps.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Positive operator-valued measure with labelled outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Povm {
    elements: Vec<HermitianMatrix>,
    labels: Vec<i64>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianMatrix>, labels: Vec<i64>) -> Result<Self> {
        Self::with_tolerance(elements, labels, tol::INVARIANT)
    }

    pub fn with_tolerance(elements: Vec<HermitianMatrix>, labels: Vec<i64>, tol: f64) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::validation("POVM needs at least one element"))?;
        let d = first.dim();
        if labels.len() != elements.len() {
            return Err(Error::validation("one label per POVM element required"));
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            check_dim(d, e.dim())?;
            let min = e.min_eigenvalue();
            if min < -tol {
                return Err(Error::validation(format!(
                    "POVM element {k} is not PSD (min eigenvalue {min:e})"
                )));
            }
            sum = &sum + e.matrix();
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if defect > tol {
            return Err(Error::validation(format!(
                "POVM elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Self { elements, labels })
    }

    /// Projective measurement in the computational basis, labels `0..d`.
    pub fn computational(d: usize) -> Self {
        let elements = (0..d)
            .map(|i| HermitianMatrix::from_trusted(PureState::basis(d, i).density().matrix().clone()))
            .collect();
        Self {
            elements,
            labels: (0..d as i64).collect(),
        }
    }

    /// `{E, I - E}` labelled `{1, 0}`.
    pub fn two_outcome(accept: HermitianMatrix) -> Result<Self> {
        let d = accept.dim();
        let reject = HermitianMatrix::from_trusted(&ComplexMatrix::identity(d) - accept.matrix());
        Self::new(vec![accept, reject], vec![1, 0])
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }
}

#[derive(Deserialize)]
struct PovmRepr {
    elements: Vec<HermitianMatrix>,
    labels: Vec<i64>,
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PovmRepr::deserialize(d)?;
        Povm::new(r.elements, r.labels).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.6, 0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.5, -0.5])).is_err());
        let skew = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(skew).is_err());
    }

    #[test]
    fn pure_state_normalisation() {
        assert!(PureState::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).is_ok());
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(PureState::normalized(vec![C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn bloch_round_trip() {
        let r = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch(r).unwrap();
        let back = rho.bloch_vector().unwrap();
        for k in 0..3 {
            assert!((back[k] - r[k]).abs() < 1e-15);
        }
        assert!(DensityMatrix::from_bloch([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn povm_rejects_incomplete_sets() {
        let e0 = HermitianMatrix::new(ComplexMatrix::diag_real(&[1.0, 0.0])).unwrap();
        assert!(Povm::new(vec![e0.clone()], vec![0]).is_err());
        let e1 = HermitianMatrix::new(ComplexMatrix::diag_real(&[0.0, 1.0])).unwrap();
        assert!(Povm::new(vec![e0.clone(), e1], vec![0]).is_err());
        assert!(Povm::two_outcome(e0).is_ok());
    }
}
