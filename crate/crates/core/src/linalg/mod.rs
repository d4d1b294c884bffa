//! Dense complex linear algebra for small quantum systems.

mod eigen;
mod matrix;
pub mod random;
mod states;

use serde::{Deserialize, Serialize};

pub use eigen::{hermitian_eigenvalues, symmetric_eigenvalues};
pub use matrix::{paulis, ComplexMatrix};
pub use states::{DensityMatrix, HermitianMatrix, Povm, PureState};

use crate::error::{check_dim, Result};
use crate::tol;

/// `(1/2) sum_i |lambda_i(A)|`.
pub fn trace_norm(a: &HermitianMatrix) -> f64 {
    0.5 * a.eigenvalues().iter().map(|l| l.abs()).sum::<f64>()
}

/// Trace distance `||rho - sigma||_tr`, clamped into `[0, 1]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let diff = HermitianMatrix::from_trusted(rho.matrix() - sigma.matrix());
    Ok(trace_norm(&diff).clamp(0.0, 1.0))
}

/// Born-rule outcome probabilities `Tr(E_i rho)`, clamped into `[0, 1]`.
pub fn povm_probabilities(m: &Povm, rho: &DensityMatrix) -> Result<Vec<f64>> {
    check_dim(m.dim(), rho.dim())?;
    let probs = m
        .elements()
        .iter()
        .map(|e| e.matrix().trace_of_product(rho.matrix()).re)
        .map(|p| {
            debug_assert!((-tol::INVARIANT..=1.0 + tol::INVARIANT).contains(&p));
            p.clamp(0.0, 1.0)
        })
        .collect();
    Ok(probs)
}

/// Minimum eigenvalue at least `-tol`.
pub fn is_psd(a: &HermitianMatrix, tol: f64) -> bool {
    a.min_eigenvalue() >= -tol
}

/// Which `||.||_inf` to evaluate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMode {
    /// Largest singular value.
    #[default]
    Operator,
    /// Maximum absolute row sum.
    MaxRowSum,
}

pub fn operator_norm_inf(a: &ComplexMatrix, mode: NormMode) -> f64 {
    match mode {
        NormMode::Operator => {
            let gram = HermitianMatrix::from_trusted(&a.adjoint() * a);
            let top = gram.eigenvalues().last().copied().unwrap_or(0.0);
            top.max(0.0).sqrt()
        }
        NormMode::MaxRowSum => (0..a.rows())
            .map(|i| (0..a.cols()).map(|j| a[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn plus() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(h), c(h)]).unwrap()
    }

    fn minus() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(h), c(-h)]).unwrap()
    }

    fn herm(entries: &[f64], d: usize) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_real(d, d, entries).unwrap()).unwrap()
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&herm(&[0.0; 4], 2)), 0.0);
        assert!((trace_norm(&herm(&[1.0, 0.0, 0.0, -1.0], 2)) - 1.0).abs() < 1e-15);
        let zero = PureState::basis(2, 0).density();
        let diff = zero.hermitian().difference(plus().density().hermitian()).unwrap();
        // Independent value: sqrt(1 - |<0|+>|^2) = 1/sqrt(2).
        assert!((trace_norm(&diff) - 0.707_106_781_186_547_5).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = PureState::basis(2, 0).density();
        let one = PureState::basis(2, 1).density();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        let d = trace_distance(&zero, &plus().density()).unwrap();
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let three = DensityMatrix::maximally_mixed(3);
        assert!(trace_distance(&zero, &three).is_err());
    }

    #[test]
    fn povm_examples() {
        let zero = PureState::basis(2, 0).density();
        let p = povm_probabilities(&Povm::computational(2), &zero).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);

        let half = herm(&[0.5, 0.0, 0.0, 0.5], 2);
        let trivial = Povm::new(vec![half.clone(), half], vec![0, 1]).unwrap();
        let rho = DensityMatrix::from_bloch([0.1, 0.2, 0.3]).unwrap();
        let p = povm_probabilities(&trivial, &rho).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        let pm = Povm::new(
            vec![
                HermitianMatrix::new(plus().density().matrix().clone()).unwrap(),
                HermitianMatrix::new(minus().density().matrix().clone()).unwrap(),
            ],
            vec![0, 1],
        )
        .unwrap();
        let p = povm_probabilities(&pm, &zero).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        assert!(povm_probabilities(&Povm::computational(3), &zero).is_err());
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&herm(&[1.0, 0.0, 0.0, 1.0], 2), 1e-10));
        assert!(!is_psd(&herm(&[1.0, 0.0, 0.0, -0.5], 2), 1e-10));
        // |Omega><Omega| with |Omega> = |00> + |11>.
        let omega = [c(1.0), c(0.0), c(0.0), c(1.0)];
        let proj = HermitianMatrix::new(ComplexMatrix::outer(&omega, &omega)).unwrap();
        assert!(is_psd(&proj, 1e-10));
        let eig = proj.eigenvalues();
        assert!((eig[3] - 2.0).abs() < 1e-12);
        assert!(eig[..3].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn operator_norm_examples() {
        let id = ComplexMatrix::identity(3);
        assert!((operator_norm_inf(&id, NormMode::Operator) - 1.0).abs() < 1e-14);
        let dep = ComplexMatrix::diag_real(&[0.75, 0.75, 0.75]);
        assert!((operator_norm_inf(&dep, NormMode::Operator) - 0.75).abs() < 1e-14);
        assert!((operator_norm_inf(&dep, NormMode::MaxRowSum) - 0.75).abs() < 1e-14);
        let nil = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((operator_norm_inf(&nil, NormMode::Operator) - 1.0).abs() < 1e-14);
        assert!((operator_norm_inf(&nil, NormMode::MaxRowSum) - 1.0).abs() < 1e-14);
    }
}
