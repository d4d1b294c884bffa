use serde::Serialize;

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{operator_norm_inf, paulis, ComplexMatrix, NormMode};
use crate::tol;

/// Affine action `r -> T r + t` of a qubit channel on Bloch vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlochRep {
    pub transfer: [[f64; 3]; 3],
    pub shift: [f64; 3],
    pub unital: bool,
}

impl BlochRep {
    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        let mut out = self.shift;
        for (i, row) in self.transfer.iter().enumerate() {
            out[i] += row.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>();
        }
        out
    }

    pub fn transfer_matrix(&self) -> ComplexMatrix {
        let flat: Vec<f64> = self.transfer.iter().flatten().copied().collect();
        ComplexMatrix::from_real(3, 3, &flat).expect("3x3")
    }

    /// `||T||_inf` in the chosen mode.
    pub fn transfer_norm(&self, mode: NormMode) -> f64 {
        operator_norm_inf(&self.transfer_matrix(), mode)
    }
}

/// Pauli-transfer block and shift of a qubit channel, read off from the
/// channel's action on `I, X, Y, Z` and cross-checked on the six axis states.
pub fn bloch_rep(channel: &KrausChannel) -> Result<BlochRep> {
    if channel.dim_in() != 2 || channel.dim_out() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: channel.dim_in().max(channel.dim_out()),
            reason: "Bloch representation needs a qubit channel",
        });
    }
    let sigma = paulis();
    let bloch_of = |m: &ComplexMatrix| [0, 1, 2].map(|i| sigma[i].trace_of_product(m).re);

    let image_id = channel.apply_operator(&ComplexMatrix::identity(2))?;
    let shift = bloch_of(&image_id).map(|v| 0.5 * v);
    let mut transfer = [[0.0; 3]; 3];
    for (j, s) in sigma.iter().enumerate() {
        let col = bloch_of(&channel.apply_operator(s)?);
        for i in 0..3 {
            transfer[i][j] = 0.5 * col[i];
        }
    }
    let shift_norm = shift.iter().map(|x| x * x).sum::<f64>().sqrt();
    let unital = shift_norm <= tol::INVARIANT
        && image_id.max_abs_diff(&ComplexMatrix::identity(2)) <= tol::INVARIANT;
    let rep = BlochRep {
        transfer,
        shift,
        unital,
    };

    for k in 0..3 {
        for sign in [1.0, -1.0] {
            let axis = &ComplexMatrix::identity(2) + &sigma[k].scale_real(sign);
            let got = bloch_of(&channel.apply_operator(&axis.scale_real(0.5))?);
            let mut r = [0.0; 3];
            r[k] = sign;
            let want = rep.apply(r);
            let err = got
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if err > tol::INVARIANT {
                return Err(Error::validation(format!(
                    "affine Bloch map fails reconstruction on axis {k} (error {err:e})"
                )));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, gad, KrausChannel};

    #[test]
    fn depolarizing_shrinks_uniformly() {
        for p in [0.0, 0.25, 0.5, 1.0] {
            let rep = bloch_rep(&depolarizing(p, 2).unwrap()).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 - p } else { 0.0 };
                    assert!((rep.transfer[i][j] - want).abs() < 1e-15);
                }
                assert!(rep.shift[i].abs() < 1e-15);
            }
            assert!(rep.unital);
        }
    }

    #[test]
    fn unitary_is_rotation() {
        // Rotation by 0.7 rad about the y axis.
        let (c, s) = (0.35f64.cos(), 0.35f64.sin());
        let u = ComplexMatrix::from_real(2, 2, &[c, -s, s, c]).unwrap();
        let rep = bloch_rep(&KrausChannel::unitary(u).unwrap()).unwrap();
        assert!(rep.unital);
        assert!((rep.transfer_norm(NormMode::Operator) - 1.0).abs() < 1e-12);
        let t = rep.transfer_matrix();
        let gram = &t.adjoint() * &t;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn gad_full_p_is_amplitude_damping() {
        for g in [0.0, 0.3, 0.8] {
            let rep = bloch_rep(&gad(1.0, g).unwrap()).unwrap();
            let k = (1.0f64 - g).sqrt();
            let want = [[k, 0.0, 0.0], [0.0, k, 0.0], [0.0, 0.0, 1.0 - g]];
            for (row, want_row) in rep.transfer.iter().zip(&want) {
                for (a, b) in row.iter().zip(want_row) {
                    assert!((a - b).abs() < 1e-15);
                }
            }
            assert!((rep.shift[2] - g).abs() < 1e-15);
            assert_eq!(rep.unital, g == 0.0);
        }
    }

    #[test]
    fn rejects_qutrits() {
        assert!(bloch_rep(&KrausChannel::identity(3)).is_err());
    }
}
