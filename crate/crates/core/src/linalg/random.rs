//! Seeded random states for searches and property tests.

use super::{ComplexMatrix, DensityMatrix, PureState};
use crate::mechanisms::RandomStream;
use crate::C64;

/// Haar-random pure state (normalised complex Gaussian vector).
pub fn pure_state(dim: usize, rng: &mut RandomStream) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.standard_normal(), rng.standard_normal()))
            .collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Random mixed state `G G^† / Tr(G G^†)` from a Ginibre matrix.
pub fn density(dim: usize, rng: &mut RandomStream) -> DensityMatrix {
    let g = ComplexMatrix::new(
        dim,
        dim,
        (0..dim * dim)
            .map(|_| C64::new(rng.standard_normal(), rng.standard_normal()))
            .collect(),
    )
    .expect("square Ginibre matrix");
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::from_trusted(gg.scale_real(1.0 / tr))
}

/// Uniform point on the unit 2-sphere.
pub fn unit_vector3(rng: &mut RandomStream) -> [f64; 3] {
    loop {
        let v = [rng.standard_normal(), rng.standard_normal(), rng.standard_normal()];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

/// Pure state orthogonal to `psi` (Gram-Schmidt on a random vector).
pub fn orthogonal_pure_state(psi: &PureState, rng: &mut RandomStream) -> PureState {
    loop {
        let phi = pure_state(psi.dim(), rng);
        let overlap = psi.inner(&phi).expect("same dimension");
        let v: Vec<C64> = phi
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(b, a)| b - a * overlap)
            .collect();
        if let Ok(out) = PureState::normalized(v) {
            return out;
        }
    }
}
