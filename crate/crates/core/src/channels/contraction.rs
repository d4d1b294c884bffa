//! Mixing conditions: Dobrushin contraction and Doeblin minorisation.

use serde::{Deserialize, Serialize};

use super::{bloch_rep, choi, KrausChannel};
use crate::error::{check_dim, check_unit, Error, Result};
use crate::linalg::{self, random, trace_distance, ComplexMatrix, DensityMatrix, HermitianMatrix, NormMode, PureState};
use crate::mechanisms::RandomStream;
use crate::par::{argmax_map, Parallelism};
use crate::sphere::{direction, refine, SphereGrid};
use crate::C64;

/// Search budget for [`dobrushin_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DobrushinSearch {
    pub azimuth: usize,
    pub polar: usize,
    pub refine_iters: usize,
    /// Orthogonal pairs sampled for `dim > 2`, and mixed pairs for the full search.
    pub samples: usize,
    /// Additionally sample arbitrary mixed-state pairs as a sanity check.
    pub full_search: bool,
    /// Use `||T||_inf` directly for unital qubit channels.
    pub unital_shortcut: bool,
    pub seed: u64,
    pub parallelism: Parallelism,
}

impl Default for DobrushinSearch {
    fn default() -> Self {
        Self {
            azimuth: 64,
            polar: 32,
            refine_iters: 20,
            samples: 4096,
            full_search: false,
            unital_shortcut: true,
            seed: 0,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DobrushinMethod {
    UnitalShortcut,
    BlochGrid,
    OrthogonalPairs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DobrushinEstimate {
    pub value: f64,
    pub method: DobrushinMethod,
    /// Bloch direction `n` of the maximising antipodal pair (qubit grid only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_search_max: Option<f64>,
}

/// Estimates `sup ||T(rho) - T(sigma)||_tr / ||rho - sigma||_tr`.
///
/// Unital qubit channels return `||T||_inf` of their Pauli-transfer block.
/// Otherwise the supremum is searched over orthogonal pure-state pairs
/// (antipodal Bloch pairs for qubits), whose differences are the extreme
/// points of the traceless trace-norm ball. Result clamped into `[0, 1]`.
pub fn dobrushin_estimate(channel: &KrausChannel, search: &DobrushinSearch) -> Result<DobrushinEstimate> {
    if !channel.is_trace_preserving() {
        return Err(Error::Precondition(
            "Dobrushin estimation needs a trace-preserving channel".into(),
        ));
    }
    let dim = channel.dim_in();
    if dim > 4 {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "numerical Dobrushin search supports dim <= 4",
        });
    }
    let mut est = if dim == 2 {
        let rep = bloch_rep(channel)?;
        if search.unital_shortcut && rep.unital {
            DobrushinEstimate {
                value: rep.transfer_norm(NormMode::Operator),
                method: DobrushinMethod::UnitalShortcut,
                direction: None,
                evaluations: 0,
                full_search_max: None,
            }
        } else {
            bloch_grid_search(channel, search)?
        }
    } else {
        orthogonal_pair_search(channel, search)?
    };
    if search.full_search {
        let m = mixed_pair_search(channel, search)?;
        est.full_search_max = Some(m);
        est.value = est.value.max(m);
    }
    est.value = est.value.clamp(0.0, 1.0);
    Ok(est)
}

fn output_distance(channel: &KrausChannel, a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let (fa, fb) = (
        channel.apply(a).expect("trace preserving"),
        channel.apply(b).expect("trace preserving"),
    );
    trace_distance(&fa, &fb).expect("same dimension")
}

fn bloch_grid_search(channel: &KrausChannel, search: &DobrushinSearch) -> Result<DobrushinEstimate> {
    let grid = SphereGrid {
        azimuth: search.azimuth.max(1),
        polar: search.polar.max(1),
    };
    let f = |theta: f64, phi: f64| {
        let n = direction(theta, phi);
        let a = DensityMatrix::from_bloch(n).expect("unit vector");
        let b = DensityMatrix::from_bloch(n.map(|x| -x)).expect("unit vector");
        output_distance(channel, &a, &b)
    };
    let (best_index, _, _) = argmax_map(grid.len(), search.parallelism, |i| {
        let (t, p) = grid.angles(i);
        (f(t, p), ())
    })
    .expect("non-empty grid");
    let (value, theta, phi) = refine(f, grid.angles(best_index), grid.cell(), search.refine_iters);
    Ok(DobrushinEstimate {
        value,
        method: DobrushinMethod::BlochGrid,
        direction: Some(direction(theta, phi)),
        evaluations: grid.len() + 4 * (search.refine_iters + 2),
        full_search_max: None,
    })
}

fn orthogonal_pair_search(channel: &KrausChannel, search: &DobrushinSearch) -> Result<DobrushinEstimate> {
    let dim = channel.dim_in();
    let root = RandomStream::new(search.seed);
    let samples = search.samples.max(1);
    let pair = |i: usize| {
        let mut rng = root.split(i as u64);
        let psi = random::pure_state(dim, &mut rng);
        let phi = random::orthogonal_pure_state(&psi, &mut rng);
        (psi, phi)
    };
    let (_, mut best, (mut psi, mut phi)) = argmax_map(samples, search.parallelism, |i| {
        let (psi, phi) = pair(i);
        (output_distance(channel, &psi.density(), &phi.density()), (psi, phi))
    })
    .expect("non-empty sample");

    // Hill climb with shrinking Gaussian perturbations.
    let mut rng = root.split(samples as u64);
    let mut step = 0.2;
    for _ in 0..search.refine_iters {
        for _ in 0..16 {
            let cand_psi = perturb(&psi, step, &mut rng);
            let cand_phi = orthogonalize(&perturb(&phi, step, &mut rng), &cand_psi);
            let Some(cand_phi) = cand_phi else { continue };
            let v = output_distance(channel, &cand_psi.density(), &cand_phi.density());
            if v > best {
                best = v;
                psi = cand_psi;
                phi = cand_phi;
            }
        }
        step *= 0.7;
    }
    Ok(DobrushinEstimate {
        value: best,
        method: DobrushinMethod::OrthogonalPairs,
        direction: None,
        evaluations: samples + 16 * search.refine_iters,
        full_search_max: None,
    })
}

fn perturb(psi: &PureState, step: f64, rng: &mut RandomStream) -> PureState {
    let v: Vec<C64> = psi
        .amplitudes()
        .iter()
        .map(|a| a + C64::new(rng.standard_normal(), rng.standard_normal()) * step)
        .collect();
    PureState::normalized(v).unwrap_or_else(|_| psi.clone())
}

fn orthogonalize(phi: &PureState, psi: &PureState) -> Option<PureState> {
    let overlap = psi.inner(phi).ok()?;
    let v: Vec<C64> = phi
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(b, a)| b - a * overlap)
        .collect();
    PureState::normalized(v).ok()
}

fn mixed_pair_search(channel: &KrausChannel, search: &DobrushinSearch) -> Result<f64> {
    let dim = channel.dim_in();
    let root = RandomStream::new(search.seed ^ 0x5eed_f011);
    let best = argmax_map(search.samples.max(1), search.parallelism, |i| {
        let mut rng = root.split(i as u64);
        let a = random::density(dim, &mut rng);
        let b = random::density(dim, &mut rng);
        let before = trace_distance(&a, &b).expect("same dimension");
        let ratio = if before > 1e-9 {
            output_distance(channel, &a, &b) / before
        } else {
            0.0
        };
        (ratio, ())
    })
    .expect("non-empty sample");
    Ok(best.1)
}

/// Contraction coefficient implied by a `gamma`-Doeblin minorisation.
pub fn doeblin_to_dobrushin(gamma: f64) -> f64 {
    1.0 - gamma
}

/// Smallest eigenvalue of `Choi(T) - gamma (I ⊗ Y)`.
pub fn doeblin_min_eigenvalue(
    channel: &KrausChannel,
    gamma: f64,
    y: &HermitianMatrix,
    tol: f64,
) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_dim(channel.dim_out(), y.dim())?;
    if !linalg::is_psd(y, tol) {
        return Err(Error::validation("Doeblin target Y must be PSD"));
    }
    if y.trace() > 1.0 + tol {
        return Err(Error::validation(format!(
            "Doeblin target Y has trace {} > 1",
            y.trace()
        )));
    }
    let minorant = ComplexMatrix::identity(channel.dim_in()).kron(y.matrix()).scale_real(gamma);
    let diff = HermitianMatrix::from_trusted(choi(channel).matrix() - &minorant);
    Ok(diff.min_eigenvalue())
}

/// Whether `T - gamma T'` is completely positive for `T'(X) = Tr[X] Y`.
pub fn doeblin_check(channel: &KrausChannel, gamma: f64, y: &HermitianMatrix, tol: f64) -> Result<bool> {
    Ok(doeblin_min_eigenvalue(channel, gamma, y, tol)? >= -tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_channel, depolarizing, random_channel, ChannelSpec};

    fn numeric() -> DobrushinSearch {
        DobrushinSearch {
            unital_shortcut: false,
            ..Default::default()
        }
    }

    fn half_identity() -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::identity(2).scale_real(0.5)).unwrap()
    }

    #[test]
    fn identity_and_constant_channels() {
        let id = dobrushin_estimate(&KrausChannel::identity(2), &numeric()).unwrap();
        assert!((id.value - 1.0).abs() < 1e-12);
        let full = dobrushin_estimate(&depolarizing(1.0, 2).unwrap(), &numeric()).unwrap();
        assert!(full.value.abs() < 1e-12);
    }

    #[test]
    fn depolarizing_quarter() {
        let ch = depolarizing(0.25, 2).unwrap();
        let num = dobrushin_estimate(&ch, &numeric()).unwrap();
        assert_eq!(num.method, DobrushinMethod::BlochGrid);
        assert!((num.value - 0.75).abs() < 1e-3);
        let short = dobrushin_estimate(&ch, &DobrushinSearch::default()).unwrap();
        assert_eq!(short.method, DobrushinMethod::UnitalShortcut);
        assert!((short.value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn amplitude_damping_numeric() {
        // Antipodal images differ by T n, so the sup is the largest singular
        // value of diag(sqrt(1-g), sqrt(1-g), 1-g), i.e. sqrt(1-g).
        let ch = build_channel(&ChannelSpec::gad(1.0, 0.36)).unwrap();
        let est = dobrushin_estimate(&ch, &DobrushinSearch::default()).unwrap();
        assert!((est.value - 0.8).abs() < 1e-3);
    }

    #[test]
    fn qutrit_search_and_limits() {
        let ch = depolarizing(0.4, 3).unwrap();
        let est = dobrushin_estimate(
            &ch,
            &DobrushinSearch {
                samples: 256,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(est.method, DobrushinMethod::OrthogonalPairs);
        assert!((est.value - 0.6).abs() < 1e-9);
        assert!(dobrushin_estimate(&depolarizing(0.4, 5).unwrap(), &DobrushinSearch::default()).is_err());
    }

    #[test]
    fn full_search_never_exceeds_pair_search() {
        let mut rng = RandomStream::new(5);
        let ch = random_channel(2, 3, &mut rng);
        let s = DobrushinSearch {
            full_search: true,
            samples: 512,
            ..numeric()
        };
        let est = dobrushin_estimate(&ch, &s).unwrap();
        assert!(est.full_search_max.unwrap() <= est.value + 1e-12);
        let plain = dobrushin_estimate(&ch, &numeric()).unwrap();
        assert!(est.full_search_max.unwrap() <= plain.value + 1e-3);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let ch = build_channel(&ChannelSpec::pad(0.3, 0.4, 0.2)).unwrap();
        let a = dobrushin_estimate(&ch, &DobrushinSearch { parallelism: Parallelism::Sequential, ..numeric() }).unwrap();
        let b = dobrushin_estimate(&ch, &DobrushinSearch { parallelism: Parallelism::Rayon, ..numeric() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn doeblin_examples() {
        let full = depolarizing(1.0, 2).unwrap();
        assert!(doeblin_check(&full, 1.0, &half_identity(), 1e-10).unwrap());

        let id = KrausChannel::identity(2);
        assert!(!doeblin_check(&id, 0.1, &half_identity(), 1e-10).unwrap());
        let zero_proj = HermitianMatrix::new(ComplexMatrix::diag_real(&[1.0, 0.0])).unwrap();
        assert!(!doeblin_check(&id, 0.5, &zero_proj, 1e-10).unwrap());

        let mut rng = RandomStream::new(1);
        let ch = random_channel(2, 2, &mut rng);
        let weird = HermitianMatrix::new(ComplexMatrix::diag_real(&[0.2, 0.3])).unwrap();
        assert!(doeblin_check(&ch, 0.0, &weird, 1e-10).unwrap());

        assert_eq!(doeblin_to_dobrushin(0.3), 0.7);
    }

    #[test]
    fn doeblin_errors() {
        let id = KrausChannel::identity(2);
        let neg = HermitianMatrix::new(ComplexMatrix::diag_real(&[1.0, -0.5])).unwrap();
        assert!(doeblin_check(&id, 0.1, &neg, 1e-10).is_err());
        let big = HermitianMatrix::new(ComplexMatrix::identity(2)).unwrap();
        assert!(doeblin_check(&id, 0.1, &big, 1e-10).is_err());
        let q = HermitianMatrix::new(ComplexMatrix::identity(3).scale_real(0.2)).unwrap();
        assert!(doeblin_check(&id, 0.1, &q, 1e-10).is_err());
    }

    #[test]
    fn depolarizing_is_p_doeblin() {
        // p I/2 Tr + (1-p) id contains p times the constant map to I/2.
        for p in [0.1, 0.5, 0.9] {
            let ch = depolarizing(p, 2).unwrap();
            assert!(doeblin_check(&ch, p, &half_identity(), 1e-10).unwrap());
            assert!(!doeblin_check(&ch, (p + 0.05).min(1.0), &half_identity(), 1e-10).unwrap());
        }
    }
}
