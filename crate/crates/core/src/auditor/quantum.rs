use serde::{Deserialize, Serialize};

use super::{projector_from_bloch, AuditReport, Claim, SearchInfo, Witness, EPS_SLACK};
use crate::channels::{bloch_rep, KrausChannel};
use crate::error::{check_dim, check_unit, Error, Result};
use crate::linalg::{random, ComplexMatrix, DensityMatrix, HermitianMatrix, PureState};
use crate::mechanisms::RandomStream;
use crate::par::map_indexed;
use crate::privacy::Epsilon;
use crate::sphere::{direction, refine, SphereGrid};
use crate::{Parallelism, C64};

/// `Tr[PB]` at or below this, with `Tr[PA]` above [`NUM_FLOOR`], counts as an
/// infinite ratio.
const DEN_FLOOR: f64 = 1e-14;
const NUM_FLOOR: f64 = 1e-10;
const MAX_DIM: usize = 4;

/// Search budget for channel audits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QdpSearch {
    /// Projector grid on the Bloch sphere (qubit outputs).
    pub azimuth: usize,
    pub polar: usize,
    pub refine_iters: usize,
    /// Directions of the deterministic boundary pairs.
    pub pair_azimuth: usize,
    pub pair_polar: usize,
    /// Seeded random pairs per family.
    pub random_pairs: usize,
    /// Random rank-1 projectors for outputs of dimension 3 or 4.
    pub projector_samples: usize,
    pub seed: u64,
    pub parallelism: Parallelism,
}

impl Default for QdpSearch {
    fn default() -> Self {
        Self {
            azimuth: 64,
            polar: 32,
            refine_iters: 20,
            pair_azimuth: 12,
            pair_polar: 7,
            random_pairs: 64,
            projector_samples: 2048,
            seed: 0,
            parallelism: Parallelism::default(),
        }
    }
}

/// Best measurement found for one pair of states.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioResult {
    /// `Tr[PA] / Tr[PB]`, possibly infinite.
    pub ratio: f64,
    pub p: f64,
    pub q: f64,
    pub projector: ComplexMatrix,
    /// Bloch direction of a rank-1 qubit projector.
    pub direction: Option<[f64; 3]>,
}

/// Reproducible violation certificate: input states, projector and the two
/// measured probabilities on the channel outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumWitness {
    pub rho: ComplexMatrix,
    pub sigma: ComplexMatrix,
    pub projector: ComplexMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_bloch: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_bloch: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projector_bloch: Option<[f64; 3]>,
    pub trace_distance: f64,
    /// `Tr[P Phi(rho)]`.
    pub p: f64,
    /// `Tr[P Phi(sigma)]`.
    pub q: f64,
}

impl QuantumWitness {
    /// Re-applies `channel` to the stored states and measures the stored
    /// projector.
    pub fn recompute(&self, channel: &KrausChannel) -> Result<Epsilon> {
        let a = channel.apply_operator(&self.rho)?;
        let b = channel.apply_operator(&self.sigma)?;
        let p = self.projector.trace_of_product(&a).re;
        let q = self.projector.trace_of_product(&b).re;
        Ok(measured_epsilon(p, q))
    }
}

pub(crate) fn measured_epsilon(p: f64, q: f64) -> Epsilon {
    let r = measured_ratio(p, q);
    if r.is_infinite() {
        Epsilon::INFINITE
    } else {
        Epsilon::from_ratio(r)
    }
}

/// Ratio with the floor rules; 0 when both probabilities vanish.
fn measured_ratio(p: f64, q: f64) -> f64 {
    if q <= DEN_FLOOR {
        if p > NUM_FLOOR {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        p / q
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm(&a);
    (n > 1e-15).then(|| a.map(|x| x / n))
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn axpy(a: &[f64; 3], s: f64, x: &[f64; 3]) -> [f64; 3] {
    [a[0] + s * x[0], a[1] + s * x[1], a[2] + s * x[2]]
}

fn angles_of(n: &[f64; 3]) -> (f64, f64) {
    (n[2].clamp(-1.0, 1.0).acos(), n[1].atan2(n[0]))
}

/// Probabilities of the rank-1 projector along `n` on Bloch vectors `a`, `b`.
fn bloch_probs(n: &[f64; 3], a: &[f64; 3], b: &[f64; 3]) -> (f64, f64) {
    ((1.0 + dot(n, a)) / 2.0, (1.0 + dot(n, b)) / 2.0)
}

/// Exact `sup_n (1 + n.a)/(1 + n.b)` by Dinkelbach iteration from `start`.
///
/// For fixed `lambda` the parametric problem `max_n (1 + n.a) - lambda (1 + n.b)`
/// is solved by `n = (a - lambda b)/|a - lambda b|`, so each step is a global
/// improvement and the iteration converges to the supremum.
pub fn dinkelbach_qubit_ratio(a: [f64; 3], b: [f64; 3]) -> f64 {
    polish(&a, &b, 1.0, None).0
}

fn polish(a: &[f64; 3], b: &[f64; 3], start: f64, start_n: Option<[f64; 3]>) -> (f64, Option<[f64; 3]>) {
    let (mut lambda, mut best_n) = (start, start_n);
    for _ in 0..200 {
        if !lambda.is_finite() {
            break;
        }
        let Some(n) = unit(axpy(a, -lambda, b)) else { break };
        let (p, q) = bloch_probs(&n, a, b);
        let r = measured_ratio(p, q);
        if r <= lambda * (1.0 + 1e-15) {
            break;
        }
        lambda = r;
        best_n = Some(n);
    }
    (lambda, best_n)
}

struct QubitBest {
    ratio: f64,
    n: Option<[f64; 3]>,
}

/// Projector grid with its directions evaluated once.
struct BlochGrid {
    dirs: Vec<[f64; 3]>,
    cell: (f64, f64),
    refine_iters: usize,
}

impl BlochGrid {
    fn new(search: &QdpSearch) -> Self {
        let grid = SphereGrid {
            azimuth: search.azimuth.max(1),
            polar: search.polar.max(1),
        };
        let dirs = (0..grid.len())
            .map(|i| {
                let (t, p) = grid.angles(i);
                direction(t, p)
            })
            .collect();
        Self {
            dirs,
            cell: grid.cell(),
            refine_iters: search.refine_iters,
        }
    }
}

fn qubit_ratio(a: &[f64; 3], b: &[f64; 3], grid: &BlochGrid) -> QubitBest {
    let f = |n: &[f64; 3]| {
        let (p, q) = bloch_probs(n, a, b);
        measured_ratio(p, q)
    };
    // P = I has ratio 1.
    let mut best = QubitBest { ratio: 1.0, n: None };
    for n in &grid.dirs {
        let v = f(n);
        if v > best.ratio {
            best = QubitBest { ratio: v, n: Some(*n) };
            if v.is_infinite() {
                return best;
            }
        }
    }
    let extra = [unit(b.map(|x| -x)), unit(*a), unit(sub(a, b))];
    for n in extra.into_iter().flatten() {
        let v = f(&n);
        if v > best.ratio {
            best = QubitBest { ratio: v, n: Some(n) };
        }
    }
    if best.ratio.is_infinite() {
        return best;
    }
    if let Some(n) = best.n {
        let g = |t: f64, p: f64| f(&direction(t, p));
        let (v, t, p) = refine(g, angles_of(&n), grid.cell, grid.refine_iters);
        if v > best.ratio {
            best = QubitBest {
                ratio: v,
                n: Some(direction(t, p)),
            };
        }
    }
    let (v, n) = polish(a, b, best.ratio, best.n);
    if v > best.ratio {
        best = QubitBest { ratio: v, n };
    }
    best
}

fn qubit_result(a: &[f64; 3], b: &[f64; 3], best: QubitBest) -> RatioResult {
    match best.n {
        Some(n) => {
            let (p, q) = bloch_probs(&n, a, b);
            RatioResult {
                ratio: measured_ratio(p, q),
                p,
                q,
                projector: projector_from_bloch(n),
                direction: Some(n),
            }
        }
        None => RatioResult {
            ratio: 1.0,
            p: 1.0,
            q: 1.0,
            projector: ComplexMatrix::identity(2),
            direction: None,
        },
    }
}

fn expectation(v: &[C64], a: &ComplexMatrix) -> f64 {
    let d = v.len();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += v[i].conj() * a[(i, j)] * v[j];
        }
    }
    s.re
}

fn perturb(v: &[C64], step: f64, rng: &mut RandomStream) -> Option<PureState> {
    let w: Vec<C64> = v
        .iter()
        .map(|x| x + C64::new(rng.standard_normal(), rng.standard_normal()) * step)
        .collect();
    PureState::normalized(w).ok()
}

/// Random rank-1 projectors, the computational basis and `I`, then a hill
/// climb from the best vector.
fn general_ratio(a: &ComplexMatrix, b: &ComplexMatrix, search: &QdpSearch, stream: u64) -> RatioResult {
    let d = a.rows();
    let eval = |v: &[C64]| {
        let (p, q) = (expectation(v, a), expectation(v, b));
        (measured_ratio(p, q), p, q)
    };
    let mut best_v: Option<Vec<C64>> = None;
    let (mut best, mut bp, mut bq) = (1.0, 1.0, 1.0);
    let mut consider = |v: Vec<C64>, best_v: &mut Option<Vec<C64>>| {
        let (r, p, q) = eval(&v);
        if r > best {
            (best, bp, bq) = (r, p, q);
            *best_v = Some(v);
        }
    };
    for i in 0..d {
        consider(PureState::basis(d, i).amplitudes().to_vec(), &mut best_v);
    }
    let mut rng = RandomStream::substream(search.seed, stream);
    for _ in 0..search.projector_samples {
        let psi = random::pure_state(d, &mut rng);
        consider(psi.amplitudes().to_vec(), &mut best_v);
    }
    if best.is_finite() {
        if let Some(start) = best_v.clone() {
            let mut cur = start;
            let mut step = 0.2;
            for _ in 0..search.refine_iters {
                for _ in 0..16 {
                    let Some(cand) = perturb(&cur, step, &mut rng) else { continue };
                    let (r, p, q) = eval(cand.amplitudes());
                    if r > best {
                        (best, bp, bq) = (r, p, q);
                        cur = cand.amplitudes().to_vec();
                        best_v = Some(cur.clone());
                    }
                }
                step *= 0.7;
            }
        }
    }
    let projector = match &best_v {
        Some(v) => ComplexMatrix::outer(v, v),
        None => ComplexMatrix::identity(d),
    };
    RatioResult {
        ratio: best,
        p: bp,
        q: bq,
        projector,
        direction: None,
    }
}

fn check_supported(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "measurement-ratio audits support dim <= 4",
        });
    }
    Ok(())
}

/// `sup_P Tr[PA]/Tr[PB]` over projectors, searched on a grid.
///
/// Qubits use a Bloch-sphere grid plus local refinement; dimensions 3 and 4
/// use seeded random rank-1 projectors. Infinite when some projector sees
/// `A` but (numerically) not `B`.
pub fn worst_case_measurement_ratio(a: &DensityMatrix, b: &DensityMatrix, search: &QdpSearch) -> Result<RatioResult> {
    check_dim(a.dim(), b.dim())?;
    check_supported(a.dim())?;
    if a.dim() == 2 {
        let (ra, rb) = (a.bloch_vector()?, b.bloch_vector()?);
        Ok(qubit_result(&ra, &rb, qubit_ratio(&ra, &rb, &BlochGrid::new(search))))
    } else {
        Ok(general_ratio(a.matrix(), b.matrix(), search, 0))
    }
}

/// Input pair, as Bloch vectors when the input is a qubit.
#[derive(Debug, Clone)]
enum Pair {
    Bloch([f64; 3], [f64; 3]),
    Matrix(ComplexMatrix, ComplexMatrix),
}

impl Pair {
    fn swapped(&self) -> Self {
        match self {
            Pair::Bloch(r, s) => Pair::Bloch(*s, *r),
            Pair::Matrix(r, s) => Pair::Matrix(s.clone(), r.clone()),
        }
    }

    fn matrices(&self) -> (ComplexMatrix, ComplexMatrix) {
        match self {
            Pair::Bloch(r, s) => (bloch_density(*r), bloch_density(*s)),
            Pair::Matrix(r, s) => (r.clone(), s.clone()),
        }
    }
}

fn bloch_density(r: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = crate::linalg::paulis();
    let m = &(&(&ComplexMatrix::identity(2) + &x.scale_real(r[0])) + &y.scale_real(r[1]))
        + &z.scale_real(r[2]);
    m.scale_real(0.5)
}

fn random_ball(rng: &mut RandomStream) -> [f64; 3] {
    let u = random::unit_vector3(rng);
    let r = rng.uniform().cbrt();
    u.map(|x| x * r)
}

/// Shrinks `(r, s)` about its midpoint so `|r - s|/2 <= tau`.
fn contract_bloch(r: [f64; 3], s: [f64; 3], tau: f64) -> ([f64; 3], [f64; 3]) {
    let d = norm(&sub(&r, &s)) / 2.0;
    if d <= tau {
        return (r, s);
    }
    let k = tau / d;
    let m = [0, 1, 2].map(|i| (r[i] + s[i]) / 2.0);
    (axpy(&m, k, &sub(&r, &m)), axpy(&m, k, &sub(&s, &m)))
}

/// Boundary and interior pairs at trace distance at most `tau`. Trace
/// distance is linear along mixtures, so boundary points are placed exactly
/// rather than by bisection.
fn qubit_pairs(tau: f64, search: &QdpSearch) -> Vec<Pair> {
    let grid = SphereGrid {
        azimuth: search.pair_azimuth.max(1),
        polar: search.pair_polar.max(1),
    };
    let mut out = Vec::new();
    for i in 0..grid.len() {
        let (t, p) = grid.angles(i);
        let u = direction(t, p);
        // Antipodal pure pair mixed symmetrically toward its midpoint.
        out.push(Pair::Bloch(u.map(|x| tau * x), u.map(|x| -tau * x)));
        // Pure state against its mixture with the antipode.
        out.push(Pair::Bloch(u, u.map(|x| (1.0 - 2.0 * tau) * x)));
    }
    let root = RandomStream::new(search.seed);
    for k in 0..search.random_pairs {
        let mut rng = root.split(k as u64);
        let u = random::unit_vector3(&mut rng);
        let v = random::unit_vector3(&mut rng);
        let (r, s) = contract_bloch(u, v, tau);
        out.push(Pair::Bloch(r, s));
        let d = norm(&sub(&u, &v)) / 2.0;
        let k1 = if d > tau { tau / d } else { 1.0 };
        out.push(Pair::Bloch(u, axpy(&u, k1, &sub(&v, &u))));
        let (r, s) = contract_bloch(random_ball(&mut rng), random_ball(&mut rng), tau);
        out.push(Pair::Bloch(r, s));
    }
    out
}

fn mix(a: &ComplexMatrix, b: &ComplexMatrix, s: f64) -> ComplexMatrix {
    &a.scale_real(1.0 - s) + &b.scale_real(s)
}

fn general_pairs(dim: usize, tau: f64, search: &QdpSearch) -> Result<Vec<Pair>> {
    let mut out = Vec::new();
    let mut push_orthogonal = |psi: &PureState, phi: &PureState| {
        let (a, b) = (psi.density().matrix().clone(), phi.density().matrix().clone());
        let w = (1.0 + tau) / 2.0;
        out.push(Pair::Matrix(mix(&b, &a, w), mix(&a, &b, w)));
        out.push(Pair::Matrix(a.clone(), mix(&a, &b, tau)));
    };
    push_orthogonal(&PureState::basis(dim, 0), &PureState::basis(dim, 1));
    let root = RandomStream::new(search.seed);
    let n = search.pair_azimuth.max(1) * search.pair_polar.max(1);
    for k in 0..n {
        let mut rng = root.split(k as u64);
        let psi = random::pure_state(dim, &mut rng);
        let phi = random::orthogonal_pure_state(&psi, &mut rng);
        push_orthogonal(&psi, &phi);
    }
    for k in 0..search.random_pairs {
        let mut rng = root.split((n + k) as u64);
        let a = random::density(dim, &mut rng);
        let b = random::density(dim, &mut rng);
        let d = crate::linalg::trace_distance(&a, &b)?;
        let (ra, rb) = if d > tau {
            let m = mix(a.matrix(), b.matrix(), 0.5);
            let k = tau / d;
            (mix(&m, a.matrix(), k), mix(&m, b.matrix(), k))
        } else {
            (a.matrix().clone(), b.matrix().clone())
        };
        out.push(Pair::Matrix(ra, rb));
    }
    Ok(out)
}

/// `Tr[(A - c B)_+]`, the smallest `delta` at multiplier `c` for the pair.
fn positive_part(a: &ComplexMatrix, b: &ComplexMatrix, c: f64) -> f64 {
    let diff = a - &b.scale_real(c);
    HermitianMatrix::from_trusted(diff)
        .eigenvalues()
        .iter()
        .filter(|&&l| l > 0.0)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

fn bloch_positive_part(a: &[f64; 3], b: &[f64; 3], c: f64) -> f64 {
    let t = 1.0 - c;
    let v = norm(&axpy(a, -c, b));
    (((t + v) / 2.0).max(0.0) + ((t - v) / 2.0).max(0.0)).clamp(0.0, 1.0)
}

struct PairOutcome {
    ratio: f64,
    delta: f64,
    result: RatioResult,
}

/// Audits `(tau, claimed_eps, 0)`-QDP of `channel`.
///
/// `eps_hat` is the log of the largest measurement ratio over the generated
/// pairs; `delta_hat` is the largest `Tr[(Phi(rho) - e^eps Phi(sigma))_+]` over
/// the same pairs at the claimed epsilon.
pub fn audit_channel_qdp(
    channel: &KrausChannel,
    tau: f64,
    claimed_eps: Epsilon,
    search: &QdpSearch,
) -> Result<AuditReport> {
    check_unit("tau", tau)?;
    if !channel.is_trace_preserving() {
        return Err(Error::Precondition("QDP audits need a trace-preserving channel".into()));
    }
    let (din, dout) = (channel.dim_in(), channel.dim_out());
    check_supported(din)?;
    check_supported(dout)?;

    let base_pairs = if din == 2 {
        qubit_pairs(tau, search)
    } else {
        general_pairs(din, tau, search)?
    };
    let pairs: Vec<Pair> = base_pairs
        .iter()
        .flat_map(|p| [p.clone(), p.swapped()])
        .collect();

    let rep = if din == 2 && dout == 2 {
        Some(bloch_rep(channel)?)
    } else {
        None
    };
    let grid = BlochGrid::new(search);
    let c = if claimed_eps.is_infinite() {
        None
    } else {
        Some(claimed_eps.exp())
    };

    let outcomes = map_indexed(pairs.len(), search.parallelism, |k| -> Result<PairOutcome> {
        match (&pairs[k], &rep) {
            (Pair::Bloch(r, s), Some(rep)) => {
                let (a, b) = (rep.apply(*r), rep.apply(*s));
                let result = qubit_result(&a, &b, qubit_ratio(&a, &b, &grid));
                let delta = c.map_or(0.0, |c| bloch_positive_part(&a, &b, c));
                Ok(PairOutcome {
                    ratio: result.ratio,
                    delta,
                    result,
                })
            }
            (pair, _) => {
                let (r, s) = pair.matrices();
                let a = channel.apply_operator(&r)?;
                let b = channel.apply_operator(&s)?;
                let result = if dout == 2 {
                    let (ra, rb) = (
                        DensityMatrix::from_trusted(a.clone()).bloch_vector()?,
                        DensityMatrix::from_trusted(b.clone()).bloch_vector()?,
                    );
                    qubit_result(&ra, &rb, qubit_ratio(&ra, &rb, &grid))
                } else {
                    general_ratio(&a, &b, search, 1 + k as u64)
                };
                let delta = c.map_or(0.0, |c| positive_part(&a, &b, c));
                Ok(PairOutcome {
                    ratio: result.ratio,
                    delta,
                    result,
                })
            }
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    // Deterministic reduction: largest ratio, lowest pair index on ties.
    let mut best_k = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if o.ratio > outcomes[best_k].ratio {
            best_k = k;
        }
    }
    let delta_hat = outcomes.iter().map(|o| o.delta).fold(0.0, f64::max);

    let best = &outcomes[best_k];
    let (rho, sigma) = pairs[best_k].matrices();
    let (rho_bloch, sigma_bloch) = match &pairs[best_k] {
        Pair::Bloch(r, s) => (Some(*r), Some(*s)),
        Pair::Matrix(..) => (None, None),
    };
    let trace_distance = crate::linalg::trace_norm(&HermitianMatrix::from_trusted(&rho - &sigma));
    let witness = QuantumWitness {
        rho,
        sigma,
        projector: best.result.projector.clone(),
        rho_bloch,
        sigma_bloch,
        projector_bloch: best.result.direction,
        trace_distance,
        p: best.result.p,
        q: best.result.q,
    };
    let eps_hat = measured_epsilon(witness.p, witness.q);
    let satisfied = claimed_eps.is_infinite() || eps_hat.value() <= claimed_eps.value() + EPS_SLACK;
    let grid = if dout == 2 {
        [search.azimuth, search.polar]
    } else {
        [search.projector_samples, 1]
    };
    Ok(AuditReport {
        eps_hat,
        delta_hat,
        satisfied,
        claimed: Claim {
            epsilon: claimed_eps,
            delta: 0.0,
            tau: Some(tau),
        },
        witness: Some(Witness::Quantum(witness)),
        search: SearchInfo {
            grid: Some(grid),
            pairs: pairs.len(),
            seed: Some(search.seed),
            exact: false,
        },
    })
}
