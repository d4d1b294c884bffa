//! Subcommand arguments and handlers. Each handler returns the payload and
//! whether an audit found a violation.

use clap::{Args, ValueEnum};
use qdp_core::auditor::{
    audit_channel_qdp, audit_classical, audit_subsampling_theorem, MechanismModel, QdpSearch,
    Witness,
};
use qdp_core::channels::{
    bloch_rep, build_channel, dobrushin_estimate, doeblin_check, doeblin_min_eigenvalue,
    ChannelSpec, DobrushinSearch, KrausChannel,
};
use qdp_core::encodings::{
    are_neighbors, basis_distinct_neighbor_kernel, encode, gamma, kernel, min_adjacent_kernel,
    Dataset, EncodingKind, EncodingSpec,
};
use qdp_core::linalg::{trace_distance, ComplexMatrix, HermitianMatrix, Povm};
use qdp_core::mechanisms::{
    simulate_alg1, BinaryPovm, ConstantOutput, IdentityOutput, NoiseSpec, PerRowResponse,
    PerSampleResponse, RecordDomain, SampleMechanism,
};
use qdp_core::privacy::{
    alg1_failure_prob, alg1_gaussian_sigma2, alg1_laplace_scale, encoding_adp_delta,
    eps_depolarizing, eps_pad, eps_pad_dep, eps_pad_dep_compositional, eps_unital_dobrushin,
    quantum_to_classical, subsample_adp, subsample_amplify, DpParams, Epsilon, QdpParams,
};
use qdp_core::{tol, Parallelism};
use serde_json::{json, Value};

use crate::emit::to_value;
use crate::inputs::{
    parse_channel, parse_dataset, parse_epsilon, parse_grid, parse_json, CliError, CliResult,
};

pub struct Outcome {
    pub payload: Value,
    pub violation: bool,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Self {
            payload,
            violation: false,
        }
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    Basis,
    Amplitude,
    Rotation,
}

impl From<EncodingArg> for EncodingKind {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Basis => EncodingKind::Basis,
            EncodingArg::Amplitude => EncodingKind::Amplitude,
            EncodingArg::Rotation => EncodingKind::Rotation,
        }
    }
}

fn encoding_spec(kind: EncodingKind, bit_width: Option<u32>) -> EncodingSpec {
    EncodingSpec { kind, bit_width }
}

/// Closed-form minimum adjacent kernel with the formula that produced it.
fn kappa_hat(spec: &EncodingSpec, n: usize, g: Option<f64>) -> CliResult<Value> {
    let k = min_adjacent_kernel(spec, n, g)?.value();
    let formula = match spec.kind {
        EncodingKind::Basis => "1 - 1/n",
        EncodingKind::Amplitude => "1 - Gamma",
        EncodingKind::Rotation => "0",
    };
    Ok(json!({"value": k, "formula": formula, "n": n}))
}

#[derive(Debug, Args)]
pub struct EncodeKernelArgs {
    /// Dataset document (JSON or @file).
    #[arg(long)]
    dataset: String,
    /// Second dataset; reports the kernel and trace distance of the pair.
    #[arg(long)]
    other: Option<String>,
    /// Encoding override; defaults to the dataset's mode.
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    /// Register width for basis encoding, if the document does not carry one.
    #[arg(long)]
    bit_width: Option<u32>,
}

pub fn encode_kernel(a: &EncodeKernelArgs) -> CliResult<Outcome> {
    let doc = parse_dataset(&a.dataset)?;
    let kind = a.encoding.map_or(doc.dataset.kind(), EncodingKind::from);
    let spec = encoding_spec(kind, a.bit_width.or(doc.bit_width));
    let x = &doc.dataset;
    let state = encode(x, &spec)?;
    let g = match x {
        Dataset::Amplitude(_) => Some(gamma(x)?),
        _ => None,
    };
    let mut out = json!({
        "encoding": to_value(&spec),
        "n": x.len(),
        "state_dim": state.dim(),
        "min_adjacent_kernel": kappa_hat(&spec, x.len(), g)?,
    });
    if let Some(g) = g {
        out["gamma"] = json!(g);
    }
    if kind == EncodingKind::Basis {
        let k = basis_distinct_neighbor_kernel(x.len());
        out["distinct_neighbor"] = json!({
            "kernel": k,
            "kernel_formula": "((n-1)/n)^2",
            "trace_distance": (1.0 - k).max(0.0).sqrt(),
        });
    }
    if let Some(other) = &a.other {
        let y = parse_dataset(other)?.dataset;
        let k = kernel(x, &y, &spec)?.value();
        let d = trace_distance(&state.density(), &encode(&y, &spec)?.density())?;
        out["pair"] = json!({
            "kernel": k,
            "trace_distance": d,
            "pure_state_distance": (1.0 - k).max(0.0).sqrt(),
            "neighbors": are_neighbors(x, &y)?,
        });
    }
    Ok(Outcome::ok(out))
}

#[derive(Debug, Args)]
pub struct AmplifyEncodingArgs {
    /// Dataset whose size (and Gamma, for amplitude mode) fix the minimum kernel.
    #[arg(long, required_unless_present = "encoding")]
    dataset: Option<String>,
    #[arg(long, value_enum, conflicts_with = "dataset", requires = "n")]
    encoding: Option<EncodingArg>,
    /// Dataset size when no dataset is given.
    #[arg(long)]
    n: Option<usize>,
    /// Gamma(x) for amplitude encoding when no dataset is given.
    #[arg(long)]
    gamma: Option<f64>,
    /// Trace-distance radius of the quantum guarantee.
    #[arg(long)]
    tau: f64,
    #[arg(long, value_parser = parse_epsilon)]
    eps: Epsilon,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Concentration parameter; adds the noise calibration of the
    /// encode-measure-average-perturb algorithm.
    #[arg(long)]
    t: Option<f64>,
    /// Measurement count for the calibration's failure probability.
    #[arg(long, requires = "t")]
    m: Option<u64>,
}

pub fn amplify_encoding(a: &AmplifyEncodingArgs) -> CliResult<Outcome> {
    let (spec, n, g) = match (&a.dataset, a.encoding) {
        (Some(d), _) => {
            let doc = parse_dataset(d)?;
            let g = match &doc.dataset {
                Dataset::Amplitude(_) => Some(gamma(&doc.dataset)?),
                _ => None,
            };
            (doc.spec(), doc.dataset.len(), g)
        }
        (None, Some(kind)) => (
            encoding_spec(kind.into(), None),
            a.n.expect("required by clap"),
            a.gamma,
        ),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let kappa = kappa_hat(&spec, n, g)?;
    let k = kappa["value"].as_f64().expect("number");
    let qdp = QdpParams::new(a.tau, a.eps, a.delta)?;
    let dp = quantum_to_classical(&qdp, k)?;
    let mut out = json!({
        "encoding": spec.kind.as_str(),
        "kappa_hat": kappa,
        "required_tau": (1.0 - k).sqrt(),
        "qdp": to_value(&qdp),
        "dp": to_value(&dp),
        "dp_formula": "(epsilon, delta) carried over once tau >= sqrt(1 - kappa_hat)",
        "encoding_only": to_value(&encoding_adp_delta(k)?),
    });
    if let Some(g) = g {
        out["gamma"] = json!(g);
    }
    if let Some(t) = a.t {
        if a.eps.is_infinite() {
            return Err(input("noise calibration needs a finite --eps"));
        }
        let eps = a.eps.value();
        let mut cal = json!({
            "t": t,
            "laplace_scale": alg1_laplace_scale(k, t, eps)?,
            "laplace_formula": "(sqrt(1 - kappa_hat) + t) / epsilon",
        });
        if a.delta > 0.0 {
            cal["gaussian_sigma2"] = json!(alg1_gaussian_sigma2(k, t, eps, a.delta)?);
            cal["gaussian_formula"] =
                json!("2 ln(1.25/delta) (sqrt(1 - kappa_hat) + t)^2 / epsilon^2");
        }
        if let Some(m) = a.m {
            cal["m"] = json!(m);
            cal["failure_prob"] = to_value(&alg1_failure_prob(m, t)?);
        }
        out["calibration"] = cal;
    }
    Ok(Outcome::ok(out))
}

#[derive(Debug, Args)]
pub struct AmplifySamplingArgs {
    /// Amplitude dataset giving the sampling weights.
    #[arg(long, required_unless_present = "gamma")]
    dataset: Option<String>,
    /// Gamma(x) directly, instead of a dataset.
    #[arg(long, conflicts_with = "dataset")]
    gamma: Option<f64>,
    /// Number of l2 samples.
    #[arg(long)]
    m: u64,
    /// Privacy of the algorithm run on the samples.
    #[arg(long, value_parser = parse_epsilon)]
    eps: Epsilon,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

pub fn amplify_sampling(a: &AmplifySamplingArgs) -> CliResult<Outcome> {
    let g = match (&a.dataset, a.gamma) {
        (Some(d), _) => gamma(&parse_dataset(d)?.dataset)?,
        (None, Some(g)) => g,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let base = DpParams::new(a.eps, a.delta)?;
    Ok(Outcome::ok(json!({
        "gamma": g,
        "m": a.m,
        "base": to_value(&base),
        "amplified": to_value(&subsample_amplify(&base, g, a.m)?),
        "amplified_formula": "(ln(1 + (e^epsilon - 1) Gamma m), delta Gamma m)",
        "any_algorithm": to_value(&subsample_adp(g, a.m)?),
        "any_algorithm_formula": "(0, Gamma m)",
    })))
}

#[derive(Debug, Args)]
pub struct ChannelEpsArgs {
    /// Channel document (JSON or @file) or `identity`.
    #[arg(long)]
    channel: String,
    /// Trace-distance radius.
    #[arg(long)]
    tau: f64,
}

/// `(gamma, lambda)` of the damping channels, which share one closed form.
fn damping(spec: &ChannelSpec) -> Option<(f64, f64)> {
    match *spec {
        ChannelSpec::Pad { gamma, lambda, .. } => Some((gamma, lambda)),
        ChannelSpec::Gad { gamma, .. } => Some((gamma, 0.0)),
        ChannelSpec::Pd { lambda } => Some((0.0, lambda)),
        _ => None,
    }
}

fn unital_qubit_eps(channel: &KrausChannel, tau: f64) -> CliResult<Option<Value>> {
    if channel.dim_in() != 2 || channel.dim_out() != 2 || !bloch_rep(channel)?.unital {
        return Ok(None);
    }
    let est = dobrushin_estimate(channel, &DobrushinSearch::default())?;
    let eps = eps_unital_dobrushin(est.value, tau)?;
    Ok(Some(json!({
        "epsilon": to_value(&eps),
        "formula": "ln(1 + 2 tau gamma), gamma the Dobrushin coefficient of a unital qubit channel",
        "dobrushin": est.value,
    })))
}

pub fn channel_eps(a: &ChannelEpsArgs) -> CliResult<Outcome> {
    let spec = parse_channel(&a.channel)?;
    let channel = build_channel(&spec)?;
    let tau = a.tau;
    let mut out = match &spec {
        ChannelSpec::Depolarizing { p, dim } => json!({
            "epsilon": to_value(&eps_depolarizing(*p, tau, *dim)?),
            "formula": "ln(1 + (1 - p) tau D / p)",
        }),
        ChannelSpec::Identity { .. } => {
            QdpParams::new(tau, Epsilon::ZERO, 0.0)?;
            let eps = if tau > 0.0 {
                Epsilon::INFINITE
            } else {
                Epsilon::ZERO
            };
            json!({"epsilon": to_value(&eps), "formula": "identity: unbounded for tau > 0"})
        }
        ChannelSpec::Compose { outer, inner } => match (damping(outer), inner.as_ref()) {
            (Some((g, l)), ChannelSpec::Depolarizing { p, dim: 2 }) => json!({
                "epsilon": to_value(&eps_pad_dep(*p, g, l, tau)?),
                "formula": "(1 - p) eps_pad(gamma, lambda, tau)",
                "compositional": {
                    "epsilon": to_value(&eps_pad_dep_compositional(*p, g, l, tau)?),
                    "formula": "eps_pad(gamma, lambda, (1 - p) tau)",
                },
            }),
            _ => unital_qubit_eps(&channel, tau)?.ok_or_else(no_closed_form)?,
        },
        other => match damping(other) {
            Some((g, l)) => json!({
                "epsilon": to_value(&eps_pad(g, l, tau)?),
                "formula": "ln(1 + 2 tau s / (1 - s)), s = sqrt(1 - gamma) sqrt(1 - lambda)",
            }),
            None => unital_qubit_eps(&channel, tau)?.ok_or_else(no_closed_form)?,
        },
    };
    out["channel"] = to_value(&spec);
    out["tau"] = json!(tau);
    Ok(Outcome::ok(out))
}

fn no_closed_form() -> CliError {
    input("no closed form for this channel; use audit-qdp for an empirical bound")
}

#[derive(Debug, Args)]
pub struct DobrushinArgs {
    #[arg(long)]
    channel: String,
    /// Projector grid as AZIMUTHxPOLAR.
    #[arg(long, value_parser = parse_grid, default_value = "64x32")]
    grid: [usize; 2],
    #[arg(long, default_value_t = 20)]
    refine_iters: usize,
    /// Seed for sampled pairs (needed above qubit dimension or with --full-search).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    /// Also sample mixed-state pairs.
    #[arg(long)]
    full_search: bool,
    /// Search numerically even for unital qubit channels.
    #[arg(long)]
    no_shortcut: bool,
}

pub fn dobrushin(a: &DobrushinArgs, par: Parallelism) -> CliResult<Outcome> {
    let spec = parse_channel(&a.channel)?;
    let channel = build_channel(&spec)?;
    let sampled = channel.dim_in() > 2 || a.full_search;
    if sampled && a.seed.is_none() {
        return Err(input("this search samples state pairs; pass --seed"));
    }
    let search = DobrushinSearch {
        azimuth: a.grid[0],
        polar: a.grid[1],
        refine_iters: a.refine_iters,
        samples: a.samples,
        full_search: a.full_search,
        unital_shortcut: !a.no_shortcut,
        seed: a.seed.unwrap_or(0),
        parallelism: par,
    };
    let est = dobrushin_estimate(&channel, &search)?;
    let mut search_info = json!({
        "grid": a.grid,
        "refine_iters": a.refine_iters,
        "unital_shortcut": search.unital_shortcut,
    });
    if sampled {
        search_info["samples"] = json!(a.samples);
        search_info["seed"] = json!(search.seed);
    }
    Ok(Outcome::ok(json!({
        "channel": to_value(&spec),
        "estimate": to_value(&est),
        "search": search_info,
    })))
}

#[derive(Debug, Args)]
pub struct DoeblinArgs {
    #[arg(long)]
    channel: String,
    /// Weight of the constant-output component.
    #[arg(long)]
    gamma: f64,
    /// Output state Y of the constant channel as a matrix document; defaults
    /// to the maximally mixed state.
    #[arg(long)]
    y: Option<String>,
    /// Eigenvalue tolerance of the positivity test.
    #[arg(long, default_value_t = tol::INVARIANT)]
    tol: f64,
}

pub fn doeblin(a: &DoeblinArgs) -> CliResult<Outcome> {
    let spec = parse_channel(&a.channel)?;
    let channel = build_channel(&spec)?;
    let y = match &a.y {
        Some(doc) => HermitianMatrix::new(parse_json::<ComplexMatrix>("matrix", doc)?)?,
        None => {
            let d = channel.dim_out();
            HermitianMatrix::new(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))?
        }
    };
    let holds = doeblin_check(&channel, a.gamma, &y, a.tol)?;
    let min = doeblin_min_eigenvalue(&channel, a.gamma, &y, a.tol)?;
    Ok(Outcome::ok(json!({
        "channel": to_value(&spec),
        "gamma": a.gamma,
        "y": to_value(y.matrix()),
        "holds": holds,
        "min_eigenvalue": min,
        "test": "Choi(T) - gamma I (x) Y is PSD",
        "tol": a.tol,
        "implied_dobrushin": if holds { json!(1.0 - a.gamma) } else { Value::Null },
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    None,
    Laplace,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct SimulateAlg1Args {
    #[arg(long)]
    dataset: String,
    /// Two-outcome POVM {"elements": [...], "labels": [1, 0]}; defaults to
    /// the projector onto the first basis state (label 1) and its complement.
    #[arg(long)]
    povm: Option<String>,
    /// Measurements per run.
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = NoiseArg::None)]
    noise: NoiseArg,
    /// Laplace scale or Gaussian variance; calibrated from --eps and --t when absent.
    #[arg(long)]
    noise_scale: Option<f64>,
    #[arg(long, value_parser = parse_epsilon)]
    eps: Option<Epsilon>,
    #[arg(long)]
    delta: Option<f64>,
    /// Reports how often the mean deviates from its target by t/2 or more.
    #[arg(long)]
    t: Option<f64>,
}

fn default_povm(dim: usize) -> CliResult<BinaryPovm> {
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    let accept = HermitianMatrix::new(ComplexMatrix::diag_real(&e1))?;
    Ok(BinaryPovm::new(Povm::two_outcome(accept)?)?)
}

fn calibrate(
    a: &SimulateAlg1Args,
    spec: &EncodingSpec,
    x: &Dataset,
) -> CliResult<(NoiseSpec, Value)> {
    if a.noise == NoiseArg::None {
        if a.noise_scale.is_some() {
            return Err(input("--noise-scale needs --noise laplace or gaussian"));
        }
        return Ok((NoiseSpec::None, Value::Null));
    }
    if let Some(s) = a.noise_scale {
        let n = match a.noise {
            NoiseArg::Laplace => NoiseSpec::laplace(s)?,
            _ => NoiseSpec::gaussian(s)?,
        };
        return Ok((n, json!({"source": "explicit"})));
    }
    let (eps, t) = match (a.eps, a.t) {
        (Some(e), Some(t)) if !e.is_infinite() => (e.value(), t),
        _ => return Err(input("calibrated noise needs a finite --eps and --t")),
    };
    let g = match x {
        Dataset::Amplitude(_) => Some(gamma(x)?),
        _ => None,
    };
    let kappa = kappa_hat(spec, x.len(), g)?;
    let k = kappa["value"].as_f64().expect("number");
    let (noise, formula) = match a.noise {
        NoiseArg::Laplace => (
            NoiseSpec::laplace(alg1_laplace_scale(k, t, eps)?)?,
            "b = (sqrt(1 - kappa_hat) + t) / epsilon",
        ),
        _ => {
            let delta = a
                .delta
                .ok_or_else(|| input("Gaussian calibration needs --delta"))?;
            (
                NoiseSpec::gaussian(alg1_gaussian_sigma2(k, t, eps, delta)?)?,
                "sigma^2 = 2 ln(1.25/delta) (sqrt(1 - kappa_hat) + t)^2 / epsilon^2",
            )
        }
    };
    Ok((
        noise,
        json!({"source": "calibrated", "kappa_hat": kappa, "formula": formula}),
    ))
}

pub fn simulate(a: &SimulateAlg1Args, par: Parallelism) -> CliResult<Outcome> {
    let doc = parse_dataset(&a.dataset)?;
    let spec = doc.spec();
    let x = &doc.dataset;
    let dim = encode(x, &spec)?.dim();
    let povm = match &a.povm {
        Some(p) => BinaryPovm::new(parse_json::<Povm>("POVM", p)?)?,
        None => default_povm(dim)?,
    };
    let (noise, calibration) = calibrate(a, &spec, x)?;
    let sim = simulate_alg1(x, &spec, &povm, a.m, &noise, a.trials, a.seed, par)?;
    let mut out = json!({
        "target": sim.target,
        "m": a.m,
        "trials": sim.trials(),
        "seed": a.seed,
        "mean": sim.mean(),
        "std_error": sim.std_error(),
        "noise": to_value(&noise),
    });
    if !calibration.is_null() {
        out["calibration"] = calibration;
    }
    if let Some(t) = a.t {
        let (frac, se) = sim.exceedance(t / 2.0);
        let m = a.m as f64;
        out["concentration"] = json!({
            "t": t,
            "deviation": t / 2.0,
            "exceedance": frac,
            "exceedance_std_error": se,
            "hoeffding_bound": (2.0 * (-m * t * t / 2.0).exp()).min(1.0),
            "hoeffding_formula": "2 exp(-m t^2 / 2)",
            "printed_bound": (2.0 * (-m * t * t).exp()).min(1.0),
            "printed_formula": "2 exp(-m t^2)",
        });
    }
    Ok(Outcome::ok(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    /// One randomized-response coin per distinct sampled row.
    PerRowRr,
    /// An independent randomized-response coin per sampled value.
    PerSampleRr,
    Identity,
    Constant,
}

#[derive(Debug, Args)]
pub struct AuditDpArgs {
    /// Finite mechanism document {"inputs","outcomes","distributions","neighbors"}.
    #[arg(long, required_unless_present = "dataset", conflicts_with = "dataset")]
    model: Option<String>,
    /// Amplitude dataset for an exact l2-subsampling audit over binary records.
    #[arg(long, requires_all = ["m", "base"])]
    dataset: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    /// Mechanism run on the sampled records.
    #[arg(long, value_enum)]
    base: Option<BaseArg>,
    /// Epsilon of the randomized-response base.
    #[arg(long, value_parser = parse_epsilon)]
    base_eps: Option<Epsilon>,
    /// Claimed epsilon; for subsampling audits defaults to the amplified bound.
    #[arg(long, value_parser = parse_epsilon)]
    eps: Option<Epsilon>,
    #[arg(long)]
    delta: Option<f64>,
}

pub fn audit_dp(a: &AuditDpArgs) -> CliResult<Outcome> {
    if let Some(model) = &a.model {
        let model: MechanismModel = parse_json("mechanism model", model)?;
        let eps = a
            .eps
            .ok_or_else(|| input("--eps is required with --model"))?;
        let claimed = DpParams::new(eps, a.delta.unwrap_or(0.0))?;
        let report = audit_classical(&model, &claimed);
        return Ok(Outcome {
            violation: !report.satisfied,
            payload: to_value(&report),
        });
    }
    let x = parse_dataset(a.dataset.as_deref().expect("clap"))?.dataset;
    let m = a.m.expect("clap");
    let rr_eps = || {
        a.base_eps
            .ok_or_else(|| input("randomized-response bases need --base-eps"))
    };
    let (mech, base_dp): (Box<dyn SampleMechanism>, DpParams) = match a.base.expect("clap") {
        BaseArg::PerRowRr => {
            let eps = rr_eps()?;
            (Box::new(PerRowResponse { eps }), DpParams::new(eps, 0.0)?)
        }
        BaseArg::PerSampleRr => {
            let eps = rr_eps()?;
            (
                Box::new(PerSampleResponse { eps }),
                DpParams::new(eps, 0.0)?,
            )
        }
        BaseArg::Identity => (
            Box::new(IdentityOutput),
            DpParams::new(Epsilon::INFINITE, 0.0)?,
        ),
        BaseArg::Constant => (Box::new(ConstantOutput), DpParams::new(Epsilon::ZERO, 0.0)?),
    };
    let domain = RecordDomain::binary(x.len());
    let audit = audit_subsampling_theorem(&x, mech.as_ref(), &base_dp, m, &domain)?;
    let mut report = audit.report.clone();
    if a.eps.is_some() || a.delta.is_some() {
        // Re-audit the same model against the explicit claim.
        let claimed = DpParams::new(
            a.eps.unwrap_or(audit.bound.epsilon),
            a.delta.unwrap_or(audit.bound.delta),
        )?;
        let model = qdp_core::mechanisms::subsampled_model(&x, mech.as_ref(), m, &domain)?;
        report = audit_classical(&model, &claimed);
    }
    let mut payload = to_value(&report);
    payload["mechanism"] = json!(audit.mechanism);
    payload["gamma"] = json!(audit.gamma);
    payload["m"] = json!(m);
    payload["base"] = to_value(&audit.base);
    payload["bound"] = to_value(&audit.bound);
    payload["bound_formula"] = json!("(ln(1 + (e^epsilon - 1) Gamma m), delta Gamma m)");
    Ok(Outcome {
        violation: !report.satisfied,
        payload,
    })
}

#[derive(Debug, Args)]
pub struct AuditQdpArgs {
    /// Channel document (JSON or @file) or `identity`.
    #[arg(long)]
    channel: String,
    #[arg(long)]
    tau: f64,
    /// Claimed epsilon, or `inf`.
    #[arg(long, value_parser = parse_epsilon)]
    claimed_eps: Epsilon,
    /// Projector grid as AZIMUTHxPOLAR.
    #[arg(long, value_parser = parse_grid, default_value = "64x32")]
    grid: [usize; 2],
    /// Directions of the boundary state pairs as AZIMUTHxPOLAR.
    #[arg(long, value_parser = parse_grid, default_value = "12x7")]
    pair_grid: [usize; 2],
    /// Seeded random pairs per family.
    #[arg(long, default_value_t = 64)]
    random_pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn audit_qdp(a: &AuditQdpArgs, par: Parallelism) -> CliResult<Outcome> {
    let spec = parse_channel(&a.channel)?;
    let channel = build_channel(&spec)?;
    let search = QdpSearch {
        azimuth: a.grid[0],
        polar: a.grid[1],
        pair_azimuth: a.pair_grid[0],
        pair_polar: a.pair_grid[1],
        random_pairs: a.random_pairs,
        seed: a.seed,
        parallelism: par,
        ..QdpSearch::default()
    };
    let report = audit_channel_qdp(&channel, a.tau, a.claimed_eps, &search)?;
    let mut payload = to_value(&report);
    if let Some(Witness::Quantum(w)) = &report.witness {
        payload["witness"]["recomputed_eps"] = to_value(&w.recompute(&channel)?);
    }
    payload["channel"] = to_value(&spec);
    payload["search"]["pair_grid"] = json!(a.pair_grid);
    payload["search"]["random_pairs"] = json!(a.random_pairs);
    Ok(Outcome {
        violation: !report.satisfied,
        payload,
    })
}
