//! `qdpamp`: privacy-amplification calculators, simulations and audits.
//!
//! Exit codes: 0 ok, 1 invalid input or unmet precondition, 2 an audit found
//! a violation, 3 a dimension or enumeration limit was hit. The JSON payload
//! on stdout carries a matching `status`; diagnostics go to stderr.

mod commands;
mod emit;
mod inputs;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdp_core::Parallelism;
use serde_json::json;

use commands::*;
use emit::{render, Format};

#[derive(Debug, Parser)]
#[command(
    name = "qdpamp",
    version,
    about = "Privacy amplification for quantum encodings, l2 sampling and noisy channels"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Disable the thread pool; output is identical either way.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a dataset and report kernels and trace distances.
    ///
    /// Gives the closed-form minimum adjacent kernel of the encoding
    /// (basis 1 - 1/n, amplitude 1 - Gamma, rotation 0), the squared overlap of
    /// distinct-entry basis neighbours, and for a second dataset the exact
    /// kernel and trace distance of the pair (pure-state distance identity).
    EncodeKernel(EncodeKernelArgs),
    /// Classical DP implied by a quantum guarantee on an encoding.
    ///
    /// Quantum-to-classical transfer: (tau, eps, delta)-QDP gives (eps, delta)-DP
    /// once tau >= sqrt(1 - kappa_hat); the encoding alone gives (0, sqrt(1 - kappa_hat)).
    /// With --t, also the Laplace and Gaussian noise calibration of the
    /// encode-measure-average-perturb algorithm.
    AmplifyEncoding(AmplifyEncodingArgs),
    /// Amplification by l2 (Born-rule) subsampling.
    ///
    /// (ln(1 + (e^eps - 1) Gamma m), delta Gamma m) for an (eps, delta)-DP
    /// algorithm run on m l2 samples, and (0, Gamma m) for any algorithm.
    AmplifySampling(AmplifySamplingArgs),
    /// Closed-form QDP epsilon of a channel at radius tau.
    ///
    /// Depolarizing channel, phase-amplitude damping, unital qubit channels via
    /// their Dobrushin coefficient, and phase-amplitude damping after
    /// depolarizing in multiplicative and post-processing forms.
    ChannelEps(ChannelEpsArgs),
    /// Estimate the Dobrushin (trace-distance contraction) coefficient.
    ///
    /// Unital qubit channels use the operator norm of the Bloch transfer
    /// matrix; other channels are searched over orthogonal state pairs.
    Dobrushin(DobrushinArgs),
    /// Test the Doeblin minorisation of a channel by a constant channel.
    ///
    /// Holds when Choi(T) - gamma I (x) Y is PSD, in which case the channel is
    /// (1 - gamma)-Dobrushin.
    DoeblinCheck(DoeblinArgs),
    /// Monte-Carlo runs of the encode-measure-average-perturb algorithm.
    ///
    /// Reports the mean, its standard error and, with --t, the frequency of
    /// deviations of t/2 or more next to the Hoeffding bound.
    SimulateAlg1(SimulateAlg1Args),
    /// Exact hockey-stick audit of a finite mechanism.
    ///
    /// Either a mechanism model document, or an l2-subsampled mechanism over
    /// binary records audited against the subsampling amplification bound.
    /// Exits 2 when the claim is violated.
    AuditDp(AuditDpArgs),
    /// Measurement-ratio audit of a channel's QDP claim.
    ///
    /// Searches state pairs at trace distance tau and projective measurements
    /// for the largest likelihood ratio. Exits 2, with a witness, when it
    /// exceeds e^eps.
    AuditQdp(AuditQdpArgs),
}

fn run(cmd: &Command, par: Parallelism) -> inputs::CliResult<Outcome> {
    match cmd {
        Command::EncodeKernel(a) => encode_kernel(a),
        Command::AmplifyEncoding(a) => amplify_encoding(a),
        Command::AmplifySampling(a) => amplify_sampling(a),
        Command::ChannelEps(a) => channel_eps(a),
        Command::Dobrushin(a) => dobrushin(a, par),
        Command::DoeblinCheck(a) => doeblin(a),
        Command::SimulateAlg1(a) => simulate(a, par),
        Command::AuditDp(a) => audit_dp(a),
        Command::AuditQdp(a) => audit_qdp(a, par),
    }
}

fn emit(payload: &serde_json::Value, format: Format) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(render(payload, format).as_bytes());
    let _ = out.flush();
}

fn error_payload(status: &str, kind: &str, message: &str) -> serde_json::Value {
    json!({"status": status, "error": {"kind": kind, "message": message}})
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let msg = e.kind().to_string();
            emit(
                &error_payload("validation-error", "usage", &msg),
                Format::Json,
            );
            return ExitCode::from(1);
        }
    };
    let par = if cli.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Rayon
    };
    match run(&cli.command, par) {
        Ok(mut out) => {
            let status = if out.violation { "violation" } else { "ok" };
            out.payload["status"] = json!(status);
            emit(&out.payload, cli.format);
            if out.violation {
                eprintln!("audit violation: claimed bound exceeded");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            emit(
                &error_payload(e.status(), e.kind(), &e.to_string()),
                cli.format,
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use inputs::CliError;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    fn payload(args: &[&str]) -> (Outcome, Format) {
        let cli =
            Cli::try_parse_from(std::iter::once("qdpamp").chain(args.iter().copied())).unwrap();
        (
            run(&cli.command, Parallelism::Sequential).unwrap_or_else(|e| panic!("{e}")),
            cli.format,
        )
    }

    fn error(args: &[&str]) -> CliError {
        let cli =
            Cli::try_parse_from(std::iter::once("qdpamp").chain(args.iter().copied())).unwrap();
        run(&cli.command, Parallelism::Sequential)
            .err()
            .expect("error")
    }

    #[test]
    fn depolarizing_epsilon() {
        let (o, _) = payload(&[
            "channel-eps",
            "--channel",
            r#"{"kind":"depolarizing","p":0.5,"dim":2}"#,
            "--tau",
            "1",
        ]);
        assert!((o.payload["epsilon"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_parameter_is_a_validation_error() {
        let e = error(&[
            "channel-eps",
            "--channel",
            r#"{"kind":"depolarizing","p":1.5,"dim":2}"#,
            "--tau",
            "1",
        ]);
        assert_eq!(e.exit_code(), 1);
        assert_eq!(e.status(), "validation-error");
    }

    #[test]
    fn identity_audit_is_a_violation() {
        let (o, _) = payload(&[
            "audit-qdp",
            "--channel",
            "identity",
            "--tau",
            "1",
            "--claimed-eps",
            "3",
        ]);
        assert!(o.violation);
        assert_eq!(o.payload["eps_hat"], "inf");
        assert!(o.payload["witness"].is_object());
    }

    #[test]
    fn pad_after_depolarizing_reports_both_forms() {
        let ch = r#"{"kind":"compose","outer":{"kind":"pad","p":0.5,"gamma":0.3,"lambda":0.3},"inner":{"kind":"depolarizing","p":0.5}}"#;
        let (o, _) = payload(&["channel-eps", "--channel", ch, "--tau", "0.5"]);
        assert!(o.payload["epsilon"].is_number());
        assert!(o.payload["compositional"]["epsilon"].is_number());
    }

    #[test]
    fn sampling_precondition() {
        let e = error(&[
            "amplify-sampling",
            "--gamma",
            "0.5",
            "--m",
            "3",
            "--eps",
            "1",
        ]);
        assert_eq!(e.kind(), "precondition");
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn large_dimension_is_a_resource_error() {
        let e = error(&[
            "dobrushin",
            "--channel",
            r#"{"kind":"depolarizing","p":0.5,"dim":8}"#,
            "--seed",
            "1",
        ]);
        assert_eq!(e.exit_code(), 3);
        assert_eq!(e.status(), "resource-error");
    }

    #[test]
    fn subsampling_audit_at_the_bound() {
        let x = r#"{"mode":"amplitude","values":[0.5,0.5,0.5,0.5]}"#;
        let (o, _) = payload(&[
            "audit-dp",
            "--dataset",
            x,
            "--m",
            "2",
            "--base",
            "per-row-rr",
            "--base-eps",
            "1.0986122886681098",
        ]);
        assert!(!o.violation);
        let (o, _) = payload(&[
            "audit-dp",
            "--dataset",
            x,
            "--m",
            "2",
            "--base",
            "per-sample-rr",
            "--base-eps",
            "1.0986122886681098",
        ]);
        assert!(o.violation);
    }

    #[test]
    fn encoding_transfer_needs_radius() {
        let e = error(&[
            "amplify-encoding",
            "--encoding",
            "basis",
            "--n",
            "4",
            "--tau",
            "0.1",
            "--eps",
            "1",
        ]);
        assert_eq!(e.kind(), "insufficient-neighborhood");
    }

    #[test]
    fn doeblin_default_target() {
        let (o, _) = payload(&[
            "doeblin-check",
            "--channel",
            r#"{"kind":"depolarizing","p":1}"#,
            "--gamma",
            "1",
        ]);
        assert_eq!(o.payload["holds"], true);
        let (o, _) = payload(&["doeblin-check", "--channel", "identity", "--gamma", "0.1"]);
        assert_eq!(o.payload["holds"], false);
    }

    #[test]
    fn randomized_commands_need_a_seed() {
        let x = r#"{"mode":"amplitude","values":[0.6,0.8]}"#;
        assert!(
            Cli::try_parse_from(["qdpamp", "simulate-alg1", "--dataset", x, "--m", "10"]).is_err()
        );
    }
}
