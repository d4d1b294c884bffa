//! Parsing of document-valued flags and the error classes behind exit codes.

use std::fmt;

use qdp_core::channels::ChannelSpec;
use qdp_core::encodings::DatasetDoc;
use qdp_core::privacy::Epsilon;
use serde::de::DeserializeOwned;

/// Failure of a subcommand, classified for the exit code.
#[derive(Debug)]
pub enum CliError {
    Core(qdp_core::Error),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_resource() => 3,
            _ => 1,
        }
    }

    pub fn status(&self) -> &'static str {
        if self.exit_code() == 3 {
            "resource-error"
        } else {
            "validation-error"
        }
    }

    pub fn kind(&self) -> &'static str {
        use qdp_core::Error::*;
        match self {
            CliError::Input(_) => "input",
            CliError::Core(e) => match e {
                Validation(_) => "validation",
                DimensionMismatch { .. } => "dimension-mismatch",
                Precondition(_) => "precondition",
                InsufficientNeighborhood { .. } => "insufficient-neighborhood",
                UnsupportedDimension { .. } => "unsupported-dimension",
                BudgetExceeded { .. } => "budget-exceeded",
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Input(s) => f.write_str(s),
        }
    }
}

impl From<qdp_core::Error> for CliError {
    fn from(e: qdp_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Inline text, or the contents of the file named after a leading `@`.
pub fn read_doc(arg: &str) -> CliResult<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

pub fn parse_json<T: DeserializeOwned>(what: &str, arg: &str) -> CliResult<T> {
    let text = read_doc(arg)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid {what}: {e}")))
}

/// A channel document, or the bare name `identity` for the qubit identity.
pub fn parse_channel(arg: &str) -> CliResult<ChannelSpec> {
    match arg.trim() {
        "identity" => Ok(ChannelSpec::Identity { dim: 2 }),
        _ => parse_json("channel", arg),
    }
}

pub fn parse_dataset(arg: &str) -> CliResult<DatasetDoc> {
    parse_json("dataset", arg)
}

/// `AZxPOL`, e.g. `64x32`.
pub fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, p) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid {s:?} must look like 64x32"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("grid {s:?} needs positive integers"))
    };
    Ok([parse(a)?, parse(p)?])
}

/// A non-negative number or `inf`.
pub fn parse_epsilon(s: &str) -> Result<Epsilon, String> {
    if s == "inf" {
        return Ok(Epsilon::INFINITE);
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    Epsilon::new(v).map_err(|e| e.to_string())
}
