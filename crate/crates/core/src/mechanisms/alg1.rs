use serde::Serialize;

use super::noise::{sample_noise, NoiseSpec};
use super::RandomStream;
use crate::encodings::{encode, Dataset, EncodingSpec};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{povm_probabilities, DensityMatrix, Povm};
use crate::par::map_indexed;
use crate::Parallelism;

/// Two-element POVM whose outcomes carry labels in `{0, 1}`.
#[derive(Debug, Clone)]
pub struct BinaryPovm(Povm);

impl BinaryPovm {
    pub fn new(povm: Povm) -> Result<Self> {
        if povm.elements().len() != 2 {
            return Err(Error::validation(format!(
                "binary POVM needs exactly two elements, got {}",
                povm.elements().len()
            )));
        }
        if povm.labels().iter().any(|&l| l != 0 && l != 1) {
            return Err(Error::validation("binary POVM labels must be 0 or 1"));
        }
        Ok(Self(povm))
    }

    pub fn povm(&self) -> &Povm {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Probability of reading label 1 on `rho`.
    pub fn prob_one(&self, rho: &DensityMatrix) -> Result<f64> {
        let probs = povm_probabilities(&self.0, rho)?;
        let p: f64 = probs
            .iter()
            .zip(self.0.labels())
            .filter(|(_, &l)| l == 1)
            .map(|(p, _)| p)
            .sum();
        Ok(p.clamp(0.0, 1.0))
    }
}

fn prepare(x: &Dataset, spec: &EncodingSpec, povm: &BinaryPovm, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::validation("m must be at least 1"));
    }
    let psi = encode(x, spec)?;
    check_dim(povm.dim(), psi.dim())?;
    povm.prob_one(&psi.density())
}

fn one_run(p1: f64, m: u64, noise: &NoiseSpec, stream: &mut RandomStream) -> f64 {
    let ones = (0..m).filter(|_| stream.bernoulli(p1)).count();
    ones as f64 / m as f64 + sample_noise(noise, stream)
}

/// Encode, measure `m` fresh copies, average the labels and add noise.
///
/// Each measurement is an independent Bernoulli draw with success
/// probability `Tr(E_1 rho(x))`; a label probability of exactly 0 or 1 gives
/// an exact mean.
pub fn run_alg1(
    x: &Dataset,
    spec: &EncodingSpec,
    povm: &BinaryPovm,
    m: u64,
    noise: &NoiseSpec,
    stream: &mut RandomStream,
) -> Result<f64> {
    noise.validate()?;
    let p1 = prepare(x, spec, povm, m)?;
    Ok(one_run(p1, m, noise, stream))
}

/// Outputs of repeated independent runs.
#[derive(Debug, Clone, Serialize)]
pub struct Alg1Trials {
    /// `Tr(E_1 rho(x))`, the noiseless expectation of the mean.
    pub target: f64,
    pub m: u64,
    pub seed: u64,
    pub outputs: Vec<f64>,
}

impl Alg1Trials {
    pub fn trials(&self) -> usize {
        self.outputs.len()
    }

    pub fn mean(&self) -> f64 {
        self.outputs.iter().sum::<f64>() / self.outputs.len() as f64
    }

    /// Standard error of [`Self::mean`].
    pub fn std_error(&self) -> f64 {
        let n = self.outputs.len() as f64;
        if n < 2.0 {
            return f64::NAN;
        }
        let mu = self.mean();
        let var = self.outputs.iter().map(|o| (o - mu) * (o - mu)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }

    /// Fraction of runs with `|O - target| >= dev`, and its standard error.
    pub fn exceedance(&self, dev: f64) -> (f64, f64) {
        let n = self.outputs.len() as f64;
        let hits = self.outputs.iter().filter(|o| (*o - self.target).abs() >= dev).count();
        let f = hits as f64 / n;
        (f, (f * (1.0 - f) / n).sqrt())
    }
}

/// `trials` independent runs; run `i` draws from substream `i` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_alg1(
    x: &Dataset,
    spec: &EncodingSpec,
    povm: &BinaryPovm,
    m: u64,
    noise: &NoiseSpec,
    trials: usize,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Alg1Trials> {
    noise.validate()?;
    if trials == 0 {
        return Err(Error::validation("trials must be at least 1"));
    }
    let p1 = prepare(x, spec, povm, m)?;
    let root = RandomStream::new(seed);
    let outputs = map_indexed(trials, parallelism, |i| {
        let mut s = root.split(i as u64);
        one_run(p1, m, noise, &mut s)
    });
    Ok(Alg1Trials {
        target: p1,
        m,
        seed,
        outputs,
    })
}
