use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qdp_core::auditor::{audit_channel_qdp, QdpSearch};
use qdp_core::channels::{build_channel, dobrushin_estimate, ChannelSpec, DobrushinSearch};
use qdp_core::encodings::{Dataset, EncodingSpec};
use qdp_core::linalg::{ComplexMatrix, HermitianMatrix, Povm};
use qdp_core::mechanisms::{simulate_alg1, BinaryPovm, NoiseSpec};
use qdp_core::privacy::Epsilon;
use qdp_core::Parallelism;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)];

fn dobrushin(c: &mut Criterion) {
    let mut group = c.benchmark_group("dobrushin");
    let qubit = build_channel(&ChannelSpec::pad(0.3, 0.4, 0.2)).unwrap();
    let qutrit = build_channel(&ChannelSpec::depolarizing(0.3, 3)).unwrap();
    for (name, mode) in MODES {
        let search = DobrushinSearch { parallelism: mode, ..DobrushinSearch::default() };
        group.bench_with_input(BenchmarkId::new("pad-grid", name), &search, |b, s| {
            b.iter(|| dobrushin_estimate(&qubit, s).unwrap())
        });
        let search = DobrushinSearch { samples: 1024, ..search };
        group.bench_with_input(BenchmarkId::new("qutrit-pairs", name), &search, |b, s| {
            b.iter(|| dobrushin_estimate(&qutrit, s).unwrap())
        });
    }
    group.finish();
}

fn qdp_audit(c: &mut Criterion) {
    let mut group = c.benchmark_group("audit_channel_qdp");
    group.sample_size(20);
    let ch = build_channel(&ChannelSpec::compose(ChannelSpec::pad(0.3, 0.4, 0.2), ChannelSpec::depolarizing(0.2, 2))).unwrap();
    for (name, mode) in MODES {
        let search = QdpSearch { parallelism: mode, ..QdpSearch::default() };
        group.bench_with_input(BenchmarkId::new("pad-dep", name), &search, |b, s| {
            b.iter(|| audit_channel_qdp(&ch, 0.5, Epsilon::new(1.0).unwrap(), s).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_alg1");
    group.sample_size(20);
    let x = Dataset::amplitude_real(&[0.6, 0.8]).unwrap();
    let e1 = HermitianMatrix::new(ComplexMatrix::diag_real(&[1.0, 0.0])).unwrap();
    let povm = BinaryPovm::new(Povm::two_outcome(e1).unwrap()).unwrap();
    let noise = NoiseSpec::laplace(0.1).unwrap();
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new("m100-trials10k", name), |b| {
            b.iter(|| simulate_alg1(&x, &EncodingSpec::amplitude(), &povm, 100, &noise, 10_000, 7, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dobrushin, qdp_audit, monte_carlo);
criterion_main!(benches);
