use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qikit::superop::is_cp;
use qikit::{ptm_from_kraus, random};
use qikit_bench::{feedback_circuit, mixed_state};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn conversions(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("ptm_from_kraus");
    for n in 1..=3 {
        let kraus = random::kraus_channel(&mut rng, n, 4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &kraus, |b, k| {
            b.iter(|| ptm_from_kraus(k).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("is_cp");
    for n in 1..=3 {
        let ptm = ptm_from_kraus(&random::kraus_channel(&mut rng, n, 4)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &ptm, |b, p| {
            b.iter(|| is_cp(p, 1e-8))
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_exact");
    for n in 1..=3 {
        let circuit = feedback_circuit(n);
        let v0 = mixed_state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &circuit, |b, c| {
            b.iter(|| c.run_exact(&v0, 1e-12).unwrap())
        });
    }
    group.finish();

    let circuit = feedback_circuit(2);
    let v0 = mixed_state(2);
    c.bench_function("run_sampled/2q_10k", |b| {
        b.iter(|| circuit.run_sampled(&v0, 10_000, 7).unwrap())
    });
}

criterion_group!(benches, conversions, simulation);
criterion_main!(benches);
