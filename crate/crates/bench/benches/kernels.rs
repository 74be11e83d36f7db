use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};

use regimes_bench::nhhm_fixture;
use regimes_core::forecast::{crps_empirical, PredictiveSample};
use regimes_core::hmm::{ffbs_sample, forward_filter, uniform_init, EmissionParams, TransitionModel};
use regimes_core::models::{fit, McmcConfig, ModelSpec};
use regimes_core::samplers::{gibbs_multinomial_logit, sample_pg1};
use regimes_core::SeededRng;

fn filter(c: &mut Criterion) {
    let mut g = c.benchmark_group("forward_filter");
    for m in [2, 3, 5] {
        let data = nhhm_fixture(m, 2000, 1);
        let d = &data.data;
        let x_mean = d.x.select_columns(&[0]);
        let em = EmissionParams::new((0..m).map(|s| vec![s as f64]).collect(), vec![1.0; m]).unwrap();
        let tr = TransitionModel::zero_multinomial(m, d.x.ncols());
        let init = uniform_init(m);
        g.bench_with_input(BenchmarkId::new("T2000", m), &m, |b, _| {
            b.iter(|| forward_filter(&d.y, &x_mean, &d.x, &em, &tr, &init).unwrap())
        });
        let fp = forward_filter(&d.y, &x_mean, &d.x, &em, &tr, &init).unwrap();
        let mut rng = SeededRng::seed_from_u64(2);
        g.bench_with_input(BenchmarkId::new("ffbs_T2000", m), &m, |b, _| b.iter(|| ffbs_sample(&mut rng, &fp)));
    }
    g.finish();
}

fn polya_gamma(c: &mut Criterion) {
    let mut g = c.benchmark_group("pg1");
    let mut rng = SeededRng::seed_from_u64(3);
    for z in [0.0, 1.0, 5.0, 20.0] {
        g.bench_with_input(BenchmarkId::from_parameter(z), &z, |b, &z| b.iter(|| sample_pg1(&mut rng, z)));
    }
    g.finish();
}

fn logit_sweep(c: &mut Criterion) {
    let data = nhhm_fixture(3, 2000, 4);
    let active: Vec<usize> = (0..data.data.x.ncols()).collect();
    let mut rng = SeededRng::seed_from_u64(5);
    c.bench_function("multinomial_sweep_m3_T2000", |b| {
        b.iter_batched(
            || vec![vec![vec![0.0; 4]; 3]; 3],
            |coefs| gibbs_multinomial_logit(&mut rng, &data.path, &data.data.x, coefs, 10.0, &active).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn crps(c: &mut Criterion) {
    let mut rng = SeededRng::seed_from_u64(6);
    let sample = PredictiveSample {
        horizon: 1,
        draws: (0..2000).map(|_| rng.random::<f64>()).collect(),
        realized: 0.3,
    };
    c.bench_function("crps_N2000", |b| b.iter(|| crps_empirical(&sample).unwrap()));
}

fn short_fit(c: &mut Criterion) {
    let data = nhhm_fixture(2, 500, 7);
    let spec = ModelSpec::for_dataset("NHHM_2", &data.data).unwrap();
    let cfg = McmcConfig {
        iterations: 200,
        burn_in: 100,
        thin: 1,
        seed: 8,
    };
    let mut g = c.benchmark_group("fit");
    g.sample_size(10);
    g.bench_function("nhhm2_T500_200it", |b| b.iter(|| fit(&data.data, &spec, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, filter, polya_gamma, logit_sweep, crps, short_fit);
criterion_main!(benches);
