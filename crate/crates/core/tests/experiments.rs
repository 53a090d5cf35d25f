use mcgame::experiments::{
    gen_experiment, run_convergence, Distribution, ExperimentId, ExperimentSpec, MultivariateNormal,
};
use mcgame::mc::{stream_rng, StreamId, StreamKind};
use mcgame::Coalition;

fn sample_mean(dist: &Distribution, draws: usize) -> f64 {
    let mut rng = stream_rng(4, StreamId::new(StreamKind::Sampler, 0, 1));
    (0..draws).map(|_| dist.sample(&mut rng)).sum::<f64>() / draws as f64
}

#[test]
fn distribution_moments() {
    let m = sample_mean(&Distribution::uniform(-1.0, 1.0).unwrap(), 1_000_000);
    assert!(m.abs() < 0.01, "{m}");
    let m = sample_mean(&Distribution::beta(2.0, 5.0).unwrap(), 1_000_000);
    assert!((m - 2.0 / 7.0).abs() < 0.01, "{m}");
    let m = sample_mean(&Distribution::gamma(3.0, 2.0).unwrap(), 1_000_000);
    assert!((m - 6.0).abs() < 0.06, "{m}");
    let m = sample_mean(&Distribution::gamma(0.5, 1.0).unwrap(), 1_000_000);
    assert!((m - 0.5).abs() < 0.01, "{m}");
    let m = sample_mean(&Distribution::normal(5.0, 1.0).unwrap(), 1_000_000);
    assert!((m - 5.0).abs() < 0.01, "{m}");
}

#[test]
fn normal_second_argument_is_variance() {
    let dist = Distribution::normal(0.0, 3.0).unwrap();
    let mut rng = stream_rng(4, StreamId::new(StreamKind::Sampler, 1, 1));
    let draws = 1_000_000;
    let var = (0..draws)
        .map(|_| dist.sample(&mut rng).powi(2))
        .sum::<f64>()
        / draws as f64;
    assert!((var - 3.0).abs() < 0.03, "{var}");
}

#[test]
fn multivariate_normal_rejects_bad_covariance() {
    assert!(MultivariateNormal::new(vec![0.0; 2], &[1.0, 2.0, 2.0, 1.0]).is_err());
    assert!(MultivariateNormal::new(vec![0.0; 2], &[1.0, 0.5, 0.4, 1.0]).is_err());
    assert!(MultivariateNormal::exchangeable(3, 0.0, 3.0, 0.1).is_ok());
}

fn big(id: ExperimentId, p: usize) -> mcgame::experiments::GeneratedExperiment {
    let mut spec = ExperimentSpec::new(id, 12).with_p(p).unwrap();
    spec.size = 100_000;
    gen_experiment(&spec).unwrap()
}

#[test]
fn experiment_2b_tail_covariance() {
    let gen = big(ExperimentId::E2b, 6);
    let rows = gen.data.len() as f64;
    let mean = |c: usize| gen.data.column_mean(c);
    let (m5, m6) = (mean(4), mean(5));
    let cov = |a: usize, ma: f64, b: usize, mb: f64| {
        gen.data
            .rows()
            .map(|r| (r[a] - ma) * (r[b] - mb))
            .sum::<f64>()
            / (rows - 1.0)
    };
    let est = [cov(4, m5, 4, m5), cov(4, m5, 5, m6), cov(5, m6, 5, m6)];
    let target = [3.0, 0.1, 3.0];
    // Frobenius norms of the 2x2 matrices; the off-diagonal entry counts twice.
    let norm = |v: [f64; 3]| (v[0] * v[0] + 2.0 * v[1] * v[1] + v[2] * v[2]).sqrt();
    let diff = [est[0] - target[0], est[1] - target[1], est[2] - target[2]];
    assert!(norm(diff) <= 0.1 * norm(target), "{est:?}");
}

#[test]
fn every_model_is_finite_on_generated_rows() {
    for id in ExperimentId::ALL {
        let p = *id.standard_p().last().unwrap();
        let gen = big(id, p);
        for row in gen.data.rows() {
            let y = gen.model.evaluate(row).unwrap();
            assert!(y.is_finite(), "{id}: {row:?}");
        }
    }
}

#[test]
fn experiment_1a_shape_and_model() {
    let gen = gen_experiment(&ExperimentSpec::new(ExperimentId::E1a, 3)).unwrap();
    assert_eq!(gen.data.len(), 100);
    assert_eq!(gen.data.n_features(), 4);
    assert_eq!(gen.model.referenced_features(), Coalition::full(4).unwrap());
}

#[test]
fn generation_is_deterministic() {
    for id in ExperimentId::ALL {
        let spec = ExperimentSpec::new(id, 99);
        let a = gen_experiment(&spec).unwrap();
        let b = gen_experiment(&spec).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.model.describe(), b.model.describe());
        let c = gen_experiment(&ExperimentSpec::new(id, 100)).unwrap();
        assert_ne!(a.data, c.data);
    }
}

#[test]
fn experiment_1a_rmise_drops_over_the_grid() {
    let report = run_convergence(&ExperimentSpec::new(ExperimentId::E1a, 21)).unwrap();
    let per_k = &report.summary.per_k;
    let first = per_k.first().unwrap();
    let last = per_k.last().unwrap();
    assert_eq!((first.k, last.k), (512, 16384));
    assert_eq!(report.rows.len(), 6 * 50);
    let ratio = first.rmise_mean / last.rmise_mean;
    assert!(ratio >= 8.0, "ratio {ratio}");
}
