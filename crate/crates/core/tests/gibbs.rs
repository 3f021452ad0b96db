use bayes_lasso::data::{standardize, synth_regression, Design, InteractionRule};
use bayes_lasso::diagnostics::ess_bulk;
use bayes_lasso::distribution::Lasso;
use bayes_lasso::gibbs::{
    hans_gibbs, hans_gibbs_with_path, pc_gibbs, run_chains, ChainOutput, CoordinatePath, GibbsConfig,
    PriorHyperparams, RegressionData, Sampler,
};
use bayes_lasso::par::{map_indexed, Execution};
use bayes_lasso::samplers::RngStream;
use lasso_oracles::{ks_critical_01, ks_statistic};
use nalgebra::{DMatrix, DVector};

// posterior moments of the one-predictor model below, from tools/posterior_oracle.py
const BETA_MEAN: f64 = 0.5220432744677161;
const BETA_SQ: f64 = 0.41607314694463915;
const SIGMA2_MEAN: f64 = 0.5129328109527669;
const LAMBDA2_MEAN: f64 = 1.1149943457243334;

fn one_predictor() -> RegressionData {
    let x = DMatrix::from_column_slice(6, 1, &[-1.2, -0.7, 0.1, 0.4, 0.6, 0.8]);
    let y = DVector::from_vec(vec![-1.1, -0.2, 0.3, -0.1, 0.9, 0.2]);
    RegressionData::new(x, y).unwrap()
}

const UNIT_PRIORS: PriorHyperparams = PriorHyperparams {
    a_tilde: 1.0,
    b_tilde: 1.0,
    u: 1.0,
    v: 1.0,
};

/// Pooled mean and its Monte Carlo standard error, `sd / sqrt(ESS)`.
fn mean_mcse(chains: &[Vec<f64>]) -> (f64, f64) {
    let all: Vec<f64> = chains.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let m = all.iter().sum::<f64>() / n;
    let sd = (all.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (m, sd / ess_bulk(chains).unwrap().value.sqrt())
}

fn column(chains: &[ChainOutput], f: impl Fn(&ChainOutput) -> Vec<f64>) -> Vec<Vec<f64>> {
    chains.iter().map(f).collect()
}

fn beta_col(j: usize) -> impl Fn(&ChainOutput) -> Vec<f64> {
    move |c| c.beta_draws.column(j).iter().copied().collect()
}

fn check(label: &str, chains: &[Vec<f64>], target: f64) {
    let (m, se) = mean_mcse(chains);
    assert!((m - target).abs() < 4.0 * se, "{label}: {m} vs {target} (mcse {se})");
}

#[test]
fn one_predictor_posterior_matches_quadrature() {
    let data = one_predictor();
    let cfg = GibbsConfig {
        n_samples: 20_000,
        n_burnin: 1000,
        seed: 2024,
        ..GibbsConfig::default()
    };
    let runs: Vec<(&str, Vec<ChainOutput>)> = vec![
        ("pc", run_chains(&data, &UNIT_PRIORS, &cfg, Sampler::Pc, 4, Execution::Parallel).unwrap()),
        ("hans-gram", run_chains(&data, &UNIT_PRIORS, &cfg, Sampler::Hans, 4, Execution::Parallel).unwrap()),
        (
            "hans-residual",
            map_indexed(4, Execution::Parallel, |k| {
                let mut rng = RngStream::with_stream(cfg.seed, k as u64 + 1);
                hans_gibbs_with_path(&data, &UNIT_PRIORS, &cfg, CoordinatePath::Residual, &mut rng).unwrap()
            }),
        ),
    ];
    for (label, chains) in &runs {
        check(&format!("{label} beta"), &column(chains, beta_col(0)), BETA_MEAN);
        let sq = column(chains, |c| c.beta_draws.column(0).iter().map(|b| b * b).collect());
        check(&format!("{label} beta^2"), &sq, BETA_SQ);
        check(&format!("{label} sigma2"), &column(chains, |c| c.sigma2_draws.clone()), SIGMA2_MEAN);
        check(&format!("{label} lambda2"), &column(chains, |c| c.lambda2_draws.clone()), LAMBDA2_MEAN);
    }
}

#[test]
fn pc_without_penalty_is_the_linear_model() {
    let d = synth_regression(50, &[1.0, -0.5, 0.25], 0.8, Design::IidNormal, 31).unwrap();
    let s = standardize(&d, InteractionRule::None).unwrap();
    let data = s.data;
    let priors = PriorHyperparams::default();
    let cfg = GibbsConfig {
        n_samples: 10_000,
        n_burnin: 200,
        seed: 8,
        pin_lambda2: Some(0.0),
        ..GibbsConfig::default()
    };
    let chains = run_chains(&data, &priors, &cfg, Sampler::Pc, 2, Execution::Parallel).unwrap();

    let ols = data.xtx.clone().cholesky().unwrap().solve(&data.xty);
    for j in 0..3 {
        check(&format!("beta[{j}]"), &column(&chains, beta_col(j)), ols[j]);
    }
    // σ² marginal is IG(ã + n/2, b̃ + RSS/2) once β is integrated out
    let n = data.n() as f64;
    let target = (priors.b_tilde + 0.5 * data.rss(&ols)) / (priors.a_tilde + 0.5 * n - 1.0);
    check("sigma2", &column(&chains, |c| c.sigma2_draws.clone()), target);
    assert!(chains.iter().all(|c| c.lambda2_draws.iter().all(|&l| l == 0.0)));
}

#[test]
fn degenerate_single_observation_is_symmetric() {
    let data = RegressionData::new(DMatrix::from_element(1, 1, 1.0), DVector::from_element(1, 0.0)).unwrap();
    let cfg = GibbsConfig {
        n_samples: 20_000,
        n_burnin: 500,
        seed: 3,
        ..GibbsConfig::default()
    };
    for sampler in [Sampler::Pc, Sampler::Hans] {
        let chains = run_chains(&data, &UNIT_PRIORS, &cfg, sampler, 2, Execution::Parallel).unwrap();
        check(sampler.name(), &column(&chains, beta_col(0)), 0.0);
    }
}

/// First coordinate of the first sweep: a draw from the full conditional at
/// the starting state, through the sampler's own bookkeeping.
fn first_coordinate_draws(data: &RegressionData, path: CoordinatePath, start: &[f64], n: usize) -> Vec<f64> {
    let cfg = GibbsConfig {
        n_samples: 1,
        n_burnin: 0,
        sigma2_init: 0.8,
        lambda2_init: 2.5,
        beta_init: Some(start.to_vec()),
        ..GibbsConfig::default()
    };
    map_indexed(n / 1000, Execution::Parallel, |block| {
        (0..1000)
            .map(|i| {
                let mut rng = RngStream::with_stream(99, (block * 1000 + i) as u64);
                let out = hans_gibbs_with_path(data, &PriorHyperparams::default(), &cfg, path, &mut rng).unwrap();
                out.beta_draws[(0, 0)]
            })
            .collect::<Vec<_>>()
    })
    .concat()
}

#[test]
fn frozen_conditional_draws_follow_lasso_law() {
    for (n, p) in [(30, 4), (6, 12)] {
        let d = synth_regression(n, &vec![0.5; p], 1.0, Design::Correlated(0.3), 40 + n as u64).unwrap();
        let data = standardize(&d, InteractionRule::None).unwrap().data;
        let start: Vec<f64> = (0..p).map(|j| 0.3 * j as f64 - 0.4).collect();

        // full conditional of β_0, built directly from the definition
        let (sigma2, lambda) = (0.8f64, 2.5f64.sqrt());
        let x0 = data.x.column(0);
        let mut partial = data.y.clone();
        for j in 1..p {
            partial -= data.x.column(j) * start[j];
        }
        let law = Lasso::new(x0.norm_squared() / sigma2, x0.dot(&partial) / sigma2, lambda / sigma2.sqrt()).unwrap();

        for path in [CoordinatePath::Gram, CoordinatePath::Residual] {
            let draws = first_coordinate_draws(&data, path, &start, 100_000);
            let ks = ks_statistic(&draws, |x| law.cdf(x).unwrap());
            assert!(ks < ks_critical_01(draws.len()), "n={n} p={p} {path:?}: {ks}");
        }
    }
}

#[test]
fn tracked_rss_matches_recomputed() {
    for (n, p) in [(40, 8), (10, 25)] {
        let d = synth_regression(n, &vec![1.0; p], 0.5, Design::IidNormal, 7).unwrap();
        let data = standardize(&d, InteractionRule::None).unwrap().data;
        let cfg = GibbsConfig {
            n_samples: 300,
            n_burnin: 0,
            audit_rss: true,
            ..GibbsConfig::default()
        };
        for path in [CoordinatePath::Gram, CoordinatePath::Residual] {
            let out =
                hans_gibbs_with_path(&data, &PriorHyperparams::default(), &cfg, path, &mut RngStream::new(1)).unwrap();
            assert!(out.stats.max_rss_rel_error < 1e-8, "{path:?}: {}", out.stats.max_rss_rel_error);
        }
    }
}

#[test]
fn hans_sweep_cost_is_bounded() {
    for (n, p) in [(60, 15), (12, 40)] {
        let d = synth_regression(n, &vec![0.2; p], 1.0, Design::IidNormal, 5).unwrap();
        let data = standardize(&d, InteractionRule::None).unwrap().data;
        let cfg = GibbsConfig {
            n_samples: 50,
            n_burnin: 10,
            ..GibbsConfig::default()
        };
        let out = hans_gibbs(&data, &PriorHyperparams::default(), &cfg, &mut RngStream::new(2)).unwrap();
        assert_eq!(out.stats.factorizations, 0);
        assert_eq!(out.stats.coordinate_updates, 60 * p as u64);
        assert!(out.stats.max_coordinate_vector_len <= n.min(p));

        let out = pc_gibbs(&data, &PriorHyperparams::default(), &cfg, &mut RngStream::new(2)).unwrap();
        assert_eq!(out.stats.factorizations, 60);
    }
}

#[test]
fn sparse_truth_is_covered() {
    let truth = [2.0, 0.0, 0.0, -3.0, 0.0];
    let d = synth_regression(100, &truth, 1.0, Design::IidNormal, 17).unwrap();
    // the truth lives on the raw scale; keep the design unscaled but centred
    let s = standardize(&d, InteractionRule::None).unwrap();
    let cfg = GibbsConfig {
        n_samples: 4000,
        n_burnin: 500,
        seed: 5,
        ..GibbsConfig::default()
    };
    for sampler in [Sampler::Pc, Sampler::Hans] {
        let chains = run_chains(&s.data, &PriorHyperparams::default(), &cfg, sampler, 2, Execution::Parallel).unwrap();
        for (j, t) in truth.iter().enumerate() {
            let all: Vec<f64> = column(&chains, beta_col(j)).concat();
            let m = all.iter().sum::<f64>() / all.len() as f64;
            let sd = (all.iter().map(|v| (v - m).powi(2)).sum::<f64>() / all.len() as f64).sqrt();
            // back to the raw scale of column j
            let (m, sd) = (m / s.x_sds[j], sd / s.x_sds[j]);
            assert!((m - t).abs() < 3.0 * sd, "{sampler:?} beta[{j}] = {m} ± {sd}, truth {t}");
        }
    }
}

#[test]
fn samplers_agree_when_p_exceeds_n() {
    let mut truth = vec![0.0; 30];
    truth[0] = 1.5;
    truth[5] = -1.0;
    let d = synth_regression(15, &truth, 0.5, Design::IidNormal, 23).unwrap();
    let data = standardize(&d, InteractionRule::None).unwrap().data;
    let cfg = GibbsConfig {
        n_samples: 5000,
        n_burnin: 1000,
        seed: 77,
        ..GibbsConfig::default()
    };
    let pc = run_chains(&data, &PriorHyperparams::default(), &cfg, Sampler::Pc, 4, Execution::Parallel).unwrap();
    let hans = run_chains(&data, &PriorHyperparams::default(), &cfg, Sampler::Hans, 4, Execution::Parallel).unwrap();
    let mut worst: f64 = 0.0;
    let mut params: Vec<Box<dyn Fn(&ChainOutput) -> Vec<f64>>> = vec![
        Box::new(|c: &ChainOutput| c.sigma2_draws.clone()),
        Box::new(|c: &ChainOutput| c.lambda2_draws.clone()),
    ];
    for j in 0..30 {
        params.push(Box::new(beta_col(j)));
    }
    for f in &params {
        let (m1, s1) = mean_mcse(&column(&pc, f));
        let (m2, s2) = mean_mcse(&column(&hans, f));
        worst = worst.max((m1 - m2).abs() / s1.hypot(s2));
    }
    // 32 comparisons; a 4.5 standard-error band keeps the false-alarm rate small
    assert!(worst < 4.5, "largest standardized gap {worst}");
}
