use bayes_lasso::diagnostics::{efficiency, ess_bulk, mix_percent, split_r_hat, split_r_hat_classic};
use bayes_lasso::samplers::{standard_normal, RngStream};

fn ar1(m: usize, n: usize, rho: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RngStream::new(seed);
    let innov = (1.0 - rho * rho).sqrt();
    (0..m)
        .map(|_| {
            let mut x = standard_normal(&mut rng);
            (0..n)
                .map(|_| {
                    x = rho * x + innov * standard_normal(&mut rng);
                    x
                })
                .collect()
        })
        .collect()
}

#[test]
fn ar1_matches_analytic_ess() {
    let rho = 0.9;
    let expected = 4.0 * 5000.0 * (1.0 - rho) / (1.0 + rho);
    for seed in [1, 2, 3] {
        let ess = ess_bulk(&ar1(4, 5000, rho, seed)).unwrap().value;
        assert!((ess / expected - 1.0).abs() < 0.25, "seed {seed}: {ess} vs {expected}");
    }
}

#[test]
fn disjoint_chains_have_low_ess_and_high_r_hat() {
    let mut chains = ar1(2, 2000, 0.0, 4);
    for x in chains[1].iter_mut() {
        *x += 5.0;
    }
    assert!(ess_bulk(&chains).unwrap().value < 0.1 * 4000.0);
    assert!(split_r_hat_classic(&chains).unwrap().value > 2.0);
    // ranks cap the between-chain spread: two disjoint halves give about 1.66
    assert!(split_r_hat(&chains).unwrap().value > 1.5);
}

#[test]
fn identical_stationary_chains() {
    let one = ar1(1, 4000, 0.0, 5).remove(0);
    let chains = vec![one.clone(), one.clone(), one];
    let r = split_r_hat(&chains).unwrap().value;
    assert!((0.99..=1.01).contains(&r), "{r}");
}

#[test]
fn trend_inflates_r_hat() {
    let mut rng = RngStream::new(6);
    let chain: Vec<f64> = (0..2000)
        .map(|i| i as f64 / 200.0 + 0.5 * standard_normal(&mut rng))
        .collect();
    assert!(split_r_hat(&[chain]).unwrap().value > 1.1);
}

#[test]
fn rank_based_invariances() {
    let chains = ar1(4, 1000, 0.5, 7);
    let ess = ess_bulk(&chains).unwrap().value;
    let r = split_r_hat(&chains).unwrap().value;

    let exp: Vec<Vec<f64>> = chains.iter().map(|c| c.iter().map(|x| x.exp()).collect()).collect();
    assert!((ess_bulk(&exp).unwrap().value - ess).abs() <= 1e-9 * ess);

    let affine: Vec<Vec<f64>> = chains
        .iter()
        .map(|c| c.iter().map(|x| 3.0 * x - 7.0).collect())
        .collect();
    assert!((split_r_hat(&affine).unwrap().value - r).abs() < 1e-12);
}

#[test]
fn ess_stays_below_slack_bound() {
    for seed in 10..15 {
        let ess = ess_bulk(&ar1(4, 500, -0.1, seed)).unwrap().value;
        assert!(ess <= 1.5 * 2000.0, "{ess}");
    }
}

#[test]
fn efficiency_mix_identity() {
    for (ess, n, t) in [(1234.5, 5000, 3.7), (10.0, 20_000, 0.01), (5000.0, 5000, 2.0)] {
        let eff = efficiency(ess, t).unwrap();
        let mix = mix_percent(ess, n).unwrap();
        assert!((eff - mix * n as f64 / (100.0 * t)).abs() <= 1e-12 * eff);
    }
}
