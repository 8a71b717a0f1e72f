use mobo_core::doe::{lhs_sample, BoxDomain, Dataset};
use mobo_core::problems::{bnh, zdt, Problem};
use mobo_core::rng;
use mobo_core::surrogate::{GaussianProcess, GpConfig, Kernel, SurrogateBundle};

fn check_interpolation(gp: &GaussianProcess, xs: &[Vec<f64>], ys: &[f64]) {
    let bound = (gp.hyperparameters().nugget).sqrt() * gp.prior_std() * (1.0 + 1e-6);
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(1.0);
    for (x, &y) in xs.iter().zip(ys) {
        let (m, s) = gp.predict(x);
        assert!((m - y).abs() <= 1e-3 * scale, "mean {m} vs {y}");
        assert!(s <= bound, "sigma {s} > {bound}");
    }
}

#[test]
fn interpolates_benchmark_outputs() {
    let p = bnh();
    let xs = lhs_sample(p.domain(), 15, 3).unwrap();
    for k in 0..4 {
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                let e = p.evaluate(x).unwrap();
                if k < 2 {
                    e.f[k]
                } else {
                    e.g[k - 2]
                }
            })
            .collect();
        for kernel in [Kernel::Matern52, Kernel::SquaredExponential] {
            let cfg = GpConfig { kernel, ..Default::default() };
            let gp = GaussianProcess::fit_in_domain(&xs, &ys, p.domain(), &cfg).unwrap();
            check_interpolation(&gp, &xs, &ys);
        }
    }
}

#[test]
fn leave_one_out_error_is_small() {
    let p = zdt(1, 2).unwrap();
    let xs = lhs_sample(p.domain(), 20, 5).unwrap();
    let ys: Vec<f64> = xs.iter().map(|x| p.evaluate(x).unwrap().f[0]).collect();
    let mut sq = 0.0;
    for i in 0..xs.len() {
        let mut tx = xs.clone();
        let mut ty = ys.clone();
        tx.remove(i);
        ty.remove(i);
        let gp = GaussianProcess::fit_in_domain(&tx, &ty, p.domain(), &GpConfig::default()).unwrap();
        sq += (gp.predict_mean(&xs[i]) - ys[i]).powi(2);
    }
    let rmse = (sq / xs.len() as f64).sqrt();
    assert!(rmse < 0.2, "rmse {rmse}");
}

#[test]
fn prior_reversion_and_constant_targets() {
    let dom = BoxDomain::unit(3).unwrap();
    let xs = lhs_sample(&dom, 10, 9).unwrap();
    let ys: Vec<f64> = xs.iter().map(|x| x[0].sin() + x[1] * x[2]).collect();
    let gp = GaussianProcess::fit_in_domain(&xs, &ys, &dom, &GpConfig::default()).unwrap();
    let (m, s) = gp.predict(&[1e4, 1e4, -1e4]);
    assert!((m - gp.trend()).abs() <= 1e-9 * gp.trend().abs().max(1.0));
    assert!((s - gp.prior_std()).abs() <= 1e-9 * gp.prior_std());

    let gp = GaussianProcess::fit_in_domain(&xs, &[-7.25; 10], &dom, &GpConfig::default()).unwrap();
    let mut r = rng::stream(1, &[]);
    for _ in 0..50 {
        let x: Vec<f64> = (0..3).map(|_| rand::Rng::random::<f64>(&mut r)).collect();
        assert_eq!(gp.predict_mean(&x), -7.25);
    }
}

#[test]
fn translation_of_the_domain_shifts_predictions() {
    let dom = BoxDomain::unit(2).unwrap();
    let shifted = BoxDomain::new(vec![10.0, -3.0], vec![11.0, -2.0]).unwrap();
    let xs = lhs_sample(&dom, 12, 4).unwrap();
    let ys: Vec<f64> = xs.iter().map(|x| (3.0 * x[0]).cos() + x[1] * x[1]).collect();
    let moved: Vec<Vec<f64>> = xs.iter().map(|x| vec![x[0] + 10.0, x[1] - 3.0]).collect();
    let a = GaussianProcess::fit_in_domain(&xs, &ys, &dom, &GpConfig::default()).unwrap();
    let b = GaussianProcess::with_hyperparameters(
        &moved,
        &ys,
        Some(&shifted),
        Kernel::Matern52,
        a.hyperparameters().clone(),
    )
    .unwrap();
    for q in [[0.3, 0.7], [0.55, 0.1], [0.9, 0.9]] {
        let (ma, sa) = a.predict(&q);
        let (mb, sb) = b.predict(&[q[0] + 10.0, q[1] - 3.0]);
        assert!((ma - mb).abs() < 1e-8 && (sa - sb).abs() < 1e-8);
    }
}

#[test]
fn bundle_matches_independent_fits() {
    let p = bnh();
    let mut ds = Dataset::new(p.domain().clone(), 2, 2, 0);
    for x in lhs_sample(p.domain(), 9, 2).unwrap() {
        let e = p.evaluate(&x).unwrap();
        ds.push(&x, &e.f, &e.g, &e.h).unwrap();
    }
    let cfg = GpConfig { seed: 77, ..Default::default() };
    let bundle = SurrogateBundle::fit(&ds, &cfg).unwrap();
    assert_eq!((bundle.objectives.len(), bundle.ineq_constraints.len(), bundle.eq_constraints.len()), (2, 2, 0));
    let all: Vec<&GaussianProcess> = bundle.objectives.iter().chain(&bundle.ineq_constraints).collect();
    for (k, gp) in all.into_iter().enumerate() {
        let solo_cfg = GpConfig {
            seed: rng::derive_seed(77, &[k as u64]),
            ..cfg.clone()
        };
        let solo = GaussianProcess::fit_in_domain(ds.points(), &ds.output_column(k), p.domain(), &solo_cfg).unwrap();
        assert_eq!(gp, &solo);
    }
}

#[test]
fn json_round_trip_reproduces_predictions() {
    let p = bnh();
    let xs = lhs_sample(p.domain(), 9, 8).unwrap();
    let ys: Vec<f64> = xs.iter().map(|x| p.evaluate(x).unwrap().f[1]).collect();
    let gp = GaussianProcess::fit_in_domain(&xs, &ys, p.domain(), &GpConfig::default()).unwrap();
    let back: GaussianProcess = serde_json::from_str(&serde_json::to_string(&gp).unwrap()).unwrap();
    for x in lhs_sample(p.domain(), 20, 1).unwrap() {
        assert_eq!(gp.predict(&x), back.predict(&x));
    }
}
