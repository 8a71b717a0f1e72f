//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Criteria 1-4 run the full protocol (10 repetitions, budget 20 d) and take
//! most of the wall time; OSY dominates at roughly 90 s per repetition.

use std::process::ExitCode;
use std::time::Instant;

use mobo::config::{ProblemSpec, RunConfig};
use mobo::driver::{run_experiment, ExperimentSummary, RunRecord};
use mobo_core::acquisition::{
    expected_hypervolume_improvement, probability_of_improvement, reference_point, AcquisitionContext,
    AcquisitionKind, Criterion, Regularization, SortedFront,
};
use mobo_core::doe::{lhs_sample, BoxDomain, Dataset};
use mobo_core::inner_opt::{maximize_acquisition, InfillObjective, InnerConfig, RawInfill};
use mobo_core::nsga2::{fast_nondominated_sort, run_nsga2, Nsga2Config};
use mobo_core::pareto::{hypervolume, igd_plus, nondominated_filter, reference_front};
use mobo_core::problems::{bnh, zdt, Benchmark, Problem};
use mobo_core::rng;
use mobo_core::surrogate::{GaussianProcess, GpConfig, Kernel, SurrogateBundle};
use mobo_validation::{brute_filter, brute_fronts, hv_gain, mean_and_se, random_front};
use rand::Rng;

const REPS: usize = 10;
const TABLE1_BOUND: f64 = 5e-2;
const BNH_FEASIBLE_FRACTION: f64 = 0.9;
const BNH_FEASIBLE_AFTER: usize = 10;
const BNH_IGD_BOUND: f64 = 0.5;
const OSY_RANGE: (f64, f64) = (5.0, 30.0);
const MC_DRAWS: usize = 1_000_000;
const MC_SIGMAS: f64 = 3.0;
const ORACLE_CONTEXTS: usize = 50;
const SORT_INSTANCES: usize = 100;
const SORT_MAX_N: usize = 200;
const COMPLIANCE_INSTANCES: usize = 100;
const GP_INTERPOLATION_SLACK: f64 = 1e-6;
const GRID_CONTEXTS: usize = 20;
const GRID_SLACK: f64 = 1e-6;
/// Largest IGD+ over seeds 0..10 of the default direct BNH run was 0.2156.
const NSGA2_BNH_BOUND: f64 = 0.22;

struct Outcome {
    pass: bool,
    detail: String,
    warning: Option<String>,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, warning: None }
}

fn experiment(problem: &str, kind: AcquisitionKind) -> (ExperimentSummary, Vec<RunRecord>) {
    let mut cfg = RunConfig::new(ProblemSpec::benchmark(problem, 2), kind);
    cfg.repetitions = REPS;
    let (summary, records) = run_experiment(&cfg).expect("experiment");
    assert!(summary.failures.is_empty(), "{problem}: {:?}", summary.failures);
    (summary, records)
}

fn front_stats(s: &ExperimentSummary) -> (f64, f64) {
    (s.front_mean.unwrap_or(f64::INFINITY), s.front_std.unwrap_or(f64::INFINITY))
}

fn criterion_1() -> Outcome {
    let kind = AcquisitionKind::new(Criterion::Pi, Regularization::Sum, 100.0).unwrap();
    let (z1, _) = front_stats(&experiment("zdt1", kind).0);
    let (z2, _) = front_stats(&experiment("zdt2", AcquisitionKind::plain(Criterion::Ehvi)).0);
    outcome(
        z1 <= TABLE1_BOUND && z2 <= TABLE1_BOUND,
        format!("ZDT1 PI(reg=sum) mean {z1:.3e}, ZDT2 EHVI mean {z2:.3e}, bound {TABLE1_BOUND:.0e}"),
    )
}

fn criterion_2() -> Outcome {
    let reg = AcquisitionKind::new(Criterion::Pi, Regularization::Max, 100.0).unwrap();
    let (m_reg, s_reg) = front_stats(&experiment("zdt1", reg).0);
    let (m_none, s_none) = front_stats(&experiment("zdt1", AcquisitionKind::plain(Criterion::Pi)).0);
    let pooled = ((s_reg * s_reg + s_none * s_none) / 2.0).sqrt();
    let mut o = outcome(
        m_reg < m_none,
        format!("ZDT1 PI(reg=max) mean {m_reg:.3e} vs plain PI mean {m_none:.3e}, pooled sd {pooled:.3e}"),
    );
    if o.pass && m_none - m_reg < pooled {
        o.warning = Some("difference is within one pooled standard deviation".into());
    }
    o
}

fn criterion_3() -> Outcome {
    let (summary, records) = experiment("bnh", AcquisitionKind::plain(Criterion::Ehvi));
    let late: Vec<bool> = records
        .iter()
        .flat_map(|r| r.rows.iter().filter(|row| row.iteration > BNH_FEASIBLE_AFTER).map(|row| row.sample.feasible))
        .collect();
    let frac = late.iter().filter(|&&ok| ok).count() as f64 / late.len() as f64;
    let (m, _) = front_stats(&summary);
    outcome(
        frac >= BNH_FEASIBLE_FRACTION && m <= BNH_IGD_BOUND,
        format!(
            "BNH EHVI feasible fraction after iteration {BNH_FEASIBLE_AFTER}: {frac:.3} ({} points), mean IGD+ {m:.3e}",
            late.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let (summary, _) = experiment("osy", AcquisitionKind::plain(Criterion::Ehvi));
    let (m, s) = front_stats(&summary);
    outcome(
        (OSY_RANGE.0..=OSY_RANGE.1).contains(&m),
        format!("OSY EHVI mean IGD+ {m:.3e} (sd {s:.3e}), accepted range [{}, {}]", OSY_RANGE.0, OSY_RANGE.1),
    )
}

fn criterion_5() -> Outcome {
    let mut r = rng::stream(5, &[]);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for c in 0..ORACLE_CONTEXTS {
        let k = 1 + c % 20;
        let a = random_front(&mut r, k);
        let front = SortedFront::new(&a).unwrap();
        let refp = [1.1, 1.1];
        let mu = [r.random_range(-0.2..1.2), r.random_range(-0.2..1.2)];
        let sigma = [r.random_range(0.02..0.5), r.random_range(0.02..0.5)];
        let pi = probability_of_improvement(&front, &mu, &sigma);
        let ehvi = expected_hypervolume_improvement(&front, &refp, &mu, &sigma).unwrap();
        let (mut s_pi, mut s_ev, mut s_ev2) = (0.0, 0.0, 0.0);
        for _ in 0..MC_DRAWS {
            let y = [
                mu[0] + sigma[0] * rng::standard_normal(&mut r),
                mu[1] + sigma[1] * rng::standard_normal(&mut r),
            ];
            if !a.iter().any(|p| p[0] <= y[0] && p[1] <= y[1]) {
                s_pi += 1.0;
            }
            let g = hv_gain(&a, &refp, y);
            s_ev += g;
            s_ev2 += g * g;
        }
        let (m_pi, se_pi) = mean_and_se(s_pi, s_pi, MC_DRAWS);
        let (m_ev, se_ev) = mean_and_se(s_ev, s_ev2, MC_DRAWS);
        for z in [(pi - m_pi).abs() / se_pi, (ehvi - m_ev).abs() / se_ev] {
            worst = worst.max(z);
            if z > MC_SIGMAS {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!(
            "{ORACLE_CONTEXTS} contexts, {MC_DRAWS} draws: {failures} comparisons beyond {MC_SIGMAS} SE, worst {worst:.2} SE"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut r = rng::stream(6, &[]);
    let mut hv_fail = 0;
    let mut worst = 0.0f64;
    for _ in 0..ORACLE_CONTEXTS {
        let k = r.random_range(1..=30);
        let a = random_front(&mut r, k);
        let refp = [1.0 + r.random::<f64>(), 1.0 + r.random::<f64>()];
        let hv = hypervolume(&a, &refp).unwrap();
        let box_area = refp[0] * refp[1];
        let hits = (0..MC_DRAWS)
            .filter(|_| {
                let u = [r.random::<f64>() * refp[0], r.random::<f64>() * refp[1]];
                a.iter().any(|p| p[0] <= u[0] && p[1] <= u[1])
            })
            .count() as f64;
        let frac = hits / MC_DRAWS as f64;
        let se = (frac * (1.0 - frac) / MC_DRAWS as f64).sqrt().max(1.0 / MC_DRAWS as f64) * box_area;
        let z = (hv - frac * box_area).abs() / se;
        worst = worst.max(z);
        if z > MC_SIGMAS {
            hv_fail += 1;
        }
    }
    let mut sort_fail = 0;
    for i in 0..SORT_INSTANCES {
        let n = 1 + (i * SORT_MAX_N) / SORT_INSTANCES + r.random_range(0..SORT_MAX_N / SORT_INSTANCES);
        let n = n.min(SORT_MAX_N);
        // Coarse values so ties and duplicates occur.
        let objs: Vec<Vec<f64>> = (0..n).map(|_| vec![r.random_range(0..20) as f64, r.random_range(0..20) as f64]).collect();
        let viol: Vec<f64> = (0..n).map(|_| if r.random_bool(0.3) { r.random_range(1..4) as f64 } else { 0.0 }).collect();
        let mut got = nondominated_filter(&objs).members().to_vec();
        got.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let mut fronts = fast_nondominated_sort(&objs, &viol);
        fronts.iter_mut().for_each(|f| f.sort_unstable());
        if got != brute_filter(&objs) || fronts != brute_fronts(&objs, &viol) {
            sort_fail += 1;
        }
    }
    outcome(
        hv_fail == 0 && sort_fail == 0,
        format!(
            "hypervolume: {hv_fail}/{ORACLE_CONTEXTS} beyond {MC_SIGMAS} SE (worst {worst:.2} SE); \
             filter/sort: {sort_fail}/{SORT_INSTANCES} mismatches with brute force"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut problems_ok = true;
    for p in [zdt(1, 2).unwrap(), zdt(2, 2).unwrap(), zdt(3, 2).unwrap(), bnh(), mobo_core::problems::tnk(), mobo_core::problems::osy()] {
        let z = reference_front(&p, 1000).unwrap();
        problems_ok &= igd_plus(z.points(), z.points()).unwrap() == 0.0;
    }
    let hand = igd_plus(&[vec![2.0, 2.0]], &[vec![1.0, 1.0]]).unwrap();
    let hand_ok = (hand - 2f64.sqrt()).abs() < 1e-15;
    let mut r = rng::stream(7, &[]);
    let mut violations = 0;
    for _ in 0..COMPLIANCE_INSTANCES {
        let k = r.random_range(5..50);
        let z = random_front(&mut r, k);
        let b: Vec<Vec<f64>> = (0..r.random_range(1..20)).map(|_| vec![r.random::<f64>() * 1.5, r.random::<f64>() * 1.5]).collect();
        // Every member of `a` is weakly dominated by some member of `b`.
        let a: Vec<Vec<f64>> = (0..r.random_range(1..20))
            .map(|_| {
                let base = &b[r.random_range(0..b.len())];
                vec![base[0] + r.random::<f64>() * 0.3, base[1] + r.random::<f64>() * 0.3]
            })
            .collect();
        if igd_plus(&b, &z).unwrap() > igd_plus(&a, &z).unwrap() {
            violations += 1;
        }
    }
    outcome(
        problems_ok && hand_ok && violations == 0,
        format!(
            "self-distance zero on all reference fronts: {problems_ok}; hand value {hand:.17}; \
             {violations}/{COMPLIANCE_INSTANCES} compliance violations"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut worst_mean = 0.0f64;
    let p = bnh();
    let xs = lhs_sample(p.domain(), 15, 8).unwrap();
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
        let scale = ys.iter().fold(1.0f64, |m, y| m.max(y.abs()));
        for kernel in [Kernel::Matern52, Kernel::SquaredExponential] {
            let gp = GaussianProcess::fit_in_domain(&xs, &ys, p.domain(), &GpConfig { kernel, ..Default::default() }).unwrap();
            let bound = gp.hyperparameters().nugget.sqrt() * gp.prior_std();
            for (x, y) in xs.iter().zip(&ys) {
                let (m, s) = gp.predict(x);
                worst_ratio = worst_ratio.max(s / bound);
                worst_mean = worst_mean.max((m - y).abs() / scale);
            }
        }
    }
    let interp_ok = worst_ratio <= 1.0 + GP_INTERPOLATION_SLACK;

    let dom = BoxDomain::unit(3).unwrap();
    let xs = lhs_sample(&dom, 10, 9).unwrap();
    let ys: Vec<f64> = xs.iter().map(|x| x[0].sin() + x[1] * x[2]).collect();
    let gp = GaussianProcess::fit_in_domain(&xs, &ys, &dom, &GpConfig::default()).unwrap();
    let (m, s) = gp.predict(&[1e4, -1e4, 1e4]);
    let prior_ok = (m - gp.trend()).abs() <= 1e-9 * gp.trend().abs().max(1.0)
        && (s - gp.prior_std()).abs() <= 1e-9 * gp.prior_std();

    let gp = GaussianProcess::fit_in_domain(&xs, &[3.5; 10], &dom, &GpConfig::default()).unwrap();
    let mut r = rng::stream(8, &[]);
    let const_ok = (0..100).all(|_| gp.predict_mean(&[r.random(), r.random(), r.random()]) == 3.5);
    outcome(
        interp_ok && prior_ok && const_ok,
        format!(
            "sigma/bound at training points max {worst_ratio:.3e} (relative mean error {worst_mean:.1e}); \
             prior reversion {prior_ok}; constant target exact {const_ok}"
        ),
    )
}

fn grid_gap(p: &Benchmark, doe: usize, seed: u64, criterion: Criterion) -> f64 {
    let dims = p.dims();
    let mut ds = Dataset::new(p.domain().clone(), dims.n, dims.p, dims.m);
    let mut feasible = Vec::new();
    for x in lhs_sample(p.domain(), doe, seed).unwrap() {
        let e = p.evaluate(&x).unwrap();
        if e.is_feasible(1e-4) {
            feasible.push(e.f.clone());
        }
        ds.push(&x, &e.f, &e.g, &e.h).unwrap();
    }
    let bundle = SurrogateBundle::fit(&ds, &GpConfig { seed, ..Default::default() }).unwrap();
    let archive = nondominated_filter(&feasible);
    let refp = if criterion == Criterion::Ehvi { reference_point(&feasible) } else { None };
    let ctx = AcquisitionContext::new(&bundle, &archive, refp).unwrap();
    let obj = RawInfill { ctx: &ctx, criterion };
    let dom = p.domain();
    let mut grid_max = f64::NEG_INFINITY;
    for i in 0..=100 {
        for j in 0..=100 {
            let x = dom.denormalize(&[i as f64 / 100.0, j as f64 / 100.0]);
            if obj.evaluate(&x).1 == 0.0 {
                grid_max = grid_max.max(obj.alpha(&x));
            }
        }
    }
    let res = maximize_acquisition(&obj, dom, &InnerConfig { seed, ..Default::default() });
    if !res.feasible || !dom.contains(&res.x) {
        return f64::INFINITY;
    }
    grid_max - obj.alpha(&res.x)
}

fn criterion_9() -> Outcome {
    let criteria = [Criterion::Pi, Criterion::Mpi, Criterion::Ehvi];
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for c in 0..GRID_CONTEXTS {
        let (p, doe) = if c % 2 == 0 { (zdt(1, 2).unwrap(), 5) } else { (bnh(), 9) };
        let gap = grid_gap(&p, doe, 100 + c as u64, criteria[c % 3]);
        worst = worst.max(gap);
        if gap > GRID_SLACK {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{GRID_CONTEXTS} contexts: {failures} below grid max - {GRID_SLACK:.0e}, largest grid excess {worst:.2e}"),
    )
}

fn criterion_10() -> Outcome {
    let p = bnh();
    let z = reference_front(&p, 1000).unwrap();
    let scores: Vec<f64> = (0..10)
        .map(|seed| {
            let res = run_nsga2(&p, &Nsga2Config { seed, ..Default::default() }).unwrap();
            igd_plus(res.archive.members(), z.points()).unwrap()
        })
        .collect();
    let worst = scores.iter().copied().fold(0.0, f64::max);
    outcome(worst < NSGA2_BNH_BOUND, format!("10 seeds, 50 gens x 100 pop: max IGD+ {worst:.4} vs bound {NSGA2_BNH_BOUND}"))
}

fn main() -> ExitCode {
    // The test harness passes filter arguments; a listing request must not run anything.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let criteria: [(&str, Check); 10] = [
        ("IGD+ magnitude on ZDT1/ZDT2", criterion_1),
        ("regularization directionality", criterion_2),
        ("BNH feasibility and IGD+", criterion_3),
        ("OSY difficulty range", criterion_4),
        ("PI/EHVI Monte-Carlo oracle", criterion_5),
        ("hypervolume and dominance oracles", criterion_6),
        ("IGD+ properties", criterion_7),
        ("GP correctness", criterion_8),
        ("inner solver vs grid oracle", criterion_9),
        ("NSGA-II BNH regression bound", criterion_10),
    ];
    // MOBO_ACCEPTANCE=5,6 runs a subset.
    let only: Option<Vec<usize>> = std::env::var("MOBO_ACCEPTANCE")
        .ok()
        .map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {name}: {} [{:.1} s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if let Some(w) = o.warning {
            println!("criterion {:>2} WARNING: {w}", i + 1);
        }
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
