use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mobo::config::{ProblemSpec, RunConfig};
use mobo::driver::{reference_for, run_bo, run_experiment};
use mobo::export;
use mobo_core::acquisition::{AcquisitionKind, Criterion, Regularization};
use mobo_core::doe::BoxDomain;
use mobo_core::nsga2::{run_nsga2, Nsga2Config};
use mobo_core::pareto::igd_plus;

#[derive(Parser)]
#[command(name = "mobo", version, about = "Constrained multi-objective Bayesian optimization")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single optimization run.
    Run(RunArgs),
    /// Repeated runs with aggregated IGD+ traces.
    Experiment(RunArgs),
    /// Direct NSGA-II on a problem.
    Nsga2(Nsga2Args),
    /// IGD+ of a front file against a reference file.
    Score {
        #[arg(long)]
        front: PathBuf,
        #[arg(long)]
        reference: PathBuf,
    },
    /// Writes an analytic reference front.
    Reference {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// zdt1, zdt2, zdt3, bnh, tnk or osy.
    #[arg(long, default_value = "zdt1")]
    problem: String,
    /// Dimension of the ZDT problems.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Shell command of an external evaluator; overrides --problem.
    #[arg(long)]
    external_cmd: Option<String>,
    /// Bounds for an external evaluator as `lo:hi,lo:hi,...`.
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
}

impl ProblemArgs {
    fn spec(&self) -> Result<ProblemSpec> {
        let Some(command) = &self.external_cmd else {
            return Ok(ProblemSpec::benchmark(&self.problem, self.dim));
        };
        let bounds = match &self.bounds {
            None => None,
            Some(text) => {
                let (mut lo, mut hi) = (Vec::new(), Vec::new());
                for pair in text.split(',') {
                    let (a, b) = pair.split_once(':').context("bounds must be lo:hi pairs")?;
                    lo.push(a.trim().parse::<f64>()?);
                    hi.push(b.trim().parse::<f64>()?);
                }
                Some(BoxDomain::new(lo, hi)?)
            }
        };
        Ok(ProblemSpec::External {
            command: command.clone(),
            bounds,
            timeout_ms: self.timeout_ms,
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value = "ehvi")]
    acq: Criterion,
    #[arg(long, default_value = "none")]
    reg: Regularization,
    #[arg(long, default_value_t = 100.0)]
    beta: f64,
    /// Total evaluations (default 20 d).
    #[arg(long)]
    budget: Option<usize>,
    /// Initial design size (default 2d + 2c + 1).
    #[arg(long)]
    doe: Option<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    inner_starts: usize,
    #[arg(long, default_value_t = 200)]
    inner_evals: usize,
    /// Population of the final surrogate NSGA-II.
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 50)]
    gens: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.problem.spec()?, AcquisitionKind::new(self.acq, self.reg, self.beta)?);
        cfg.total_budget = self.budget;
        cfg.doe_size = self.doe;
        cfg.repetitions = self.reps;
        cfg.seed = self.seed;
        cfg.inner.starts = self.inner_starts;
        cfg.inner.evals_per_start = self.inner_evals;
        cfg.final_front.population = self.pop;
        cfg.final_front.generations = self.gens;
        Ok(cfg)
    }
}

#[derive(Args)]
struct Nsga2Args {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 50)]
    gens: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Front CSV to write.
    #[arg(long)]
    out: PathBuf,
}

fn print_score(label: &str, v: Option<f64>) {
    match v {
        Some(v) => println!("{label}: {v:.6e}"),
        None => println!("{label}: n/a"),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Cmd::Run(args) => {
            let cfg = RunConfig {
                repetitions: 1,
                ..args.config()?
            };
            let problem = cfg.problem.instantiate()?;
            let record = run_bo(problem.as_ref(), &cfg, cfg.seed)?;
            export::export_all(&args.out, &cfg, std::slice::from_ref(&record), None)?;
            if let Some(why) = &record.incomplete {
                eprintln!("warning: run stopped early: {why}");
            }
            println!("evaluations: {}", record.evaluations());
            print_score("final front IGD+", record.front_igd);
            print_score("trace end IGD+", record.trace_end());
        }
        Cmd::Experiment(args) => {
            let cfg = args.config()?;
            let (summary, records) = run_experiment(&cfg)?;
            export::export_all(&args.out, &cfg, &records, Some(&summary))?;
            for (seed, why) in &summary.failures {
                eprintln!("warning: seed {seed}: {why}");
            }
            print_score("final front IGD+ mean", summary.front_mean);
            print_score("final front IGD+ std", summary.front_std);
            print_score("trace end IGD+ mean", summary.trace_end_mean);
            print_score("trace end IGD+ std", summary.trace_end_std);
        }
        Cmd::Nsga2(args) => {
            let problem = args.problem.spec()?.instantiate()?;
            let cfg = Nsga2Config {
                population: args.pop,
                generations: args.gens,
                seed: args.seed,
                ..Default::default()
            };
            let res = run_nsga2(problem.as_ref(), &cfg)?;
            if !res.feasible {
                eprintln!("warning: no feasible point found; writing the least-violating front");
            }
            export::write_atomic(&args.out, export::front_csv(res.archive.members()).as_bytes())?;
            if let Some(z) = reference_for(problem.as_ref(), 1000) {
                print_score("IGD+", igd_plus(res.archive.members(), z.points()).ok());
            }
        }
        Cmd::Score { front, reference } => {
            let a = export::read_points_csv(&front)?;
            let z = export::read_points_csv(&reference)?;
            println!("{:.16e}", igd_plus(&a, &z)?);
        }
        Cmd::Reference { problem, count, out } => {
            if problem.external_cmd.is_some() {
                bail!("reference fronts exist for the analytic benchmarks only");
            }
            let p = problem.spec()?.instantiate()?;
            let z = reference_for(p.as_ref(), count).context("not an analytic benchmark")?;
            write_front(&out, z.points())?;
        }
    }
    Ok(())
}

fn write_front(path: &Path, points: &[Vec<f64>]) -> Result<()> {
    export::write_atomic(path, export::front_csv(points).as_bytes())?;
    Ok(())
}
