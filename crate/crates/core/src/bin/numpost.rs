use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use numpost::bound::{admissible_k0, tolerance_for, KRule};
use numpost::burgers::{calibrate, BurgersParams};
use numpost::experiments::{
    compare_traces, generate_synthetic, histogram_bins, io, run_variants, ExperimentConfig, Problem,
};
use numpost::model::{build_precision, NoiseModel};

#[derive(Parser)]
#[command(name = "numpost", version, about = "Error-controlled forward solvers for Bayesian inverse problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Total MCMC iterations per chain, burn-in included.
    #[arg(long)]
    iterations: Option<usize>,
    /// Run only the fixed fine-resolution chain (with --adaptive: both).
    #[arg(long)]
    fine: bool,
    /// Run only the error-controlled chain (with --fine: both).
    #[arg(long)]
    adaptive: bool,
    /// Solver tolerance to use instead of the bound.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Exit with status 0 even if too many solves missed the tolerance.
    #[arg(long)]
    allow_unmet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible uniform forward-map error K0.
    Bound {
        #[command(flatten)]
        common: Common,
        /// Number of observations (ignored with --config).
        #[arg(long, default_value_t = 26)]
        n: usize,
        /// Noise standard deviation (ignored with --config).
        #[arg(long, default_value_t = 30.0)]
        sigma: f64,
        /// Target expected absolute Bayes-factor deviation.
        #[arg(long, default_value_t = 0.05)]
        target: f64,
        /// Round k to two decimals.
        #[arg(long)]
        two_decimals: bool,
    },
    /// Simulate a data set.
    GenData {
        #[command(flatten)]
        common: Common,
    },
    /// Logistic experiment: fine and step-halving chains.
    RunOde(RunArgs),
    /// Burgers experiment: fine and grid-doubling chains.
    RunPde(RunArgs),
    /// Compare two trace CSV files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Calibrate the Burgers observation-error constant and write the sidecar.
    CalibrateBurgersK0 {
        #[command(flatten)]
        common: Common,
    },
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn load_config(common: &Common, fallback: fn() -> ExperimentConfig) -> AnyResult<ExperimentConfig> {
    let mut c = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => fallback(),
    };
    if let Some(s) = common.seed {
        c.seed = s;
    }
    Ok(c)
}

fn out_dir(path: &Path) -> AnyResult<&Path> {
    std::fs::create_dir_all(path)?;
    Ok(path)
}

fn run(args: &RunArgs, fallback: fn() -> ExperimentConfig, want: &str) -> AnyResult<ExitCode> {
    let mut c = load_config(&args.common, fallback)?;
    if c.problem.name() != want {
        return Err(format!("this subcommand runs the {want} problem, config has {}", c.problem.name()).into());
    }
    if let Some(it) = args.iterations {
        c.chain.iterations = it;
        c.chain.burn_in = None;
    }
    if args.tolerance.is_some() {
        c.bound.tolerance = args.tolerance;
    }
    let dir = out_dir(&args.common.out)?;
    if let Problem::Burgers(s) = &mut c.problem {
        if s.calibration_file.is_none() && s.error_constant.is_none() {
            s.calibration_file = Some(dir.join("calibration.json"));
        }
    }
    let (fine, adaptive) = match (args.fine, args.adaptive) {
        (false, false) => (true, true),
        other => other,
    };
    io::write_json(&dir.join("config.json"), &c)?;
    let outcome = run_variants(&c, fine, adaptive)?;
    let names = outcome.prepared.names();
    io::write_json(&dir.join("data.json"), &outcome.prepared.data)?;
    for (trace, v) in [(&outcome.fine, "fine"), (&outcome.adaptive, "adaptive")] {
        if let Some(t) = trace {
            io::write_trace_csv(&dir.join(format!("trace_{v}.csv")), t, &names)?;
        }
    }
    if let (Some(a), Some(b)) = (&outcome.fine, &outcome.adaptive) {
        if !a.is_empty() && !b.is_empty() {
            io::write_histogram_csv(&dir.join("histogram.csv"), &histogram_bins(a, b, &names, c.bins)?)?;
        }
    }
    let report = &outcome.report;
    io::write_json(&dir.join("report.json"), report)?;
    println!("tolerance {:.6e} (bound K0 {:.6e})", report.tolerance, report.bound.k0_admissible);
    for s in [&report.fine, &report.adaptive].into_iter().flatten() {
        println!(
            "{:>8}: {} samples, acceptance {:.3}, {:.2} s, {} solves, {} refinements, {} unmet",
            s.variant.name(),
            s.samples,
            s.acceptance_rate,
            s.wall_time,
            s.solver_stats.forward_solves,
            s.solver_stats.refinements,
            s.solver_stats.tolerance_unmet
        );
    }
    if let Some(cmp) = &report.comparison {
        for m in &cmp.marginals {
            println!("{:>8}: TV {:.4}, mean delta {:.3} sd", m.name, m.tv, m.mean_delta_sd);
        }
        println!("wall-time ratio adaptive/fine {:.3}", cmp.wall_time_ratio);
    }
    if report.bound_violated {
        eprintln!("{:.2}% of adaptive solves missed the tolerance", 100.0 * report.unmet_rate);
        if !args.allow_unmet {
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> AnyResult<ExitCode> {
    match cli.command {
        Command::Bound { common, n, sigma, target, two_decimals } => {
            let rule = if two_decimals { KRule::TwoDecimals } else { KRule::Exact };
            let report = match &common.config {
                Some(p) => {
                    let c = ExperimentConfig::load(p)?;
                    let locs = c.problem.locations()?;
                    let precision = build_precision(&c.precision, &locs)?;
                    tolerance_for(&NoiseModel::fixed(c.sigma)?, &precision, target, rule)?
                }
                None => admissible_k0(n, sigma, 1.0, target, rule)?,
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::GenData { common } => {
            let c = load_config(&common, ExperimentConfig::logistic)?;
            let locs = c.problem.locations()?;
            let data = generate_synthetic(&c.problem, &c.problem.theta_true(), c.sigma, &locs, c.seeds().data)?;
            let path = out_dir(&common.out)?.join("data.json");
            io::write_json(&path, &data)?;
            println!("{}", path.display());
        }
        Command::RunOde(args) => return run(&args, ExperimentConfig::logistic, "logistic"),
        Command::RunPde(args) => return run(&args, ExperimentConfig::burgers, "burgers"),
        Command::Compare { a, b, bins, out } => {
            let (names, ta) = io::read_trace_csv(&a)?;
            let (names_b, tb) = io::read_trace_csv(&b)?;
            if names != names_b {
                return Err(format!("parameter columns differ: {names:?} vs {names_b:?}").into());
            }
            let report = compare_traces(&ta, &tb, &names, bins)?;
            let dir = out_dir(&out)?;
            io::write_json(&dir.join("comparison.json"), &report)?;
            io::write_histogram_csv(&dir.join("histogram.csv"), &histogram_bins(&ta, &tb, &names, bins)?)?;
            for m in &report.marginals {
                println!("{:>8}: TV {:.4}, mean delta {:.3} sd", m.name, m.tv, m.mean_delta_sd);
            }
        }
        Command::CalibrateBurgersK0 { common } => {
            let c = load_config(&common, ExperimentConfig::burgers)?;
            let Problem::Burgers(s) = &c.problem else {
                return Err("calibration needs a burgers configuration".into());
            };
            let params = BurgersParams::new(s.u_left, s.u_left - s.jump, s.z0, s.epsilon);
            let cal = calibrate(&params, s.z1, &s.times, &s.calibration_grids)?;
            let path = out_dir(&common.out)?.join("calibration.json");
            cal.save(&path)?;
            for l in &cal.levels {
                println!(
                    "N {:>5}: max obs error {:.3e}, C {:.4}, phi {:.4e}, L1 error {:.4e}",
                    l.cells, l.max_obs_error, l.obs_constant, l.phi, l.l1_error
                );
            }
            println!("error constant {:.6}", cal.error_constant);
            println!("ratio fit K0: {:.6e} (h = 1/dz), {:.6e} (h = dz)", cal.ratio_k0_inverse_spacing, cal.ratio_k0_spacing);
            println!("{}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
