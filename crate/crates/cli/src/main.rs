use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use bixu_core::comparison::compare_f2;
use bixu_core::harness::{load_matrix, run_experiment, save_matrix, ExperimentConfig};
use bixu_core::inference::{analyze, CiVariant, Truth};
use bixu_core::kernels::{ustat, ustat_bruteforce, QuadrupletKernel};
use bixu_core::numeric::format_g17;
use bixu_core::par::Execution;
use bixu_core::sequence::dims_for_index;
use bixu_core::wbedd::{alpha_for_moment, sample_network, LambdaLaw, TrueMoments, WbeddParams};

#[derive(Parser)]
#[command(name = "bixu", version, about = "Quadruplet U-statistics for bipartite weighted networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one kernel's U-statistic on a CSV matrix.
    Ustat {
        #[arg(long)]
        kernel: QuadrupletKernel,
        #[arg(long)]
        input: PathBuf,
        /// Average over every quadruplet instead of using the closed form.
        #[arg(long)]
        brute_force: bool,
    },
    /// Draw a WBEDD network and write it as CSV.
    Simulate(SimulateArgs),
    /// Estimate F2 with variance estimates and confidence intervals (JSON).
    Estimate(EstimateArgs),
    /// Test equal F2 across two networks (JSON).
    Compare {
        #[arg(long)]
        input_a: PathBuf,
        #[arg(long)]
        input_b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Run a Monte-Carlo experiment from a JSON config and write CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's `output`, then standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run replicates on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, conflicts_with = "alpha_f")]
    f2: Option<f64>,
    #[arg(long, conflicts_with = "alpha_g")]
    g2: Option<f64>,
    #[arg(long)]
    alpha_f: Option<f64>,
    #[arg(long)]
    alpha_g: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    c: f64,
    #[arg(long)]
    n_index: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Draw the intensity from a Gamma law with mean `lambda`.
    #[arg(long)]
    version2: bool,
    #[arg(long, requires = "version2")]
    gamma_shape: Option<f64>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Interval variants to report; repeat or separate with commas.
    #[arg(long, value_delimiter = ',', default_value = "vd")]
    variant: Vec<CiVariant>,
    #[arg(long, requires_all = ["true_f2", "true_g2"])]
    true_lambda: Option<f64>,
    #[arg(long, requires = "true_lambda")]
    true_f2: Option<f64>,
    #[arg(long, requires = "true_lambda")]
    true_g2: Option<f64>,
    /// Row fraction; defaults to m/(m+n) of the input.
    #[arg(long)]
    c: Option<f64>,
}

fn exponent(moment: Option<f64>, alpha: Option<f64>, name: &str) -> Result<f64> {
    match (moment, alpha) {
        (Some(m), _) => Ok(alpha_for_moment(m)?),
        (None, Some(a)) => Ok(a),
        (None, None) => bail!("one of --{name}2 or --alpha-{name} is required"),
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let af = exponent(args.f2, args.alpha_f, "f")?;
    let ag = exponent(args.g2, args.alpha_g, "g")?;
    let mut params = WbeddParams::new(args.lambda, af, ag)?;
    if args.version2 {
        let law = match args.gamma_shape {
            Some(shape) => LambdaLaw::Gamma { shape },
            None => LambdaLaw::default(),
        };
        params = params.with_random_lambda(law)?;
    }
    let (m, n) = dims_for_index(args.c, args.n_index)?;
    let y = sample_network(&params, m, n, args.seed)?;
    save_matrix(&y, &args.out)?;
    Ok(())
}

fn estimate(args: EstimateArgs) -> Result<String> {
    let y = load_matrix(&args.input)?;
    let truth = match (args.true_lambda, args.true_f2, args.true_g2) {
        (Some(lambda), Some(f2), Some(g2)) => Some(Truth {
            lambda,
            moments: TrueMoments::from_alphas(alpha_for_moment(f2)?, alpha_for_moment(g2)?),
            c: args.c.unwrap_or_else(|| y.c_hat()),
        }),
        _ => None,
    };
    let report = analyze(&y, args.alpha, &args.variant, args.c, truth.as_ref())?;
    Ok(serde_json::to_string_pretty(&report)?)
}

fn run(cli: Cli) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Ustat { kernel, input, brute_force } => {
            let y = load_matrix(&input)?;
            let value = if brute_force { ustat_bruteforce(&y, &kernel)? } else { ustat(&y, &kernel)? };
            writeln!(stdout, "{}", format_g17(value))?;
        }
        Command::Simulate(args) => simulate(args)?,
        Command::Estimate(args) => writeln!(stdout, "{}", estimate(args)?)?,
        Command::Compare { input_a, input_b, alpha } => {
            let a = load_matrix(&input_a)?;
            let b = load_matrix(&input_b)?;
            let report = compare_f2(&a, &b, alpha)?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Command::Experiment { config, out, sequential } => {
            let mut cfg = ExperimentConfig::from_json_file(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if sequential {
                cfg.execution = Execution::Sequential;
            }
            let output = run_experiment(&cfg)?;
            match out.or(cfg.output) {
                Some(path) => output.write_csv(&path)?,
                None => write!(stdout, "{}", output.to_csv())?,
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
