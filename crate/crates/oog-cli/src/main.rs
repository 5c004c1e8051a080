//! Command-line frontend: compute gains, run the grid oracle, sweep
//! level curves, generate benchmark systems, and run the timing/accuracy
//! harness.
//!
//! Exit codes: 0 success, 2 input error, 3 stability precondition,
//! 4 numerical failure.

mod bench;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oog::{
    Error, FreqEvaluator, GridSpec, RcoogResult, SolverConfig, compute_rcoog, grid_rcoog,
    max_gsv_from_responses, plantfile,
    sysgen::{self, NetworkSpec, RandomSystemSpec},
};

#[derive(Parser)]
#[command(
    name = "oog",
    version,
    about = "Output-to-output gain computation for linear systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Regularization ε of the gain objective
    #[arg(long, global = true, default_value_t = 1e-8)]
    epsilon: f64,
    /// Relative tolerance of the returned gain
    #[arg(long, global = true, default_value_t = 1e-4)]
    tol_gamma: f64,
    /// Base seed for generators and benchmark suites
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Machine-readable JSON output where supported
    #[arg(long, global = true)]
    json: bool,
    /// Write the primary output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Smallest sampled frequency (rad/s)
    #[arg(long, default_value_t = 1e-4)]
    grid_min: f64,
    /// Largest sampled frequency (rad/s)
    #[arg(long, default_value_t = 1e4)]
    grid_max: f64,
    /// Number of logarithmically spaced samples
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
    /// Leave ω = 0 out of the sampled set
    #[arg(long)]
    skip_zero: bool,
}

impl GridArgs {
    fn to_spec(&self, refine: bool) -> GridSpec {
        GridSpec {
            omega_min: self.grid_min,
            omega_max: self.grid_max,
            n_points: self.grid_points,
            include_zero: !self.skip_zero,
            refine,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the gain of a plant file via the Hamiltonian level-set solver
    Compute {
        /// Plant file (sections A, B, Cp, Dp, Cr, Dr)
        plant: PathBuf,
    },
    /// Evaluate the level curve σ̄_ε(iω) over a grid for one or more ε
    Sweep {
        plant: PathBuf,
        /// Comma-separated regularization values (all must be > 0)
        #[arg(long, value_delimiter = ',', required = true)]
        epsilons: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the naive frequency-grid reference
    Oracle {
        plant: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Golden-section refinement around the grid argmax
        #[arg(long)]
        refine: bool,
        /// Also write the per-frequency curve (omega,sigma_bar) to a CSV file
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Generate benchmark plants as .plant files plus a manifest CSV
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Run the timing/accuracy harness against the grid oracle
    Bench {
        #[command(subcommand)]
        suite: BenchSuite,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// Dense random stable systems with n_x/5 inputs and outputs
    Random {
        #[arg(long)]
        nx: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = -1.5, allow_hyphen_values = true)]
        pole_min: f64,
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        pole_max: f64,
    },
    /// Positive networked systems on random strongly connected digraphs
    Network {
        #[arg(long)]
        nodes: usize,
        /// Edge count before stitching (defaults to the node count)
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum BenchSuite {
    Random {
        /// State dimensions, each a multiple of 5
        #[arg(long, value_delimiter = ',', default_value = "5,10,25,50")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 10_000)]
        grid_points: usize,
    },
    Network {
        /// Node counts, each at least 50
        #[arg(long, value_delimiter = ',', default_value = "50,100")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 10_000)]
        grid_points: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DimensionMismatch(_)
        | Error::NonFinite { .. }
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::GenerationFailed(_) => 2,
        Error::NotStable { .. } => 3,
        Error::SingularResolvent { .. }
        | Error::EigenFailure
        | Error::NotPositiveDefinite
        | Error::SingularDcal { .. }
        | Error::RegularizationFailed { .. }
        | Error::MaxIterationsExceeded { .. }
        | Error::StagnationDetected { .. } => 4,
    }
}

/// OOG_NUM_THREADS caps both the rayon pool and faer's internal parallelism.
fn setup_threads() {
    if let Ok(raw) = std::env::var("OOG_NUM_THREADS")
        && let Ok(k) = raw.trim().parse::<usize>()
        && k >= 1
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
        if k == 1 {
            faer::set_global_parallelism(faer::Par::Seq);
        } else {
            faer::set_global_parallelism(faer::Par::rayon(k));
        }
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> oog::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct ComputeReport {
    value: f64,
    lower: f64,
    upper: f64,
    peak_frequency: Option<f64>,
    iterations: usize,
}

impl ComputeReport {
    fn from_result(r: &RcoogResult) -> Self {
        ComputeReport {
            value: r.value,
            lower: r.lower,
            upper: r.upper,
            peak_frequency: r.peak_frequency.is_finite().then_some(r.peak_frequency),
            iterations: r.iterations,
        }
    }
}

fn cmd_compute(cli: &Cli, plant_path: &Path) -> oog::Result<()> {
    let plant = plantfile::read_plant(plant_path)?;
    let cfg = SolverConfig {
        epsilon: cli.epsilon,
        tol_gamma: cli.tol_gamma,
        ..SolverConfig::default()
    };
    let result = compute_rcoog(&plant, &cfg)?;
    let content = if cli.json {
        let report = ComputeReport::from_result(&result);
        format!("{}\n", serde_json::to_string_pretty(&report).unwrap())
    } else {
        let mut s = String::new();
        s.push_str(&format!("gain            {}\n", result.value));
        s.push_str(&format!(
            "interval        [{}, {})\n",
            result.lower, result.upper
        ));
        s.push_str(&format!("peak frequency  {}\n", result.peak_frequency));
        s.push_str(&format!("iterations      {}\n", result.iterations));
        s
    };
    write_output(&cli.out, &content)
}

fn cmd_sweep(cli: &Cli, plant_path: &Path, epsilons: &[f64], grid: &GridArgs) -> oog::Result<()> {
    if epsilons.is_empty() {
        return Err(Error::GenerationFailed("at least one ε is required".into()));
    }
    if let Some(bad) = epsilons.iter().find(|&&e| e <= 0.0 || !e.is_finite()) {
        return Err(Error::GenerationFailed(format!(
            "sweep is regularized-only; ε must be > 0, got {bad}"
        )));
    }
    let plant = plantfile::read_plant(plant_path)?;
    let spec = grid.to_spec(false);
    spec.validate()?;
    let evaluator = FreqEvaluator::new(&plant);
    let mut csv = String::from("omega,sigma_bar,epsilon\n");
    for omega in spec.frequencies() {
        let (gp, gr) = evaluator.responses(omega)?;
        for &eps in epsilons {
            let sigma = max_gsv_from_responses(gp.as_ref(), gr.as_ref(), eps)?;
            csv.push_str(&format!("{omega:?},{sigma:?},{eps:?}\n"));
        }
    }
    write_output(&cli.out, &csv)
}

fn cmd_oracle(
    cli: &Cli,
    plant_path: &Path,
    grid: &GridArgs,
    refine: bool,
    curve: &Option<PathBuf>,
) -> oog::Result<()> {
    let plant = plantfile::read_plant(plant_path)?;
    let spec = grid.to_spec(refine);
    let (value, argmax) = grid_rcoog(&plant, cli.epsilon, &spec)?;
    if let Some(curve_path) = curve {
        let evaluator = FreqEvaluator::new(&plant);
        let mut csv = String::from("omega,sigma_bar\n");
        for omega in spec.frequencies() {
            let (gp, gr) = evaluator.responses(omega)?;
            let sigma = max_gsv_from_responses(gp.as_ref(), gr.as_ref(), cli.epsilon)?;
            csv.push_str(&format!("{omega:?},{sigma:?}\n"));
        }
        std::fs::write(curve_path, csv)?;
    }
    let content = if cli.json {
        format!("{{\"value\":{value},\"argmax_omega\":{argmax}}}\n")
    } else {
        format!("grid gain       {value}\nargmax omega    {argmax}\n")
    };
    write_output(&cli.out, &content)
}

fn cmd_gen(cli: &Cli, family: &GenFamily) -> oog::Result<()> {
    let (out_dir, count) = match family {
        GenFamily::Random { out_dir, count, .. } => (out_dir, *count),
        GenFamily::Network { out_dir, count, .. } => (out_dir, *count),
    };
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = String::from("instance_id,family,size,seed,file\n");
    for idx in 0..count {
        let instance_seed = bench::derive_seed(cli.seed, 0, idx as u64);
        let (plant, family_name, size) = match family {
            GenFamily::Random {
                nx,
                pole_min,
                pole_max,
                ..
            } => {
                let mut spec = RandomSystemSpec::new(*nx, instance_seed);
                spec.pole_range = (*pole_min, *pole_max);
                (sysgen::random_stable_plant(&spec)?, "random", *nx)
            }
            GenFamily::Network { nodes, edges, .. } => {
                let mut spec = NetworkSpec::new(*nodes, instance_seed);
                if let Some(e) = edges {
                    spec.n_edges = *e;
                }
                (sysgen::networked_plant(&spec)?, "network", *nodes)
            }
        };
        let file = format!("instance_{instance_seed}.plant");
        plantfile::write_plant(out_dir.join(&file), &plant)?;
        manifest.push_str(&format!(
            "{family_name}-n{size:04}-i{idx:04},{family_name},{size},{instance_seed},{file}\n"
        ));
    }
    std::fs::write(out_dir.join("manifest.csv"), &manifest)?;
    let mut stdout = std::io::stdout();
    let _ = writeln!(stdout, "wrote {count} plants to {}", out_dir.display());
    Ok(())
}

fn cmd_bench(cli: &Cli, suite: &BenchSuite) -> oog::Result<()> {
    let out = cli.out.clone().ok_or_else(|| {
        Error::GenerationFailed("bench requires --out for the records CSV".into())
    })?;
    let params = match suite {
        BenchSuite::Random {
            sizes,
            instances,
            grid_points,
        } => bench::SuiteParams {
            family: bench::Family::Random,
            sizes: sizes.clone(),
            instances: *instances,
            base_seed: cli.seed,
            epsilon: cli.epsilon,
            tol_gamma: cli.tol_gamma,
            grid_points: *grid_points,
        },
        BenchSuite::Network {
            sizes,
            instances,
            grid_points,
        } => bench::SuiteParams {
            family: bench::Family::Network,
            sizes: sizes.clone(),
            instances: *instances,
            base_seed: cli.seed,
            epsilon: cli.epsilon,
            tol_gamma: cli.tol_gamma,
            grid_points: *grid_points,
        },
    };
    let (records, summaries) = bench::run_suite(&params)?;
    std::fs::write(&out, bench::records_csv(&records))?;
    let summary_path = bench::summary_path(&out);
    std::fs::write(&summary_path, bench::summary_csv(&summaries))?;
    let mut stdout = std::io::stdout();
    let _ = writeln!(
        stdout,
        "wrote {} records to {} and {} summaries to {}",
        records.len(),
        out.display(),
        summaries.len(),
        summary_path.display()
    );
    Ok(())
}

fn run(cli: &Cli) -> oog::Result<()> {
    match &cli.command {
        Command::Compute { plant } => cmd_compute(cli, plant),
        Command::Sweep {
            plant,
            epsilons,
            grid,
        } => cmd_sweep(cli, plant, epsilons, grid),
        Command::Oracle {
            plant,
            grid,
            refine,
            curve,
        } => cmd_oracle(cli, plant, grid, *refine, curve),
        Command::Gen { family } => cmd_gen(cli, family),
        Command::Bench { suite } => cmd_bench(cli, suite),
    }
}

fn main() -> ExitCode {
    setup_threads();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
