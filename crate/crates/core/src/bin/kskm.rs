use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kskm::bench::{
    adjusted_rand_index, generate_constraints, load_dataset, read_assignment, run_experiment, verify_labels, write_assignment,
    ExperimentSpec, LoadOptions,
};
use kskm::constraints::{format_constraints, parse_constraints};
use kskm::solver::solve;
use kskm::{ConstraintSet, Dataset, Error, Mode, Problem, RelocationStrategy, SolverConfig};

#[derive(Parser)]
#[command(name = "kskm", version, about = "Constrained k-means by Kempe swaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// CSV file of points, one row per point.
    #[arg(long)]
    data: PathBuf,
    /// The last column holds ground-truth labels.
    #[arg(long)]
    labels: bool,
    /// Treat the first row as a header (default: detect).
    #[arg(long, conflicts_with = "no_header")]
    header: bool,
    #[arg(long)]
    no_header: bool,
}

impl DataArgs {
    fn load(&self, force_labels: bool) -> Result<Dataset, Error> {
        let header = match (self.header, self.no_header) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        };
        load_dataset(&self.data, LoadOptions { header, label_column: self.labels || force_labels })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset and print metrics.
    Solve {
        #[command(flatten)]
        data: DataArgs,
        /// Constraint file (`ML i j` / `CL i j` lines); none means unconstrained.
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value = "kskm")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Step size toward reposition targets.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Number of mutations.
        #[arg(short = 'L', long, default_value_t = 200)]
        explorations: usize,
        #[arg(long, default_value = "unconstrained_kmeans")]
        relocation: RelocationStrategy,
        /// Time limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        max_mutations: Option<usize>,
        /// Try three-cluster rotations at swap fixed points.
        #[arg(long)]
        multi_kempe: bool,
        /// Fall back to the exact assignment search when DSATUR finds no coloring.
        #[arg(long)]
        exact_init: bool,
        /// Write per-point cluster ids here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw constraints from the label column of a dataset.
    GenConstraints {
        #[command(flatten)]
        data: DataArgs,
        /// Fraction of all point pairs to constrain.
        #[arg(long)]
        level: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment spec and write reports.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
    /// Check an assignment file against data and constraints.
    Verify {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(short, long)]
        k: Option<usize>,
    },
}

fn read_constraints(path: Option<&Path>) -> Result<ConstraintSet, Error> {
    match path {
        Some(p) => parse_constraints(&fs::read_to_string(p)?),
        None => Ok(ConstraintSet::empty()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Solve {
            data,
            constraints,
            k,
            mode,
            seed,
            alpha,
            explorations,
            relocation,
            time_limit,
            max_mutations,
            multi_kempe,
            exact_init,
            output,
        } => {
            let dataset = data.load(false)?;
            let problem = Problem::new(dataset, read_constraints(constraints.as_deref())?)?;
            let mut cfg = SolverConfig::new(k, mode).with_seed(seed).with_explorations(explorations);
            cfg.shift_alpha = alpha;
            cfg.relocation = relocation;
            cfg.time_limit = time_limit.map(Duration::from_secs_f64);
            cfg.max_mutations = max_mutations;
            cfg.multi_kempe = multi_kempe;
            cfg.exact_init = exact_init;
            let sol = solve(&problem, &cfg)?;
            let labels = sol.point_labels(&problem);
            println!("mode        {mode}");
            println!("k           {k}");
            println!("super_nodes {}", problem.n_nodes());
            println!("inertia     {}", sol.inertia);
            println!("feasible    {}", sol.feasible);
            if let Some(truth) = problem.data().labels() {
                println!("ari         {}", adjusted_rand_index(&labels, truth)?);
            }
            println!("iterations  {}", sol.iterations);
            println!("mutations   {}", sol.mutations);
            println!("wall_time_s {:.3}", sol.wall_time.as_secs_f64());
            if let Some(path) = output {
                write_assignment(path, &labels)?;
            }
            Ok(if sol.feasible { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::GenConstraints { data, level, seed, output } => {
            let dataset = data.load(true)?;
            let labels = dataset.labels().expect("label column requested");
            let set = generate_constraints(labels, level, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let text = format_constraints(&set);
            match output {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { spec, out } => {
            let parsed = ExperimentSpec::from_file(&spec)?;
            let root = spec.parent().unwrap_or(Path::new("."));
            let report = run_experiment(&parsed, root)?;
            report.write(&out)?;
            print!("{}", report.summary_table());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { data, constraints, assignment, k } => {
            let dataset = data.load(false)?;
            let cons = read_constraints(constraints.as_deref())?;
            let labels = read_assignment(&assignment)?;
            let v = verify_labels(&dataset, &cons, &labels, k)?;
            println!("ml_violations  {}", v.ml_violations);
            println!("cl_violations  {}", v.cl_violations);
            println!("empty_clusters {:?}", v.empty_clusters);
            println!("inertia        {}", v.inertia);
            println!("feasible       {}", v.is_feasible());
            Ok(if v.is_feasible() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible { .. } | Error::AssignmentDeadlock { .. } | Error::ContradictoryConstraints(..) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
