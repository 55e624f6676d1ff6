use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use chroma::fcp::{solve_fcp, FcpInstance};
use chroma::harness::{
    brute_force_optimal, generate_instance, run_bench, write_csv, BenchConfig, ConstraintKind,
    GenParams,
};
use chroma::io::{read_instance, write_instance};
use chroma::linmat::{exact_weight_basis, PrimeFieldMatrix};
use chroma::partition::{build_partition, verify_partition, VerifyMode};
use chroma::report::{solve_report, Algorithm, SolveOptions};
use chroma::{normalize_and_validate, Error, SupplierInstance, ValidateOptions};

#[derive(Parser)]
#[command(
    name = "chroma",
    version,
    about = "Colorful supplier clustering solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Reduction,
    Knapsack7,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    Knapsack,
    LinearMatroid,
}

#[derive(Clone, Copy, Debug)]
struct ModeArg(VerifyMode);

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diameter" => Ok(ModeArg(VerifyMode::DiameterOnly)),
            "exhaustive" => Ok(ModeArg(VerifyMode::ExhaustiveZ)),
            _ => {
                let n = s
                    .strip_prefix("sample:")
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| {
                        format!("expected diameter, exhaustive or sample:N, got {s:?}")
                    })?;
                Ok(ModeArg(VerifyMode::SampledZ {
                    samples: n,
                    seed: 0,
                }))
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write a JSON report.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "reduction")]
        algorithm: AlgorithmArg,
        #[arg(long, env = "CHROMA_SEED", default_value_t = 0)]
        seed: u64,
        /// Repetitions of each randomized exact-weight decision.
        #[arg(long, default_value_t = 10)]
        reps: u32,
        #[arg(long, default_value_t = SolveOptions::default().max_guesses)]
        max_guesses: u64,
        /// Also compute the optimum radius by enumeration.
        #[arg(long)]
        oracle: bool,
        /// Report path; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Optimal solution by enumeration.
    Exact {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a random feasible instance.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        n_clients: usize,
        #[arg(long, default_value_t = 4)]
        n_facilities: usize,
        #[arg(long, default_value_t = 1)]
        gamma: usize,
        #[arg(long, value_enum, default_value = "knapsack")]
        constraint: ConstraintArg,
        #[arg(long, default_value_t = 12)]
        max_dist: u64,
        #[arg(long, default_value_t = 3)]
        weight_max: u64,
        #[arg(long, default_value_t = 5)]
        cost_max: u64,
        #[arg(long, default_value_t = 3)]
        matroid_rows: usize,
        #[arg(long, default_value_t = 101)]
        prime: u64,
        #[arg(long, env = "CHROMA_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run a batch experiment and write CSV rows.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the partition at radius R and check it.
    VerifyPartition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        radius: u64,
        /// diameter, exhaustive or sample:N
        #[arg(long, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, env = "CHROMA_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Solve a cover-promise instance given as JSON.
    FcpSolve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, env = "CHROMA_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        reps: u32,
    },
    /// Find a basis of exact weight in a matrix over F_p.
    Xwb {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target: u64,
        #[arg(long, env = "CHROMA_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        reps: u32,
    },
}

#[derive(Deserialize)]
struct XwbFile {
    prime: u64,
    /// Row-major.
    matrix: Vec<Vec<u64>>,
    weights: Vec<u64>,
}

#[derive(Serialize)]
struct ExactReport {
    feasible: bool,
    radius: Option<u64>,
    centers: Vec<String>,
    covered: Vec<u64>,
}

#[derive(Serialize)]
struct FcpReport {
    feasible: bool,
    sets: Vec<usize>,
    covered: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<u64>,
}

fn load(path: &PathBuf) -> chroma::Result<SupplierInstance> {
    normalize_and_validate(&read_instance(path)?, ValidateOptions::default())
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn run(cli: Cli) -> chroma::Result<()> {
    match cli.command {
        Command::Solve {
            input,
            algorithm,
            seed,
            reps,
            max_guesses,
            oracle,
            output,
        } => {
            let instance = load(&input)?;
            let algorithm = match algorithm {
                AlgorithmArg::Reduction => Algorithm::Reduction,
                AlgorithmArg::Knapsack7 => Algorithm::Knapsack7,
            };
            let opts = SolveOptions {
                seed,
                reps,
                max_guesses,
                oracle,
            };
            let start = Instant::now();
            let report = solve_report(&instance, algorithm, &opts)?;
            let wall_ms = start.elapsed().as_millis();
            let mut value = serde_json::to_value(&report)?;
            value["wall_ms"] = serde_json::Value::from(wall_ms as u64);
            let text = pretty(&value);
            match output {
                Some(path) => fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
        }
        Command::Exact { input } => {
            let instance = load(&input)?;
            let report = match brute_force_optimal(&instance)? {
                Some(opt) => ExactReport {
                    feasible: true,
                    radius: Some(opt.radius),
                    centers: opt
                        .centers
                        .iter()
                        .map(|&f| instance.space.facility_id(f).to_string())
                        .collect(),
                    covered: opt.covered,
                },
                None => ExactReport {
                    feasible: false,
                    radius: None,
                    centers: Vec::new(),
                    covered: Vec::new(),
                },
            };
            println!("{}", pretty(&report));
        }
        Command::Gen {
            out,
            n_clients,
            n_facilities,
            gamma,
            constraint,
            max_dist,
            weight_max,
            cost_max,
            matroid_rows,
            prime,
            seed,
        } => {
            let params = GenParams {
                n_clients,
                n_facilities,
                gamma,
                constraint_kind: match constraint {
                    ConstraintArg::Knapsack => ConstraintKind::Knapsack,
                    ConstraintArg::LinearMatroid => ConstraintKind::LinearMatroid,
                },
                max_dist,
                weight_max,
                seed,
                cost_max,
                matroid_rows,
                prime,
            };
            write_instance(out, &generate_instance(&params)?)?;
        }
        Command::Bench { config, out } => {
            let config: BenchConfig = serde_json::from_str(&fs::read_to_string(config)?)?;
            let rows = run_bench(&config)?;
            write_csv(&rows, fs::File::create(out)?)?;
        }
        Command::VerifyPartition {
            input,
            radius,
            mode,
            seed,
        } => {
            let instance = load(&input)?;
            let mode = match mode.0 {
                VerifyMode::SampledZ { samples, .. } => VerifyMode::SampledZ { samples, seed },
                other => other,
            };
            let partition = build_partition(&instance.space, radius);
            let report = verify_partition(&instance.space, &partition, radius, mode)?;
            println!("{}", pretty(&report));
        }
        Command::FcpSolve { input, seed, reps } => {
            let fcp = FcpInstance::from_json(&fs::read_to_string(input)?)?;
            let report = match solve_fcp(&fcp, seed, reps)? {
                Some(sol) => FcpReport {
                    feasible: true,
                    sets: sol.sets,
                    covered: sol.covered,
                    cost: sol.cost,
                },
                None => FcpReport {
                    feasible: false,
                    sets: Vec::new(),
                    covered: Vec::new(),
                    cost: None,
                },
            };
            println!("{}", pretty(&report));
        }
        Command::Xwb {
            input,
            target,
            seed,
            reps,
        } => {
            let file: XwbFile = serde_json::from_str(&fs::read_to_string(input)?)?;
            let cols = file.matrix.first().map_or(file.weights.len(), Vec::len);
            let matrix = PrimeFieldMatrix::from_rows(file.prime, cols, &file.matrix)?;
            if file.weights.len() != matrix.cols() {
                return Err(Error::Shape(format!(
                    "{} weights for {} columns",
                    file.weights.len(),
                    matrix.cols()
                )));
            }
            match exact_weight_basis(&matrix, &file.weights, target, seed, reps)? {
                Some(basis) => println!("{}", serde_json::to_string(&basis)?),
                None => println!("none"),
            }
        }
    }
    std::io::stdout().flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
