use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use kahn_core::brute::{brute_kahn_full, brute_max_rows, witness_table, DEFAULT_GUARD};
use kahn_core::error::Error;
use kahn_core::generate::{gen_graphic, gen_linear_pool, gen_linear_random, gen_rota, gen_uniform};
use kahn_core::instance::{parse_epsilon, regime_rows, Epsilon, Instance};
use kahn_core::io::{load_instance, load_solution, save_instance, save_solution, SolutionFile};
use kahn_core::solver::{claims_sweep, solve, SolverConfig, Status};
use kahn_core::table::verify;
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_FILE: u8 = 66;

/// Partial transversals of grids of matroid bases: generate, solve, verify.
#[derive(Parser)]
#[command(name = "kahn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Linear,
    Graphic,
    Uniform,
    Rota,
    /// Cells drawn from a small pool of bases.
    Pool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BruteMode {
    MaxRows,
    KahnFull,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Field size for linear, rota and pool instances.
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Rank; graphic instances use the complete graph on n + 1 vertices.
        #[arg(long)]
        n: usize,
        /// Rows; rota instances derive it from n and epsilon.
        #[arg(long)]
        f: Option<usize>,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ground set size for uniform instances.
        #[arg(long)]
        ground: Option<usize>,
        /// Number of distinct bases for pool instances.
        #[arg(long, default_value_t = 1)]
        pool: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance and write the solution file.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check a solution file against an instance.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Exhaustive search on a tiny instance.
    Brute {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "max-rows")]
        mode: BruteMode,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
    },
    /// Solve and random-walk under several seeds, checking the counting bounds on every state.
    Claims {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Aim for every row rather than t, to visit more states.
        #[arg(long)]
        all_rows: bool,
    },
    /// Solve a batch of generated instances and print a JSON summary.
    Bench {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "linear")]
        kinds: Vec<Kind>,
        #[arg(long, value_delimiter = ',', default_value = "8,16")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value = "1/5")]
        epsilon: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Rows per instance; defaults to floor((1 - eps) n / 2).
        #[arg(long)]
        f: Option<usize>,
    },
}

#[derive(clap::Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
    #[arg(long)]
    depth_cap: Option<usize>,
    #[arg(long)]
    q_cap: Option<usize>,
    #[arg(long)]
    boost_rounds: Option<usize>,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Soft wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Refuse instances outside the row regime.
    #[arg(long)]
    strict: bool,
    /// Full rows to aim for instead of t.
    #[arg(long)]
    target_rows: Option<usize>,
}

impl BudgetArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            max_iterations: self.max_iterations,
            depth_cap: self.depth_cap,
            q_cap: self.q_cap,
            boost_rounds: self.boost_rounds,
            restarts: self.restarts,
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            strict: self.strict,
            target_rows: self.target_rows,
            ..SolverConfig::default()
        }
    }
}

/// An error with the exit code it maps to.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_)
            | Error::Schema(_)
            | Error::InvalidInstance(_)
            | Error::InvalidMatroid(_)
            | Error::BadCell { .. } => EXIT_FILE,
            Error::GuardExceeded { .. } => EXIT_GUARD,
            Error::Precondition(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    load_instance(path).map_err(|e| {
        let f = Failure::from(e);
        Failure(f.0, format!("{}: {}", path.display(), f.1))
    })
}

fn eps(s: &str) -> Result<Epsilon, Failure> {
    parse_epsilon(s).map_err(|e| Failure(EXIT_USAGE, e.to_string()))
}

fn need(v: Option<usize>, flag: &str, kind: Kind) -> Result<usize, Failure> {
    v.ok_or_else(|| {
        Failure(
            EXIT_USAGE,
            format!("--{flag} is required for {kind:?} instances"),
        )
    })
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: Kind,
    p: u32,
    n: usize,
    f: Option<usize>,
    epsilon: Epsilon,
    seed: u64,
    ground: Option<usize>,
    pool: usize,
) -> Result<Instance, Failure> {
    let inst = match kind {
        Kind::Linear => gen_linear_random(p, n, need(f, "f", kind)?, epsilon, seed),
        Kind::Graphic => gen_graphic(n + 1, need(f, "f", kind)?, epsilon, seed),
        Kind::Uniform => gen_uniform(
            n,
            need(ground, "ground", kind)?,
            need(f, "f", kind)?,
            epsilon,
            seed,
        ),
        Kind::Rota => gen_rota(p, n, epsilon, seed),
        Kind::Pool => gen_linear_pool(p, n, need(f, "f", kind)?, pool, epsilon, seed),
    };
    inst.map_err(|e| Failure(EXIT_USAGE, e.to_string()))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Gen {
            kind,
            p,
            n,
            f,
            epsilon,
            seed,
            ground,
            pool,
            out,
        } => {
            let inst = generate(kind, p, n, f, eps(&epsilon)?, seed, ground, pool)?;
            save_instance(&inst, &out)?;
            println!(
                "wrote {}: n = {}, f = {}, t = {}, ground = {}",
                out.display(),
                inst.n,
                inst.f,
                inst.t(),
                inst.matroid.ground_size()
            );
            Ok(0)
        }
        Command::Solve { input, out, budget } => {
            let inst = load(&input)?;
            let sol = solve(&inst, &budget.config())?;
            save_solution(&SolutionFile::from_solution(&sol)?, &out)?;
            let status = match sol.status {
                Status::ReachedT => "reached_t",
                Status::Partial => "partial",
            };
            println!(
                "{status}: {} full rows (t = {}), {} of {} cells filled, {} moves",
                sol.full_rows.len(),
                inst.t(),
                sol.stats.filled,
                inst.f * inst.n,
                sol.table.log().len()
            );
            Ok(if sol.status == Status::ReachedT {
                0
            } else {
                EXIT_PARTIAL
            })
        }
        Command::Verify { input, solution } => {
            let inst = load(&input)?;
            let file = load_solution(&solution).map_err(|e| {
                let f = Failure::from(e);
                Failure(f.0, format!("{}: {}", solution.display(), f.1))
            })?;
            let table = file.table(&inst)?;
            let report = verify(&inst, &table);
            print!("{report}");
            if !report.all_pass() {
                let v = report.first_violation().expect("a check failed");
                eprintln!(
                    "first violation: {} {}",
                    v.name,
                    v.first_failure.as_deref().unwrap_or("")
                );
                return Ok(EXIT_FAIL);
            }
            if file.full_rows != table.full_rows() {
                eprintln!(
                    "first violation: stored L {:?} differs from full rows {:?}",
                    file.full_rows,
                    table.full_rows()
                );
                return Ok(EXIT_FAIL);
            }
            Ok(0)
        }
        Command::Brute { input, mode, guard } => {
            let inst = load(&input)?;
            match mode {
                BruteMode::MaxRows => {
                    let r = brute_max_rows(&inst, guard)?;
                    let t = witness_table(&inst, &r.witness)?;
                    println!(
                        "{}",
                        json!({"optimum": r.optimum, "nodes": r.nodes, "witness": t.grid()})
                    );
                    Ok(0)
                }
                BruteMode::KahnFull => match brute_kahn_full(&inst, guard)? {
                    Some(grid) => {
                        witness_table(&inst, &grid)?;
                        println!("{}", json!({"found": true, "witness": grid}));
                        Ok(0)
                    }
                    None => {
                        println!("{}", json!({"found": false}));
                        Ok(EXIT_FAIL)
                    }
                },
            }
        }
        Command::Claims {
            input,
            seeds,
            all_rows,
        } => {
            let inst = load(&input)?;
            let cfg = SolverConfig {
                target_rows: all_rows.then_some(inst.f),
                ..SolverConfig::default()
            };
            let report = claims_sweep(&inst, &cfg, 0..seeds)?;
            println!("{}", serde_json::to_string(&report).map_err(Error::from)?);
            if report.tally.violations() > 0 {
                eprintln!(
                    "first violation: {}",
                    report.tally.first_violation.as_deref().unwrap_or("?")
                );
                return Ok(EXIT_FAIL);
            }
            Ok(0)
        }
        Command::Bench {
            kinds,
            sizes,
            seeds,
            epsilon,
            p,
            f,
        } => {
            let epsilon = eps(&epsilon)?;
            let mut rows = Vec::new();
            for &kind in &kinds {
                for &n in &sizes {
                    let rows_per = f.unwrap_or_else(|| regime_rows(epsilon, n).max(1));
                    for seed in 0..seeds {
                        let ground = (kind == Kind::Uniform).then_some(2 * n);
                        let inst = generate(kind, p, n, Some(rows_per), epsilon, seed, ground, 2)?;
                        let started = Instant::now();
                        let sol = solve(
                            &inst,
                            &SolverConfig {
                                seed,
                                ..SolverConfig::default()
                            },
                        )?;
                        let micros = started.elapsed().as_micros() as u64;
                        let t = inst.t();
                        rows.push(json!({
                            "kind": format!("{kind:?}").to_lowercase(),
                            "n": n,
                            "f": inst.f,
                            "t": t,
                            "seed": seed,
                            "L": sol.full_rows.len(),
                            "ratio": if t == 0 { None } else { Some(sol.full_rows.len() as f64 / t as f64) },
                            "status": sol.status,
                            "micros": micros,
                            "moves": sol.stats.move_counts,
                        }));
                    }
                }
            }
            println!(
                "{}",
                serde_json::to_string(&json!({ "runs": rows })).map_err(Error::from)?
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
