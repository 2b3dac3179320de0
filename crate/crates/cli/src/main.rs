use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pareto_games::audit::audit_game;
use pareto_games::bellman::{achievable_within, file_stem, value_iterate};
use pareto_games::betting::{adversary_by_name, simulate, Outcome, ADVERSARIES};
use pareto_games::determined::{check_determinacy, solve_determined};
use pareto_games::game::{discount_transform, normalize};
use pareto_games::rational::{fmt_rat, parse_rat};
use pareto_games::{BettingGame, CurveMap, Error, Game, Rat, Vec2};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT: u8 = 2;
const LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "pgame", version, about = "Exact Pareto curves for two-objective stochastic games")]
struct Cli {
    /// Worker threads; defaults to all cores for solve-determined and 1 otherwise.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file for structural violations.
    Validate { game: PathBuf },
    /// Decide whether every strategy pair stops almost surely.
    Stopping { game: PathBuf },
    /// Rewrite to the normal form: binary branching, rewards on Player-2 states.
    Normalize {
        game: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Turn a discounted game into an equivalent stopping game.
    Discount {
        game: PathBuf,
        #[arg(long, value_parser = rational)]
        delta: Rat,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Value iteration with a certified residual bound.
    SolveVi {
        game: PathBuf,
        #[arg(long, value_parser = rational, default_value = "1/1000")]
        epsilon: Rat,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Also write one SVG plot per state.
        #[arg(long)]
        svg: bool,
    },
    /// Exact curves by enumerating Player-2 memoryless strategies.
    SolveDetermined {
        game: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Check the result against the one-step operator.
        #[arg(long)]
        check_determinacy: bool,
    },
    /// Decide whether a point is achievable from a state.
    Query {
        game: PathBuf,
        #[arg(long)]
        state: String,
        /// Point as "x,y" with rational coordinates.
        #[arg(long, value_parser = point)]
        point: Vec2,
        #[arg(long, value_enum, default_value_t = Mode::Determined)]
        mode: Mode,
        #[arg(long, value_parser = rational, default_value = "1/1000")]
        epsilon: Rat,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
    },
    /// Check per-state curves against the slope relations.
    Audit {
        game: PathBuf,
        /// Directory of per-state CSV curves.
        #[arg(long)]
        curves: PathBuf,
    },
    /// Simulate Eve's potential strategy in an inverse betting game.
    BettingSim {
        game: PathBuf,
        /// Comma-separated target vertices.
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        #[arg(long, value_parser = rational)]
        bound: Rat,
        #[arg(long, default_value = "random", value_parser = clap::builder::PossibleValuesParser::new(ADVERSARIES))]
        adam: String,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Directory for per-run trace CSVs.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Vi,
    Determined,
}

fn rational(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn point(s: &str) -> Result<Vec2, String> {
    Vec2::parse(s).map_err(|e| e.to_string())
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::NotStopping | Error::NotStoppingUnderPolicy | Error::AdamCheated(_) | Error::RelationMismatch(_)) => {
                NEGATIVE
            }
            _ => INPUT,
        }
    }

    fn line(&self) -> String {
        match self {
            Failure::Core(e) => format!("error: {}: {e}", e.code()),
            Failure::Io(p, e) => format!("error: IO: {}: {e}", p.display()),
        }
    }
}

type Run = Result<u8, Failure>;

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))
}

fn write_curves(curves: &CurveMap, dir: &Path, svg: bool) -> Result<(), Failure> {
    curves.write_csv_dir(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
    if svg {
        for (id, f) in curves.iter() {
            write(&dir.join(format!("{}.svg", file_stem(id))), &f.to_svg(480, 360))?;
        }
    }
    Ok(())
}

fn validate(path: &Path) -> Run {
    let report = Game::load(path)?.validate();
    print!("{report}");
    Ok(if report.is_ok() { OK } else { NEGATIVE })
}

fn stopping(path: &Path) -> Run {
    let report = Game::load(path)?.check_stopping()?;
    if report.stopping {
        println!("stopping");
        return Ok(OK);
    }
    let witness: Vec<&str> = report.witness_closed_set.iter().map(String::as_str).collect();
    println!("not stopping");
    println!("witness: {}", witness.join(","));
    Ok(NEGATIVE)
}

fn solve_vi(path: &Path, epsilon: &Rat, max_iters: usize, out_dir: &Path, svg: bool) -> Run {
    let g = Game::load(path)?;
    let result = value_iterate(&g, epsilon, max_iters)?;
    write_curves(&result.curves, out_dir, svg)?;
    let mut log = String::from("iteration,residual_bound\n");
    for (n, b) in &result.log {
        writeln!(log, "{n},{}", fmt_rat(b)).expect("string write");
    }
    write(&out_dir.join("iterations.csv"), &log)?;
    let residual = result.residual_bound.as_ref().map_or("none".to_string(), fmt_rat);
    println!("iterations: {}", result.iterations);
    println!("residual bound: {residual}");
    println!("fixpoint reached: {}", result.fixpoint_reached);
    if !result.stopping && !result.fixpoint_reached {
        println!("warning: game is not stopping; iterates carry no error bound");
    }
    Ok(if result.converged { OK } else { LIMIT })
}

fn solve_det(path: &Path, out_dir: &Path, check: bool) -> Run {
    let g = Game::load(path)?;
    if !check {
        write_curves(&solve_determined(&g)?, out_dir, false)?;
        return Ok(OK);
    }
    let d = check_determinacy(&g)?;
    write_curves(&d.curves, out_dir, false)?;
    println!("determined: {}", d.determined);
    Ok(if d.determined { OK } else { NEGATIVE })
}

fn query(path: &Path, state: &str, z: &Vec2, mode: Mode, epsilon: &Rat, max_iters: usize) -> Run {
    let g = Game::load(path)?;
    let (curves, residual) = match mode {
        Mode::Determined => (solve_determined(&g)?, Rat::from_integer(0.into())),
        Mode::Vi => {
            let result = value_iterate(&g, epsilon, max_iters)?;
            let residual = result.residual_bound.ok_or(Error::NotStopping)?;
            (result.curves, residual)
        }
    };
    let answer = achievable_within(&curves, state, z, &residual)?;
    println!("{answer}");
    Ok(OK)
}

fn audit(path: &Path, dir: &Path) -> Run {
    let g = Game::load(path)?;
    let curves = CurveMap::read_csv_dir(&g.checked()?, dir)?;
    let report = audit_game(&g, &curves)?;
    print!("{report}");
    Ok(if report.passed() { OK } else { NEGATIVE })
}

#[allow(clippy::too_many_arguments)]
fn betting_sim(
    path: &Path,
    target: &[String],
    bound: &Rat,
    adam: &str,
    runs: u64,
    seed: u64,
    max_steps: usize,
    out_dir: Option<&Path>,
) -> Run {
    let bg = BettingGame::load(path)?;
    let target: BTreeSet<String> = target.iter().cloned().collect();
    if let Some(dir) = out_dir {
        create_dir(dir)?;
    }
    let mut counts = [0usize; 3];
    let mut over_bound = 0;
    let mut short = 0;
    for run in 0..runs {
        let rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(run));
        let mut a = adversary_by_name(adam, rng).expect("checked by the argument parser");
        let trace = simulate(&bg, &target, bound, a.as_mut(), max_steps)?;
        let outcome = match trace.outcome {
            Outcome::Target => 0,
            Outcome::Bound => 1,
            Outcome::StepLimit => 2,
        };
        counts[outcome] += 1;
        over_bound += usize::from(!trace.within_step_bound());
        short += trace.short_steps.len();
        if let Some(dir) = out_dir {
            write(&dir.join(format!("trace-{run}.csv")), &trace.to_csv())?;
        }
        if run == 0 {
            println!("step bound: {}", trace.step_bound);
        }
    }
    println!("runs: {runs}");
    println!("target: {}", counts[0]);
    println!("bound: {}", counts[1]);
    println!("step limit: {}", counts[2]);
    println!("over step bound: {over_bound}");
    println!("short potential steps: {short}");
    Ok(if counts[2] == 0 && over_bound == 0 && short == 0 { OK } else { NEGATIVE })
}

fn run(cli: Cli) -> Run {
    let default_threads = if matches!(cli.command, Command::SolveDetermined { .. }) { 0 } else { 1 };
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(default_threads))
        .build_global()
        .expect("thread pool is configured once");
    match cli.command {
        Command::Validate { game } => validate(&game),
        Command::Stopping { game } => stopping(&game),
        Command::Normalize { game, output } => {
            write(&output, &normalize(&Game::load(&game)?)?.to_json())?;
            Ok(OK)
        }
        Command::Discount { game, delta, output } => {
            write(&output, &discount_transform(&Game::load(&game)?, &delta)?.to_json())?;
            Ok(OK)
        }
        Command::SolveVi { game, epsilon, max_iters, out_dir, svg } => solve_vi(&game, &epsilon, max_iters, &out_dir, svg),
        Command::SolveDetermined { game, out_dir, check_determinacy } => solve_det(&game, &out_dir, check_determinacy),
        Command::Query { game, state, point, mode, epsilon, max_iters } => query(&game, &state, &point, mode, &epsilon, max_iters),
        Command::Audit { game, curves } => audit(&game, &curves),
        Command::BettingSim { game, target, bound, adam, runs, seed, max_steps, out_dir } => {
            betting_sim(&game, &target, &bound, &adam, runs, seed, max_steps, out_dir.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.exit_code())
        }
    }
}
