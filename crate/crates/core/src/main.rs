use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pauli_games::classical::{
    self, load_strategy_file, save_strategy_file, SearchOptions, ValueReport,
};
use pauli_games::game::{build_game, GameKind, GameSpec, SamplingProcedure};
use pauli_games::harness::{self, PlayStrategy};
use pauli_games::quantum;
use pauli_games::rational::{self, Rational};
use pauli_games::{Error, Result};

/// Exact classical values and entangled strategies for the MS, AMS and
/// p-SAMS nonlocal games.
#[derive(Parser)]
#[command(name = "pauli-games", version)]
struct Cli {
    /// Directory for JSON reports when no --out is given.
    #[arg(long, global = true, env = "PAULI_GAMES_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GameArgs {
    /// ms, ams or psams.
    game: GameKind,
    /// Synchronous probability for psams, as an exact fraction like 1/7.
    #[arg(long, value_parser = rational::parse_rational)]
    p: Option<Rational>,
}

impl GameArgs {
    fn build(&self) -> Result<GameSpec> {
        build_game(self.game, self.p)
    }

    fn stem(&self) -> String {
        match self.p {
            Some(p) => format!("{}-{}", self.game, rational::display(p).replace('/', "_")),
            None => self.game.to_string(),
        }
    }
}

#[derive(Args, Clone, Copy)]
struct ThreadArgs {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

impl ThreadArgs {
    fn options(self) -> SearchOptions {
        self.threads
            .map_or_else(SearchOptions::default, SearchOptions::with_threads)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate commuting triples and operator magic squares.
    Structure {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact classical value by exhaustive search.
    Value {
        #[command(flatten)]
        game: GameArgs,
        /// Restrict to strategies where both players answer identically.
        #[arg(long)]
        symmetric: bool,
        #[command(flatten)]
        threads: ThreadArgs,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the optimal strategy in strategy file format.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run every verification check; exits 1 if any claim fails.
    VerifyAll {
        #[command(flatten)]
        threads: ThreadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave timing fields out of the JSON report.
        #[arg(long)]
        no_timings: bool,
    },
    /// Referee seeded rounds and report the empirical win rate.
    Play {
        #[command(flatten)]
        game: GameArgs,
        /// `entangled-perfect` or the path of a strategy file.
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value = "flat")]
        procedure: SamplingProcedure,
        #[arg(long, default_value_t = 100_000)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full round log as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a game definition as JSON.
    DumpGame {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the first optimal classical strategy, or with --entangled the
    /// perfect strategy's per-pair win probabilities.
    DumpStrategy {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        symmetric: bool,
        #[arg(long, conflicts_with = "symmetric")]
        entangled: bool,
        #[command(flatten)]
        threads: ThreadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest synchronous agreement over optimal strategies of a game.
    SyncAgreement {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        threads: ThreadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical p-SAMS values over a list of p.
    Sweep {
        /// Fractions in [0, 1]; defaults to 0, 1/14, 1/7, 1/2, 1.
        #[arg(value_parser = rational::parse_rational)]
        p: Vec<Rational>,
        #[command(flatten)]
        threads: ThreadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Where a JSON report goes: the explicit path, else `<out_dir>/<name>`.
fn destination(out: Option<PathBuf>, out_dir: &Option<PathBuf>, name: &str) -> Option<PathBuf> {
    out.or_else(|| out_dir.as_ref().map(|d| d.join(name)))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Consistency(e.to_string()))?;
    write_text(path, &text)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, format!("{text}\n")).map_err(io)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// JSON to the destination if there is one, otherwise to standard output.
fn emit_json(dest: Option<PathBuf>, value: &impl Serialize) -> Result<()> {
    match dest {
        Some(path) => write_json(&path, value),
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| Error::Consistency(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn print_strategy(s: &classical::DeterministicStrategy) {
    let row = |answers: &[pauli_games::game::AnswerTriple]| {
        answers
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("  alice: {}", row(&s.alice));
    println!("  bob:   {}", row(&s.bob));
}

fn solve(g: &GameSpec, symmetric: bool, opts: &SearchOptions) -> Result<ValueReport> {
    if symmetric {
        classical::solve_symmetric_value(g, opts)
    } else {
        classical::solve_classical_value(g, opts)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Structure { out } => {
            let report = harness::cmd_structure()?;
            println!("commuting triples: {}", report.triples.len());
            for t in &report.triples {
                println!(
                    "  {} {} {}  product {:+}II",
                    t.ops[0], t.ops[1], t.ops[2], t.sign
                );
            }
            println!("operator magic squares: {}", report.squares.len());
            println!("AMS ordered question pairs: {}", report.ams_ordered_pairs);
            for c in &report.claims {
                println!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.computed
                );
            }
            if let Some(path) = destination(out, &out_dir, "structure.json") {
                write_json(&path, &report)?;
            }
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Value {
            game,
            symmetric,
            threads,
            out,
            witness,
        } => {
            let g = game.build()?;
            let opts = threads.options();
            let r = solve(&g, symmetric, &opts)?;
            println!(
                "{} {} value: {} ({:.6})",
                game.stem(),
                if symmetric { "symmetric" } else { "classical" },
                rational::display(r.value),
                rational::to_f64(r.value)
            );
            println!(
                "scanned {} Alice strategies on {} threads in {:.1} s",
                r.strategies_scanned,
                opts.threads,
                r.wall_time.as_secs_f64()
            );
            println!("witness:");
            print_strategy(&r.witness);
            if let Some(path) = witness {
                save_strategy_file(&path, &g, &r.witness)?;
                println!("wrote {}", path.display());
            }
            let name = format!(
                "value-{}{}.json",
                game.stem(),
                if symmetric { "-symmetric" } else { "" }
            );
            if let Some(path) = destination(out, &out_dir, &name) {
                write_json(&path, &r)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyAll {
            threads,
            out,
            no_timings,
        } => {
            let opts = threads.options();
            println!("running the verification suite on {} threads", opts.threads);
            let result = harness::verify_all(&opts)?;
            for c in &result.claims {
                println!(
                    "{} {:<42} expected {:<26} computed {:<26} {:>7.2} s",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.expected,
                    c.computed,
                    c.seconds
                );
            }
            println!("{}", result.artifacts.sync_agreement.note);
            for l in &result.artifacts.line_checks {
                println!(
                    "p = {:<5} value {:<8} two-line bound {:<8}{}",
                    rational::display(l.p),
                    rational::display(l.value),
                    rational::display(l.two_line_bound),
                    if l.value_equals_bound {
                        ""
                    } else {
                        "  value exceeds the bound"
                    }
                );
            }
            if let Some(path) = destination(out, &out_dir, "verify-all.json") {
                write_text(&path, &result.to_json(!no_timings)?)?;
            }
            let failed = result.failures().count();
            println!(
                "{} of {} claims pass",
                result.claims.len() - failed,
                result.claims.len()
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Play {
            game,
            strategy,
            procedure,
            rounds,
            seed,
            out,
        } => {
            let g = game.build()?;
            let s = if strategy == "entangled-perfect" {
                PlayStrategy::EntangledPerfect
            } else {
                let (file_game, s) = load_strategy_file(&strategy)?;
                if file_game.kind() != g.kind() || file_game.sync_weight() != g.sync_weight() {
                    return Err(Error::Input(format!(
                        "{strategy} holds a strategy for the {} game, not {}",
                        file_game.kind(),
                        game.stem()
                    )));
                }
                PlayStrategy::Classical(s)
            };
            let log = harness::play(&g, &s, procedure, rounds, seed)?;
            let sum = log.summary();
            println!(
                "{} rounds of {} with {} questions ({}), seed {seed}",
                sum.rounds,
                game.stem(),
                procedure,
                s.name()
            );
            println!(
                "won {} ({:.6} ± {:.6} standard error)",
                sum.wins, sum.win_rate, sum.std_error
            );
            if let Some(path) =
                destination(out, &out_dir, &format!("play-{}-{seed}.json", game.stem()))
            {
                #[derive(Serialize)]
                struct PlayReport<'a> {
                    summary: harness::PlaySummary,
                    #[serde(flatten)]
                    log: &'a harness::RoundLog,
                }
                write_json(
                    &path,
                    &PlayReport {
                        summary: sum,
                        log: &log,
                    },
                )?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::DumpGame { game, out } => {
            let g = game.build()?;
            emit_json(
                destination(out, &out_dir, &format!("game-{}.json", game.stem())),
                &g.to_json(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DumpStrategy {
            game,
            symmetric,
            entangled,
            threads,
            out,
        } => {
            let g = game.build()?;
            if entangled {
                let s = quantum::perfect_strategy(&g)?;
                let probs = quantum::pair_win_probabilities(&g, &s)?;
                let dest = destination(out, &out_dir, &format!("entangled-{}.json", game.stem()));
                emit_json(dest, &probs)?;
            } else {
                let r = solve(&g, symmetric, &threads.options())?;
                let name = format!(
                    "strategy-{}{}.json",
                    game.stem(),
                    if symmetric { "-symmetric" } else { "" }
                );
                match destination(out, &out_dir, &name) {
                    Some(path) => {
                        save_strategy_file(&path, &g, &r.witness)?;
                        println!("wrote {}", path.display());
                    }
                    None => emit_json(None, &classical::StrategyFile::new(&g, &r.witness))?,
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SyncAgreement { game, threads, out } => {
            let g = game.build()?;
            let r = classical::max_sync_agreement_over_optima(&g, &threads.options())?;
            println!(
                "optimal value {} reached by {} Alice strategies",
                rational::display(r.optimal_value),
                r.optimal_alice_count
            );
            println!(
                "largest synchronous agreement among optimal pairs: {} of {}",
                r.max_agreement,
                g.n_questions()
            );
            if let Some(a) = r.max_asymmetric_agreement {
                println!("largest among pairs that are not fully synchronous: {a}");
            }
            println!("witness:");
            print_strategy(&r.witness);
            if let Some(path) = destination(
                out,
                &out_dir,
                &format!("sync-agreement-{}.json", game.stem()),
            ) {
                write_json(&path, &r)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { p, threads, out } => {
            let points = if p.is_empty() {
                harness::sweep_points()
            } else {
                p
            };
            let rows = classical::psams_value_sweep(&points, &threads.options())?;
            for r in &rows {
                println!(
                    "p = {:<6} value {:<10} witness: AMS value {}, {} synchronous wins, {:.1} s",
                    rational::display(r.p),
                    rational::display(r.value),
                    rational::display(r.ams_value),
                    r.sync_wins,
                    r.seconds
                );
            }
            classical::check_sweep_envelope(&rows)?;
            if let Some(path) = destination(out, &out_dir, "sweep.json") {
                write_json(&path, &rows)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
