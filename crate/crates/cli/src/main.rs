use std::error::Error;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semistrong::census::{
    census_exhaustive, census_search, CensusAlgo, CensusOptions, CensusTable, ExhaustiveOptions,
};
use semistrong::oracle::{verify_semi_strong, OracleDb, Traversal};
use semistrong::solver::{semi_strong_solve, weak_solve, MoveOrdering, SolverConfig};
use semistrong::store::{dump_tsv, open_store, write_store};
use semistrong::theory::{self, SyntheticTreeSpec};
use semistrong::{Position, Square};
use semistrong_cli::api::{answer_position, router};

type CliResult = Result<(), Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "semistrong", version, about = "Semi-strong solving of 4x4 and 6x6 Othello")]
struct Cli {
    /// More log output (-v info, -vv debug, -vvv trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a position with plain PVS and print its value and principal variation.
    SolveWeak(SolveWeakArgs),
    /// Run the reopening search and write every P/A'/P' record to a store file.
    SolveSemistrong(SolveSemistrongArgs),
    /// Count unique positions per disc count (search or exhaustive).
    Census(CensusArgs),
    /// Node counts of the reopening search on uniform trees.
    Theory(TheoryArgs),
    /// Check a store against a brute-force oracle; prints one TSV line per violation.
    Verify(VerifyArgs),
    /// List a store's records as TSV.
    Dump(DumpArgs),
    /// Serve the JSON answer API.
    Serve(ServeArgs),
    /// Play against the store in the terminal.
    Play(PlayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Ordering {
    Heuristic,
    Natural,
    /// Best child first by brute-force value; needs a root small enough to solve fully.
    Oracle,
}

#[derive(Args)]
struct RootArgs {
    /// Board edge.
    #[arg(long, value_parser = ["4", "6"], default_value = "6")]
    size: String,
    /// Start from `<size>:<mover-hex16>:<opponent-hex16>` instead of the initial position.
    #[arg(long)]
    root: Option<String>,
}

impl RootArgs {
    fn position(&self) -> Result<Position, Box<dyn Error>> {
        let edge: u32 = self.size.parse()?;
        match &self.root {
            Some(text) => {
                let p = Position::parse_notation(text)?;
                if p.size().edge() != edge {
                    return Err(format!("--root is a {} position but --size is {edge}", p.size()).into());
                }
                Ok(p)
            }
            None => Ok(semistrong::initial_position(edge)?),
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "heuristic")]
    ordering: Ordering,
    /// log2 of the bound table's slot count.
    #[arg(long)]
    table_log2: Option<u32>,
    /// Disable transposition-table lookups.
    #[arg(long)]
    no_table: bool,
    /// Positions in the oracle for --ordering oracle.
    #[arg(long, default_value_t = 50_000_000)]
    oracle_capacity: usize,
    /// Root subtrees are searched in parallel below this depth; only 0 (single worker) is supported.
    #[arg(long, default_value_t = 0)]
    split_depth: u32,
}

impl SearchArgs {
    fn config(&self, root: &Position) -> Result<SolverConfig, Box<dyn Error>> {
        if self.split_depth != 0 {
            return Err("only --split-depth 0 (deterministic single worker) is supported".into());
        }
        let mut config = SolverConfig::for_size(root.size());
        config.ordering = self.ordering(root)?;
        config.use_table = !self.no_table;
        if let Some(t) = self.table_log2 {
            config.table_log2 = t;
        }
        Ok(config)
    }

    fn ordering(&self, root: &Position) -> Result<MoveOrdering, Box<dyn Error>> {
        Ok(match self.ordering {
            Ordering::Heuristic => MoveOrdering::Heuristic,
            Ordering::Natural => MoveOrdering::Natural,
            Ordering::Oracle => {
                let oracle = OracleDb::solve_all(root, Traversal::Ascending, Some(self.oracle_capacity))
                    .map_err(|e| format!("oracle ordering needs a fully solvable root: {e}"))?;
                MoveOrdering::Oracle(Arc::new(oracle))
            }
        })
    }
}

#[derive(Args)]
struct SolveWeakArgs {
    #[command(flatten)]
    root: RootArgs,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct SolveSemistrongArgs {
    #[command(flatten)]
    root: RootArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Output store file.
    #[arg(long)]
    out: PathBuf,
    /// Positions with at most this many empties are solved on demand instead of stored.
    #[arg(long)]
    endgame: Option<u32>,
    /// Fail when more than this many records would be stored.
    #[arg(long)]
    record_limit: Option<usize>,
    /// Log every solved record as `<key> <kind> <value> <move>`.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Ab,
    Reab,
    Exhaustive,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[command(flatten)]
    root: RootArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Last disc-count row to compute (default: full board).
    #[arg(long)]
    max_discs: Option<u32>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add the column to this existing table (read, then rewritten to --out or stdout).
    #[arg(long)]
    merge: Option<PathBuf>,
    /// Directory for exhaustive-census spill files.
    #[arg(long)]
    spill_dir: Option<PathBuf>,
    /// Keys held in memory per level before spilling a sorted run.
    #[arg(long, default_value_t = 1 << 25)]
    memory_keys: usize,
    /// Maximum bytes of spill files; enumeration stops after the last complete level.
    #[arg(long)]
    disk_budget: Option<u64>,
    /// Also count positions answered from the transposition table.
    #[arg(long)]
    count_table_hits: bool,
    /// Maximum number of distinct keys a search census may hold.
    #[arg(long)]
    key_limit: Option<usize>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Branching factor.
    #[arg(long)]
    b: u32,
    /// Tree depth (root at depth 1).
    #[arg(long)]
    depth: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Skip the structural simulation and the live search.
    #[arg(long)]
    no_search: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DbArg {
    /// Solution store file.
    #[arg(long, env = "SEMISTRONG_DB")]
    db: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    db: DbArg,
    /// Root the store was solved from (default: the initial position).
    #[arg(long)]
    root: Option<String>,
    #[arg(long, default_value_t = 50_000_000)]
    oracle_capacity: usize,
    /// Write the violation TSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    db: DbArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    db: DbArg,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: String,
    /// Concurrent on-demand endgame solves.
    #[arg(long, default_value_t = 2)]
    solvers: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Color {
    Black,
    White,
}

#[derive(Args)]
struct PlayArgs {
    #[command(flatten)]
    db: DbArg,
    /// Your color; Black moves first.
    #[arg(long, value_enum, default_value = "black")]
    human: Color,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let mut logger = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level));
    if let Command::SolveSemistrong(a) = &cli.command {
        if a.trace {
            logger.filter_module("semistrong::solver", log::LevelFilter::Trace);
        }
    }
    logger.init();

    let result = match cli.command {
        Command::SolveWeak(a) => solve_weak(a),
        Command::SolveSemistrong(a) => solve_semistrong(a),
        Command::Census(a) => census(a),
        Command::Theory(a) => theory_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Dump(a) => dump(a),
        Command::Serve(a) => serve(a),
        Command::Play(a) => play(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn solve_weak(a: SolveWeakArgs) -> CliResult {
    let root = a.root.position()?;
    let config = a.search.config(&root)?;
    let start = Instant::now();
    let sol = weak_solve(&root, &config);
    let pv: Vec<String> = sol.pv.iter().map(|m| m.name(root.size())).collect();
    println!("value\t{}", sol.value);
    println!("pv\t{}", pv.join(" "));
    println!("visits\t{}", sol.stats.total_visits());
    println!("seconds\t{:.1}", start.elapsed().as_secs_f64());
    Ok(())
}

fn solve_semistrong(a: SolveSemistrongArgs) -> CliResult {
    let root = a.root.position()?;
    let mut config = a.search.config(&root)?;
    if let Some(e) = a.endgame {
        config.endgame_empties = e;
    }
    config.record_limit = a.record_limit;
    let start = Instant::now();
    let sol = semi_strong_solve(&root, &config)?;
    write_store(&sol.database, &a.out)?;
    println!("value\t{}", sol.value);
    println!("records\t{}", sol.database.len());
    println!("visits\t{}", sol.stats.total_visits());
    println!("seconds\t{:.1}", start.elapsed().as_secs_f64());
    Ok(())
}

fn census(a: CensusArgs) -> CliResult {
    let root = a.root.position()?;
    let max_discs = a.max_discs.unwrap_or(root.size().squares());
    let mut table = match &a.merge {
        Some(path) => CensusTable::parse(&fs::read_to_string(path)?)?,
        None => CensusTable::new(root.size()),
    };
    if table.size() != root.size() {
        return Err(format!("--merge table is for {} but the root is {}", table.size(), root.size()).into());
    }
    let algo = match a.algo {
        Algo::Ab => CensusAlgo::AlphaBeta,
        Algo::Reab => CensusAlgo::Reopening,
        Algo::Exhaustive => CensusAlgo::Exhaustive,
    };
    let start = Instant::now();
    let mut counts = match algo {
        CensusAlgo::Exhaustive => {
            let options = ExhaustiveOptions {
                max_discs,
                memory_keys: a.memory_keys,
                spill_dir: a.spill_dir.clone(),
                disk_budget: a.disk_budget,
            };
            let run = census_exhaustive(&root, &options)?;
            if let Some(e) = &run.halted {
                eprintln!("warning: {e}");
            }
            log::info!("spilled {} runs, peak {} bytes", run.spilled_runs, run.peak_disk_bytes);
            run.counts
        }
        _ => {
            a.search.config(&root)?;
            let options =
                CensusOptions { use_table: !a.search.no_table, count_table_hits: a.count_table_hits, key_limit: a.key_limit };
            let run = census_search(algo, &root, a.search.ordering(&root)?, options)?;
            eprintln!("value {}", run.value);
            run.counts
        }
    };
    counts.retain(|&d, _| d <= max_discs);
    table.set_column(algo.column(), &counts);
    log::info!("census finished in {:.1}s", start.elapsed().as_secs_f64());
    write_output(a.out.as_deref(), &table.emit())?;
    Ok(())
}

/// Trees beyond this many nodes are not simulated or searched.
const THEORY_SEARCH_LIMIT: u128 = 50_000_000;

fn theory_cmd(a: TheoryArgs) -> CliResult {
    let spec = SyntheticTreeSpec::new(a.b, a.depth, a.seed)?;
    let searchable = !a.no_search && theory::total_nodes(a.b, a.depth) <= THEORY_SEARCH_LIMIT;
    let (sim, search) = if searchable {
        let search = theory::synthetic_search_counts(&spec)?;
        if search.researches != 0 {
            eprintln!("warning: {} re-searches under optimal ordering", search.researches);
        }
        (Some(theory::simulate_structure(&spec)), Some(search.counts))
    } else {
        (None, None)
    };
    write_output(a.out.as_deref(), &theory::theory_tsv(a.b, a.depth, sim.as_ref(), search.as_ref()))?;
    Ok(())
}

fn verify(a: VerifyArgs) -> CliResult {
    let db = open_store(&a.db.db)?;
    let root = match &a.root {
        Some(text) => Position::parse_notation(text)?,
        None => Position::initial(db.size()),
    };
    let oracle = OracleDb::solve_all(&root, Traversal::Ascending, Some(a.oracle_capacity))?;
    let report = verify_semi_strong(&db, &oracle, &root);
    write_output(a.out.as_deref(), &report.to_tsv())?;
    eprintln!(
        "reachable {} records {} on-demand {} violations {}",
        report.reachable,
        report.records_checked,
        report.on_demand_checked,
        report.violations.len()
    );
    if report.passed() {
        Ok(())
    } else {
        Err(format!("{} violations", report.violations.len()).into())
    }
}

fn dump(a: DumpArgs) -> CliResult {
    let db = open_store(&a.db.db)?;
    match &a.out {
        Some(path) => {
            let mut w = io::BufWriter::new(fs::File::create(path)?);
            dump_tsv(&db, &mut w)?;
            w.flush()?;
        }
        None => dump_tsv(&db, &mut io::stdout().lock())?,
    }
    Ok(())
}

fn serve(a: ServeArgs) -> CliResult {
    let db = Arc::new(open_store(&a.db.db)?);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind((a.bind.as_str(), a.port)).await?;
        eprintln!("serving {} records on http://{}", db.len(), listener.local_addr()?);
        axum::serve(listener, router(db, a.solvers))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

fn play(a: PlayArgs) -> CliResult {
    let db = open_store(&a.db.db)?;
    let size = db.size();
    let mut p = Position::initial(size);
    let mut human_to_move = a.human == Color::Black;
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        let (me, them) = if human_to_move { ("you", "AI") } else { ("AI", "you") };
        println!("\n{p}X = {me} to move, O = {them}");
        let ans = answer_position(&db, &p);
        if ans.status == "terminal" {
            let score = ans.final_score.unwrap_or(0);
            let human_score = if human_to_move { score } else { -score };
            println!("game over: you {human_score:+}");
            return Ok(());
        }
        if human_to_move {
            if let Some(v) = ans.value {
                println!("AI guarantees at least {:+} for itself", -v);
            }
            print!("your move ({}): ", ans.legal_moves.join(" "));
            io::stdout().flush()?;
            let Some(line) = lines.next() else { return Ok(()) };
            let text = line?.trim().to_lowercase();
            if text == "ps" && p.legal_moves() == 0 {
                p = p.apply_pass()?;
            } else {
                match Square::parse(&text, size).and_then(|sq| p.apply_move(sq)) {
                    Ok(next) => p = next,
                    Err(e) => {
                        println!("{e}");
                        continue;
                    }
                }
            }
        } else {
            let Some(mv) = ans.best_move else {
                return Err(format!("position {} is outside the store's coverage", p.notation()).into());
            };
            println!("AI plays {mv} (value {:+})", ans.value.unwrap_or(0));
            p = if mv == "ps" { p.apply_pass()? } else { p.apply_move(Square::parse(&mv, size)?)? };
        }
        human_to_move = !human_to_move;
    }
}
