use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rstar_core::experiment::{
    aggregate, default_series_scaled, format_table, generate_corpus, load_corpus, read_csv,
    run_sweep, write_corpus, write_csv, CorpusSpec, Family, SeriesName, SweepOptions,
};
use rstar_core::{
    auto_params, load_map, rstar_plan_traced, weighted_astar, Cell, Outcome, RStarParams,
    SearchLimits, Weight,
};

#[derive(Parser)]
#[command(
    name = "rstar-bench",
    version,
    about = "R* grid path planning and parameter sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a map corpus and its manifest.
    Generate(GenerateArgs),
    /// Plan one path and print `solved length cells time_ms`.
    Plan(PlanArgs),
    /// Run the m, K and delta sweep series over a corpus.
    Sweep(SweepArgs),
    /// Summarize a results CSV.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Rects,
    Tetris,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: GenFamily,
    #[arg(long, default_value_t = 201)]
    rows: u32,
    #[arg(long, default_value_t = 201)]
    cols: u32,
    #[arg(long, default_value_t = 0.30)]
    threshold: f64,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Astar,
    Wastar,
    Rstar,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long, value_parser = parse_cell)]
    start: Cell,
    #[arg(long, value_parser = parse_cell)]
    goal: Cell,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long, default_value_t = 3.0)]
    w: f64,
    #[arg(long, requires_all = ["k", "m"], conflicts_with = "auto")]
    delta: Option<u64>,
    #[arg(long, requires_all = ["delta", "m"])]
    k: Option<u32>,
    #[arg(long, requires_all = ["delta", "k"])]
    m: Option<u64>,
    /// Derive delta, K and m from the start and goal (the default for rstar).
    #[arg(long)]
    auto: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write one line per R* selection event.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Multiplier on the series values; 1.0 matches 5000-unit tasks.
    #[arg(long, default_value_t = 0.4)]
    scale: f64,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    series: Option<SeriesName>,
}

fn parse_cell(s: &str) -> Result<Cell, String> {
    let (i, j) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `i,j`, got `{s}`"))?;
    let coord = |v: &str| {
        v.trim()
            .parse::<u32>()
            .map_err(|_| format!("invalid coordinate `{v}`"))
    };
    Ok(Cell::new(coord(i)?, coord(j)?))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let family = match args.family {
        GenFamily::Rects => Family::Rects,
        GenFamily::Tetris => Family::Tetris,
    };
    let tasks = generate_corpus(&CorpusSpec {
        family,
        rows: args.rows,
        cols: args.cols,
        threshold: args.threshold,
        count: args.count,
        seed: args.seed,
    })?;
    let manifest = write_corpus(&tasks, &args.out)?;
    eprintln!(
        "wrote {} {family} maps to {}",
        tasks.len(),
        manifest.display()
    );
    Ok(())
}

fn plan(args: PlanArgs) -> Result<()> {
    let text =
        fs::read_to_string(&args.map).with_context(|| format!("reading {}", args.map.display()))?;
    let grid = load_map(&text).with_context(|| format!("parsing {}", args.map.display()))?;
    let w = Weight::new(args.w)?;
    if args.trace.is_some() && args.algo != Algo::Rstar {
        bail!("--trace is only available with --algo rstar");
    }

    let (solved, length, cells, time_ms) = match args.algo {
        Algo::Astar | Algo::Wastar => {
            let w = if args.algo == Algo::Astar {
                Weight::ONE
            } else {
                w
            };
            let r = weighted_astar(&grid, args.start, args.goal, w, SearchLimits::UNLIMITED)?;
            (
                r.outcome == Outcome::Found,
                r.length().unwrap_or(0),
                r.stats.cells,
                r.stats.wall_time_ms,
            )
        }
        Algo::Rstar => {
            let params = match (args.delta, args.k, args.m) {
                (Some(delta), Some(k), Some(m)) => RStarParams::new(delta, k, m, w),
                _ => auto_params(args.start, args.goal, w)?,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let (r, trace) = rstar_plan_traced(&grid, args.start, args.goal, &params, &mut rng)?;
            if let Some(path) = &args.trace {
                let file = fs::File::create(path)
                    .with_context(|| format!("creating {}", path.display()))?;
                let mut out = BufWriter::new(file);
                for t in &trace {
                    writeln!(out, "{t}")?;
                }
                out.flush()?;
            }
            (
                r.outcome == Outcome::Found,
                r.stats.length,
                r.stats.cells,
                r.stats.wall_time_ms,
            )
        }
    };
    println!("{solved} {length} {cells} {time_ms:.3}");
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let series = default_series_scaled(args.scale)?;
    let out = run_sweep(
        &corpus,
        &series,
        &SweepOptions {
            repetitions: args.reps,
            base_seed: args.seed,
            workers: args.workers,
        },
    )?;
    for s in &out.skipped {
        let why: Vec<String> = s.violations.iter().map(|v| v.to_string()).collect();
        eprintln!(
            "skipped {} config {}: {}",
            s.series,
            s.config_index,
            why.join("; ")
        );
    }
    let file =
        fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(&out.records, BufWriter::new(file))?;
    let solved = out.records.iter().filter(|r| r.solved).count();
    eprintln!(
        "{} runs ({solved} solved) written to {}",
        out.records.len(),
        args.out.display()
    );
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let file =
        fs::File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let mut records = read_csv(io::BufReader::new(file))?;
    if let Some(name) = args.series {
        records.retain(|r| r.series == name.as_str());
    }
    if records.is_empty() {
        bail!("no records to summarize");
    }
    print!("{}", format_table(&aggregate(&records)));
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Plan(a) => plan(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report(a),
    }
}
