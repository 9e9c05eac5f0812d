use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use doubletree::bench::{
    emit_plot, format_tour_plain, format_tour_tsplib, parse_grid, run_single, run_suite, write_records_csv,
    write_suite_csv, GenSpec, Heuristic, InstanceClass, RunOptions, SuiteConfig,
};
use doubletree::hk::DEFAULT_ITERATIONS;
use doubletree::instances::{default_cluster_count, generate_clustered, generate_uniform};
use doubletree::oracles::{brute_force_optimal, depth_first_shortcut, MAX_ENUMERATION_N};
use doubletree::{parse_tsplib, write_tsplib, Depth, Error, Instance, Result};

#[derive(Parser)]
#[command(name = "dt", version, about = "Minimum-weight double-tree tours for metric TSP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance in TSPLIB format.
    Gen(GenArgs),
    /// Build one tour and report it.
    Run(RunArgs),
    /// Run a heuristic grid over seeded instances and write a CSV report.
    Suite(SuiteArgs),
    /// Cross-check the tour against exhaustive search on a small instance.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Uniform,
    Clustered,
}

impl From<Class> for InstanceClass {
    fn from(c: Class) -> Self {
        match c {
            Class::Uniform => InstanceClass::Uniform,
            Class::Clustered => InstanceClass::Clustered,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    class: Class,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Side length of the square the points are drawn from.
    #[arg(long = "box", default_value_t = 1e6)]
    side: f64,
    /// Number of clusters (default n/100, at least 1).
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeuristicKind {
    /// Full search on the plain spanning tree.
    Dt,
    /// Degree limit and search depth from the flags.
    Dtk,
}

#[derive(Clone, Copy, ValueEnum)]
enum TourFormat {
    Tsplib,
    Plain,
}

#[derive(Args)]
struct RunArgs {
    /// TSPLIB instance file.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Generator spec, e.g. `uniform,n=1000,seed=3,box=1e6`.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, value_enum, default_value = "dt")]
    heuristic: HeuristicKind,
    /// 1 leaves the tree alone; otherwise at least 3.
    #[arg(long)]
    degree_limit: Option<usize>,
    /// Search depth, a count or `inf`.
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    tour_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsplib")]
    tour_format: TourFormat,
    /// Write an SVG drawing of the tree and tour.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Print the record as CSV instead of text.
    #[arg(long)]
    csv: bool,
    /// Subgradient steps for the lower bound (0 skips it).
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    hk_iterations: usize,
}

#[derive(Args)]
struct SuiteArgs {
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Instances per size, seeded 1..=N.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Comma-separated `D:k` entries, `dt`, `default` or `default+dt`.
    #[arg(long, default_value = "default")]
    grid: String,
    #[arg(long, value_enum, default_value = "uniform")]
    class: Class,
    #[arg(long = "box", default_value_t = 1e6)]
    side: f64,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    hk_iterations: usize,
    /// Leave `wall_time_ms` empty so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = MAX_ENUMERATION_N)]
    max_n: usize,
}

fn load(path: &Path) -> Result<Instance> {
    parse_tsplib(&fs::read_to_string(path)?)
}

fn parse_depth(s: &str) -> Result<Depth> {
    match s {
        "inf" => Ok(Depth::Unlimited),
        k => k
            .parse()
            .map(Depth::Limited)
            .map_err(|_| Error::Config(format!("bad depth `{k}`"))),
    }
}

fn heuristic(args: &RunArgs) -> Result<Heuristic> {
    let depth = args.depth.as_deref().map(parse_depth).transpose()?;
    match args.heuristic {
        HeuristicKind::Dt => {
            if args.degree_limit.is_some_and(|d| d != 1) || depth.is_some_and(|k| k != Depth::Unlimited) {
                return Err(Error::Config(
                    "`--heuristic dt` is the full search; use `dtk` to set a degree limit or depth".into(),
                ));
            }
            Ok(Heuristic::FULL)
        }
        HeuristicKind::Dtk => Heuristic::new(args.degree_limit.unwrap_or(1), depth.unwrap_or(Depth::Limited(16))),
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let inst = match args.class {
        Class::Uniform => generate_uniform(args.n, args.seed, args.side)?,
        Class::Clustered => generate_clustered(
            args.n,
            args.seed,
            args.side,
            args.clusters.unwrap_or_else(|| default_cluster_count(args.n)),
        )?,
    };
    fs::write(&args.output, write_tsplib(&inst)?)?;
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let h = heuristic(&args)?;
    let (inst, seed) = match (&args.input, &args.gen) {
        (Some(path), _) => (load(path)?, None),
        (None, Some(spec)) => {
            let spec: GenSpec = spec.parse()?;
            (spec.generate()?, Some(spec.seed))
        }
        (None, None) => return Err(Error::Config("one of --input or --gen is required".into())),
    };
    let opts = RunOptions {
        hk_iterations: args.hk_iterations,
        cross_check: false,
    };
    let out = run_single(&inst, h, opts, seed)?;

    if let Some(path) = &args.tour_out {
        let text = match args.tour_format {
            TourFormat::Tsplib => format_tour_tsplib(inst.name(), &out.tour),
            TourFormat::Plain => format_tour_plain(&out.tour),
        };
        fs::write(path, text)?;
    }
    if let Some(path) = &args.plot {
        emit_plot(&inst, &out.tree, &out.tour, path)?;
    }

    let stdout = io::stdout();
    let r = &out.record;
    if args.csv {
        write_records_csv(stdout.lock(), std::slice::from_ref(r), true)?;
    } else {
        let mut w = stdout.lock();
        writeln!(w, "instance    {}", r.instance)?;
        writeln!(w, "n           {}", r.n)?;
        writeln!(w, "heuristic   {}", r.heuristic)?;
        writeln!(w, "mst weight  {:.6}", r.mst_weight)?;
        writeln!(w, "tour weight {:.6}", r.tour_weight)?;
        if let (Some(b), Some(e)) = (r.hk_bound, r.excess_pct()) {
            writeln!(w, "hk bound    {b:.6}")?;
            writeln!(w, "excess      {e:.4}%")?;
        }
        writeln!(w, "time        {:.3} ms", r.wall_time_ms)?;
    }
    Ok(())
}

fn suite(args: SuiteArgs) -> Result<()> {
    let cfg = SuiteConfig {
        sizes: args.sizes,
        seeds: args.seeds,
        grid: parse_grid(&args.grid)?,
        class: args.class.into(),
        side: args.side,
        clusters: args.clusters,
        hk_iterations: args.hk_iterations,
        timing: !args.no_timing,
    };
    let rows = run_suite(&cfg)?;
    let file = fs::File::create(&args.output)?;
    write_suite_csv(io::BufWriter::new(file), &rows, &cfg)?;
    let failed = rows
        .iter()
        .filter(|r| matches!(r, doubletree::bench::SuiteRow::Failed { .. }))
        .count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", rows.len());
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<()> {
    if args.max_n > MAX_ENUMERATION_N {
        return Err(Error::Config(format!("--max-n is capped at {MAX_ENUMERATION_N}")));
    }
    let inst = load(&args.input)?;
    if inst.len() > args.max_n {
        return Err(Error::Guard(format!(
            "instance has {} nodes, exhaustive check allows {}",
            inst.len(),
            args.max_n
        )));
    }
    let opts = RunOptions {
        hk_iterations: if inst.len() >= 3 { DEFAULT_ITERATIONS } else { 0 },
        cross_check: true,
    };
    let out = run_single(&inst, Heuristic::FULL, opts, None)?;
    let optimum = brute_force_optimal(&inst)?.weight;
    let dfs = depth_first_shortcut(&inst, &out.tree).weight;
    let tour = out.tour.weight;
    if tour > 2.0 * optimum * (1.0 + 1e-9) || tour > dfs * (1.0 + 1e-9) {
        return Err(Error::Invariant(format!(
            "tour {tour} breaks the optimum {optimum} / depth-first {dfs} bounds"
        )));
    }
    if let Some(b) = out.record.hk_bound {
        if b > optimum * (1.0 + 1e-9) {
            return Err(Error::Invariant(format!("lower bound {b} exceeds the optimum {optimum}")));
        }
    }
    println!("ok: tour {tour:.6} = conforming optimum, optimum {optimum:.6}, depth-first {dfs:.6}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Suite(a) => suite(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
