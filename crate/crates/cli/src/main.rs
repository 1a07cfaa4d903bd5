//! `richpoint` command-line driver.
//!
//! Every subcommand except `gen` and `plot` writes an experiment report as
//! JSON and exits with status 0 when all of its assertions hold, 1 when one
//! fails, and 2 on error. Worker threads follow `RAYON_NUM_THREADS`.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "richpoint", version, about = "Exact rich points, partitions and surface clusters for lines in space")]
struct Cli {
    /// JSON object of flag defaults, keyed by long flag name; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Rich points of a line family.
    Rich(RichArgs),
    /// Quadruple census of a planar configuration.
    Quads(QuadsArgs),
    /// Distinct-distance lower bound from the quadruple count.
    Ddbound(InputArgs),
    /// Polynomial partition of a point set in space.
    Partition(PartitionArgs),
    /// Surface clustering of the rich points of a line family.
    Cluster(ClusterArgs),
    /// Run every exact check that applies to an instance.
    Verify(VerifyArgs),
    /// Quadruple counts on square grids with a log-log fit.
    Scale(ScaleArgs),
    /// SVG plots and CSV tables from a report.
    Plot(PlotArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// grid2d, random2d, collinear2d, random-lines3d, coplanar-lines, pencil,
    /// regulus-rulings or from-file.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Denominator of random coordinates.
    #[arg(long)]
    q: Option<i64>,
    /// Coordinate bound of random kinds, as `num/den`.
    #[arg(long)]
    range: Option<String>,
    #[arg(long)]
    path: Option<PathBuf>,
    /// Emit the line family of the generated planar configuration.
    #[arg(long)]
    es: bool,
    /// Generator spec as a JSON file; other flags are ignored.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
pub struct InputArgs {
    /// Instance file or generator spec.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
pub struct RichArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also list the points of `P_r`.
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args)]
pub struct QuadsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Skip the brute-force census.
    #[arg(long)]
    no_brute: bool,
}

#[derive(Args)]
pub struct PartitionArgs {
    /// Points in space; see `--points` for random input.
    #[command(flatten)]
    input: InputArgs,
    /// Draw this many uniform random points `k/q` in `[-1, 1]^3`.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    q: Option<i64>,
    #[arg(long)]
    degree: Option<u32>,
    /// planes or lifted.
    #[arg(long)]
    backend: Option<String>,
    /// Lines to test against the cells.
    #[arg(long)]
    lines: Option<PathBuf>,
    /// Assert `max_cell * D^3 / |S|` at most this value.
    #[arg(long)]
    max_ratio: Option<String>,
}

#[derive(Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    degree: Option<u32>,
    /// Defaults to the smallest value the construction admits.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    backend: Option<String>,
    /// Random seed subsets per degree in the surface search.
    #[arg(long)]
    greedy_seeds: Option<usize>,
    /// Iterate every node until no rich point is left.
    #[arg(long)]
    full: bool,
    /// Include the recursion trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Random samples for the vector-field checks.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
pub struct ScaleArgs {
    /// Grid sizes `N`, each a perfect square.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    eps: Option<String>,
    /// Skip the remaining sizes after this many seconds.
    #[arg(long)]
    budget_secs: Option<u64>,
}

#[derive(Args)]
pub struct PlotArgs {
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    outdir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
