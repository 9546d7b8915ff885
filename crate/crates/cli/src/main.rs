mod commands;
mod store;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use modunits::ExpansionCache;

use store::DiskStore;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "modunits", version, about = "Modular units, q-series and invariant sets of products")]
pub struct Cli {
    /// Override the expansion depth (in integer steps of q).
    #[arg(long, global = true)]
    pub depth: Option<usize>,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = default_jobs(), value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,

    /// Directory for cached expansions.
    #[arg(long, global = true, env = "MODUNITS_CACHE_DIR")]
    pub cache: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Largest level to search.
    #[arg(long = "l-max", global = true)]
    pub l_max: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// q-expansion of a product of units, e.g. `5:1` or `7:1,2,3`.
    Expand {
        product: String,
        /// Number of integer steps past the leading power.
        #[arg(long, default_value_t = 10)]
        prec: u32,
    },
    /// q-expansion of the Siegel unit with index (p1, p2)/l.
    Siegel {
        l: u64,
        #[arg(allow_negative_numbers = true)]
        p1: i64,
        #[arg(allow_negative_numbers = true)]
        p2: i64,
        #[arg(long, default_value_t = 10)]
        prec: u32,
    },
    /// Orders of a product at the cusps of its level.
    Ord {
        product: String,
        /// A single cusp such as `0`, `1/3` or `inf`.
        #[arg(long)]
        cusp: Option<String>,
    },
    /// Pre-modular candidate points in projective space over Z/l.
    Candidates { n: usize, l: u64 },
    /// Maximal invariant sets of products of exactly n units, level by level.
    Enumerate {
        n: usize,
        /// Also report empty and imprimitive results.
        #[arg(long)]
        all: bool,
    },
    /// Whether the span of the given products is invariant.
    Check {
        #[arg(required = true)]
        products: Vec<String>,
    },
    /// Factor a series (JSON, as printed by `expand --format json`) into units of level l.
    Factor { file: PathBuf, l: u64 },
    /// Run one of the built-in verifications:
    /// `rr`, `ag:<l>`, `distribution:<r>,<l>,<m>`, `siegel-numeric`.
    Verify {
        name: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Special-point bound on the level.
    Bound {
        n: u32,
        /// Evaluate the bracket and exclusion tests at this level.
        #[arg(long)]
        l: Option<u64>,
    },
}

fn default_jobs() -> u32 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u32)
}

/// Settings shared by every command.
pub struct Config {
    pub depth_override: Option<usize>,
    pub format: Format,
    pub l_max: Option<u64>,
    pub cache: ExpansionCache,
}

impl Config {
    fn from_cli(cli: &Cli) -> anyhow::Result<Self> {
        let cache = match &cli.cache {
            Some(dir) => ExpansionCache::with_store(Arc::new(DiskStore::open(dir)?)),
            None => ExpansionCache::new(),
        };
        Ok(Config {
            depth_override: cli.depth,
            format: cli.format,
            l_max: cli.l_max,
            cache,
        })
    }
}

/// Verdict of a command that answers a yes/no question.
pub enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs as usize)
        .build_global()
    {
        log::warn!("thread pool already configured: {e}");
    }
    let result = Config::from_cli(&cli).and_then(|cfg| commands::run(&cli.command, &cfg));
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
