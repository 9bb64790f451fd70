use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    ShrinkPi,
}

fn positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} must be a positive finite number"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mfact",
    version,
    about = "Unordered factorizations, vector partitions and certified lower bounds"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Persistent p(alpha) cache (VPCACHE v1). Created if missing.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,

    /// Largest interval precision in bits.
    #[arg(
        long,
        default_value_t = 4096,
        value_parser = clap::value_parser!(u32).range(128..),
        global = true
    )]
    pub precision_cap: u32,

    /// Tail tolerance for the hypergeometric series.
    #[arg(long, default_value_t = 1e-9, value_parser = positive_real, global = true)]
    pub tail_tol: f64,

    /// Worker threads (default: one per core).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    pub workers: Option<u32>,

    /// Cap on multiply-adds spent computing a single p(alpha).
    #[arg(long, default_value_t = 50_000_000, global = true)]
    pub state_budget: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Number of unordered factorizations f(n).
    F {
        n: u64,
        /// Also list every factorization.
        #[arg(long)]
        list: bool,
    },
    /// Number of vector partitions p(alpha); components in any order.
    Pvec {
        #[arg(required = true, num_args = 1..)]
        components: Vec<u32>,
    },
    /// Integer partition number p(n).
    Partition { n: u64 },
    /// Bell number B_r.
    Bell { r: u64 },
    /// Root, floor and both lower bounds for p(alpha).
    Bound {
        #[arg(required = true, num_args = 1..)]
        components: Vec<u32>,
    },
    /// Certify every auxiliary inequality and both lower bounds on a grid.
    Verify {
        /// Factorial bound: 1 <= k <= KMAX; binomial bound: 1 <= k <= KMAX.
        #[arg(long, default_value_t = 300)]
        kmax: u64,
        /// Binomial bound: 1 <= n <= NMAX.
        #[arg(long, default_value_t = 300)]
        nmax: u64,
        /// Cumulative partition bound: 1 <= y <= YMAX.
        #[arg(long, default_value_t = 5000)]
        ymax: u64,
        /// Monotonicity of h1, h2: 1 <= x <= HMAX.
        #[arg(long, default_value_t = 10_000)]
        hmax: u64,
        /// Upper and lower partition-number bounds: 1 <= n <= PMAX.
        #[arg(long, default_value_t = 2000)]
        pmax: u64,
        /// Lower bounds, sandwich and product checks on canonical alpha
        /// with sum at most ALPHA_SUM.
        #[arg(long, default_value_t = 12)]
        alpha_sum: u32,
        /// Test hook: corrupt a constant to exercise the failure path.
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Distinct values of f up to x and the comparison curves.
    Spectrum {
        x: String,
        /// Cap on tuples visited by the search.
        #[arg(long, default_value_t = 10_000_000)]
        max_nodes: usize,
    },
    /// Size of the set S and the number of distinct p values on it.
    Conjecture {
        x: f64,
        #[arg(long = "B", default_value_t = 1.0, value_parser = positive_real)]
        b: f64,
        /// Cap on |S|.
        #[arg(long, default_value_t = 1_000_000)]
        max_tuples: usize,
    },
}
