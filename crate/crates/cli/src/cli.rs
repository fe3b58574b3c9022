//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "besum", version, about = "Exponential sums over A(f) = {n + f(n)!} and the sets E(f, a)")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every verb. Only `seed` enters the config hash.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension when absent.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Validate and print the plan without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// Worker threads for verbs that fan out over independent cells.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verb")]
pub enum Command {
    /// Trace of S_{A(f)}(α, N) at the N-schedule.
    Sum(SumArgs),
    /// sup_N |S_{A(f)}(p/q, N)| for every reduced p/q with q ≤ q-max.
    SupSweep(SupSweepArgs),
    /// Factoradic digit files.
    #[command(subcommand)]
    Factoradic(FactoradicCommand),
    /// The elements n + f(n)! for n ≤ N.
    Construct(ConstructArgs),
    /// Membership of α in E(f, a) from its digit prefix.
    Membership(MembershipArgs),
    /// Seeded samples from E(f, a).
    SampleE(SampleArgs),
    /// The theoretical bound and the digit-tail estimate.
    Bound(BoundArgs),
    /// ln #cylinders / ln j! for j ≤ jmax.
    Dimension(DimensionArgs),
    /// Tests μ(B) ≤ a|B|^s on random and aligned intervals.
    MassCheck(MassCheckArgs),
    /// g(i) = Σ_{f(j)≤i} ln(f(j)+1) − ε ln i!.
    CondIi(CondIiArgs),
    /// Ultimate period and collapse verdict for a coefficient file.
    Periodicity(PeriodicityArgs),
    /// Truncated power series on a sector grid.
    SectorEval(SectorArgs),
    /// Trace of S_{qℕ}(α, N).
    QnDemo(QnArgs),
    /// Runs every experiment listed in a JSON config file.
    Run(RunArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Growth {
    /// Growth function: id, n2, n3, pow2.
    #[arg(long = "f", default_value = "n2")]
    pub f: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Weights {
    /// Weight sequence: n2, n3, pow2.
    #[arg(long = "a", default_value = "n2")]
    pub a: String,
}

/// `α` as `p/q`, `file:PATH` (a digit file) or `sample:SEED` (drawn from
/// E(f, a) at `--depth`, stream `--stream`).
#[derive(Args, Debug, Clone, Serialize)]
pub struct AlphaArgs {
    #[arg(long)]
    pub alpha: String,
    /// Digit depth for sampling and for encoding rationals.
    #[arg(long, default_value_t = 32)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SumArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[command(flatten)]
    pub weights: Weights,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long = "N")]
    pub n: u64,
    /// `log` (1, 2, 5 per decade), `all`, `every:K`, or a comma list.
    #[arg(long, default_value = "log")]
    pub schedule: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SupSweepArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[arg(long, default_value_t = 20)]
    pub q_max: u64,
    #[arg(long = "N", default_value_t = 100_000)]
    pub n: u64,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum FactoradicCommand {
    /// Digits of a rational `p/q` to `--depth`.
    Encode {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 32)]
        depth: usize,
    },
    /// The enclosure of a digit file.
    Decode {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[arg(long = "N")]
    pub n: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MembershipArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[command(flatten)]
    pub weights: Weights,
    #[command(flatten)]
    pub alpha: AlphaArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[command(flatten)]
    pub weights: Weights,
    #[arg(long, default_value_t = 950)]
    pub depth: usize,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[command(flatten)]
    pub weights: Weights,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long, default_value = "all")]
    pub schedule: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[command(flatten)]
    pub weights: Weights,
    #[arg(long, default_value_t = 200)]
    pub jmax: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MassCheckArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[command(flatten)]
    pub weights: Weights,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 3)]
    pub i0: usize,
    /// Depths `i0..imax` are tested (`imax` excluded).
    #[arg(long, default_value_t = 9)]
    pub imax: usize,
    #[arg(long, default_value_t = 200)]
    pub samples_per_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub extra_depth: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CondIiArgs {
    #[command(flatten)]
    pub growth: Growth,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 10_000)]
    pub imax: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PeriodicityArgs {
    /// A `coeffs v1` file.
    #[arg(long)]
    pub coeffs: PathBuf,
    /// Defaults to what the prefix supports once `max-period` is set.
    #[arg(long)]
    pub max_pre: Option<usize>,
    /// Defaults to `min(100, len / 3)`.
    #[arg(long)]
    pub max_period: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SectorArgs {
    #[arg(long)]
    pub coeffs: PathBuf,
    #[arg(long)]
    pub theta1: f64,
    #[arg(long)]
    pub theta2: f64,
    /// Comma-separated radii in (0, 1).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub radii: Vec<f64>,
    #[arg(long, default_value_t = 9)]
    pub theta_samples: usize,
    /// Highest power kept; defaults to the whole file.
    #[arg(long)]
    pub terms: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QnArgs {
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long, default_value = "log")]
    pub schedule: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    pub config: PathBuf,
}
