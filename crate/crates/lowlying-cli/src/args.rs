//! Flags for every subcommand. The same structs are serialized into report
//! headers, so each one derives both `clap` and `serde` traits.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lowlying::density::{FamilyKind, SymmetryClass};
use lowlying::extremal::AlphaSource;
use lowlying::petersson::{Aspect, Parity, Route, Weighting};
use lowlying::specfun::TestFunctionSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Parse a unit-variant enum by its serde name.
fn serde_name<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| format!("unknown value `{s}`"))
}

fn parse_aspect(s: &str) -> Result<Aspect, String> {
    serde_name(s)
}

fn parse_parity(s: &str) -> Result<Parity, String> {
    serde_name(s)
}

fn parse_route(s: &str) -> Result<Route, String> {
    serde_name(s)
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    serde_name(s)
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    serde_name(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "lowlying", version, about = "Low-lying zeros laboratory")]
pub struct Cli {
    /// Output format; `nonvanishing` defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Eigenform cache directory (overrides LOWLYING_CACHE_DIR).
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", content = "args", rename_all = "kebab-case")]
pub enum Command {
    /// Kloosterman sums S(m, n; c) against the Weil bound.
    Kloosterman(KloostermanArgs),
    /// Twisted sums S_n(c) by enumeration and closed form.
    TwistedSum(TwistedSumArgs),
    /// Weighted Bessel series against their main terms.
    BesselCheck(BesselCheckArgs),
    /// Hecke eigenvalues of level 1 eigenforms (cached bases).
    Eigen(EigenArgs),
    /// Both sides of the level 1 Petersson formula.
    PeterssonCheck(PeterssonCheckArgs),
    /// The prime level Petersson kernel (spectral side at level 11).
    PeterssonKernel(PeterssonKernelArgs),
    /// Family average of the one-level density statistic.
    Density(DensityArgs),
    /// Exponential sum of e(2 sqrt(p) / c) over primes p = a mod c.
    Hyp4(Hyp4Args),
    /// int phi W(G) from both sides.
    Predict(PredictArgs),
    /// Eigenphase histogram of Haar-random matrices.
    Rmt(RmtArgs),
    /// Optimal test function constant alpha by Nystrom.
    Extremal(ExtremalArgs),
    /// Nonvanishing bounds from alpha.
    Nonvanishing(NonvanishingArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kloosterman(_) => "kloosterman",
            Command::TwistedSum(_) => "twisted-sum",
            Command::BesselCheck(_) => "bessel-check",
            Command::Eigen(_) => "eigen",
            Command::PeterssonCheck(_) => "petersson-check",
            Command::PeterssonKernel(_) => "petersson-kernel",
            Command::Density(_) => "density",
            Command::Hyp4(_) => "hyp4",
            Command::Predict(_) => "predict",
            Command::Rmt(_) => "rmt",
            Command::Extremal(_) => "extremal",
            Command::Nonvanishing(_) => "nonvanishing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct KloostermanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub n: i64,
    #[arg(long)]
    pub c: u64,
    /// Emit every modulus from `c` to this one.
    #[arg(long = "c-max")]
    pub c_max: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TwistedSumArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub c: u64,
    #[arg(long = "c-max")]
    pub c_max: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BesselCheckArgs {
    /// Window scale(s), comma separated.
    #[arg(long = "L", value_name = "L", value_delimiter = ',', required = true)]
    pub l: Vec<f64>,
    /// Argument(s), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EigenArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 100)]
    pub nmax: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PeterssonCheckArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    /// Kloosterman cutoff; by default chosen from the certified tail bound.
    #[arg(long)]
    pub cmax: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PeterssonKernelArgs {
    #[arg(long = "N", value_name = "N")]
    pub level: u64,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    /// Kloosterman cutoff (default 2000 N).
    #[arg(long)]
    pub cmax: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DensityArgs {
    #[arg(long, value_parser = parse_aspect)]
    pub aspect: Aspect,
    #[arg(long, value_parser = parse_parity, default_value = "all")]
    pub parity: Parity,
    #[arg(long)]
    pub phi: TestFunctionSpec,
    /// Weight-aspect size.
    #[arg(long = "K", value_name = "K")]
    pub k_big: Option<u64>,
    /// Prime level for the level aspect.
    #[arg(long = "N", value_name = "N")]
    pub level: Option<u64>,
    #[arg(long, value_parser = parse_route, default_value = "kernel")]
    pub route: Route,
    #[arg(long, value_parser = parse_family, default_value = "gl2")]
    pub family: FamilyKind,
    #[arg(long, value_parser = parse_weighting, default_value = "harmonic")]
    pub weighting: Weighting,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Hyp4Args {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub c: u64,
    #[arg(long = "X", value_name = "X")]
    pub x_max: f64,
    /// Weight each prime by `log p`.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub class: SymmetryClass,
    #[arg(long)]
    pub phi: TestFunctionSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RmtGroup {
    SoEven,
    SoOdd,
    Usp,
    /// Equal mixture of the two orthogonal groups.
    O,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RmtArgs {
    #[arg(long, value_enum)]
    pub group: RmtGroup,
    #[arg(long = "N", value_name = "N")]
    pub rank: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Bin width.
    #[arg(long, default_value_t = 0.1)]
    pub bins: f64,
    #[arg(long, default_value_t = 3.0)]
    pub cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ExtremalArgs {
    #[arg(long)]
    pub class: SymmetryClass,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Support radius of phi_hat (default 2, or 4/3 for Sp).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Also solve at 2, 4 and 8 times the grid and extrapolate.
    #[arg(long)]
    pub sweep: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonvanishingClass {
    SoEven,
    SoOdd,
    O,
    Sp,
    All,
}

/// `auto`, a source name, or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaChoice {
    Auto,
    Source(AlphaSource),
    Value(f64),
}

impl FromStr for AlphaChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(AlphaChoice::Auto);
        }
        if let Ok(src) = serde_name::<AlphaSource>(s) {
            return Ok(AlphaChoice::Source(src));
        }
        s.parse::<f64>()
            .map(AlphaChoice::Value)
            .map_err(|_| format!("expected auto, sinc2, fredholm, closed-form or a number, got `{s}`"))
    }
}

impl fmt::Display for AlphaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaChoice::Auto => f.write_str("auto"),
            AlphaChoice::Source(s) => f.write_str(serde_json::to_value(s).unwrap().as_str().unwrap_or("?")),
            AlphaChoice::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct NonvanishingArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub class: NonvanishingClass,
    #[arg(long, default_value = "auto")]
    pub alpha: AlphaChoice,
}
