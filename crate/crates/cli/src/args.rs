use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "nhbraid", version, about = "Eigenvalue braids and exceptional points of a three-band non-Hermitian family")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Track bands around a loop and read off the braid word.
    BraidScan(BraidScan),
    /// Trace exceptional points over alpha; report orders and charges.
    EpAtlas(EpAtlas),
    /// Solve for the alpha where the U branch crosses the loop.
    Transition(Transition),
    /// Build the Hermitian dilation and check the embedding.
    DilateVerify(DilateVerify),
    /// Forward population ratios and invert them back to eigenvalues.
    ReconstructDemo(ReconstructDemo),
}

/// `x,y`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pair(pub f64, pub f64);

/// `alpha:k1,k2`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderAt {
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
}

/// `alpha:k1,k2:radius`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargeAt {
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
    pub radius: f64,
}

/// `i,j` band labels
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bands(pub usize, pub usize);

fn num(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: '{s}'"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: '{s}'"))
    }
}

fn pair(s: &str) -> Result<Pair, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected x,y, got '{s}'"))?;
    Ok(Pair(num(a)?, num(b)?))
}

fn order_at(s: &str) -> Result<OrderAt, String> {
    let (a, k) = s.split_once(':').ok_or_else(|| format!("expected alpha:k1,k2, got '{s}'"))?;
    let k = pair(k)?;
    Ok(OrderAt { alpha: num(a)?, k1: k.0, k2: k.1 })
}

fn charge_at(s: &str) -> Result<ChargeAt, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, k, r] = parts[..] else { return Err(format!("expected alpha:k1,k2:r, got '{s}'")) };
    let k = pair(k)?;
    Ok(ChargeAt { alpha: num(a)?, k1: k.0, k2: k.1, radius: num(r)? })
}

fn bands(s: &str) -> Result<Bands, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected i,j, got '{s}'"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("not a band label: '{x}'"));
    Ok(Bands(p(a)?, p(b)?))
}

#[derive(Debug, Args, Serialize)]
pub struct BraidScan {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.4, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, value_parser = pair, default_value = "0,0", allow_hyphen_values = true)]
    pub center: Pair,
    #[arg(long, default_value_t = 256)]
    pub n_samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct EpAtlas {
    #[arg(long, value_parser = pair, default_value = "0,3.2", allow_hyphen_values = true)]
    pub alpha_range: Pair,
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    pub step: f64,
    /// Order report at `alpha:k1,k2` (repeatable).
    #[arg(long, value_parser = order_at, allow_hyphen_values = true)]
    pub order_at: Vec<OrderAt>,
    /// Discriminant charge at `alpha:k1,k2:r` (repeatable).
    #[arg(long, value_parser = charge_at, allow_hyphen_values = true)]
    pub charge_at: Vec<ChargeAt>,
}

#[derive(Debug, Args, Serialize)]
pub struct Transition {
    #[arg(long, default_value_t = 1.4, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    pub step: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DilateVerify {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    pub k: Pair,
    /// Final time.
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t: f64,
    /// Scalar initial metric; doubled until the margin holds.
    #[arg(long, default_value_t = 1.3, allow_hyphen_values = true)]
    pub m0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ReconstructDemo {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.4, allow_hyphen_values = true)]
    pub r: f64,
    /// Relative Gaussian noise on each ratio.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub noise: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Measured bands `i,j`; default picks the best conditioned pair.
    #[arg(long, value_parser = bands)]
    pub pair: Option<Bands>,
}
