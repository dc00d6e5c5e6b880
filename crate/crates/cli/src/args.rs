use clap::{Args, Parser, Subcommand, ValueEnum};
use holed_torus::series::Profile;
use holed_torus::{Root, Slope};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "holed-torus",
    version,
    about = "Length-series checks on the one-holed torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format. CSV is available for `spectrum` only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for enumeration and summation.
    #[arg(
        long,
        global = true,
        env = "HOLED_TORUS_THREADS",
        default_value_t = 1,
        value_parser = clap::value_parser!(u32).range(1..)
    )]
    pub threads: u32,

    /// Absolute tolerance for identity checks.
    #[arg(long, global = true, env = "HOLED_TORUS_TOL", default_value_t = 1e-6, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Sum the arctan series (and the McShane series at a cusp) and compare with their targets.
    Verify {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 40.0)]
        cutoff: f64,
    },
    /// List simple geodesics below a length cutoff, with counting statistics.
    Spectrum {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 30.0)]
        cutoff: f64,
        /// Thresholds for the counting function; defaults to eight equal steps up to the cutoff.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
    },
    /// Sum the angles along the orbit of `gamma'` under twists about `gamma`.
    TwistOrbit {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "1/1")]
        gamma: Slope,
        #[arg(long, default_value = "1/0")]
        gamma_prime: Slope,
        /// Orbit half-width: twists `-n..n` contribute.
        #[arg(long, default_value_t = 20)]
        n: u32,
    },
    /// Evaluate a test function over the spectrum of a point with a short systole.
    Degenerate {
        /// Length of the systole `1/0`.
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        ldelta: f64,
        #[arg(long, default_value = "sech-linear")]
        f: Profile,
        /// Allowed gap between the once-meeting orbit sum of `sech(l/2)` and its limit.
        #[arg(long, default_value_t = 1e-3, value_parser = positive)]
        limit_tol: f64,
    },
    /// Sum the twist derivatives of all intersection angles.
    Variation {
        #[command(flatten)]
        point: PointArgs,
        /// Curve to twist along.
        #[arg(long, default_value = "1/0")]
        mu: Slope,
        /// Cutoff on `l_alpha + l_beta`.
        #[arg(long, default_value_t = 30.0)]
        cutoff: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::Spectrum { .. } => "spectrum",
            Command::TwistOrbit { .. } => "twist-orbit",
            Command::Degenerate { .. } => "degenerate",
            Command::Variation { .. } => "variation",
        }
    }
}

/// A surface point: explicit traces or a preset. Without either, `x1 = x2 = 3`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PointArgs {
    #[arg(long, conflicts_with = "preset")]
    pub x1: Option<f64>,
    #[arg(long, conflicts_with = "preset")]
    pub x2: Option<f64>,
    /// Boundary length; 0 is a cusp.
    #[arg(long, default_value_t = 0.0)]
    pub ldelta: f64,
    #[arg(long, value_enum, default_value_t = RootArg::Smaller)]
    pub root: RootArg,
    /// `hexagonal`, `near-cusp:EPS` or `random`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Seed for `--preset random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootArg {
    Smaller,
    Larger,
}

impl From<RootArg> for Root {
    fn from(r: RootArg) -> Root {
        match r {
            RootArg::Smaller => Root::Smaller,
            RootArg::Larger => Root::Larger,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}
