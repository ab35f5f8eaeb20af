//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 input
//! parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::asymptotics;
use crate::channel::{sample_channel, ChannelRealization, FadingConfig};
use crate::montecarlo::{self, EnsembleConfig};
use crate::schemes::{self, Scheme, SecondHop};
use crate::validation;
use crate::{Error, RateUnit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "relay-secrecy",
    version,
    about = "Secrecy rate regions for relay beamforming to two users"
)]
pub struct Cli {
    /// Logarithm base of every reported rate (default: bits).
    #[arg(long, global = true)]
    pub unit: Option<RateUnit>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a channel realization and write it as JSON.
    Sample(SampleArgs),
    /// Compute rate regions and write them as CSV.
    Region(RegionArgs),
    /// Run the invariant suite on one realization.
    Validate(ValidateArgs),
    /// Sweep relay power and write asymptotic diagnostics as CSV.
    Asymptotics(AsymptoticsArgs),
    /// Run a seeded ensemble from a JSON config and write a JSON summary.
    Montecarlo(MontecarloArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// sigma_h = sigma_z = 2, P_r = 1, M = 5
    Fig2,
    /// sigma_h = sigma_z = 2, P_r = 1, M = 15
    Fig3,
    /// sigma_h = sigma_z = 2, P_r = 100, M = 3
    Fig4,
    /// sigma_h = sigma_z = 2, P_r = 0.001, M = 10
    Fig5,
}

impl Preset {
    /// `(m, p_r)`; every preset uses `sigma_h = sigma_z = 2`.
    pub fn params(self) -> (usize, f64) {
        match self {
            Preset::Fig2 => (5, 1.0),
            Preset::Fig3 => (15, 1.0),
            Preset::Fig4 => (3, 100.0),
            Preset::Fig5 => (10, 0.001),
        }
    }
}

const PRESET_SIGMA: f64 = 2.0;

/// Where the channel comes from: a realization file, or the fading sampler.
#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Realization JSON written by `sample`.
    #[arg(long, conflicts_with_all = ["seed", "draw", "m", "sigma_h", "sigma_z", "sigma_g", "n0"])]
    pub input: Option<PathBuf>,
    /// Figure configuration supplying M, sigma_h, sigma_z and P_r.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Ensemble seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Draw index within the seeded ensemble.
    #[arg(long)]
    pub draw: Option<u64>,
    /// Number of relays.
    #[arg(long)]
    pub m: Option<usize>,
    /// Standard deviation of the relay-to-D gains (default 2).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_h: Option<f64>,
    /// Standard deviation of the relay-to-E gains (default 2).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_z: Option<f64>,
    /// Standard deviation of the source-to-relay gains (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_g: Option<f64>,
    /// Noise variance at the destinations (and relays).
    #[arg(long, allow_negative_numbers = true)]
    pub n0: Option<f64>,
}

impl ChannelArgs {
    fn fading(&self) -> FadingConfig {
        let (m, _) = self.preset.map(Preset::params).unwrap_or((5, 1.0));
        let sigma = if self.preset.is_some() { PRESET_SIGMA } else { 2.0 };
        FadingConfig {
            m: self.m.unwrap_or(m),
            sigma_g: self.sigma_g.unwrap_or(1.0),
            sigma_h: self.sigma_h.unwrap_or(sigma),
            sigma_z: self.sigma_z.unwrap_or(sigma),
            n0: self.n0.unwrap_or(1.0),
            seed: self.seed.unwrap_or(0),
        }
    }

    fn realization(&self) -> Result<ChannelRealization, CliError> {
        match &self.input {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                ChannelRealization::from_json(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
            }
            None => Ok(sample_channel(&self.fading(), self.draw.unwrap_or(0))?),
        }
    }

    fn p_r(&self, explicit: Option<f64>) -> f64 {
        explicit.unwrap_or_else(|| self.preset.map(|p| p.params().1).unwrap_or(1.0))
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Total relay power P_r (default 1, or the preset's).
    #[arg(long, allow_negative_numbers = true)]
    pub pr: Option<f64>,
    /// Comma-separated schemes (default: all six).
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<Scheme>>,
    /// Number of evenly spaced power splits in [0, 1].
    #[arg(long, default_value_t = schemes::DEFAULT_ALPHA_POINTS)]
    pub alpha_points: usize,
    /// Clip every region to the first-hop sum-rate triangle with this source power.
    #[arg(long, allow_negative_numbers = true)]
    pub cap_first_hop: Option<f64>,
    /// Mark convex-hull (time-sharing) vertices instead of the Pareto frontier.
    #[arg(long)]
    pub convex_hull: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Total relay power P_r (default 1, or the preset's).
    #[arg(long, allow_negative_numbers = true)]
    pub pr: Option<f64>,
    /// Number of evenly spaced power splits in [0, 1].
    #[arg(long, default_value_t = schemes::DEFAULT_ALPHA_POINTS)]
    pub alpha_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    High,
    Low,
    LargeM,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Which limit to sweep towards.
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// A single relay power.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "pr_grid")]
    pub pr: Option<f64>,
    /// Comma-separated relay powers.
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    pub pr_grid: Option<Vec<f64>>,
    /// Fraction of relay power given to D's stream.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    /// Ensemble configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write one region CSV per draw into this directory.
    #[arg(long)]
    pub draw_dir: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Parse(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => CliError::Parse(msg),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(e.to_string())),
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            EXIT_PARSE
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let unit = cli.unit.unwrap_or_default();
    match &cli.command {
        Command::Sample(args) => {
            let r = args.channel.realization()?;
            emit(args.out.as_deref(), &r.to_json())?;
        }
        Command::Region(args) => {
            let r = args.channel.realization()?;
            let link = SecondHop::from(&r);
            let p_r = args.channel.p_r(args.pr);
            let grid = schemes::uniform_alpha_grid(args.alpha_points)?;
            let selected = args.schemes.clone().unwrap_or_else(|| Scheme::ALL.to_vec());
            let cap = match args.cap_first_hop {
                Some(p_s) => Some(r.first_hop_capacity(p_s, unit)?),
                None => None,
            };
            let mut regions = Vec::with_capacity(selected.len());
            for scheme in selected {
                let mut region = schemes::build_region(scheme, &link, p_r, &grid, unit)?;
                if let Some(c1) = cap {
                    region = schemes::apply_first_hop_cap(&region, c1)?;
                }
                regions.push(region);
            }
            emit(args.out.as_deref(), &schemes::region_csv(&regions, args.convex_hull))?;
        }
        Command::Validate(args) => {
            let r = args.channel.realization()?;
            let p_r = args.channel.p_r(args.pr);
            let grid = schemes::uniform_alpha_grid(args.alpha_points)?;
            let outcomes = validation::run_suite(&r, p_r, &grid, unit)?;
            let mut report = String::new();
            for o in &outcomes {
                report.push_str(&o.to_string());
                report.push('\n');
            }
            emit(None, &report)?;
            if !validation::all_passed(&outcomes) {
                return Ok(EXIT_VALIDATION);
            }
        }
        Command::Asymptotics(args) => {
            let r = args.channel.realization()?;
            let link = SecondHop::from(&r);
            let powers = match (&args.pr_grid, args.pr) {
                (Some(grid), _) => grid.clone(),
                (None, Some(p)) => vec![p],
                (None, None) => match args.regime {
                    RegimeArg::High => vec![1e2, 1e3, 1e4, 1e5, 1e6],
                    RegimeArg::Low => vec![1e-2, 1e-3, 1e-4],
                    RegimeArg::LargeM => vec![args.channel.p_r(None)],
                },
            };
            let report = match args.regime {
                RegimeArg::High => asymptotics::high_snr_report(&link, args.alpha, &powers, unit)?,
                RegimeArg::Low => asymptotics::low_snr_report(&link, args.alpha, &powers, unit)?,
                RegimeArg::LargeM => asymptotics::large_m_report(&link, args.alpha, &powers)?,
            };
            emit(args.out.as_deref(), &report.to_csv())?;
        }
        Command::Montecarlo(args) => {
            let text = std::fs::read_to_string(&args.config)
                .map_err(|e| CliError::Parse(format!("{}: {e}", args.config.display())))?;
            let mut cfg = EnsembleConfig::from_json(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", args.config.display())))?;
            if let Some(unit) = cli.unit {
                cfg.unit = unit;
            }
            let summary = match &args.draw_dir {
                Some(dir) => montecarlo::run_ensemble_to_dir(&cfg, dir)?,
                None => montecarlo::run_ensemble(&cfg)?,
            };
            emit(args.out.as_deref(), &summary.to_json())?;
        }
    }
    Ok(EXIT_OK)
}
