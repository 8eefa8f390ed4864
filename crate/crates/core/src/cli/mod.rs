//! The `advbounds` command line.
//!
//! Every command writes CSV: a few `#`-prefixed header lines (tool version,
//! resolved configuration, seed) followed by an RFC-4180 table. [`run`] executes
//! a full invocation in-process and returns the exit code and captured output.
//!
//! Exit codes: 0 success, 1 property violation, 2 precondition or configuration
//! error, 3 unsupported capability.

mod commands;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::norm::NormOrder;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "advbounds",
    version,
    about = "Lower bounds on adversarial susceptibility",
    args_override_self = true
)]
pub struct Cli {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a closed-form bound on an ε grid.
    Bound(BoundArgs),
    /// Compare a bound with the exact expansion and a Monte Carlo estimate.
    Expand(ExpandArgs),
    /// Train a synthetic classifier and trace its susceptibility curve under PGD.
    Curve(CurveArgs),
    /// Check the block-rescaling norm laws on random image pairs.
    RescaleCheck(RescaleArgs),
}

const SUBCOMMANDS: [&str; 4] = ["bound", "expand", "curve", "rescale-check"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// Half-sphere geodesic expansion.
    HalfSphere,
    /// Sphere susceptibility with density bound V_c.
    Sphere,
    /// Cube susceptibility with density bound U_c (see --form).
    Cube,
    /// Tight cube expansion of a set of volume --vol.
    CubeExpansion,
    /// Simplified cube expansion (see --variant).
    CubeSimple,
    Sparse,
    SmallP,
    SmallPTight,
    Existence,
    RescaleTransfer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Tight,
    SimpleMills,
    SimpleAsPrinted,
    LinfRefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Mills,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Up,
    Down,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "2")]
    pub p: NormOrder,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Comma list `a,b,c` or inclusive linspace `lo:hi:count`.
    #[arg(long)]
    pub eps_grid: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub uc: f64,
    #[arg(long, default_value_t = 1.0)]
    pub vc: f64,
    #[arg(long, default_value_t = 0.5)]
    pub fc: f64,
    #[arg(long, default_value_t = 0.5)]
    pub vol: f64,
    #[arg(long, value_enum, default_value = "tight")]
    pub form: FormArg,
    #[arg(long, value_enum, default_value = "mills")]
    pub variant: VariantArg,
    #[arg(long)]
    pub support_vol: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub b: u32,
    #[arg(long, value_enum, default_value = "up")]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = 0.5)]
    pub p_fool: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetArg {
    SphereHalf,
    Slab,
    Subcube,
    GaussianHalfspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpandBound {
    Tight,
    Mills,
    AsPrinted,
}

#[derive(Debug, Clone, Args)]
pub struct ExpandArgs {
    #[arg(long, value_enum)]
    pub set: SetArg,
    #[arg(long)]
    pub n: usize,
    /// `geodesic`, `inf`, `0` or a number p. Defaults to geodesic on the sphere and ℓ2 elsewhere.
    #[arg(long)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub eps_grid: String,
    /// Monte Carlo sample count; 0 skips the estimate.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
    /// Slab width, sub-cube side, or half-space Gaussian mass.
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// Which cube bound to compare against (slab and sub-cube).
    #[arg(long, value_enum, default_value = "tight")]
    pub variant: ExpandBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Linear,
    Mlp,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    #[arg(long, default_value_t = 0.1)]
    pub spread: f64,
    #[arg(long, default_value_t = 500)]
    pub train_count: usize,
    #[arg(long, default_value_t = 500)]
    pub test_count: usize,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    #[arg(long, default_value = "2")]
    pub norm: NormOrder,
    #[arg(long)]
    pub eps_grid: String,
    #[arg(long, default_value_t = crate::attack::DEFAULT_STEPS)]
    pub steps: usize,
    /// Defaults to 2.5·ε/steps.
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "linear")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 16)]
    pub hidden: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RescaleArgs {
    #[arg(long, default_value_t = 2)]
    pub b: usize,
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub height: usize,
    #[arg(long, default_value_t = 8)]
    pub width: usize,
    /// Test hook: scale one upsampled block wrongly so the checker must fail.
    #[arg(long)]
    pub inject_fault: bool,
}

/// Result of an in-process invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    /// The CSV table without its `#` header lines.
    pub fn body(&self) -> String {
        self.stdout
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect()
    }
}

pub(crate) fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capability(_) => EXIT_CAPABILITY,
        _ => EXIT_CONFIG,
    }
}

/// Parses `a,b,c` or an inclusive linspace `lo:hi:count`.
pub fn parse_eps_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Invalid(format!("cannot parse eps grid {s:?}"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let grid = match parts.as_slice() {
        [lo, hi, count] => {
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let count: usize = count.parse().map_err(|_| bad())?;
            match count {
                0 => return Err(bad()),
                1 => vec![lo],
                _ => (0..count)
                    .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                    .collect(),
            }
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?,
        _ => return Err(bad()),
    };
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

/// Turns `key = value` lines into `--key value` arguments. `true` and `false`
/// values toggle boolean flags.
fn config_args(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("config line {}: expected key=value", i + 1)))?;
        let key = format!("--{}", k.trim().trim_start_matches("--").replace('_', "-"));
        match v.trim() {
            "true" => out.push(key.into()),
            "false" => {}
            v => {
                out.push(key.into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Inserts config-file arguments right after the subcommand so that later,
/// explicit flags override them.
fn merge_config(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Io(format!("reading config {}: {e}", path.display())))?;
    let extra = config_args(&text)?;
    let at = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map_or(args.len(), |i| i + 1);
    args.splice(at..at, extra);
    Ok(args)
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let fail = |code: i32, msg: String| Outcome {
        code,
        stdout: String::new(),
        stderr: msg,
    };
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => return fail(EXIT_CONFIG, format!("error: {e}\n")),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                fail(code, text)
            };
        }
    };
    let executed = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::execute(&cli.command)),
            Err(e) => return fail(EXIT_CONFIG, format!("error: thread pool: {e}\n")),
        },
        None => commands::execute(&cli.command),
    };
    let report = match executed {
        Ok(r) => r,
        Err(e) => return fail(exit_code(&e), format!("error: {e}\n")),
    };
    let mut outcome = Outcome {
        code: report.code,
        stdout: report.csv,
        stderr: report.diagnostics,
    };
    if let Some(path) = &cli.out {
        if let Err(e) = fs::write(path, &outcome.stdout) {
            return fail(
                EXIT_CONFIG,
                format!("error: writing {}: {e}\n", path.display()),
            );
        }
        outcome.stdout.clear();
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_eps_grid("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(
            parse_eps_grid("0:1:5").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_eps_grid("2:9:1").unwrap(), vec![2.0]);
        assert!(parse_eps_grid("0:1").is_err());
        assert!(parse_eps_grid("a,b").is_err());
        assert!(parse_eps_grid("0:1:0").is_err());
    }

    #[test]
    fn config_lines_become_flags() {
        let args =
            config_args("# comment\nn = 10\neps_grid=0,1\ninject-fault=true\nx=false\n").unwrap();
        let args: Vec<String> = args.into_iter().map(|a| a.into_string().unwrap()).collect();
        assert_eq!(args, ["--n", "10", "--eps-grid", "0,1", "--inject-fault"]);
        assert!(config_args("novalue").is_err());
    }

    #[test]
    fn help_and_version_exit_zero() {
        assert_eq!(run(["advbounds", "--help"]).code, EXIT_OK);
        let v = run(["advbounds", "--version"]);
        assert_eq!(v.code, EXIT_OK);
        assert!(v.stdout.contains(env!("CARGO_PKG_VERSION")));
    }

    #[test]
    fn unknown_flag_is_config_error() {
        assert_eq!(run(["advbounds", "bound", "--bogus"]).code, EXIT_CONFIG);
    }
}
