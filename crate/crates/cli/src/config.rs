//! Command-line flags, the optional TOML config file and their merge.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Invalid configuration; exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(name = "liouville", version, about = "Radial and nonradial solutions of -Δu = μ|x|^α e^u on the unit disk")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Closed-form radial solutions, their mass and boundary slope.
    Radial,
    /// First weighted eigenvalue ν₁(λ) against (λ-2)/2.
    Nu1,
    /// Morse index by formula and by direct mode counting.
    Morse,
    /// Degeneracy curves γ_k: roots of ν₁(λ) + 4k²/(2+α)².
    Degeneracy,
    /// Continue the nonradial branch bifurcating at μ_k.
    Branch,
    /// Pohozaev residual and mass bounds for radial solutions.
    Pohozaev,
    /// Kernel and negative modes of the linearization on ℝ².
    Plane,
    /// Morse index and degenerate-mode count over a (λ, α) grid.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Radial => "radial",
            Command::Nu1 => "nu1",
            Command::Morse => "morse",
            Command::Degeneracy => "degeneracy",
            Command::Branch => "branch",
            Command::Pohozaev => "pohozaev",
            Command::Plane => "plane",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchChoice {
    Minimal,
    Blowup,
    #[default]
    Both,
}

/// Ranges are `x`, `a:b:count` (inclusive, evenly spaced), `a:b` (unit
/// stride) or comma-separated lists.
#[derive(Debug, Default, Args)]
pub struct Flags {
    #[arg(long, global = true, alias = "lambda-grid", allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true, alias = "mu-grid", allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Angular mode(s).
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Radial nodes (eigenvalue meshes) or cells (branch grids).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Nonradial harmonics kept by the branch solver.
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file with the same keys; flags win on conflict.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Use the discrete ν₁ instead of the closed form.
    #[arg(long, global = true)]
    pub numeric: bool,
    #[arg(long, global = true, value_enum)]
    pub branch: Option<BranchChoice>,
    /// Largest angular mode for direct Morse counting.
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<usize>,
    #[arg(long = "mu-stop", global = true)]
    pub mu_stop: Option<f64>,
    #[arg(long = "max-steps", global = true)]
    pub max_steps: Option<usize>,
    /// Initial arclength step.
    #[arg(long, global = true)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lambda: Option<RangeValue>,
    pub mu: Option<RangeValue>,
    pub alpha: Option<RangeValue>,
    pub k: Option<RangeValue>,
    pub n: Option<usize>,
    pub modes: Option<usize>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub format: Option<Format>,
    pub numeric: Option<bool>,
    pub branch: Option<BranchChoice>,
    pub k_max: Option<usize>,
    pub mu_stop: Option<f64>,
    pub max_steps: Option<usize>,
    pub step: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully merged configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub lambda: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub k: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub modes: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub numeric: bool,
    pub branch: BranchChoice,
    pub k_max: Option<usize>,
    pub mu_stop: Option<f64>,
    pub max_steps: Option<usize>,
    pub step: Option<f64>,
}

pub fn parse_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let bad = |why: &str| config_error(format!("bad range '{text}': {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let text = text.trim();
    let values = if text.contains(',') {
        text.split(',').map(num).collect::<anyhow::Result<Vec<_>>>()?
    } else {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.len() {
            1 => vec![num(parts[0])?],
            2 => {
                let (a, b) = (num(parts[0])?, num(parts[1])?);
                if b < a {
                    return Err(bad("end below start"));
                }
                let count = (b - a + 1e-9).floor() as usize + 1;
                (0..count).map(|i| a + i as f64).collect()
            }
            3 => {
                let (a, b) = (num(parts[0])?, num(parts[1])?);
                let count: usize = parts[2].trim().parse().map_err(|_| bad("count must be a positive integer"))?;
                match count {
                    0 => return Err(bad("count must be a positive integer")),
                    1 => vec![a],
                    _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
                }
            }
            _ => return Err(bad("expected x, a:b or a:b:count")),
        }
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad("empty or non-finite"));
    }
    Ok(values)
}

fn resolve(flag: &Option<String>, file: &Option<RangeValue>) -> anyhow::Result<Option<Vec<f64>>> {
    match (flag, file) {
        (Some(s), _) => parse_range(s).map(Some),
        (None, Some(RangeValue::Text(s))) => parse_range(s).map(Some),
        (None, Some(RangeValue::Number(x))) => Ok(Some(vec![*x])),
        (None, Some(RangeValue::List(v))) if !v.is_empty() => Ok(Some(v.clone())),
        (None, Some(RangeValue::List(_))) => Err(config_error("empty list in config")),
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> anyhow::Result<Self> {
        let f = &cli.flags;
        let file = match &f.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let k = resolve(&f.k, &file.k)?
            .map(|v| {
                v.into_iter()
                    .map(|x| {
                        if x >= 0.0 && x.fract() == 0.0 {
                            Ok(x as usize)
                        } else {
                            Err(config_error(format!("angular mode must be a nonnegative integer, got {x}")))
                        }
                    })
                    .collect::<anyhow::Result<Vec<usize>>>()
            })
            .transpose()?;
        Ok(Self {
            command: cli.command,
            lambda: resolve(&f.lambda, &file.lambda)?,
            mu: resolve(&f.mu, &file.mu)?,
            alpha: resolve(&f.alpha, &file.alpha)?,
            k,
            n: f.n.or(file.n),
            modes: f.modes.or(file.modes),
            format: f.format.or(file.format).unwrap_or_default(),
            out: f.out.clone().or(file.out),
            plot: f.plot.clone().or(file.plot),
            numeric: f.numeric || file.numeric.unwrap_or(false),
            branch: f.branch.or(file.branch).unwrap_or_default(),
            k_max: f.k_max.or(file.k_max),
            mu_stop: f.mu_stop.or(file.mu_stop),
            max_steps: f.max_steps.or(file.max_steps),
            step: f.step.or(file.step),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_range("1:4").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        let g = parse_range("0.1:1.9:20").unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(*g.last().unwrap(), 1.9);
        for bad in ["", "a:b", "1:0", "0:1:0", "1:2:3:4", "nan"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }
}
