//! Run configuration: flags, optional JSON config file, defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use bistair::{alpha_theta, Params1D, Params2D, Polygon};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BISTAIR_OUT_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Sizes of grids and trial batches, with their defaults.
pub const GRID_DEFAULTS: &[(&str, usize)] = &[
    ("horizontal", 201),
    ("vertical", 401),
    ("equality_points", 9),
    ("telescopic_trials", 10_000),
    ("merge_trials", 1000),
    ("psi_x", 101),
    ("psi_s", 401),
    ("field_x", 101),
    ("field_z", 201),
    ("saturation", 1000),
    ("chain_trials", 1000),
    ("tilts", 100),
    ("scan_x", 101),
    ("scan_z", 201),
    ("heatmap_x", 51),
    ("heatmap_z", 121),
    ("slices_x", 11),
    ("slices_z", 601),
];

pub const TOL_DEFAULTS: &[(&str, f64)] = &[
    ("equality", 1e-12),
    ("inequality", 1e-9),
    ("competitor", 1e-7),
];

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Single value, comma list, or `start:stop:step` range.
    #[arg(long)]
    pub theta: Option<String>,
    /// Jump coefficient; defaults to the normalised value for each theta.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fidelity coefficient (default 3).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Slope of the 1D forcing term (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Gradient of the 2D forcing term as `x,y` (default `1,0`).
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// Grid or batch size override, `key=value`; repeatable.
    #[arg(long, value_name = "KEY=N")]
    pub grid: Vec<String>,
    /// Tolerance override, `key=value`; repeatable.
    #[arg(long, value_name = "KEY=TOL")]
    pub tol: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file (directory for `export`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags take precedence over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Append a report-only scan of the pairwise bound over these thetas.
    #[arg(long, value_name = "THETAS")]
    pub explore_theta: Option<String>,
    /// Mark every check as report-only; needed for 2D runs with theta != 0.
    #[arg(long)]
    pub exploratory: bool,
    /// Number of samples for exported curves (default 1201).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaList {
    Values(Vec<f64>),
    Spec(String),
}

impl ThetaList {
    fn resolve(&self) -> Result<Vec<f64>> {
        match self {
            ThetaList::Values(v) => Ok(v.clone()),
            ThetaList::Spec(s) => parse_thetas(s),
        }
    }
}

/// Config file contents. A serialized [`RunConfig`] is itself a valid
/// config file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub theta: Option<ThetaList>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub m: Option<f64>,
    pub xi: Option<[f64; 2]>,
    #[serde(default)]
    pub grid: BTreeMap<String, usize>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub explore_theta: Option<ThetaList>,
    #[serde(default)]
    pub exploratory: bool,
    pub window: Option<Polygon>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            anyhow::anyhow!(
                "{}:{}:{}: at `{field}`: {inner}",
                path.display(),
                inner.line(),
                inner.column()
            )
        })
    }
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub theta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub beta: f64,
    pub m: f64,
    pub xi: [f64; 2],
    pub grid: BTreeMap<String, usize>,
    pub tol: BTreeMap<String, f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explore_theta: Option<Vec<f64>>,
    pub exploratory: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Polygon>,
    pub samples: usize,
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `0.5`, `0,0.25,0.5` or `0.1:0.9:0.1` (inclusive).
pub fn parse_thetas(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad number `{p}` in range `{s}`"))
            })
            .collect::<Result<_>>()?;
        let [lo, hi, step] = parts[..] else {
            bail!("range `{s}` must be start:stop:step")
        };
        ensure!(
            step > 0.0 && hi >= lo,
            "range `{s}` needs step > 0 and stop >= start"
        );
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        return Ok((0..n).map(|i| round12(lo + i as f64 * step)).collect());
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad theta `{p}`"))
        })
        .collect::<Result<_>>()?;
    ensure!(!v.is_empty(), "empty theta list");
    Ok(v)
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(String, T)>
where
    T::Err: std::fmt::Display,
{
    let (k, v) = s
        .split_once('=')
        .with_context(|| format!("expected key=value, got `{s}`"))?;
    let v = v
        .trim()
        .parse::<T>()
        .map_err(|e| anyhow::anyhow!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl RunConfig {
    /// Merges flags over the config file over defaults, then validates.
    pub fn resolve(command: &str, args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let theta = match (&args.theta, &file.theta) {
            (Some(s), _) => parse_thetas(s)?,
            (None, Some(t)) => t.resolve()?,
            (None, None) if command == "scan-theta" => parse_thetas("0.1:0.9:0.1")?,
            (None, None) => vec![0.0],
        };
        let xi = match &args.xi {
            Some(s) => {
                let v: Vec<f64> = s
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<_, _>>()?;
                let [a, b] = v[..] else {
                    bail!("--xi needs two components, got `{s}`")
                };
                [a, b]
            }
            None => file.xi.unwrap_or([1.0, 0.0]),
        };
        let mut grid: BTreeMap<String, usize> = GRID_DEFAULTS
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let flag_grid = args
            .grid
            .iter()
            .map(|s| parse_pair::<usize>(s))
            .collect::<Result<Vec<_>>>()?;
        for (k, v) in file.grid.into_iter().chain(flag_grid) {
            ensure!(
                grid.contains_key(&k),
                "unknown grid key `{k}`; known: {}",
                known(GRID_DEFAULTS.iter().map(|p| p.0))
            );
            ensure!(v >= 1, "grid `{k}` must be at least 1");
            grid.insert(k, v);
        }
        let mut tol: BTreeMap<String, f64> = TOL_DEFAULTS
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let flag_tol = args
            .tol
            .iter()
            .map(|s| parse_pair::<f64>(s))
            .collect::<Result<Vec<_>>>()?;
        for (k, v) in file.tol.into_iter().chain(flag_tol) {
            ensure!(
                tol.contains_key(&k),
                "unknown tolerance `{k}`; known: {}",
                known(TOL_DEFAULTS.iter().map(|p| p.0))
            );
            ensure!(
                v >= 0.0 && v.is_finite(),
                "tolerance `{k}` must be finite and non-negative"
            );
            tol.insert(k, v);
        }
        let explore_theta = match (&args.explore_theta, &file.explore_theta) {
            (Some(s), _) => Some(parse_thetas(s)?),
            (None, Some(t)) => Some(t.resolve()?),
            (None, None) => None,
        };
        let cfg = RunConfig {
            command: command.to_string(),
            theta,
            alpha: args.alpha.or(file.alpha),
            beta: args.beta.or(file.beta).unwrap_or(3.0),
            m: args.m.or(file.m).unwrap_or(1.0),
            xi,
            grid,
            tol,
            seed: args.seed.or(file.seed).unwrap_or(0),
            jobs: args.jobs.or(file.jobs),
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or_default(),
            explore_theta,
            exploratory: args.exploratory || file.exploratory,
            window: file.window,
            samples: args.samples.or(file.samples).unwrap_or(1201),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for &t in self.theta.iter().chain(self.explore_theta.iter().flatten()) {
            ensure!((0.0..1.0).contains(&t), "theta = {t} is outside [0, 1)");
        }
        for &t in &self.theta {
            self.params_1d(t)?;
            self.params_2d(t)?;
        }
        if let Some(j) = self.jobs {
            ensure!(j >= 1, "--jobs must be at least 1");
        }
        ensure!(self.samples >= 1, "--samples must be at least 1");
        Ok(())
    }

    pub fn grid(&self, key: &str) -> usize {
        self.grid[key]
    }

    pub fn tol(&self, key: &str) -> f64 {
        self.tol[key]
    }

    pub fn params_1d(&self, theta: f64) -> Result<Params1D> {
        Ok(Params1D::new(
            theta,
            self.alpha.unwrap_or_else(|| alpha_theta(theta)),
            self.beta,
            self.m,
        )?)
    }

    pub fn params_2d(&self, theta: f64) -> Result<Params2D> {
        Ok(Params2D::new(
            theta,
            self.alpha.unwrap_or_else(|| alpha_theta(theta)),
            self.beta,
            self.xi,
        )?)
    }

    /// Where a single-file result goes: `--out`, else the default output
    /// directory, else standard output (`None`).
    pub fn destination(&self) -> Option<PathBuf> {
        if let Some(p) = &self.out {
            if p.is_dir() {
                return Some(p.join(self.file_name()));
            }
            return Some(p.clone());
        }
        std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(self.file_name()))
    }

    /// Output directory for multi-file commands.
    pub fn directory(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(&self.command)))
            .unwrap_or_else(|| PathBuf::from(&self.command))
    }

    fn file_name(&self) -> String {
        format!("{}.{}", self.command, self.format.extension())
    }
}

fn known<'a>(keys: impl Iterator<Item = &'a str>) -> String {
    keys.collect::<Vec<_>>().join(", ")
}
