//! Command-line flags, the flat config file, and their merge into a [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};
use twistlab_core::{LabConfig, ResolutionChoice, SurfaceParams};

/// Bad arguments or configuration; exits with status 3.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(
    name = "twistlab",
    version,
    about = "Admissibility, touching conics and small resolutions of a quartic surface family"
)]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the admissibility conditions and list the singular points.
    Validate,
    /// Search the tangent family for an admissible parameter set.
    SearchParams,
    /// Build one touching conic (orbit family when --alpha is given).
    Conic,
    /// Certify contact structure over a θ or α grid, or over every interval.
    Tangency,
    /// Tabulate the radius functions on a λ grid.
    Hscan,
    /// Count critical points and classify endpoint limits of the radius functions.
    Critical,
    /// Assign conic types, eliminate resolutions, and schedule components.
    Classify,
    /// Check monotonicity of the radial compactification map.
    Psi,
    /// Run the whole pipeline into one report.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Validate => "validate",
            Self::SearchParams => "search-params",
            Self::Conic => "conic",
            Self::Tangency => "tangency",
            Self::Hscan => "hscan",
            Self::Critical => "critical",
            Self::Classify => "classify",
            Self::Psi => "psi",
            Self::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Surface parameters.
    #[arg(long, global = true, value_name = "Q0,Q1,Q2,A,B", value_parser = parse_params)]
    pub params: Option<SurfaceParams>,
    /// JSON object or key=value lines with q0, q1, q2, a, b.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "params")]
    pub params_file: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, value_name = "ELL1,ELL2,ELL3")]
    pub resolution: Option<ResolutionChoice>,
    /// Critical-point scan grid; also the per-interval sample count of hscan.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Bisection tolerance of the critical-point scan.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat key=value file; flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Record wall-clock time per stage (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

fn parse_params(s: &str) -> Result<SurfaceParams, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    let [q0, q1, q2, a, b] = values[..] else {
        return Err(format!(
            "expected five comma-separated numbers, got {}",
            values.len()
        ));
    };
    SurfaceParams::new(q0, q1, q2, a, b).map_err(|e| e.to_string())
}

/// Where the surface parameters come from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum ParamsSource {
    Inline {
        values: SurfaceParams,
    },
    File {
        path: PathBuf,
        values: SurfaceParams,
    },
    /// Default: the first admissible member of the tangent family.
    Search,
}

impl ParamsSource {
    pub fn values(&self) -> Option<SurfaceParams> {
        match self {
            Self::Inline { values } | Self::File { values, .. } => Some(*values),
            Self::Search => None,
        }
    }
}

pub const DEFAULT_HSCAN_SAMPLES: usize = 64;

/// Everything that determines a run; embedded verbatim in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: ParamsSource,
    pub lambda: Option<f64>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub resolution: Option<String>,
    pub hscan_samples: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timings: bool,
    pub lab: LabConfig,
    #[serde(skip)]
    pub choice: Option<ResolutionChoice>,
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> anyhow::Result<Self> {
        let file = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let mut cfg = Self {
            params: ParamsSource::Search,
            lambda: None,
            theta: None,
            alpha: None,
            resolution: None,
            hscan_samples: DEFAULT_HSCAN_SAMPLES,
            format: Format::Json,
            out: None,
            timings: false,
            lab: LabConfig::default(),
            choice: None,
        };
        cfg.apply_file(&file)?;
        cfg.apply_flags(flags)?;
        cfg.lab.check().map_err(|e| usage(e.to_string()))?;
        if cfg.hscan_samples < 2 {
            return Err(usage("grid must be at least 2"));
        }
        Ok(cfg)
    }

    fn apply_file(&mut self, file: &BTreeMap<String, String>) -> anyhow::Result<()> {
        let lab_keys = lab_keys();
        let mut lab = match serde_json::to_value(self.lab)? {
            Value::Object(m) => m,
            _ => unreachable!("LabConfig serializes to an object"),
        };
        for (key, raw) in file {
            let bad = |e: &dyn fmt::Display| usage(format!("config key `{key}`: {e}"));
            match key.as_str() {
                "params" => {
                    self.params = ParamsSource::Inline {
                        values: parse_params(raw).map_err(|e| bad(&e))?,
                    }
                }
                "params_file" | "params-file" => {
                    let path = PathBuf::from(raw);
                    self.params = ParamsSource::File {
                        values: read_params_file(&path)?,
                        path,
                    };
                }
                "lambda" => self.lambda = Some(parse_num(raw).map_err(|e| bad(&e))?),
                "theta" => self.theta = Some(parse_num(raw).map_err(|e| bad(&e))?),
                "alpha" => self.alpha = Some(parse_num(raw).map_err(|e| bad(&e))?),
                "resolution" => {
                    let choice: ResolutionChoice = raw.parse().map_err(|e| bad(&e))?;
                    self.set_choice(choice);
                }
                "grid" => self.set_grid(raw.parse().map_err(|e| bad(&e))?),
                "tol" => self.lab.scan_tol = parse_num(raw).map_err(|e| bad(&e))?,
                "out" => self.out = Some(PathBuf::from(raw)),
                "format" => self.format = Format::from_str(raw, true).map_err(|e| bad(&e))?,
                "timings" => self.timings = raw.parse().map_err(|e| bad(&e))?,
                k if lab_keys.iter().any(|l| l == k) => {
                    let v: Value = serde_json::from_str(raw).map_err(|e| bad(&e))?;
                    lab.insert(k.to_string(), v);
                }
                _ => return Err(usage(format!("unknown config key `{key}`"))),
            }
        }
        let grid = self.lab.scan_grid;
        let tol = self.lab.scan_tol;
        self.lab = serde_json::from_value(Value::Object(lab))
            .map_err(|e| usage(format!("config file: {e}")))?;
        // `grid` and `tol` are aliases and take precedence over the long keys
        if file.contains_key("grid") {
            self.lab.scan_grid = grid;
        }
        if file.contains_key("tol") {
            self.lab.scan_tol = tol;
        }
        Ok(())
    }

    fn apply_flags(&mut self, flags: &Flags) -> anyhow::Result<()> {
        if let Some(values) = flags.params {
            self.params = ParamsSource::Inline { values };
        }
        if let Some(path) = &flags.params_file {
            self.params = ParamsSource::File {
                values: read_params_file(path)?,
                path: path.clone(),
            };
        }
        self.lambda = flags.lambda.or(self.lambda);
        self.theta = flags.theta.or(self.theta);
        self.alpha = flags.alpha.or(self.alpha);
        if let Some(choice) = flags.resolution {
            self.set_choice(choice);
        }
        if let Some(grid) = flags.grid {
            self.set_grid(grid);
        }
        if let Some(tol) = flags.tol {
            self.lab.scan_tol = tol;
        }
        if flags.out.is_some() {
            self.out.clone_from(&flags.out);
        }
        self.format = flags.format.unwrap_or(self.format);
        self.timings |= flags.timings;
        Ok(())
    }

    fn set_choice(&mut self, choice: ResolutionChoice) {
        self.choice = Some(choice);
        self.resolution = Some(choice.to_string());
    }

    fn set_grid(&mut self, grid: usize) {
        self.lab.scan_grid = grid;
        self.hscan_samples = grid;
    }
}

fn parse_num(raw: &str) -> Result<f64, std::num::ParseFloatError> {
    raw.trim().parse()
}

fn lab_keys() -> Vec<String> {
    match serde_json::to_value(LabConfig::default()) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
fn parse_key_values(text: &str, origin: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(usage(format!(
                "{}:{}: expected key=value",
                origin.display(),
                n + 1
            )));
        };
        let key = k.trim().to_string();
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(usage(format!(
                "{}:{}: duplicate key `{key}`",
                origin.display(),
                n + 1
            )));
        }
    }
    Ok(out)
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| usage(format!("{e:#}")))
}

fn read_config_file(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    parse_key_values(&read_text(path)?, path)
}

fn read_params_file(path: &Path) -> anyhow::Result<SurfaceParams> {
    let text = read_text(path)?;
    let values: Map<String, Value> = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else {
        let mut m = Map::new();
        for (k, v) in parse_key_values(&text, path)? {
            let x = parse_num(&v).map_err(|e| usage(format!("{}: `{k}`: {e}", path.display())))?;
            m.insert(k, Value::from(x));
        }
        m
    };
    let get = |k: &str| -> anyhow::Result<f64> {
        values
            .get(k)
            .and_then(Value::as_f64)
            .ok_or_else(|| usage(format!("{}: missing numeric `{k}`", path.display())))
    };
    if let Some(extra) = values
        .keys()
        .find(|k| !["q0", "q1", "q2", "a", "b"].contains(&k.as_str()))
    {
        return Err(usage(format!("{}: unknown key `{extra}`", path.display())));
    }
    SurfaceParams::new(get("q0")?, get("q1")?, get("q2")?, get("a")?, get("b")?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(args: &[&str]) -> Flags {
        let mut argv = vec!["twistlab"];
        argv.extend_from_slice(args);
        argv.push("psi");
        Cli::try_parse_from(argv).unwrap().flags
    }

    #[test]
    fn params_parse() {
        let p = parse_params("1,0.5,-2,1,3").unwrap();
        assert_eq!((p.q0, p.q1, p.q2, p.a, p.b), (1.0, 0.5, -2.0, 1.0, 3.0));
        assert!(parse_params("1,2,3").is_err());
        assert!(parse_params("1,2,3,0,1").is_err());
    }

    #[test]
    fn grid_and_tol_map_onto_lab() {
        let cfg = RunConfig::resolve(&flags(&["--grid", "128", "--tol", "1e-8"])).unwrap();
        assert_eq!(cfg.lab.scan_grid, 128);
        assert_eq!(cfg.hscan_samples, 128);
        assert_eq!(cfg.lab.scan_tol, 1e-8);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = std::env::temp_dir().join(format!("twistlab-args-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        fs::write(
            &path,
            "# run\nlambda = -0.5\ngrid = 64\nzero_threshold = 1e-5\n",
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let cfg = RunConfig::resolve(&flags(&["--config", p, "--lambda", "-0.25"])).unwrap();
        assert_eq!(cfg.lambda, Some(-0.25));
        assert_eq!(cfg.lab.scan_grid, 64);
        assert_eq!(cfg.lab.zero_threshold, 1e-5);
        fs::write(&path, "bogus = 1\n").unwrap();
        let err = RunConfig::resolve(&flags(&["--config", p])).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn params_file_formats() {
        let dir = std::env::temp_dir().join(format!("twistlab-params-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let json = dir.join("p.json");
        fs::write(&json, r#"{"q0": 1, "q1": 2, "q2": 3, "a": 1, "b": 1}"#).unwrap();
        let kv = dir.join("p.txt");
        fs::write(&kv, "q0=1\nq1=2\nq2=3\na=1\nb=1\n").unwrap();
        assert_eq!(
            read_params_file(&json).unwrap(),
            read_params_file(&kv).unwrap()
        );
        fs::write(&kv, "q0=1\n").unwrap();
        assert!(read_params_file(&kv).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn densities_are_checked() {
        let err = RunConfig::resolve(&flags(&["--grid", "4"])).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
    }
}
