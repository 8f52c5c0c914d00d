//! Run configuration: defaults, then a `key=value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use jacobi_core::kelley::BoundParams;
use jacobi_core::{JacobiFamily, SpectralWindow};
use serde_json::{json, Value};

/// Bad input: exit code 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Number of λ grid points.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Truncation size; the stability check also runs at 2K.
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    /// Largest index any scan or backward run may reach.
    #[arg(long = "s-cap", global = true)]
    pub s_cap: Option<usize>,
    /// Depth of trapping runs, eigenvectors and solution dumps.
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    /// Start index N of the Riccati runs.
    #[arg(long = "n0", global = true)]
    pub n0: Option<usize>,
    #[arg(long = "a-plus", global = true, allow_negative_numbers = true)]
    pub a_plus: Option<f64>,
    #[arg(long = "a-minus", global = true, allow_negative_numbers = true)]
    pub a_minus: Option<f64>,
    #[arg(long = "b-minus", global = true, allow_negative_numbers = true)]
    pub b_minus: Option<f64>,
    #[arg(long = "b-plus", global = true, allow_negative_numbers = true)]
    pub b_plus: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key=value` file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
    pub grid: usize,
    pub k: usize,
    pub s_cap: usize,
    pub n_max: usize,
    pub n0: Option<usize>,
    pub a_plus: Option<f64>,
    pub a_minus: Option<f64>,
    pub b_minus: Option<f64>,
    pub b_plus: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            c1: 2.0,
            c2: 1.0,
            alpha: 0.4,
            lo: 1.0,
            hi: 2.0,
            grid: 9,
            k: 4000,
            s_cap: 4_000_000,
            n_max: 100_000,
            n0: None,
            a_plus: None,
            a_minus: None,
            b_minus: None,
            b_plus: None,
            format: Format::Csv,
            out: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> anyhow::Result<T> {
    v.parse()
        .map_err(|_| invalid(format!("config key {key}: cannot parse {v:?}")))
}

impl RunConfig {
    pub fn load(o: &Overrides) -> anyhow::Result<Self> {
        let mut c = Self::default();
        if let Some(path) = &o.config {
            c.apply_file(path)?;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = o.$f { c.$f = v; } )* };
        }
        take!(c1, c2, alpha, lo, hi, grid, k, s_cap, n_max, format);
        macro_rules! take_opt {
            ($($f:ident),*) => { $( if o.$f.is_some() { c.$f = o.$f; } )* };
        }
        take_opt!(n0, a_plus, a_minus, b_minus, b_plus);
        if o.out.is_some() {
            c.out = o.out.clone();
        }
        c.validate()?;
        Ok(c)
    }

    fn apply_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                invalid(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, v: &str) -> anyhow::Result<()> {
        let opt = |v: &str| -> anyhow::Result<Option<f64>> {
            if v.is_empty() || v == "default" {
                Ok(None)
            } else {
                Ok(Some(parse(key, v)?))
            }
        };
        match key.replace('-', "_").as_str() {
            "c1" => self.c1 = parse(key, v)?,
            "c2" => self.c2 = parse(key, v)?,
            "alpha" => self.alpha = parse(key, v)?,
            "lo" => self.lo = parse(key, v)?,
            "hi" => self.hi = parse(key, v)?,
            "grid" => self.grid = parse(key, v)?,
            "K" | "k" => self.k = parse(key, v)?,
            "s_cap" => self.s_cap = parse(key, v)?,
            "n_max" => self.n_max = parse(key, v)?,
            "n0" => {
                self.n0 = if v.is_empty() || v == "default" {
                    None
                } else {
                    Some(parse(key, v)?)
                }
            }
            "a_plus" => self.a_plus = opt(v)?,
            "a_minus" => self.a_minus = opt(v)?,
            "b_minus" => self.b_minus = opt(v)?,
            "b_plus" => self.b_plus = opt(v)?,
            "format" => {
                self.format = Format::from_str(v, true)
                    .map_err(|_| invalid(format!("config key format: unknown {v:?}")))?
            }
            "out" => {
                self.out = if v.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(v))
                }
            }
            _ => return Err(invalid(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Re-runs every constructor check so bad values fail before any work.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.family()?;
        self.window()?;
        self.bounds()?;
        if self.grid < 1 {
            return Err(invalid("grid must be >= 1"));
        }
        if self.k < 2 {
            return Err(invalid("K must be >= 2"));
        }
        if self.n_max < 2 {
            return Err(invalid("n_max must be >= 2"));
        }
        if self.s_cap < 4 {
            return Err(invalid("s_cap must be >= 4"));
        }
        Ok(())
    }

    pub fn family(&self) -> anyhow::Result<JacobiFamily> {
        JacobiFamily::new(self.c1, self.c2, self.alpha).map_err(|e| invalid(e.to_string()))
    }

    pub fn window(&self) -> anyhow::Result<SpectralWindow> {
        SpectralWindow::new(self.lo, self.hi).map_err(|e| invalid(e.to_string()))
    }

    pub fn lambdas(&self) -> anyhow::Result<Vec<f64>> {
        Ok(self.window()?.grid(self.grid))
    }

    pub fn bounds(&self) -> anyhow::Result<BoundParams> {
        let fam = self.family()?;
        let d = BoundParams::default_for(&fam);
        BoundParams::new(
            fam.p(),
            self.a_plus.unwrap_or(d.a_plus()),
            self.a_minus.unwrap_or(d.a_minus()),
            self.b_minus.unwrap_or(d.b_minus()),
            self.b_plus.unwrap_or(d.b_plus()),
        )
        .map_err(|e| invalid(format!("bounds: {e}")))
    }

    /// Resolved values as `key=value` lines, loadable with `--config`.
    pub fn to_lines(&self) -> anyhow::Result<String> {
        let mut s = String::new();
        for (k, v) in self.entries()? {
            let v = match v {
                Value::String(t) => t,
                Value::Null => String::new(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k}={v}\n"));
        }
        Ok(s)
    }

    pub fn entries(&self) -> anyhow::Result<Vec<(&'static str, Value)>> {
        let b = self.bounds()?;
        Ok(vec![
            ("c1", json!(self.c1)),
            ("c2", json!(self.c2)),
            ("alpha", json!(self.alpha)),
            ("lo", json!(self.lo)),
            ("hi", json!(self.hi)),
            ("grid", json!(self.grid)),
            ("K", json!(self.k)),
            ("s_cap", json!(self.s_cap)),
            ("n_max", json!(self.n_max)),
            (
                "n0",
                self.n0
                    .map_or(Value::String("default".into()), |n| json!(n)),
            ),
            ("a_plus", json!(b.a_plus())),
            ("a_minus", json!(b.a_minus())),
            ("b_minus", json!(b.b_minus())),
            ("b_plus", json!(b.b_plus())),
            ("format", json!(self.format.as_str())),
            (
                "out",
                self.out
                    .as_ref()
                    .map_or(Value::Null, |p| json!(p.display().to_string())),
            ),
        ])
    }
}
