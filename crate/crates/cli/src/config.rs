//! Run configuration: defaults, flat key=value config files, and flag
//! merging. Precedence is defaults < config file < command-line flags.

use anyhow::{anyhow, bail, Context, Result};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeOpt {
    Analytic,
    Dual,
    Fd,
}

impl SchemeOpt {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(SchemeOpt::Analytic),
            "dual" => Ok(SchemeOpt::Dual),
            "fd" => Ok(SchemeOpt::Fd),
            other => bail!("unknown scheme `{other}` (expected analytic|dual|fd)"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeOpt::Analytic => "analytic",
            SchemeOpt::Dual => "dual",
            SchemeOpt::Fd => "fd",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatOpt {
    Csv5,
    Obj,
    Json,
}

impl FormatOpt {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv5" => Ok(FormatOpt::Csv5),
            "obj" => Ok(FormatOpt::Obj),
            "json" => Ok(FormatOpt::Json),
            other => bail!("unknown format `{other}` (expected csv5|obj|json)"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FormatOpt::Csv5 => "csv5",
            FormatOpt::Obj => "obj",
            FormatOpt::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrivialOpt {
    GreatSphere,
    CliffordTorus,
    GreatCircleCylinder,
}

impl TrivialOpt {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "great-sphere" => Ok(TrivialOpt::GreatSphere),
            "clifford-torus" => Ok(TrivialOpt::CliffordTorus),
            "great-circle-cylinder" => Ok(TrivialOpt::GreatCircleCylinder),
            other => bail!(
                "unknown trivial kind `{other}` (expected great-sphere|clifford-torus|great-circle-cylinder)"
            ),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrivialOpt::GreatSphere => "great-sphere",
            TrivialOpt::CliffordTorus => "clifford-torus",
            TrivialOpt::GreatCircleCylinder => "great-circle-cylinder",
        }
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// One or more angles; subcommands other than `scan` use the first.
    pub theta: Vec<f64>,
    pub nu1: Option<f64>,
    pub grid: (usize, usize),
    pub range: (f64, f64, f64, f64),
    pub scheme: SchemeOpt,
    pub tol_analytic: f64,
    pub tol_fd: f64,
    pub out: Option<PathBuf>,
    pub format: Option<FormatOpt>,
    pub pole: usize,
    pub trivial: Option<TrivialOpt>,
    pub level: f64,
    pub input: Option<PathBuf>,
    pub nu1_count: usize,
    pub degrees: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theta: Vec::new(),
            nu1: None,
            grid: (33, 33),
            range: (0.0, 2.0 * PI, 0.0, 2.0 * PI),
            scheme: SchemeOpt::Dual,
            tol_analytic: 1e-9,
            tol_fd: 1e-6,
            out: None,
            format: None,
            pole: 4,
            trivial: None,
            level: 0.0,
            input: None,
            nu1_count: 9,
            degrees: false,
        }
    }
}

fn parse_f64_list(key: &str, s: &str, want: usize) -> Result<Vec<f64>> {
    let vals: Result<Vec<f64>> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{p}` in `{key}`"))
        })
        .collect();
    let vals = vals?;
    if want > 0 && vals.len() != want {
        bail!("`{key}` expects {want} comma-separated values, got {}", vals.len());
    }
    Ok(vals)
}

impl RunConfig {
    /// Applies one key=value assignment (config-file line or flag payload).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "theta" => self.theta = parse_f64_list("theta", value, 0)?,
            "nu1" => self.nu1 = Some(value.parse().context("bad `nu1`")?),
            "grid" => {
                let v = parse_f64_list("grid", value, 2)?;
                let (nx, ny) = (v[0] as usize, v[1] as usize);
                if nx < 2 || ny < 2 {
                    bail!("`grid` needs at least 2 samples per axis");
                }
                self.grid = (nx, ny);
            }
            "range" => {
                let v = parse_f64_list("range", value, 4)?;
                self.range = (v[0], v[1], v[2], v[3]);
            }
            "scheme" => self.scheme = SchemeOpt::parse(value)?,
            "tol_analytic" => self.tol_analytic = value.parse().context("bad `tol_analytic`")?,
            "tol_fd" => self.tol_fd = value.parse().context("bad `tol_fd`")?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(FormatOpt::parse(value)?),
            "pole" => {
                let p: usize = value.parse().context("bad `pole`")?;
                if !(1..=4).contains(&p) {
                    bail!("`pole` must be 1..=4");
                }
                self.pole = p;
            }
            "trivial" => self.trivial = Some(TrivialOpt::parse(value)?),
            "level" => self.level = value.parse().context("bad `level`")?,
            "input" => self.input = Some(PathBuf::from(value)),
            "nu1_count" => {
                self.nu1_count = value.parse().context("bad `nu1_count`")?;
                if self.nu1_count < 2 {
                    bail!("`nu1_count` must be at least 2");
                }
            }
            "degrees" => self.degrees = value.parse().context("bad `degrees`")?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    /// Loads a flat key=value file; blank lines and `#` comments allowed.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), lineno + 1))?;
            self.set(k.trim(), v.trim())
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    /// Converts degree-valued angles to radians. Applies to user input only;
    /// must run once, after merging.
    pub fn apply_degrees(&mut self) {
        if self.degrees {
            for t in &mut self.theta {
                *t *= PI / 180.0;
            }
        }
    }

    /// The effective configuration as sorted key=value pairs.
    pub fn as_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        m.insert("theta".into(), join(&self.theta));
        m.insert(
            "nu1".into(),
            self.nu1.map(|v| format!("{v}")).unwrap_or_default(),
        );
        m.insert("grid".into(), format!("{},{}", self.grid.0, self.grid.1));
        m.insert(
            "range".into(),
            format!(
                "{},{},{},{}",
                self.range.0, self.range.1, self.range.2, self.range.3
            ),
        );
        m.insert("scheme".into(), self.scheme.name().into());
        m.insert("tol_analytic".into(), format!("{}", self.tol_analytic));
        m.insert("tol_fd".into(), format!("{}", self.tol_fd));
        m.insert(
            "out".into(),
            self.out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
        );
        m.insert(
            "format".into(),
            self.format.map(|f| f.name().to_string()).unwrap_or_default(),
        );
        m.insert("pole".into(), format!("{}", self.pole));
        m.insert(
            "trivial".into(),
            self.trivial.map(|t| t.name().to_string()).unwrap_or_default(),
        );
        m.insert("level".into(), format!("{}", self.level));
        m.insert(
            "input".into(),
            self.input
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
        );
        m.insert("nu1_count".into(), format!("{}", self.nu1_count));
        m.insert("degrees".into(), format!("{}", self.degrees));
        m
    }
}
