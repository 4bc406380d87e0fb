//! Run configuration: a flat key/value text format with dotted sections.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment (also allowed after a value)
//! section.key = value
//! ```
//!
//! Values are decimal numbers, booleans (`true`/`false`), identifiers,
//! rationals (`3/2`), comma-separated vectors (`0.3,-0.2`) or paths.
//! Unknown or duplicate keys are errors. Every key has a default; an empty
//! file is a valid configuration. Keys:
//!
//! ```text
//! grid.dim                  2 | 3                      (default 2)
//! grid.resolution           power of two >= 8          (default 32)
//! grid.padding              rational >= 1, e.g. 3/2    (default 3/2)
//! params.nu                 > 0                        (default 1.0)
//! params.lambda             > 0                        (default 1.0)
//! params.gamma              > 0                        (default 1.0)
//! params.alpha              in [0,1]                   (default 0.5)
//! params.eta                in (0,1]                   (default 1.0)
//! scheme.name               imex_euler | imex_bdf2     (default imex_euler)
//! scheme.dt                 > 0                        (default 1e-3)
//! scheme.t_end              >= 0                       (default 1.0)
//! scheme.cfl_warn_threshold real                       (default 0.5)
//! scheme.frozen_director    bool                       (default false)
//! initial.generator         taylor_green | perturbed_constant_director |
//!                           random_smooth              (default perturbed_constant_director)
//! initial.seed              u64                        (default 0)
//! initial.amplitude         real                       (default 0.1)
//! initial.mean_v            vector, dim entries        (default zeros)
//! initial.snapshot          path (overrides generator) (default unset)
//! output.dir                path                       (default "out")
//! output.diag_every         steps, 0 = first/last only (default 10)
//! output.snapshot_every     steps, 0 = none            (default 0)
//! detect.tol_a              > 0                        (default 1e-8)
//! detect.tol_resid          > 0                        (default 1e-6)
//! detect.stop_on_steady     bool                       (default false)
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::integrator::SchemeConfig;
use crate::model::PhysParams;
use crate::spectral::{Padding, TorusGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub dim: usize,
    pub resolution: usize,
    pub padding: Padding,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            dim: 2,
            resolution: 32,
            padding: Padding::default(),
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Arc<TorusGrid>> {
        TorusGrid::new(self.dim, self.resolution, self.padding)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    TaylorGreen,
    PerturbedConstantDirector,
    RandomSmooth,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::TaylorGreen => "taylor_green",
            GeneratorKind::PerturbedConstantDirector => "perturbed_constant_director",
            GeneratorKind::RandomSmooth => "random_smooth",
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<GeneratorKind> {
        match s {
            "taylor_green" => Ok(GeneratorKind::TaylorGreen),
            "perturbed_constant_director" => Ok(GeneratorKind::PerturbedConstantDirector),
            "random_smooth" => Ok(GeneratorKind::RandomSmooth),
            other => Err(Error::UnknownGenerator(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialConfig {
    pub generator: GeneratorKind,
    pub seed: u64,
    pub amplitude: f64,
    /// Conserved mean velocity added by `random_smooth`.
    pub mean_v: Vec<f64>,
    /// When set, resume from this snapshot instead of generating.
    pub snapshot: Option<PathBuf>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            generator: GeneratorKind::PerturbedConstantDirector,
            seed: 0,
            amplitude: 0.1,
            mean_v: Vec::new(),
            snapshot: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub diag_every: usize,
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            diag_every: 10,
            snapshot_every: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectConfig {
    pub tol_a: f64,
    pub tol_resid: f64,
    pub stop_on_steady: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            tol_a: 1e-8,
            tol_resid: 1e-6,
            stop_on_steady: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub params: PhysParams,
    pub scheme: SchemeConfig,
    pub initial: InitialConfig,
    pub output: OutputConfig,
    pub detect: DetectConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        self.params.validate()?;
        self.scheme.validate()?;
        if !self.initial.mean_v.is_empty() && self.initial.mean_v.len() != self.grid.dim {
            return Err(Error::validation(
                "initial.mean_v",
                format!(
                    "expected {} entries, got {}",
                    self.grid.dim,
                    self.initial.mean_v.len()
                ),
            ));
        }
        if !(self.detect.tol_a > 0.0) || !(self.detect.tol_resid > 0.0) {
            return Err(Error::validation(
                "detect.tol_a",
                "detection tolerances must be > 0",
            ));
        }
        Ok(())
    }

    /// mean_v padded with zeros to the grid dimension.
    pub fn mean_v(&self) -> Vec<f64> {
        let mut m = self.initial.mean_v.clone();
        m.resize(self.grid.dim, 0.0);
        m
    }
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), (lineno + 1, value)).is_some() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("duplicate key '{key}'"),
            });
        }
    }
    Ok(map)
}

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn parse<T, F>(&mut self, key: &str, parse: F, default: T) -> Result<T>
    where
        F: FnOnce(&str) -> Option<T>,
    {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => parse(&raw)
                .ok_or_else(|| Error::validation(key, format!("cannot parse value '{raw}'"))),
        }
    }
}

fn parse_padding(raw: &str) -> Option<Padding> {
    if let Some((num, den)) = raw.split_once('/') {
        let num: u32 = num.trim().parse().ok()?;
        let den: u32 = den.trim().parse().ok()?;
        Padding::new(num, den).ok()
    } else {
        let num: u32 = raw.trim().parse().ok()?;
        Padding::new(num, 1).ok()
    }
}

fn parse_vector(raw: &str) -> Option<Vec<f64>> {
    raw.split(',')
        .map(|s| s.trim().parse::<f64>().ok())
        .collect()
}

/// Parse a configuration from text. Missing keys take their defaults;
/// unknown keys, bad values, and invariant violations are errors naming
/// the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut f = Fields {
        map: parse_kv(text)?,
    };
    let d = RunConfig::default();

    let grid = GridConfig {
        dim: f.parse("grid.dim", |s| s.parse().ok(), d.grid.dim)?,
        resolution: f.parse("grid.resolution", |s| s.parse().ok(), d.grid.resolution)?,
        padding: f.parse("grid.padding", parse_padding, d.grid.padding)?,
    };
    let params = PhysParams {
        nu: f.parse("params.nu", |s| s.parse().ok(), d.params.nu)?,
        lambda: f.parse("params.lambda", |s| s.parse().ok(), d.params.lambda)?,
        gamma: f.parse("params.gamma", |s| s.parse().ok(), d.params.gamma)?,
        alpha: f.parse("params.alpha", |s| s.parse().ok(), d.params.alpha)?,
        eta: f.parse("params.eta", |s| s.parse().ok(), d.params.eta)?,
    };
    let scheme = SchemeConfig {
        scheme: f.parse("scheme.name", |s| s.parse().ok(), d.scheme.scheme)?,
        dt: f.parse("scheme.dt", |s| s.parse().ok(), d.scheme.dt)?,
        t_end: f.parse("scheme.t_end", |s| s.parse().ok(), d.scheme.t_end)?,
        cfl_warn_threshold: f.parse(
            "scheme.cfl_warn_threshold",
            |s| s.parse().ok(),
            d.scheme.cfl_warn_threshold,
        )?,
        frozen_director: f.parse(
            "scheme.frozen_director",
            |s| s.parse().ok(),
            d.scheme.frozen_director,
        )?,
    };
    let generator = match f.take("initial.generator") {
        None => d.initial.generator,
        Some(raw) => raw.parse()?,
    };
    let initial = InitialConfig {
        generator,
        seed: f.parse("initial.seed", |s| s.parse().ok(), d.initial.seed)?,
        amplitude: f.parse("initial.amplitude", |s| s.parse().ok(), d.initial.amplitude)?,
        mean_v: f.parse("initial.mean_v", parse_vector, d.initial.mean_v.clone())?,
        snapshot: f.take("initial.snapshot").map(PathBuf::from),
    };
    let output = OutputConfig {
        dir: f
            .take("output.dir")
            .map(PathBuf::from)
            .unwrap_or(d.output.dir),
        diag_every: f.parse("output.diag_every", |s| s.parse().ok(), d.output.diag_every)?,
        snapshot_every: f.parse(
            "output.snapshot_every",
            |s| s.parse().ok(),
            d.output.snapshot_every,
        )?,
    };
    let detect = DetectConfig {
        tol_a: f.parse("detect.tol_a", |s| s.parse().ok(), d.detect.tol_a)?,
        tol_resid: f.parse("detect.tol_resid", |s| s.parse().ok(), d.detect.tol_resid)?,
        stop_on_steady: f.parse(
            "detect.stop_on_steady",
            |s| s.parse().ok(),
            d.detect.stop_on_steady,
        )?,
    };

    if let Some((line, _)) = f.map.values().next() {
        let key = f.map.keys().next().unwrap().clone();
        return Err(Error::Parse {
            line: *line,
            msg: format!("unknown key '{key}'"),
        });
    }

    let cfg = RunConfig {
        grid,
        params,
        scheme,
        initial,
        output,
        detect,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Canonical text form; `parse_config(save_config(c)) == c` field for field.
pub fn save_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    push("grid.dim", cfg.grid.dim.to_string());
    push("grid.resolution", cfg.grid.resolution.to_string());
    push("grid.padding", cfg.grid.padding.to_string());
    push("params.nu", cfg.params.nu.to_string());
    push("params.lambda", cfg.params.lambda.to_string());
    push("params.gamma", cfg.params.gamma.to_string());
    push("params.alpha", cfg.params.alpha.to_string());
    push("params.eta", cfg.params.eta.to_string());
    push("scheme.name", cfg.scheme.scheme.name().to_string());
    push("scheme.dt", cfg.scheme.dt.to_string());
    push("scheme.t_end", cfg.scheme.t_end.to_string());
    push(
        "scheme.cfl_warn_threshold",
        cfg.scheme.cfl_warn_threshold.to_string(),
    );
    push(
        "scheme.frozen_director",
        cfg.scheme.frozen_director.to_string(),
    );
    push(
        "initial.generator",
        cfg.initial.generator.name().to_string(),
    );
    push("initial.seed", cfg.initial.seed.to_string());
    push("initial.amplitude", cfg.initial.amplitude.to_string());
    if !cfg.initial.mean_v.is_empty() {
        push(
            "initial.mean_v",
            cfg.initial
                .mean_v
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    if let Some(path) = &cfg.initial.snapshot {
        push("initial.snapshot", path.display().to_string());
    }
    push("output.dir", cfg.output.dir.display().to_string());
    push("output.diag_every", cfg.output.diag_every.to_string());
    push(
        "output.snapshot_every",
        cfg.output.snapshot_every.to_string(),
    );
    push("detect.tol_a", cfg.detect.tol_a.to_string());
    push("detect.tol_resid", cfg.detect.tol_resid.to_string());
    push(
        "detect.stop_on_steady",
        cfg.detect.stop_on_steady.to_string(),
    );
    out
}

pub fn write_config(cfg: &RunConfig, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_config(cfg))?;
    Ok(())
}
