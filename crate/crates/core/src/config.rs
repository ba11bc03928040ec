//! Sweep configuration: defaults, `key = value` files and provenance lines.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::AccelerationConfig;
use crate::error::{Error, Result};
use crate::special::QuadratureSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Vacuum,
    Bell,
    Modes,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Vacuum => "vacuum",
            SweepKind::Bell => "bell",
            SweepKind::Modes => "modes",
        }
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vacuum" => Ok(SweepKind::Vacuum),
            "bell" => Ok(SweepKind::Bell),
            "modes" => Ok(SweepKind::Modes),
            _ => Err(Error::Config(format!("unknown sweep kind '{s}'"))),
        }
    }
}

/// Which particle/antiparticle pairing the vacuum bound uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionChoice {
    /// Wedge I particles with wedge II antiparticles.
    Default,
    /// Wedge I antiparticles with wedge II particles.
    Mirrored,
}

impl FromStr for PartitionChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(PartitionChoice::Default),
            "mirrored" => Ok(PartitionChoice::Mirrored),
            _ => Err(Error::Config(format!("unknown partition '{s}'"))),
        }
    }
}

impl fmt::Display for PartitionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionChoice::Default => "default",
            PartitionChoice::Mirrored => "mirrored",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub mass: f64,
    pub width: f64,
    pub omega0: f64,
    pub accel_min: f64,
    pub accel_max: f64,
    pub grid: usize,
    /// Fixes 𝒜_I instead of sweeping it.
    pub accel_i: Option<f64>,
    /// Fixes 𝒜_II instead of sweeping it.
    pub accel_ii: Option<f64>,
    pub chart_accel: Option<f64>,
    pub wavenumber: Option<f64>,
    pub omega_max: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Vacuum sweep along 𝒜_I = 𝒜_II only.
    pub diagonal: bool,
    pub partition: PartitionChoice,
    /// Bell diagnostic: replace all packet overlaps by one.
    pub unit_overlap: bool,
    /// Radial samples of the mode profiles.
    pub samples: usize,
    /// Rerun at halved tolerances and report the largest relative change.
    pub self_test: bool,
    pub output: Option<PathBuf>,
    pub emit_plot_script: bool,
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn new(kind: SweepKind) -> Self {
        let q = QuadratureSpec::default();
        Self {
            kind,
            mass: 0.1,
            width: 2.0,
            omega0: 4.71,
            accel_min: 0.05,
            accel_max: 0.5,
            grid: 20,
            accel_i: None,
            accel_ii: None,
            chart_accel: None,
            wavenumber: None,
            omega_max: None,
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_subdivisions: q.max_subdivisions,
            diagonal: false,
            partition: PartitionChoice::Default,
            unit_overlap: false,
            samples: 400,
            self_test: false,
            output: None,
            emit_plot_script: false,
            threads: None,
        }
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("invalid value '{value}' for {key}")))
        }
        fn flag(key: &str, value: &str) -> Result<bool> {
            match value {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::Config(format!("invalid boolean '{value}' for {key}"))),
            }
        }
        match key {
            "sweep_kind" => {
                let kind: SweepKind = value.parse()?;
                if kind != self.kind {
                    return Err(Error::Config(format!(
                        "sweep_kind = {value} conflicts with the {} command",
                        self.kind.name()
                    )));
                }
            }
            "mass" => self.mass = num(key, value)?,
            "width" => self.width = num(key, value)?,
            "omega0" => self.omega0 = num(key, value)?,
            "accel_min" => self.accel_min = num(key, value)?,
            "accel_max" => self.accel_max = num(key, value)?,
            "grid" => self.grid = num(key, value)?,
            "accel_i" => self.accel_i = Some(num(key, value)?),
            "accel_ii" => self.accel_ii = Some(num(key, value)?),
            "chart_accel" => self.chart_accel = Some(num(key, value)?),
            "wavenumber" => self.wavenumber = Some(num(key, value)?),
            "omega_max" => self.omega_max = Some(num(key, value)?),
            "abs_tol" => self.abs_tol = num(key, value)?,
            "rel_tol" => self.rel_tol = num(key, value)?,
            "max_subdivisions" => self.max_subdivisions = num(key, value)?,
            "diagonal" => self.diagonal = flag(key, value)?,
            "partition" => self.partition = value.parse()?,
            "unit_overlap" => self.unit_overlap = flag(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "self_test" => self.self_test = flag(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "emit_plot_script" => self.emit_plot_script = flag(key, value)?,
            "threads" => self.threads = Some(num(key, value)?),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: n + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(parse_err(format!("duplicate key '{key}'")));
            }
            self.set(key, value).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            ..QuadratureSpec::default()
        }
    }

    /// Same configuration with both tolerances halved.
    pub fn halved_tolerances(&self) -> Self {
        Self {
            abs_tol: 0.5 * self.abs_tol,
            rel_tol: 0.5 * self.rel_tol,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("width", self.width),
            ("omega0", self.omega0),
            ("accel_min", self.accel_min),
            ("accel_max", self.accel_max),
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let optional = [
            ("accel_i", self.accel_i),
            ("accel_ii", self.accel_ii),
            ("chart_accel", self.chart_accel),
            ("omega_max", self.omega_max),
        ];
        for (name, v) in optional {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.accel_min >= self.accel_max {
            return Err(Error::Config(format!(
                "accel_min {} must be below accel_max {}",
                self.accel_min, self.accel_max
            )));
        }
        if self.grid < 2 {
            return Err(Error::Config(format!("grid must be at least 2, got {}", self.grid)));
        }
        if self.samples < 2 {
            return Err(Error::Config("samples must be at least 2".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.emit_plot_script && self.output.is_none() {
            return Err(Error::Config("emit_plot_script needs an output path".into()));
        }
        Ok(())
    }

    /// Evenly spaced accelerations from accel_min to accel_max.
    pub fn accel_grid(&self) -> Vec<f64> {
        let step = (self.accel_max - self.accel_min) / (self.grid - 1) as f64;
        (0..self.grid)
            .map(|k| {
                if k + 1 == self.grid {
                    self.accel_max
                } else {
                    self.accel_min + k as f64 * step
                }
            })
            .collect()
    }

    /// Channel configuration at one pair of accelerations.
    pub fn point(&self, accel_i: f64, accel_ii: f64) -> AccelerationConfig {
        AccelerationConfig {
            mass: self.mass,
            width: self.width,
            omega0: self.omega0,
            accel_i,
            accel_ii,
            chart_accel: self.chart_accel,
            wavenumber: self.wavenumber,
            quadrature: self.quadrature(),
            omega_max: self.omega_max,
        }
    }

    /// Configuration lines written into every output file. Thread count and
    /// output path are left out so outputs compare byte for byte.
    pub fn provenance(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), |v| format!("{v:e}"));
        vec![
            format!("sweep_kind = {}", self.kind.name()),
            format!("mass = {:e}", self.mass),
            format!("width = {:e}", self.width),
            format!("omega0 = {:e}", self.omega0),
            format!("accel_min = {:e}", self.accel_min),
            format!("accel_max = {:e}", self.accel_max),
            format!("grid = {}", self.grid),
            format!("accel_i = {}", opt(self.accel_i)),
            format!("accel_ii = {}", opt(self.accel_ii)),
            format!("chart_accel = {}", opt(self.chart_accel)),
            format!("wavenumber = {}", opt(self.wavenumber)),
            format!("omega_max = {}", opt(self.omega_max)),
            format!("abs_tol = {:e}", self.abs_tol),
            format!("rel_tol = {:e}", self.rel_tol),
            format!("max_subdivisions = {}", self.max_subdivisions),
            format!("diagonal = {}", self.diagonal),
            format!("partition = {}", self.partition),
            format!("unit_overlap = {}", self.unit_overlap),
            format!("samples = {}", self.samples),
            format!("self_test = {}", self.self_test),
        ]
    }

    /// Warnings about parameters outside the localized-packet regime.
    pub fn warnings(&self) -> Vec<String> {
        let largest = [Some(self.accel_max), self.accel_i, self.accel_ii]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max);
        if largest * self.width > 1.0 {
            vec![format!(
                "largest acceleration times width is {}, above 1; packets are not localized enough to carry a single acceleration",
                largest * self.width
            )]
        } else {
            Vec::new()
        }
    }
}
