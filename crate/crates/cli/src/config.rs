//! Experiment configuration: a TOML tree with per-block defaults.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use fluxcz::circuit::{DEFAULT_BASIS_SIZE, DEFAULT_N_KEEP};
use fluxcz::coupled::CouplingElements;
use fluxcz::{CouplingKind, CouplingSpec, FluxoniumParams, OptimizerSettings, TargetTransition};
use serde::{Deserialize, Serialize};

/// Invalid or unreadable configuration. The message names the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    pub e_c: f64,
    pub e_l: f64,
    pub e_j: f64,
    pub phi_ext: f64,
}

impl QubitConfig {
    fn from_params(p: FluxoniumParams) -> Self {
        Self { e_c: p.e_c, e_l: p.e_l, e_j: p.e_j, phi_ext: p.phi_ext }
    }

    pub fn params(&self, block: &str) -> Result<FluxoniumParams, ConfigError> {
        FluxoniumParams::new(self.e_c, self.e_l, self.e_j, self.phi_ext).map_err(|e| ConfigError(format!("{block}: {e}")))
    }
}

/// Coupling given either as `strength` (GHz) or as physical elements
/// (`c_m`, `c_a`, `c_b` in fF, or `l_m`, `l_a`, `l_b` in nH).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub kind: CouplingKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_b: Option<f64>,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            kind: CouplingKind::Capacitive,
            strength: Some(0.2),
            c_m: None,
            c_a: None,
            c_b: None,
            l_m: None,
            l_a: None,
            l_b: None,
        }
    }
}

impl CouplingConfig {
    fn elements(&self) -> Result<Option<CouplingElements>, ConfigError> {
        let cap = [self.c_m, self.c_a, self.c_b];
        let ind = [self.l_m, self.l_a, self.l_b];
        let (own, other, names) = match self.kind {
            CouplingKind::Capacitive => (cap, ind, "c_m, c_a, c_b"),
            CouplingKind::Inductive => (ind, cap, "l_m, l_a, l_b"),
        };
        if other.iter().any(Option::is_some) {
            return err(format!("coupling: elements of the other kind given; {:?} coupling takes {names}", self.kind));
        }
        match own {
            [None, None, None] => Ok(None),
            [Some(m), Some(a), Some(b)] => Ok(Some(match self.kind {
                CouplingKind::Capacitive => CouplingElements::Capacitive { c_m: m, c_a: a, c_b: b },
                CouplingKind::Inductive => CouplingElements::Inductive { l_m: m, l_a: a, l_b: b },
            })),
            _ => err(format!("coupling: all of {names} are required when elements are given")),
        }
    }

    /// The coupling in GHz, resolving physical elements if present.
    pub fn resolve(&self) -> Result<CouplingSpec, ConfigError> {
        match (self.strength, self.elements()?) {
            (Some(_), Some(_)) => err("coupling: give either strength or elements, not both"),
            (None, None) => err("coupling.strength: missing"),
            (Some(j), None) => CouplingSpec::new(self.kind, j).map_err(|e| ConfigError(format!("coupling.strength: {e}"))),
            (None, Some(elements)) => {
                let (spec, warning) =
                    fluxcz::coupling_from_elements(elements).map_err(|e| ConfigError(format!("coupling: {e}")))?;
                if let Some(w) = warning {
                    log::warn!("coupling element ratio {:.3} is not small; weak-coupling formula may be inaccurate", w.ratio);
                }
                Ok(spec)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveConfig {
    /// Gate time (ns).
    pub t_g: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub target: TargetTransition,
    /// Total carrier search window (GHz).
    pub window: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self { t_g: 50.0, eta_a: 0.0, eta_b: 1.0, target: TargetTransition::T11To21, window: 0.015 }
    }
}

/// Sweep range; unset fields take per-experiment defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl SweepConfig {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        let (Some(start), Some(stop), Some(points)) = (self.start, self.stop, self.points) else {
            return err("sweep: start, stop and points must be resolved");
        };
        if !(start.is_finite() && stop.is_finite()) {
            return err("sweep: start and stop must be finite");
        }
        if points == 0 {
            return err("sweep.points: must be at least 1");
        }
        if points == 1 {
            return Ok(vec![start]);
        }
        Ok((0..points).map(|i| start + (stop - start) * i as f64 / (points - 1) as f64).collect())
    }

    fn or(self, start: f64, stop: f64, points: usize) -> Self {
        Self {
            start: Some(self.start.unwrap_or(start)),
            stop: Some(self.stop.unwrap_or(stop)),
            points: Some(self.points.unwrap_or(points)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub basis_size: usize,
    pub n_keep: usize,
    /// Integration steps per carrier period.
    pub step_divisor: f64,
    pub freq_points: usize,
    pub amp_points: usize,
    pub amp_span: f64,
    pub freq_resolution: f64,
    pub amp_resolution: f64,
    pub refine_rounds: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let o = OptimizerSettings::default();
        Self {
            basis_size: DEFAULT_BASIS_SIZE,
            n_keep: DEFAULT_N_KEEP,
            step_divisor: o.step_divisor,
            freq_points: o.freq_points,
            amp_points: o.amp_points,
            amp_span: o.amp_span,
            freq_resolution: o.freq_resolution,
            amp_resolution: o.amp_resolution,
            refine_rounds: o.refine_rounds,
        }
    }
}

/// Provenance written into the sidecar; ignored when read back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub experiment: String,
    pub tool_version: String,
    pub output: String,
    /// Coupling in GHz when it was given as circuit elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_ghz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "reference_a")]
    pub qubit_a: QubitConfig,
    #[serde(default = "reference_b")]
    pub qubit_b: QubitConfig,
    #[serde(default)]
    pub coupling: CouplingConfig,
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
}

fn reference_a() -> QubitConfig {
    QubitConfig::from_params(FluxoniumParams::reference_a())
}

fn reference_b() -> QubitConfig {
    QubitConfig::from_params(FluxoniumParams::reference_b())
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            qubit_a: reference_a(),
            qubit_b: reference_b(),
            coupling: CouplingConfig::default(),
            drive: DriveConfig::default(),
            sweep: SweepConfig::default(),
            numerics: NumericsConfig::default(),
            run: None,
        }
    }
}

/// Parses a `--set` value as a TOML literal, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies a `key.path=value` override to a TOML tree.
pub fn apply_override(tree: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let Some((key, raw)) = assignment.split_once('=') else {
        return err(format!("--set {assignment}: expected key=value"));
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return err(format!("--set {assignment}: empty key segment"));
    }
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut table = tree;
    for part in parents {
        let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => return err(format!("--set {assignment}: `{part}` is not a table")),
        };
    }
    let mut value = parse_value(raw.trim());
    // phi_ext = pi is common enough to accept symbolically.
    if let toml::Value::String(s) = &value {
        if s == "pi" {
            value = toml::Value::Float(PI);
        }
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (key, value) in user {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

const ELEMENT_KEYS: [&str; 6] = ["c_m", "c_a", "c_b", "l_m", "l_a", "l_b"];

/// Overlays a user tree on the reference setup so partial blocks are accepted.
/// Without elements or strength the coupling defaults to 0.2 GHz
/// (capacitive) or 0.015 GHz (inductive).
fn with_defaults(user: toml::Table) -> toml::Table {
    let mut base = toml::Table::try_from(ExperimentConfig::default()).expect("defaults serialize");
    base.remove("coupling");
    merge(&mut base, user);
    let coupling = match base.remove("coupling") {
        Some(toml::Value::Table(t)) => Some(t),
        None => Some(toml::Table::new()),
        Some(other) => {
            // Leave a malformed block for the deserializer to report.
            base.insert("coupling".into(), other);
            None
        }
    };
    if let Some(mut coupling) = coupling {
        let inductive = coupling.get("kind").and_then(toml::Value::as_str) == Some("inductive");
        if !coupling.contains_key("strength") && !ELEMENT_KEYS.iter().any(|k| coupling.contains_key(*k)) {
            coupling.insert("strength".into(), toml::Value::Float(if inductive { 0.015 } else { 0.2 }));
        }
        coupling.entry("kind").or_insert_with(|| toml::Value::String("capacitive".into()));
        base.insert("coupling".into(), toml::Value::Table(coupling));
    }
    base
}

impl ExperimentConfig {
    pub fn from_tree(tree: toml::Table) -> Result<Self, ConfigError> {
        // Round trip through text so errors quote the offending line.
        let text = toml::to_string(&with_defaults(tree)).map_err(|e| ConfigError(e.to_string()))?;
        let mut config: Self = toml::from_str(&text).map_err(|e| ConfigError(e.to_string().trim_end().to_string()))?;
        config.run = None;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file and applies overrides in order.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let mut tree: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(format!("{}: {}", path.display(), e.message())))?;
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        Self::from_tree(tree)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.qubit_a.params("qubit_a")?;
        self.qubit_b.params("qubit_b")?;
        if self.coupling.strength.is_some() || self.coupling.elements()?.is_some() {
            self.coupling.resolve()?;
        }
        let d = &self.drive;
        if !(d.t_g.is_finite() && d.t_g > 0.0) {
            return err(format!("drive.t_g: must be positive, got {}", d.t_g));
        }
        if !(d.eta_a.is_finite() && d.eta_b.is_finite()) {
            return err("drive.eta_a, drive.eta_b: must be finite");
        }
        if d.eta_a == 0.0 && d.eta_b == 0.0 {
            return err("drive: at least one of eta_a, eta_b must be nonzero");
        }
        let n = &self.numerics;
        if n.n_keep < 3 {
            return err(format!("numerics.n_keep: at least 3 levels are needed, got {}", n.n_keep));
        }
        self.optimizer().validate().map_err(|e| ConfigError(format!("numerics: {e}")))?;
        if self.sweep.points == Some(0) {
            return err("sweep.points: must be at least 1");
        }
        Ok(())
    }

    pub fn optimizer(&self) -> OptimizerSettings {
        let n = &self.numerics;
        OptimizerSettings {
            window: self.drive.window,
            freq_points: n.freq_points,
            amp_points: n.amp_points,
            amp_span: n.amp_span,
            freq_resolution: n.freq_resolution,
            amp_resolution: n.amp_resolution,
            refine_rounds: n.refine_rounds,
            step_divisor: n.step_divisor,
        }
    }

    /// Fills sweep defaults for the given experiment.
    pub fn resolve_sweep(&mut self, kind: crate::Experiment) {
        use crate::Experiment::*;
        let max_j = match self.coupling.kind {
            CouplingKind::Capacitive => 0.3,
            CouplingKind::Inductive => 0.03,
        };
        self.sweep = match kind {
            FomSweep => self.sweep.or(0.0, max_j, 25),
            GateVsTime => self.sweep.or(30.0, 110.0, 9),
            GateVsCoupling => self.sweep.or(max_j / 6.0, max_j, 6),
            Spectrum | CoupledSpectrum => self.sweep,
        };
    }
}
