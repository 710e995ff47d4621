//! Computational-subspace projection, single-qubit Z correction, averaged
//! gate fidelity, and drive optimization.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupled::{BareLabel, CoupledSystem, COMPUTATIONAL};
use crate::dynamics::{self, DrivePulse, PropagationResult};
use crate::error::{Error, Result};

/// Diagonal magnitude below which a computational phase is undefined.
pub const MIN_DIAGONAL: f64 = 1e-12;

/// Evolution restricted to the computational states, basis order 00, 01, 10, 11.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputationalEvolution {
    pub u_c: Matrix4<Complex64>,
}

impl ComputationalEvolution {
    pub fn new(u_c: Matrix4<Complex64>) -> Result<Self> {
        for (j, col) in u_c.column_iter().enumerate() {
            let norm = col.norm();
            if norm > 1.0 + 1e-8 {
                return Err(Error::invalid("u_c", format!("column {j} has norm {norm} > 1")));
            }
        }
        Ok(Self { u_c })
    }

    /// Population lost from the computational subspace, `4 - Tr(U_c^dag U_c)`.
    pub fn leakage(&self) -> f64 {
        4.0 - (self.u_c.adjoint() * self.u_c).trace().re
    }
}

/// `[U_c]_{kl,k'l'} = <kl|U(t_g)|k'l'>`.
pub fn project(result: &PropagationResult, sys: &CoupledSystem) -> Result<ComputationalEvolution> {
    if result.evolved_columns.len() != 4 {
        return Err(Error::invalid("result", "expected four evolved columns"));
    }
    let rows = COMPUTATIONAL.map(|label| sys.index(label));
    let mut u_c = Matrix4::zeros();
    for (r, row) in rows.into_iter().enumerate() {
        let row = row?;
        for (c, column) in result.evolved_columns.iter().enumerate() {
            u_c[(r, c)] = column[row];
        }
    }
    ComputationalEvolution::new(u_c)
}

/// Ideal controlled-Z, `diag(1, 1, 1, -1)`.
pub fn controlled_z() -> Matrix4<Complex64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0).map(|x| Complex64::new(x, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    /// `phi_kl = -arg [U_c]_{kl,kl}` for 00, 01, 10, 11.
    pub phases: [f64; 4],
    /// `U_Z U_c`.
    pub corrected: Matrix4<Complex64>,
    /// `phi_11 - phi_10 - phi_01 + phi_00`, wrapped into `[0, 2pi)`.
    pub conditional_phase: f64,
}

/// Averaged fidelity to the controlled-Z after the single-qubit Z correction
/// `U_Z = diag(1, e^{i dphi_01}, e^{i dphi_10}, e^{i (dphi_01 + dphi_10)})`:
///
/// `F = [Tr(U'^dag U') + |Tr(U_CZ^dag U')|^2] / 20`.
pub fn fidelity(evolution: &ComputationalEvolution) -> Result<FidelityReport> {
    let u = &evolution.u_c;
    let mut phases = [0.0; 4];
    for (k, phase) in phases.iter_mut().enumerate() {
        let d = u[(k, k)];
        if d.norm() < MIN_DIAGONAL {
            return Err(Error::IllDefinedPhase { index: k, magnitude: d.norm() });
        }
        *phase = -d.arg();
    }
    let d01 = phases[1] - phases[0];
    let d10 = phases[2] - phases[0];
    let correction = nalgebra::Vector4::new(0.0, d01, d10, d01 + d10).map(|a| Complex64::from_polar(1.0, a));
    let corrected = Matrix4::from_diagonal(&correction) * u;

    let norm_term = (corrected.adjoint() * corrected).trace().re;
    let overlap = (controlled_z().adjoint() * corrected).trace().norm_sqr();
    let fidelity = (norm_term + overlap) / 20.0;
    let conditional_phase = (phases[3] - phases[2] - phases[1] + phases[0]).rem_euclid(TAU);
    Ok(FidelityReport { fidelity, phases, corrected, conditional_phase })
}

/// Transition driven to activate the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetTransition {
    #[serde(rename = "t11_21")]
    T11To21,
    #[serde(rename = "t10_02")]
    T10To02,
}

impl TargetTransition {
    pub fn labels(self) -> (BareLabel, BareLabel) {
        match self {
            TargetTransition::T11To21 => (BareLabel(1, 1), BareLabel(2, 1)),
            TargetTransition::T10To02 => (BareLabel(1, 0), BareLabel(0, 2)),
        }
    }

    /// Dressed transition frequency (GHz).
    pub fn frequency(self, sys: &CoupledSystem) -> Result<f64> {
        let (from, to) = self.labels();
        sys.frequency(from, to)
    }
}

impl fmt::Display for TargetTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetTransition::T11To21 => "t11_21",
            TargetTransition::T10To02 => "t10_02",
        })
    }
}

impl FromStr for TargetTransition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t11_21" => Ok(TargetTransition::T11To21),
            "t10_02" => Ok(TargetTransition::T10To02),
            other => Err(Error::invalid("target_transition", format!("unknown transition `{other}`"))),
        }
    }
}

/// Search grid and refinement resolution for [`optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    /// Total width (GHz) of the carrier window centred on the target transition.
    pub window: f64,
    pub freq_points: usize,
    pub amp_points: usize,
    /// The amplitude grid spans `[A0 / amp_span, A0 * amp_span]` geometrically.
    pub amp_span: f64,
    /// Carrier resolution of the refinement (GHz).
    pub freq_resolution: f64,
    /// Amplitude resolution of the refinement, relative to the seed amplitude.
    pub amp_resolution: f64,
    pub refine_rounds: usize,
    /// Integration steps per carrier period.
    pub step_divisor: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            window: 0.015,
            freq_points: 31,
            amp_points: 7,
            amp_span: 2.0,
            freq_resolution: 1e-6,
            amp_resolution: 1e-4,
            refine_rounds: 2,
            step_divisor: dynamics::DEFAULT_STEP_DIVISOR,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.window.is_finite() && self.window >= 0.0) {
            return Err(Error::invalid("window", "must be finite and >= 0"));
        }
        if self.freq_points == 0 || self.amp_points == 0 {
            return Err(Error::invalid("grid", "grid point counts must be positive"));
        }
        if !(self.amp_span >= 1.0) {
            return Err(Error::invalid("amp_span", "must be >= 1"));
        }
        if !(self.freq_resolution > 0.0 && self.amp_resolution > 0.0) {
            return Err(Error::invalid("resolution", "must be positive"));
        }
        if !(self.step_divisor >= dynamics::MIN_STEP_DIVISOR) {
            return Err(Error::invalid(
                "step_divisor",
                format!("must be at least {}", dynamics::MIN_STEP_DIVISOR),
            ));
        }
        Ok(())
    }
}

/// One evaluated drive setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    pub amplitude: f64,
    pub omega_d: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizationOutcome {
    pub best_pulse: DrivePulse,
    pub best_fidelity: f64,
    pub best_report: FidelityReport,
    pub leakage: f64,
    /// Amplitude seed `A0` of the grid.
    pub seed_amplitude: f64,
    pub target_frequency: f64,
    pub search_trace: Vec<SearchPoint>,
}

/// Simulates one pulse and returns its fidelity report and leakage.
pub fn evaluate(sys: &CoupledSystem, pulse: &DrivePulse, step_divisor: f64) -> Result<(FidelityReport, f64)> {
    let step = 1.0 / (step_divisor * pulse.omega_d);
    let result = dynamics::propagate(sys, pulse, step)?;
    let evolution = project(&result, sys)?;
    Ok((fidelity(&evolution)?, evolution.leakage()))
}

/// Seed amplitude for one full Rabi cycle on the target transition.
///
/// In the rotating-wave picture the Rabi frequency is `f(t) |<i|D|f>|` (GHz),
/// so a full cycle needs `|<i|D|f>| * integral f dt = 1`.
pub fn seed_amplitude(sys: &CoupledSystem, target: TargetTransition, t_g: f64, weights: (f64, f64)) -> Result<f64> {
    let (from, to) = target.labels();
    let drive = dynamics::drive_operator(sys, weights.0, weights.1);
    let element = drive[(sys.index(from)?, sys.index(to)?)].norm();
    if element < 1e-12 {
        return Err(Error::Optimizer(format!("transition {target} is not driven by these weights")));
    }
    Ok(1.0 / (element * t_g * dynamics::envelope_area_factor()))
}

struct Search<'a> {
    sys: &'a CoupledSystem,
    t_g: f64,
    weights: (f64, f64),
    step_divisor: f64,
    trace: Vec<SearchPoint>,
}

impl Search<'_> {
    fn pulse(&self, amplitude: f64, omega_d: f64) -> DrivePulse {
        DrivePulse { amplitude, omega_d, t_g: self.t_g, eta_a: self.weights.0, eta_b: self.weights.1 }
    }

    fn score(&self, amplitude: f64, omega_d: f64) -> Result<f64> {
        match evaluate(self.sys, &self.pulse(amplitude, omega_d), self.step_divisor) {
            Ok((report, _)) => Ok(report.fidelity),
            // A vanishing diagonal means the gate is hopeless at this point, not a failure of the run.
            Err(Error::IllDefinedPhase { .. }) => Ok(0.0),
            Err(e) => Err(e),
        }
    }

    fn eval(&mut self, amplitude: f64, omega_d: f64) -> Result<f64> {
        let fidelity = self.score(amplitude, omega_d)?;
        self.trace.push(SearchPoint { amplitude, omega_d, fidelity });
        Ok(fidelity)
    }

    fn best(&self) -> SearchPoint {
        self.trace
            .iter()
            .copied()
            .reduce(|best, p| if p.fidelity > best.fidelity { p } else { best })
            .expect("trace is never empty after the grid phase")
    }

    /// Golden-section maximization of `g` on `[lo, hi]` down to width `tol`.
    fn golden(&mut self, mut lo: f64, mut hi: f64, tol: f64, mut g: impl FnMut(&mut Self, f64) -> Result<f64>) -> Result<()> {
        let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut f1 = g(self, x1)?;
        let mut f2 = g(self, x2)?;
        while hi - lo > tol {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = g(self, x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = g(self, x2)?;
            }
        }
        Ok(())
    }
}

fn geometric_grid(center: f64, span: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![center];
    }
    let log_span = span.ln();
    (0..points)
        .map(|i| center * (-log_span + 2.0 * log_span * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn linear_grid(center: f64, width: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![center];
    }
    (0..points)
        .map(|i| center - 0.5 * width + width * i as f64 / (points - 1) as f64)
        .collect()
}

/// Maximizes the gate fidelity over the drive amplitude and carrier frequency.
///
/// A grid over the carrier window and a geometric amplitude grid around the
/// Rabi-cycle seed is evaluated first, then the best point is refined by
/// alternating golden-section searches in amplitude and frequency.
pub fn optimize(
    sys: &CoupledSystem,
    t_g: f64,
    target: TargetTransition,
    weights: (f64, f64),
    settings: &OptimizerSettings,
) -> Result<OptimizationOutcome> {
    settings.validate()?;
    if !(t_g.is_finite() && t_g > 0.0) {
        return Err(Error::invalid("t_g", format!("must be positive, got {t_g}")));
    }
    let target_frequency = target.frequency(sys)?;
    if target_frequency <= 0.0 {
        return Err(Error::Optimizer(format!("transition {target} has non-positive frequency")));
    }
    let seed = seed_amplitude(sys, target, t_g, weights)?;
    let mut search = Search { sys, t_g, weights, step_divisor: settings.step_divisor, trace: Vec::new() };

    let amplitudes = geometric_grid(seed, settings.amp_span, settings.amp_points);
    let frequencies = linear_grid(target_frequency, settings.window, settings.freq_points);
    let grid: Vec<(f64, f64)> = frequencies
        .iter()
        .flat_map(|&w| amplitudes.iter().map(move |&a| (a, w)))
        .collect();
    let scores: Vec<Result<f64>> = grid.par_iter().map(|&(a, w)| search.score(a, w)).collect();
    for (&(amplitude, omega_d), fidelity) in grid.iter().zip(scores) {
        search.trace.push(SearchPoint { amplitude, omega_d, fidelity: fidelity? });
    }

    let undriven = search.score(0.0, target_frequency)?;
    if search.best().fidelity <= undriven {
        return Err(Error::Optimizer(format!(
            "no grid point improves on the undriven fidelity {undriven:.6} at t_g = {t_g} ns"
        )));
    }

    let amp_ratio = if settings.amp_points > 1 {
        settings.amp_span.powf(2.0 / (settings.amp_points - 1) as f64)
    } else {
        settings.amp_span.max(1.1)
    };
    let freq_spacing = if settings.freq_points > 1 {
        settings.window / (settings.freq_points - 1) as f64
    } else {
        settings.window.max(settings.freq_resolution)
    };
    let (w_lo, w_hi) = (target_frequency - 0.5 * settings.window, target_frequency + 0.5 * settings.window);

    for _ in 0..settings.refine_rounds {
        let start = search.best();
        let omega = start.omega_d;
        search.golden(start.amplitude / amp_ratio, start.amplitude * amp_ratio, settings.amp_resolution * seed, |s, a| {
            s.eval(a, omega)
        })?;
        let best = search.best();
        let amplitude = best.amplitude;
        let lo = (best.omega_d - freq_spacing).max(w_lo);
        let hi = (best.omega_d + freq_spacing).min(w_hi);
        if hi > lo {
            search.golden(lo, hi, settings.freq_resolution, |s, w| s.eval(amplitude, w))?;
        }
        if search.best().fidelity <= start.fidelity {
            break;
        }
    }

    let best = search.best();
    let best_pulse = search.pulse(best.amplitude, best.omega_d);
    let (best_report, leakage) = evaluate(sys, &best_pulse, settings.step_divisor)?;
    Ok(OptimizationOutcome {
        best_pulse,
        best_fidelity: best.fidelity,
        best_report,
        leakage,
        seed_amplitude: seed,
        target_frequency,
        search_trace: search.trace,
    })
}
