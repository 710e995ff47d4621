//! Driven evolution of the coupled system.
//!
//! The drive `f(t) cos(w_d t) (eta_A n_A + eta_B n_B)` is added to the
//! dressed Hamiltonian in the lab frame. Within each step the drive is held at
//! its midpoint value and the step propagator is split symmetrically into
//! exact exponentials of the diagonal part and of the drive operator, so every
//! step is unitary to rounding error.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupled::{CoupledSystem, COMPUTATIONAL};
use crate::error::{Error, Result};
use crate::units::angular;

/// Norm defect above which a propagation is rejected.
pub const NORM_TOLERANCE: f64 = 1e-8;
/// Default number of steps per carrier period.
pub const DEFAULT_STEP_DIVISOR: f64 = 80.0;
/// Coarsest admissible sampling of the carrier.
pub const MIN_STEP_DIVISOR: f64 = 40.0;

/// Gaussian-envelope microwave pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivePulse {
    /// Envelope prefactor `A` (GHz).
    pub amplitude: f64,
    /// Carrier frequency (GHz).
    pub omega_d: f64,
    /// Gate time (ns).
    pub t_g: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

fn erf_series(x: f64) -> f64 {
    // Maclaurin series, converges quickly for |x| <= 2.
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..60 {
        term *= -x2 / n as f64;
        let contribution = term / (2 * n + 1) as f64;
        sum += contribution;
        if contribution.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

/// `(1 / (A t_g)) * integral of f(t) over [0, t_g]`, i.e.
/// `e^2 sqrt(pi/8) erf(sqrt 2) - 1`.
pub fn envelope_area_factor() -> f64 {
    E * E * (PI / 8.0).sqrt() * erf_series(std::f64::consts::SQRT_2) - 1.0
}

impl DrivePulse {
    pub fn new(amplitude: f64, omega_d: f64, t_g: f64, eta_a: f64, eta_b: f64) -> Result<Self> {
        let pulse = Self { amplitude, omega_d, t_g, eta_a, eta_b };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_g.is_finite() && self.t_g > 0.0) {
            return Err(Error::invalid("t_g", format!("must be positive, got {}", self.t_g)));
        }
        if !(self.omega_d.is_finite() && self.omega_d > 0.0) {
            return Err(Error::invalid("omega_d", format!("must be positive, got {}", self.omega_d)));
        }
        for (name, v) in [("amplitude", self.amplitude), ("eta_a", self.eta_a), ("eta_b", self.eta_b)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Envelope `A (exp[-8 t (t - t_g) / t_g^2] - 1)` in GHz.
    pub fn envelope(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.t_g).contains(&t) {
            return Err(Error::OutsidePulse { t, t_g: self.t_g });
        }
        Ok(self.envelope_unchecked(t))
    }

    #[inline]
    fn envelope_unchecked(&self, t: f64) -> f64 {
        self.amplitude * ((-8.0 * t * (t - self.t_g) / (self.t_g * self.t_g)).exp() - 1.0)
    }

    /// Peak envelope value `A (e^2 - 1)`, reached at `t_g / 2`.
    pub fn peak(&self) -> f64 {
        self.amplitude * (E * E - 1.0)
    }

    /// Integral of the envelope over the pulse (GHz ns).
    pub fn envelope_integral(&self) -> f64 {
        self.amplitude * self.t_g * envelope_area_factor()
    }

    /// Full drive coefficient `f(t) cos(w_d t)`.
    #[inline]
    fn coefficient(&self, t: f64) -> f64 {
        self.envelope_unchecked(t) * (angular(self.omega_d) * t).cos()
    }

    /// Default integration step, `1 / (80 w_d)` ns.
    pub fn default_step(&self) -> f64 {
        1.0 / (DEFAULT_STEP_DIVISOR * self.omega_d)
    }

    /// Largest admissible integration step, `1 / (40 w_d)` ns.
    pub fn max_step(&self) -> f64 {
        1.0 / (MIN_STEP_DIVISOR * self.omega_d)
    }
}

/// The drive operator `eta_A n_A + eta_B n_B` in the dressed basis.
pub fn drive_operator(sys: &CoupledSystem, eta_a: f64, eta_b: f64) -> DMatrix<Complex64> {
    &sys.n_a * Complex64::new(eta_a, 0.0) + &sys.n_b * Complex64::new(eta_b, 0.0)
}

/// Computational columns of the evolution operator at `t_g`.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    /// `U(t_g)|kl>` for kl = 00, 01, 10, 11, in the dressed basis.
    pub evolved_columns: Vec<DVector<Complex64>>,
    /// `| |U|kl>| - 1 |` per column.
    pub norm_defects: Vec<f64>,
    pub steps: usize,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From 0 to t_g.
    Forward,
    /// From t_g back to 0, undoing a forward propagation.
    Backward,
}

/// Dense complex matrix stored as split real/imaginary row-major arrays.
struct SplitMatrix {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl SplitMatrix {
    fn new(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self { n, re, im }
    }

    /// `out = self * x` for a block of `cols` column vectors laid out `[row * cols + col]`.
    fn apply(&self, cols: usize, x_re: &[f64], x_im: &[f64], out_re: &mut [f64], out_im: &mut [f64]) {
        out_re.fill(0.0);
        out_im.fill(0.0);
        for i in 0..self.n {
            let (o_re, o_im) = (&mut out_re[i * cols..(i + 1) * cols], &mut out_im[i * cols..(i + 1) * cols]);
            for j in 0..self.n {
                let (a, b) = (self.re[i * self.n + j], self.im[i * self.n + j]);
                let (xr, xi) = (&x_re[j * cols..(j + 1) * cols], &x_im[j * cols..(j + 1) * cols]);
                for c in 0..cols {
                    o_re[c] += a * xr[c] - b * xi[c];
                    o_im[c] += a * xi[c] + b * xr[c];
                }
            }
        }
    }
}

/// Block of state vectors in split storage.
struct StateBlock {
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl StateBlock {
    fn from_vectors(states: &[DVector<Complex64>]) -> Self {
        let cols = states.len();
        let dim = states.first().map_or(0, |s| s.len());
        let mut re = vec![0.0; dim * cols];
        let mut im = vec![0.0; dim * cols];
        for (c, s) in states.iter().enumerate() {
            for (i, z) in s.iter().enumerate() {
                re[i * cols + c] = z.re;
                im[i * cols + c] = z.im;
            }
        }
        Self { cols, re, im }
    }

    fn into_vectors(self) -> Vec<DVector<Complex64>> {
        let dim = if self.cols == 0 { 0 } else { self.re.len() / self.cols };
        (0..self.cols)
            .map(|c| DVector::from_fn(dim, |i, _| Complex64::new(self.re[i * self.cols + c], self.im[i * self.cols + c])))
            .collect()
    }

    /// Multiplies row `i` by the unit phase `phases[i]`.
    fn rotate_rows(&mut self, phases: &[Complex64]) {
        for (i, p) in phases.iter().enumerate() {
            for c in 0..self.cols {
                let k = i * self.cols + c;
                let (r, m) = (self.re[k], self.im[k]);
                self.re[k] = p.re * r - p.im * m;
                self.im[k] = p.re * m + p.im * r;
            }
        }
    }
}

/// Split-step propagator for one coupled system and drive operator.
struct SplitStepper {
    energies: Vec<f64>,
    offset: f64,
    drive_eigenvalues: Vec<f64>,
    drive_vectors: SplitMatrix,
    drive_vectors_adjoint: SplitMatrix,
}

impl SplitStepper {
    fn new(sys: &CoupledSystem, drive: &DMatrix<Complex64>) -> Self {
        let lo = sys.dressed_energies.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sys.dressed_energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let offset = 0.5 * (lo + hi);
        let eig = drive.clone().symmetric_eigen();
        Self {
            energies: sys.dressed_energies.iter().map(|e| e - offset).collect(),
            offset,
            drive_eigenvalues: eig.eigenvalues.iter().copied().collect(),
            drive_vectors: SplitMatrix::new(&eig.eigenvectors),
            drive_vectors_adjoint: SplitMatrix::new(&eig.eigenvectors.adjoint()),
        }
    }

    fn diagonal_phases(&self, theta: f64) -> Vec<Complex64> {
        self.energies.iter().map(|&e| Complex64::from_polar(1.0, -theta * e)).collect()
    }

    fn run(&self, pulse: &DrivePulse, steps: usize, direction: Direction, block: &mut StateBlock) {
        let dim = self.energies.len();
        let cols = block.cols;
        let dt = pulse.t_g / steps as f64;
        let sign = match direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        // theta multiplies GHz energies to give the phase accumulated over one step.
        let theta = sign * angular(dt);
        let half = self.diagonal_phases(0.5 * theta);
        let full = self.diagonal_phases(theta);
        let mut tmp_re = vec![0.0; dim * cols];
        let mut tmp_im = vec![0.0; dim * cols];

        block.rotate_rows(&half);
        for n in 0..steps {
            let k = match direction {
                Direction::Forward => n,
                Direction::Backward => steps - 1 - n,
            };
            let c = pulse.coefficient((k as f64 + 0.5) * dt);
            if c != 0.0 {
                self.drive_vectors_adjoint.apply(cols, &block.re, &block.im, &mut tmp_re, &mut tmp_im);
                for (i, &lambda) in self.drive_eigenvalues.iter().enumerate() {
                    let p = Complex64::from_polar(1.0, -theta * c * lambda);
                    for col in 0..cols {
                        let q = i * cols + col;
                        let (r, m) = (tmp_re[q], tmp_im[q]);
                        tmp_re[q] = p.re * r - p.im * m;
                        tmp_im[q] = p.re * m + p.im * r;
                    }
                }
                self.drive_vectors.apply(cols, &tmp_re, &tmp_im, &mut block.re, &mut block.im);
            }
            block.rotate_rows(if n + 1 == steps { &half } else { &full });
        }
        let global = Complex64::from_polar(1.0, -sign * angular(self.offset) * pulse.t_g);
        block.rotate_rows(&vec![global; dim]);
    }
}

fn step_count(pulse: &DrivePulse, step: f64) -> Result<usize> {
    pulse.validate()?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid("step", format!("must be positive, got {step}")));
    }
    let max_step = pulse.max_step();
    if step > max_step {
        return Err(Error::StepTooLarge { step, max_step });
    }
    Ok((pulse.t_g / step).ceil().max(1.0) as usize)
}

/// Evolves arbitrary dressed-basis states over the pulse, forward from 0 to
/// `t_g` or backward from `t_g` to 0. The effective step is `t_g / ceil(t_g / step)`.
pub fn evolve(
    sys: &CoupledSystem,
    pulse: &DrivePulse,
    step: f64,
    states: &[DVector<Complex64>],
    direction: Direction,
) -> Result<Vec<DVector<Complex64>>> {
    let steps = step_count(pulse, step)?;
    if let Some(bad) = states.iter().find(|s| s.len() != sys.dim()) {
        return Err(Error::invalid("states", format!("dimension {} != {}", bad.len(), sys.dim())));
    }
    let stepper = SplitStepper::new(sys, &drive_operator(sys, pulse.eta_a, pulse.eta_b));
    let mut block = StateBlock::from_vectors(states);
    stepper.run(pulse, steps, direction, &mut block);
    Ok(block.into_vectors())
}

/// Propagates the four computational dressed states through the pulse.
pub fn propagate(sys: &CoupledSystem, pulse: &DrivePulse, step: f64) -> Result<PropagationResult> {
    let steps = step_count(pulse, step)?;
    let initial: Vec<DVector<Complex64>> = COMPUTATIONAL
        .iter()
        .map(|&label| {
            let mut v = DVector::zeros(sys.dim());
            v[sys.index(label)?] = Complex64::new(1.0, 0.0);
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let evolved_columns = evolve(sys, pulse, step, &initial, Direction::Forward)?;
    let norm_defects: Vec<f64> = evolved_columns.iter().map(|v| (v.norm() - 1.0).abs()).collect();
    if let Some((column, &defect)) = norm_defects.iter().enumerate().find(|(_, &d)| d > NORM_TOLERANCE) {
        return Err(Error::NormDefect { column, defect });
    }
    Ok(PropagationResult { evolved_columns, norm_defects, steps, step: pulse.t_g / steps as f64 })
}
