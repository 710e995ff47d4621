//! Single fluxonium quantization.
//!
//! The Hamiltonian `4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext)` is
//! written in the harmonic-oscillator basis of its LC part. The LC part is
//! diagonal there; the cosine is evaluated as a function of the truncated
//! (tridiagonal) flux matrix through its eigen-decomposition, which makes the
//! low-lying matrix elements exact up to Gauss-Hermite quadrature error.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Default oscillator basis size.
pub const DEFAULT_BASIS_SIZE: usize = 120;
/// Default number of kept eigenlevels per qubit.
pub const DEFAULT_N_KEEP: usize = 5;
/// Smallest oscillator basis accepted by [`build_hamiltonian`].
pub const MIN_BASIS_SIZE: usize = 20;

const CONVERGENCE_TOLERANCE: f64 = 1e-9;

/// Circuit energies (GHz) and external flux phase of one fluxonium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumParams {
    pub e_c: f64,
    pub e_l: f64,
    pub e_j: f64,
    /// External flux phase, wrapped into `[0, 2pi)`.
    pub phi_ext: f64,
}

impl FluxoniumParams {
    pub fn new(e_c: f64, e_l: f64, e_j: f64, phi_ext: f64) -> Result<Self> {
        let params = Self { e_c, e_l, e_j, phi_ext: phi_ext.rem_euclid(TAU) };
        params.validate()?;
        Ok(params)
    }

    /// Qubit A of the reference device, biased at the sweet spot.
    pub fn reference_a() -> Self {
        Self { e_c: 1.5, e_l: 1.0, e_j: 5.5, phi_ext: PI }
    }

    /// Qubit B of the reference device, biased at the sweet spot.
    pub fn reference_b() -> Self {
        Self { e_c: 1.2, e_l: 1.0, e_j: 5.7, phi_ext: PI }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite"))
            }
        };
        finite("e_c", self.e_c)?;
        finite("e_l", self.e_l)?;
        finite("e_j", self.e_j)?;
        finite("phi_ext", self.phi_ext)?;
        if self.e_c <= 0.0 {
            return Err(Error::invalid("e_c", format!("must be positive, got {}", self.e_c)));
        }
        if self.e_l <= 0.0 {
            return Err(Error::invalid("e_l", format!("must be positive, got {}", self.e_l)));
        }
        if self.e_j < 0.0 {
            return Err(Error::invalid("e_j", format!("must be non-negative, got {}", self.e_j)));
        }
        if !(0.0..TAU).contains(&self.phi_ext) {
            return Err(Error::invalid("phi_ext", format!("must lie in [0, 2pi), got {}", self.phi_ext)));
        }
        Ok(())
    }

    /// LC plasma frequency sqrt(8 E_C E_L) in GHz.
    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }

    /// Oscillator length xi = (8 E_C / E_L)^(1/4); phi = xi (a + a^dag) / sqrt(2).
    pub fn oscillator_length(&self) -> f64 {
        (8.0 * self.e_c / self.e_l).powf(0.25)
    }

    fn phi_zpf(&self) -> f64 {
        self.oscillator_length() / std::f64::consts::SQRT_2
    }
}

/// Flux operator in the oscillator basis (real, tridiagonal).
fn flux_ho(params: &FluxoniumParams, basis_size: usize) -> DMatrix<f64> {
    let zpf = params.phi_zpf();
    DMatrix::from_fn(basis_size, basis_size, |i, j| {
        if j == i + 1 {
            zpf * (j as f64).sqrt()
        } else if i == j + 1 {
            zpf * (i as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// Charge operator in the oscillator basis: `n = i (a^dag - a) / (2 phi_zpf)`.
fn charge_ho(params: &FluxoniumParams, basis_size: usize) -> DMatrix<Complex64> {
    let zpf = 0.5 / params.phi_zpf();
    DMatrix::from_fn(basis_size, basis_size, |i, j| {
        if j == i + 1 {
            Complex64::new(0.0, -zpf * (j as f64).sqrt())
        } else if i == j + 1 {
            Complex64::new(0.0, zpf * (i as f64).sqrt())
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Matrix of the fluxonium Hamiltonian (GHz) in the oscillator basis.
pub fn build_hamiltonian(params: &FluxoniumParams, basis_size: usize) -> Result<DMatrix<f64>> {
    params.validate()?;
    if basis_size < MIN_BASIS_SIZE {
        return Err(Error::Truncation(format!(
            "basis size {basis_size} below the minimum of {MIN_BASIS_SIZE}"
        )));
    }
    let omega_p = params.plasma_frequency();
    let mut h = DMatrix::from_diagonal(&DVector::from_fn(basis_size, |m, _| omega_p * (m as f64 + 0.5)));

    if params.e_j != 0.0 {
        let (nodes, vectors) = linalg::eigh_sorted(flux_ho(params, basis_size));
        let weights = DVector::from_iterator(basis_size, nodes.iter().map(|&x| (x - params.phi_ext).cos()));
        let cosine = &vectors * DMatrix::from_diagonal(&weights) * vectors.transpose();
        h -= cosine * params.e_j;
    }
    Ok((&h + h.transpose()) * 0.5)
}

/// Truncated eigensystem of one fluxonium.
#[derive(Debug, Clone)]
pub struct QubitEigensystem {
    pub params: FluxoniumParams,
    pub n_keep: usize,
    pub basis_size: usize,
    /// Eigenenergies in GHz, ascending, with `energies[0] = 0`.
    pub energies: Vec<f64>,
    /// Charge operator in the eigenbasis.
    pub n_op: DMatrix<Complex64>,
    /// Flux operator in the eigenbasis.
    pub phi_op: DMatrix<Complex64>,
}

fn shifted_levels(params: &FluxoniumParams, basis_size: usize, n_keep: usize) -> Result<Vec<f64>> {
    let h = build_hamiltonian(params, basis_size)?;
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    let ground = values[0];
    Ok(values.into_iter().take(n_keep).map(|e| e - ground).collect())
}

/// Diagonalizes one fluxonium and projects its charge and flux operators onto
/// the lowest `n_keep` levels.
///
/// Convergence is verified by repeating the eigenvalue computation in a basis
/// 1.5 times larger.
pub fn diagonalize(params: &FluxoniumParams, n_keep: usize, basis_size: usize) -> Result<QubitEigensystem> {
    if n_keep == 0 {
        return Err(Error::invalid("n_keep", "must keep at least one level"));
    }
    if n_keep * 4 > basis_size {
        return Err(Error::Truncation(format!(
            "basis size {basis_size} too small for {n_keep} kept levels (need at least {})",
            n_keep * 4
        )));
    }
    let h = build_hamiltonian(params, basis_size)?;
    let (values, vectors) = linalg::eigh_sorted(h);
    let ground = values[0];
    let energies: Vec<f64> = values[..n_keep].iter().map(|e| e - ground).collect();

    let larger = (basis_size * 3).div_ceil(2);
    let reference = shifted_levels(params, larger, n_keep)?;
    let scale = energies[n_keep - 1].abs().max(params.plasma_frequency());
    let shift = energies
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    if shift > CONVERGENCE_TOLERANCE {
        return Err(Error::NotConverged { basis_size, shift });
    }

    let kept = vectors.columns(0, n_keep).into_owned();
    let n_op = linalg::rotate(&charge_ho(params, basis_size), &kept);
    let phi_ho = flux_ho(params, basis_size).map(|x| Complex64::new(x, 0.0));
    let phi_op = linalg::rotate(&phi_ho, &kept);

    Ok(QubitEigensystem { params: *params, n_keep, basis_size, energies, n_op, phi_op })
}

impl QubitEigensystem {
    /// Diagonalizes with the default basis size.
    pub fn new(params: &FluxoniumParams, n_keep: usize) -> Result<Self> {
        diagonalize(params, n_keep, DEFAULT_BASIS_SIZE)
    }

    fn check(&self, index: usize) -> Result<usize> {
        if index < self.n_keep {
            Ok(index)
        } else {
            Err(Error::LevelOutOfRange { index, n_keep: self.n_keep })
        }
    }

    /// Frequency (GHz) of the `i -> f` transition, `energies[f] - energies[i]`.
    pub fn transition(&self, i: usize, f: usize) -> Result<f64> {
        Ok(self.energies[self.check(f)?] - self.energies[self.check(i)?])
    }

    /// `|<i|n|f>|`.
    pub fn n_element(&self, i: usize, f: usize) -> Result<f64> {
        Ok(self.n_op[(self.check(i)?, self.check(f)?)].norm())
    }

    /// `|<i|phi|f>|`.
    pub fn phi_element(&self, i: usize, f: usize) -> Result<f64> {
        Ok(self.phi_op[(self.check(i)?, self.check(f)?)].norm())
    }
}

/// Frequency (GHz) of the `i -> f` transition of `sys`.
pub fn transition(sys: &QubitEigensystem, i: usize, f: usize) -> Result<f64> {
    sys.transition(i, f)
}
