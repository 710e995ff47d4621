//! Two coupled fluxoniums: spectrum, dressed-state labels, and the
//! spectroscopic figures of merit of the gate.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::QubitEigensystem;
use crate::error::{Error, Result};
use crate::linalg;
use crate::units;

/// Minimum squared overlap accepted when connecting a dressed state to a bare label.
pub const MIN_LABEL_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    /// `V = +J_C n_A n_B`
    Capacitive,
    /// `V = -J_L phi_A phi_B`
    Inductive,
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingKind::Capacitive => f.write_str("capacitive"),
            CouplingKind::Inductive => f.write_str("inductive"),
        }
    }
}

/// Coupling kind and strength `J/h` in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub strength: f64,
}

impl CouplingSpec {
    pub fn new(kind: CouplingKind, strength: f64) -> Result<Self> {
        if !strength.is_finite() || strength < 0.0 {
            return Err(Error::invalid("strength", format!("must be finite and >= 0, got {strength}")));
        }
        Ok(Self { kind, strength })
    }

    pub fn capacitive(strength: f64) -> Result<Self> {
        Self::new(CouplingKind::Capacitive, strength)
    }

    pub fn inductive(strength: f64) -> Result<Self> {
        Self::new(CouplingKind::Inductive, strength)
    }
}

/// Ratio of coupling element to circuit element above which a warning is raised.
pub const COUPLING_WARN_RATIO: f64 = 0.1;
/// Ratio above which the weak-coupling formulas are rejected.
pub const COUPLING_MAX_RATIO: f64 = 0.3;

/// Raised when the coupling element is not small compared to the circuit elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingWarning {
    pub ratio: f64,
}

/// Physical coupling elements: capacitances in fF, inductances in nH.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CouplingElements {
    Capacitive { c_m: f64, c_a: f64, c_b: f64 },
    Inductive { l_m: f64, l_a: f64, l_b: f64 },
}

/// Converts coupling elements into `J/h` (GHz).
///
/// `J_C = 4 e^2 C_M / (C_A C_B)` and `J_L = (hbar/2e)^2 L_M / (L_A L_B)`.
/// The weak-coupling limit is enforced on `max(M/A, M/B)`.
pub fn coupling_from_elements(elements: CouplingElements) -> Result<(CouplingSpec, Option<CouplingWarning>)> {
    let (kind, m, a, b) = match elements {
        CouplingElements::Capacitive { c_m, c_a, c_b } => (CouplingKind::Capacitive, c_m, c_a, c_b),
        CouplingElements::Inductive { l_m, l_a, l_b } => (CouplingKind::Inductive, l_m, l_a, l_b),
    };
    if !m.is_finite() || m < 0.0 {
        return Err(Error::invalid("coupling element", format!("must be finite and >= 0, got {m}")));
    }
    for v in [a, b] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::invalid("circuit element", format!("must be positive, got {v}")));
        }
    }
    let ratio = (m / a).max(m / b);
    if ratio > COUPLING_MAX_RATIO {
        return Err(Error::CouplingLimit { ratio, limit: COUPLING_MAX_RATIO });
    }
    let warning = (ratio >= COUPLING_WARN_RATIO).then_some(CouplingWarning { ratio });

    let strength = match kind {
        CouplingKind::Capacitive => {
            let (m, a, b) = (m * 1e-15, a * 1e-15, b * 1e-15);
            4.0 * units::ELEMENTARY_CHARGE.powi(2) * m / (a * b) / units::PLANCK / 1e9
        }
        CouplingKind::Inductive => {
            let (m, a, b) = (m * 1e-9, a * 1e-9, b * 1e-9);
            units::reduced_flux_quantum_squared() * m / (a * b) / units::PLANCK / 1e9
        }
    };
    Ok((CouplingSpec { kind, strength }, warning))
}

/// Bare product-state label `|k l>` (qubit A level, qubit B level).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BareLabel(pub usize, pub usize);

impl fmt::Display for BareLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// The four computational labels in the fixed order 00, 01, 10, 11.
pub const COMPUTATIONAL: [BareLabel; 4] = [BareLabel(0, 0), BareLabel(0, 1), BareLabel(1, 0), BareLabel(1, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DressedOperator {
    NA,
    NB,
    PhiA,
    PhiB,
}

/// Interacting two-qubit system diagonalized in the product basis of the
/// truncated single-qubit eigenstates.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    pub qubit_a: QubitEigensystem,
    pub qubit_b: QubitEigensystem,
    pub coupling: CouplingSpec,
    /// Ascending dressed energies (GHz), measured from the bare ground state.
    pub dressed_energies: Vec<f64>,
    /// Bare label of each dressed state.
    pub labels: Vec<BareLabel>,
    /// Squared overlap of each dressed state with its label.
    pub label_overlaps: Vec<f64>,
    /// Dressed eigenvectors as columns in the bare product basis (`k * n_keep + l`).
    pub eigenvectors: DMatrix<f64>,
    pub n_a: DMatrix<Complex64>,
    pub n_b: DMatrix<Complex64>,
    pub phi_a: DMatrix<Complex64>,
    pub phi_b: DMatrix<Complex64>,
    dressed_of_bare: Vec<usize>,
}

fn identity(n: usize) -> DMatrix<Complex64> {
    DMatrix::identity(n, n)
}

/// Real part of a matrix whose imaginary part must vanish identically.
fn real_part(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    debug_assert!(m.iter().all(|z| z.im.abs() <= 1e-12 * (1.0 + z.re.abs())));
    m.map(|z| z.re)
}

/// Builds, diagonalizes, and labels the coupled Hamiltonian
/// `H_A + H_B + V`.
pub fn assemble(qubit_a: &QubitEigensystem, qubit_b: &QubitEigensystem, coupling: CouplingSpec) -> Result<CoupledSystem> {
    if qubit_a.n_keep != qubit_b.n_keep {
        return Err(Error::invalid(
            "n_keep",
            format!("qubits keep different level counts ({} vs {})", qubit_a.n_keep, qubit_b.n_keep),
        ));
    }
    let n = qubit_a.n_keep;
    let dim = n * n;
    let id = identity(n);

    let n_a = linalg::kron(&qubit_a.n_op, &id);
    let n_b = linalg::kron(&id, &qubit_b.n_op);
    let phi_a = linalg::kron(&qubit_a.phi_op, &id);
    let phi_b = linalg::kron(&id, &qubit_b.phi_op);

    let interaction = match coupling.kind {
        CouplingKind::Capacitive => (&n_a * &n_b) * Complex64::new(coupling.strength, 0.0),
        CouplingKind::Inductive => (&phi_a * &phi_b) * Complex64::new(-coupling.strength, 0.0),
    };
    // Charge operators are purely imaginary and flux operators real in the
    // eigenbasis, so both interactions are real symmetric.
    let mut h = real_part(&interaction);
    for k in 0..n {
        for l in 0..n {
            h[(k * n + l, k * n + l)] += qubit_a.energies[k] + qubit_b.energies[l];
        }
    }
    let h = (&h + h.transpose()) * 0.5;
    let (dressed_energies, eigenvectors) = linalg::eigh_sorted(h);

    let (labels, label_overlaps) = label_states(&eigenvectors, n)?;
    let mut dressed_of_bare = vec![0; dim];
    for (dressed, label) in labels.iter().enumerate() {
        dressed_of_bare[label.0 * n + label.1] = dressed;
    }

    Ok(CoupledSystem {
        qubit_a: qubit_a.clone(),
        qubit_b: qubit_b.clone(),
        coupling,
        dressed_energies,
        labels,
        label_overlaps,
        n_a: linalg::rotate(&n_a, &eigenvectors),
        n_b: linalg::rotate(&n_b, &eigenvectors),
        phi_a: linalg::rotate(&phi_a, &eigenvectors),
        phi_b: linalg::rotate(&phi_b, &eigenvectors),
        eigenvectors,
        dressed_of_bare,
    })
}

/// Greedy maximum-overlap matching of dressed states onto bare labels.
fn label_states(vectors: &DMatrix<f64>, n: usize) -> Result<(Vec<BareLabel>, Vec<f64>)> {
    let dim = vectors.ncols();
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(dim * dim);
    for dressed in 0..dim {
        for bare in 0..dim {
            candidates.push((vectors[(bare, dressed)].powi(2), dressed, bare));
        }
    }
    // Descending overlap; ties broken by (dressed, bare) for determinism.
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut bare_of: Vec<Option<(usize, f64)>> = vec![None; dim];
    let mut bare_taken = vec![false; dim];
    let mut remaining = dim;
    for (overlap, dressed, bare) in candidates {
        if remaining == 0 {
            break;
        }
        if bare_of[dressed].is_some() || bare_taken[bare] {
            continue;
        }
        bare_of[dressed] = Some((bare, overlap));
        bare_taken[bare] = true;
        remaining -= 1;
    }

    let mut labels = Vec::with_capacity(dim);
    let mut overlaps = Vec::with_capacity(dim);
    for (dressed, entry) in bare_of.into_iter().enumerate() {
        let (bare, overlap) = entry.expect("greedy matching covers every dressed state");
        let label = BareLabel(bare / n, bare % n);
        if overlap < MIN_LABEL_OVERLAP {
            return Err(Error::AmbiguousLabel { dressed, k: label.0, l: label.1, overlap });
        }
        labels.push(label);
        overlaps.push(overlap);
    }
    Ok((labels, overlaps))
}

/// Frequency mismatch, crosstalk, and single-qubit detuning (all GHz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateFiguresOfMerit {
    /// `w(11->21) - w(10->20)`
    pub delta_omega: f64,
    /// `w(00->01) - w(10->11)`
    pub delta_c: f64,
    /// `|w_A(1->2) - w_B(1->2)|`
    pub delta: f64,
}

impl CoupledSystem {
    pub fn n_keep(&self) -> usize {
        self.qubit_a.n_keep
    }

    pub fn dim(&self) -> usize {
        self.dressed_energies.len()
    }

    /// Dressed index of the state connected to `label`.
    pub fn index(&self, label: BareLabel) -> Result<usize> {
        let n = self.n_keep();
        if label.0 >= n || label.1 >= n {
            return Err(Error::UnresolvedLabel(label.0, label.1));
        }
        Ok(self.dressed_of_bare[label.0 * n + label.1])
    }

    pub fn energy(&self, label: BareLabel) -> Result<f64> {
        Ok(self.dressed_energies[self.index(label)?])
    }

    /// `w(from -> to)` in GHz.
    pub fn frequency(&self, from: BareLabel, to: BareLabel) -> Result<f64> {
        Ok(self.energy(to)? - self.energy(from)?)
    }

    pub fn operator(&self, op: DressedOperator) -> &DMatrix<Complex64> {
        match op {
            DressedOperator::NA => &self.n_a,
            DressedOperator::NB => &self.n_b,
            DressedOperator::PhiA => &self.phi_a,
            DressedOperator::PhiB => &self.phi_b,
        }
    }

    /// `|<from|O|to>|` between dressed states.
    pub fn matrix_element(&self, op: DressedOperator, from: BareLabel, to: BareLabel) -> Result<f64> {
        let (i, j) = (self.index(from)?, self.index(to)?);
        Ok(self.operator(op)[(i, j)].norm())
    }

    pub fn figures_of_merit(&self) -> Result<GateFiguresOfMerit> {
        let l = BareLabel;
        let delta_omega = self.frequency(l(1, 1), l(2, 1))? - self.frequency(l(1, 0), l(2, 0))?;
        let delta_c = self.frequency(l(0, 0), l(0, 1))? - self.frequency(l(1, 0), l(1, 1))?;
        let delta = (self.qubit_a.transition(1, 2)? - self.qubit_b.transition(1, 2)?).abs();
        Ok(GateFiguresOfMerit { delta_omega, delta_c, delta })
    }
}

/// Figures of merit of an assembled system.
pub fn figures_of_merit(sys: &CoupledSystem) -> Result<GateFiguresOfMerit> {
    sys.figures_of_merit()
}

/// `|<from|O|to>|` in the dressed basis.
pub fn dressed_matrix_element(sys: &CoupledSystem, op: DressedOperator, from: BareLabel, to: BareLabel) -> Result<f64> {
    sys.matrix_element(op, from, to)
}
