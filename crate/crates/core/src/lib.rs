//! Simulation of a microwave-activated controlled-Z gate between two
//! fixed-frequency fluxonium qubits.
//!
//! The pipeline runs from single-circuit quantization ([`circuit`]) through
//! the coupled two-qubit spectrum ([`coupled`]) and driven dynamics
//! ([`dynamics`]) to the averaged gate fidelity and its optimization over the
//! drive ([`metrics`]).

pub mod circuit;
pub mod coupled;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod units;

pub use circuit::{build_hamiltonian, diagonalize, FluxoniumParams, QubitEigensystem};
pub use coupled::{
    assemble, coupling_from_elements, BareLabel, CoupledSystem, CouplingKind, CouplingSpec,
    DressedOperator, GateFiguresOfMerit,
};
pub use dynamics::{propagate, DrivePulse, PropagationResult};
pub use error::{Error, Result};
pub use metrics::{
    fidelity, optimize, project, ComputationalEvolution, FidelityReport, OptimizationOutcome,
    OptimizerSettings, TargetTransition,
};
