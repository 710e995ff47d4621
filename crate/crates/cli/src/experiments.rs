use fluxcz::coupled::DressedOperator as Op;
use fluxcz::{
    assemble, diagonalize, optimize, BareLabel, CoupledSystem, CouplingSpec, OptimizationOutcome, QubitEigensystem,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};
use crate::{Experiment, RunError};

fn qubits(cfg: &ExperimentConfig) -> Result<(QubitEigensystem, QubitEigensystem), RunError> {
    let n = &cfg.numerics;
    let a = diagonalize(&cfg.qubit_a.params("qubit_a")?, n.n_keep, n.basis_size)?;
    let b = diagonalize(&cfg.qubit_b.params("qubit_b")?, n.n_keep, n.basis_size)?;
    Ok((a, b))
}

fn coupled(cfg: &ExperimentConfig) -> Result<CoupledSystem, RunError> {
    let (a, b) = qubits(cfg)?;
    Ok(assemble(&a, &b, cfg.coupling.resolve()?)?)
}

pub fn run(kind: Experiment, cfg: &ExperimentConfig) -> Result<Table, RunError> {
    match kind {
        Experiment::Spectrum => spectrum(cfg),
        Experiment::CoupledSpectrum => coupled_spectrum(cfg),
        Experiment::FomSweep => fom_sweep(cfg),
        Experiment::GateVsTime => gate_vs_time(cfg),
        Experiment::GateVsCoupling => gate_vs_coupling(cfg),
    }
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let mut table = Table::new(&["qubit", "i", "f", "frequency_GHz", "n_abs", "phi_abs"]);
    let (a, b) = qubits(cfg)?;
    for (name, q) in [("A", &a), ("B", &b)] {
        for i in 0..q.n_keep {
            for f in i..q.n_keep {
                table.push(vec![
                    Cell::text(name),
                    Cell::Int(i),
                    Cell::Int(f),
                    Cell::Float(q.transition(i, f)?),
                    Cell::Float(q.n_element(i, f)?),
                    Cell::Float(q.phi_element(i, f)?),
                ]);
            }
        }
    }
    Ok(table)
}

const LOWEST_DRESSED: usize = 9;

fn coupled_spectrum(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let sys = coupled(cfg)?;
    let mut table = Table::new(&["from", "to", "frequency_GHz", "n_a", "n_b", "phi_a", "phi_b"]);
    let count = LOWEST_DRESSED.min(sys.dim());
    for i in 0..count {
        for j in i + 1..count {
            let element = |op| sys.operator(op)[(i, j)].norm();
            table.push(vec![
                Cell::text(sys.labels[i].to_string()),
                Cell::text(sys.labels[j].to_string()),
                Cell::Float(sys.dressed_energies[j] - sys.dressed_energies[i]),
                Cell::Float(element(Op::NA)),
                Cell::Float(element(Op::NB)),
                Cell::Float(element(Op::PhiA)),
                Cell::Float(element(Op::PhiB)),
            ]);
        }
    }
    Ok(table)
}

const FOM_ELEMENTS: [(Op, (usize, usize), (usize, usize)); 6] = [
    (Op::NA, (1, 1), (2, 1)),
    (Op::NB, (1, 1), (2, 1)),
    (Op::NA, (1, 0), (2, 0)),
    (Op::NB, (1, 0), (2, 0)),
    (Op::NA, (1, 0), (0, 2)),
    (Op::NB, (1, 0), (0, 2)),
];

fn fom_sweep(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let (a, b) = qubits(cfg)?;
    let kind = cfg.coupling.kind;
    let rows: Vec<Result<Vec<Cell>, RunError>> = cfg
        .sweep
        .values()?
        .par_iter()
        .map(|&j| {
            let sys = assemble(&a, &b, CouplingSpec::new(kind, j)?)?;
            let fom = sys.figures_of_merit()?;
            let mut row = vec![Cell::Float(j), Cell::Float(fom.delta_omega), Cell::Float(fom.delta_c), Cell::Float(fom.delta)];
            for (op, from, to) in FOM_ELEMENTS {
                row.push(Cell::Float(sys.matrix_element(op, BareLabel(from.0, from.1), BareLabel(to.0, to.1))?));
            }
            row.push(Cell::Float(sys.label_overlaps.iter().copied().fold(1.0, f64::min)));
            Ok(row)
        })
        .collect();
    let mut table = Table::new(&[
        "J_over_h_GHz",
        "delta_omega_GHz",
        "delta_c_GHz",
        "delta_GHz",
        "nA_11_21",
        "nB_11_21",
        "nA_10_20",
        "nB_10_20",
        "nA_10_02",
        "nB_10_02",
        "min_label_overlap",
    ]);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

const GATE_COLUMNS: [&str; 9] = [
    "error",
    "fidelity",
    "leakage",
    "conditional_phase",
    "amplitude_GHz",
    "omega_d_GHz",
    "detuning_GHz",
    "target_GHz",
    "evaluations",
];

fn gate_cells(out: &OptimizationOutcome) -> Vec<Cell> {
    vec![
        Cell::Float(1.0 - out.best_fidelity),
        Cell::Float(out.best_fidelity),
        Cell::Float(out.leakage),
        Cell::Float(out.best_report.conditional_phase),
        Cell::Float(out.best_pulse.amplitude),
        Cell::Float(out.best_pulse.omega_d),
        Cell::Float(out.best_pulse.omega_d - out.target_frequency),
        Cell::Float(out.target_frequency),
        Cell::Int(out.search_trace.len()),
    ]
}

fn gate_table(first: &'static str, rows: Vec<Result<(f64, OptimizationOutcome), RunError>>) -> Result<Table, RunError> {
    let mut header = vec![first];
    header.extend(GATE_COLUMNS);
    let mut table = Table::new(&header);
    for row in rows {
        let (x, out) = row?;
        let mut cells = vec![Cell::Float(x)];
        cells.extend(gate_cells(&out));
        table.push(cells);
    }
    Ok(table)
}

fn gate_vs_time(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let sys = coupled(cfg)?;
    let settings = cfg.optimizer();
    let d = cfg.drive;
    let rows = cfg
        .sweep
        .values()?
        .par_iter()
        .map(|&t_g| {
            let out = optimize(&sys, t_g, d.target, (d.eta_a, d.eta_b), &settings)?;
            log::info!("t_g = {t_g} ns: 1 - F = {:.3e}", 1.0 - out.best_fidelity);
            Ok((t_g, out))
        })
        .collect();
    gate_table("t_g_ns", rows)
}

fn gate_vs_coupling(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let (a, b) = qubits(cfg)?;
    let settings = cfg.optimizer();
    let d = cfg.drive;
    let kind = cfg.coupling.kind;
    let rows = cfg
        .sweep
        .values()?
        .par_iter()
        .map(|&j| {
            let sys = assemble(&a, &b, CouplingSpec::new(kind, j)?)?;
            let out = optimize(&sys, d.t_g, d.target, (d.eta_a, d.eta_b), &settings)?;
            log::info!("J = {j} GHz: 1 - F = {:.3e}", 1.0 - out.best_fidelity);
            Ok((j, out))
        })
        .collect();
    gate_table("J_over_h_GHz", rows)
}
