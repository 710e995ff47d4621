mod common;

use std::f64::consts::PI;

use fluxcz::circuit::{DEFAULT_BASIS_SIZE, DEFAULT_N_KEEP};
use fluxcz::linalg::hermiticity_defect;
use fluxcz::units;
use fluxcz::*;
use proptest::prelude::*;

// Finite-difference grid values for the reference qubits at the sweet spot.
const GRID_A: [f64; 5] = [0.0, 0.605954692437, 5.620319818232, 8.864818018484, 13.274141253483];
const GRID_B: [f64; 5] = [0.0, 0.354325243126, 5.120682933774, 7.638559758572, 11.552931389058];
// |n_01|, |n_12| on the same grid.
const GRID_N_A: [f64; 2] = [0.118890750892, 0.556116585659];
const GRID_N_B: [f64; 2] = [0.089327155968, 0.576432540568];

fn reference(params: FluxoniumParams) -> QubitEigensystem {
    QubitEigensystem::new(&params, DEFAULT_N_KEEP).unwrap()
}

#[test]
fn matches_frozen_grid_spectrum() {
    for (params, grid, n) in [
        (FluxoniumParams::reference_a(), GRID_A, GRID_N_A),
        (FluxoniumParams::reference_b(), GRID_B, GRID_N_B),
    ] {
        let q = reference(params);
        for (k, &e) in grid.iter().enumerate() {
            assert!((q.energies[k] - e).abs() < 1e-6, "level {k}: {} vs {e}", q.energies[k]);
        }
        assert!((q.n_element(0, 1).unwrap() - n[0]).abs() < 1e-6);
        assert!((q.n_element(1, 2).unwrap() - n[1]).abs() < 1e-6);
    }
}

#[test]
fn matches_live_grid_oracle() {
    for (e_c, e_l, e_j, phi_ext) in [(1.5, 1.0, 5.5, PI), (1.2, 1.0, 5.7, PI), (1.0, 0.8, 4.0, 2.3), (2.0, 1.5, 3.0, 0.7)] {
        let grid = common::grid_qubit(e_c, e_l, e_j, phi_ext, 5);
        let q = reference(FluxoniumParams::new(e_c, e_l, e_j, phi_ext).unwrap());
        for k in 0..5 {
            assert!((grid.energies[k] - q.energies[k]).abs() < 1e-6, "({e_c}, {e_l}, {e_j}, {phi_ext}) level {k}");
            for j in 0..5 {
                assert!((grid.n_abs(k, j) - q.n_element(k, j).unwrap()).abs() < 1e-6, "({e_c}, {e_l}, {e_j}, {phi_ext}) n{k}{j}: {} vs {}", grid.n_abs(k, j), q.n_element(k, j).unwrap());
                assert!((grid.phi_abs(k, j) - q.phi_element(k, j).unwrap()).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn charge_element_ratio() {
    let q = reference(FluxoniumParams::reference_a());
    let ratio = q.n_element(1, 2).unwrap() / q.n_element(0, 1).unwrap();
    let grid = GRID_N_A[1] / GRID_N_A[0];
    assert!((ratio - grid).abs() < 1e-5 * grid);
    assert!(ratio > 4.0);
}

#[test]
fn detuning_of_reference_pair() {
    let a = reference(FluxoniumParams::reference_a());
    let b = reference(FluxoniumParams::reference_b());
    let delta = a.transition(1, 2).unwrap() - b.transition(1, 2).unwrap();
    let grid = (GRID_A[2] - GRID_A[1]) - (GRID_B[2] - GRID_B[1]);
    assert!((delta - grid).abs() < 1e-6);
    assert!((delta.abs() - 0.248).abs() < 1e-3);
}

#[test]
fn basis_convergence() {
    for params in [FluxoniumParams::reference_a(), FluxoniumParams::reference_b()] {
        let base = diagonalize(&params, DEFAULT_N_KEEP, DEFAULT_BASIS_SIZE).unwrap();
        let big = diagonalize(&params, DEFAULT_N_KEEP, DEFAULT_BASIS_SIZE * 3 / 2).unwrap();
        for (x, y) in base.energies.iter().zip(&big.energies) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn sweet_spot_parity() {
    for params in [FluxoniumParams::reference_a(), FluxoniumParams::reference_b()] {
        let q = diagonalize(&params, 8, DEFAULT_BASIS_SIZE).unwrap();
        let scale_n = q.n_op.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale_phi = q.phi_op.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..8 {
            for j in 0..8 {
                if (i + j) % 2 == 0 {
                    assert!(q.n_op[(i, j)].norm() < 1e-8 * scale_n, "n {i}{j}");
                    assert!(q.phi_op[(i, j)].norm() < 1e-8 * scale_phi, "phi {i}{j}");
                } else {
                    assert!(q.n_op[(i, j)].norm() > 1e-6 * scale_n, "n {i}{j} should be allowed");
                }
            }
        }
    }
}

#[test]
fn element_conversions() {
    let c = units::capacitance_for_charging_energy(1.5).unwrap();
    assert!((c - 12.913486216439416).abs() < 1e-9 * c);
    assert!((units::charging_energy_ghz(12.9).unwrap() - 1.5015681647022574).abs() < 1e-12);
    let l = units::inductance_for_inductive_energy(1.0).unwrap();
    assert!((l - 163.46151280678123).abs() < 1e-9 * l);
    let e = units::energies_from_elements(c, l).unwrap();
    assert!((e.e_c - 1.5).abs() < 1e-12 && (e.e_l - 1.0).abs() < 1e-12);
}

fn qubit_params() -> impl Strategy<Value = FluxoniumParams> {
    (0.5f64..2.5, 0.5f64..1.5, 1.0f64..8.0, 0.0f64..(2.0 * PI))
        .prop_map(|(e_c, e_l, e_j, phi)| FluxoniumParams::new(e_c, e_l, e_j, phi).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_is_symmetric(params in qubit_params()) {
        let h = build_hamiltonian(&params, DEFAULT_BASIS_SIZE).unwrap();
        let defect = (&h - h.transpose()).norm() / h.norm();
        prop_assert!(defect <= 1e-12);
    }

    #[test]
    fn commutator_identity(params in qubit_params()) {
        let q = QubitEigensystem::new(&params, 6).unwrap();
        for i in 0..6 {
            for f in 0..6 {
                let lhs = q.transition(i, f).unwrap().abs() * q.phi_element(i, f).unwrap();
                let rhs = 8.0 * params.e_c * q.n_element(i, f).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-6 * lhs.max(rhs) + 1e-12, "{i}{f}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn operators_are_hermitian(params in qubit_params()) {
        let q = QubitEigensystem::new(&params, 6).unwrap();
        prop_assert!(hermiticity_defect(&q.n_op) <= 1e-12);
        prop_assert!(hermiticity_defect(&q.phi_op) <= 1e-12);
    }

    #[test]
    fn transitions_antisymmetric(params in qubit_params(), i in 0usize..5, f in 0usize..5) {
        let q = QubitEigensystem::new(&params, 5).unwrap();
        prop_assert_eq!(q.transition(i, f).unwrap(), -q.transition(f, i).unwrap());
        prop_assert_eq!(q.energies[0], 0.0);
    }
}
