//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls into the library's solvers: the single-qubit spectrum
//! comes from a real-space finite-difference grid, the coupled spectrum from a
//! cyclic Jacobi diagonalization with adiabatic state tracking, and the
//! fidelity from Monte-Carlo averaging over Haar-random states.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Eighth-order central stencil for the second derivative.
const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
/// Eighth-order central stencil for the first derivative (offsets 1..=4).
const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const BAND: usize = 4;

/// Fluxonium Hamiltonian on a uniform flux grid with Dirichlet walls.
pub struct FluxGrid {
    pub h: f64,
    pub phi: Vec<f64>,
    /// Banded symmetric matrix: `band[k][i] = H[i][i + k]`.
    band: Vec<Vec<f64>>,
}

impl FluxGrid {
    pub fn new(e_c: f64, e_l: f64, e_j: f64, phi_ext: f64, half_width: f64, points: usize) -> Self {
        let h = 2.0 * half_width / (points + 1) as f64;
        let phi: Vec<f64> = (1..=points).map(|i| -half_width + i as f64 * h).collect();
        let kinetic = -4.0 * e_c / (h * h);
        let mut band = vec![vec![0.0; points]; BAND + 1];
        for i in 0..points {
            let x = phi[i];
            band[0][i] = kinetic * D2[0] + 0.5 * e_l * x * x - e_j * (x - phi_ext).cos();
            for k in 1..=BAND {
                if i + k < points {
                    band[k][i] = kinetic * D2[k];
                }
            }
        }
        Self { h, phi, band }
    }

    /// Standard grid over [-8 pi, 8 pi].
    pub fn standard(e_c: f64, e_l: f64, e_j: f64, phi_ext: f64) -> Self {
        Self::new(e_c, e_l, e_j, phi_ext, 8.0 * PI, 4000)
    }

    fn len(&self) -> usize {
        self.phi.len()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > BAND { 0.0 } else { self.band[k][lo] }
    }

    /// Banded LDL^T of `H - sigma`: returns (L band, D).
    fn factor(&self, sigma: f64) -> (Vec<[f64; BAND]>, Vec<f64>) {
        let n = self.len();
        // l[i][m] = L[i][i - 1 - m]
        let mut l = vec![[0.0; BAND]; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(BAND);
            for j in lo..i {
                let mut s = self.entry(i, j);
                for k in j.saturating_sub(BAND).max(lo)..j {
                    s -= l[i][i - 1 - k] * l[j][j - 1 - k] * d[k];
                }
                l[i][i - 1 - j] = s / d[j];
            }
            let mut s = self.entry(i, i) - sigma;
            for k in lo..i {
                s -= l[i][i - 1 - k].powi(2) * d[k];
            }
            d[i] = if s == 0.0 { -1e-300 } else { s };
        }
        (l, d)
    }

    /// Number of eigenvalues below `sigma` (Sylvester inertia).
    pub fn count_below(&self, sigma: f64) -> usize {
        self.factor(sigma).1.iter().filter(|&&x| x < 0.0).count()
    }

    /// The lowest `count` eigenvalues by bisection on the inertia count.
    pub fn lowest(&self, count: usize) -> Vec<f64> {
        // Gershgorin bounds.
        let n = self.len();
        let radius = |i: usize| -> f64 {
            (i.saturating_sub(BAND)..(i + BAND + 1).min(n)).filter(|&j| j != i).map(|j| self.entry(i, j).abs()).sum()
        };
        let lower = (0..n).map(|i| self.entry(i, i) - radius(i)).fold(f64::INFINITY, f64::min);
        let upper = (0..n).map(|i| self.entry(i, i) + radius(i)).fold(f64::NEG_INFINITY, f64::max);
        (0..count)
            .map(|k| {
                let (mut lo, mut hi) = (lower, upper);
                for _ in 0..200 {
                    if hi - lo <= 1e-12 * (1.0 + lo.abs().min(hi.abs())) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if self.count_below(mid) > k { hi = mid } else { lo = mid }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    fn solve(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let (l, d) = self.factor(sigma);
        let mut y = rhs.to_vec();
        for i in 0..n {
            for j in i.saturating_sub(BAND)..i {
                y[i] -= l[i][i - 1 - j] * y[j];
            }
        }
        for i in 0..n {
            y[i] /= d[i];
        }
        for i in (0..n).rev() {
            for j in i + 1..(i + BAND + 1).min(n) {
                y[i] -= l[j][j - 1 - i] * y[j];
            }
        }
        y
    }

    /// Normalized eigenvector near `energy` by inverse iteration.
    pub fn eigenvector(&self, energy: f64) -> Vec<f64> {
        let n = self.len();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let sigma = energy + 1e-9;
        for _ in 0..4 {
            v = self.solve(sigma, &v);
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * self.h).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    /// `<a|d/dphi|b>` (real); the charge element is `-i` times this.
    pub fn derivative_element(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.len();
        let mut s = 0.0;
        for i in 0..n {
            let mut db = 0.0;
            for (k, c) in D1.iter().enumerate() {
                let off = k + 1;
                let fwd = if i + off < n { b[i + off] } else { 0.0 };
                let bwd = if i >= off { b[i - off] } else { 0.0 };
                db += c * (fwd - bwd);
            }
            s += a[i] * db / self.h;
        }
        s * self.h
    }

    /// `<a|phi|b>` (real).
    pub fn flux_element(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.phi).map(|((x, y), p)| x * y * p).sum::<f64>() * self.h
    }
}

/// Lowest levels relative to the ground state.
pub fn grid_levels(e_c: f64, e_l: f64, e_j: f64, phi_ext: f64, count: usize) -> Vec<f64> {
    let levels = FluxGrid::standard(e_c, e_l, e_j, phi_ext).lowest(count);
    levels.iter().map(|e| e - levels[0]).collect()
}

/// Single-qubit data from the grid: shifted energies and signed operator
/// tables in the grid eigenbasis. `ddphi[i][j] = <i|d/dphi|j>` so that
/// `<i|n|j> = -i ddphi[i][j]`.
pub struct GridQubit {
    pub e_c: f64,
    pub energies: Vec<f64>,
    pub ddphi: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
}

impl GridQubit {
    pub fn n_abs(&self, i: usize, j: usize) -> f64 {
        self.ddphi[i][j].abs()
    }

    pub fn phi_abs(&self, i: usize, j: usize) -> f64 {
        self.phi[i][j].abs()
    }
}

pub fn grid_qubit(e_c: f64, e_l: f64, e_j: f64, phi_ext: f64, count: usize) -> GridQubit {
    let grid = FluxGrid::standard(e_c, e_l, e_j, phi_ext);
    let levels = grid.lowest(count);
    let vectors: Vec<Vec<f64>> = levels.iter().map(|&e| grid.eigenvector(e)).collect();
    let table = |f: &dyn Fn(&[f64], &[f64]) -> f64| -> Vec<Vec<f64>> {
        (0..count).map(|i| (0..count).map(|j| f(&vectors[i], &vectors[j])).collect()).collect()
    };
    GridQubit {
        e_c,
        energies: levels.iter().map(|e| e - levels[0]).collect(),
        ddphi: table(&|a, b| grid.derivative_element(a, b)),
        phi: table(&|a, b| grid.flux_element(a, b)),
    }
}

/// Cyclic Jacobi eigenvalue algorithm for a real symmetric matrix.
/// Returns eigenvalues and eigenvectors (columns of `v`), unsorted.
pub fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i][j] * a[i][j];
                }
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn coupled_matrix(qa: &GridQubit, qb: &GridQubit, capacitive: bool, strength: f64) -> Vec<Vec<f64>> {
    let n = qa.energies.len();
    let dim = n * n;
    let mut h = vec![vec![0.0; dim]; dim];
    for k in 0..n {
        for l in 0..n {
            for kp in 0..n {
                for lp in 0..n {
                    // n_A n_B = (-i d_A)(-i d_B) = -d_A d_B
                    let v = if capacitive {
                        -strength * qa.ddphi[k][kp] * qb.ddphi[l][lp]
                    } else {
                        -strength * qa.phi[k][kp] * qb.phi[l][lp]
                    };
                    h[k * n + l][kp * n + lp] = v;
                }
            }
            h[k * n + l][k * n + l] += qa.energies[k] + qb.energies[l];
        }
    }
    h
}

/// Coupled energies indexed by bare label `k * n + l`, following each state
/// continuously from zero coupling in `substeps` increments.
pub fn tracked_coupled_energies(qa: &GridQubit, qb: &GridQubit, capacitive: bool, strength: f64, substeps: usize) -> Vec<f64> {
    let n = qa.energies.len();
    let dim = n * n;
    // At zero coupling the bare state |k l> is the unit vector k * n + l.
    let mut previous: Vec<Vec<f64>> = (0..dim)
        .map(|b| (0..dim).map(|i| if i == b { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut energies = vec![0.0; dim];
    for step in 1..=substeps {
        let j = strength * step as f64 / substeps as f64;
        let (values, vectors) = jacobi(coupled_matrix(qa, qb, capacitive, j));
        let mut taken = vec![false; dim];
        let mut next = previous.clone();
        for (label, prev) in previous.iter().enumerate() {
            let (best, _) = (0..dim)
                .filter(|&c| !taken[c])
                .map(|c| (c, (0..dim).map(|i| vectors[i][c] * prev[i]).sum::<f64>().abs()))
                .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            taken[best] = true;
            let sign = (0..dim).map(|i| vectors[i][best] * prev[i]).sum::<f64>().signum();
            next[label] = (0..dim).map(|i| sign * vectors[i][best]).collect();
            energies[label] = values[best];
        }
        previous = next;
    }
    if substeps == 0 {
        for k in 0..n {
            for l in 0..n {
                energies[k * n + l] = qa.energies[k] + qb.energies[l];
            }
        }
    }
    energies
}

/// Average of `|<psi|M|psi>|^2` over Haar-random pure states of dimension 4.
pub fn haar_average(m: &[[Complex64; 4]; 4], samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..samples {
        let mut psi = [Complex64::new(0.0, 0.0); 4];
        for z in psi.iter_mut() {
            *z = Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);
        let mut amp = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                amp += psi[i].conj() * m[i][j] * psi[j];
            }
        }
        total += amp.norm_sqr();
    }
    total / samples as f64
}
