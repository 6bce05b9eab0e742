//! Finite-sequence diagnostics for convergence of ETS laws: vague distances
//! between extended measures, Gaussian-emergence matrices, shift gaps and
//! small-ball masses.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{EtsError, Result};
use crate::measures::{extended_to_rosinski, matrix_to_rows, AtomicMeasure, EtsSpec, Regime};
use crate::special::{truncated_gauss_kernel, ExtReal};

pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_EPSILONS: [f64; 5] = [0.5, 0.2, 0.1, 0.05, 0.02];
/// Radii `N` of the auxiliary Rosiński tail table.
pub const TAIL_RADII: [f64; 3] = [10.0, 100.0, 1000.0];
/// Number of radial hat functions in the vague-distance dictionary.
const HATS: usize = 8;

/// `Σ_{|x| < √ε} w · uuᵀ · g₀(ε/|x|)` over the finite atoms of `ν`.
pub fn h_epsilon_matrix(nu: &AtomicMeasure, alpha: f64, p: f64, epsilon: f64) -> Result<DMatrix<f64>> {
    crate::special::check_alpha_p(alpha, p)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(EtsError::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let d = nu.dimension();
    let mut h = DMatrix::zeros(d, d);
    let cut = epsilon.sqrt();
    for atom in nu.atoms() {
        let ExtReal::Finite(rho) = atom.radius() else { continue };
        if rho >= cut {
            continue;
        }
        let g = truncated_gauss_kernel(alpha, p, ExtReal::Finite(epsilon / rho));
        let u = atom.direction();
        for i in 0..d {
            for j in 0..d {
                h[(i, j)] += atom.weight * g * u[i] * u[j];
            }
        }
    }
    Ok(h)
}

/// Radial node `v_j` of the dictionary, in units of `1/radius`.
fn hat_node(j: usize, delta: f64) -> f64 {
    if j == 0 {
        0.0
    } else {
        (1.0 / delta) * 2f64.powi(j as i32 - HATS as i32)
    }
}

/// Value of radial hat `j` at `v = 1/radius`; each hat vanishes for `radius ≤ δ`.
fn hat(j: usize, v: f64, delta: f64) -> f64 {
    let c = hat_node(j, delta);
    let right = hat_node(j + 1, delta);
    if v >= c {
        if v >= right {
            0.0
        } else {
            (right - v) / (right - c)
        }
    } else {
        let left = hat_node(j - 1, delta);
        if v <= left {
            0.0
        } else {
            (v - left) / (c - left)
        }
    }
}

/// Direction functions: constants, coordinates and (for `d ≥ 2`) second-order harmonics.
fn direction_features(u: &[f64]) -> Vec<f64> {
    let d = u.len();
    let mut out = vec![1.0];
    out.extend_from_slice(u);
    match d {
        1 => {}
        2 => {
            out.push(u[0] * u[0] - u[1] * u[1]);
            out.push(2.0 * u[0] * u[1]);
        }
        _ => {
            for i in 0..d {
                for j in (i + 1)..d {
                    out.push(u[i] * u[j]);
                }
            }
            for i in 0..d - 1 {
                out.push(u[i] * u[i] - u[i + 1] * u[i + 1]);
            }
        }
    }
    out
}

/// Integrals of every dictionary function against `ν`.
fn dictionary_integrals(nu: &AtomicMeasure, delta: f64) -> Vec<f64> {
    let k = direction_features(&vec![0.0; nu.dimension()]).len();
    let mut out = vec![0.0; HATS * k];
    for atom in nu.atoms() {
        let v = 1.0 / atom.radius().value();
        let dirs = direction_features(atom.direction());
        for j in 0..HATS {
            let hv = hat(j, v, delta);
            if hv == 0.0 {
                continue;
            }
            for (i, g) in dirs.iter().enumerate() {
                out[j * k + i] += atom.weight * hv * g;
            }
        }
    }
    out
}

/// Number of test functions used by [`vague_distance`] in dimension `d`.
pub fn dictionary_size(d: usize) -> usize {
    HATS * direction_features(&vec![0.0; d]).len()
}

/// Largest difference of integrals over a fixed dictionary of test functions that
/// vanish for `|x| ≤ δ` and extend continuously to the sphere at infinity.
pub fn vague_distance(nu1: &AtomicMeasure, nu2: &AtomicMeasure, delta: f64) -> Result<f64> {
    if nu1.dimension() != nu2.dimension() {
        return Err(EtsError::DimensionMismatch {
            expected: nu1.dimension(),
            found: nu2.dimension(),
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(EtsError::invalid(format!("delta must be positive, got {delta}")));
    }
    let a = dictionary_integrals(nu1, delta);
    let b = dictionary_integrals(nu2, delta);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `ν_n(|x| < ε)` for every measure and every `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallBallTable {
    pub epsilons: Vec<f64>,
    /// `masses[n][k]` is the mass of the `n`-th measure below radius `epsilons[k]`.
    pub masses: Vec<Vec<f64>>,
}

pub fn no_gauss_diagnostic(seq: &[AtomicMeasure], epsilons: &[f64]) -> SmallBallTable {
    SmallBallTable {
        epsilons: epsilons.to_vec(),
        masses: seq
            .iter()
            .map(|nu| epsilons.iter().map(|&e| nu.mass_below(e)).collect())
            .collect(),
    }
}

/// `A_n + H_n^ε` at one `(n, ε)` cell and its Frobenius distance to the target `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianEntry {
    pub index: usize,
    pub epsilon: f64,
    pub matrix: Vec<Vec<f64>>,
    pub gap: f64,
}

/// Rosiński-side tail functionals beyond radius `N`: `Σ w log|x|` (α = 0), `Σ w` (α < 0)
/// or `Σ w |x|^α` (α > 0) over atoms with `|x| > N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub index: usize,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Mass already sitting on the sphere at infinity.
    pub stable_mass: f64,
}

pub fn rosinski_tail_table(seq: &[AtomicMeasure], alpha: f64) -> Result<Vec<TailRow>> {
    seq.iter()
        .enumerate()
        .map(|(index, nu)| {
            let (r, stable) = extended_to_rosinski(nu, alpha)?;
            let values = TAIL_RADII
                .iter()
                .map(|&n| {
                    r.atoms()
                        .iter()
                        .filter(|a| a.radius().value() > n)
                        .map(|a| {
                            let x = a.radius().value();
                            a.weight
                                * match Regime::of(alpha) {
                                    Regime::Zero => x.ln(),
                                    Regime::Negative => 1.0,
                                    Regime::Stable => x.powf(alpha),
                                }
                        })
                        .sum()
                })
                .collect();
            Ok(TailRow {
                index,
                radii: TAIL_RADII.to_vec(),
                values,
                stable_mass: stable.total_mass(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub alpha: f64,
    pub p: f64,
    pub delta: f64,
    pub epsilons: Vec<f64>,
    pub vague_distances: Vec<f64>,
    pub shift_gaps: Vec<f64>,
    pub gaussian_matrices: Vec<GaussianEntry>,
    pub no_gauss_diagnostic: SmallBallTable,
    pub rosinski_tails: Vec<TailRow>,
    pub verdict_notes: Vec<String>,
}

impl ConvergenceReport {
    /// Gap to the target Gaussian matrix at sequence index `n` and the `k`-th epsilon.
    pub fn gaussian_gap(&self, n: usize, k: usize) -> f64 {
        self.gaussian_matrices[n * self.epsilons.len() + k].gap
    }
}

fn trend_note(name: &str, xs: &[f64]) -> String {
    if xs.len() < 2 {
        return format!("{name}: single value {:.3e}", xs.first().copied().unwrap_or(0.0));
    }
    let nonincreasing = xs.windows(2).all(|w| w[1] <= w[0]);
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    let shape = if nonincreasing { "nonincreasing" } else { "not monotone" };
    format!("{name}: {shape}, from {first:.3e} to {last:.3e}")
}

/// Collects the convergence diagnostics of `seq` against `target`.
///
/// Nothing here decides convergence; the report only lays out the finite-`n`,
/// finite-`ε` values whose trends the conditions are about.
pub fn check_limit_conditions(
    seq: &[EtsSpec],
    target: &EtsSpec,
    epsilons: &[f64],
    delta: f64,
) -> Result<ConvergenceReport> {
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(EtsError::invalid("epsilons must be positive and nonempty"));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(EtsError::invalid("epsilons must be strictly decreasing"));
    }
    if !(delta > 0.0) {
        return Err(EtsError::invalid("delta must be positive"));
    }
    for s in seq {
        if s.alpha != target.alpha || s.p != target.p || s.dimension() != target.dimension() {
            return Err(EtsError::ParameterMismatch(format!(
                "sequence member (alpha {}, p {}, d {}) vs target (alpha {}, p {}, d {})",
                s.alpha,
                s.p,
                s.dimension(),
                target.alpha,
                target.p,
                target.dimension()
            )));
        }
    }
    let (alpha, p) = (target.alpha, target.p);
    let vague_distances = seq
        .iter()
        .map(|s| vague_distance(&s.nu, &target.nu, delta))
        .collect::<Result<Vec<_>>>()?;
    let shift_gaps: Vec<f64> = seq
        .iter()
        .map(|s| {
            s.b.iter()
                .zip(&target.b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut gaussian_matrices = Vec::with_capacity(seq.len() * epsilons.len());
    for (index, s) in seq.iter().enumerate() {
        for &epsilon in epsilons {
            let m = &s.a + h_epsilon_matrix(&s.nu, alpha, p, epsilon)?;
            let gap = (&m - &target.a).norm();
            gaussian_matrices.push(GaussianEntry {
                index,
                epsilon,
                matrix: matrix_to_rows(&m),
                gap,
            });
        }
    }
    let measures: Vec<AtomicMeasure> = seq.iter().map(|s| s.nu.clone()).collect();
    let no_gauss = no_gauss_diagnostic(&measures, epsilons);
    let rosinski_tails = rosinski_tail_table(&measures, alpha)?;

    let mut notes = vec![
        trend_note("vague distance", &vague_distances),
        trend_note("shift gap", &shift_gaps),
    ];
    for (k, &e) in epsilons.iter().enumerate() {
        let gaps: Vec<f64> = (0..seq.len())
            .map(|n| gaussian_matrices[n * epsilons.len() + k].gap)
            .collect();
        notes.push(trend_note(&format!("Gaussian gap at epsilon {e}"), &gaps));
    }
    Ok(ConvergenceReport {
        alpha,
        p,
        delta,
        epsilons: epsilons.to_vec(),
        vague_distances,
        shift_gaps,
        gaussian_matrices,
        no_gauss_diagnostic: no_gauss,
        rosinski_tails,
        verdict_notes: notes,
    })
}
