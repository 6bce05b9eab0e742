//! Characteristic exponents of ETS laws and CF-based distances.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EtsError, Result};
use crate::measures::{dot, wedge, EtsSpec};
use crate::special::{psi_unchecked, ExtReal, QuadratureConfig};

/// Evaluation points for characteristic functions; always contains the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct CfGrid {
    points: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    points: Vec<Vec<f64>>,
}

impl TryFrom<RawGrid> for CfGrid {
    type Error = EtsError;
    fn try_from(raw: RawGrid) -> Result<Self> {
        CfGrid::new(raw.points)
    }
}

impl From<CfGrid> for RawGrid {
    fn from(g: CfGrid) -> Self {
        RawGrid { points: g.points }
    }
}

impl CfGrid {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(EtsError::invalid("grid must be nonempty"));
        };
        let d = first.len();
        if d == 0 {
            return Err(EtsError::invalid("grid points must be nonempty vectors"));
        }
        for z in &points {
            if z.len() != d {
                return Err(EtsError::DimensionMismatch { expected: d, found: z.len() });
            }
            if z.iter().any(|v| !v.is_finite()) {
                return Err(EtsError::invalid("grid point has a non-finite entry"));
            }
        }
        if !points.iter().any(|z| z.iter().all(|&v| v == 0.0)) {
            return Err(EtsError::invalid("grid must contain the origin"));
        }
        Ok(CfGrid { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `n` equally spaced points on `[lo, hi]` in one dimension, plus the origin if missed.
    pub fn uniform_1d(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(EtsError::invalid("need at least two points on a nondegenerate interval"));
        }
        let mut pts: Vec<Vec<f64>> = (0..n)
            .map(|k| vec![lo + (hi - lo) * k as f64 / (n - 1) as f64])
            .collect();
        if !pts.iter().any(|z| z[0] == 0.0) {
            pts.push(vec![0.0]);
        }
        CfGrid::new(pts)
    }

    /// Tensor grid of 13 points per axis on `[−3, 3]^d` for `d ≤ 2`; 500 Halton points
    /// (the first being the origin) in the same cube otherwise.
    pub fn default_for(d: usize) -> Self {
        let axis: Vec<f64> = (0..13).map(|k| -3.0 + 0.5 * k as f64).collect();
        let points = match d {
            1 => axis.iter().map(|&v| vec![v]).collect(),
            2 => axis
                .iter()
                .flat_map(|&a| axis.iter().map(move |&b| vec![a, b]))
                .collect(),
            _ => {
                let primes = first_primes(d);
                let mut pts = vec![vec![0.0; d]];
                for i in 1..500 {
                    pts.push(primes.iter().map(|&b| 6.0 * radical_inverse(i, b) - 3.0).collect());
                }
                pts
            }
        };
        CfGrid { points }
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn first_primes(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut k = 2;
    while out.len() < n {
        if out.iter().all(|p| k % p != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// `C(z) = −½⟨z, Az⟩ + i⟨b, z⟩ + ∫ (e^{i⟨z,x⟩} − 1 − i⟨z,x⟩/(1+|x|²)) M(dx)`.
pub fn char_exponent(spec: &EtsSpec, z: &[f64], cfg: &QuadratureConfig) -> Result<Complex64> {
    let d = spec.dimension();
    if z.len() != d {
        return Err(EtsError::DimensionMismatch { expected: d, found: z.len() });
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(EtsError::invalid("z must be finite"));
    }
    cfg.validate()?;
    let az = &spec.a * nalgebra::DVector::from_column_slice(z);
    let quad = dot(z, az.as_slice());
    let mut out = Complex64::new(-0.5 * quad, dot(&spec.b, z));
    for atom in spec.nu.atoms() {
        let s = dot(atom.direction(), z);
        if s == 0.0 {
            continue;
        }
        // the substitution r = t|x| turns each atom into a scaled ψ with taper scale |x|
        let term = match atom.radius() {
            ExtReal::Infinity => atom.weight * psi_unchecked(s, spec.alpha, spec.p, ExtReal::Infinity, cfg)?,
            ExtReal::Finite(rho) => {
                let m = atom.weight / wedge(rho, spec.alpha);
                m * rho.powf(spec.alpha) * psi_unchecked(s, spec.alpha, spec.p, ExtReal::Finite(rho), cfg)?
            }
        };
        out += term;
    }
    Ok(out)
}

/// Characteristic exponent at every grid point, evaluated in parallel, in grid order.
pub fn char_exponent_on(spec: &EtsSpec, grid: &CfGrid, cfg: &QuadratureConfig) -> Result<Vec<Complex64>> {
    if grid.dimension() != spec.dimension() {
        return Err(EtsError::DimensionMismatch {
            expected: spec.dimension(),
            found: grid.dimension(),
        });
    }
    grid.points()
        .par_iter()
        .map(|z| char_exponent(spec, z, cfg))
        .collect()
}

/// Sum of two specs with matching `α`, `p` and dimension.
pub fn convolve(s1: &EtsSpec, s2: &EtsSpec) -> Result<EtsSpec> {
    if s1.alpha != s2.alpha || s1.p != s2.p {
        return Err(EtsError::ParameterMismatch(format!(
            "(alpha, p) = ({}, {}) vs ({}, {})",
            s1.alpha, s1.p, s2.alpha, s2.p
        )));
    }
    if s1.dimension() != s2.dimension() {
        return Err(EtsError::ParameterMismatch(format!(
            "dimension {} vs {}",
            s1.dimension(),
            s2.dimension()
        )));
    }
    let nu = s1.nu.add(&s2.nu)?.canonicalize();
    let b = s1.b.iter().zip(&s2.b).map(|(x, y)| x + y).collect();
    EtsSpec::new(s1.alpha, s1.p, &s1.a + &s2.a, nu, b)
}

/// `max_z |e^{C₁(z)} − e^{C₂(z)}|` over the grid.
pub fn cf_sup_distance(s1: &EtsSpec, s2: &EtsSpec, grid: &CfGrid, cfg: &QuadratureConfig) -> Result<f64> {
    if s1.dimension() != s2.dimension() {
        return Err(EtsError::DimensionMismatch {
            expected: s1.dimension(),
            found: s2.dimension(),
        });
    }
    let c1 = char_exponent_on(s1, grid, cfg)?;
    let c2 = char_exponent_on(s2, grid, cfg)?;
    Ok(sup_gap(&c1, &c2))
}

/// `max |e^{a_k} − e^{b_k}|` for two lists of exponents.
pub fn sup_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.exp() - y.exp()).norm())
        .fold(0.0, f64::max)
}
