//! Discretization of extended measures, decomposition into elementary
//! tempered-stable components, and the Gaussian and stable seed sequences.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{EtsError, Result};
use crate::measures::{
    check_psd, dot, extended_to_rosinski, norm, rosinski_to_extended, Atom, AtomicMeasure, DirPoint,
    EtsSpec,
};
use crate::special::quad::{geometric, kernel_tail_bound, power_origin};
use crate::special::{check_alpha_p, psi_unchecked, tempered_power_integral, ExtReal, QuadratureConfig};

/// Largest exponent used when pushing atoms at infinity out to radius `2^n`.
const MAX_PUSH_EXPONENT: u32 = 1000;

/// One elementary vector `U x`, where `U` is infinitely divisible on the real line
/// with Lévy density `c t^{−1−α} e^{−t^p}` on `t > 0` and shift `b_scalar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementaryComponent {
    pub c: f64,
    pub x: Vec<f64>,
    pub b_scalar: f64,
}

impl ElementaryComponent {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(EtsError::invalid("component weight c must be positive"));
        }
        let r = norm(&self.x);
        if !(r > 0.0 && r.is_finite()) {
            return Err(EtsError::invalid("component vector x must be nonzero"));
        }
        if !self.b_scalar.is_finite() {
            return Err(EtsError::invalid("b_scalar must be finite"));
        }
        Ok(())
    }
}

/// Replaces atoms at infinity by atoms at radius `2^n` and drops atoms below radius `1/n`.
pub fn discretize_extended_measure(nu: &AtomicMeasure, n: u32, alpha: f64, p: f64) -> Result<AtomicMeasure> {
    check_alpha_p(alpha, p)?;
    if n == 0 {
        return Err(EtsError::invalid("n must be at least 1"));
    }
    let floor = 1.0 / n as f64;
    let far = 2f64.powi(n.min(MAX_PUSH_EXPONENT) as i32);
    let mut out = AtomicMeasure::empty(nu.dimension());
    for a in nu.atoms() {
        match a.radius() {
            ExtReal::Infinity => {
                let point = DirPoint {
                    radius: ExtReal::Finite(far),
                    direction: a.direction().to_vec(),
                };
                out.push(Atom::new(point, a.weight)?);
            }
            ExtReal::Finite(r) if r >= floor => out.push(a.clone()),
            ExtReal::Finite(_) => {}
        }
    }
    Ok(out)
}

/// Shift that makes `U x` carry the centering `t|x|/(1+t²|x|²)` of the full law
/// instead of the one-dimensional `t/(1+t²)`:
/// `c ∫_0^∞ t (1/(1+t²) − 1/(1+|x|²t²)) t^{−1−α} e^{−t^p} dt`.
///
/// The integrand is smooth and of one sign, so it is always integrated to near machine
/// precision regardless of `cfg`'s tolerances.
pub fn centering_shift(c: f64, radius: f64, alpha: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let cfg = &QuadratureConfig {
        abs_tol: cfg.abs_tol.min(1e-15),
        rel_tol: cfg.rel_tol.min(1e-13),
        max_subdivisions: cfg.max_subdivisions.max(2000),
    };
    let k = radius * radius - 1.0;
    if k == 0.0 {
        return Ok(0.0);
    }
    let r2 = radius * radius;
    let taper = |t: f64| (-t.powf(p)).exp();
    // integrand = t^{2−α} k / ((1+t²)(1+r²t²)) e^{−t^p}
    let h = |t: f64| k / ((1.0 + t * t) * (1.0 + r2 * t * t)) * taper(t);
    let near = power_origin(2.0 - alpha, 1.0, &h, cfg)?.value;
    let f = |t: f64| t.powf(2.0 - alpha) * h(t);
    let bound = k.abs() / r2;
    let tail = |t: f64| bound * kernel_tail_bound(-2.0 - alpha, p, 1.0, t);
    let far = geometric(&f, 1.0, f64::INFINITY, &tail, cfg)?.value;
    Ok(c * (near + far))
}

/// One elementary component per atom of the Rosiński measure of `ν` (no atoms at infinity).
pub fn to_elementary_sum(
    nu: &AtomicMeasure,
    alpha: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<ElementaryComponent>> {
    check_alpha_p(alpha, p)?;
    if nu.has_infinite_atoms() {
        return Err(EtsError::InfiniteRadiusAtom);
    }
    let (r, _) = extended_to_rosinski(nu, alpha)?;
    r.atoms()
        .iter()
        .map(|a| {
            let rho = a.radius().value();
            let x = a.point.to_vector().expect("finite atom");
            Ok(ElementaryComponent {
                c: a.weight,
                x,
                b_scalar: centering_shift(a.weight, rho, alpha, p, cfg)?,
            })
        })
        .collect()
}

/// Characteristic exponent of `Σ U_k x_k + shift`, computed component by component
/// from the one-dimensional laws of the `U_k`.
pub fn elementary_exponent(
    comps: &[ElementaryComponent],
    shift: &[f64],
    alpha: f64,
    p: f64,
    z: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if shift.len() != z.len() {
        return Err(EtsError::DimensionMismatch { expected: z.len(), found: shift.len() });
    }
    let mut out = Complex64::new(0.0, dot(shift, z));
    for comp in comps {
        if comp.x.len() != z.len() {
            return Err(EtsError::DimensionMismatch { expected: z.len(), found: comp.x.len() });
        }
        let lambda = dot(&comp.x, z);
        let cf = comp.c * psi_unchecked(lambda, alpha, p, ExtReal::Finite(1.0), cfg)?;
        out += cf + Complex64::new(0.0, lambda * comp.b_scalar);
    }
    Ok(out)
}

/// `1 / ∫_0^∞ r^{1−α} e^{−r^p} dr`.
pub fn gaussian_seed_constant(alpha: f64, p: f64) -> Result<f64> {
    let g = tempered_power_integral(alpha, p, 0.0, ExtReal::Infinity, 2, &QuadratureConfig::default())?;
    Ok(1.0 / g)
}

/// Conditional means of `m` equal-mass cells of the standard normal law.
pub fn normal_cell_means(m: usize) -> Vec<f64> {
    let std = Normal::standard();
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let edges: Vec<f64> = (0..=m)
        .map(|i| match i {
            0 => f64::NEG_INFINITY,
            i if i == m => f64::INFINITY,
            i => std.inverse_cdf(i as f64 / m as f64),
        })
        .collect();
    let mut nodes: Vec<f64> = edges
        .windows(2)
        .map(|w| {
            let pa = if w[0].is_finite() { phi(w[0]) } else { 0.0 };
            let pb = if w[1].is_finite() { phi(w[1]) } else { 0.0 };
            m as f64 * (pa - pb)
        })
        .collect();
    // the law is symmetric; make the nodes exactly so
    for i in 0..m / 2 {
        let v = 0.5 * (nodes[m - 1 - i] - nodes[i]);
        nodes[i] = -v;
        nodes[m - 1 - i] = v;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    nodes
}

/// Conditional means of `m` equal-mass cells of the Exp(1) law.
pub fn exponential_cell_means(m: usize) -> Vec<f64> {
    let edge = |i: usize| {
        if i == m {
            f64::INFINITY
        } else {
            -(-(i as f64) / m as f64).ln_1p()
        }
    };
    // ∫_a^b t e^{−t} dt = (a+1)e^{−a} − (b+1)e^{−b}
    let prim = |a: f64| if a.is_finite() { (a + 1.0) * (-a).exp() } else { 0.0 };
    (0..m).map(|i| m as f64 * (prim(edge(i)) - prim(edge(i + 1)))).collect()
}

/// The `n`-th member of a sequence of tempered-stable laws converging to `N(0, A)`.
///
/// The Rosiński measure `N(0, cA)` is replaced by a product of `m_nodes` equal-mass
/// normal cells along each principal axis of `A`, then scaled by `R_n(B) = n² R(B/n)`.
pub fn gaussian_seed_sequence(a: &DMatrix<f64>, n: u32, alpha: f64, p: f64, m_nodes: usize) -> Result<EtsSpec> {
    check_alpha_p(alpha, p)?;
    check_psd(a)?;
    if n == 0 || m_nodes == 0 {
        return Err(EtsError::invalid("n and m_nodes must be at least 1"));
    }
    let d = a.nrows();
    if d == 0 {
        return Err(EtsError::invalid("matrix must be at least 1×1"));
    }
    let c = gaussian_seed_constant(alpha, p)?;
    let eig = ((a + a.transpose()) * 0.5).symmetric_eigen();
    let top = eig.eigenvalues.amax();
    let axes: Vec<(f64, Vec<f64>)> = (0..d)
        .filter(|&k| eig.eigenvalues[k] > 1e-14 * top.max(f64::MIN_POSITIVE))
        .map(|k| {
            let col = eig.eigenvectors.column(k).iter().copied().collect();
            ((c * eig.eigenvalues[k]).sqrt(), col)
        })
        .collect();
    let nodes = normal_cell_means(m_nodes);
    let nf = n as f64;
    let mut r = AtomicMeasure::empty(d);
    if !axes.is_empty() {
        let cell_weight = (m_nodes as f64).powi(-(axes.len() as i32));
        let total = m_nodes.pow(axes.len() as u32);
        for idx in 0..total {
            let mut x = vec![0.0; d];
            let mut rest = idx;
            for (sd, e) in &axes {
                let y = nodes[rest % m_nodes] * sd;
                rest /= m_nodes;
                for (xi, ei) in x.iter_mut().zip(e) {
                    *xi += y * ei;
                }
            }
            let rad = norm(&x);
            if rad == 0.0 {
                continue;
            }
            let scaled: Vec<f64> = x.iter().map(|v| v / nf).collect();
            r.push(Atom::new(DirPoint::from_vector(&scaled)?, cell_weight * nf * nf)?);
        }
    }
    let nu = rosinski_to_extended(&r, &AtomicMeasure::empty(d), alpha)?;
    EtsSpec::new(alpha, p, DMatrix::zeros(d, d), nu, vec![0.0; d])
}

/// The `n`-th member of a sequence of tempered-stable laws converging to the strictly
/// α-stable law with spectral measure `σ`.
///
/// Per direction the radial law of `|x|^α R(dx)` is `σ_u · Exp(1)`; it is split into
/// `m_nodes` equal-mass cells, so `Σ weight · radius^α` recovers `σ_u` exactly. The
/// result is scaled by `R_n(B) = n^{−α} R(nB)`.
pub fn stable_seed_sequence(sigma: &AtomicMeasure, alpha: f64, n: u32, p: f64, m_nodes: usize) -> Result<EtsSpec> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(EtsError::StableExponentOutOfRange(alpha));
    }
    check_alpha_p(alpha, p)?;
    if n == 0 || m_nodes == 0 {
        return Err(EtsError::invalid("n and m_nodes must be at least 1"));
    }
    let d = sigma.dimension();
    let nodes = exponential_cell_means(m_nodes);
    let nf = n as f64;
    let mut r = AtomicMeasure::empty(d);
    for s in sigma.atoms() {
        let share = s.weight / m_nodes as f64;
        for &t in &nodes {
            let point = DirPoint {
                radius: ExtReal::Finite(t * nf),
                direction: s.direction().to_vec(),
            };
            r.push(Atom::new(point, share * t.powf(-alpha) * nf.powf(-alpha))?);
        }
    }
    let nu = rosinski_to_extended(&r, &AtomicMeasure::empty(d), alpha)?;
    EtsSpec::new(alpha, p, DMatrix::zeros(d, d), nu, vec![0.0; d])
}

/// The strictly α-stable target: every spectral atom moved to the sphere at infinity.
pub fn stable_target(sigma: &AtomicMeasure, alpha: f64, p: f64) -> Result<EtsSpec> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(EtsError::StableExponentOutOfRange(alpha));
    }
    let d = sigma.dimension();
    let nu = rosinski_to_extended(&AtomicMeasure::empty(d), sigma, alpha)?;
    EtsSpec::new(alpha, p, DMatrix::zeros(d, d), nu, vec![0.0; d])
}
