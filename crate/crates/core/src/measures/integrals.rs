use std::cell::Cell;

use super::transforms::wedge;
use super::types::{Atom, AtomicMeasure};
use crate::error::{EtsError, Result};
use crate::special::quad::{adaptive, geometric, kernel_tail_bound, power_origin};
use crate::special::{check_alpha_p, power_kernel_integral, ExtReal, QuadratureConfig};

/// Physical radii at which a test function is probed to find its order of vanishing at 0.
const PROBE: (f64, f64) = (1e-8, 1e-6);

/// `∫ f dM` for the Lévy measure `M` generated by `ν` with exponents `α`, `p`.
///
/// A finite atom at `x = ρu` with weight `w` contributes
/// `w / wedge(ρ) · ∫_0^∞ f(tx) t^{−1−α} e^{−t^p} dt`; an atom at infinity contributes
/// `w ∫_0^∞ f(ru) r^{−1−α} dr`. `f` must be bounded and vanish near the origin fast
/// enough for the integrals to converge.
pub fn levy_integral<F: Fn(&[f64]) -> f64>(
    f: &F,
    nu: &AtomicMeasure,
    alpha: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_alpha_p(alpha, p)?;
    cfg.validate()?;
    if nu.has_infinite_atoms() && !(alpha > 0.0) {
        return Err(EtsError::StablePartForbidden(alpha));
    }
    let mut total = 0.0;
    for atom in nu.atoms() {
        total += atom_integral(f, atom, alpha, p, cfg)?;
    }
    Ok(total)
}

fn atom_integral<F: Fn(&[f64]) -> f64>(
    f: &F,
    atom: &Atom,
    alpha: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let u = atom.direction();
    let (rho, mass) = match atom.radius() {
        ExtReal::Finite(r) => (r, atom.weight / wedge(r, alpha)),
        ExtReal::Infinity => (1.0, atom.weight),
    };
    let fmax = Cell::new(0.0f64);
    // g(t) = f(t ρ u), tracking sup |g| seen so far for the tail bound
    let g = |t: f64| {
        let y: Vec<f64> = u.iter().map(|ui| t * rho * ui).collect();
        let v = f(&y);
        fmax.set(fmax.get().max(v.abs()));
        v
    };
    let tempered = !atom.is_infinite();
    let taper = |t: f64| if tempered { (-t.powf(p)).exp() } else { 1.0 };

    // near the origin
    let (t1, t2) = (PROBE.0 / rho, PROBE.1 / rho);
    let (g1, g2) = (g(t1).abs(), g(t2).abs());
    let kappa = if g1 == 0.0 && g2 == 0.0 {
        2.0
    } else if g1 == 0.0 {
        4.0
    } else if g2 == 0.0 {
        0.0
    } else {
        ((g2 / g1).ln() / (t2 / t1).ln()).clamp(0.0, 4.0)
    };
    if (g1 != 0.0 || g2 != 0.0) && kappa - alpha < 1e-3 {
        return Err(EtsError::DivergentIntegral(format!(
            "test function decays like |y|^{kappa:.3} at the origin, too slowly for alpha = {alpha}"
        )));
    }
    let beta = kappa - 1.0 - alpha;
    let h = |t: f64| g(t) * t.powf(-kappa) * taper(t);
    let near = power_origin(beta, 1.0, &h, cfg)?.value;

    // away from the origin
    let far = if tempered {
        let integrand = |t: f64| g(t) * t.powf(-1.0 - alpha) * taper(t);
        let tail = |t: f64| fmax.get() * kernel_tail_bound(-1.0 - alpha, p, 1.0, t);
        geometric(&integrand, 1.0, f64::INFINITY, &tail, cfg)?.value
    } else {
        // ∫_1^∞ g(r) r^{−1−α} dr = (1/α) ∫_0^1 g(v^{−1/α}) dv
        let integrand = |v: f64| if v == 0.0 { 0.0 } else { g(v.powf(-1.0 / alpha)) };
        // the endpoint v = 0 is the point at infinity; drop it as a single point
        adaptive(&integrand, 0.0, 1.0, cfg)?.value / alpha
    };
    Ok(mass * (near + far))
}

/// `M({|y| > r})`.
///
/// Quadrature shortfalls are not reported; the best available estimate is used.
pub fn levy_tail_mass(nu: &AtomicMeasure, alpha: f64, p: f64, r: f64) -> f64 {
    let cfg = QuadratureConfig::default();
    nu.atoms()
        .iter()
        .map(|a| match a.radius() {
            ExtReal::Infinity => a.weight * r.powf(-alpha) / alpha,
            ExtReal::Finite(rho) => {
                let m = a.weight / wedge(rho, alpha);
                m * radial_tail(alpha, p, r / rho, &cfg)
            }
        })
        .sum()
}

/// `∫_lo^∞ t^{−1−α} e^{−t^p} dt` for `lo > 0`.
pub(crate) fn radial_tail(alpha: f64, p: f64, lo: f64, cfg: &QuadratureConfig) -> f64 {
    if !(lo > 0.0) {
        return f64::INFINITY;
    }
    match power_kernel_integral(-1.0 - alpha, p, 1.0, lo, f64::INFINITY, cfg) {
        Ok(v) => v,
        Err(EtsError::QuadratureFailure { estimate, .. }) => estimate,
        Err(_) => f64::NAN,
    }
}
