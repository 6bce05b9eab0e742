//! The oscillatory Lévy integrand
//! `ψ(s) = ∫_0^∞ (e^{ist} − 1 − ist/(1+t²)) t^{−1−α} e^{−(t/ρ)^p} dt`.
//!
//! The integral is split at `a = min(1, π/s, cutoff)`. Near the origin the
//! integrand behaves like `t^{1−α}` and is handled with an algebraic
//! substitution. Up to `π/s` it is integrated directly; beyond that it is split
//! into two monotone pieces plus a purely oscillatory piece, the latter summed
//! over half periods and accelerated with Wynn's epsilon algorithm.

use num_complex::Complex64;

use super::quad::{adaptive, geometric, kernel_tail_bound, power_origin, Estimate};
use super::{ExtReal, QuadratureConfig};
use crate::error::{EtsError, Result};

/// `(t/ρ)^p` beyond which the taper `e^{−(t/ρ)^p}` is treated as zero.
const TAPER_CUTOFF: f64 = 45.0;
/// Hard cap on half-period chunks summed for one oscillatory tail.
const MAX_CHUNKS: usize = 100_000;
/// Number of trailing partial sums fed to the epsilon algorithm.
const WYNN_WINDOW: usize = 40;

pub(crate) fn taper(t: f64, p: f64, rho: ExtReal) -> f64 {
    match rho {
        ExtReal::Infinity => 1.0,
        ExtReal::Finite(r) => (-(t / r).powf(p)).exp(),
    }
}

/// `sin x − x` without cancellation for small `x`.
fn sin_minus_x(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x.sin() - x
    }
}

pub(crate) fn psi_unchecked(s: f64, alpha: f64, p: f64, rho: ExtReal, cfg: &QuadratureConfig) -> Result<Complex64> {
    if s == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if s < 0.0 {
        return psi_unchecked(-s, alpha, p, rho, cfg).map(|z| z.conj());
    }
    let cutoff = match rho {
        ExtReal::Infinity => f64::INFINITY,
        ExtReal::Finite(r) => r * TAPER_CUTOFF.powf(1.0 / p),
    };
    let a = 1f64.min(std::f64::consts::PI / s).min(cutoff);

    // near part: integrand = t^{1-α} h(t)
    let beta = 1.0 - alpha;
    let re_h = |t: f64| {
        let half = 0.5 * s * t;
        let sn = half.sin();
        -2.0 * sn * sn / (t * t) * taper(t, p, rho)
    };
    let im_h = |t: f64| {
        let x = s * t;
        (sin_minus_x(x) / (t * t) + x / (1.0 + t * t)) * taper(t, p, rho)
    };
    let near_re = power_origin(beta, a, &re_h, cfg)?;
    let near_im = power_origin(beta, a, &im_h, cfg)?;
    let mut out = Complex64::new(near_re.value, near_im.value);
    if a >= cutoff {
        return Ok(out);
    }

    // up to the first half period the integrand keeps its sign, so it is integrated as is;
    // splitting it into a cosine integral minus a plain one would cancel badly for small s
    let f = |t: f64| t.powf(-1.0 - alpha) * taper(t, p, rho);
    let b = (std::f64::consts::PI / s).min(cutoff);
    if b > a {
        let no_tail = |_: f64| f64::INFINITY;
        let re = |t: f64| {
            let sn = (0.5 * s * t).sin();
            -2.0 * sn * sn * f(t)
        };
        let im = |t: f64| ((s * t).sin() - s * t / (1.0 + t * t)) * f(t);
        out.re += geometric(&re, a, b, &no_tail, cfg)?.value;
        out.im += geometric(&im, a, b, &no_tail, cfg)?.value;
    }
    let a = a.max(b);
    if a >= cutoff {
        return Ok(out);
    }

    // far part on [a, ∞)
    let scale = rho.value();
    let p1 = match rho {
        ExtReal::Infinity => a.powf(-alpha) / alpha,
        ExtReal::Finite(_) => {
            let tail = |t: f64| kernel_tail_bound(-1.0 - alpha, p, scale, t);
            geometric(&f, a, f64::INFINITY, &tail, cfg)?.value
        }
    };
    let p2 = {
        let f = |t: f64| t.powf(-alpha) / (1.0 + t * t) * taper(t, p, rho);
        let tail = |t: f64| kernel_tail_bound(-2.0 - alpha, p, scale, t);
        geometric(&f, a, f64::INFINITY, &tail, cfg)?.value
    };
    let osc = oscillatory_tail(s, a, alpha, p, rho, cfg)?;
    out.re += osc.re - p1;
    out.im += osc.im - s * p2;
    Ok(out)
}

/// `∫_a^∞ e^{ist} t^{−1−α} e^{−(t/ρ)^p} dt` for `s > 0`.
fn oscillatory_tail(
    s: f64,
    a: f64,
    alpha: f64,
    p: f64,
    rho: ExtReal,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let f = |t: f64| t.powf(-1.0 - alpha) * taper(t, p, rho);
    // f is decreasing beyond its peak; for α > −1 that is everywhere
    let monotone_from = if alpha > -1.0 {
        a
    } else {
        match rho {
            ExtReal::Infinity => f64::INFINITY,
            ExtReal::Finite(r) => a.max(r * ((-1.0 - alpha) / p).powf(1.0 / p)),
        }
    };
    let h = std::f64::consts::PI / s;
    let chunk_cfg = QuadratureConfig {
        abs_tol: 0.1 * cfg.abs_tol,
        ..*cfg
    };

    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut re_sums: Vec<f64> = Vec::new();
    let mut im_sums: Vec<f64> = Vec::new();
    let mut prev: Option<Complex64> = None;
    let mut agreed = 0;
    // past this point the taper is below e^{−45} and the rest is dropped
    let end = match rho {
        ExtReal::Infinity => f64::INFINITY,
        ExtReal::Finite(r) => r * TAPER_CUTOFF.powf(1.0 / p),
    };
    for k in 0..MAX_CHUNKS {
        let lo = a + k as f64 * h;
        let hi = (lo + h).min(end);
        let re = dyadic(&|t: f64| (s * t).cos() * f(t), lo, hi, &chunk_cfg)?;
        let im = dyadic(&|t: f64| (s * t).sin() * f(t), lo, hi, &chunk_cfg)?;
        sum += Complex64::new(re.value, im.value);
        err += re.error + im.error;
        if hi >= end {
            return Ok(sum);
        }
        if lo < monotone_from {
            continue;
        }
        // second mean value theorem: |∫_T^∞ e^{ist} f| ≤ 2 f(T) / s
        let tol = cfg.abs_tol.max(cfg.rel_tol * sum.norm());
        if 2.0 * f(hi) / s <= 0.1 * tol {
            return Ok(sum);
        }
        re_sums.push(sum.re);
        im_sums.push(sum.im);
        if re_sums.len() >= 8 {
            let lo_idx = re_sums.len().saturating_sub(WYNN_WINDOW);
            let ext = Complex64::new(wynn_epsilon(&re_sums[lo_idx..]), wynn_epsilon(&im_sums[lo_idx..]));
            if let Some(p) = prev {
                let tol = cfg.abs_tol.max(cfg.rel_tol * ext.norm());
                if (ext - p).norm() <= 0.1 * tol {
                    agreed += 1;
                    if agreed >= 2 {
                        return Ok(ext);
                    }
                } else {
                    agreed = 0;
                }
            }
            prev = Some(ext);
        }
    }
    Err(EtsError::QuadratureFailure {
        estimate: prev.unwrap_or(sum).re,
        error: err.max(f64::EPSILON),
    })
}

/// `∫_lo^hi g`, cut into pieces no wider than their left end so that a long first
/// half period (small `s`) cannot hide the bulk of `g` between quadrature nodes.
fn dyadic<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let mut total = Estimate::default();
    let mut left = lo;
    while left < hi {
        let right = if left > 0.0 { (2.0 * left).min(hi) } else { hi };
        total = total.add(adaptive(g, left, right, cfg)?);
        left = right;
    }
    Ok(total)
}

/// Wynn's epsilon algorithm; returns the deepest even-column entry.
pub(crate) fn wynn_epsilon(seq: &[f64]) -> f64 {
    let n = seq.len();
    let mut best = match seq.last() {
        Some(&v) => v,
        None => return 0.0,
    };
    let mut prev = vec![0.0; n + 1];
    let mut cur = seq.to_vec();
    for k in 1..n {
        let mut next = Vec::with_capacity(n - k);
        for j in 0..(n - k) {
            let d = cur[j + 1] - cur[j];
            let scale = cur[j + 1].abs().max(cur[j].abs());
            if d == 0.0 || d.abs() <= 1e-15 * scale {
                // column k-1 has converged
                return if (k - 1) % 2 == 0 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}
