//! Numerical kernels: tempered power integrals and the oscillatory Lévy integrand.

mod oscillatory;
pub(crate) mod quad;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{EtsError, Result};
pub(crate) use oscillatory::psi_unchecked;
use quad::{geometric, kernel_tail_bound, power_origin};

/// A value in `(0, ∞]` (or `[0, ∞]` for integration limits).
///
/// Serialized as a JSON number, or as the string `"inf"` for infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    /// Plain `f64` view, with `f64::INFINITY` for `Infinity`.
    pub fn value(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinity => None,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(ExtReal::Finite(v)),
            Raw::Num(_) => Err(serde::de::Error::custom("non-finite number")),
            Raw::Str(s) if s == "inf" => Ok(ExtReal::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

/// Tolerances shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(EtsError::invalid(
                "quadrature tolerances must be positive and max_subdivisions at least 1",
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_alpha_p(alpha: f64, p: f64) -> Result<()> {
    if !(alpha < 2.0) || !alpha.is_finite() {
        return Err(EtsError::invalid(format!("alpha must be finite and < 2, got {alpha}")));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(EtsError::invalid(format!("p must be finite and > 0, got {p}")));
    }
    Ok(())
}

/// `∫_lo^hi t^{k−1−α} e^{−t^p} dt`.
pub fn tempered_power_integral(
    alpha: f64,
    p: f64,
    lo: f64,
    hi: ExtReal,
    k: u32,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_alpha_p(alpha, p)?;
    cfg.validate()?;
    let hi_v = hi.value();
    if !(lo >= 0.0) || !lo.is_finite() || !(hi_v > lo) {
        return Err(EtsError::invalid(format!("need 0 ≤ lo < hi, got lo = {lo}, hi = {hi}")));
    }
    let gamma = k as f64 - 1.0 - alpha;
    power_kernel_integral(gamma, p, 1.0, lo, hi_v, cfg)
}

/// `∫_lo^hi t^γ e^{−(t/scale)^p} dt` for finite `scale`.
pub(crate) fn power_kernel_integral(
    gamma: f64,
    p: f64,
    scale: f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if lo >= hi {
        return Ok(0.0);
    }
    let f = |t: f64| t.powf(gamma) * (-(t / scale).powf(p)).exp();
    let tail = |t: f64| kernel_tail_bound(gamma, p, scale, t);
    if lo > 0.0 {
        return Ok(geometric(&f, lo, hi, &tail, cfg)?.value);
    }
    if gamma <= -1.0 {
        return Err(EtsError::DivergentIntegral(format!(
            "t^{gamma} is not integrable at the origin"
        )));
    }
    let split = scale.min(hi);
    let h = |t: f64| (-(t / scale).powf(p)).exp();
    let near = power_origin(gamma, split, &h, cfg)?.value;
    if split >= hi {
        return Ok(near);
    }
    Ok(near + geometric(&f, split, hi, &tail, cfg)?.value)
}

/// `g₀(a) = ∫_0^a t^{1−α} e^{−t^p} dt`.
///
/// Quadrature trouble is not reported; the best available estimate is returned.
pub fn truncated_gauss_kernel(alpha: f64, p: f64, a: ExtReal) -> f64 {
    let a_v = a.value();
    if !(a_v > 0.0) {
        return 0.0;
    }
    match tempered_power_integral(alpha, p, 0.0, a, 2, &QuadratureConfig::default()) {
        Ok(v) => v,
        Err(EtsError::QuadratureFailure { estimate, .. }) => estimate,
        Err(_) => f64::NAN,
    }
}

/// `ψ(s) = ∫_0^∞ (e^{ist} − 1 − ist/(1+t²)) t^{−1−α} e^{−(t/ρ)^p} dt`,
/// with the taper dropped when `ρ = ∞`.
pub fn levy_oscillatory_integral(
    s: f64,
    alpha: f64,
    p: f64,
    rho: ExtReal,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_alpha_p(alpha, p)?;
    cfg.validate()?;
    match rho {
        ExtReal::Infinity if !(alpha > 0.0 && alpha < 2.0) => {
            return Err(EtsError::StableExponentOutOfRange(alpha))
        }
        ExtReal::Finite(r) if !(r > 0.0 && r.is_finite()) => {
            return Err(EtsError::invalid(format!("rho must be positive, got {r}")))
        }
        _ => {}
    }
    if !s.is_finite() {
        return Err(EtsError::invalid("s must be finite"));
    }
    psi_unchecked(s, alpha, p, rho, cfg)
}

/// Both sides of the cosine inequality
/// `∫_0^∞ (cos ts − 1) t^{−1−α} e^{−t^p} dt ≤ −(11/24) s² g₀(1)` for `|s| ≤ 1`.
pub fn cosine_bound_check(s: f64, alpha: f64, p: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if !(s.abs() <= 1.0) {
        return Err(EtsError::invalid(format!("|s| must be at most 1, got {s}")));
    }
    let lhs = levy_oscillatory_integral(s, alpha, p, ExtReal::Finite(1.0), cfg)?.re;
    let g1 = tempered_power_integral(alpha, p, 0.0, ExtReal::Finite(1.0), 2, cfg)?;
    Ok((lhs, -11.0 / 24.0 * s * s * g1))
}
