use serde::Serialize;

use super::types::{Atom, AtomicMeasure, DirPoint, TemperingSpec};
use crate::error::{EtsError, Result};
use crate::special::ExtReal;

/// The three integrability regimes of the exponent `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Negative,
    Zero,
    Stable,
}

impl Regime {
    pub fn of(alpha: f64) -> Regime {
        if alpha < 0.0 {
            Regime::Negative
        } else if alpha == 0.0 {
            Regime::Zero
        } else {
            Regime::Stable
        }
    }
}

/// `|x|² ∧ |x|^α`, `|x|² ∧ (1 + log⁺|x|)` or `|x|² ∧ 1`, depending on the regime of `α`.
pub fn wedge(radius: f64, alpha: f64) -> f64 {
    let sq = radius * radius;
    match Regime::of(alpha) {
        Regime::Stable => sq.min(radius.powf(alpha)),
        Regime::Zero => sq.min(1.0 + radius.ln().max(0.0)),
        Regime::Negative => sq.min(1.0),
    }
}

/// Integrability report for an atomic Rosiński measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub regime: Regime,
    pub atoms: usize,
    /// `Σ w · wedge(|x|)`.
    pub mass_functional: f64,
    /// Contribution of atoms with `|x| < 1`, where the wedge is `|x|²`.
    pub inner_part: f64,
    /// Contribution of atoms with `|x| ≥ 1`.
    pub outer_part: f64,
}

pub fn validate_rosinski(r: &AtomicMeasure, alpha: f64) -> Result<ValidationReport> {
    if r.has_infinite_atoms() {
        return Err(EtsError::InfiniteRadiusAtom);
    }
    let (mut inner, mut outer) = (0.0, 0.0);
    for a in r.atoms() {
        let rad = a.radius().value();
        let v = a.weight * wedge(rad, alpha);
        if rad < 1.0 {
            inner += v;
        } else {
            outer += v;
        }
    }
    let total = inner + outer;
    Ok(ValidationReport {
        valid: total.is_finite(),
        regime: Regime::of(alpha),
        atoms: r.len(),
        mass_functional: total,
        inner_part: inner,
        outer_part: outer,
    })
}

/// Builds the extended measure from a Rosiński measure and a stable part.
///
/// The stable part is a measure on the sphere; only the directions of its atoms matter.
pub fn rosinski_to_extended(
    r: &AtomicMeasure,
    stable_part: &AtomicMeasure,
    alpha: f64,
) -> Result<AtomicMeasure> {
    if r.has_infinite_atoms() {
        return Err(EtsError::InfiniteRadiusAtom);
    }
    if alpha <= 0.0 && !stable_part.is_empty() {
        return Err(EtsError::StablePartForbidden(alpha));
    }
    if !stable_part.is_empty() && stable_part.dimension() != r.dimension() {
        return Err(EtsError::DimensionMismatch {
            expected: r.dimension(),
            found: stable_part.dimension(),
        });
    }
    let mut nu = AtomicMeasure::empty(r.dimension());
    for a in r.atoms() {
        let w = a.weight * wedge(a.radius().value(), alpha);
        nu.push(Atom::new(a.point.clone(), w)?);
    }
    for a in stable_part.atoms() {
        let point = DirPoint {
            radius: ExtReal::Infinity,
            direction: a.point.direction.clone(),
        };
        nu.push(Atom::new(point, a.weight)?);
    }
    Ok(nu)
}

/// Splits an extended measure into its Rosiński measure and its stable part (radius-1 atoms).
pub fn extended_to_rosinski(nu: &AtomicMeasure, alpha: f64) -> Result<(AtomicMeasure, AtomicMeasure)> {
    if alpha <= 0.0 && nu.has_infinite_atoms() {
        return Err(EtsError::StablePartForbidden(alpha));
    }
    let mut r = AtomicMeasure::empty(nu.dimension());
    let mut stable = AtomicMeasure::empty(nu.dimension());
    for a in nu.atoms() {
        match a.radius() {
            ExtReal::Infinity => {
                let point = DirPoint {
                    radius: ExtReal::Finite(1.0),
                    direction: a.point.direction.clone(),
                };
                stable.push(Atom::new(point, a.weight)?);
            }
            ExtReal::Finite(rad) => {
                r.push(Atom::new(a.point.clone(), a.weight / wedge(rad, alpha))?);
            }
        }
    }
    Ok((r, stable))
}

/// Converts a spectral measure with Bernstein-form tempering to `(R, stable part)`.
///
/// A Bernstein atom at `s > 0` with weight `w` in direction `u` (spectral weight `σ_u`)
/// yields an atom at radius `s^{−1/p}` with weight `σ_u w s^{α/p}`; an atom at `s = 0`
/// contributes `σ_u w` to the stable part.
pub fn tempering_to_rosinski(
    spec: &TemperingSpec,
    alpha: f64,
    p: f64,
) -> Result<(AtomicMeasure, AtomicMeasure)> {
    crate::special::check_alpha_p(alpha, p)?;
    let d = spec.dimension();
    let mut r = AtomicMeasure::empty(d);
    let mut stable = AtomicMeasure::empty(d);
    for e in spec.entries() {
        for q in &e.q_atoms {
            let w = e.sigma_weight * q.weight;
            if q.s == 0.0 {
                if alpha <= 0.0 {
                    return Err(EtsError::StablePartForbidden(alpha));
                }
                stable.push(Atom::new(DirPoint::new(ExtReal::Finite(1.0), e.direction.clone())?, w)?);
            } else {
                let radius = q.s.powf(-1.0 / p);
                let weight = w * q.s.powf(alpha / p);
                let point = DirPoint::new(ExtReal::Finite(radius), e.direction.clone())?;
                r.push(Atom::new(point, weight)?);
            }
        }
    }
    Ok((r, stable))
}
