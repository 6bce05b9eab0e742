use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{EtsError, Result};
use crate::special::ExtReal;

/// Tolerance on `|direction| = 1`.
pub const UNIT_TOL: f64 = 1e-12;
/// Tolerance used when merging duplicate atoms.
pub const MERGE_TOL: f64 = 1e-12;
/// Tolerance on symmetry and negative eigenvalues of a Gaussian matrix.
pub const PSD_TOL: f64 = 1e-10;

/// A point of the punctured, compactified space: a radius in `(0, ∞]` and a unit direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirPoint {
    pub radius: ExtReal,
    pub direction: Vec<f64>,
}

impl DirPoint {
    pub fn new(radius: ExtReal, direction: Vec<f64>) -> Result<Self> {
        match radius {
            ExtReal::Finite(r) if !(r > 0.0 && r.is_finite()) => {
                return Err(EtsError::invalid(format!("radius must be positive, got {r}")))
            }
            _ => {}
        }
        if direction.is_empty() {
            return Err(EtsError::invalid("direction must be nonempty"));
        }
        if direction.iter().any(|v| !v.is_finite()) {
            return Err(EtsError::invalid("direction has a non-finite entry"));
        }
        let norm = norm(&direction);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(EtsError::invalid(format!(
                "direction must have unit length, got |u| = {norm}"
            )));
        }
        Ok(DirPoint { radius, direction })
    }

    /// The point `x` itself (finite radius), as radius and normalized direction.
    pub fn from_vector(x: &[f64]) -> Result<Self> {
        let r = norm(x);
        if !(r > 0.0 && r.is_finite()) {
            return Err(EtsError::invalid("the origin is not a point of the space"));
        }
        Ok(DirPoint {
            radius: ExtReal::Finite(r),
            direction: x.iter().map(|v| v / r).collect(),
        })
    }

    /// The point at infinity in the direction of `u` (which is normalized).
    pub fn at_infinity(u: &[f64]) -> Result<Self> {
        let mut p = DirPoint::from_vector(u)?;
        p.radius = ExtReal::Infinity;
        Ok(p)
    }

    pub fn dimension(&self) -> usize {
        self.direction.len()
    }

    /// Cartesian coordinates; `None` on the sphere at infinity.
    pub fn to_vector(&self) -> Option<Vec<f64>> {
        let r = self.radius.finite()?;
        Some(self.direction.iter().map(|u| r * u).collect())
    }

    fn order(&self, other: &Self) -> Ordering {
        self.radius
            .value()
            .total_cmp(&other.radius.value())
            .then_with(|| {
                for (a, b) in self.direction.iter().zip(&other.direction) {
                    match a.total_cmp(b) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    }

    fn close_to(&self, other: &Self) -> bool {
        let radius_ok = match (self.radius, other.radius) {
            (ExtReal::Infinity, ExtReal::Infinity) => true,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= MERGE_TOL * a.max(b).max(1.0),
            _ => false,
        };
        radius_ok
            && self
                .direction
                .iter()
                .zip(&other.direction)
                .all(|(a, b)| (a - b).abs() <= MERGE_TOL)
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A weighted point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAtom", into = "RawAtom")]
pub struct Atom {
    pub point: DirPoint,
    pub weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    radius: ExtReal,
    direction: Vec<f64>,
    weight: f64,
}

impl TryFrom<RawAtom> for Atom {
    type Error = EtsError;
    fn try_from(raw: RawAtom) -> Result<Self> {
        Atom::new(DirPoint::new(raw.radius, raw.direction)?, raw.weight)
    }
}

impl From<Atom> for RawAtom {
    fn from(a: Atom) -> Self {
        RawAtom {
            radius: a.point.radius,
            direction: a.point.direction,
            weight: a.weight,
        }
    }
}

impl Atom {
    pub fn new(point: DirPoint, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(EtsError::invalid(format!("atom weight must be positive, got {weight}")));
        }
        Ok(Atom { point, weight })
    }

    pub fn radius(&self) -> ExtReal {
        self.point.radius
    }

    pub fn direction(&self) -> &[f64] {
        &self.point.direction
    }

    pub fn is_infinite(&self) -> bool {
        self.point.radius.is_infinite()
    }
}

/// A finite measure with finitely many atoms on the punctured, compactified space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct AtomicMeasure {
    dimension: usize,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    dimension: usize,
    atoms: Vec<Atom>,
}

impl TryFrom<RawMeasure> for AtomicMeasure {
    type Error = EtsError;
    fn try_from(raw: RawMeasure) -> Result<Self> {
        AtomicMeasure::new(raw.dimension, raw.atoms)
    }
}

impl From<AtomicMeasure> for RawMeasure {
    fn from(m: AtomicMeasure) -> Self {
        RawMeasure {
            dimension: m.dimension,
            atoms: m.atoms,
        }
    }
}

impl AtomicMeasure {
    pub fn new(dimension: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dimension == 0 {
            return Err(EtsError::invalid("dimension must be at least 1"));
        }
        for a in &atoms {
            if a.point.dimension() != dimension {
                return Err(EtsError::DimensionMismatch {
                    expected: dimension,
                    found: a.point.dimension(),
                });
            }
        }
        Ok(AtomicMeasure { dimension, atoms })
    }

    pub fn empty(dimension: usize) -> Self {
        AtomicMeasure {
            dimension: dimension.max(1),
            atoms: Vec::new(),
        }
    }

    /// Measure built from `(radius, direction, weight)` triples.
    pub fn from_triples(dimension: usize, triples: &[(ExtReal, Vec<f64>, f64)]) -> Result<Self> {
        let atoms = triples
            .iter()
            .map(|(r, u, w)| Atom::new(DirPoint::new(*r, u.clone())?, *w))
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(dimension, atoms)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn into_atoms(self) -> Vec<Atom> {
        self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn has_infinite_atoms(&self) -> bool {
        self.atoms.iter().any(Atom::is_infinite)
    }

    pub(crate) fn push(&mut self, atom: Atom) {
        debug_assert_eq!(atom.point.dimension(), self.dimension);
        self.atoms.push(atom);
    }

    /// Sorted by radius then direction, with near-duplicate points merged.
    pub fn canonicalize(&self) -> AtomicMeasure {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| a.point.order(&b.point));
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            // the merge target may sit a few places back when radii tie within tolerance
            let hit = out
                .iter_mut()
                .rev()
                .take_while(|b| match (a.point.radius, b.point.radius) {
                    (ExtReal::Finite(x), ExtReal::Finite(y)) => x - y <= MERGE_TOL * x.max(1.0),
                    (ExtReal::Infinity, ExtReal::Infinity) => true,
                    _ => false,
                })
                .find(|b| b.point.close_to(&a.point));
            match hit {
                Some(b) => b.weight += a.weight,
                None => out.push(a),
            }
        }
        AtomicMeasure {
            dimension: self.dimension,
            atoms: out,
        }
    }

    /// Atom union.
    pub fn add(&self, other: &AtomicMeasure) -> Result<AtomicMeasure> {
        if self.dimension != other.dimension {
            return Err(EtsError::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Ok(AtomicMeasure {
            dimension: self.dimension,
            atoms,
        })
    }

    /// Mass of atoms with radius strictly below `r`.
    pub fn mass_below(&self, r: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.point.radius.value() < r)
            .map(|a| a.weight)
            .sum()
    }
}

/// One Bernstein atom of a tempering function: `q(r) ∋ weight · e^{−r s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QAtom {
    pub s: f64,
    pub weight: f64,
}

/// One spectral direction with its tempering function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperingEntry {
    pub direction: Vec<f64>,
    pub sigma_weight: f64,
    pub q_atoms: Vec<QAtom>,
}

impl TemperingEntry {
    /// `q(r, u)` for this direction.
    pub fn q(&self, r: f64) -> f64 {
        self.q_atoms.iter().map(|a| a.weight * (-r * a.s).exp()).sum()
    }

    pub fn has_stable_part(&self) -> bool {
        self.q_atoms.iter().any(|a| a.s == 0.0)
    }
}

/// Spectral measure with per-direction tempering functions in Bernstein form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTempering", into = "RawTempering")]
pub struct TemperingSpec {
    dimension: usize,
    entries: Vec<TemperingEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTempering {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    entries: Vec<TemperingEntry>,
}

impl TryFrom<RawTempering> for TemperingSpec {
    type Error = EtsError;
    fn try_from(raw: RawTempering) -> Result<Self> {
        let d = match (raw.dimension, raw.entries.first()) {
            (Some(d), _) => d,
            (None, Some(e)) => e.direction.len(),
            (None, None) => {
                return Err(EtsError::invalid(
                    "an empty tempering spec needs an explicit \"dimension\"",
                ))
            }
        };
        TemperingSpec::new(d, raw.entries)
    }
}

impl From<TemperingSpec> for RawTempering {
    fn from(t: TemperingSpec) -> Self {
        RawTempering {
            dimension: if t.entries.is_empty() { Some(t.dimension) } else { None },
            entries: t.entries,
        }
    }
}

impl TemperingSpec {
    pub fn new(dimension: usize, entries: Vec<TemperingEntry>) -> Result<Self> {
        if dimension == 0 {
            return Err(EtsError::invalid("dimension must be at least 1"));
        }
        for e in &entries {
            DirPoint::new(ExtReal::Finite(1.0), e.direction.clone())?;
            if e.direction.len() != dimension {
                return Err(EtsError::DimensionMismatch {
                    expected: dimension,
                    found: e.direction.len(),
                });
            }
            if !(e.sigma_weight > 0.0 && e.sigma_weight.is_finite()) {
                return Err(EtsError::invalid("sigma_weight must be positive"));
            }
            for q in &e.q_atoms {
                if !(q.s >= 0.0 && q.s.is_finite()) {
                    return Err(EtsError::invalid(format!("q-atom location must be ≥ 0, got {}", q.s)));
                }
                if !(q.weight > 0.0 && q.weight.is_finite()) {
                    return Err(EtsError::invalid("q-atom weight must be positive"));
                }
            }
        }
        Ok(TemperingSpec { dimension, entries })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[TemperingEntry] {
        &self.entries
    }
}

/// Parameters `(α, p, A, ν, b)` of an extended p-tempered α-stable law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct EtsSpec {
    pub alpha: f64,
    pub p: f64,
    pub a: DMatrix<f64>,
    pub nu: AtomicMeasure,
    pub b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    alpha: f64,
    p: f64,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    nu: AtomicMeasure,
}

impl TryFrom<RawSpec> for EtsSpec {
    type Error = EtsError;
    fn try_from(raw: RawSpec) -> Result<Self> {
        let a = matrix_from_rows(&raw.a)?;
        EtsSpec::new(raw.alpha, raw.p, a, raw.nu, raw.b)
    }
}

impl From<EtsSpec> for RawSpec {
    fn from(s: EtsSpec) -> Self {
        RawSpec {
            alpha: s.alpha,
            p: s.p,
            a: matrix_to_rows(&s.a),
            b: s.b,
            nu: s.nu,
        }
    }
}

/// Square matrix from row vectors.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(EtsError::invalid("matrix must be square"));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(EtsError::invalid("matrix has a non-finite entry"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Checks symmetry and positive semidefiniteness within [`PSD_TOL`].
pub fn check_psd(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(EtsError::NotPsd("matrix is not square".into()));
    }
    let scale = a.amax().max(1.0);
    for i in 0..a.nrows() {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > PSD_TOL * scale {
                return Err(EtsError::NotPsd(format!("entries ({i},{j}) and ({j},{i}) differ")));
            }
        }
    }
    if a.nrows() == 0 {
        return Ok(());
    }
    let sym = (a + a.transpose()) * 0.5;
    let min = sym.symmetric_eigenvalues().min();
    if min < -PSD_TOL * scale {
        return Err(EtsError::NotPsd(format!("smallest eigenvalue is {min:e}")));
    }
    Ok(())
}

impl EtsSpec {
    pub fn new(alpha: f64, p: f64, a: DMatrix<f64>, nu: AtomicMeasure, b: Vec<f64>) -> Result<Self> {
        let spec = EtsSpec { alpha, p, a, nu, b };
        spec.validate()?;
        Ok(spec)
    }

    /// A spec with no Gaussian part and zero shift.
    pub fn from_measure(alpha: f64, p: f64, nu: AtomicMeasure) -> Result<Self> {
        let d = nu.dimension();
        EtsSpec::new(alpha, p, DMatrix::zeros(d, d), nu, vec![0.0; d])
    }

    pub fn gaussian(alpha: f64, p: f64, a: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        let d = a.nrows();
        EtsSpec::new(alpha, p, a, AtomicMeasure::empty(d), b)
    }

    pub fn dimension(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        crate::special::check_alpha_p(self.alpha, self.p)?;
        let d = self.b.len();
        if d == 0 {
            return Err(EtsError::invalid("shift vector b must be nonempty"));
        }
        if self.b.iter().any(|v| !v.is_finite()) {
            return Err(EtsError::invalid("shift vector has a non-finite entry"));
        }
        if self.a.nrows() != d {
            return Err(EtsError::DimensionMismatch {
                expected: d,
                found: self.a.nrows(),
            });
        }
        if self.nu.dimension() != d {
            return Err(EtsError::DimensionMismatch {
                expected: d,
                found: self.nu.dimension(),
            });
        }
        check_psd(&self.a)?;
        if self.alpha <= 0.0 && self.nu.has_infinite_atoms() {
            return Err(EtsError::StablePartForbidden(self.alpha));
        }
        Ok(())
    }
}
