//! Random variates for elementary components and full ETS laws.
//!
//! For `α < 0` the one-dimensional law is compound Poisson and is sampled
//! exactly. For `α ∈ [0, 2)` jumps above a cutoff `τ` are generated in
//! decreasing order by inverting the tail of the Lévy measure along the
//! arrival times of a unit-rate Poisson process; the jumps below `τ` are
//! replaced by their mean and a Gaussian with their variance.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{to_elementary_sum, ElementaryComponent};
use crate::charfn::CfGrid;
use crate::error::{EtsError, Result};
use crate::measures::{check_psd, dot, radial_tail, Atom, AtomicMeasure, DirPoint, EtsSpec};
use crate::special::quad::{adaptive, geometric, kernel_tail_bound, power_origin};
use crate::special::{check_alpha_p, power_kernel_integral, ExtReal, QuadratureConfig};

/// Below this variance the small-jump Gaussian is omitted.
const VARIANCE_FLOOR: f64 = 1e-14;
/// Tail-table resolution, in nodes per decade of jump size.
const NODES_PER_DECADE: f64 = 512.0;
/// Relative accuracy of each jump-size inversion.
const INVERSION_TOL: f64 = 1e-12;

/// Relative-only tolerances: tail values span many orders of magnitude.
fn table_cfg() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Jumps smaller than this (in the units of the sampled vector) are not simulated individually.
    pub truncation_tau: f64,
    pub n_paths: usize,
    /// Atoms at infinity are placed at radius `2^push_exponent` before sampling.
    pub push_exponent: u32,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            truncation_tau: 1e-3,
            n_paths: 10_000,
            push_exponent: 30,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_tau > 0.0 && self.truncation_tau < 1.0) {
            return Err(EtsError::invalid("truncation_tau must lie in (0, 1)"));
        }
        if self.n_paths == 0 {
            return Err(EtsError::invalid("n_paths must be at least 1"));
        }
        if self.push_exponent == 0 || self.push_exponent > 1000 {
            return Err(EtsError::invalid("push_exponent must lie in 1..=1000"));
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one (component, path) pair.
///
/// The key depends on `(seed, component)`; the path index selects the ChaCha stream.
pub fn substream(seed: u64, component: u64, path: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = splitmix(seed) ^ splitmix(component.wrapping_add(0xA076_1D64_78BD_642F));
    for chunk in key.chunks_mut(8) {
        state = splitmix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path);
    rng
}

/// `log T` on a logarithmic grid of jump sizes, where `T(t) = c ∫_t^∞ s^{−1−α} e^{−s^p} ds`.
#[derive(Debug, Clone)]
struct TailTable {
    log_t: Vec<f64>,
    log_tail: Vec<f64>,
    slope: Vec<f64>,
    c: f64,
    alpha: f64,
    p: f64,
}

impl TailTable {
    fn build(c: f64, alpha: f64, p: f64, tau: f64) -> Result<Self> {
        let cfg = &table_cfg();
        let density = |t: f64| c * t.powf(-1.0 - alpha) * (-t.powf(p)).exp();
        // beyond t_max the tail is below e^{-40}·c; such jumps use the exact fallback
        let t_max = 40f64.powf(1.0 / p).max(2.0 * tau);
        let decades = (t_max / tau).log10();
        let n = ((decades * NODES_PER_DECADE).ceil() as usize).max(8);
        let step = (t_max / tau).ln() / n as f64;
        let log_t: Vec<f64> = (0..=n).map(|i| tau.ln() + step * i as f64).collect();
        let mut tail = vec![0.0; n + 1];
        tail[n] = c * power_kernel_integral(-1.0 - alpha, p, 1.0, t_max, f64::INFINITY, cfg)?;
        for i in (0..n).rev() {
            let (a, b) = (log_t[i].exp(), log_t[i + 1].exp());
            tail[i] = tail[i + 1] + adaptive(&density, a, b, cfg)?.value;
        }
        let log_tail: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
        let slope = log_t
            .iter()
            .zip(&tail)
            .map(|(&x, &tv)| {
                let t = x.exp();
                -t * density(t) / tv
            })
            .collect();
        Ok(TailTable { log_t, log_tail, slope, c, alpha, p })
    }

    fn total_rate(&self) -> f64 {
        self.log_tail[0].exp()
    }

    /// Cubic Hermite interpolant of `log T` on cell `i` and its derivative.
    fn hermite(&self, i: usize, x: f64) -> (f64, f64) {
        let (x0, x1) = (self.log_t[i], self.log_t[i + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let (y0, y1) = (self.log_tail[i], self.log_tail[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1;
        let dv = ((6.0 * s2 - 6.0 * s) * y0 + (3.0 * s2 - 4.0 * s + 1.0) * d0 + (-6.0 * s2 + 6.0 * s) * y1 + (3.0 * s2 - 2.0 * s) * d1) / h;
        (v, dv)
    }

    /// The jump size `t` with `T(t) = gamma`, for `gamma < T(τ)`.
    fn invert(&self, gamma: f64) -> f64 {
        let y = gamma.ln();
        let last = self.log_tail.len() - 1;
        if y < self.log_tail[last] {
            return self.invert_far(gamma);
        }
        // log_tail is decreasing: find i with log_tail[i] ≥ y ≥ log_tail[i+1]
        let i = match self.log_tail.partition_point(|&v| v >= y) {
            0 => 0,
            k => (k - 1).min(last - 1),
        };
        let (mut lo, mut hi) = (self.log_t[i], self.log_t[i + 1]);
        let (y_lo, y_hi) = (self.log_tail[i], self.log_tail[i + 1]);
        let mut x = lo + (hi - lo) * ((y_lo - y) / (y_lo - y_hi)).clamp(0.0, 1.0);
        for _ in 0..100 {
            let (v, dv) = self.hermite(i, x);
            let r = v - y;
            if r > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let mut next = x - r / dv;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= INVERSION_TOL || hi - lo <= INVERSION_TOL {
                x = next;
                break;
            }
            x = next;
        }
        x.exp()
    }

    /// Bisection on the exact tail for jumps beyond the table.
    fn invert_far(&self, gamma: f64) -> f64 {
        let cfg = table_cfg();
        let tail = |t: f64| self.c * radial_tail(self.alpha, self.p, t, &cfg);
        let mut lo = self.log_t[self.log_t.len() - 1].exp();
        let mut hi = lo * 2.0;
        while tail(hi) > gamma && hi < 1e300 {
            lo = hi;
            hi *= 2.0;
        }
        while (hi - lo) > INVERSION_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if tail(mid) > gamma {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Prepared sampler for one elementary scalar law.
#[derive(Debug, Clone)]
pub struct ElementarySampler {
    kind: Kind,
    drift: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Point,
    CompoundPoisson { rate: f64, count: Poisson<f64>, size: Gamma<f64>, inv_p: f64 },
    Series { table: TailTable, rate: f64, sd: f64 },
}

impl ElementarySampler {
    /// Sampler for the law with Lévy density `c t^{−1−α} e^{−t^p}` on `t > 0` and shift `b_scalar`.
    ///
    /// `tau` is the small-jump cutoff; it is ignored for `α < 0`.
    pub fn new(c: f64, b_scalar: f64, alpha: f64, p: f64, tau: f64) -> Result<Self> {
        check_alpha_p(alpha, p)?;
        if !(c >= 0.0 && c.is_finite()) || !b_scalar.is_finite() {
            return Err(EtsError::invalid("c must be nonnegative and b_scalar finite"));
        }
        let cfg = QuadratureConfig::default();
        if c == 0.0 {
            return Ok(ElementarySampler { kind: Kind::Point, drift: b_scalar });
        }
        // ∫ t^{1-α}/(1+t²) t^{-1}… pieces of the centering, over (lo, hi)
        let centering = |lo: f64, hi: f64| -> Result<f64> {
            let f = |t: f64| t.powf(-alpha) / (1.0 + t * t) * (-t.powf(p)).exp();
            if lo > 0.0 {
                let tail = |t: f64| kernel_tail_bound(-2.0 - alpha, p, 1.0, t);
                return Ok(geometric(&f, lo, hi, &tail, &cfg)?.value);
            }
            let h = |t: f64| (-t.powf(p)).exp() / (1.0 + t * t);
            let near = power_origin(-alpha, hi.min(1.0), &h, &cfg)?.value;
            if hi <= 1.0 {
                return Ok(near);
            }
            let tail = |t: f64| kernel_tail_bound(-2.0 - alpha, p, 1.0, t);
            Ok(near + geometric(&f, 1.0, hi, &tail, &cfg)?.value)
        };
        if alpha < 0.0 {
            let rate = c * power_kernel_integral(-1.0 - alpha, p, 1.0, 0.0, f64::INFINITY, &cfg)?;
            let drift = b_scalar - c * centering(0.0, f64::INFINITY)?;
            let count = Poisson::new(rate).map_err(|e| EtsError::invalid(e.to_string()))?;
            let size = Gamma::new(-alpha / p, 1.0).map_err(|e| EtsError::invalid(e.to_string()))?;
            return Ok(ElementarySampler {
                kind: Kind::CompoundPoisson { rate, count, size, inv_p: 1.0 / p },
                drift,
            });
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(EtsError::invalid("truncation cutoff must be positive"));
        }
        let table = TailTable::build(c, alpha, p, tau)?;
        let rate = table.total_rate();
        let var = c * power_kernel_integral(1.0 - alpha, p, 1.0, 0.0, tau, &cfg)?;
        let sd = if var >= VARIANCE_FLOOR { var.sqrt() } else { 0.0 };
        // small jumps enter through their mean t − t/(1+t²) = t³/(1+t²)
        let h = |t: f64| (-t.powf(p)).exp() / (1.0 + t * t);
        let small_mean = c * power_origin(2.0 - alpha, tau, &h, &cfg)?.value;
        let drift = b_scalar - c * centering(tau, f64::INFINITY)? + small_mean;
        Ok(ElementarySampler {
            kind: Kind::Series { table, rate, sd },
            drift,
        })
    }

    /// Expected number of simulated jumps per draw.
    pub fn jump_rate(&self) -> f64 {
        match &self.kind {
            Kind::Point => 0.0,
            Kind::CompoundPoisson { rate, .. } => *rate,
            Kind::Series { rate, .. } => *rate,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            Kind::Point => self.drift,
            Kind::CompoundPoisson { count, size, inv_p, .. } => {
                let n = count.sample(rng) as u64;
                let mut sum = 0.0;
                for _ in 0..n {
                    let s: f64 = size.sample(rng);
                    sum += s.powf(*inv_p);
                }
                sum + self.drift
            }
            Kind::Series { table, rate, sd } => {
                // the Gaussian is drawn first so that runs with different cutoffs share their large jumps
                let g: f64 = StandardNormal.sample(rng);
                let mut arrival = 0.0;
                let mut sum = 0.0;
                loop {
                    let e: f64 = Exp1.sample(rng);
                    arrival += e;
                    if arrival >= *rate {
                        break;
                    }
                    sum += table.invert(arrival);
                }
                sum + self.drift + sd * g
            }
        }
    }
}

/// `n_paths` draws of one elementary scalar law, each from its own substream.
pub fn sample_elementary(c: f64, b_scalar: f64, alpha: f64, p: f64, cfg: &SamplerConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let sampler = ElementarySampler::new(c, b_scalar, alpha, p, cfg.truncation_tau)?;
    Ok((0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|path| sampler.sample(&mut substream(cfg.seed, 1, path)))
        .collect())
}

/// Draws from `ETS(α, p, A, ν, b)`; returns `n_paths` rows of length `d`.
///
/// Atoms at infinity are placed at radius `2^push_exponent`, the measure is split into
/// elementary components, and each component uses the cutoff `τ / |x|` so that `τ` is
/// the cutoff for jump sizes of the vector itself.
pub fn sample_ets(spec: &EtsSpec, cfg: &SamplerConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    spec.validate()?;
    let comps = elementary_decomposition(spec, cfg.push_exponent)?;
    let samplers = comps
        .iter()
        .map(|comp| {
            let tau = cfg.truncation_tau / crate::measures::norm(&comp.x);
            ElementarySampler::new(comp.c, comp.b_scalar, spec.alpha, spec.p, tau)
        })
        .collect::<Result<Vec<_>>>()?;
    let factor = gaussian_factor(&spec.a)?;
    let d = spec.dimension();
    let rows = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut x = spec.b.clone();
            if let Some(l) = &factor {
                let mut rng = substream(cfg.seed, 0, path);
                let g: Vec<f64> = (0..l.ncols()).map(|_| StandardNormal.sample(&mut rng)).collect();
                for i in 0..d {
                    x[i] += (0..l.ncols()).map(|j| l[(i, j)] * g[j]).sum::<f64>();
                }
            }
            for (k, (comp, s)) in comps.iter().zip(&samplers).enumerate() {
                let u = s.sample(&mut substream(cfg.seed, k as u64 + 1, path));
                for (xi, ci) in x.iter_mut().zip(&comp.x) {
                    *xi += u * ci;
                }
            }
            x
        })
        .collect();
    Ok(rows)
}

/// Elementary components of `ν` after moving atoms at infinity to radius `2^push_exponent`.
pub fn elementary_decomposition(spec: &EtsSpec, push_exponent: u32) -> Result<Vec<ElementaryComponent>> {
    let far = 2f64.powi(push_exponent.min(1000) as i32);
    let mut nu = AtomicMeasure::empty(spec.dimension());
    for a in spec.nu.atoms() {
        let atom = if a.is_infinite() {
            let point = DirPoint {
                radius: ExtReal::Finite(far),
                direction: a.direction().to_vec(),
            };
            Atom::new(point, a.weight)?
        } else {
            a.clone()
        };
        nu.push(atom);
    }
    to_elementary_sum(&nu, spec.alpha, spec.p, &QuadratureConfig::default())
}

/// `L` with `L Lᵀ = A`, from the eigendecomposition (so rank-deficient `A` is fine).
fn gaussian_factor(a: &DMatrix<f64>) -> Result<Option<DMatrix<f64>>> {
    check_psd(a)?;
    if a.iter().all(|&v| v == 0.0) {
        return Ok(None);
    }
    let eig = ((a + a.transpose()) * 0.5).symmetric_eigen();
    let d = a.nrows();
    let mut l = DMatrix::zeros(d, d);
    for k in 0..d {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        for i in 0..d {
            l[(i, k)] = eig.eigenvectors[(i, k)] * lam;
        }
    }
    Ok(Some(l))
}

/// `(1/n) Σ_j e^{i⟨z, x_j⟩}` at every grid point.
pub fn empirical_cf(samples: &[Vec<f64>], grid: &CfGrid) -> Result<Vec<Complex64>> {
    let Some(first) = samples.first() else {
        return Err(EtsError::invalid("no samples"));
    };
    if first.len() != grid.dimension() || samples.iter().any(|s| s.len() != first.len()) {
        return Err(EtsError::DimensionMismatch {
            expected: grid.dimension(),
            found: first.len(),
        });
    }
    let n = samples.len() as f64;
    Ok(grid
        .points()
        .par_iter()
        .map(|z| {
            let (mut re, mut im) = (0.0, 0.0);
            for x in samples {
                let (s, c) = dot(z, x).sin_cos();
                re += c;
                im += s;
            }
            Complex64::new(re / n, im / n)
        })
        .collect())
}

/// Samples as CSV with header `x1,...,xd` and 17 significant digits.
pub fn samples_to_csv(samples: &[Vec<f64>], d: usize) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in samples {
        let cells: Vec<String> = row.iter().map(|v| format_real(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// A real number with 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}
