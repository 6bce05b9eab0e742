//! Independent numerical oracles used only by the test suites.
//!
//! Nothing here calls into the library's quadrature: these are fixed-rule
//! schemes (Gauss–Legendre panels, tanh-sinh) so that agreement between the two
//! is meaningful.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite 20-point Gauss–Legendre over `panels` equal panels.
pub fn composite_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let c = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            total += wi * f(c + 0.5 * h * xi);
        }
    }
    total * 0.5 * h
}

/// Tanh-sinh quadrature on [a, b]; tolerant of integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let h = 1.0 / 64.0;
    let half = 0.5 * (b - a);
    let mut total = 0.0;
    for k in -(6 * 64)..=(6 * 64) {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let dx = 0.5 * PI * t.cosh() / (u.cosh() * u.cosh());
        // distance to each endpoint, computed without cancellation
        let from_a = half * 2.0 / (1.0 + (-2.0 * u).exp());
        let point = a + from_a;
        if !(point > a && point < b) || dx == 0.0 {
            continue;
        }
        let fx = f(point);
        // the transformed integrand underflows to 0·∞ right at the endpoint
        if !fx.is_finite() && from_a.min(b - point) < 1e-100 {
            continue;
        }
        total += fx * dx;
    }
    total * half * h
}

/// `∫_0^∞ f` by tanh-sinh on [0, 1] and Gauss–Legendre panels of width `panel` up to `top`.
pub fn half_line<F: Fn(f64) -> f64>(f: F, top: f64, panel: f64) -> f64 {
    let near = tanh_sinh(&f, 0.0, 1.0);
    if top <= 1.0 {
        return near;
    }
    let panels = ((top - 1.0) / panel).ceil() as usize;
    near + composite_gl(&f, 1.0, top, panels)
}

/// `Γ(x)` from statrs (Lanczos, with reflection for negative arguments).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Closed form of `∫_0^∞ (e^{ist} − 1 − ist/(1+t²)) t^{−1−α} dt` for `α ∈ (0,1) ∪ (1,2)`.
pub fn stable_psi(s: f64, alpha: f64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let sg = s.signum();
    let main = Complex64::from_polar(gamma(-alpha) * s.abs().powf(alpha), -PI * alpha * sg / 2.0);
    // ∫_0^∞ t^{-α}/(1+t²) dt = (π/2)/cos(πα/2) for α ∈ (−1, 1); for α ∈ (1,2)
    // the compensator combines with the t^{-α} tail into the second constant
    let lin = if alpha < 1.0 {
        -(PI / 2.0) / (PI * alpha / 2.0).cos()
    } else {
        (PI / 2.0) / (PI * (3.0 - alpha) / 2.0).sin()
    };
    main + Complex64::new(0.0, s * lin)
}

/// Brute-force `ψ` for a finite taper scale, integrating until the taper is below 1e−18.
pub fn brute_psi(s: f64, alpha: f64, p: f64, rho: f64) -> Complex64 {
    let top = rho * 42f64.powf(1.0 / p);
    let kernel = |t: f64| t.powf(-1.0 - alpha) * (-(t / rho).powf(p)).exp();
    let re = |t: f64| {
        let h = (0.5 * s * t).sin();
        -2.0 * h * h * kernel(t)
    };
    let im = |t: f64| ((s * t).sin() - s * t / (1.0 + t * t)) * kernel(t);
    let panel = (0.05 / s.abs().max(1e-3)).min(0.05);
    Complex64::new(half_line(re, top, panel), half_line(im, top, panel))
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Asymptotic Kolmogorov survival function `P(√n D > x)`.
pub fn kolmogorov_pvalue(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        sum += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `∫_0^∞ f` with tanh-sinh on [0, 1] and Gauss–Legendre panels on `[1, top]` whose
/// width grows geometrically but never exceeds `max_panel`.
pub fn half_line_geometric<F: Fn(f64) -> f64>(f: F, top: f64, max_panel: f64) -> f64 {
    let mut total = tanh_sinh(&f, 0.0, 1.0);
    let mut lo = 1.0;
    while lo < top {
        let hi = (2.0 * lo).min(top);
        let panels = ((hi - lo) / max_panel).ceil().max(8.0) as usize;
        total += composite_gl(&f, lo, hi, panels);
        lo = hi;
    }
    total
}

/// Dawson's integral `e^{−x²} ∫_0^x e^{t²} dt` for `x ≥ 0`.
pub fn dawson(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x > 60.0 {
        // asymptotic series, accurate to far below 1e-12 here
        let y = 1.0 / (2.0 * x * x);
        return (1.0 + y * (1.0 + 3.0 * y * (1.0 + 5.0 * y))) / (2.0 * x);
    }
    // the integrand is concentrated within a few multiples of 1/x below x
    let lo = (x - 40.0 / x).max(0.0);
    let panels = (((x - lo) * x.max(1.0)) / 2.0).ceil().max(4.0) as usize;
    composite_gl(|t| ((t - x) * (t + x)).exp(), lo, x, panels)
}

pub fn unit<R: rand::Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn log_uniform<R: rand::Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

/// Random finite atomic measure with `k` atoms, radii in `[1e-2, 1e2]`.
pub fn random_measure<R: rand::Rng>(rng: &mut R, d: usize, k: usize) -> ets_core::AtomicMeasure {
    let triples: Vec<_> = (0..k)
        .map(|_| {
            (
                ets_core::ExtReal::Finite(log_uniform(rng, 1e-2, 1e2)),
                unit(rng, d),
                log_uniform(rng, 0.05, 5.0),
            )
        })
        .collect();
    ets_core::AtomicMeasure::from_triples(d, &triples).unwrap()
}

/// Kolmogorov–Smirnov distance between sorted samples and a CDF given by its
/// right-continuous values `cdf` and left limits `cdf_left`.
pub fn ks_distance<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(sorted: &[f64], cdf: F, cdf_left: G) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        d = d.max((cdf_left(x) - i as f64 / n).abs());
        d = d.max((cdf(x) - j as f64 / n).abs());
        i = j;
    }
    d
}

/// Contribution of one Rosiński atom `x` (norm `rho`, `s = ⟨x, z⟩`) with unit weight to the
/// characteristic exponent, integrated directly with the centering `⟨z,y⟩/(1+|y|²)`:
/// `∫_0^∞ (e^{ist} − 1 − ist/(1+ρ²t²)) t^{−1−α} e^{−t^p} dt`.
pub fn brute_atom(s: f64, rho: f64, alpha: f64, p: f64) -> Complex64 {
    let top = 42f64.powf(1.0 / p);
    let kernel = |t: f64| t.powf(-1.0 - alpha) * (-t.powf(p)).exp();
    let re = |t: f64| {
        let h = (0.5 * s * t).sin();
        -2.0 * h * h * kernel(t)
    };
    let im = |t: f64| ((s * t).sin() - s * t / (1.0 + rho * rho * t * t)) * kernel(t);
    let panel = (0.05 / s.abs().max(1e-3)).min(0.05);
    Complex64::new(half_line(re, top, panel), half_line(im, top, panel))
}

/// Conditional means of `m` equal-mass cells of N(0,1), with cell edges found by
/// bisection on the CDF and the means by quadrature of `x φ(x)`.
pub fn normal_quantile_means(m: usize) -> Vec<f64> {
    let quantile = |q: f64| {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let edges: Vec<f64> = (0..=m)
        .map(|i| match i {
            0 => -12.0,
            i if i == m => 12.0,
            i => quantile(i as f64 / m as f64),
        })
        .collect();
    let phi = |x: f64| x * (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    edges
        .windows(2)
        .map(|w| m as f64 * composite_gl(phi, w[0], w[1], 64))
        .collect()
}

/// CDF of `d + Σ_{k ≤ N} J_k`, `N ~ Poisson(λ)`, with positive jumps of characteristic
/// function `jump_cf`, tabulated by Gil-Pelaez inversion of the continuous part.
pub struct CompoundPoissonCdf {
    pub drift: f64,
    pub no_jump: f64,
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl CompoundPoissonCdf {
    /// `span` bounds the support of the jump sum used for the table; beyond it the
    /// continuous part is taken as complete.
    pub fn new<J: Fn(f64) -> Complex64 + Sync>(lambda: f64, drift: f64, jump_cf: J, span: f64) -> Self {
        use rayon::prelude::*;
        let top = 1000.0;
        let panels = 8000;
        let (gx, gw) = gauss_legendre(20);
        let h = top / panels as f64;
        let mut nodes = Vec::with_capacity(panels * 20);
        for k in 0..panels {
            let c = (k as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                let s = c + 0.5 * h * x;
                // continuous part, with the drift factored out: e^{−λ}(e^{λφ_J(s)} − 1)
                let phi = (-lambda).exp() * ((lambda * jump_cf(s)).exp() - 1.0);
                nodes.push((s, 0.5 * h * w, phi));
            }
        }
        let mass = 1.0 - (-lambda).exp();
        let n = 2000;
        let xs: Vec<f64> = (0..=n).map(|i| span * i as f64 / n as f64).collect();
        let values: Vec<f64> = xs
            .par_iter()
            .map(|&y| {
                let integral: f64 = nodes
                    .iter()
                    .map(|&(s, w, phi)| w * (Complex64::from_polar(1.0, -s * y) * phi).im / s)
                    .sum();
                (mass / 2.0 - integral / PI).clamp(0.0, mass)
            })
            .collect();
        CompoundPoissonCdf { drift, no_jump: (-lambda).exp(), xs, values }
    }

    fn continuous(&self, x: f64) -> f64 {
        let y = x - self.drift;
        if y <= 0.0 {
            return 0.0;
        }
        let last = *self.xs.last().unwrap();
        if y >= last {
            return *self.values.last().unwrap();
        }
        let step = self.xs[1];
        let i = ((y / step) as usize).min(self.xs.len() - 2);
        let t = (y - self.xs[i]) / step;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// `P(U ≤ x)`; the atom at the drift is located to within 1e-9.
    pub fn cdf(&self, x: f64) -> f64 {
        let atom = if x >= self.drift - 1e-9 { self.no_jump } else { 0.0 };
        atom + self.continuous(x)
    }

    /// `P(U < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atom = if x > self.drift + 1e-9 { self.no_jump } else { 0.0 };
        atom + self.continuous(x)
    }
}

/// KS distance and asymptotic p-value of `n` exact draws of the `α = −1` elementary law
/// `(c, p, b)` against the inverted-CF oracle. Only `p ∈ {1, 2}` have closed-form jump laws here.
pub fn alpha_minus_one_ks(c: f64, p: f64, b: f64, n: usize, seed: u64) -> (f64, f64) {
    use ets_core::simulate::{sample_elementary, SamplerConfig};
    // jump density ∝ e^{−t^p}; λ = c ∫ e^{−t^p}
    let (lambda, jump_cf): (f64, Box<dyn Fn(f64) -> Complex64 + Sync>) = if p == 1.0 {
        (c, Box::new(|s: f64| Complex64::new(1.0, 0.0) / Complex64::new(1.0, -s)))
    } else if p == 2.0 {
        (
            c * PI.sqrt() / 2.0,
            Box::new(|s: f64| {
                let im = 2.0 / PI.sqrt() * dawson(s.abs() / 2.0) * s.signum();
                Complex64::new((-s * s / 4.0).exp(), im)
            }),
        )
    } else {
        panic!("no closed-form jump law for p = {p}");
    };
    let drift = b - c * half_line_geometric(|t| t / (1.0 + t * t) * (-t.powf(p)).exp(), 80.0, 0.5);
    let cdf = CompoundPoissonCdf::new(lambda, drift, jump_cf, 40.0);
    let cfg = SamplerConfig { seed, n_paths: n, ..SamplerConfig::default() };
    let mut xs = sample_elementary(c, b, -1.0, p, &cfg).unwrap();
    xs.sort_by(f64::total_cmp);
    let d = ks_distance(&xs, |x| cdf.cdf(x), |x| cdf.cdf_left(x));
    (d, kolmogorov_pvalue((n as f64).sqrt() * d))
}

/// Dictionary of bounded test functions vanishing at least quadratically at the origin,
/// written without cancellation near 0.
pub fn dictionary() -> Vec<Box<dyn Fn(&[f64]) -> f64 + Sync>> {
    fn sq(y: &[f64]) -> f64 {
        y.iter().map(|v| v * v).sum()
    }
    vec![
        Box::new(|y| sq(y) / (1.0 + sq(y))),
        Box::new(|y| -(-sq(y)).exp_m1()),
        Box::new(|y| {
            let h = (0.5 * (0.7 * y[0] - 0.4 * y[y.len() - 1])).sin();
            2.0 * h * h
        }),
        Box::new(|y| sq(y) * (-sq(y).sqrt()).exp()),
        Box::new(|y| (1.3 * y[0]).sin() * sq(y) / (1.0 + sq(y))),
        Box::new(|y| sq(y).tanh()),
        Box::new(|y| y[0] * y[0] / (1.0 + sq(y) * sq(y))),
        Box::new(|y| {
            let r3 = sq(y).powf(1.5);
            r3 / (1.0 + r3)
        }),
        Box::new(|y| {
            let e = -(-sq(y).sqrt()).exp_m1();
            e * e
        }),
        Box::new(|y| sq(y) * sq(y) / (1.0 + sq(y) * sq(y)) * y[0].cos()),
    ]
}

/// `∫ f dM` straight from the tempering representation:
/// `Σ_u σ_u ∫_0^∞ f(ru) q(r^p, u) r^{−1−α} dr`, one radial quadrature per direction.
pub fn tempering_oracle(f: &dyn Fn(&[f64]) -> f64, spec: &ets_core::TemperingSpec, alpha: f64, p: f64) -> f64 {
    let mut total = 0.0;
    for e in spec.entries() {
        let smin = e.q_atoms.iter().map(|q| q.s).fold(f64::INFINITY, f64::min);
        let top = (42.0 / smin).powf(1.0 / p);
        let g = |r: f64| {
            let y: Vec<f64> = e.direction.iter().map(|u| r * u).collect();
            f(&y) * e.q(r.powf(p)) * r.powf(-1.0 - alpha)
        };
        total += e.sigma_weight * half_line_geometric(g, top, 0.25);
    }
    total
}

pub fn random_tempering<R: rand::Rng>(rng: &mut R, d: usize) -> ets_core::TemperingSpec {
    let k = rng.random_range(1..=5);
    let entries = (0..k)
        .map(|_| ets_core::measures::TemperingEntry {
            direction: unit(rng, d),
            sigma_weight: log_uniform(rng, 0.1, 3.0),
            q_atoms: (0..rng.random_range(1..=3))
                .map(|_| ets_core::measures::QAtom { s: log_uniform(rng, 0.5, 4.0), weight: log_uniform(rng, 0.1, 2.0) })
                .collect(),
        })
        .collect();
    ets_core::TemperingSpec::new(d, entries).unwrap()
}

/// Random spec over a small set of exponents, possibly with an atom at infinity.
pub fn random_spec(seed: u64, d: usize) -> ets_core::EtsSpec {
    use rand::Rng;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let alpha = [-1.0, 0.0, 0.5, 1.2, 1.8][rng.random_range(0..5)];
    let p = [0.5, 1.0, 2.0][rng.random_range(0..3)];
    let k = rng.random_range(0..4);
    let mut nu = random_measure(&mut rng, d, k);
    if alpha > 0.0 && rng.random::<bool>() {
        let inf = ets_core::AtomicMeasure::from_triples(d, &[(ets_core::ExtReal::Infinity, unit(&mut rng, d), 0.5)]).unwrap();
        nu = nu.add(&inf).unwrap();
    }
    let l = nalgebra::DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let b = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    ets_core::EtsSpec::new(alpha, p, &l * l.transpose(), nu, b).unwrap()
}
