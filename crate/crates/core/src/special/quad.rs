//! Adaptive Gauss–Kronrod quadrature and the interval strategies built on it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::QuadratureConfig;
use crate::error::{EtsError, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Value and error estimate of a (partial) integral.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn add(self, other: Estimate) -> Estimate {
        Estimate::new(self.value + other.value, self.error + other.error)
    }

    pub fn scale(self, k: f64) -> Estimate {
        Estimate::new(self.value * k, self.error * k.abs())
    }
}

/// One application of the 21-point Kronrod rule with its embedded 10-point Gauss rule.
pub(crate) fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Estimate::new(value, error)
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

fn target(cfg: &QuadratureConfig, value: f64) -> f64 {
    cfg.abs_tol.max(cfg.rel_tol * value.abs())
}

/// Globally adaptive bisection on `[a, b]`; always returns the best estimate,
/// flagging whether the tolerance was reached.
pub(crate) fn adaptive_estimate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> (Estimate, bool) {
    if a == b {
        return (Estimate::default(), true);
    }
    let first = gk21(f, a, b);
    if !first.value.is_finite() {
        return (first, false);
    }
    if first.error <= target(cfg, first.value) {
        return (first, true);
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, est: first });
    let mut total = first;
    let mut splits = 1;
    while splits < cfg.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Segment { a: worst.a, b: mid, est: left });
        heap.push(Segment { a: mid, b: worst.b, est: right });
        splits += 1;
        // running sums drift; re-sum periodically
        if splits % 64 == 0 {
            total = heap.iter().fold(Estimate::default(), |acc, s| acc.add(s.est));
        }
        if total.error <= target(cfg, total.value) {
            break;
        }
    }
    let total = heap.iter().fold(Estimate::default(), |acc, s| acc.add(s.est));
    let ok = total.value.is_finite() && total.error <= target(cfg, total.value);
    (total, ok)
}

pub(crate) fn into_result(est: Estimate, ok: bool) -> Result<Estimate> {
    if ok {
        Ok(est)
    } else {
        Err(EtsError::QuadratureFailure {
            estimate: est.value,
            error: est.error,
        })
    }
}

/// Adaptive integral over the finite interval `[a, b]`.
pub(crate) fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let (est, ok) = adaptive_estimate(f, a, b, cfg);
    into_result(est, ok)
}

/// `∫_0^a t^beta h(t) dt` for `beta > -1`, after the substitution
/// `t = a u^{1/(beta+1)}` which removes the algebraic endpoint singularity.
pub(crate) fn power_origin<H: Fn(f64) -> f64>(
    beta: f64,
    a: f64,
    h: &H,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    debug_assert!(beta > -1.0);
    if a == 0.0 {
        return Ok(Estimate::default());
    }
    let e = beta + 1.0;
    let inv = 1.0 / e;
    let g = |u: f64| h(a * u.powf(inv));
    let inner = adaptive(&g, 0.0, 1.0, cfg)?;
    Ok(inner.scale(a.powf(e) / e))
}

/// Upper bound on `∫_T^∞ t^gamma exp(-(t/scale)^p) dt`, or infinity when the
/// elementary bound does not apply yet at this `T`.
pub(crate) fn kernel_tail_bound(gamma: f64, p: f64, scale: f64, t: f64) -> f64 {
    if scale.is_infinite() {
        return if gamma < -1.0 {
            t.powf(gamma + 1.0) / (-gamma - 1.0)
        } else {
            f64::INFINITY
        };
    }
    let v = t / scale;
    let x = v.powf(p);
    let shape = (gamma + 1.0) / p;
    if x < 2.0 * (shape - 1.0).max(0.0) || x < 1.0 {
        return f64::INFINITY;
    }
    // Γ(a, x) ≤ x^{a-1} e^{-x} / (1 - (a-1)/x) ≤ 2 x^{a-1} e^{-x}
    scale.powf(gamma + 1.0) * 2.0 / p * v.powf(gamma + 1.0 - p) * (-x).exp()
}

/// `∫_lo^hi f` for `0 < lo < hi ≤ ∞`, integrating dyadic chunks `[lo 2^k, lo 2^{k+1}]`.
///
/// For `hi = ∞` the loop stops once `tail(T)` (a bound on `∫_T^∞ |f|`) falls
/// under the tolerance.
pub(crate) fn geometric<F: Fn(f64) -> f64, B: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    tail: &B,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    debug_assert!(lo > 0.0 && hi > lo);
    let mut total = Estimate::default();
    let mut left = lo;
    let mut chunks = 0usize;
    loop {
        let right = (left * 2.0).min(hi);
        let piece = adaptive(f, left, right, cfg)?;
        total = total.add(piece);
        chunks += 1;
        if right >= hi {
            return Ok(total);
        }
        left = right;
        if hi.is_infinite() {
            let bound = tail(left);
            if bound <= 0.1 * target(cfg, total.value) {
                total.error += bound;
                return Ok(total);
            }
            if chunks > 1100 || !left.is_finite() || left > 1e300 {
                return Err(EtsError::QuadratureFailure {
                    estimate: total.value,
                    error: total.error + bound,
                });
            }
        }
    }
}
