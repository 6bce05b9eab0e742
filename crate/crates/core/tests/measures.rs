mod common;

use common::{dictionary, random_measure, random_tempering, tempering_oracle, unit};
use ets_core::measures::*;
use ets_core::{EtsError, ExtReal, QuadratureConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn atom(r: f64, u: &[f64], w: f64) -> (ExtReal, Vec<f64>, f64) {
    (ExtReal::from(r), u.to_vec(), w)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn validation_examples() {
    let r = AtomicMeasure::from_triples(1, &[atom(2.0, &[1.0], 3.0)]).unwrap();
    let rep = validate_rosinski(&r, -1.0).unwrap();
    assert!(rep.valid);
    assert_eq!(rep.mass_functional, 3.0);
    assert_eq!(rep.regime, Regime::Negative);

    let unit_atom = AtomicMeasure::from_triples(2, &[atom(1.0, &[0.0, 1.0], 1.0)]).unwrap();
    for &alpha in &[-1.0, 0.0, 0.7, 1.9] {
        assert_eq!(validate_rosinski(&unit_atom, alpha).unwrap().mass_functional, 1.0);
    }
    let empty = validate_rosinski(&AtomicMeasure::empty(3), 0.5).unwrap();
    assert!(empty.valid && empty.mass_functional == 0.0);

    let inf = AtomicMeasure::from_triples(1, &[atom(f64::INFINITY, &[1.0], 1.0)]).unwrap();
    assert!(matches!(validate_rosinski(&inf, 1.0), Err(EtsError::InfiniteRadiusAtom)));
}

#[test]
fn wedge_regimes() {
    assert_eq!(wedge(0.5, 1.0), 0.25);
    assert_eq!(wedge(4.0, 0.5), 2.0);
    assert!((wedge(std::f64::consts::E, 0.0) - 2.0).abs() < 1e-15);
    assert_eq!(wedge(10.0, -0.5), 1.0);
}

#[test]
fn extended_examples() {
    let u = [1.0];
    let r = AtomicMeasure::from_triples(1, &[atom(2.0, &u, 1.0)]).unwrap();
    let nu = rosinski_to_extended(&r, &AtomicMeasure::empty(1), 0.5).unwrap();
    assert!((nu.atoms()[0].weight - 2f64.sqrt()).abs() < 1e-15);

    let (back, stable) = extended_to_rosinski(&nu, 0.5).unwrap();
    assert!((back.atoms()[0].weight - 1.0).abs() < 1e-15);
    assert!(stable.is_empty());

    let r5 = AtomicMeasure::from_triples(1, &[atom(1.0, &u, 5.0)]).unwrap();
    for &alpha in &[-1.0, 0.0, 1.0] {
        let nu = rosinski_to_extended(&r5, &AtomicMeasure::empty(1), alpha).unwrap();
        assert_eq!(nu.atoms()[0].weight, 5.0);
    }

    let s = AtomicMeasure::from_triples(1, &[atom(1.0, &u, 2.0)]).unwrap();
    let nu = rosinski_to_extended(&AtomicMeasure::empty(1), &s, 1.0).unwrap();
    assert_eq!(nu.len(), 1);
    assert!(nu.atoms()[0].is_infinite());
    assert_eq!(nu.atoms()[0].weight, 2.0);
    let (r, stable) = extended_to_rosinski(&nu, 1.0).unwrap();
    assert!(r.is_empty());
    assert_eq!(stable.atoms()[0].weight, 2.0);
    assert_eq!(stable.atoms()[0].radius(), ExtReal::Finite(1.0));

    let (r, s) = extended_to_rosinski(&AtomicMeasure::empty(2), 0.3).unwrap();
    assert!(r.is_empty() && s.is_empty());

    assert!(matches!(
        rosinski_to_extended(&AtomicMeasure::empty(1), &s_one(), 0.0),
        Err(EtsError::StablePartForbidden(_))
    ));
    assert!(matches!(extended_to_rosinski(&nu, -0.5), Err(EtsError::StablePartForbidden(_))));
}

fn s_one() -> AtomicMeasure {
    AtomicMeasure::from_triples(1, &[atom(1.0, &[1.0], 1.0)]).unwrap()
}

#[test]
fn tempering_examples() {
    let u = vec![0.6, 0.8];
    let entry = |w: f64, s: f64| TemperingEntry {
        direction: u.clone(),
        sigma_weight: w,
        q_atoms: vec![QAtom { s, weight: 1.0 }],
    };
    for &(alpha, p) in &[(-1.0, 0.5), (0.0, 1.0), (1.5, 3.0)] {
        let spec = TemperingSpec::new(2, vec![entry(1.0, 1.0)]).unwrap();
        let (r, s) = tempering_to_rosinski(&spec, alpha, p).unwrap();
        assert!(s.is_empty());
        assert_eq!(r.atoms()[0].radius(), ExtReal::Finite(1.0));
        assert_eq!(r.atoms()[0].weight, 1.0);
    }
    let spec = TemperingSpec::new(2, vec![entry(1.0, 4.0)]).unwrap();
    let (r, _) = tempering_to_rosinski(&spec, 1.0, 2.0).unwrap();
    assert!((r.atoms()[0].radius().value() - 0.5).abs() < 1e-15);
    assert!((r.atoms()[0].weight - 2.0).abs() < 1e-15);

    let spec = TemperingSpec::new(2, vec![entry(3.0, 0.0)]).unwrap();
    let (r, s) = tempering_to_rosinski(&spec, 1.5, 1.0).unwrap();
    assert!(r.is_empty());
    assert_eq!(s.atoms()[0].weight, 3.0);
    assert_eq!(s.atoms()[0].direction(), &u[..]);
    assert!(matches!(tempering_to_rosinski(&spec, 0.0, 1.0), Err(EtsError::StablePartForbidden(_))));
}

fn smoothed_indicator(y: &[f64]) -> f64 {
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r >= 1.0 {
        1.0
    } else {
        0.0
    }
}

#[test]
fn levy_integral_examples() {
    let nu = AtomicMeasure::from_triples(1, &[atom(1.0, &[1.0], 1.0)]).unwrap();
    let v = levy_integral(&smoothed_indicator, &nu, -1.0, 1.0, &cfg()).unwrap();
    assert!((v - (-1f64).exp()).abs() < 1e-8, "{v}");

    let empty = AtomicMeasure::empty(2);
    assert_eq!(levy_integral(&smoothed_indicator, &empty, 0.5, 1.0, &cfg()).unwrap(), 0.0);

    let inf = AtomicMeasure::from_triples(1, &[atom(f64::INFINITY, &[1.0], 1.0)]).unwrap();
    let v = levy_integral(&smoothed_indicator, &inf, 1.0, 1.0, &cfg()).unwrap();
    assert!((v - 1.0).abs() < 1e-8, "{v}");
    assert!(levy_integral(&smoothed_indicator, &inf, -1.0, 1.0, &cfg()).is_err());
}

#[test]
fn levy_integral_reports_divergence() {
    // a constant does not vanish at the origin
    let nu = AtomicMeasure::from_triples(1, &[atom(1.0, &[1.0], 1.0)]).unwrap();
    let r = levy_integral(&|_: &[f64]| 1.0, &nu, 0.5, 1.0, &cfg());
    assert!(matches!(r, Err(EtsError::DivergentIntegral(_))), "{r:?}");
}

#[test]
fn tail_mass_examples() {
    let nu = AtomicMeasure::from_triples(1, &[atom(1.0, &[1.0], 1.0)]).unwrap();
    assert!((levy_tail_mass(&nu, -1.0, 1.0, 1.0) - (-1f64).exp()).abs() < 1e-10);
    let far = levy_tail_mass(&nu, -1.0, 1.0, 1e3);
    assert!(far >= 0.0 && far < 1e-300);

    let inf = AtomicMeasure::from_triples(1, &[atom(f64::INFINITY, &[1.0], 3.0)]).unwrap();
    assert!((levy_tail_mass(&inf, 1.0, 1.0, 2.0) - 1.5).abs() < 1e-15);
}

#[test]
fn tempering_and_rosinski_give_the_same_levy_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dict = dictionary();
    let alphas = [-1.0, 0.0, 0.5, 1.5];
    let ps = [0.5, 1.0, 2.0];
    for case in 0..8 {
        let d = 1 + case % 3;
        let alpha = alphas[case % 4];
        let p = ps[case % 3];
        let spec = random_tempering(&mut rng, d);
        let (r, stable) = tempering_to_rosinski(&spec, alpha, p).unwrap();
        assert!(stable.is_empty());
        let nu = rosinski_to_extended(&r, &stable, alpha).unwrap();
        for (k, f) in dict.iter().enumerate() {
            let lib = levy_integral(f, &nu, alpha, p, &cfg()).unwrap_or_else(|e| panic!("case {case} f{k} a={alpha} p={p} {e:?} {nu:?}"));
            let oracle = tempering_oracle(f.as_ref(), &spec, alpha, p);
            assert!(
                (lib - oracle).abs() <= 1e-6 * oracle.abs().max(1.0),
                "case {case} f{k}: {lib} vs {oracle}"
            );
        }
    }
}

#[test]
fn stable_part_integrates_as_a_pure_power() {
    // ∫ (1 − e^{−r²}) r^{−1−α} dr = Γ(1 − α/2) / α
    let alpha = 0.8;
    let nu = AtomicMeasure::from_triples(2, &[atom(f64::INFINITY, &[0.0, 1.0], 1.7)]).unwrap();
    let f = |y: &[f64]| -(-(y[0] * y[0] + y[1] * y[1])).exp_m1();
    let v = levy_integral(&f, &nu, alpha, 1.0, &cfg()).unwrap();
    let exact = 1.7 * common::gamma(1.0 - alpha / 2.0) / alpha;
    assert!(rel(v, exact) < 1e-8, "{v} vs {exact}");
}

#[test]
fn changing_a_weight_changes_the_tail() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &alpha in &[-1.0, 0.0, 0.5, 1.5] {
        let nu = random_measure(&mut rng, 2, 4);
        let mut atoms = nu.clone().into_atoms();
        let k = rng.random_range(0..atoms.len());
        atoms[k].weight += 1e-3;
        let nu2 = AtomicMeasure::new(2, atoms).unwrap();
        let gap = [0.01, 0.1, 1.0, 10.0]
            .iter()
            .map(|&r| (levy_tail_mass(&nu, alpha, 1.0, r) - levy_tail_mass(&nu2, alpha, 1.0, r)).abs())
            .fold(0.0, f64::max);
        assert!(gap > 1e-9, "alpha {alpha}: gap {gap}");
    }
}

#[test]
fn json_round_trip() {
    let text = r#"{"dimension":2,"atoms":[{"radius":"inf","direction":[0.0,1.0],"weight":0.5},
        {"radius":0.1,"direction":[0.6,-0.8],"weight":2.0}]}"#;
    let m: AtomicMeasure = serde_json::from_str(text).unwrap();
    let again: AtomicMeasure = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(m, again);

    assert!(serde_json::from_str::<AtomicMeasure>(
        r#"{"dimension":1,"atoms":[{"radius":1,"direction":[0.5],"weight":1}]}"#
    )
    .is_err());
    assert!(serde_json::from_str::<AtomicMeasure>(
        r#"{"dimension":1,"atoms":[{"radius":1,"direction":[1],"weight":-1}]}"#
    )
    .is_err());

    let spec = r#"{"alpha":0.5,"p":1,"A":[[1,0],[0,2]],"b":[0,1],"nu":{"dimension":2,"atoms":[]}}"#;
    let s: EtsSpec = serde_json::from_str(spec).unwrap();
    assert_eq!(s.a[(1, 1)], 2.0);
    let bad = r#"{"alpha":0.5,"p":1,"A":[[1,0],[0,-2]],"b":[0,1],"nu":{"dimension":2,"atoms":[]}}"#;
    assert!(serde_json::from_str::<EtsSpec>(bad).is_err());
    // decimal inputs must survive a write/read cycle bit for bit
    let long = r#"{"alpha":0.5,"p":1.999999e53,"A":[[1]],"b":[1],
        "nu":{"dimension":1,"atoms":[{"radius":1e-305,"direction":[-1],"weight":1e300}]}}"#;
    let s: EtsSpec = serde_json::from_str(long).unwrap();
    assert_eq!(serde_json::from_str::<EtsSpec>(&serde_json::to_string(&s).unwrap()).unwrap(), s);
    let stable_neg = r#"{"alpha":-0.5,"p":1,"A":[[0]],"b":[0],
        "nu":{"dimension":1,"atoms":[{"radius":"inf","direction":[1],"weight":1}]}}"#;
    assert!(serde_json::from_str::<EtsSpec>(stable_neg).is_err());
}

#[test]
fn canonicalize_merges_duplicates() {
    let u = [0.6, 0.8];
    let m = AtomicMeasure::from_triples(
        2,
        &[atom(2.0, &u, 1.0), atom(0.5, &[1.0, 0.0], 1.0), atom(2.0, &u, 0.25)],
    )
    .unwrap()
    .canonicalize();
    assert_eq!(m.len(), 2);
    assert_eq!(m.atoms()[0].radius(), ExtReal::Finite(0.5));
    assert_eq!(m.atoms()[1].weight, 1.25);
}

fn arb_measure(d: usize, stable: bool) -> impl Strategy<Value = AtomicMeasure> {
    let finite = prop::collection::vec((-4.0f64..4.0, prop::collection::vec(-1.0f64..1.0, d), 0.01f64..10.0), 0..6);
    let infinite = prop::collection::vec((prop::collection::vec(-1.0f64..1.0, d), 0.01f64..10.0), 0..3);
    (finite, infinite).prop_filter_map("degenerate direction", move |(f, i)| {
        let mut triples = Vec::new();
        for (lr, v, w) in f {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-3 {
                return None;
            }
            triples.push((ExtReal::Finite(10f64.powf(lr)), v.iter().map(|x| x / n).collect(), w));
        }
        if stable {
            for (v, w) in i {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n < 1e-3 {
                    return None;
                }
                triples.push((ExtReal::Infinity, v.iter().map(|x| x / n).collect(), w));
            }
        }
        AtomicMeasure::from_triples(d, &triples).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_is_exact(
        d in 1usize..=3,
        ai in 0usize..4,
        seed in any::<u64>(),
    ) {
        let alpha = [-1.0, 0.0, 0.5, 1.5][ai];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_measure(&mut rng, d, 1 + (seed % 6) as usize);
        let stable = if alpha > 0.0 {
            AtomicMeasure::from_triples(d, &[(ExtReal::Finite(1.0), unit(&mut rng, d), 0.7)]).unwrap()
        } else {
            AtomicMeasure::empty(d)
        };
        let nu = rosinski_to_extended(&r, &stable, alpha).unwrap();
        let (r2, s2) = extended_to_rosinski(&nu, alpha).unwrap();
        prop_assert_eq!(r2.len(), r.len());
        for (a, b) in r.atoms().iter().zip(r2.atoms()) {
            prop_assert_eq!(&a.point, &b.point);
            prop_assert!(rel(b.weight, a.weight) <= 1e-12);
        }
        prop_assert_eq!(s2, stable);
    }

    #[test]
    fn levy_integral_is_additive(
        m1 in arb_measure(2, true),
        m2 in arb_measure(2, true),
        k in prop::sample::select(vec![0usize, 1, 3, 5, 6, 7, 8]),
    ) {
        // oscillating functions do not decay along rays to infinity, so they are left out
        let alpha = 0.5;
        let dict = dictionary();
        let f = &dict[k];
        let sum = m1.add(&m2).unwrap();
        let a = levy_integral(f, &m1, alpha, 1.0, &cfg()).unwrap();
        let b = levy_integral(f, &m2, alpha, 1.0, &cfg()).unwrap();
        let c = levy_integral(f, &sum, alpha, 1.0, &cfg()).unwrap();
        prop_assert!((c - a - b).abs() <= 1e-9 * (1.0 + c.abs()), "{} vs {}", c, a + b);
    }

    #[test]
    fn tail_mass_is_nonincreasing(m in arb_measure(1, true), r in 1e-3f64..1e3, f in 1.0f64..10.0) {
        let lo = levy_tail_mass(&m, 1.2, 0.7, r);
        let hi = levy_tail_mass(&m, 1.2, 0.7, r * f);
        prop_assert!(hi <= lo * (1.0 + 1e-12) + 1e-300);
        prop_assert!(lo.is_finite());
    }
}
