use std::f64::consts::PI;
use std::sync::Arc;

use primebias::arith::{gcd, totient, von_mangoldt, Modulus, ResiduePattern};
use primebias::constants::{c1, skip_coefficient, C2Method, ModulusConstants, FORM_TOLERANCE};
use primebias::lfun::PrimeTable;
use primebias::singular::SingularContext;
use proptest::prelude::*;

const P: u64 = 1_000_000;

fn consts(q: u64) -> Arc<ModulusConstants> {
    ModulusConstants::get(q, P).unwrap()
}

fn reduced(q: u64) -> Vec<i64> {
    (1..q as i64).filter(|&a| gcd(a as u64, q) == 1).collect()
}

#[test]
fn every_form_agrees_for_q_up_to_30() {
    for q in 3u64..=30 {
        let c = consts(q);
        for &a in &reduced(q) {
            for &b in &reduced(q) {
                let forms = c.c2_forms(a, b).unwrap();
                let methods: Vec<C2Method> = forms.iter().map(|f| f.0).collect();
                assert!(methods.contains(&C2Method::Eq220) && methods.contains(&C2Method::Eq221));
                if a == b {
                    assert!(methods.contains(&C2Method::Diagonal));
                }
                if primebias::arith::is_prime(q) && a != b {
                    assert!(methods.contains(&C2Method::PrimeQ));
                }
                let lo = forms.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
                let hi = forms.iter().map(|f| f.1).fold(f64::NEG_INFINITY, f64::max);
                assert!(hi - lo <= FORM_TOLERANCE, "q={q} ({a},{b}): {forms:?}");
            }
        }
    }
}

#[test]
fn eight_depends_on_the_difference_only() {
    let c = consts(8);
    for d in [0i64, 2, 4, 6] {
        let values: Vec<f64> = [1i64, 3, 5, 7].iter().map(|&a| c.c2_pair(a, a + d).unwrap()).collect();
        assert!(values.iter().all(|v| (v - values[0]).abs() < 1e-12), "d={d}: {values:?}");
    }
    let (l2, lp) = (2f64.ln(), PI.ln());
    assert!((c.c2_pair(1, 1).unwrap() - (5.0 * l2 - 3.0 * lp) / 2.0).abs() < 1e-6);
    assert!((c.c2_pair(1, 5).unwrap() - (lp - 3.0 * l2) / 2.0).abs() < 1e-6);
    assert!((c.c2_pair(1, 3).unwrap() - (lp - l2) / 2.0).abs() < 1e-6);
    assert!((c.c2_pair(1, 7).unwrap() - (lp - l2) / 2.0).abs() < 1e-6);
}

#[test]
fn always_bias_identity() {
    for q in [3u64, 4] {
        let c = consts(q);
        for a in [1i64, -1] {
            let diff = c.c2_pair(a, -a).unwrap() - c.c2_pair(a, a).unwrap();
            assert!((diff - (2.0 * PI / q as f64).ln()).abs() < 1e-10);
        }
    }
}

#[test]
fn middle_average_of_c1_vanishes() {
    for q in 3u64..=12 {
        let m = Modulus::new(q).unwrap();
        for &a in &reduced(q) {
            for &b in &reduced(q) {
                let total: f64 = reduced(q)
                    .iter()
                    .map(|&mid| c1(&m, &ResiduePattern::new(&m, &[a, mid, b]).unwrap()).unwrap())
                    .sum();
                assert!(total.abs() < 1e-12, "q={q} ({a},{b})");
            }
        }
    }
}

/// Exploratory: averaging the r = 3 constants over the middle class gives
/// the skip-2 coefficient of the pair `(a, b)`.
#[test]
fn middle_average_of_c2_matches_skip_two() {
    for q in [3u64, 5, 8, 12] {
        let c = consts(q);
        let m = c.modulus().clone();
        let phi = m.phi() as f64;
        for &a in &reduced(q) {
            for &b in &reduced(q) {
                let avg: f64 = reduced(q)
                    .iter()
                    .map(|&mid| c.c2_general(&ResiduePattern::new(&m, &[a, mid, b]).unwrap()).unwrap())
                    .sum::<f64>()
                    / phi;
                let (_, skip) = skip_coefficient(&m, a, b, 2).unwrap();
                assert!((avg - skip).abs() < 1e-9, "q={q} ({a},{b}): {avg} vs {skip}");
            }
        }
    }
}

#[test]
fn s0c_matches_brute_force_for_small_moduli() {
    let primes = PrimeTable::new(P).unwrap();
    for q in 3u64..=12 {
        let c = consts(q);
        let ctx = SingularContext::new(c.modulus(), &primes);
        let h = 1e4;
        for v in 0..q as i64 {
            let brute = ctx.s0_brute(v, h, 0).unwrap().value;
            let main = c.s0_main(v, h);
            assert!((brute - main).abs() <= 2.0 * h.powf(-0.4), "q={q} v={v}: {brute} vs {main}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reversal_and_symmetric_sum(q in 3u64..=30, i in 0usize..64, j in 0usize..64) {
        let red = reduced(q);
        let (a, b) = (red[i % red.len()], red[j % red.len()]);
        let c = consts(q);
        let ab = c.c2_pair(a, b).unwrap();
        prop_assert!((ab - c.c2_pair(-b, -a).unwrap()).abs() < 1e-9);
        if a != b {
            let m = q / gcd((b - a).rem_euclid(q as i64) as u64, q);
            let closed = (2.0 * PI).ln() - totient(q) as f64 * von_mangoldt(m) / totient(m) as f64;
            let sum = ab + c.c2_pair(b, a).unwrap();
            prop_assert!((sum - closed).abs() < 1e-8);
            prop_assert!((c.c2_symmetric_sum(a, b).unwrap() - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn c1_sums_to_zero_over_all_pairs(q in 3u64..=60) {
        let m = Modulus::new(q).unwrap();
        let total: f64 = ResiduePattern::all(&m, 2).iter().map(|p| c1(&m, p).unwrap()).sum();
        prop_assert!(total.abs() < 1e-9);
    }

    #[test]
    fn general_constants_reverse_too(q in 3u64..=16, picks in proptest::collection::vec(0usize..64, 3..6)) {
        let red = reduced(q);
        let classes: Vec<i64> = picks.iter().map(|&k| red[k % red.len()]).collect();
        let m = Modulus::new(q).unwrap();
        let p = ResiduePattern::new(&m, &classes).unwrap();
        let c = consts(q);
        let forward = c.c2_general(&p).unwrap();
        let backward = c.c2_general(&p.opposite()).unwrap();
        prop_assert!((forward - backward).abs() < 1e-9);
    }
}
