use primebias::arith::{gcd, Modulus, ResiduePattern};
use primebias::constants::ModulusConstants;
use primebias::predict::{
    always_bias_difference, asymptotic_prediction, density_terms_semianalytic, integral_prediction,
    integral_prediction_table, li, INTEGRAL_TOLERANCE,
};
use proptest::prelude::*;

const P: u64 = 2_000_000;

fn consts(q: u64) -> std::sync::Arc<ModulusConstants> {
    ModulusConstants::get(q, P).unwrap()
}

#[test]
fn pair_predictions_reassemble_li() {
    let x = 1e9;
    let total_li = li(x).unwrap();
    for q in [3u64, 4, 5, 8, 10, 12] {
        let rows = integral_prediction_table(&consts(q), x).unwrap();
        let total: f64 = rows.iter().map(|r| r.value).sum();
        assert!((total / total_li - 1.0).abs() < 0.01, "q={q}: {total} vs {total_li}");
    }
}

#[test]
fn reversal_symmetry_of_the_integral() {
    for q in [5u64, 8, 12] {
        let c = consts(q);
        let red: Vec<i64> = (1..q as i64).filter(|&a| gcd(a as u64, q) == 1).collect();
        for &a in &red {
            for &b in &red {
                let x = integral_prediction(&c, a, b, 1e10).unwrap().value;
                let y = integral_prediction(&c, -b, -a, 1e10).unwrap().value;
                assert!((x / y - 1.0).abs() < 2.0 * INTEGRAL_TOLERANCE, "q={q} ({a},{b})");
            }
        }
    }
}

#[test]
fn integral_and_asymptotic_converge() {
    let c = consts(3);
    let m = Modulus::new(3).unwrap();
    for p in ResiduePattern::all(&m, 2) {
        let (a, b) = (p.classes()[0] as i64, p.classes()[1] as i64);
        let gap = |x: f64| {
            let i = integral_prediction(&c, a, b, x).unwrap().value;
            let s = asymptotic_prediction(&c, &p, x).unwrap().value;
            (i / s - 1.0).abs()
        };
        assert!(gap(1e12) < gap(1e9), "{p}");
    }
}

#[test]
fn eight_integrals_depend_on_the_difference_only() {
    let c = consts(8);
    for d in [0i64, 2, 4, 6] {
        let values: Vec<f64> =
            [1i64, 3, 5, 7].iter().map(|&a| integral_prediction(&c, a, a + d, 1e11).unwrap().value).collect();
        for v in &values {
            assert!((v / values[0] - 1.0).abs() < 2.0 * INTEGRAL_TOLERANCE, "d={d}: {values:?}");
        }
    }
}

#[test]
fn always_bias_difference_matches_the_constants() {
    let x = 1e16;
    for q in [3u64, 4] {
        let c = consts(q);
        let m = Modulus::new(q).unwrap();
        let pat = |a: i64, b: i64| ResiduePattern::new(&m, &[a, b]).unwrap();
        let diff = asymptotic_prediction(&c, &pat(1, -1), x).unwrap().value
            - asymptotic_prediction(&c, &pat(1, 1), x).unwrap().value;
        let ratio = diff / always_bias_difference(q, x).unwrap();
        assert!((ratio - 1.0).abs() < 0.05, "q={q}: ratio {ratio}");
    }
}

#[test]
fn asymptotic_c1_terms_cancel_over_all_pairs() {
    for q in [5u64, 7, 12] {
        let c = consts(q);
        let m = Modulus::new(q).unwrap();
        let s: f64 = ResiduePattern::all(&m, 2)
            .iter()
            .map(|p| asymptotic_prediction(&c, p, 1e10).unwrap().terms.unwrap().loglog_term)
            .sum();
        assert!(s.abs() < 1e-6, "q={q}: {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semianalytic_terms_reverse(q in 3u64..=24, i in 0usize..32, j in 0usize..32, log_y in 12.0f64..60.0) {
        let red: Vec<i64> = (1..q as i64).filter(|&a| gcd(a as u64, q) == 1).collect();
        let (a, b) = (red[i % red.len()], red[j % red.len()]);
        let c = consts(q);
        let y = log_y.exp();
        let x = density_terms_semianalytic(&c, a, b, y).unwrap();
        let r = density_terms_semianalytic(&c, -b, -a, y).unwrap();
        prop_assert!((x.total() - r.total()).abs() <= 1e-10 * x.total().abs());
        prop_assert!(x.alpha > 0.0 && x.alpha < 1.0 && x.h_scale > 0.0);
    }
}
