use std::f64::consts::PI;

use num_complex::Complex64;
use primebias::arith::{divisors, gcd, totient};
use primebias::characters::CharacterGroup;
use primebias::lfun::{c_q_chi, l_at_one, l_at_zero, reduce_c, PrimeTable};
use proptest::prelude::*;

#[test]
fn orthogonality_up_to_100() {
    for q in 3u64..=100 {
        let group = CharacterGroup::new(q);
        let chars: Vec<_> = group.characters().map(|c| c.value_table()).collect();
        let phi = totient(q) as f64;
        assert_eq!(chars.len() as u64, totient(q));
        // rows: sum_n chi(n) conj(psi(n)) = phi [chi = psi]
        for (i, a) in chars.iter().enumerate() {
            for (j, b) in chars.iter().enumerate() {
                let s: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                let want = if i == j { phi } else { 0.0 };
                assert!((s - want).norm() < 1e-12 * phi.max(1.0), "q={q} rows {i},{j}");
            }
        }
        // columns: sum_chi chi(m) conj(chi(n)) = phi [m = n], for units m, n
        let units: Vec<usize> = (1..q as usize).filter(|&n| gcd(n as u64, q) == 1).collect();
        for &m in units.iter().take(6) {
            for &n in &units {
                let s: Complex64 = chars.iter().map(|c| c[m] * c[n].conj()).sum();
                let want = if m == n { phi } else { 0.0 };
                assert!((s - want).norm() < 1e-12 * phi, "q={q} columns {m},{n}");
            }
        }
    }
}

#[test]
fn l_values_for_the_character_mod_4() {
    let group = CharacterGroup::new(4);
    let chi = group.characters().find(|c| !c.is_principal()).unwrap();
    assert!((l_at_one(&chi).unwrap() - Complex64::new(PI / 4.0, 0.0)).norm() < 1e-10);
    assert!((l_at_zero(&chi).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-10);
}

#[test]
fn c_vanishes_exactly_for_even_characters() {
    let primes = PrimeTable::new(100_000).unwrap();
    for q in 3u64..=40 {
        for m in divisors(q).into_iter().filter(|&m| m > 1) {
            for chi in CharacterGroup::new(m).characters().filter(|c| !c.is_principal() && !c.is_odd()) {
                assert_eq!(c_q_chi(q, &chi, &primes).unwrap(), Complex64::new(0.0, 0.0));
                assert_eq!(reduce_c(q, &chi, &primes).unwrap(), Complex64::new(0.0, 0.0));
                assert_eq!(l_at_zero(&chi).unwrap(), Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn direct_and_reduced_c_agree_up_to_30() {
    let primes = PrimeTable::new(1_000_000).unwrap();
    for q in 3u64..=30 {
        for chi in CharacterGroup::new(q).characters().filter(|c| !c.is_principal()) {
            let direct = c_q_chi(q, &chi, &primes).unwrap();
            let reduced = reduce_c(q, &chi, &primes).unwrap();
            assert!((direct - reduced).norm() < 1e-8, "q={q} label={:?}: {direct} vs {reduced}", chi.label());
        }
    }
}

#[test]
fn l_at_one_by_slow_partial_sums() {
    // sum_{n <= N} chi(n)/n converges like 1/N for non-principal chi
    for q in [3u64, 5, 7, 8, 12] {
        for chi in CharacterGroup::new(q).characters().filter(|c| !c.is_principal()) {
            let n_max = 2_000_000i64;
            let mut s = Complex64::new(0.0, 0.0);
            for n in 1..=n_max {
                s += chi.eval(n) / n as f64;
            }
            assert!((s - l_at_one(&chi).unwrap()).norm() < 2.0 * q as f64 / n_max as f64, "q={q}");
        }
    }
}

proptest! {
    #[test]
    fn characters_are_completely_multiplicative(q in 3u64..200, i in 0usize..1000, m in -500i64..500, n in -500i64..500) {
        let group = CharacterGroup::new(q);
        let chi = group.character(i % group.len());
        let lhs = chi.eval(m * n);
        let rhs = chi.eval(m) * chi.eval(n);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((chi.eval(m + q as i64) - chi.eval(m)).norm() < 1e-12);
        if gcd(m.unsigned_abs(), q) != 1 {
            prop_assert_eq!(chi.eval(m), Complex64::new(0.0, 0.0));
        } else {
            prop_assert!((chi.eval(m).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn primitive_character_induces_the_original(q in 3u64..200, i in 0usize..1000, n in 1i64..10_000) {
        let group = CharacterGroup::new(q);
        let chi = group.character(i % group.len());
        let (f, prim) = chi.conductor_and_primitive();
        prop_assert_eq!(q % f, 0);
        prop_assert!(prim.is_primitive());
        if gcd(n as u64, q) == 1 {
            prop_assert!((chi.eval(n) - prim.eval(n)).norm() < 1e-12);
        }
    }
}
