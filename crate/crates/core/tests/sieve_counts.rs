use primebias::arith::Modulus;
use primebias::sieve::{count_patterns, primes_up_to, Limit, SieveConfig};

fn config(q: u64, r: usize, limit: Limit) -> SieveConfig {
    SieveConfig::new(Modulus::new(q).unwrap(), r, limit)
}

#[test]
fn first_hundred_million_mod10() {
    let t = count_patterns(&config(10, 2, Limit::ByCount(100_000_000))).unwrap();
    let expected: [(u64, u64, u64); 16] = [
        (1, 1, 4_623_042),
        (1, 3, 7_429_438),
        (1, 7, 7_504_612),
        (1, 9, 5_442_345),
        (3, 1, 6_010_982),
        (3, 3, 4_442_562),
        (3, 7, 7_043_695),
        (3, 9, 7_502_896),
        (7, 1, 6_373_981),
        (7, 3, 6_755_195),
        (7, 7, 4_439_355),
        (7, 9, 7_431_870),
        (9, 1, 7_991_431),
        (9, 3, 6_372_941),
        (9, 7, 6_012_739),
        (9, 9, 4_622_916),
    ];
    for (a, b, n) in expected {
        assert_eq!(t.get(&[a, b]), Some(n), "({a},{b})");
    }
    assert_eq!(t.windows, 100_000_000);
}

/// Every window recounted from a plain list of primes by trial residues.
fn brute_counts(q: u64, r: usize, skip: usize, x: u64) -> Vec<(Vec<u64>, u64)> {
    let primes: Vec<u64> = primes_up_to(2 * x + 1000).into_iter().filter(|&p| p > q).collect();
    let mut map = std::collections::BTreeMap::new();
    for i in 0..primes.len() {
        if primes[i] > x {
            break;
        }
        let classes: Vec<u64> = (0..r).map(|j| primes[i + j * skip] % q).map(|c| if c == 0 { q } else { c }).collect();
        *map.entry(classes).or_insert(0u64) += 1;
    }
    map.into_iter().collect()
}

#[test]
fn matches_brute_force_for_small_moduli() {
    for (q, r, skip) in [(3u64, 2usize, 1usize), (4, 3, 1), (5, 2, 2), (12, 2, 1), (10, 3, 2), (7, 1, 1)] {
        let x = 200_000;
        let t = count_patterns(&config(q, r, Limit::ByX(x)).segment_entries(1 << 12).skip(skip)).unwrap();
        let brute = brute_counts(q, r, skip, x);
        let total: u64 = brute.iter().map(|(_, c)| c).sum();
        assert_eq!(t.windows, total, "q={q} r={r} skip={skip}");
        for (classes, c) in brute {
            assert_eq!(t.get(&classes), Some(c), "q={q} {classes:?}");
        }
    }
}

#[test]
fn thread_count_does_not_change_counts() {
    let base = count_patterns(&config(8, 2, Limit::ByX(3_000_000)).segment_entries(1 << 12)).unwrap();
    for threads in [2, 4, 8] {
        let t = count_patterns(&config(8, 2, Limit::ByX(3_000_000)).segment_entries(1 << 12).threads(threads)).unwrap();
        assert_eq!(t, base, "threads={threads}");
    }
}
