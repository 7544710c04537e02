//! Elementary arithmetic: moduli and their reduced classes, residue patterns,
//! Euler's totient, the von Mangoldt function, the sawtooth `B_q` and the
//! gap-count correction `epsilon_q(a, b)`.
//!
//! Residue representatives are canonical in `[1, q]`, so `0 (mod q)` is
//! written as `q`. This makes the sawtooth's branch `1 <= v <= q` literal.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization by trial division, ascending primes with exponents.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn distinct_prime_factors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).as_slice() == [(n, 1)]
}

pub fn totient(n: u64) -> u64 {
    assert!(n >= 1, "totient is defined for n >= 1");
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// `log p` when `n = p^k` with `k >= 1`, otherwise 0.
pub fn von_mangoldt(n: u64) -> f64 {
    match factorize(n).as_slice() {
        [(p, _)] => (*p as f64).ln(),
        _ => 0.0,
    }
}

/// Möbius function.
pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Legendre symbol `(n / p)` for an odd prime `p`.
pub fn legendre(n: i64, p: u64) -> i32 {
    let r = n.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    let mut result = 1u64;
    let mut base = r;
    let mut exp = (p - 1) / 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// A modulus `q >= 3` together with its reduced residue system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
    phi: u64,
    reduced: Vec<u64>,
    factors: Vec<(u64, u32)>,
    /// Position of each residue in `reduced`, `u32::MAX` for non-units.
    index: Vec<u32>,
}

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 {
            return invalid(format!("modulus must be at least 3, got {q}"));
        }
        if q > 1 << 24 {
            return invalid(format!("modulus {q} is too large (limit 2^24)"));
        }
        let reduced: Vec<u64> = (1..=q).filter(|&a| gcd(a, q) == 1).collect();
        let mut index = vec![u32::MAX; q as usize];
        for (i, &a) in reduced.iter().enumerate() {
            index[(a % q) as usize] = i as u32;
        }
        Ok(Modulus {
            q,
            phi: reduced.len() as u64,
            reduced,
            factors: factorize(q),
            index,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn reduced_classes(&self) -> &[u64] {
        &self.reduced
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn prime_factors(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Canonical representative in `[1, q]`.
    pub fn canonical(&self, v: i64) -> u64 {
        let q = self.q as i64;
        ((v - 1).rem_euclid(q) + 1) as u64
    }

    pub fn is_reduced(&self, a: i64) -> bool {
        gcd(self.canonical(a), self.q) == 1
    }

    /// Position of `a` in the reduced residue list, if `a` is a unit.
    pub fn class_index(&self, a: u64) -> Option<usize> {
        match self.index[(a % self.q) as usize] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }
}

/// An `r`-tuple of reduced residue classes modulo `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResiduePattern {
    q: u64,
    classes: Vec<u64>,
}

impl ResiduePattern {
    pub fn new(modulus: &Modulus, classes: &[i64]) -> Result<Self> {
        if classes.is_empty() {
            return invalid("a residue pattern needs at least one class");
        }
        let mut canon = Vec::with_capacity(classes.len());
        for &a in classes {
            if !modulus.is_reduced(a) {
                return invalid(format!("{a} is not a reduced class mod {}", modulus.q()));
            }
            canon.push(modulus.canonical(a));
        }
        Ok(ResiduePattern { q: modulus.q(), classes: canon })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn classes(&self) -> &[u64] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// The pattern `(-a_r, ..., -a_1)`.
    pub fn opposite(&self) -> ResiduePattern {
        let q = self.q;
        let classes = self.classes.iter().rev().map(|&a| q - a).collect();
        ResiduePattern { q, classes }
    }

    /// Every pattern of length `r` over the reduced classes, in lexicographic
    /// order of the classes.
    pub fn all(modulus: &Modulus, r: usize) -> Vec<ResiduePattern> {
        let classes = modulus.reduced_classes();
        let total = classes.len().pow(r as u32);
        (0..total)
            .map(|mut idx| {
                let mut pat = vec![0u64; r];
                for slot in pat.iter_mut().rev() {
                    *slot = classes[idx % classes.len()];
                    idx /= classes.len();
                }
                ResiduePattern { q: modulus.q(), classes: pat }
            })
            .collect()
    }
}

impl std::fmt::Display for ResiduePattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.classes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// `B_q(v) = 1/2 - v/q` on `1 <= v <= q`, extended with period `q`.
pub fn sawtooth_b(modulus: &Modulus, v: i64) -> f64 {
    0.5 - modulus.canonical(v) as f64 / modulus.q() as f64
}

fn admissible_count(modulus: &Modulus, a: u64, h: u64) -> u64 {
    (1..h).filter(|&t| gcd(t + a, modulus.q()) == 1).count() as u64
}

/// `epsilon_q(a, b)` from `#{0 < t < h : (t + a, q) = 1} = phi(q) h / q + epsilon`
/// for any `h > 0` with `h = b - a (mod q)`.
///
/// The value is rational with denominator dividing `q`; it is an integer only
/// when `q | phi(q) (b - a)`.
pub fn epsilon_q(modulus: &Modulus, a: i64, b: i64) -> Result<f64> {
    if !modulus.is_reduced(a) || !modulus.is_reduced(b) {
        return invalid(format!("({a}, {b}) are not both reduced mod {}", modulus.q()));
    }
    let q = modulus.q();
    let a = modulus.canonical(a);
    let h0 = modulus.canonical(b - a as i64);
    // numerator of epsilon scaled by q, which is an exact integer
    let scaled = |h: u64| (q * admissible_count(modulus, a, h)) as i64 - (modulus.phi() * h) as i64;
    let first = scaled(h0);
    let second = scaled(h0 + q);
    if first != second {
        return Err(Error::Consistency(format!(
            "epsilon_{q}({a}, {b}) depends on h: {first}/{q} vs {second}/{q}"
        )));
    }
    Ok(first as f64 / q as f64)
}

/// `epsilon_q(a_1, a_2) + ... + epsilon_q(a_{r-1}, a_r)`.
pub fn pattern_epsilon(modulus: &Modulus, pattern: &ResiduePattern) -> Result<f64> {
    if pattern.len() < 2 {
        return invalid("pattern_epsilon needs r >= 2");
    }
    pattern
        .classes()
        .windows(2)
        .map(|w| epsilon_q(modulus, w[0] as i64, w[1] as i64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(q: u64) -> Modulus {
        Modulus::new(q).unwrap()
    }

    #[test]
    fn totient_values() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(12), 4);
        let brute = (1..=100u64).filter(|&k| gcd(k, 100) == 1).count() as u64;
        assert_eq!(totient(100), brute);
        assert_eq!(totient(100), 40);
    }

    #[test]
    fn von_mangoldt_values() {
        assert!((von_mangoldt(8) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(von_mangoldt(6), 0.0);
        assert!((von_mangoldt(7) - 7f64.ln()).abs() < 1e-15);
        assert_eq!(von_mangoldt(1), 0.0);
    }

    #[test]
    fn small_moduli_rejected() {
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(2).is_err());
        assert_eq!(m(3).phi(), 2);
    }

    #[test]
    fn sawtooth() {
        let q5 = m(5);
        assert!((sawtooth_b(&q5, 2) - 0.1).abs() < 1e-15);
        assert!((sawtooth_b(&q5, 7) - 0.1).abs() < 1e-15);
        assert!((sawtooth_b(&q5, 5) + 0.5).abs() < 1e-15);
        assert!((sawtooth_b(&q5, 0) + 0.5).abs() < 1e-15);
        for q in 3..40 {
            let md = m(q);
            let s: f64 = (1..=q as i64).map(|v| sawtooth_b(&md, v)).sum();
            assert!((s + 0.5).abs() < 1e-12, "q={q}: {s}");
        }
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_q(&m(3), 1, 1).unwrap(), -1.0);
        assert_eq!(epsilon_q(&m(4), 1, 3).unwrap(), -1.0);
        assert!(epsilon_q(&m(4), 1, 2).is_err());
    }

    #[test]
    fn epsilon_is_independent_of_h() {
        for q in 3..=30u64 {
            let md = m(q);
            for &a in md.reduced_classes() {
                for &b in md.reduced_classes() {
                    let e = epsilon_q(&md, a as i64, b as i64).unwrap();
                    let h0 = md.canonical(b as i64 - a as i64);
                    for h in [h0, h0 + q, h0 + 2 * q] {
                        let count = admissible_count(&md, a, h) as f64;
                        let model = md.phi() as f64 * h as f64 / q as f64 + e;
                        assert!((count - model).abs() < 1e-9, "q={q} a={a} b={b} h={h}");
                    }
                }
            }
        }
    }

    #[test]
    fn epsilon_reversal_symmetry() {
        for q in 3..=30u64 {
            let md = m(q);
            for &a in md.reduced_classes() {
                for &b in md.reduced_classes() {
                    let lhs = epsilon_q(&md, a as i64, b as i64).unwrap();
                    let rhs = epsilon_q(&md, -(b as i64), -(a as i64)).unwrap();
                    assert_eq!(lhs, rhs, "q={q} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn pattern_epsilon_additive() {
        let q3 = m(3);
        let p2 = ResiduePattern::new(&q3, &[1, 1]).unwrap();
        let p3 = ResiduePattern::new(&q3, &[1, 1, 1]).unwrap();
        assert_eq!(pattern_epsilon(&q3, &p2).unwrap(), -1.0);
        assert_eq!(pattern_epsilon(&q3, &p3).unwrap(), -2.0);
        let p1 = ResiduePattern::new(&q3, &[1]).unwrap();
        assert!(pattern_epsilon(&q3, &p1).is_err());
    }

    #[test]
    fn pattern_validation_and_opposite() {
        let q10 = m(10);
        assert!(ResiduePattern::new(&q10, &[1, 5]).is_err());
        let p = ResiduePattern::new(&q10, &[1, 3, -3]).unwrap();
        assert_eq!(p.classes(), &[1, 3, 7]);
        assert_eq!(p.opposite().classes(), &[3, 7, 9]);
        assert_eq!(ResiduePattern::all(&q10, 2).len(), 16);
    }

    #[test]
    fn helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(4, 5), 1);
        assert!(is_prime(97) && !is_prime(91));
    }
}
