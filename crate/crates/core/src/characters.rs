//! The full Dirichlet character group modulo `m`.
//!
//! `(Z/m)^x` is split along the prime-power factorization of `m`: a primitive
//! root for each odd prime power, `{+-1} x <5>` for `2^e` with `e >= 3`, and
//! `{+-1}` for `4`. Every unit gets an exponent vector on those generators, and
//! a character is a label vector on the same generators. Values are kept as an
//! exact exponent `k` over the group exponent `E` (the value is `exp(2 pi i k/E)`)
//! and turned into floating point only by [`DirichletCharacter::eval`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{divisors, factorize, gcd, Modulus};

#[derive(Debug)]
struct GroupData {
    modulus: u64,
    /// `(generator mod m, order)`.
    generators: Vec<(u64, u64)>,
    exponent: u64,
    /// `dlog[n * s + j]` is the exponent of generator `j` in `n`; `u32::MAX`
    /// marks non-units.
    dlog: Vec<u32>,
}

impl GroupData {
    fn rank(&self) -> usize {
        self.generators.len()
    }

    fn dlog_of(&self, n: u64) -> Option<&[u32]> {
        let s = self.rank();
        let n = (n % self.modulus) as usize;
        if self.modulus > 1 && gcd(n as u64, self.modulus) != 1 {
            return None;
        }
        Some(&self.dlog[n * s..(n + 1) * s])
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let order = p - 1;
    let ell: Vec<u64> = factorize(order).into_iter().map(|(l, _)| l).collect();
    let mut g = 2;
    loop {
        if ell.iter().all(|&l| pow_mod(g, order / l, p) != 1) {
            break;
        }
        g += 1;
    }
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    g
}

/// `x = g (mod pe)`, `x = 1 (mod m / pe)`.
fn crt_lift(g: u64, pe: u64, m: u64) -> u64 {
    let rest = m / pe;
    if rest == 1 {
        return g % m;
    }
    // x = 1 + rest * t with rest * t = g - 1 (mod pe)
    let t = ((g + pe - 1) % pe) * mod_inverse(rest % pe, pe) % pe;
    (1 + rest * t) % m
}

/// The character group modulo `m`; immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    data: Arc<GroupData>,
}

impl CharacterGroup {
    /// Builds the group for any `m >= 1` (moduli 1 and 2 give the trivial group).
    pub fn new(m: u64) -> Self {
        assert!(m >= 1, "character modulus must be positive");
        let mut generators = Vec::new();
        for (p, e) in factorize(m) {
            let pe = p.pow(e);
            if p == 2 {
                if e >= 2 {
                    generators.push((crt_lift(pe - 1, pe, m), 2));
                }
                if e >= 3 {
                    generators.push((crt_lift(5, pe, m), 1 << (e - 2)));
                }
            } else {
                let g = primitive_root_prime_power(p, e);
                generators.push((crt_lift(g, pe, m), (p - 1) * pe / p));
            }
        }
        let exponent = generators.iter().fold(1, |acc, &(_, o)| lcm(acc, o));
        let s = generators.len();
        let mut dlog = vec![u32::MAX; m as usize * s];
        let size: u64 = generators.iter().map(|&(_, o)| o).product();
        let mut digits = vec![0u64; s];
        for _ in 0..size {
            let n = generators
                .iter()
                .zip(&digits)
                .fold(1 % m, |acc, (&(g, _), &k)| acc * pow_mod(g, k, m) % m);
            for (j, &k) in digits.iter().enumerate() {
                dlog[n as usize * s + j] = k as u32;
            }
            for (j, d) in digits.iter_mut().enumerate() {
                *d += 1;
                if *d < generators[j].1 {
                    break;
                }
                *d = 0;
            }
        }
        CharacterGroup {
            data: Arc::new(GroupData { modulus: m, generators, exponent, dlog }),
        }
    }

    pub fn for_modulus(modulus: &Modulus) -> Self {
        Self::new(modulus.q())
    }

    pub fn modulus(&self) -> u64 {
        self.data.modulus
    }

    /// `(generator, order)` pairs; the orders multiply to `phi(m)`.
    pub fn generators(&self) -> &[(u64, u64)] {
        &self.data.generators
    }

    pub fn len(&self) -> usize {
        self.data.generators.iter().map(|&(_, o)| o as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn principal(&self) -> DirichletCharacter {
        DirichletCharacter { group: self.data.clone(), label: vec![0; self.data.rank()] }
    }

    /// The `i`-th character in mixed-radix label order; index 0 is principal.
    pub fn character(&self, mut i: usize) -> DirichletCharacter {
        let label = self
            .data
            .generators
            .iter()
            .map(|&(_, o)| {
                let k = (i % o as usize) as u64;
                i /= o as usize;
                k
            })
            .collect();
        DirichletCharacter { group: self.data.clone(), label }
    }

    pub fn characters(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.len()).map(move |i| self.character(i))
    }
}

/// A Dirichlet character, identified by its label on the group generators.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<GroupData>,
    label: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.label == other.label
    }
}

/// `exp(2 pi i num / den)`, exact at multiples of a quarter turn.
pub fn root_of_unity(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    match (4 * num) % den {
        0 => match 4 * num / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        },
        _ => {
            let theta = std::f64::consts::TAU * num as f64 / den as f64;
            Complex64::new(theta.cos(), theta.sin())
        }
    }
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn label(&self) -> &[u64] {
        &self.label
    }

    /// Denominator `E` of the exact value exponents.
    pub fn value_denominator(&self) -> u64 {
        self.group.exponent
    }

    /// `chi(n) = exp(2 pi i k / E)`: returns `k`, or `None` when `(n, m) > 1`.
    pub fn value_exponent(&self, n: i64) -> Option<u64> {
        let m = self.group.modulus;
        let n = n.rem_euclid(m as i64) as u64;
        let logs = self.group.dlog_of(n)?;
        let e = self.group.exponent;
        let k = self
            .group
            .generators
            .iter()
            .zip(logs)
            .zip(&self.label)
            .fold(0u64, |acc, ((&(_, order), &d), &l)| (acc + (d as u64 * l % order) * (e / order)) % e);
        Some(k)
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        match self.value_exponent(n) {
            Some(k) => root_of_unity(k, self.group.exponent),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.label.iter().all(|&l| l == 0)
    }

    /// `chi(-1)`, either `1` or `-1`.
    pub fn parity(&self) -> i32 {
        let m = self.group.modulus;
        match self.value_exponent(m as i64 - 1) {
            Some(0) => 1,
            _ => -1,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == -1
    }

    pub fn is_real(&self) -> bool {
        let e = self.group.exponent;
        (1..=self.group.modulus as i64).all(|n| match self.value_exponent(n) {
            Some(k) => (2 * k) % e == 0,
            None => true,
        })
    }

    pub fn conj(&self) -> DirichletCharacter {
        let label = self
            .group
            .generators
            .iter()
            .zip(&self.label)
            .map(|(&(_, o), &l)| (o - l) % o)
            .collect();
        DirichletCharacter { group: self.group.clone(), label }
    }

    /// The conductor `f | m` and the primitive character mod `f` that agrees
    /// with `self` on every `n` coprime to `m`.
    pub fn conductor_and_primitive(&self) -> (u64, DirichletCharacter) {
        let m = self.group.modulus;
        let conductor = divisors(m)
            .into_iter()
            .find(|&f| {
                (0..m / f)
                    .map(|j| 1 + j * f)
                    .filter(|&n| gcd(n, m) == 1)
                    .all(|n| self.value_exponent(n as i64) == Some(0))
            })
            .unwrap_or(m);
        let target = CharacterGroup::new(conductor);
        let e = self.group.exponent;
        let label = target
            .generators()
            .iter()
            .map(|&(g, order)| {
                let lift = (0..)
                    .map(|j| g + j * conductor)
                    .find(|&n| gcd(n, m) == 1)
                    .expect("a unit lift always exists");
                let k = self.value_exponent(lift as i64).expect("lift is a unit");
                debug_assert_eq!((k * order) % e, 0);
                k * order / e
            })
            .collect();
        (conductor, DirichletCharacter { group: target.data.clone(), label })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor_and_primitive().0
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.group.modulus
    }

    /// Value table over `0..m`, the external identity of a character.
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.group.modulus as i64).map(|n| self.eval(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn mod4_group() {
        let g = CharacterGroup::new(4);
        assert_eq!(g.len(), 2);
        let chi = g.characters().find(|c| !c.is_principal()).unwrap();
        assert_eq!(chi.eval(3), Complex64::new(-1.0, 0.0));
        assert_eq!(chi.eval(2), Complex64::new(0.0, 0.0));
        assert!(chi.is_odd());
    }

    #[test]
    fn mod5_cyclic() {
        let g = CharacterGroup::new(5);
        assert_eq!(g.len(), 4);
        assert_eq!(g.generators().len(), 1);
        for chi in g.characters() {
            let two = chi.eval(2);
            assert!((two.powu(4) - 1.0).norm() < TOL);
            assert!((two * two - chi.eval(4)).norm() < TOL);
        }
    }

    #[test]
    fn mod12_is_klein_four() {
        let g = CharacterGroup::new(12);
        assert_eq!(g.len(), 4);
        assert!(g.characters().all(|c| c.is_real()));
        assert_eq!(g.characters().filter(|c| c.is_odd()).count(), 2);
        assert_eq!(CharacterGroup::new(8).characters().filter(|c| c.is_odd()).count(), 2);
    }

    #[test]
    fn generator_orders_multiply_to_phi() {
        for m in 1..=200u64 {
            let g = CharacterGroup::new(m);
            let prod: u64 = g.generators().iter().map(|&(_, o)| o).product();
            assert_eq!(prod, crate::arith::totient(m), "m={m}");
        }
    }

    #[test]
    fn characters_are_distinct() {
        for m in [7u64, 8, 15, 16, 24, 36] {
            let g = CharacterGroup::new(m);
            let tables: Vec<Vec<Option<u64>>> = g
                .characters()
                .map(|c| (0..m as i64).map(|n| c.value_exponent(n)).collect())
                .collect();
            for i in 0..tables.len() {
                for j in 0..i {
                    assert_ne!(tables[i], tables[j], "m={m}");
                }
            }
        }
    }

    #[test]
    fn multiplicative_and_periodic() {
        for m in [3u64, 8, 9, 12, 20, 21, 32] {
            let g = CharacterGroup::new(m);
            for chi in g.characters() {
                for a in 0..3 * m as i64 {
                    assert_eq!(chi.value_exponent(a), chi.value_exponent(a + m as i64));
                    for b in 0..3 * m as i64 {
                        let lhs = chi.eval(a * b);
                        let rhs = chi.eval(a) * chi.eval(b);
                        assert!((lhs - rhs).norm() < TOL, "m={m} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn principal_and_zero_values() {
        let g = CharacterGroup::new(15);
        let chi0 = g.principal();
        for n in [1i64, 2, 4, 7, 8, 11, 13, 14] {
            assert_eq!(chi0.eval(n), Complex64::new(1.0, 0.0));
        }
        for chi in g.characters() {
            assert_eq!(chi.eval(10), Complex64::new(0.0, 0.0));
            assert_eq!(chi.eval(0), Complex64::new(0.0, 0.0));
            assert_eq!(chi.parity() as f64, chi.eval(14).re);
        }
    }

    #[test]
    fn conductors() {
        let g12 = CharacterGroup::new(12);
        let (f, prim) = g12.principal().conductor_and_primitive();
        assert_eq!(f, 1);
        assert!(prim.is_principal());

        let chi3 = CharacterGroup::new(3).character(1);
        let induced = g12
            .characters()
            .find(|c| [1i64, 5, 7, 11].iter().all(|&n| (c.eval(n) - chi3.eval(n)).norm() < TOL))
            .unwrap();
        let (f, prim) = induced.conductor_and_primitive();
        assert_eq!(f, 3);
        assert_eq!(prim, chi3);

        for chi in CharacterGroup::new(5).characters().filter(|c| !c.is_principal()) {
            let (f, prim) = chi.conductor_and_primitive();
            assert_eq!(f, 5);
            assert_eq!(prim, chi);
        }
    }

    #[test]
    fn primitive_agrees_on_units() {
        for m in [8u64, 12, 16, 18, 24, 30, 45] {
            for chi in CharacterGroup::new(m).characters() {
                let (f, prim) = chi.conductor_and_primitive();
                assert_eq!(m % f, 0);
                assert!(prim.is_primitive() || f == 1);
                for n in (1..=m).filter(|&n| gcd(n, m) == 1) {
                    assert_eq!(chi.eval(n as i64), prim.eval(n as i64), "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn exactly_half_are_odd() {
        for m in 3..=60u64 {
            let g = CharacterGroup::new(m);
            let odd = g.characters().filter(|c| c.is_odd()).count();
            assert_eq!(2 * odd, g.len(), "m={m}");
        }
    }

    #[test]
    fn conj_matches_complex_conjugate() {
        for chi in CharacterGroup::new(13).characters() {
            let c = chi.conj();
            for n in 0..13 {
                assert!((c.eval(n) - chi.eval(n).conj()).norm() < TOL);
            }
        }
    }
}
