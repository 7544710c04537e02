//! `L(0, chi)`, `L(1, chi)`, the Euler products `A_{q,chi}` and the constants
//! `C_{q,chi} = L(0, chi) L(1, chi) A_{q,chi}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::distinct_prime_factors;
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::error::{invalid, Result};
use crate::sieve::primes_up_to;

/// Default truncation point of every Euler product.
pub const DEFAULT_PRIME_BOUND: u64 = 20_000_000;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Primes up to a truncation bound, shared read-only between products.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    bound: u64,
    primes: Arc<Vec<u32>>,
}

impl PrimeTable {
    /// Every prime `<= bound`; tables are cached per bound.
    pub fn new(bound: u64) -> Result<Self> {
        if bound < 100 {
            return invalid(format!("Euler product bound must be at least 100, got {bound}"));
        }
        if bound > u32::MAX as u64 {
            return invalid(format!("Euler product bound {bound} exceeds 2^32"));
        }
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<u32>>>>> = OnceLock::new();
        let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
        let primes = cache
            .entry(bound)
            .or_insert_with(|| Arc::new(primes_up_to(bound).into_iter().map(|p| p as u32).collect()))
            .clone();
        Ok(PrimeTable { bound, primes })
    }

    pub fn default_table() -> Self {
        Self::new(DEFAULT_PRIME_BOUND).expect("default bound is valid")
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Bound on the relative error of a product truncated here:
    /// `sum_{p > P} 4/(p - 1)^2 <= 5/(P log P)`.
    pub fn tail_bound(&self) -> f64 {
        let p = self.bound as f64;
        5.0 / (p * p.ln())
    }
}

/// Digamma `psi(x)` for `x > 0`, by upward recurrence to `x >= 10` and the
/// asymptotic series there.
pub fn digamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs a positive argument");
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    // Bernoulli terms B_2k / (2k x^2k), k = 1..7
    let series = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r / 12.0))))));
    acc + x.ln() - 0.5 / x - series
}

fn non_principal(chi: &DirichletCharacter) -> Result<()> {
    if chi.is_principal() {
        return invalid(format!("the principal character mod {} has no finite L-value here", chi.modulus()));
    }
    Ok(())
}

/// `L(0, chi) = -(1/m) sum_{a=1}^{m} chi(a) a`; exactly zero for even `chi`.
pub fn l_at_zero(chi: &DirichletCharacter) -> Result<Complex64> {
    non_principal(chi)?;
    if !chi.is_odd() {
        return Ok(ZERO);
    }
    let m = chi.modulus() as i64;
    let s: Complex64 = (1..=m).map(|a| chi.eval(a) * a as f64).sum();
    Ok(-s / m as f64)
}

/// `L(1, chi) = -(1/m) sum_{a=1}^{m-1} chi(a) psi(a/m)`.
pub fn l_at_one(chi: &DirichletCharacter) -> Result<Complex64> {
    non_principal(chi)?;
    let m = chi.modulus() as i64;
    let s: Complex64 = (1..m).map(|a| chi.eval(a) * digamma(a as f64 / m as f64)).sum();
    Ok(-s / m as f64)
}

fn check_divides(m: u64, q: u64) -> Result<()> {
    if q == 0 || q % m != 0 {
        return invalid(format!("character modulus {m} does not divide {q}"));
    }
    Ok(())
}

/// `A_{q,chi} = prod_{p | q} (1 - chi(p)/p) prod_{p !| q, p <= P} (1 - (1 - chi(p))^2/(p - 1)^2)`
/// for `chi` modulo `m | q`, with the relative truncation bound.
pub fn a_q_chi(q: u64, chi: &DirichletCharacter, primes: &PrimeTable) -> Result<(Complex64, f64)> {
    let m = chi.modulus();
    check_divides(m, q)?;
    let table = chi.value_table();
    let value = |p: u64| table[(p % m) as usize];
    let mut product = ONE;
    for p in distinct_prime_factors(q) {
        product *= ONE - value(p) / p as f64;
    }
    // partial products in blocks keep rounding growth modest
    for block in primes.primes().chunks(4096) {
        let mut partial = ONE;
        for &p in block {
            let p = p as u64;
            if q % p == 0 {
                continue;
            }
            let one_minus = ONE - value(p);
            let pm1 = (p - 1) as f64;
            partial *= ONE - one_minus * one_minus / (pm1 * pm1);
        }
        product *= partial;
    }
    Ok((product, primes.tail_bound()))
}

/// `C_{q,chi}` computed directly as `L(0) L(1) A`.
pub fn c_q_chi(q: u64, chi: &DirichletCharacter, primes: &PrimeTable) -> Result<Complex64> {
    non_principal(chi)?;
    check_divides(chi.modulus(), q)?;
    if !chi.is_odd() {
        return Ok(ZERO);
    }
    let (a, _) = a_q_chi(q, chi, primes)?;
    Ok(l_at_zero(chi)? * l_at_one(chi)? * a)
}

/// `C_{q,chi}` through the inducing primitive character, and for even `q`
/// with a character of odd conductor through the odd part of `q`.
pub fn reduce_c(q: u64, chi: &DirichletCharacter, primes: &PrimeTable) -> Result<Complex64> {
    non_principal(chi)?;
    let m = chi.modulus();
    check_divides(m, q)?;
    if !chi.is_odd() {
        return Ok(ZERO);
    }
    let (f, prim) = chi.conductor_and_primitive();
    let base = if q % 2 == 0 && f % 2 == 1 {
        let mut q0 = q;
        while q0 % 2 == 0 {
            q0 /= 2;
        }
        prim.eval(2).conj() / 2.0 * c_q_chi(q0, &prim, primes)?
    } else {
        c_q_chi(q, &prim, primes)?
    };
    let correction: Complex64 = distinct_prime_factors(m)
        .into_iter()
        .filter(|&p| f % p != 0)
        .map(|p| ONE - prim.eval(p as i64))
        .product();
    Ok(base * correction)
}

/// One character's L-data.
#[derive(Debug, Clone, Serialize)]
pub struct CEntry {
    #[serde(skip)]
    pub character: DirichletCharacter,
    /// Mixed-radix label on the group generators.
    pub label: Vec<u64>,
    pub conductor: u64,
    pub parity: i32,
    pub l0: Complex64Parts,
    pub l1: Complex64Parts,
    pub a: Complex64Parts,
    pub c: Complex64Parts,
}

/// A complex number as a serializable pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex64Parts {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Parts {
    fn from(z: Complex64) -> Self {
        Complex64Parts { re: z.re, im: z.im }
    }
}

impl From<Complex64Parts> for Complex64 {
    fn from(z: Complex64Parts) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// `L(0)`, `L(1)`, `A_{q,chi}` and `C_{q,chi}` for every non-principal
/// character modulo `m | q`.
#[derive(Debug, Clone, Serialize)]
pub struct CTable {
    pub q: u64,
    pub m: u64,
    pub prime_bound: u64,
    pub tail_bound: f64,
    pub entries: Vec<CEntry>,
}

impl CTable {
    pub fn build(q: u64, m: u64, primes: &PrimeTable) -> Result<Self> {
        if m < 1 {
            return invalid("character modulus must be positive");
        }
        check_divides(m, q)?;
        let group = CharacterGroup::new(m);
        let mut entries = Vec::new();
        for chi in group.characters().filter(|c| !c.is_principal()) {
            let l0 = l_at_zero(&chi)?;
            let l1 = l_at_one(&chi)?;
            let (a, _) = a_q_chi(q, &chi, primes)?;
            let c = if chi.is_odd() { l0 * l1 * a } else { ZERO };
            entries.push(CEntry {
                label: chi.label().to_vec(),
                conductor: chi.conductor(),
                parity: chi.parity(),
                character: chi,
                l0: l0.into(),
                l1: l1.into(),
                a: a.into(),
                c: c.into(),
            });
        }
        Ok(CTable { q, m, prime_bound: primes.bound(), tail_bound: primes.tail_bound(), entries })
    }
}
