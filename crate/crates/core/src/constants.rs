//! The constants `S_0^c(q, v)` and the bias coefficients `c_1`, `c_2`.
//!
//! Every closed form for `c_2(q; (a, b))` that applies to a pair is evaluated
//! and the forms are required to agree; a disagreement is reported as an
//! [`Error::Consistency`], never silently resolved.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{divisors, gcd, is_prime, mobius, sawtooth_b, totient, von_mangoldt, epsilon_q, Modulus, ResiduePattern};
use crate::characters::{CharacterGroup, DirichletCharacter};
use crate::error::{invalid, Error, Result};
use crate::lfun::{c_q_chi, PrimeTable};
use crate::singular::{S0Method, S0Sum};

/// Largest allowed disagreement between two closed forms of `c_2`.
pub const FORM_TOLERANCE: f64 = 1e-8;

/// Which closed form produced a `c_2` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum C2Method {
    /// `c_2/q` as the bookkeeping sum over `S_0^c` values.
    #[serde(rename = "eq2.20")]
    Eq220,
    /// The character-sum form over divisors `d | q`.
    #[serde(rename = "eq2.21")]
    Eq221,
    /// The reduced form over divisors of the odd part of `q`.
    #[serde(rename = "c2_final")]
    Final,
    /// The closed form for `a = b`.
    #[serde(rename = "diagonal")]
    Diagonal,
    /// The form for prime `q` and `a != b`.
    #[serde(rename = "prime_q")]
    PrimeQ,
    /// Sum of pair constants plus the repetition terms, for `r >= 3`.
    #[serde(rename = "assembly")]
    Assembly,
}

impl std::fmt::Display for C2Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            C2Method::Eq220 => "eq2.20",
            C2Method::Eq221 => "eq2.21",
            C2Method::Final => "c2_final",
            C2Method::Diagonal => "diagonal",
            C2Method::PrimeQ => "prime_q",
            C2Method::Assembly => "assembly",
        };
        f.write_str(s)
    }
}

/// `c_1`, `c_2` and the `S_0^c` values they were built from.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureConstants {
    pub pattern: ResiduePattern,
    pub c1: f64,
    pub c2: f64,
    pub c2_method: C2Method,
    /// `S_0^c(q, v)` keyed by `v` in `0..q`.
    pub intermediates: BTreeMap<u64, f64>,
}

type CharValues = Vec<(DirichletCharacter, Complex64)>;

/// Immutable per-modulus table of `C_{q',chi}` values and `S_0^c(q, v)`.
#[derive(Debug)]
pub struct ModulusConstants {
    modulus: Modulus,
    prime_bound: u64,
    tail_bound: f64,
    /// Odd part of `q`.
    q0: u64,
    /// `(q', m)` to `C_{q',chi}` for every non-principal `chi mod m`.
    c_values: HashMap<(u64, u64), CharValues>,
    /// `S_0^c(q, v)` at index `v mod q`.
    s0c: Vec<f64>,
    /// `(1/phi^2) sum_{v1, v2 reduced} S_0^c(q, v2 - v1)`.
    s0c_double: f64,
}

impl ModulusConstants {
    /// Constants for `q` with Euler products truncated at `prime_bound`;
    /// built once per `(q, prime_bound)` and shared afterwards.
    pub fn get(q: u64, prime_bound: u64) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<ModulusConstants>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().unwrap().get(&(q, prime_bound)) {
            return Ok(hit.clone());
        }
        let built = Arc::new(Self::build(&Modulus::new(q)?, &PrimeTable::new(prime_bound)?)?);
        Ok(cache.lock().unwrap().entry((q, prime_bound)).or_insert(built).clone())
    }

    pub fn build(modulus: &Modulus, primes: &PrimeTable) -> Result<Self> {
        let q = modulus.q();
        let mut q0 = q;
        while q0 % 2 == 0 {
            q0 /= 2;
        }
        let mut c_values = HashMap::new();
        let keys = divisors(q).into_iter().map(|m| (q, m)).chain(divisors(q0).into_iter().map(|d| (q0, d)));
        for (qq, m) in keys {
            if c_values.contains_key(&(qq, m)) {
                continue;
            }
            let group = CharacterGroup::new(m);
            let mut row = Vec::new();
            for chi in group.characters().filter(|c| !c.is_principal()) {
                let c = c_q_chi(qq, &chi, primes)?;
                row.push((chi, c));
            }
            c_values.insert((qq, m), row);
        }
        let mut this = ModulusConstants {
            modulus: modulus.clone(),
            prime_bound: primes.bound(),
            tail_bound: primes.tail_bound(),
            q0,
            c_values,
            s0c: Vec::new(),
            s0c_double: 0.0,
        };
        this.s0c = (0..q as i64).map(|v| this.compute_s0c(v)).collect::<Result<_>>()?;
        let phi = modulus.phi() as f64;
        let reduced = modulus.reduced_classes();
        let mut double = 0.0;
        for &v1 in reduced {
            for &v2 in reduced {
                double += this.s0c(v2 as i64 - v1 as i64);
            }
        }
        this.s0c_double = double / (phi * phi);
        Ok(this)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    /// Relative truncation bound of every `A_{q,chi}` used.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `C_{q',chi}` for the non-principal characters modulo `m`, where
    /// `q'` is `q` or its odd part.
    pub fn c_values(&self, qq: u64, m: u64) -> Option<&[(DirichletCharacter, Complex64)]> {
        self.c_values.get(&(qq, m)).map(|v| v.as_slice())
    }

    fn table(&self, qq: u64, m: u64) -> &[(DirichletCharacter, Complex64)] {
        self.c_values(qq, m).expect("every divisor table is built up front")
    }

    fn compute_s0c(&self, v: i64) -> Result<f64> {
        let q = self.modulus.q();
        let phi = self.modulus.phi() as f64;
        let qf = q as f64;
        let v = v.rem_euclid(q as i64) as u64;
        if v == 0 {
            let local: f64 = self.modulus.prime_factors().map(|p| (p as f64).ln() / (p - 1) as f64).sum();
            return Ok(phi / (2.0 * qf) * (qf / (2.0 * PI)).ln() - phi / (2.0 * qf) * local + 0.5);
        }
        let d = gcd(v, q);
        let m = q / d;
        let phi_m = totient(m) as f64;
        let chars: Complex64 = self.table(q, m).iter().map(|(chi, c)| chi.eval((v / d) as i64).conj() * c).sum();
        if chars.im.abs() > 1e-9 {
            return Err(Error::Consistency(format!("S_0^c({q},{v}) has imaginary part {:e}", chars.im)));
        }
        Ok(-phi / (2.0 * qf) * von_mangoldt(m) / phi_m - sawtooth_b(&self.modulus, v as i64) + chars.re / phi_m)
    }

    /// `S_0^c(q, v)`.
    pub fn s0c(&self, v: i64) -> f64 {
        self.s0c[v.rem_euclid(self.modulus.q() as i64) as usize]
    }

    /// The main terms of `S_0(q, v; H)`: `S_0^c(q, v)`, plus `-(phi/2q) log H`
    /// when `v = 0 (mod q)`.
    pub fn s0_main(&self, v: i64, h_scale: f64) -> f64 {
        let q = self.modulus.q() as i64;
        let base = self.s0c(v);
        if v.rem_euclid(q) == 0 {
            base - self.modulus.phi() as f64 / (2.0 * q as f64) * h_scale.ln()
        } else {
            base
        }
    }

    /// Main terms of `S_0^k(q, v; H)`: [`Self::s0_main`] for `k = 0`;
    /// `-(phi/2q) Gamma(k) H^k` at `v = 0` and zero otherwise for `k >= 1`.
    pub fn s0_analytic(&self, v: i64, h_scale: f64, k: u32) -> Result<S0Sum> {
        if !(h_scale > 0.0) || !h_scale.is_finite() {
            return invalid(format!("H must be positive and finite, got {h_scale}"));
        }
        let q = self.modulus.q();
        let residue = v.rem_euclid(q as i64) as u64;
        let value = if k == 0 {
            self.s0_main(v, h_scale)
        } else if residue == 0 {
            let gamma_k: f64 = (1..k).map(|j| j as f64).product();
            -(self.modulus.phi() as f64) / (2.0 * q as f64) * gamma_k * h_scale.powi(k as i32)
        } else {
            0.0
        };
        Ok(S0Sum { q, v: residue, h_scale, k, value, method: S0Method::Analytic, cutoff: None, tail_estimate: 0.0 })
    }

    fn check_pair(&self, a: i64, b: i64) -> Result<(u64, u64)> {
        let m = &self.modulus;
        if !m.is_reduced(a) || !m.is_reduced(b) {
            return invalid(format!("({a}, {b}) are not both reduced mod {}", m.q()));
        }
        Ok((m.canonical(a), m.canonical(b)))
    }

    fn c2_eq220(&self, a: u64, b: u64) -> Result<f64> {
        let m = &self.modulus;
        let q = m.q();
        let phi = m.phi() as f64;
        let v = b as i64 - a as i64;
        let eps = epsilon_q(m, a as i64, b as i64)?;
        let mut after_a = 0.0;
        let mut before_b = 0.0;
        for w in 0..q {
            if gcd(w + a, q) == 1 {
                after_a += self.s0c(w as i64);
            }
            if gcd((w + q - b % q) % q, q) == 1 {
                before_b += self.s0c(w as i64);
            }
        }
        let inner = -eps / phi + self.s0c(v) + sawtooth_b(m, v) - 1.0 / (2.0 * phi) - after_a / phi - before_b / phi
            + self.s0c_double;
        Ok(q as f64 * inner)
    }

    fn c2_eq221(&self, a: u64, b: u64) -> f64 {
        let m = &self.modulus;
        let q = m.q();
        let phi = m.phi() as f64;
        let v = b as i64 - a as i64;
        let mut total = Complex64::new(0.0, 0.0);
        for d in divisors(q).into_iter().filter(|&d| d > 1) {
            let step = q / d;
            let mut sum_d = Complex64::new(0.0, 0.0);
            for (chi, c) in self.table(q, d).iter().filter(|(chi, _)| chi.is_odd()) {
                let mut inner = Complex64::new(0.0, 0.0);
                for u in 0..d {
                    let n = u * step;
                    if gcd(n + a, q) == 1 {
                        inner += chi.eval(u as i64).conj();
                    }
                    if gcd((n + q - b % q) % q, q) == 1 {
                        inner += chi.eval(u as i64).conj();
                    }
                }
                sum_d += c * inner;
            }
            total += sum_d / totient(d) as f64;
        }
        let qf = q as f64;
        qf * ((2.0 * PI).ln() / (2.0 * qf) + self.s0c(v) + sawtooth_b(m, v) - total.re / phi)
    }

    fn c2_final(&self, a: u64, b: u64) -> f64 {
        let m = &self.modulus;
        let qf = m.q() as f64;
        let v = b as i64 - a as i64;
        let q0 = self.q0;
        let mut total = Complex64::new(0.0, 0.0);
        if q0 > 1 {
            for d in divisors(q0) {
                let mu = mobius(d);
                if mu == 0 {
                    continue;
                }
                let s: Complex64 = self
                    .table(q0, d)
                    .iter()
                    .map(|(chi, c)| c * (chi.eval(b as i64).conj() - chi.eval(a as i64).conj()))
                    .sum();
                total += s * (mu as f64 / totient(d) as f64);
            }
            total *= q0 as f64 / totient(q0) as f64;
        }
        (2.0 * PI).ln() / 2.0 + qf * self.s0c(v) + qf * sawtooth_b(m, v) - total.re
    }

    fn c2_diagonal(&self) -> f64 {
        let m = &self.modulus;
        let phi = m.phi() as f64;
        let qf = m.q() as f64;
        let local: f64 = m.prime_factors().map(|p| (p as f64).ln() / (p - 1) as f64).sum();
        (phi * (qf / (2.0 * PI)).ln() + (2.0 * PI).ln()) / 2.0 - phi / 2.0 * local
    }

    fn c2_prime(&self, a: u64, b: u64) -> f64 {
        let m = &self.modulus;
        let q = m.q();
        let phi = m.phi() as f64;
        let s: Complex64 = self
            .table(q, q)
            .iter()
            .map(|(chi, c)| {
                let diff = chi.eval(b as i64 - a as i64).conj();
                let ends = chi.eval(b as i64).conj() - chi.eval(a as i64).conj();
                c * (diff + ends / phi)
            })
            .sum();
        0.5 * (2.0 * PI / q as f64).ln() + q as f64 / phi * s.re
    }

    /// Every closed form of `c_2(q; (a, b))` that applies to the pair.
    pub fn c2_forms(&self, a: i64, b: i64) -> Result<Vec<(C2Method, f64)>> {
        let (a, b) = self.check_pair(a, b)?;
        let mut forms = vec![
            (C2Method::Final, self.c2_final(a, b)),
            (C2Method::Eq220, self.c2_eq220(a, b)?),
            (C2Method::Eq221, self.c2_eq221(a, b)),
        ];
        if a == b {
            forms.push((C2Method::Diagonal, self.c2_diagonal()));
        } else if is_prime(self.modulus.q()) {
            forms.push((C2Method::PrimeQ, self.c2_prime(a, b)));
        }
        Ok(forms)
    }

    /// `c_2(q; (a, b))` by the reduced form, after checking it against every
    /// other applicable form.
    pub fn c2_pair(&self, a: i64, b: i64) -> Result<f64> {
        let forms = self.c2_forms(a, b)?;
        let (_, reference) = forms[0];
        for &(method, value) in &forms[1..] {
            if (value - reference).abs() > FORM_TOLERANCE || !value.is_finite() {
                return Err(Error::Consistency(format!(
                    "c2({}; ({a},{b})): {} gives {value:.12} but c2_final gives {reference:.12}",
                    self.modulus.q(),
                    method
                )));
            }
        }
        Ok(reference)
    }

    /// `c_2(q; (a, b)) + c_2(q; (b, a)) = log 2 pi - phi(q) Lambda(m)/phi(m)`,
    /// `m = q/(q, b - a)`, checked against the two pair constants.
    pub fn c2_symmetric_sum(&self, a: i64, b: i64) -> Result<f64> {
        let (ca, cb) = self.check_pair(a, b)?;
        if ca == cb {
            return invalid("the symmetric sum needs distinct classes");
        }
        let q = self.modulus.q();
        let diff = (cb + q - ca) % q;
        let m = q / gcd(diff, q);
        let closed = (2.0 * PI).ln() - self.modulus.phi() as f64 * von_mangoldt(m) / totient(m) as f64;
        let pair_sum = self.c2_pair(a, b)? + self.c2_pair(b, a)?;
        if (closed - pair_sum).abs() > FORM_TOLERANCE {
            return Err(Error::Consistency(format!(
                "symmetric sum for ({a},{b}) mod {q}: closed form {closed:.12} vs pair sum {pair_sum:.12}"
            )));
        }
        Ok(closed)
    }

    /// `c_2(q; a)` for `r >= 3` from the pair constants.
    pub fn c2_general(&self, pattern: &ResiduePattern) -> Result<f64> {
        self.check_pattern(pattern)?;
        let r = pattern.len();
        if r < 3 {
            return invalid(format!("c2_general needs r >= 3, got {r}"));
        }
        let a = pattern.classes();
        let phi = self.modulus.phi() as f64;
        let mut total = 0.0;
        for w in a.windows(2) {
            total += self.c2_pair(w[0] as i64, w[1] as i64)?;
        }
        for j in 1..=r - 2 {
            let repeats = (0..r - j - 1).filter(|&i| a[i] == a[i + j + 1]).count() as f64;
            total += phi / 2.0 / j as f64 * ((r - 1 - j) as f64 / phi - repeats);
        }
        Ok(total)
    }

    /// `c_2` for any pattern with `r >= 2`, and the form used.
    pub fn c2(&self, pattern: &ResiduePattern) -> Result<(f64, C2Method)> {
        self.check_pattern(pattern)?;
        match pattern.len() {
            0 | 1 => invalid("c2 needs r >= 2"),
            2 => Ok((self.c2_pair(pattern.classes()[0] as i64, pattern.classes()[1] as i64)?, C2Method::Final)),
            _ => Ok((self.c2_general(pattern)?, C2Method::Assembly)),
        }
    }

    pub fn conjecture_constants(&self, pattern: &ResiduePattern) -> Result<ConjectureConstants> {
        let (c2, c2_method) = self.c2(pattern)?;
        let intermediates = (0..self.modulus.q()).map(|v| (v, self.s0c(v as i64))).collect();
        Ok(ConjectureConstants { pattern: pattern.clone(), c1: c1(&self.modulus, pattern)?, c2, c2_method, intermediates })
    }

    fn check_pattern(&self, pattern: &ResiduePattern) -> Result<()> {
        if pattern.q() != self.modulus.q() {
            return invalid(format!("pattern is mod {}, constants are mod {}", pattern.q(), self.modulus.q()));
        }
        Ok(())
    }
}

/// `c_1(q; a) = (phi/2) ((r - 1)/phi - #{i : a_i = a_{i+1}})`.
pub fn c1(modulus: &Modulus, pattern: &ResiduePattern) -> Result<f64> {
    let r = pattern.len();
    if r < 2 {
        return invalid("c1 needs r >= 2");
    }
    if pattern.q() != modulus.q() {
        return invalid("pattern and modulus differ");
    }
    let phi = modulus.phi() as f64;
    let repeats = pattern.classes().windows(2).filter(|w| w[0] == w[1]).count() as f64;
    Ok(phi / 2.0 * ((r - 1) as f64 / phi - repeats))
}

/// Coefficients `(c_1, c_2)` for the pair `(p_n, p_{n+k})`, `k >= 2`:
/// `c_1 = 0` and `c_2 = 1/(2(k-1))` off the diagonal, `-(phi-1)/(2(k-1))` on it.
pub fn skip_coefficient(modulus: &Modulus, a: i64, b: i64, k: u32) -> Result<(f64, f64)> {
    if k < 2 {
        return invalid(format!("skip k must be at least 2, got {k}"));
    }
    if !modulus.is_reduced(a) || !modulus.is_reduced(b) {
        return invalid(format!("({a}, {b}) are not both reduced mod {}", modulus.q()));
    }
    let scale = 2.0 * (k - 1) as f64;
    if modulus.canonical(a) == modulus.canonical(b) {
        Ok((0.0, -((modulus.phi() - 1) as f64) / scale))
    } else {
        Ok((0.0, 1.0 / scale))
    }
}
