//! Two-point singular series away from `q` and brute-force evaluation of the
//! weighted sums `S_0^k(q, v; H)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{distinct_prime_factors, Modulus};
use crate::error::{invalid, Result};
use crate::lfun::PrimeTable;
use crate::sieve::primes_up_to;

/// Terms per block of the brute-force sums; blocks are reduced in order.
const CHUNK: usize = 1 << 14;

/// Cutoff multiplier: brute sums run to `h <= CUTOFF_FACTOR * H * (k + 1)`.
pub const CUTOFF_FACTOR: f64 = 50.0;

/// Everything needed to evaluate `S_q({0, h})` for one modulus.
#[derive(Debug, Clone)]
pub struct SingularContext {
    modulus: Modulus,
    /// `prod_{p !| q, p > 2, p <= P} (1 - 1/(p - 1)^2)`.
    twin_tail: f64,
    prime_bound: u64,
    tail_bound: f64,
}

impl SingularContext {
    pub fn new(modulus: &Modulus, primes: &PrimeTable) -> Self {
        let q = modulus.q();
        let twin_tail = primes
            .primes()
            .iter()
            .map(|&p| p as u64)
            .filter(|&p| p > 2 && q % p != 0)
            .map(|p| {
                let pm1 = (p - 1) as f64;
                1.0 - 1.0 / (pm1 * pm1)
            })
            .product();
        let p = primes.bound() as f64;
        SingularContext {
            modulus: modulus.clone(),
            twin_tail,
            prime_bound: primes.bound(),
            // sum_{p > P} 1/(p - 1)^2 < 1.25/(P log P)
            tail_bound: 1.25 / (p * p.ln()),
        }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn twin_tail(&self) -> f64 {
        self.twin_tail
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    /// Relative truncation error bound of [`Self::twin_tail`].
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `S_q({0, h})` at `h = 0` factors: 2 when `q` is odd, else 1.
    fn base(&self) -> f64 {
        if self.modulus.q() % 2 == 1 {
            2.0 * self.twin_tail
        } else {
            self.twin_tail
        }
    }

    /// `S_q({0, h})`.
    pub fn singular_pair(&self, h: u64) -> Result<f64> {
        if h == 0 {
            return invalid("{0, 0} is not a two-element set");
        }
        let q = self.modulus.q();
        if q % 2 == 1 && h % 2 == 1 {
            return Ok(0.0);
        }
        let correction: f64 = distinct_prime_factors(h)
            .into_iter()
            .filter(|&p| p > 2 && q % p != 0)
            .map(|p| (p - 1) as f64 / (p - 2) as f64)
            .product();
        Ok(self.base() * correction)
    }

    /// `S_{q,0}({0, h}) = S_q({0, h}) - 1`.
    pub fn singular_pair_0(&self, h: u64) -> Result<f64> {
        Ok(self.singular_pair(h)? - 1.0)
    }

    /// `S_q({0, h})` for every `h` in `0..=limit` (entry 0 is unused), by
    /// sieving the local corrections.
    pub fn singular_table(&self, limit: u64) -> Vec<f64> {
        let q = self.modulus.q();
        let n = limit as usize;
        let mut table = vec![self.base(); n + 1];
        for p in primes_up_to(limit) {
            if p == 2 || q % p == 0 {
                continue;
            }
            let factor = (p - 1) as f64 / (p - 2) as f64;
            for v in table.iter_mut().step_by(p as usize) {
                *v *= factor;
            }
        }
        if q % 2 == 1 {
            for v in table.iter_mut().skip(1).step_by(2) {
                *v = 0.0;
            }
        }
        table[0] = f64::NAN;
        table
    }

    /// `S_0^k(q, v; H) = sum_{h = v (q), 1 <= h <= N} h^k S_{q,0}({0, h}) e^{-h/H}`
    /// with `N = ceil(50 H (k + 1))`.
    pub fn s0_brute(&self, v: i64, h_scale: f64, k: u32) -> Result<S0Sum> {
        if !(h_scale >= 10.0) || !h_scale.is_finite() {
            return invalid(format!("H must be a finite value >= 10, got {h_scale}"));
        }
        let cutoff = (CUTOFF_FACTOR * h_scale * (k as f64 + 1.0)).ceil() as u64;
        let table = self.singular_table(cutoff);
        let value = weighted_sum(&self.modulus, &table, v, h_scale, k, cutoff);
        // beyond the cutoff |S_{q,0}| < log h and the weights decay geometrically
        let nf = cutoff as f64;
        let tail = nf.powi(k as i32) * nf.ln() * (-nf / h_scale).exp() * (h_scale + 1.0);
        Ok(S0Sum {
            q: self.modulus.q(),
            v: self.modulus.canonical(v) % self.modulus.q(),
            h_scale,
            k,
            value,
            method: S0Method::Brute,
            cutoff: Some(cutoff),
            tail_estimate: tail,
        })
    }
}

/// `sum_{h = v (q), 1 <= h <= cutoff} h^k (table[h] - 1) e^{-h/H}` in fixed
/// blocks; the block sums are added in index order for reproducibility.
pub(crate) fn weighted_sum(modulus: &Modulus, table: &[f64], v: i64, h_scale: f64, k: u32, cutoff: u64) -> f64 {
    let q = modulus.q();
    let first = modulus.canonical(v);
    let hs: Vec<u64> = (first..=cutoff).step_by(q as usize).collect();
    let partial: Vec<f64> = hs
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&h| {
                    let hf = h as f64;
                    hf.powi(k as i32) * (table[h as usize] - 1.0) * (-hf / h_scale).exp()
                })
                .sum::<f64>()
        })
        .collect();
    partial.into_iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum S0Method {
    Brute,
    Analytic,
}

/// A value of `S_0^k(q, v; H)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S0Sum {
    pub q: u64,
    /// Residue in `0..q`.
    pub v: u64,
    #[serde(rename = "H")]
    pub h_scale: f64,
    pub k: u32,
    pub value: f64,
    pub method: S0Method,
    /// Largest `h` summed (brute force only).
    pub cutoff: Option<u64>,
    /// Rough size of what was left out: the neglected tail for brute force,
    /// zero for the analytic main terms (which omit the oscillating part).
    pub tail_estimate: f64,
}
