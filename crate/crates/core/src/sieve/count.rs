use serde::{Deserialize, Serialize};

use super::{check_budget, nth_prime_upper_bound, prime_count_upper_bound, PrimeStream, DEFAULT_MAX_LIMIT, DEFAULT_SEGMENT_ENTRIES};
use crate::arith::{is_prime, legendre, Modulus, ResiduePattern};
use crate::error::{invalid, Error, Result};

/// Which windows are counted.
///
/// Windows are drawn from the primes greater than `q`, so every member is
/// coprime to `q` and the first window starts at the least prime above `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    /// Windows whose least prime is `<= x`.
    ByX(u64),
    /// The first `n` counted windows.
    ByCount(u64),
}

#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub limit: Limit,
    pub modulus: Modulus,
    /// Number of primes in a pattern.
    pub r: usize,
    /// Index distance between pattern members; 1 means consecutive primes.
    pub skip: usize,
    /// Odd entries per segment, a positive multiple of 64.
    pub segment_entries: usize,
    pub threads: usize,
    pub max_limit: u64,
}

impl SieveConfig {
    pub fn new(modulus: Modulus, r: usize, limit: Limit) -> Self {
        SieveConfig {
            limit,
            modulus,
            r,
            skip: 1,
            segment_entries: DEFAULT_SEGMENT_ENTRIES,
            threads: 1,
            max_limit: DEFAULT_MAX_LIMIT,
        }
    }

    pub fn skip(mut self, skip: usize) -> Self {
        self.skip = skip;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn segment_entries(mut self, entries: usize) -> Self {
        self.segment_entries = entries;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return invalid("pattern length r must be at least 1");
        }
        if self.skip == 0 {
            return invalid("skip must be at least 1");
        }
        if self.segment_entries == 0 || self.segment_entries % 64 != 0 {
            return invalid(format!("segment size {} is not a positive multiple of 64", self.segment_entries));
        }
        let cells = (self.modulus.phi() as f64).powi(self.r as i32);
        if cells > (1u64 << 26) as f64 {
            return invalid(format!("phi(q)^r = {cells:.0} patterns is too many to tabulate"));
        }
        if let Limit::ByCount(0) | Limit::ByX(0..=1) = self.limit {
            return invalid("limit must admit at least one window");
        }
        Ok(())
    }

    /// Primes per window minus one.
    fn span(&self) -> usize {
        (self.r - 1) * self.skip
    }

    /// A sieve limit guaranteed to contain every prime the count touches.
    fn hard_limit(&self) -> u64 {
        // at most q primes are skipped before the first window
        let skipped = self.modulus.q();
        let span = self.span() as u64;
        let n = match self.limit {
            Limit::ByCount(n) => skipped + n + span + 1,
            Limit::ByX(x) => prime_count_upper_bound(x) + span + skipped + 1,
        };
        nth_prime_upper_bound(n).max(64)
    }
}

/// Observed pattern counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub q: u64,
    pub r: usize,
    pub skip: usize,
    pub limit: Limit,
    /// One entry per pattern, in [`ResiduePattern::all`] order.
    pub counts: Vec<(ResiduePattern, u64)>,
    /// Windows counted (the sum of `counts`).
    pub windows: u64,
    /// Primes pulled from the stream, including ones never counted.
    pub primes_seen: u64,
    /// Largest prime pulled from the stream.
    pub largest_prime: u64,
    /// Least prime of the last counted window.
    pub last_window_start: u64,
}

impl CountTable {
    pub fn get(&self, classes: &[u64]) -> Option<u64> {
        self.counts.iter().find(|(p, _)| p.classes() == classes).map(|&(_, c)| c)
    }
}

pub fn count_patterns(config: &SieveConfig) -> Result<CountTable> {
    count_patterns_with_progress(config, |_| {})
}

/// Like [`count_patterns`], reporting the current prime every `2^22` primes.
pub fn count_patterns_with_progress(config: &SieveConfig, mut progress: impl FnMut(u64)) -> Result<CountTable> {
    config.validate()?;
    let hard_limit = config.hard_limit();
    check_budget(hard_limit, config.max_limit)?;

    let modulus = &config.modulus;
    let q = modulus.q();
    let phi = modulus.phi() as usize;
    let r = config.r;
    let skip = config.skip;
    let width = config.span() + 1;

    let mut counts = vec![0u64; phi.pow(r as u32)];
    // ring of (prime, class index or NONE) for the last `width` primes
    const NONE: u32 = u32::MAX;
    let mut ring = vec![(0u64, NONE); width];
    let mut filled = 0usize;
    let mut head = 0usize; // slot of the oldest entry once full

    // residue bookkeeping by gap deltas
    let gap_mod: Vec<u64> = (0..4096u64).map(|g| g % q).collect();
    let mut prev = q;
    let mut residue = 0u64;

    let mut windows = 0u64;
    let mut primes_seen = 0u64;
    let mut largest = 0u64;
    let mut last_start = 0u64;
    let mut finished = false;

    for p in PrimeStream::new(hard_limit, config.segment_entries, config.threads) {
        primes_seen += 1;
        largest = p;
        if p <= q {
            continue;
        }
        let gap = p - prev;
        residue += if (gap as usize) < gap_mod.len() { gap_mod[gap as usize] } else { gap % q };
        if residue >= q {
            residue -= q;
        }
        prev = p;
        if primes_seen & ((1 << 22) - 1) == 0 {
            progress(p);
        }
        let class = modulus.class_index(residue).map_or(NONE, |i| i as u32);

        if filled < width {
            ring[(head + filled) % width] = (p, class);
            filled += 1;
            if filled < width {
                continue;
            }
        } else {
            ring[head] = (p, class);
            head = (head + 1) % width;
        }

        let start = ring[head].0;
        if let Limit::ByX(x) = config.limit {
            if start > x {
                finished = true;
                break;
            }
        }
        let mut index = 0usize;
        let mut coprime = true;
        for j in 0..r {
            let c = ring[(head + j * skip) % width].1;
            if c == NONE {
                coprime = false;
                break;
            }
            index = index * phi + c as usize;
        }
        if coprime {
            counts[index] += 1;
            windows += 1;
            last_start = start;
            if let Limit::ByCount(n) = config.limit {
                if windows == n {
                    finished = true;
                    break;
                }
            }
        }
    }
    if !finished {
        return Err(Error::Consistency(format!(
            "prime stream ended at {largest} (bound {hard_limit}) before all windows closed"
        )));
    }

    let counts = ResiduePattern::all(modulus, r).into_iter().zip(counts).collect();
    Ok(CountTable {
        q,
        r,
        skip,
        limit: config.limit,
        counts,
        windows,
        primes_seen,
        largest_prime: largest,
        last_window_start: last_start,
    })
}

/// `sum_{p_n <= x} (p_n / q)(p_{n+1} / q)` for an odd prime `q`, over the same
/// windows [`count_patterns`] counts.
pub fn character_sum(q: u64, x: u64, threads: usize) -> Result<i64> {
    if q < 3 || !is_prime(q) {
        return invalid(format!("character_sum needs an odd prime modulus, got {q}"));
    }
    let table = count_patterns(&SieveConfig::new(Modulus::new(q)?, 2, Limit::ByX(x)).threads(threads))?;
    Ok(character_sum_from_table(&table))
}

pub(crate) fn character_sum_from_table(table: &CountTable) -> i64 {
    table
        .counts
        .iter()
        .map(|(pat, c)| {
            let s: i32 = pat.classes().iter().map(|&a| legendre(a as i64, table.q)).product();
            s as i64 * *c as i64
        })
        .sum()
}
