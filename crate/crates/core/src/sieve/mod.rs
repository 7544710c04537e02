//! Ordered prime enumeration and exact counts of residue patterns among
//! consecutive primes.

mod count;
mod pipeline;
mod segment;

pub use count::{character_sum, count_patterns, count_patterns_with_progress, CountTable, Limit, SieveConfig};
pub use pipeline::PrimeStream;
pub use segment::{primes_up_to, SegmentSieve};

use crate::error::{Error, Result};

/// Default odd entries per segment (`2^22` bits, 512 KiB).
pub const DEFAULT_SEGMENT_ENTRIES: usize = 1 << 22;

/// Default ceiling on how far a single request may sieve.
pub const DEFAULT_MAX_LIMIT: u64 = 10_000_000_000_000;

/// Upper bound for the `n`-th prime (`p_n < n (ln n + ln ln n)` for `n >= 6`).
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    if n < 6 {
        return 13;
    }
    let nf = n as f64;
    (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 1
}

/// Upper bound for `pi(x)` (`pi(x) < 1.25506 x / ln x` for `x > 1`).
pub fn prime_count_upper_bound(x: u64) -> u64 {
    if x < 17 {
        return 7;
    }
    let xf = x as f64;
    (1.25506 * xf / xf.ln()).ceil() as u64 + 1
}

/// Every prime `<= limit` in increasing order, sieved single-threaded.
pub fn stream_primes(limit: u64) -> Result<PrimeStream> {
    stream_primes_with(limit, DEFAULT_SEGMENT_ENTRIES, 1, DEFAULT_MAX_LIMIT)
}

pub fn stream_primes_with(limit: u64, segment_entries: usize, threads: usize, max_limit: u64) -> Result<PrimeStream> {
    if limit < 2 {
        return Err(Error::InvalidArgument(format!("prime stream limit must be >= 2, got {limit}")));
    }
    check_budget(limit, max_limit)?;
    Ok(PrimeStream::new(limit, segment_entries, threads))
}

pub(crate) fn check_budget(limit: u64, max_limit: u64) -> Result<()> {
    if limit > max_limit {
        let base_primes = (limit as f64).sqrt();
        return Err(Error::Budget(format!(
            "sieving to {limit} needs base primes up to {base_primes:.0} and about {:.1e} bit operations; \
             the configured ceiling is {max_limit} (raise --max-limit to allow it)",
            limit as f64 * (limit as f64).ln().ln() / 2.0
        )));
    }
    Ok(())
}
