//! Bit-packed odd-only segment kernel.
//!
//! Segment `i` covers the integers `[i * 2S, (i + 1) * 2S)` where `S` is the
//! number of odd entries per segment. Bit `j` of a segment stands for
//! `low + 2j + 1`. A set bit means prime after sieving.

/// Odd entries per 64-bit word.
pub const WORD_BITS: usize = 64;

/// Integers `3*5*7*11*13`; the pre-sieve pattern repeats with this period.
const PRESIEVE_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

/// Simple odd-only byte sieve returning every prime `<= limit` in order.
///
/// Used for base primes and for the moderate prime tables the Euler products
/// need; the streaming sieve handles anything larger.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = ((limit - 1) / 2) as usize; // odd numbers 3, 5, ..., <= limit
    let mut composite = vec![false; n + 1];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j <= n {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(approx_pi(limit));
    out.push(2);
    out.extend((1..=n).filter(|&k| !composite[k]).map(|k| 2 * k as u64 + 1));
    out
}

fn approx_pi(x: u64) -> usize {
    if x < 10 {
        return 4;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as usize
}

/// Sieving state shared by every segment: the base primes and a pre-sieved
/// pattern for the smallest odd primes.
#[derive(Debug)]
pub struct SegmentSieve {
    entries: usize,
    base: Vec<u64>,
    /// Pattern of `PRESIEVE_PRIMES` over odd entries, period `15015` entries,
    /// stored twice plus a word so any word-aligned window can be copied.
    pattern: Vec<u64>,
    pattern_period: usize,
}

impl SegmentSieve {
    /// `entries` odd numbers per segment (a multiple of 64), base primes up to
    /// `sqrt(hard_limit)`.
    pub fn new(entries: usize, hard_limit: u64) -> Self {
        assert!(entries > 0 && entries % WORD_BITS == 0);
        let root = (hard_limit as f64).sqrt() as u64 + 2;
        let base: Vec<u64> = primes_up_to(root).into_iter().skip(1).collect();
        let period: usize = PRESIEVE_PRIMES.iter().product::<u64>() as usize;
        // bit k of the pattern stands for odd number 2k + 1 (mod 2 * period)
        let bits = period * WORD_BITS;
        let mut pattern = vec![!0u64; bits / WORD_BITS];
        for &p in &PRESIEVE_PRIMES {
            let mut k = (p as usize - 1) / 2;
            while k < bits {
                pattern[k / WORD_BITS] &= !(1u64 << (k % WORD_BITS));
                k += p as usize;
            }
        }
        SegmentSieve { entries, base, pattern, pattern_period: period }
    }

    pub fn entries(&self) -> usize {
        self.entries
    }

    pub fn words(&self) -> usize {
        self.entries / WORD_BITS
    }

    pub fn span(&self) -> u64 {
        2 * self.entries as u64
    }

    /// Sieves segment `index` into `out` (resized to `words()`).
    pub fn sieve(&self, index: u64, out: &mut Vec<u64>) {
        let words = self.words();
        out.clear();
        out.resize(words, 0);
        let low = index * self.span();
        let high = low + self.span();

        // bit offset of this segment within the repeating pre-sieve pattern
        let first_bit = (low / 2) as usize % (self.pattern_period * WORD_BITS);
        for (w, slot) in out.iter_mut().enumerate() {
            let bit = (first_bit + w * WORD_BITS) % (self.pattern_period * WORD_BITS);
            let (wi, sh) = (bit / WORD_BITS, bit % WORD_BITS);
            *slot = if sh == 0 {
                self.pattern[wi]
            } else {
                let next = self.pattern[(wi + 1) % self.pattern.len()];
                (self.pattern[wi] >> sh) | (next << (WORD_BITS - sh))
            };
        }
        if index == 0 {
            // 1 is not prime; the pre-sieve primes themselves are
            out[0] &= !1;
            for &p in &PRESIEVE_PRIMES {
                let k = (p as usize - 1) / 2;
                out[k / WORD_BITS] |= 1 << (k % WORD_BITS);
            }
        }

        for &p in self.base.iter().skip(PRESIEVE_PRIMES.len()) {
            let sq = p * p;
            if sq >= high {
                break;
            }
            let mut start = if sq >= low { sq } else { low.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut k = ((start - low) / 2) as usize;
            let step = p as usize;
            let end = self.entries;
            while k < end {
                out[k / WORD_BITS] &= !(1u64 << (k % WORD_BITS));
                k += step;
            }
        }
    }

    /// Calls `f` with each prime of a sieved segment in increasing order.
    #[inline]
    pub fn for_each_prime(index: u64, span: u64, bits: &[u64], mut f: impl FnMut(u64)) {
        let low = index * span;
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            let base = low + 1 + 2 * (w * WORD_BITS) as u64;
            while word != 0 {
                let tz = word.trailing_zeros() as u64;
                f(base + 2 * tz);
                word &= word - 1;
            }
        }
    }
}
