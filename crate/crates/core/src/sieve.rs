//! Segmented sieve of Eratosthenes with constant-time prime counting.
//!
//! Only odd integers are stored: bit `b` of the flag array stands for
//! `2b + 1`, so the table costs one bit per two integers. On top of the
//! flags we keep a running prime count at the start of every block of
//! [`BLOCK_WORDS`] words (1024 integers), which costs another 8 bytes per
//! block. In total a table over `[2, X]` needs about `X / 16 + X / 128`
//! bytes, i.e. roughly 0.07 bytes per integer (70 MB at `X = 10^9`).
//!
//! `π(x)` is answered with one block lookup plus a popcount over at most
//! eight words.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Integers covered by one sieve segment unless configured otherwise.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 19;

/// Words (of 64 odd numbers each) per prime-count block.
pub const BLOCK_WORDS: usize = 8;

/// Integers covered by a single flag word.
const WORD_SPAN: u64 = 128;

const CACHE_MAGIC: &[u8; 8] = b"RPSIEVE\0";
const CACHE_VERSION: u32 = 1;

/// Primality flags and block prime counts over `[2, limit]`.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    segment_size: u64,
    words: Vec<u64>,
    /// Odd primes strictly before each block, plus a final total.
    block_prefix: Vec<u64>,
}

impl std::fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeTable")
            .field("limit", &self.limit)
            .field("segment_size", &self.segment_size)
            .field("prime_count", &self.total())
            .finish()
    }
}

/// Builds a table with the default segment size.
pub fn build_prime_table(limit: u64) -> Result<PrimeTable> {
    PrimeTable::build(limit, DEFAULT_SEGMENT_SIZE)
}

impl PrimeTable {
    /// Sieves `[2, limit]` in segments of `segment_size` integers.
    ///
    /// `segment_size` must be a positive multiple of 128 so that segments
    /// start on word boundaries; the result does not depend on it.
    pub fn build(limit: u64, segment_size: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        if segment_size == 0 || segment_size % WORD_SPAN != 0 {
            return Err(Error::InvalidArgument(format!(
                "segment size must be a positive multiple of {WORD_SPAN}, got {segment_size}"
            )));
        }
        let bits = odd_bits(limit);
        let n_words = usize::try_from(bits.div_ceil(64))
            .map_err(|_| Error::ResourceLimit(format!("limit {limit} too large")))?;
        let mut words = Vec::new();
        words.try_reserve_exact(n_words).map_err(|_| {
            Error::ResourceLimit(format!("cannot allocate flags for limit {limit}"))
        })?;
        words.resize(n_words, u64::MAX);

        let base = base_odd_primes(isqrt(limit));
        let words_per_segment = (segment_size / WORD_SPAN) as usize;
        words
            .par_chunks_mut(words_per_segment)
            .enumerate()
            .for_each(|(seg, chunk)| {
                let first_bit = (seg * words_per_segment) as u64 * 64;
                sieve_segment(chunk, first_bit, &base);
            });

        // 1 is not prime; bits past the limit are cleared.
        words[0] &= !1;
        let tail = bits % 64;
        if tail != 0 {
            words[n_words - 1] &= (1u64 << tail) - 1;
        }

        let block_prefix = prefix_counts(&words);
        Ok(PrimeTable {
            limit,
            segment_size,
            words,
            block_prefix,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    /// Number of primes in the table.
    pub fn total(&self) -> u64 {
        1 + self.block_prefix.last().copied().unwrap_or(0)
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.words.len() * 8 + self.block_prefix.len() * 8
    }

    /// Primality of `n`; `n` above the limit is an error.
    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check_range("n", n)?;
        Ok(self.is_prime_unchecked(n))
    }

    #[inline]
    pub(crate) fn is_prime_unchecked(&self, n: u64) -> bool {
        if n < 3 {
            return n == 2;
        }
        if n % 2 == 0 {
            return false;
        }
        let b = n / 2;
        self.words[(b / 64) as usize] >> (b % 64) & 1 == 1
    }

    /// π(x), the number of primes `<= x`.
    pub fn prime_count(&self, x: u64) -> Result<u64> {
        self.check_range("x", x)?;
        Ok(self.prime_count_unchecked(x))
    }

    #[inline]
    pub(crate) fn prime_count_unchecked(&self, x: u64) -> u64 {
        if x < 2 {
            return 0;
        }
        // Odd numbers <= x occupy bits 0..=(x - 1) / 2.
        1 + self.odd_ones_through((x - 1) / 2)
    }

    /// The `n`-th prime (1-based).
    pub fn nth_prime(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidArgument("prime index is 1-based".into()));
        }
        let total = self.total();
        if n > total {
            return Err(Error::OutOfRange {
                what: "prime index",
                value: n,
                max: total,
            });
        }
        if n == 1 {
            return Ok(2);
        }
        // Find the bit holding the (n - 1)-th odd prime.
        let target = n - 1;
        let block = self.block_prefix.partition_point(|&c| c < target) - 1;
        let mut seen = self.block_prefix[block];
        let mut w = block * BLOCK_WORDS;
        loop {
            let ones = u64::from(self.words[w].count_ones());
            if seen + ones >= target {
                break;
            }
            seen += ones;
            w += 1;
        }
        let mut word = self.words[w];
        for _ in 0..(target - seen - 1) {
            word &= word - 1;
        }
        let bit = w as u64 * 64 + u64::from(word.trailing_zeros());
        Ok(2 * bit + 1)
    }

    /// Primes in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2).chain(self.words.iter().enumerate().flat_map(|(w, &word)| {
            BitIter(word).map(move |j| 2 * (w as u64 * 64 + u64::from(j)) + 1)
        }))
    }

    /// Primes in `[lo, hi]`, both clamped to the table.
    pub fn primes_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        let hi = hi.min(self.limit);
        let two = (lo <= 2 && hi >= 2).then_some(2);
        let lo_odd = lo.max(3) | 1;
        let words: &[u64] = if lo_odd > hi {
            &[]
        } else {
            let w0 = (lo_odd / 2 / 64) as usize;
            let w1 = (hi.saturating_sub(1) / 2 / 64) as usize;
            &self.words[w0..=w1]
        };
        let w_base = (lo_odd / 2 / 64) as usize;
        two.into_iter().chain(
            words
                .iter()
                .enumerate()
                .flat_map(move |(i, &word)| {
                    BitIter(word).map(move |j| 2 * ((w_base + i) as u64 * 64 + u64::from(j)) + 1)
                })
                .filter(move |&p| p >= lo && p <= hi),
        )
    }

    /// Prime counts per block of `BLOCK_WORDS * 128` integers; 2 is
    /// counted in the first block. Sums to [`PrimeTable::total`].
    pub fn block_counts(&self) -> Vec<u64> {
        let mut counts: Vec<u64> = self.block_prefix.windows(2).map(|w| w[1] - w[0]).collect();
        counts[0] += 1;
        counts
    }

    fn odd_ones_through(&self, bit: u64) -> u64 {
        let w = (bit / 64) as usize;
        let block = w / BLOCK_WORDS;
        let mut count = self.block_prefix[block];
        for &word in &self.words[block * BLOCK_WORDS..w] {
            count += u64::from(word.count_ones());
        }
        let shift = 63 - (bit % 64);
        count + u64::from((self.words[w] << shift).count_ones())
    }

    fn check_range(&self, what: &'static str, value: u64) -> Result<()> {
        if value > self.limit {
            Err(Error::OutOfRange {
                what,
                value,
                max: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// Writes the table in the binary cache format.
    ///
    /// Layout (little endian): magic `RPSIEVE\0`, version `u32`, limit
    /// `u64`, segment size `u64`, word count `u64`, flag words, block
    /// count `u64`, then one `u32` prime count per block.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let write = |out: &mut BufWriter<File>, bytes: &[u8]| {
            out.write_all(bytes).map_err(|e| Error::io(path, e))
        };
        write(&mut out, CACHE_MAGIC)?;
        write(&mut out, &CACHE_VERSION.to_le_bytes())?;
        write(&mut out, &self.limit.to_le_bytes())?;
        write(&mut out, &self.segment_size.to_le_bytes())?;
        write(&mut out, &(self.words.len() as u64).to_le_bytes())?;
        for w in &self.words {
            write(&mut out, &w.to_le_bytes())?;
        }
        let counts = self.block_counts();
        write(&mut out, &(counts.len() as u64).to_le_bytes())?;
        for c in counts {
            write(&mut out, &(c as u32).to_le_bytes())?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Loads a table written by [`PrimeTable::save`]. Mismatched versions,
    /// truncated payloads and inconsistent block counts are rejected.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bad = |reason: String| Error::CacheFormat {
            path: path.to_path_buf(),
            reason,
        };
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut input = BufReader::new(file);
        let mut read = |n: usize| -> Result<Vec<u8>> {
            let mut buf = vec![0u8; n];
            input.read_exact(&mut buf).map_err(|e| {
                if e.kind() == std::io::ErrorKind::UnexpectedEof {
                    bad("truncated".into())
                } else {
                    Error::io(path, e)
                }
            })?;
            Ok(buf)
        };
        let u64_of = |b: Vec<u8>| u64::from_le_bytes(b.try_into().expect("8 bytes"));

        if read(8)?.as_slice() != CACHE_MAGIC {
            return Err(bad("bad magic bytes".into()));
        }
        let version = u32::from_le_bytes(read(4)?.try_into().expect("4 bytes"));
        if version != CACHE_VERSION {
            return Err(bad(format!(
                "format version {version}, expected {CACHE_VERSION}"
            )));
        }
        let limit = u64_of(read(8)?);
        let segment_size = u64_of(read(8)?);
        let n_words = u64_of(read(8)?);
        if limit < 2 || n_words != odd_bits(limit).div_ceil(64) {
            return Err(bad(format!(
                "word count {n_words} does not match limit {limit}"
            )));
        }
        let payload = read(n_words as usize * 8)?;
        let words: Vec<u64> = payload
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let n_blocks = u64_of(read(8)?);
        let stored: Vec<u64> = read(n_blocks as usize * 4)?
            .chunks_exact(4)
            .map(|c| u64::from(u32::from_le_bytes(c.try_into().expect("4 bytes"))))
            .collect();

        let table = PrimeTable {
            limit,
            segment_size,
            block_prefix: prefix_counts(&words),
            words,
        };
        if table.block_counts() != stored {
            return Err(bad("block counts disagree with flag payload".into()));
        }
        Ok(table)
    }
}

/// Number of odd integers in `[1, limit]`.
fn odd_bits(limit: u64) -> u64 {
    limit.div_ceil(2)
}

fn prefix_counts(words: &[u64]) -> Vec<u64> {
    let mut prefix = Vec::with_capacity(words.len() / BLOCK_WORDS + 2);
    let mut running = 0u64;
    for block in words.chunks(BLOCK_WORDS) {
        prefix.push(running);
        running += block.iter().map(|w| u64::from(w.count_ones())).sum::<u64>();
    }
    prefix.push(running);
    prefix
}

fn sieve_segment(chunk: &mut [u64], first_bit: u64, base: &[u64]) {
    let end_bit = first_bit + chunk.len() as u64 * 64;
    let lo = 2 * first_bit + 1;
    for &q in base {
        let sq = q * q;
        let start = if sq >= lo {
            sq
        } else {
            // Smallest odd multiple of q that is >= lo.
            let m = lo.div_ceil(q) * q;
            if m % 2 == 0 {
                m + q
            } else {
                m
            }
        };
        let mut b = start / 2;
        if b >= end_bit {
            continue;
        }
        while b < end_bit {
            let local = b - first_bit;
            chunk[(local / 64) as usize] &= !(1u64 << (local % 64));
            b += q;
        }
    }
}

/// Odd primes up to `bound` by a plain sieve.
fn base_odd_primes(bound: u64) -> Vec<u64> {
    let bound = bound as usize;
    let mut composite = vec![false; bound + 1];
    let mut primes = Vec::new();
    let mut n = 3;
    while n <= bound {
        if !composite[n] {
            primes.push(n as u64);
            let mut m = n * n;
            while m <= bound {
                composite[m] = true;
                m += 2 * n;
            }
        }
        n += 2;
    }
    primes
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let j = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_tables() {
        let t = build_prime_table(10).unwrap();
        assert_eq!(t.primes().collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        let t = build_prime_table(2).unwrap();
        assert_eq!(t.primes().collect::<Vec<_>>(), vec![2]);
        assert_eq!(t.prime_count(2).unwrap(), 1);
        let t = build_prime_table(3).unwrap();
        assert_eq!(t.primes().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn limit_below_two_is_rejected() {
        assert!(matches!(
            build_prime_table(1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_prime_table(0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn bad_segment_size_is_rejected() {
        assert!(PrimeTable::build(1000, 100).is_err());
        assert!(PrimeTable::build(1000, 0).is_err());
    }

    #[test]
    fn flags_match_trial_division() {
        let t = PrimeTable::build(100_000, 1024).unwrap();
        for n in 0..=100_000 {
            assert_eq!(t.is_prime(n).unwrap(), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn counts_and_nth_prime() {
        let t = build_prime_table(1000).unwrap();
        assert_eq!(t.prime_count(0).unwrap(), 0);
        assert_eq!(t.prime_count(1).unwrap(), 0);
        assert_eq!(t.prime_count(100).unwrap(), 25);
        assert_eq!(t.nth_prime(1).unwrap(), 2);
        assert_eq!(t.nth_prime(25).unwrap(), 97);
        assert_eq!(t.nth_prime(168).unwrap(), 997);
    }

    #[test]
    fn out_of_range_queries_fail() {
        let t = build_prime_table(100).unwrap();
        assert!(matches!(t.prime_count(101), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.is_prime(101), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.nth_prime(26), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.nth_prime(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn primes_in_range() {
        let t = build_prime_table(1000).unwrap();
        let got: Vec<u64> = t.primes_in(90, 130).collect();
        assert_eq!(got, vec![97, 101, 103, 107, 109, 113, 127]);
        assert_eq!(t.primes_in(0, 3).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(t.primes_in(24, 28).count(), 0);
        assert_eq!(t.primes_in(990, 5000).collect::<Vec<_>>(), vec![991, 997]);
    }

    #[test]
    fn block_counts_sum_to_total() {
        let t = build_prime_table(123_457).unwrap();
        assert_eq!(t.block_counts().iter().sum::<u64>(), t.total());
        assert_eq!(t.total(), t.prime_count(123_457).unwrap());
    }

    #[test]
    fn segment_size_does_not_change_result() {
        let a = PrimeTable::build(200_003, 128).unwrap();
        let b = PrimeTable::build(200_003, 128 * 37).unwrap();
        let c = PrimeTable::build(200_003, DEFAULT_SEGMENT_SIZE).unwrap();
        assert_eq!(a.words, b.words);
        assert_eq!(a.words, c.words);
    }

    #[test]
    fn cache_roundtrip_and_rejection() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.bin");
        let t = build_prime_table(50_000).unwrap();
        t.save(&path).unwrap();
        assert_eq!(PrimeTable::load(&path).unwrap(), t);

        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 9;
        std::fs::write(&path, &bytes).unwrap();
        let err = PrimeTable::load(&path).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");

        bytes[8] = 1;
        bytes.truncate(bytes.len() - 3);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            PrimeTable::load(&path),
            Err(Error::CacheFormat { .. })
        ));
    }

    #[test]
    fn isqrt_is_exact() {
        for n in [
            0,
            1,
            3,
            4,
            15,
            16,
            17,
            999_999_999_999,
            u64::from(u32::MAX) * 3,
        ] {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }
}
