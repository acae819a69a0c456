//! Ramanujan primes and their generalization to an arbitrary ratio `c`.
//!
//! `R_n` is the smallest integer such that `π(x) − π(⌊c·x⌋) ≥ n` for every
//! `x ≥ R_n`. Ordinary Ramanujan primes use `c = 1/2`.
//!
//! The condition quantifies over all `x`, but a table only sees `x ≤ X`.
//! We compute the suffix minimum of `s(x) = π(x) − π(⌊c·x⌋)` from `X`
//! downward and certify only the values below a *safe limit*, by default
//! `X / 4`. Values between the safe limit and `X` are kept as provisional.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::PrimeTable;

pub const DEFAULT_GUARD_FACTOR: u64 = 4;

/// The ratio `c` and the truncation guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RpParams {
    c: Ratio<u64>,
    guard_factor: u64,
}

impl RpParams {
    /// `0 < c < 1`, held exactly.
    pub fn new(c: Ratio<u64>) -> Result<Self> {
        if *c.numer() == 0 || c >= Ratio::from_integer(1) {
            return Err(Error::InvalidArgument(format!(
                "c must lie in (0, 1), got {c}"
            )));
        }
        Ok(RpParams {
            c,
            guard_factor: DEFAULT_GUARD_FACTOR,
        })
    }

    /// Ordinary Ramanujan primes, `c = 1/2`.
    pub fn ordinary() -> Self {
        RpParams {
            c: Ratio::new(1, 2),
            guard_factor: DEFAULT_GUARD_FACTOR,
        }
    }

    pub fn with_guard_factor(mut self, guard_factor: u64) -> Result<Self> {
        if guard_factor == 0 {
            return Err(Error::InvalidArgument(
                "guard factor must be at least 1".into(),
            ));
        }
        self.guard_factor = guard_factor;
        Ok(self)
    }

    pub fn c(&self) -> Ratio<u64> {
        self.c
    }

    pub fn guard_factor(&self) -> u64 {
        self.guard_factor
    }

    /// Head probability of the matching coin model, `p = 1 / (1 + c)`.
    pub fn model_p(&self) -> f64 {
        let (n, d) = (*self.c.numer() as f64, *self.c.denom() as f64);
        d / (d + n)
    }

    /// `⌊c·x⌋` in exact integer arithmetic.
    #[inline]
    pub fn scaled_floor(&self, x: u64) -> u64 {
        (u128::from(x) * u128::from(*self.c.numer()) / u128::from(*self.c.denom())) as u64
    }
}

impl FromStr for RpParams {
    type Err = Error;

    /// Accepts `a/b` or a terminating decimal such as `0.75`.
    fn from_str(s: &str) -> Result<Self> {
        RpParams::new(parse_ratio(s)?)
    }
}

impl fmt::Display for RpParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.c.numer(), self.c.denom())
    }
}

/// Parses `a/b`, an integer, or a decimal with at most 18 fractional digits.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse {s:?} as a rational number"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || !frac.chars().all(|ch| ch.is_ascii_digit()) {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let den = 10u64.pow(frac.len() as u32);
    let frac: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let numer = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(numer, den))
}

/// `s(x) = π(x) − π(⌊c·x⌋)`.
pub fn s_value(table: &PrimeTable, params: &RpParams, x: u64) -> Result<u64> {
    let pi_x = table.prime_count(x)?;
    Ok(pi_x - table.prime_count_unchecked(params.scaled_floor(x)))
}

/// The sequence `R_1 < R_2 < …` computed from one prime table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamanujanTable {
    params: RpParams,
    limit: u64,
    safe_limit: u64,
    /// Certified values, all `<= safe_limit`.
    values: Vec<u64>,
    /// Values in `(safe_limit, limit]`, valid only if `s` never dips after `limit`.
    provisional: Vec<u64>,
}

impl RamanujanTable {
    pub fn params(&self) -> &RpParams {
        &self.params
    }

    /// Sieve limit the table was computed from.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Largest `x` for which the classification is complete.
    pub fn safe_limit(&self) -> u64 {
        self.safe_limit
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn provisional(&self) -> &[u64] {
        &self.provisional
    }

    /// `R_n` for a certified `n` (1-based).
    pub fn nth(&self, n: u64) -> Result<u64> {
        let len = self.values.len() as u64;
        if n == 0 {
            return Err(Error::InvalidArgument(
                "Ramanujan prime index is 1-based".into(),
            ));
        }
        if n > len {
            return Err(Error::OutOfRange {
                what: "Ramanujan index",
                value: n,
                max: len,
            });
        }
        Ok(self.values[(n - 1) as usize])
    }

    /// Number of certified `R_n <= x`.
    pub fn count_le(&self, x: u64) -> u64 {
        self.values.partition_point(|&r| r <= x) as u64
    }
}

/// Computes all `R_n` up to the table's safe limit.
///
/// A single backward scan maintains `π(x)`, `π(⌊c·x⌋)` and the running
/// suffix minimum `m(x)`; whenever `m` drops between `x` and `x − 1`, the
/// indices it drops past have `R_n = x`.
pub fn compute_ramanujan_table(table: &PrimeTable, params: &RpParams) -> Result<RamanujanTable> {
    let limit = table.limit();
    let mut pi_x = table.total();
    let mut y = params.scaled_floor(limit);
    let mut pi_y = table.prime_count_unchecked(y);
    let mut suffix_min = u64::MAX;
    let mut found = Vec::new();

    let mut x = limit;
    loop {
        let s = pi_x - pi_y;
        if x < limit && s < suffix_min {
            // m(x + 1) = suffix_min > s >= m(x): R_n = x + 1 for n in (s, suffix_min].
            for _ in s..suffix_min {
                found.push(x + 1);
            }
        }
        suffix_min = suffix_min.min(s);
        if x == 1 {
            break;
        }
        if table.is_prime_unchecked(x) {
            pi_x -= 1;
        }
        x -= 1;
        let y_next = params.scaled_floor(x);
        while y > y_next {
            if table.is_prime_unchecked(y) {
                pi_y -= 1;
            }
            y -= 1;
        }
    }
    // s(1) = 0, so every level was assigned; `found` runs from R_max down to R_1.
    found.reverse();
    debug_assert!(found.windows(2).all(|w| w[0] < w[1]));
    if found.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "limit {limit} is too small to produce any Ramanujan prime"
        )));
    }

    let safe_limit = guarded_safe_limit(&found, limit, params.guard_factor());
    let split = found.partition_point(|&r| r <= safe_limit);
    let provisional = found.split_off(split);
    Ok(RamanujanTable {
        params: *params,
        limit,
        safe_limit,
        values: found,
        provisional,
    })
}

/// Starts from `limit / guard_factor` and shrinks by a quarter until the
/// truncated suffix minimum still rises somewhere in `[safe, (safe + X) / 2]`,
/// i.e. the tail of the sieved range sits strictly above every level below
/// the safe limit. Returns 1 when no such point exists.
fn guarded_safe_limit(found: &[u64], limit: u64, guard_factor: u64) -> u64 {
    let count_le = |x: u64| found.partition_point(|&r| r <= x);
    let mut safe = limit / guard_factor;
    while safe >= 2 {
        let mid = safe + (limit - safe) / 2;
        let below = count_le(safe - 1);
        if count_le(mid) > below {
            return safe;
        }
        safe = safe * 3 / 4;
    }
    1
}

/// One prime and whether it is a (generalized) Ramanujan prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeClassification {
    pub prime: u64,
    pub is_ramanujan: bool,
}

/// Classifies every prime up to the safe limit, in increasing order.
pub fn classify_primes(table: &PrimeTable, rp: &RamanujanTable) -> Vec<PrimeClassification> {
    if rp.safe_limit < 2 {
        return Vec::new();
    }
    let mut rps = rp.values.iter().copied().peekable();
    table
        .primes_in(2, rp.safe_limit.min(table.limit()))
        .map(|prime| {
            let is_ramanujan = rps.next_if_eq(&prime).is_some();
            PrimeClassification {
                prime,
                is_ramanujan,
            }
        })
        .collect()
}
