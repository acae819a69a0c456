//! Closed-form predictions for the head-coloring model.

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::coin_model::check_head_probability;
use crate::error::{Error, Result};

/// Head probability `p` and the matching ratio `c = (1 − p) / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    p: f64,
}

impl ModelParams {
    pub fn new(p: f64) -> Result<Self> {
        check_head_probability(p)?;
        Ok(ModelParams { p })
    }

    /// Model for `c`-Ramanujan primes, `p = 1 / (1 + c)`.
    pub fn from_c(c: Ratio<u64>) -> Result<Self> {
        let (n, d) = (*c.numer() as f64, *c.denom() as f64);
        if n >= d {
            return Err(Error::InvalidArgument(format!(
                "c must lie in [0, 1), got {c}"
            )));
        }
        Self::new(d / (d + n))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn c(&self) -> f64 {
        (1.0 - self.p) / self.p
    }
}

/// Probability that the walk never drops below its start, `(2p − 1) / p`.
///
/// This is also the limiting fraction of heads colored red.
pub fn survival_probability(p: f64) -> Result<f64> {
    check_head_probability(p)?;
    Ok((2.0 * p - 1.0) / p)
}

/// Bracket `(lower, upper)` for the expected number of red `k`-runs per toss:
/// `lower = ((2p − 1)² / p) · p^(k−1)`, `upper = p^(k−1)`.
pub fn red_run_density_bounds(p: f64, k: u32) -> Result<(f64, f64)> {
    check_head_probability(p)?;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "run length k must be at least 1".into(),
        ));
    }
    let upper = p.powi(k as i32 - 1);
    let lower = (2.0 * p - 1.0).powi(2) / p * upper;
    Ok((lower, upper))
}

/// Order-of-magnitude prediction `log N / log(1/p)` for the longest red run
/// among `n_heads` heads. Also valid for a fair coin (`p = 1/2`), where it
/// is the classical longest-run-of-heads estimate.
pub fn expected_longest_red_run(p: f64, n_heads: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "p must lie in [1/2, 1], got {p}"
        )));
    }
    if n_heads < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 heads, got {n_heads}"
        )));
    }
    if p == 1.0 {
        return Err(Error::InfinitePrediction("log(1/p) = 0 at p = 1".into()));
    }
    Ok(n_heads.ln() / (1.0 / p).ln())
}

/// Lower-bound prediction `2 log₂ N` for the longest blue run at `p = 2/3`.
pub fn blue_run_threshold(p: f64, n_heads: f64) -> Result<f64> {
    if (p - 2.0 / 3.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "the blue-run threshold is only available at p = 2/3, got {p}"
        )));
    }
    if n_heads < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 heads, got {n_heads}"
        )));
    }
    Ok(2.0 * n_heads.log2())
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Probability of at least `2k` tails in `3k` tosses at `p = 2/3`, exactly.
pub fn q_tail_exact(k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (k, n) = (u64::from(k), 3 * u64::from(k));
    // C(n, l) (1/3)^l (2/3)^(n-l) = C(n, l) 2^(n-l) / 3^n
    let numer = (2 * k..=n).fold(BigUint::zero(), |acc, l| {
        acc + (binomial(n, l) << (n - l) as usize)
    });
    let denom = BigUint::from(3u32).pow(n as u32);
    Ok(BigRational::new(numer.into(), denom.into()))
}

/// [`q_tail_exact`] converted to `f64`.
pub fn q_tail(k: u32) -> Result<f64> {
    Ok(ratio_to_f64(&q_tail_exact(k)?))
}

/// The single `l = 2k` term `C(3k, 2k) (1/3)^(2k) (2/3)^k`.
pub fn q_tail_leading_term(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (k, n) = (u64::from(k), 3 * u64::from(k));
    let numer = binomial(n, 2 * k) << k as usize;
    let denom = BigUint::from(3u32).pow(n as u32);
    Ok(ratio_to_f64(&BigRational::new(numer.into(), denom.into())))
}

/// Stirling asymptotic `v_k · 2^(−k)` with `v_k = sqrt(3 / (4πk))`.
pub fn q_tail_asymptotic(k: u32) -> f64 {
    let k = f64::from(k);
    (3.0 / (4.0 * std::f64::consts::PI * k)).sqrt() * 0.5f64.powf(k)
}

/// Converts a positive big rational without overflowing the intermediate
/// integers: both sides are shifted so the quotient keeps 64 significant bits.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64().filter(|v| v.is_finite() && *v != 0.0) {
        return v;
    }
    let (n, d) = (r.numer().magnitude(), r.denom().magnitude());
    if n.is_zero() {
        return 0.0;
    }
    let shift = d.bits() as i64 - n.bits() as i64 + 64;
    let q = if shift >= 0 {
        (n << shift as usize) / d
    } else {
        n / (d << (-shift) as usize)
    };
    let sign = if r.numer().sign() == num_bigint::Sign::Minus {
        -1.0
    } else {
        1.0
    };
    let (a, b) = (shift / 2, shift - shift / 2);
    sign * q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(a as i32)) * 2f64.powi(-(b as i32))
}
