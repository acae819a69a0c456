//! Continuous-time pictures of the coin model.
//!
//! * Two independent homogeneous Poisson processes, the fast one (`H`)
//!   `ratio` times as intense as the slow one (`T`). Merged by time, their
//!   tags are i.i.d. with `P(H) = ratio / (ratio + 1)`.
//! * A synthetic prime stream: points with local intensity `1 / ln x`,
//!   generated by drawing each exponential gap at the rate of the current
//!   position.
//! * Two prime searches, one from `x` and one from `x / 2` advancing at half
//!   the speed; the events of the first are heads and those of the second
//!   tails.
//!
//! Exact timestamp ties are broken tails first.

use std::io::Write;

use rand_distr::{Distribution, Exp1};

use crate::coin_model::{Toss, TossSequence};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualProcessConfig {
    /// Events per unit time of the slow (`T`) process.
    pub base_intensity: f64,
    /// Intensity multiplier of the fast (`H`) process.
    pub ratio: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for DualProcessConfig {
    fn default() -> Self {
        DualProcessConfig {
            base_intensity: 1.0,
            ratio: 2.0,
            horizon: 1000.0,
            seed: 0,
        }
    }
}

impl DualProcessConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.base_intensity) {
            return Err(Error::InvalidArgument(
                "base intensity must be positive".into(),
            ));
        }
        if !(self.ratio.is_finite() && self.ratio > 1.0) {
            return Err(Error::InvalidArgument(
                "intensity ratio must exceed 1".into(),
            ));
        }
        if !ok(self.horizon) {
            return Err(Error::InvalidArgument("horizon must be positive".into()));
        }
        Ok(())
    }

    /// Probability that any given event is a head.
    pub fn head_probability(&self) -> f64 {
        self.ratio / (self.ratio + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub tag: Toss,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventStream {
    events: Vec<Event>,
}

impl EventStream {
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn tags(&self) -> TossSequence {
        TossSequence::from_outcomes(self.events.iter().map(|e| e.tag).collect())
    }

    /// `t,tag` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,tag")?;
        for e in &self.events {
            writeln!(out, "{},{}", e.t, e.tag.symbol())?;
        }
        Ok(())
    }
}

fn exp_gap(rng: &mut TrialRng, rate: f64) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / rate
}

/// Merges two arrival-time generators, tails first on ties.
struct Merge<F, S> {
    fast: F,
    slow: S,
    next_fast: f64,
    next_slow: f64,
}

impl<F: FnMut() -> f64, S: FnMut() -> f64> Merge<F, S> {
    fn new(mut fast: F, mut slow: S) -> Self {
        let next_fast = fast();
        let next_slow = slow();
        Merge {
            fast,
            slow,
            next_fast,
            next_slow,
        }
    }
}

impl<F: FnMut() -> f64, S: FnMut() -> f64> Iterator for Merge<F, S> {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        if self.next_slow <= self.next_fast {
            let t = self.next_slow;
            self.next_slow = (self.slow)();
            Some(Event { t, tag: Toss::Tail })
        } else {
            let t = self.next_fast;
            self.next_fast = (self.fast)();
            Some(Event { t, tag: Toss::Head })
        }
    }
}

fn dual_events(config: &DualProcessConfig) -> impl Iterator<Item = Event> {
    let mut fast_rng = rng_from_seed(derive_seed(config.seed, 0));
    let mut slow_rng = rng_from_seed(derive_seed(config.seed, 1));
    let fast_rate = config.ratio * config.base_intensity;
    let slow_rate = config.base_intensity;
    let (mut tf, mut ts) = (0.0, 0.0);
    Merge::new(
        move || {
            tf += exp_gap(&mut fast_rng, fast_rate);
            tf
        },
        move || {
            ts += exp_gap(&mut slow_rng, slow_rate);
            ts
        },
    )
}

/// All events of both processes up to the horizon, merged by time.
pub fn simulate_dual(config: &DualProcessConfig) -> Result<EventStream> {
    config.validate()?;
    let horizon = config.horizon;
    Ok(EventStream {
        events: dual_events(config).take_while(|e| e.t <= horizon).collect(),
    })
}

/// The first `n_events` merged events; the horizon is ignored.
pub fn simulate_dual_events(config: &DualProcessConfig, n_events: usize) -> Result<EventStream> {
    config.validate()?;
    Ok(EventStream {
        events: dual_events(config).take(n_events).collect(),
    })
}

fn check_start(x0: f64) -> Result<()> {
    if x0.is_finite() && x0 >= 10.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "synthetic primes start at x0 >= 10, got {x0}"
        )))
    }
}

/// Synthetic prime positions: `x_{i+1} = x_i + ln(x_i) · E_i` with
/// `E_i ~ Exp(1)`, starting from `x0`.
///
/// Positions are tracked as offsets from `x0`, so `x0` may be far beyond the
/// range where consecutive points are distinguishable as `f64`.
pub struct SyntheticPrimes {
    x0: f64,
    ln_x0: f64,
    offset: f64,
    rng: TrialRng,
}

impl SyntheticPrimes {
    pub fn new(x0: f64, seed: u64) -> Result<Self> {
        check_start(x0)?;
        Ok(SyntheticPrimes {
            x0,
            ln_x0: x0.ln(),
            offset: 0.0,
            rng: rng_from_seed(seed),
        })
    }

    /// Distance of the next point from `x0`.
    pub fn next_offset(&mut self) -> f64 {
        let ln_x = self.ln_x0 + (self.offset / self.x0).ln_1p();
        self.offset += exp_gap(&mut self.rng, 1.0 / ln_x);
        self.offset
    }
}

impl Iterator for SyntheticPrimes {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let offset = self.next_offset();
        Some(self.x0 + offset)
    }
}

/// The first `length` synthetic primes above `x0`.
pub fn synthetic_prime_stream(x0: f64, length: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(SyntheticPrimes::new(x0, seed)?.take(length).collect())
}

/// Synthetic primes in `(x0, x_end]`.
pub fn synthetic_primes_until(x0: f64, x_end: f64, seed: u64) -> Result<Vec<f64>> {
    Ok(SyntheticPrimes::new(x0, seed)?
        .take_while(|&x| x <= x_end)
        .collect())
}

/// `position` rows.
pub fn write_positions_csv<W: Write>(out: &mut W, positions: &[f64]) -> std::io::Result<()> {
    writeln!(out, "position")?;
    for p in positions {
        writeln!(out, "{p}")?;
    }
    Ok(())
}

/// `∫ dx / ln x` over `[a, b]`, by Simpson's rule in `u = ln x`.
pub fn log_integral(a: f64, b: f64) -> f64 {
    let n = 4000;
    let (ua, ub) = (a.ln(), b.ln());
    let h = (ub - ua) / n as f64;
    let f = |u: f64| u.exp() / u;
    let mut s = f(ua) + f(ub);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(ua + h * i as f64);
    }
    s * h / 3.0
}

/// Two independent prime searches: the fast one walks up from `x0`, the
/// slow one from `x0 / 2` at half speed. A prime found by the fast search is
/// a head, one found by the slow search a tail. Event times are distances
/// walked by the fast search; the first `n_events` are returned.
pub fn paired_search(x0: f64, n_events: usize, seed: u64) -> Result<EventStream> {
    check_start(x0 / 2.0)?;
    let mut fast = SyntheticPrimes::new(x0, derive_seed(seed, 0))?;
    let mut slow = SyntheticPrimes::new(x0 / 2.0, derive_seed(seed, 1))?;
    let merged = Merge::new(move || fast.next_offset(), move || 2.0 * slow.next_offset());
    Ok(EventStream {
        events: merged.take(n_events).collect(),
    })
}

/// Tags of [`paired_search`].
pub fn paired_search_tags(x0: f64, n_events: usize, seed: u64) -> Result<TossSequence> {
    Ok(paired_search(x0, n_events, seed)?.tags())
}

/// The coupled variant: one synthetic stream seen from `x` and from `x / 2`.
/// Heads are points in `(x0, x_end]`, tails are points in `(x0/2, x_end/2]`
/// mapped to time `2y`. The resulting walk is the synthetic analogue of
/// `π(x) − π(x/2)` shifted to start at zero.
pub fn coupled_half_search(x0: f64, x_end: f64, seed: u64) -> Result<EventStream> {
    check_start(x0 / 2.0)?;
    let points = synthetic_primes_until(x0 / 2.0, x_end, seed)?;
    let heads = points.iter().filter(|&&y| y > x0).map(|&y| Event {
        t: y,
        tag: Toss::Head,
    });
    let tails = points
        .iter()
        .filter(|&&y| y > x0 / 2.0 && y <= x_end / 2.0)
        .map(|&y| Event {
            t: 2.0 * y,
            tag: Toss::Tail,
        });
    let mut events: Vec<Event> = heads.chain(tails).collect();
    events.sort_by(|a, b| {
        a.t.total_cmp(&b.t)
            .then_with(|| (a.tag == Toss::Head).cmp(&(b.tag == Toss::Head)))
    });
    Ok(EventStream { events })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(DualProcessConfig::default().validate().is_ok());
        let bad = DualProcessConfig {
            ratio: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = DualProcessConfig {
            base_intensity: 0.0,
            ..Default::default()
        };
        assert!(simulate_dual(&bad).is_err());
        let bad = DualProcessConfig {
            horizon: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dual_stream_is_ordered_and_reproducible() {
        let cfg = DualProcessConfig {
            horizon: 500.0,
            seed: 11,
            ..Default::default()
        };
        let a = simulate_dual(&cfg).unwrap();
        assert!(a.events().windows(2).all(|w| w[0].t <= w[1].t));
        assert!(a.events().last().unwrap().t <= 500.0);
        assert_eq!(a, simulate_dual(&cfg).unwrap());
    }

    #[test]
    fn ties_put_tails_first() {
        let mut merged = Merge::new(|| 1.0, || 1.0);
        assert_eq!(merged.next().unwrap().tag, Toss::Tail);
    }

    #[test]
    fn synthetic_primes_increase() {
        let xs = synthetic_prime_stream(1e6, 1000, 5).unwrap();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(xs[0] > 1e6);
        assert!(synthetic_prime_stream(5.0, 10, 1).is_err());
    }

    #[test]
    fn paired_search_far_out() {
        // Consecutive points near 1e200 collapse in f64; offsets do not.
        let tags = paired_search_tags(1e200, 30_000, 8).unwrap();
        let h = tags.heads() as f64 / tags.len() as f64;
        assert!((h - 2.0 / 3.0).abs() < 0.01, "{h}");
    }

    #[test]
    fn log_integral_matches_known_value() {
        // li(10^6) - li(2) = 78626.50... - 1.045...
        let v = log_integral(2.0, 1e6);
        assert!((v - (78_627.549_159 - 1.045_163_8)).abs() < 1.0, "{v}");
    }

    #[test]
    fn coupled_search_is_sorted() {
        let s = coupled_half_search(1e5, 2e5, 3).unwrap();
        assert!(s.events().windows(2).all(|w| w[0].t <= w[1].t));
        let heads = s.events().iter().filter(|e| e.tag == Toss::Head).count();
        assert!(heads > s.len() / 2);
    }

    #[test]
    fn csv_headers() {
        let cfg = DualProcessConfig {
            horizon: 2.0,
            ..Default::default()
        };
        let mut buf = Vec::new();
        simulate_dual(&cfg).unwrap().write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,tag\n"));
        let mut buf = Vec::new();
        write_positions_csv(&mut buf, &[11.5]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "position\n11.5\n");
    }
}
