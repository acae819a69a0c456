//! The biased-coin head-coloring process.
//!
//! `N` coins land heads with probability `p`. With `Δ_i` the number of heads
//! minus tails among the first `i` tosses, a head at toss `i` is colored red
//! iff
//!
//! 1. `Δ_j ≥ Δ_i` for every later toss `j ≤ N`, and
//! 2. every earlier toss `k` with `Δ_k ≥ Δ_i` is followed, strictly before
//!    `i`, by some toss `l` with `Δ_l < Δ_i`;
//!
//! otherwise it is blue. Both rules are evaluated relative to the horizon
//! `N`, so a final head is red. [`color_heads_censored`] refuses to color
//! heads whose status an extension of the sequence could still change.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::distributions::{Bernoulli, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::run_stats::{Label, LabelStream};

/// Default censoring guard.
pub const DEFAULT_GUARD: u32 = 3;

/// Largest sequence length accepted by the enumeration oracle.
pub const MAX_ENUMERATION_LEN: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Toss {
    Head,
    Tail,
}

impl Toss {
    pub fn symbol(self) -> char {
        match self {
            Toss::Head => 'H',
            Toss::Tail => 'T',
        }
    }
}

/// A sequence of outcomes, optionally tagged with how it was generated.
#[derive(Debug, Clone, PartialEq)]
pub struct TossSequence {
    outcomes: Vec<Toss>,
    p: Option<f64>,
    seed: Option<u64>,
}

impl TossSequence {
    pub fn from_outcomes(outcomes: Vec<Toss>) -> Self {
        TossSequence {
            outcomes,
            p: None,
            seed: None,
        }
    }

    /// Parses a string of `H`/`T` characters; commas and whitespace are ignored.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'H' | 'h' => Ok(Toss::Head),
                'T' | 't' => Ok(Toss::Tail),
                other => Err(Error::InvalidArgument(format!(
                    "unexpected toss symbol {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_outcomes)
    }

    pub fn outcomes(&self) -> &[Toss] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn p(&self) -> Option<f64> {
        self.p
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn heads(&self) -> usize {
        self.outcomes.iter().filter(|&&t| t == Toss::Head).count()
    }
}

impl fmt::Display for TossSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.outcomes
            .iter()
            .try_for_each(|t| write!(f, "{}", t.symbol()))
    }
}

pub(crate) fn check_head_probability(p: f64) -> Result<()> {
    if p > 0.5 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "head probability must lie in (1/2, 1], got {p}"
        )))
    }
}

/// `n` independent tosses with head probability `p`, reproducible from `seed`.
pub fn generate_tosses(n: usize, p: f64, seed: u64) -> Result<TossSequence> {
    check_head_probability(p)?;
    let coin = Bernoulli::new(p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let outcomes = (0..n)
        .map(|_| {
            if coin.sample(&mut rng) {
                Toss::Head
            } else {
                Toss::Tail
            }
        })
        .collect();
    Ok(TossSequence {
        outcomes,
        p: Some(p),
        seed: Some(seed),
    })
}

/// `Δ_1, …, Δ_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    deltas: Vec<i64>,
}

impl WalkPath {
    pub fn deltas(&self) -> &[i64] {
        &self.deltas
    }

    pub fn last(&self) -> Option<i64> {
        self.deltas.last().copied()
    }
}

pub fn walk_path(tosses: &TossSequence) -> WalkPath {
    let deltas = tosses
        .outcomes
        .iter()
        .scan(0i64, |level, t| {
            *level += if *t == Toss::Head { 1 } else { -1 };
            Some(*level)
        })
        .collect();
    WalkPath { deltas }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
    NotHead,
    Censored,
}

impl Color {
    /// Transcript symbol: `R`, `B`, `-` or `C`.
    pub fn symbol(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
            Color::NotHead => '-',
            Color::Censored => 'C',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'R' => Some(Color::Red),
            'B' => Some(Color::Blue),
            '-' => Some(Color::NotHead),
            'C' => Some(Color::Censored),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensorPolicy {
    None,
    Guard(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    labels: Vec<Color>,
    policy: CensorPolicy,
}

impl Coloring {
    pub fn labels(&self) -> &[Color] {
        &self.labels
    }

    pub fn policy(&self) -> CensorPolicy {
        self.policy
    }

    pub fn count(&self, color: Color) -> usize {
        self.labels.iter().filter(|&&c| c == color).count()
    }

    /// Red fraction among determinate (red or blue) heads.
    pub fn red_fraction(&self) -> f64 {
        let red = self.count(Color::Red);
        let blue = self.count(Color::Blue);
        red as f64 / (red + blue) as f64
    }

    /// Heads in toss order as a red/blue stream with 1-based toss positions.
    ///
    /// The stream stops at the first censored head; that head and all later
    /// heads form the censored suffix.
    pub fn head_stream(&self) -> LabelStream {
        let mut labels = Vec::new();
        let mut positions = Vec::new();
        let mut censored = 0;
        for (i, &c) in self.labels.iter().enumerate() {
            match c {
                Color::NotHead => {}
                _ if censored > 0 => censored += 1,
                Color::Censored => censored = 1,
                Color::Red | Color::Blue => {
                    labels.push(if c == Color::Red {
                        Label::Red
                    } else {
                        Label::Blue
                    });
                    positions.push(i as u64 + 1);
                }
            }
        }
        LabelStream::with_positions(labels, positions)
            .expect("toss positions increase")
            .with_censored_suffix(censored)
    }
}

/// For each head, whether rules 1 and 2 hold (ignoring the horizon caveat).
///
/// Returns `(rule1, rule2)` per toss; entries for tails are unspecified.
fn rule_flags(deltas: &[i64]) -> (Vec<bool>, Vec<bool>) {
    let n = deltas.len();
    let mut rule1 = vec![true; n];
    let mut later_min = i64::MAX;
    for i in (0..n).rev() {
        rule1[i] = later_min >= deltas[i];
        later_min = later_min.min(deltas[i]);
    }

    // Rule 2 holds iff the nearest earlier k with Δ_k ≥ Δ_i (if any) comes
    // before the nearest earlier l with Δ_l < Δ_i.
    let mut rule2 = vec![true; n];
    let mut ge_stack: Vec<usize> = Vec::new();
    let mut lt_stack: Vec<usize> = Vec::new();
    for i in 0..n {
        let d = deltas[i];
        while ge_stack.last().is_some_and(|&k| deltas[k] < d) {
            ge_stack.pop();
        }
        while lt_stack.last().is_some_and(|&l| deltas[l] >= d) {
            lt_stack.pop();
        }
        rule2[i] = match (ge_stack.last(), lt_stack.last()) {
            (None, _) => true,
            (Some(&k), Some(&l)) => l > k,
            (Some(_), None) => false,
        };
        ge_stack.push(i);
        lt_stack.push(i);
    }
    (rule1, rule2)
}

/// Colors every head relative to the horizon `N`.
pub fn color_heads(tosses: &TossSequence) -> Coloring {
    let walk = walk_path(tosses);
    let (rule1, rule2) = rule_flags(&walk.deltas);
    let labels = tosses
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, t)| match t {
            Toss::Tail => Color::NotHead,
            Toss::Head if rule1[i] && rule2[i] => Color::Red,
            Toss::Head => Color::Blue,
        })
        .collect();
    Coloring {
        labels,
        policy: CensorPolicy::None,
    }
}

/// Colors heads, censoring red candidates too close to the horizon.
///
/// Blue is permanent: a later dip or an earlier unseparated visit cannot be
/// undone by extending the sequence. A head that satisfies both rules is
/// red only if it is not the last toss and the walk ends at least `guard`
/// above it (`Δ_N − Δ_i ≥ guard`); otherwise it is censored. Such a red
/// survives every extension by at most `guard` tosses.
pub fn color_heads_censored(tosses: &TossSequence, guard: u32) -> Coloring {
    let walk = walk_path(tosses);
    let (rule1, rule2) = rule_flags(&walk.deltas);
    let n = tosses.len();
    let end = walk.last().unwrap_or(0);
    let labels = tosses
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, t)| match t {
            Toss::Tail => Color::NotHead,
            Toss::Head if !(rule1[i] && rule2[i]) => Color::Blue,
            Toss::Head if i + 1 < n && end - walk.deltas[i] >= i64::from(guard) => Color::Red,
            Toss::Head => Color::Censored,
        })
        .collect();
    Coloring {
        labels,
        policy: CensorPolicy::Guard(guard),
    }
}

/// Writes `index,toss,delta,color` rows, 1-based.
pub fn write_transcript<W: Write>(
    out: &mut W,
    tosses: &TossSequence,
    coloring: &Coloring,
) -> std::io::Result<()> {
    let walk = walk_path(tosses);
    writeln!(out, "index,toss,delta,color")?;
    for (i, ((t, d), c)) in tosses
        .outcomes
        .iter()
        .zip(&walk.deltas)
        .zip(&coloring.labels)
        .enumerate()
    {
        writeln!(out, "{},{},{},{}", i + 1, t.symbol(), d, c.symbol())?;
    }
    Ok(())
}

/// One parsed transcript row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptRow {
    pub index: usize,
    pub toss: Toss,
    pub delta: i64,
    pub color: Color,
}

/// Reads rows written by [`write_transcript`]; `#` comment lines are skipped.
pub fn read_transcript<R: BufRead>(input: R) -> Result<Vec<TranscriptRow>> {
    let bad =
        |line: usize, msg: &str| Error::InvalidArgument(format!("transcript line {line}: {msg}"));
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (no, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "index,toss,delta,color" {
                return Err(bad(no + 1, "missing header"));
            }
            saw_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(no + 1, "expected 4 fields"));
        }
        let toss = match f[1] {
            "H" => Toss::Head,
            "T" => Toss::Tail,
            _ => return Err(bad(no + 1, "bad toss")),
        };
        let color = f[3]
            .chars()
            .next()
            .and_then(Color::from_symbol)
            .ok_or_else(|| bad(no + 1, "bad color"))?;
        rows.push(TranscriptRow {
            index: f[0].parse().map_err(|_| bad(no + 1, "bad index"))?,
            toss,
            delta: f[2].parse().map_err(|_| bad(no + 1, "bad delta"))?,
            color,
        });
    }
    Ok(rows)
}

/// Per-head-count integer tallies over all `2^n` outcome sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct HeadTally {
    sequences: u64,
    red: u64,
    blue: u64,
    nonnegative: u64,
    /// `red_windows[k - 1]`: windows of `k` consecutive heads that are all red.
    red_windows: Vec<u64>,
    /// `red_runs[k - 1]`: maximal red runs of length exactly `k`.
    red_runs: Vec<u64>,
}

impl HeadTally {
    fn new(n: usize) -> Self {
        HeadTally {
            red_windows: vec![0; n],
            red_runs: vec![0; n],
            ..Default::default()
        }
    }

    fn absorb(&mut self, other: &HeadTally) {
        self.sequences += other.sequences;
        self.red += other.red;
        self.blue += other.blue;
        self.nonnegative += other.nonnegative;
        for (a, b) in self.red_windows.iter_mut().zip(&other.red_windows) {
            *a += b;
        }
        for (a, b) in self.red_runs.iter_mut().zip(&other.red_runs) {
            *a += b;
        }
    }
}

fn tally_outcomes(n: u32) -> Result<Vec<HeadTally>> {
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::ResourceLimit(format!(
            "exact enumeration is limited to n <= {MAX_ENUMERATION_LEN}, got {n}"
        )));
    }
    let len = n as usize;
    let total: u64 = 1 << n;
    let chunk = 1u64 << n.saturating_sub(6).min(14);
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let partials: Vec<Vec<HeadTally>> = starts
        .par_iter()
        .map(|&start| {
            let mut tallies = vec![HeadTally::new(len); len + 1];
            let mut outcomes = vec![Toss::Tail; len];
            for mask in start..(start + chunk).min(total) {
                for (i, o) in outcomes.iter_mut().enumerate() {
                    *o = if mask >> i & 1 == 1 {
                        Toss::Head
                    } else {
                        Toss::Tail
                    };
                }
                let seq = TossSequence::from_outcomes(outcomes.clone());
                let t = &mut tallies[mask.count_ones() as usize];
                tally_one(&seq, t);
            }
            tallies
        })
        .collect();
    let mut tallies = vec![HeadTally::new(len); len + 1];
    for part in &partials {
        for (a, b) in tallies.iter_mut().zip(part) {
            a.absorb(b);
        }
    }
    Ok(tallies)
}

fn tally_one(seq: &TossSequence, t: &mut HeadTally) {
    t.sequences += 1;
    let walk = walk_path(seq);
    if walk.deltas.iter().all(|&d| d >= 0) {
        t.nonnegative += 1;
    }
    let coloring = color_heads(seq);
    let heads: Vec<bool> = coloring
        .labels
        .iter()
        .filter(|&&c| c != Color::NotHead)
        .map(|&c| c == Color::Red)
        .collect();
    let red = heads.iter().filter(|&&r| r).count();
    t.red += red as u64;
    t.blue += (heads.len() - red) as u64;
    let mut run = 0usize;
    for (j, &is_red) in heads.iter().enumerate() {
        if is_red {
            run += 1;
            // Every window ending here with length <= run is all red.
            for k in 1..=run {
                t.red_windows[k - 1] += 1;
            }
        } else {
            run = 0;
        }
        let ends = is_red && heads.get(j + 1).map_or(true, |&next| !next);
        if ends {
            t.red_runs[run - 1] += 1;
        }
    }
}

/// Exact expectations over all `2^n` sequences, in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub n: u32,
    pub p: f64,
    pub expected_red: f64,
    pub expected_blue: f64,
    /// `c_{n,p}`: probability that `Δ_i ≥ 0` for every `i ≤ n`.
    pub survival: f64,
    /// `red_windows[k - 1]`: expected number of windows of `k` consecutive
    /// heads that are all red (one per starting head).
    pub red_windows: Vec<f64>,
    /// `red_runs[k - 1]`: expected number of maximal red runs of length `k`.
    pub red_runs: Vec<f64>,
}

impl ExactDistribution {
    /// Expected red `k`-windows per toss, `E_{k,n} / n`.
    pub fn red_window_density(&self, k: usize) -> f64 {
        self.red_windows
            .get(k.wrapping_sub(1))
            .copied()
            .unwrap_or(0.0)
            / f64::from(self.n)
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Enumerates all `2^n` outcome sequences (`n <= 24`) and aggregates the
/// coloring statistics, weighting each sequence by `p^h (1 − p)^(n − h)`.
pub fn enumerate_exact(n: u32, p: f64) -> Result<ExactDistribution> {
    check_head_probability(p)?;
    let tallies = tally_outcomes(n)?;
    let weights: Vec<f64> = (0..=n)
        .map(|h| p.powi(h as i32) * (1.0 - p).powi((n - h) as i32))
        .collect();
    let expect = |f: &dyn Fn(&HeadTally) -> u64| {
        compensated_sum(tallies.iter().zip(&weights).map(|(t, w)| f(t) as f64 * w))
    };
    let len = n as usize;
    Ok(ExactDistribution {
        n,
        p,
        expected_red: expect(&|t| t.red),
        expected_blue: expect(&|t| t.blue),
        survival: expect(&|t| t.nonnegative),
        red_windows: (0..len).map(|k| expect(&|t| t.red_windows[k])).collect(),
        red_runs: (0..len).map(|k| expect(&|t| t.red_runs[k])).collect(),
    })
}

/// Exact rational counterpart of [`ExactDistribution`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRationalDistribution {
    pub n: u32,
    pub p: BigRational,
    pub expected_red: BigRational,
    pub expected_blue: BigRational,
    pub survival: BigRational,
    pub red_windows: Vec<BigRational>,
    pub red_runs: Vec<BigRational>,
}

/// Enumeration in exact rational arithmetic; `p` must lie in `(1/2, 1]`.
pub fn enumerate_exact_rational(n: u32, p: Ratio<u64>) -> Result<ExactRationalDistribution> {
    let half = Ratio::new(1u64, 2);
    if p <= half || p > Ratio::from_integer(1) {
        return Err(Error::InvalidArgument(format!(
            "head probability must lie in (1/2, 1], got {p}"
        )));
    }
    let tallies = tally_outcomes(n)?;
    let p = BigRational::new(BigInt::from(*p.numer()), BigInt::from(*p.denom()));
    let q = BigRational::one() - &p;
    let weights: Vec<BigRational> = (0..=n)
        .map(|h| {
            num_traits::pow(p.clone(), h as usize) * num_traits::pow(q.clone(), (n - h) as usize)
        })
        .collect();
    let expect = |f: &dyn Fn(&HeadTally) -> u64| {
        tallies
            .iter()
            .zip(&weights)
            .fold(BigRational::zero(), |acc, (t, w)| {
                acc + w * BigRational::from_integer(f(t).into())
            })
    };
    let len = n as usize;
    Ok(ExactRationalDistribution {
        n,
        expected_red: expect(&|t| t.red),
        expected_blue: expect(&|t| t.blue),
        survival: expect(&|t| t.nonnegative),
        red_windows: (0..len).map(|k| expect(&|t| t.red_windows[k])).collect(),
        red_runs: (0..len).map(|k| expect(&|t| t.red_runs[k])).collect(),
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "HTHHTHHHTHTHHTHH";

    fn colors(c: &Coloring) -> String {
        c.labels().iter().map(|c| c.symbol()).collect()
    }

    #[test]
    fn walk_examples() {
        let w = walk_path(&TossSequence::parse("HTHH").unwrap());
        assert_eq!(w.deltas(), &[1, 0, 1, 2]);
        let w = walk_path(&TossSequence::parse("TTT").unwrap());
        assert_eq!(w.deltas(), &[-1, -2, -3]);
        let w = walk_path(&TossSequence::parse(TABLE).unwrap());
        assert_eq!(
            w.deltas(),
            &[1, 0, 1, 2, 1, 2, 3, 4, 3, 4, 3, 4, 5, 4, 5, 6]
        );
    }

    #[test]
    fn table_coloring() {
        let c = color_heads(&TossSequence::parse(TABLE).unwrap());
        assert_eq!(colors(&c), "B-RB-RRB-B-RB-RR");
    }

    #[test]
    fn trivial_colorings() {
        assert_eq!(
            colors(&color_heads(&TossSequence::parse("HHHH").unwrap())),
            "RRRR"
        );
        assert_eq!(
            colors(&color_heads(&TossSequence::parse("H").unwrap())),
            "R"
        );
        assert_eq!(colors(&color_heads(&TossSequence::parse("").unwrap())), "");
        // A head at level 0 after an initial tail is red too.
        assert_eq!(
            colors(&color_heads(&TossSequence::parse("TH").unwrap())),
            "-R"
        );
    }

    #[test]
    fn censored_examples() {
        let table = TossSequence::parse(TABLE).unwrap();
        assert_eq!(colors(&color_heads_censored(&table, 3)), "B-RB-RRB-B-CB-CC");
        let four = TossSequence::parse("HHHH").unwrap();
        assert_eq!(colors(&color_heads_censored(&four, 0)), "RRRC");
        for guard in 0..6 {
            let all = TossSequence::parse("HHHHHHHHHH").unwrap();
            let c = color_heads_censored(&all, guard);
            let censored = c.count(Color::Censored);
            assert_eq!(censored, (guard as usize).max(1));
            assert!(c.labels()[..10 - censored].iter().all(|&c| c == Color::Red));
        }
    }

    #[test]
    fn head_stream_of_table() {
        let c = color_heads(&TossSequence::parse(TABLE).unwrap());
        let s = c.head_stream();
        let text: String = s.labels().iter().map(|l| l.symbol()).collect();
        assert_eq!(text, "BRBRRBBRBRR");
        assert_eq!(s.positions().unwrap()[3], 6);

        let c = color_heads_censored(&TossSequence::parse(TABLE).unwrap(), 3);
        let s = c.head_stream();
        assert_eq!(s.len(), 7);
        assert_eq!(s.censored_suffix(), 4);
    }

    #[test]
    fn generation() {
        assert!(generate_tosses(0, 2.0 / 3.0, 1).unwrap().is_empty());
        assert_eq!(generate_tosses(5, 1.0, 1).unwrap().to_string(), "HHHHH");
        assert!(generate_tosses(5, 0.5, 1).is_err());
        assert!(generate_tosses(5, 1.01, 1).is_err());
        let a = generate_tosses(1000, 0.7, 99).unwrap();
        assert_eq!(a, generate_tosses(1000, 0.7, 99).unwrap());
        assert_ne!(a, generate_tosses(1000, 0.7, 100).unwrap());
    }

    #[test]
    fn transcript_roundtrip() {
        let seq = TossSequence::parse(TABLE).unwrap();
        let coloring = color_heads(&seq);
        let mut buf = Vec::new();
        write_transcript(&mut buf, &seq, &coloring).unwrap();
        let rows = read_transcript(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 16);
        assert_eq!(
            rows[15],
            TranscriptRow {
                index: 16,
                toss: Toss::Head,
                delta: 6,
                color: Color::Red
            }
        );
        assert!(read_transcript("nonsense\n".as_bytes()).is_err());
    }

    #[test]
    fn enumeration_small_cases() {
        let d = enumerate_exact(1, 2.0 / 3.0).unwrap();
        assert!((d.survival - 2.0 / 3.0).abs() < 1e-15);
        let d = enumerate_exact(2, 2.0 / 3.0).unwrap();
        assert!((d.survival - 2.0 / 3.0).abs() < 1e-15);
        let r = enumerate_exact_rational(2, Ratio::new(2, 3)).unwrap();
        assert_eq!(r.survival, BigRational::new(2.into(), 3.into()));
        assert!(enumerate_exact(25, 0.7).is_err());
        assert!(enumerate_exact_rational(3, Ratio::new(1, 2)).is_err());
    }

    #[test]
    fn float_and_rational_enumerations_agree() {
        use num_traits::ToPrimitive;
        let f = enumerate_exact(12, 2.0 / 3.0).unwrap();
        let r = enumerate_exact_rational(12, Ratio::new(2, 3)).unwrap();
        assert!((f.expected_red - r.expected_red.to_f64().unwrap()).abs() < 1e-12);
        assert!((f.survival - r.survival.to_f64().unwrap()).abs() < 1e-14);
        for k in 0..12 {
            assert!((f.red_windows[k] - r.red_windows[k].to_f64().unwrap()).abs() < 1e-12);
        }
    }
}
