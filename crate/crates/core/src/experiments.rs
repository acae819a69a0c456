//! Multi-trial experiments shared by the CLI, the benches and the tests.
//!
//! Trials run in parallel but every trial owns a random stream derived from
//! `(master_seed, trial_index)`, and results are collected in trial order,
//! so outputs do not depend on the number of threads.

use rand::distributions::{Bernoulli, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics;
use crate::coin_model::{
    check_head_probability, color_heads, color_heads_censored, generate_tosses, Coloring,
    TossSequence,
};
use crate::error::{Error, Result};
use crate::poisson_lab::paired_search_tags;
use crate::ramanujan::{classify_primes, compute_ramanujan_table, RamanujanTable, RpParams};
use crate::rng::{derive_seed, trial_rng};
use crate::run_stats::{
    first_occurrences, run_report, FirstOccurrence, Label, LabelStream, RunReport,
};
use crate::sieve::PrimeTable;
use crate::stats::quantile;

/// Parameters of a batch of coin-model trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoinTrials {
    pub n_tosses: usize,
    pub p: f64,
    /// `None` colors relative to the horizon; `Some(g)` censors with guard `g`.
    pub guard: Option<u32>,
    pub trials: u64,
    pub master_seed: u64,
}

impl CoinTrials {
    pub fn validate(&self) -> Result<()> {
        check_head_probability(self.p)?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("need at least one trial".into()));
        }
        Ok(())
    }

    pub fn tosses(&self, trial: u64) -> Result<TossSequence> {
        generate_tosses(self.n_tosses, self.p, derive_seed(self.master_seed, trial))
    }

    pub fn coloring(&self, trial: u64) -> Result<Coloring> {
        let tosses = self.tosses(trial)?;
        Ok(match self.guard {
            None => color_heads(&tosses),
            Some(g) => color_heads_censored(&tosses, g),
        })
    }

    /// Runs `f` on every trial's coloring, in trial order.
    pub fn map<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &Coloring) -> T + Sync,
    {
        self.validate()?;
        (0..self.trials)
            .into_par_iter()
            .map(|t| self.coloring(t).map(|c| f(t, &c)))
            .collect()
    }
}

/// Red fraction among heads, per trial.
pub fn red_fractions(cfg: &CoinTrials) -> Result<Vec<f64>> {
    cfg.map(|_, c| c.red_fraction())
}

/// Longest red and blue runs among heads, per trial.
pub fn longest_runs(cfg: &CoinTrials) -> Result<Vec<(usize, usize)>> {
    cfg.map(|_, c| {
        let r = run_report(&c.head_stream());
        (r.longest_len(Label::Red), r.longest_len(Label::Blue))
    })
}

/// Monte Carlo estimate of `P(Δ_i ≥ 0 for all i ≤ n)`. Each trial stops at
/// the first negative step, so it does not materialize the sequence.
pub fn survival_monte_carlo(n: usize, p: f64, trials: u64, master_seed: u64) -> Result<f64> {
    check_head_probability(p)?;
    let coin = Bernoulli::new(p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let survived: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(master_seed, t);
            let mut level = 0i64;
            for _ in 0..n {
                level += if coin.sample(&mut rng) { 1 } else { -1 };
                if level < 0 {
                    return 0;
                }
            }
            1
        })
        .sum();
    Ok(survived as f64 / trials as f64)
}

/// Windows of `k` consecutive all-red heads per toss, for `k = 1..=k_max`.
pub fn red_window_density(coloring: &Coloring, k_max: usize) -> Vec<f64> {
    window_density(coloring, Label::Red, k_max)
}

/// Windows of `k` consecutive heads all carrying `label`, per toss.
pub fn window_density(coloring: &Coloring, label: Label, k_max: usize) -> Vec<f64> {
    let n = coloring.labels().len() as f64;
    let stream = coloring.head_stream();
    let mut counts = vec![0u64; k_max];
    let mut run = 0usize;
    for &l in stream.labels() {
        if l == label {
            run += 1;
            for c in counts.iter_mut().take(run.min(k_max)) {
                *c += 1;
            }
        } else {
            run = 0;
        }
    }
    counts.into_iter().map(|c| c as f64 / n).collect()
}

/// Simulation fit of the blue-run lower bound `F_{2k,N} / N ≳ u · q_{2k}`
/// at `p = 2/3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlueBoundFit {
    /// `(k, mean blue 2k-windows per toss)` for `k = 1..=k_max`.
    pub densities: Vec<(usize, f64)>,
    /// Largest `u` with `density ≥ u · q_{2k}` at every observed `k`.
    pub u: f64,
    /// Growth base of the density per unit run length, `density ≈ C · c1^(2k)`.
    pub c1: Option<f64>,
}

pub fn fit_blue_bound(cfg: &CoinTrials, k_max: usize) -> Result<BlueBoundFit> {
    if (cfg.p - 2.0 / 3.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "the blue-run bound is only available at p = 2/3, got {}",
            cfg.p
        )));
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let per_trial = cfg.map(|_, c| window_density(c, Label::Blue, 2 * k_max))?;
    let trials = per_trial.len() as f64;
    let densities: Vec<(usize, f64)> = (1..=k_max)
        .map(|k| {
            (
                k,
                per_trial.iter().map(|d| d[2 * k - 1]).sum::<f64>() / trials,
            )
        })
        .collect();
    let mut u = f64::INFINITY;
    for &(k, d) in densities.iter().filter(|(_, d)| *d > 0.0) {
        u = u.min(d / analytics::q_tail(k as u32)?);
    }
    if !u.is_finite() {
        return Err(Error::InsufficientData(
            "no blue runs of even length observed".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = densities
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|&(k, d)| (2.0 * k as f64, d))
        .collect();
    let c1 = crate::run_stats::scaling_fit(&pts).ok().map(|f| f.base());
    Ok(BlueBoundFit { densities, u, c1 })
}

/// Which ordinal is used to locate runs when comparing streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 1-based index in the labeled stream (n-th head, n-th prime).
    Index,
    /// Underlying position (toss number, prime value).
    Position,
}

fn locate(f: &FirstOccurrence, scale: Scale) -> f64 {
    let v = match scale {
        Scale::Index => f.index.map(|i| i as u64),
        Scale::Position => f.position,
    };
    v.map_or(f64::INFINITY, |v| v as f64)
}

/// Quartiles of first-occurrence locations over trials; absent runs count
/// as `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOccurrenceSummary {
    pub k: usize,
    pub label: Label,
    pub trials: usize,
    pub found: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn summarize_first_occurrences(
    per_trial: &[Vec<FirstOccurrence>],
    label: Label,
    scale: Scale,
) -> Vec<FirstOccurrenceSummary> {
    let k_max = per_trial.iter().flatten().map(|f| f.k).max().unwrap_or(0);
    (1..=k_max)
        .map(|k| {
            let locs: Vec<f64> = per_trial
                .iter()
                .filter_map(|rows| rows.iter().find(|f| f.k == k && f.label == label))
                .map(|f| locate(f, scale))
                .collect();
            FirstOccurrenceSummary {
                k,
                label,
                trials: locs.len(),
                found: locs.iter().filter(|v| v.is_finite()).count(),
                q1: quantile(&locs, 0.25).unwrap_or(f64::NAN),
                median: quantile(&locs, 0.5).unwrap_or(f64::NAN),
                q3: quantile(&locs, 0.75).unwrap_or(f64::NAN),
            }
        })
        .collect()
}

/// First occurrences of red and blue runs of length `1..=k_max` per trial,
/// red rows first.
pub fn coin_first_occurrences(cfg: &CoinTrials, k_max: usize) -> Result<Vec<Vec<FirstOccurrence>>> {
    cfg.map(|_, c| stream_first_occurrences(&c.head_stream(), k_max))
}

pub fn stream_first_occurrences(stream: &LabelStream, k_max: usize) -> Vec<FirstOccurrence> {
    let mut rows = first_occurrences(stream, Label::Red, k_max);
    rows.extend(first_occurrences(stream, Label::Blue, k_max));
    rows
}

/// Fraction of trials in which a blue run of length `k` starts strictly
/// before a red one (by toss position). A missing run counts as `+inf`;
/// trials missing both are counted as not earlier.
pub fn blue_before_red_fraction(per_trial: &[Vec<FirstOccurrence>], k: usize) -> f64 {
    let earlier = per_trial
        .iter()
        .filter(|rows| {
            let find = |label| {
                rows.iter()
                    .find(|f| f.k == k && f.label == label)
                    .map(|f| locate(f, Scale::Position))
            };
            match (find(Label::Blue), find(Label::Red)) {
                (Some(b), Some(r)) => b < r,
                _ => false,
            }
        })
        .count();
    earlier as f64 / per_trial.len() as f64
}

/// Prime classification as a red (Ramanujan) / blue stream positioned at
/// the primes. Primes above the safe limit form the censored suffix.
pub fn prime_label_stream(table: &PrimeTable, rp: &RamanujanTable) -> LabelStream {
    let cls = classify_primes(table, rp);
    let labels = cls
        .iter()
        .map(|c| {
            if c.is_ramanujan {
                Label::Red
            } else {
                Label::Blue
            }
        })
        .collect();
    let positions = cls.iter().map(|c| c.prime).collect();
    let censored = table.total() - table.prime_count_unchecked(rp.safe_limit().min(table.limit()));
    LabelStream::with_positions(labels, positions)
        .expect("primes increase")
        .with_censored_suffix(censored as usize)
}

/// Everything derived from one sieve run.
#[derive(Debug, Clone)]
pub struct PrimeExperiment {
    pub table: PrimeTable,
    pub rp: RamanujanTable,
    pub stream: LabelStream,
}

impl PrimeExperiment {
    /// Sieves far enough that the classification covers `[2, classify_to]`
    /// under the guard policy (`guard_factor · classify_to`).
    pub fn covering(classify_to: u64, params: &RpParams) -> Result<Self> {
        let limit = classify_to
            .checked_mul(params.guard_factor())
            .ok_or_else(|| {
                Error::ResourceLimit(format!("sieve limit for {classify_to} overflows"))
            })?;
        Self::with_limit(limit, params)
    }

    pub fn with_limit(limit: u64, params: &RpParams) -> Result<Self> {
        let table = crate::sieve::build_prime_table(limit)?;
        let rp = compute_ramanujan_table(&table, params)?;
        let stream = prime_label_stream(&table, &rp);
        Ok(PrimeExperiment { table, rp, stream })
    }

    /// Ramanujan primes among primes up to `x` (bounded by the safe limit).
    pub fn rp_fraction(&self, x: u64) -> f64 {
        let x = x.min(self.rp.safe_limit());
        self.rp.count_le(x) as f64 / self.table.prime_count_unchecked(x) as f64
    }

    pub fn report(&self) -> RunReport {
        run_report(&self.stream)
    }
}

/// Colored tags from two independent synthetic prime searches started at
/// `x0` and `x0 / 2`.
pub fn synthetic_search_coloring(
    x0: f64,
    n_events: usize,
    guard: Option<u32>,
    seed: u64,
) -> Result<Coloring> {
    let tags = paired_search_tags(x0, n_events, seed)?;
    Ok(match guard {
        None => color_heads(&tags),
        Some(g) => color_heads_censored(&tags, g),
    })
}

/// Longest red and blue runs over synthetic-search trials.
pub fn synthetic_longest_runs(
    x0: f64,
    n_events: usize,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<(usize, usize)>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let c = synthetic_search_coloring(x0, n_events, None, derive_seed(master_seed, t))?;
            let r = run_report(&c.head_stream());
            Ok((r.longest_len(Label::Red), r.longest_len(Label::Blue)))
        })
        .collect()
}

/// One row of a long-format report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRow {
    pub k: Option<usize>,
    pub source: String,
    pub label: Option<Label>,
    pub statistic: String,
    pub value: f64,
}

impl LongRow {
    pub fn new(
        k: Option<usize>,
        source: &str,
        label: Option<Label>,
        statistic: &str,
        value: f64,
    ) -> Self {
        LongRow {
            k,
            source: source.into(),
            label,
            statistic: statistic.into(),
            value,
        }
    }
}

/// Expected number of fair coin flips until the first run of `k` heads,
/// `2^(k+1) − 2`.
pub fn fair_coin_expected_wait(k: usize) -> f64 {
    2f64.powi(k as i32 + 1) - 2.0
}

/// Settings for the headline comparison of primes, the coin model, a fair
/// coin and the closed-form orders of growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub trials: u64,
    /// Primes are classified up to this bound.
    pub limit: u64,
    pub coins: CoinTrials,
}

/// Builds the comparison table. All locations are 1-based stream indices
/// (n-th prime, n-th head) so that the sources share a scale.
pub fn compare(cfg: &CompareConfig, params: &RpParams) -> Result<Vec<LongRow>> {
    if cfg.k_min == 0 || cfg.k_min > cfg.k_max {
        return Err(Error::InvalidArgument(format!(
            "bad k range {}..={}",
            cfg.k_min, cfg.k_max
        )));
    }
    let primes = PrimeExperiment::covering(cfg.limit, params)?;
    let prime_rows = stream_first_occurrences(&primes.stream, cfg.k_max);
    let coins = CoinTrials {
        trials: cfg.trials,
        ..cfg.coins
    };
    let per_trial = coin_first_occurrences(&coins, cfg.k_max)?;
    let p = coins.p;

    let mut rows = Vec::new();
    for k in cfg.k_min..=cfg.k_max {
        for label in [Label::Red, Label::Blue] {
            let f = prime_rows
                .iter()
                .find(|f| f.k == k && f.label == label)
                .expect("k in range");
            rows.push(LongRow::new(
                Some(k),
                "primes",
                Some(label),
                "first_index",
                locate(f, Scale::Index),
            ));
            rows.push(LongRow::new(
                Some(k),
                "primes",
                Some(label),
                "first_position",
                locate(f, Scale::Position),
            ));

            let s = summarize_first_occurrences(&per_trial, label, Scale::Index)[k - 1];
            rows.push(LongRow::new(
                Some(k),
                "coin_model",
                Some(label),
                "q1_first_index",
                s.q1,
            ));
            rows.push(LongRow::new(
                Some(k),
                "coin_model",
                Some(label),
                "median_first_index",
                s.median,
            ));
            rows.push(LongRow::new(
                Some(k),
                "coin_model",
                Some(label),
                "q3_first_index",
                s.q3,
            ));
        }
        rows.push(LongRow::new(
            Some(k),
            "coin_model",
            None,
            "blue_before_red_fraction",
            blue_before_red_fraction(&per_trial, k),
        ));
        rows.push(LongRow::new(
            Some(k),
            "fair_coin",
            None,
            "expected_wait",
            fair_coin_expected_wait(k),
        ));
        rows.push(LongRow::new(
            Some(k),
            "analytic",
            Some(Label::Red),
            "order_of_growth",
            (1.0 / p).powi(k as i32),
        ));
        if (p - 2.0 / 3.0).abs() < 1e-12 {
            rows.push(LongRow::new(
                Some(k),
                "analytic",
                Some(Label::Blue),
                "order_of_growth",
                2f64.powf(k as f64 / 2.0),
            ));
        }
    }

    if (p - 2.0 / 3.0).abs() < 1e-12 {
        if let Ok(fit) = fit_blue_bound(&coins, cfg.k_max) {
            for &(k, d) in fit.densities.iter().filter(|(k, _)| *k >= cfg.k_min) {
                let q = analytics::q_tail(k as u32)?;
                rows.push(LongRow::new(
                    Some(k),
                    "coin_model",
                    Some(Label::Blue),
                    "run_density_2k",
                    d,
                ));
                rows.push(LongRow::new(
                    Some(k),
                    "analytic",
                    Some(Label::Blue),
                    "q_tail",
                    q,
                ));
                rows.push(LongRow::new(
                    Some(k),
                    "fitted",
                    Some(Label::Blue),
                    "u_times_q_tail",
                    fit.u * q,
                ));
            }
            rows.push(LongRow::new(None, "fitted", Some(Label::Blue), "u", fit.u));
            if let Some(c1) = fit.c1 {
                rows.push(LongRow::new(None, "fitted", Some(Label::Blue), "c1", c1));
            }
        }
    }

    let report = primes.report();
    let n_primes = primes.stream.len() as f64;
    rows.push(LongRow::new(
        None,
        "primes",
        Some(Label::Red),
        "longest_run",
        report.longest_len(Label::Red) as f64,
    ));
    rows.push(LongRow::new(
        None,
        "primes",
        Some(Label::Blue),
        "longest_run",
        report.longest_len(Label::Blue) as f64,
    ));
    rows.push(LongRow::new(None, "primes", None, "classified", n_primes));
    rows.push(LongRow::new(
        None,
        "primes",
        None,
        "rp_fraction",
        primes.rp_fraction(cfg.limit),
    ));
    if n_primes >= 4.0 {
        rows.push(LongRow::new(
            None,
            "fair_coin",
            None,
            "expected_longest_run",
            (n_primes / 2.0).log2(),
        ));
        if let Ok(v) = analytics::expected_longest_red_run(p, n_primes) {
            rows.push(LongRow::new(
                None,
                "analytic",
                Some(Label::Red),
                "longest_run",
                v,
            ));
        }
        if let Ok(v) = analytics::blue_run_threshold(p, n_primes) {
            rows.push(LongRow::new(
                None,
                "analytic",
                Some(Label::Blue),
                "longest_run_lower_bound",
                v,
            ));
        }
    }
    Ok(rows)
}
