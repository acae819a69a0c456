use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use rprun_core::analytics;
use rprun_core::coin_model::{enumerate_exact, walk_path, MAX_ENUMERATION_LEN};
use rprun_core::experiments::{
    self, stream_first_occurrences, summarize_first_occurrences, synthetic_search_coloring,
    CoinTrials, CompareConfig, LongRow, PrimeExperiment, Scale,
};
use rprun_core::poisson_lab::{self, DualProcessConfig};
use rprun_core::rng::derive_seed;
use rprun_core::run_stats::{first_occurrence, run_report};
use rprun_core::sieve::{PrimeTable, DEFAULT_SEGMENT_SIZE};
use rprun_core::{FirstOccurrence, Label, LabelStream, RpParams, RunReport};

use crate::config::{Guard, Settings};
use crate::error::CliError;
use crate::output::{Cell, Header, Table};
use crate::{
    CoinsArgs, CompareArgs, Ctx, FirstRunArgs, LabelArg, PoissonArgs, PoissonMode, PredictArgs,
    Prob, RpArgs, RunsArgs, SieveArgs, Source, SourceArgs,
};

type Output = (Header, Vec<Table>);

/// Builds the streams once the config has been echoed.
type Builder = Box<dyn FnOnce() -> Result<Streams, CliError>>;

const TWO_THIRDS: f64 = 2.0 / 3.0;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_k_range(k_min: usize, k_max: usize) -> Result<(), CliError> {
    if k_min == 0 || k_min > k_max {
        return Err(usage(format!(
            "need 1 <= k-min <= k-max, got {k_min}..{k_max}"
        )));
    }
    Ok(())
}

pub fn sieve(a: SieveArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let limit = s.get("limit", a.limit, 1_000_000)?;
    let segment = s.get("segment_size", a.segment_size, DEFAULT_SEGMENT_SIZE)?;
    let cache = s.get("cache", a.cache, String::new())?;
    let list = s.get_flag("list", a.list)?;
    let header = ctx.header("sieve", s)?;

    let cached = if cache.is_empty() || !Path::new(&cache).exists() {
        None
    } else {
        Some(PrimeTable::load(&cache)?).filter(|t| t.limit() == limit)
    };
    let table = match cached {
        Some(t) => t,
        None => {
            let t = PrimeTable::build(limit, segment)?;
            if !cache.is_empty() {
                t.save(&cache)?;
            }
            t
        }
    };
    let largest = table.nth_prime(table.total()).ok();
    let mut tables = vec![Table::summary(
        "sieve",
        vec![
            ("limit", limit.into()),
            ("prime_count", table.total().into()),
            ("largest_prime", largest.into()),
            ("heap_bytes", table.heap_bytes().into()),
        ],
    )];
    if list {
        let mut t = Table::new("primes", &["p"]);
        for p in table.primes() {
            t.push(vec![p.into()]);
        }
        tables.push(t);
    }
    Ok((header, tables))
}

pub fn rp(a: RpArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let limit = s.get("limit", a.limit, 1000)?;
    let c = s.get("c", a.c, RpParams::ordinary())?;
    let guard_factor = s.get(
        "guard_factor",
        a.guard_factor,
        rprun_core::ramanujan::DEFAULT_GUARD_FACTOR,
    )?;
    let header = ctx.header("rp", s)?;
    if limit < 2 {
        return Err(usage(format!("limit must be at least 2, got {limit}")));
    }
    let params = c.with_guard_factor(guard_factor)?;
    let exp = PrimeExperiment::covering(limit, &params)?;
    let upto = limit.min(exp.rp.safe_limit());
    if upto < limit {
        eprintln!("rprun: warning: classification certified only up to {upto}");
    }

    let mut values = Table::new("rp_values", &["n", "R_n"]);
    for (i, &r) in exp
        .rp
        .values()
        .iter()
        .take_while(|&&r| r <= upto)
        .enumerate()
    {
        values.push(vec![(i + 1).into(), r.into()]);
    }
    let mut classes = Table::new("rp_classification", &["p", "is_rp"]);
    let positions = exp.stream.positions().expect("prime stream has positions");
    for (&p, &l) in positions
        .iter()
        .zip(exp.stream.labels())
        .take_while(|(&p, _)| p <= upto)
    {
        classes.push(vec![p.into(), u64::from(l == Label::Red).into()]);
    }
    let primes = classes.rows.len();
    let rps = values.rows.len();
    let summary = Table::summary(
        "rp_summary",
        vec![
            ("limit", limit.into()),
            ("sieve_limit", exp.table.limit().into()),
            ("safe_limit", exp.rp.safe_limit().into()),
            ("classified_to", upto.into()),
            ("prime_count", primes.into()),
            ("rp_count", rps.into()),
            (
                "rp_fraction",
                if primes > 0 {
                    rps as f64 / primes as f64
                } else {
                    f64::NAN
                }
                .into(),
            ),
        ],
    );
    Ok((header, vec![values, classes, summary]))
}

pub fn coins(a: CoinsArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let n = s.get("n", a.n, 10_000)?;
    let p = s.get("p", a.p, Prob(TWO_THIRDS))?.0;
    let guard = s.get("guard", a.guard, Guard(None))?.0;
    let trials = s.get("trials", a.trials, 1)?;
    let transcript = s.get_flag("transcript", a.transcript)?;
    let header = ctx.header("coins", s)?;

    let cfg = CoinTrials {
        n_tosses: n,
        p,
        guard,
        trials,
        master_seed: ctx.seed,
    };
    let rows = cfg.map(|t, c| {
        let r = run_report(&c.head_stream());
        vec![
            Cell::from(t),
            c.count(rprun_core::Color::Red).into(),
            c.count(rprun_core::Color::Blue).into(),
            c.count(rprun_core::Color::Censored).into(),
            c.red_fraction().into(),
            r.longest_len(Label::Red).into(),
            r.longest_len(Label::Blue).into(),
        ]
    })?;
    let mut table = Table::new(
        "coins",
        &[
            "trial",
            "red",
            "blue",
            "censored",
            "red_fraction",
            "longest_red",
            "longest_blue",
        ],
    );
    rows.into_iter().for_each(|r| table.push(r));
    let mut tables = vec![table];
    if transcript {
        let tosses = cfg.tosses(0)?;
        let coloring = cfg.coloring(0)?;
        let walk = walk_path(&tosses);
        let mut t = Table::new("transcript", &["index", "toss", "delta", "color"]);
        for (i, ((toss, d), col)) in tosses
            .outcomes()
            .iter()
            .zip(walk.deltas())
            .zip(coloring.labels())
            .enumerate()
        {
            t.push(vec![
                (i + 1).into(),
                toss.symbol().to_string().into(),
                (*d).into(),
                col.symbol().to_string().into(),
            ]);
        }
        tables.push(t);
    }
    Ok((header, tables))
}

pub fn poisson(a: PoissonArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let mode = s.get_enum("mode", a.mode, PoissonMode::Dual)?;
    let ratio = s.get("ratio", a.ratio, 2.0)?;
    let intensity = s.get("intensity", a.intensity, 1.0)?;
    let horizon = s.get("horizon", a.horizon, 1000.0)?;
    let x0 = s.get("x0", a.x0, 1e6)?;
    let length = s.get("length", a.length, 1000)?;
    let x_end = s.get("x_end", a.x_end, 2e6)?;
    let header = ctx.header("poisson", s)?;

    let events_table = |stream: poisson_lab::EventStream| {
        let mut t = Table::new("events", &["t", "tag"]);
        for e in stream.events() {
            t.push(vec![e.t.into(), e.tag.symbol().to_string().into()]);
        }
        t
    };
    let table = match mode {
        PoissonMode::Dual => {
            let cfg = DualProcessConfig {
                base_intensity: intensity,
                ratio,
                horizon,
                seed: ctx.seed,
            };
            events_table(poisson_lab::simulate_dual(&cfg)?)
        }
        PoissonMode::Synthetic => {
            let mut t = Table::new("positions", &["position"]);
            for x in poisson_lab::synthetic_prime_stream(x0, length, ctx.seed)? {
                t.push(vec![x.into()]);
            }
            t
        }
        PoissonMode::Paired => events_table(poisson_lab::paired_search(x0, length, ctx.seed)?),
        PoissonMode::Coupled => {
            if x_end <= x0 {
                return Err(usage(format!("x-end must exceed x0, got {x_end} <= {x0}")));
            }
            events_table(poisson_lab::coupled_half_search(x0, x_end, ctx.seed)?)
        }
    };
    Ok((header, vec![table]))
}

/// A resolved stream source.
enum Streams {
    Primes(Box<PrimeExperiment>),
    Coins(CoinTrials),
    Poisson {
        x0: f64,
        n: usize,
        guard: Option<u32>,
        trials: u64,
        seed: u64,
    },
}

impl Streams {
    fn resolve(a: SourceArgs, s: &mut Settings, seed: u64) -> Result<(Source, Builder), CliError> {
        let source = s.get_enum("source", a.source, Source::Primes)?;
        let limit = s.get("limit", a.limit, 1_000_000)?;
        let c = s.get("c", a.c, RpParams::ordinary())?;
        let n = s.get("n", a.n, 65_536)?;
        let p = s.get("p", a.p, Prob(TWO_THIRDS))?.0;
        let guard = s
            .get(
                "guard",
                a.guard,
                Guard(Some(rprun_core::coin_model::DEFAULT_GUARD)),
            )?
            .0;
        let trials = s.get("trials", a.trials, 200)?;
        let x0 = s.get("x0", a.x0, 1e12)?;
        let build: Builder = match source {
            Source::Primes => Box::new(move || {
                if limit < 2 {
                    return Err(usage(format!("limit must be at least 2, got {limit}")));
                }
                Ok(Streams::Primes(Box::new(PrimeExperiment::covering(
                    limit, &c,
                )?)))
            }),
            Source::Coins => Box::new(move || {
                let cfg = CoinTrials {
                    n_tosses: n,
                    p,
                    guard,
                    trials,
                    master_seed: seed,
                };
                cfg.validate()?;
                Ok(Streams::Coins(cfg))
            }),
            Source::Poisson => Box::new(move || {
                Ok(Streams::Poisson {
                    x0,
                    n,
                    guard,
                    trials,
                    seed,
                })
            }),
        };
        Ok((source, build))
    }

    /// Applies `f` to every trial's head stream, in trial order.
    fn map<T: Send>(&self, f: impl Fn(&LabelStream) -> T + Sync) -> Result<Vec<T>, CliError> {
        match self {
            Streams::Primes(e) => Ok(vec![f(&e.stream)]),
            Streams::Coins(cfg) => Ok(cfg.map(|_, c| f(&c.head_stream()))?),
            Streams::Poisson {
                x0,
                n,
                guard,
                trials,
                seed,
            } => (0..*trials)
                .into_par_iter()
                .map(|t| {
                    let c = synthetic_search_coloring(*x0, *n, *guard, derive_seed(*seed, t))?;
                    Ok(f(&c.head_stream()))
                })
                .collect(),
        }
    }
}

fn source_name(source: Source) -> &'static str {
    match source {
        Source::Primes => "primes",
        Source::Coins => "coins",
        Source::Poisson => "poisson",
    }
}

fn position_or_inf(v: Option<u64>) -> f64 {
    v.map_or(f64::INFINITY, |v| v as f64)
}

pub fn runs(a: RunsArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let (source, build) = Streams::resolve(a.source, &mut s, ctx.seed)?;
    let k_min = s.get("k_min", a.k_min, 1)?;
    let k_max = s.get("k_max", a.k_max, 20)?;
    let header = ctx.header("runs", s)?;
    check_k_range(k_min, k_max)?;
    let streams = build()?;
    let name = source_name(source);

    let per_trial: Vec<(Vec<FirstOccurrence>, RunReport, usize)> = streams.map(|st| {
        (
            stream_first_occurrences(st, k_max),
            run_report(st),
            st.len(),
        )
    })?;
    let mut rows = Vec::new();
    let labels = [Label::Red, Label::Blue];
    if let Streams::Primes(e) = &streams {
        let (first, report, len) = &per_trial[0];
        rows.push(LongRow::new(None, name, None, "stream_length", *len as f64));
        rows.push(LongRow::new(
            None,
            name,
            None,
            "rp_fraction",
            e.rp_fraction(e.rp.safe_limit()),
        ));
        for label in labels {
            rows.push(LongRow::new(
                None,
                name,
                Some(label),
                "longest_run",
                report.longest_len(label) as f64,
            ));
        }
        for k in k_min..=k_max {
            for label in labels {
                let f = first
                    .iter()
                    .find(|f| f.k == k && f.label == label)
                    .expect("k in range");
                let idx = f.index.map(|i| i as u64);
                rows.push(LongRow::new(
                    Some(k),
                    name,
                    Some(label),
                    "first_index",
                    position_or_inf(idx),
                ));
                rows.push(LongRow::new(
                    Some(k),
                    name,
                    Some(label),
                    "first_position",
                    position_or_inf(f.position),
                ));
                rows.push(LongRow::new(
                    Some(k),
                    name,
                    Some(label),
                    "complete_position",
                    position_or_inf(f.complete_position),
                ));
            }
        }
    } else {
        let firsts: Vec<Vec<FirstOccurrence>> = per_trial.iter().map(|t| t.0.clone()).collect();
        rows.push(LongRow::new(
            None,
            name,
            None,
            "trials",
            per_trial.len() as f64,
        ));
        for label in labels {
            let longest: Vec<f64> = per_trial
                .iter()
                .map(|t| t.1.longest_len(label) as f64)
                .collect();
            let q = |x| rprun_core::stats::quantile(&longest, x).unwrap_or(f64::NAN);
            rows.push(LongRow::new(
                None,
                name,
                Some(label),
                "q1_longest_run",
                q(0.25),
            ));
            rows.push(LongRow::new(
                None,
                name,
                Some(label),
                "median_longest_run",
                q(0.5),
            ));
            rows.push(LongRow::new(
                None,
                name,
                Some(label),
                "q3_longest_run",
                q(0.75),
            ));
        }
        for k in k_min..=k_max {
            for label in labels {
                let sm = summarize_first_occurrences(&firsts, label, Scale::Position)[k - 1];
                rows.push(LongRow::new(
                    Some(k),
                    name,
                    Some(label),
                    "found",
                    sm.found as f64,
                ));
                rows.push(LongRow::new(
                    Some(k),
                    name,
                    Some(label),
                    "q1_first_position",
                    sm.q1,
                ));
                rows.push(LongRow::new(
                    Some(k),
                    name,
                    Some(label),
                    "median_first_position",
                    sm.median,
                ));
                rows.push(LongRow::new(
                    Some(k),
                    name,
                    Some(label),
                    "q3_first_position",
                    sm.q3,
                ));
            }
            rows.push(LongRow::new(
                Some(k),
                name,
                None,
                "blue_before_red_fraction",
                experiments::blue_before_red_fraction(&firsts, k),
            ));
        }
    }

    let mut hist: BTreeMap<(Label, usize), u64> = BTreeMap::new();
    for (_, report, _) in &per_trial {
        for label in labels {
            for (&len, &count) in report.histogram(label) {
                *hist.entry((label, len)).or_default() += count;
            }
        }
    }
    let mut histogram = Table::new("histogram", &["label", "run_length", "count"]);
    for ((label, len), count) in hist {
        histogram.push(vec![label.name().into(), len.into(), count.into()]);
    }
    Ok((header, vec![Table::long("runs", &rows), histogram]))
}

pub fn first_run(a: FirstRunArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let (_, build) = Streams::resolve(a.source, &mut s, ctx.seed)?;
    let k = s.get("k", a.k, 10)?;
    let label = match s.get_enum("label", a.label, LabelArg::Blue)? {
        LabelArg::Red => Label::Red,
        LabelArg::Blue => Label::Blue,
    };
    let header = ctx.header("first-run", s)?;
    if k == 0 {
        return Err(usage("k must be at least 1"));
    }
    let streams = build()?;
    let found = streams.map(|st| first_occurrence(st, label, k).expect("k >= 1"))?;
    let mut t = Table::new(
        "first_run",
        &[
            "trial",
            "k",
            "label",
            "first_index",
            "first_position",
            "complete_position",
        ],
    );
    for (trial, f) in found.into_iter().enumerate() {
        t.push(vec![
            trial.into(),
            k.into(),
            label.name().into(),
            f.index.into(),
            f.position.into(),
            f.complete_position.into(),
        ]);
    }
    Ok((header, vec![t]))
}

pub fn predict(a: PredictArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let p = s.get("p", a.p, Prob(TWO_THIRDS))?.0;
    let n = s.get("n", a.n, 1e6)?;
    let k_min = s.get("k_min", a.k_min, 1)?;
    let k_max = s.get("k_max", a.k_max, 10)?;
    let header = ctx.header("predict", s)?;
    check_k_range(k_min, k_max)?;
    let at_two_thirds = (p - TWO_THIRDS).abs() < 1e-12;

    let src = "analytic";
    let mut rows = vec![LongRow::new(
        None,
        src,
        Some(Label::Red),
        "survival_probability",
        analytics::survival_probability(p)?,
    )];
    let longest = match analytics::expected_longest_red_run(p, n) {
        Ok(v) => v,
        Err(rprun_core::Error::InfinitePrediction(_)) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    rows.push(LongRow::new(
        None,
        src,
        Some(Label::Red),
        "expected_longest_run",
        longest,
    ));
    if at_two_thirds {
        rows.push(LongRow::new(
            None,
            src,
            Some(Label::Blue),
            "longest_run_lower_bound",
            analytics::blue_run_threshold(p, n)?,
        ));
    }
    let exact = (n.fract() == 0.0 && n >= 1.0 && n <= f64::from(MAX_ENUMERATION_LEN))
        .then(|| enumerate_exact(n as u32, p))
        .transpose()?;
    if let Some(e) = &exact {
        rows.push(LongRow::new(None, "exact", None, "survival", e.survival));
        rows.push(LongRow::new(
            None,
            "exact",
            Some(Label::Red),
            "expected_count",
            e.expected_red,
        ));
        rows.push(LongRow::new(
            None,
            "exact",
            Some(Label::Blue),
            "expected_count",
            e.expected_blue,
        ));
    }
    for k in k_min..=k_max {
        let (lo, hi) = analytics::red_run_density_bounds(p, k as u32)?;
        rows.push(LongRow::new(
            Some(k),
            src,
            Some(Label::Red),
            "run_density_lower",
            lo,
        ));
        rows.push(LongRow::new(
            Some(k),
            src,
            Some(Label::Red),
            "run_density_upper",
            hi,
        ));
        rows.push(LongRow::new(
            Some(k),
            src,
            Some(Label::Red),
            "order_of_growth",
            (1.0 / p).powi(k as i32),
        ));
        if let Some(e) = &exact {
            rows.push(LongRow::new(
                Some(k),
                "exact",
                Some(Label::Red),
                "run_density",
                e.red_window_density(k),
            ));
        }
        if at_two_thirds {
            rows.push(LongRow::new(
                Some(k),
                src,
                Some(Label::Blue),
                "order_of_growth",
                2f64.powf(k as f64 / 2.0),
            ));
            rows.push(LongRow::new(
                Some(k),
                src,
                Some(Label::Blue),
                "q_tail",
                analytics::q_tail(k as u32)?,
            ));
            rows.push(LongRow::new(
                Some(k),
                src,
                Some(Label::Blue),
                "q_tail_leading_term",
                analytics::q_tail_leading_term(k as u32)?,
            ));
            rows.push(LongRow::new(
                Some(k),
                src,
                Some(Label::Blue),
                "q_tail_asymptotic",
                analytics::q_tail_asymptotic(k as u32),
            ));
        }
    }
    Ok((header, vec![Table::long("predict", &rows)]))
}

pub fn compare(a: CompareArgs, mut s: Settings, ctx: &Ctx) -> Result<Output, CliError> {
    let k_min = s.get("k_min", a.k_min, 1)?;
    let k_max = s.get("k_max", a.k_max, 12)?;
    let trials = s.get("trials", a.trials, 200)?;
    let limit = s.get("limit", a.limit, 1_000_000)?;
    let n = s.get("n", a.n, 65_536)?;
    let c = s.get("c", a.c, RpParams::ordinary())?;
    let guard = s
        .get(
            "guard",
            a.guard,
            Guard(Some(rprun_core::coin_model::DEFAULT_GUARD)),
        )?
        .0;
    let header = ctx.header("compare", s)?;
    check_k_range(k_min, k_max)?;
    if limit < 2 {
        return Err(usage(format!("limit must be at least 2, got {limit}")));
    }
    let coins = CoinTrials {
        n_tosses: n,
        p: c.model_p(),
        guard,
        trials,
        master_seed: ctx.seed,
    };
    let cfg = CompareConfig {
        k_min,
        k_max,
        trials,
        limit,
        coins,
    };
    let rows = experiments::compare(&cfg, &c)?;
    Ok((header, vec![Table::long("compare", &rows)]))
}
