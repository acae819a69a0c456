//! Run statistics over red/blue labeled streams.
//!
//! A stream is either the heads of a colored coin sequence or the primes of
//! a Ramanujan classification (red = Ramanujan prime). Runs are maximal
//! blocks of equal labels. When the stream was cut short by censoring, its
//! last run is *right-open*: its true length is unknown, so it is kept out
//! of the histograms and longest-run records unless explicitly requested.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    /// Red head, or Ramanujan prime.
    Red,
    /// Blue head, or non-Ramanujan prime.
    Blue,
}

impl Label {
    pub fn symbol(self) -> char {
        match self {
            Label::Red => 'R',
            Label::Blue => 'B',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Red => "red",
            Label::Blue => "blue",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Red => Label::Blue,
            Label::Blue => Label::Red,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelStream {
    labels: Vec<Label>,
    positions: Option<Vec<u64>>,
    censored_suffix: usize,
}

impl LabelStream {
    pub fn new(labels: Vec<Label>) -> Self {
        LabelStream {
            labels,
            positions: None,
            censored_suffix: 0,
        }
    }

    /// Positions must be strictly increasing and match the labels in length.
    pub fn with_positions(labels: Vec<Label>, positions: Vec<u64>) -> Result<Self> {
        if labels.len() != positions.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels but {} positions",
                labels.len(),
                positions.len()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "positions must be strictly increasing".into(),
            ));
        }
        Ok(LabelStream {
            labels,
            positions: Some(positions),
            censored_suffix: 0,
        })
    }

    /// Parses `R`/`B` symbols, ignoring commas and whitespace.
    pub fn from_symbols(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'R' | 'A' => Ok(Label::Red),
                'B' => Ok(Label::Blue),
                other => Err(Error::InvalidArgument(format!(
                    "unexpected label {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn with_censored_suffix(mut self, count: usize) -> Self {
        self.censored_suffix = count;
        self
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn positions(&self) -> Option<&[u64]> {
        self.positions.as_deref()
    }

    pub fn censored_suffix(&self) -> usize {
        self.censored_suffix
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn position(&self, index: usize) -> Option<u64> {
        self.positions.as_ref().map(|p| p[index])
    }

    /// Maximal runs as `(label, start, length)` with 0-based starts.
    fn runs(&self) -> impl Iterator<Item = (Label, usize, usize)> + '_ {
        let mut start = 0;
        std::iter::from_fn(move || {
            let label = *self.labels.get(start)?;
            let len = self.labels[start..]
                .iter()
                .take_while(|&&l| l == label)
                .count();
            let run = (label, start, len);
            start += len;
            Some(run)
        })
    }
}

/// A run's length and where it starts (1-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunInfo {
    pub length: usize,
    pub start_index: usize,
    pub start_position: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RunReport {
    pub longest_red: Option<RunInfo>,
    pub longest_blue: Option<RunInfo>,
    pub histogram_red: BTreeMap<usize, u64>,
    pub histogram_blue: BTreeMap<usize, u64>,
    /// The final run when the stream has a censored suffix.
    pub right_open: Option<(Label, RunInfo)>,
    pub includes_right_open: bool,
}

impl RunReport {
    pub fn longest(&self, label: Label) -> Option<RunInfo> {
        match label {
            Label::Red => self.longest_red,
            Label::Blue => self.longest_blue,
        }
    }

    pub fn longest_len(&self, label: Label) -> usize {
        self.longest(label).map_or(0, |r| r.length)
    }

    pub fn histogram(&self, label: Label) -> &BTreeMap<usize, u64> {
        match label {
            Label::Red => &self.histogram_red,
            Label::Blue => &self.histogram_blue,
        }
    }
}

/// Run report that leaves out a right-open final run.
pub fn run_report(stream: &LabelStream) -> RunReport {
    run_report_with(stream, false)
}

pub fn run_report_with(stream: &LabelStream, include_right_open: bool) -> RunReport {
    let mut report = RunReport {
        includes_right_open: include_right_open,
        ..Default::default()
    };
    let n = stream.len();
    for (label, start, length) in stream.runs() {
        let info = RunInfo {
            length,
            start_index: start + 1,
            start_position: stream.position(start),
        };
        let open = stream.censored_suffix > 0 && start + length == n;
        if open {
            report.right_open = Some((label, info));
            if !include_right_open {
                continue;
            }
        }
        let (hist, longest) = match label {
            Label::Red => (&mut report.histogram_red, &mut report.longest_red),
            Label::Blue => (&mut report.histogram_blue, &mut report.longest_blue),
        };
        *hist.entry(length).or_default() += 1;
        if longest.map_or(true, |l| length > l.length) {
            *longest = Some(info);
        }
    }
    report
}

/// Earliest run of at least `k` items with a given label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FirstOccurrence {
    pub k: usize,
    pub label: Label,
    /// 1-based index of the run's first item.
    pub index: Option<usize>,
    /// Position of the run's first item.
    pub position: Option<u64>,
    /// Position of the run's `k`-th item, where the run is first complete.
    pub complete_position: Option<u64>,
}

impl FirstOccurrence {
    pub fn is_present(&self) -> bool {
        self.index.is_some()
    }
}

pub fn first_occurrence(stream: &LabelStream, label: Label, k: usize) -> Result<FirstOccurrence> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "run length k must be at least 1".into(),
        ));
    }
    let start = stream
        .runs()
        .find(|&(l, _, len)| l == label && len >= k)
        .map(|(_, start, _)| start);
    Ok(FirstOccurrence {
        k,
        label,
        index: start.map(|s| s + 1),
        position: start.and_then(|s| stream.position(s)),
        complete_position: start.and_then(|s| stream.position(s + k - 1)),
    })
}

/// First occurrences for every `k` in `1..=k_max`, in a single pass.
pub fn first_occurrences(stream: &LabelStream, label: Label, k_max: usize) -> Vec<FirstOccurrence> {
    let mut starts: Vec<Option<usize>> = vec![None; k_max];
    let mut covered = 0;
    for (l, start, len) in stream.runs() {
        if l != label || len <= covered {
            continue;
        }
        for slot in &mut starts[covered..len.min(k_max)] {
            *slot = Some(start);
        }
        covered = len.min(k_max);
        if covered == k_max {
            break;
        }
    }
    starts
        .into_iter()
        .enumerate()
        .map(|(i, start)| FirstOccurrence {
            k: i + 1,
            label,
            index: start.map(|s| s + 1),
            position: start.and_then(|s| stream.position(s)),
            complete_position: start.and_then(|s| stream.position(s + i)),
        })
        .collect()
}

/// Least-squares fit of `ln(position)` against `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
}

impl ScalingFit {
    /// Per-step growth factor `e^slope`.
    pub fn base(&self) -> f64 {
        self.slope.exp()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

pub fn scaling_fit(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(k, pos)) = samples
        .iter()
        .find(|(_, pos)| !(pos.is_finite() && *pos > 0.0))
    {
        return Err(Error::InsufficientData(format!(
            "position at k = {k} is {pos}"
        )));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all samples share the same k".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(ScalingFit {
        slope,
        intercept,
        residuals,
        r_squared,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// `k,label,first_index,first_position,complete_position`; absent fields are empty.
pub fn write_first_occurrence_csv<W: Write>(
    out: &mut W,
    rows: &[FirstOccurrence],
) -> std::io::Result<()> {
    writeln!(out, "k,label,first_index,first_position,complete_position")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.k,
            r.label.name(),
            opt(r.index),
            opt(r.position),
            opt(r.complete_position)
        )?;
    }
    Ok(())
}

/// `label,run_length,count`.
pub fn write_histogram_csv<W: Write>(out: &mut W, report: &RunReport) -> std::io::Result<()> {
    writeln!(out, "label,run_length,count")?;
    for label in [Label::Red, Label::Blue] {
        for (len, count) in report.histogram(label) {
            writeln!(out, "{},{},{}", label.name(), len, count)?;
        }
    }
    Ok(())
}
