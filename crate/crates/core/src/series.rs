//! Equally spaced time series, discrete second differences, and detection of
//! the characteristic point where the curvature proxy peaks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eulerian::binomial;

/// Whether values are per-period increments or accumulated levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Raw,
    Cumulative,
}

/// Samples at unit spacing; the index is time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    labels: Vec<String>,
    values: Vec<f64>,
    kind: SeriesKind,
}

impl TimeSeries {
    pub fn new(labels: Vec<String>, values: Vec<f64>, kind: SeriesKind) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::Domain(format!(
                "{} labels for {} values",
                labels.len(),
                values.len()
            )));
        }
        Ok(Self {
            labels,
            values,
            kind,
        })
    }

    /// Series labelled by its indices `0, 1, …`.
    pub fn from_values(values: Vec<f64>, kind: SeriesKind) -> Self {
        let labels = (0..values.len()).map(|i| i.to_string()).collect();
        Self {
            labels,
            values,
            kind,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    /// Largest observed value, `NaN` for an empty series.
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NAN, f64::max)
    }

    /// The first `len` samples.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.len());
        Self {
            labels: self.labels[..len].to_vec(),
            values: self.values[..len].to_vec(),
            kind: self.kind,
        }
    }

    /// Samples `start..end`.
    pub fn window(&self, start: usize, end: usize) -> Self {
        Self {
            labels: self.labels[start..end].to_vec(),
            values: self.values[start..end].to_vec(),
            kind: self.kind,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            labels: self.labels.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            kind: self.kind,
        }
    }

    /// Running totals of a raw series.
    pub fn cumulate(&self) -> Result<Self> {
        if self.kind == SeriesKind::Cumulative {
            return Err(Error::AlreadyCumulative);
        }
        let values = self
            .values
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            labels: self.labels.clone(),
            values,
            kind: SeriesKind::Cumulative,
        })
    }
}

pub fn cumulate(ts: &TimeSeries) -> Result<TimeSeries> {
    ts.cumulate()
}

/// Which difference operator produced a [`DiffSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffKind {
    /// `(y_{t+1} − 2y_t + y_{t−1}) / 2`
    Scd,
    /// `(y_t − 2y_{t−1} + y_{t−2}) / 2`
    Sld,
    /// Plain m-th central difference. For odd m the stencil is centred half a
    /// step after the index it is stored at.
    Central(usize),
}

impl fmt::Display for DiffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffKind::Scd => f.write_str("scd"),
            DiffKind::Sld => f.write_str("sld"),
            DiffKind::Central(m) => write!(f, "central-{m}"),
        }
    }
}

impl FromStr for DiffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scd" => Ok(DiffKind::Scd),
            "sld" => Ok(DiffKind::Sld),
            other => Err(Error::Domain(format!("unknown difference kind '{other}'"))),
        }
    }
}

/// A difference sequence aligned with its source series. Slots whose stencil
/// would leave the series are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSeries<'a> {
    source: &'a TimeSeries,
    kind: DiffKind,
    values: Vec<Option<f64>>,
}

impl<'a> DiffSeries<'a> {
    pub fn source(&self) -> &'a TimeSeries {
        self.source
    }

    pub fn kind(&self) -> DiffKind {
        self.kind
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().flatten().count()
    }

    fn defined(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
    }
}

fn require_len(ts: &TimeSeries, needed: usize) -> Result<()> {
    if ts.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: ts.len(),
        });
    }
    Ok(())
}

pub fn second_central_diff(ts: &TimeSeries) -> Result<DiffSeries<'_>> {
    require_len(ts, 3)?;
    let y = ts.values();
    let values = (0..y.len())
        .map(|t| (t >= 1 && t + 1 < y.len()).then(|| (y[t + 1] - 2.0 * y[t] + y[t - 1]) / 2.0))
        .collect();
    Ok(DiffSeries {
        source: ts,
        kind: DiffKind::Scd,
        values,
    })
}

pub fn second_left_diff(ts: &TimeSeries) -> Result<DiffSeries<'_>> {
    require_len(ts, 3)?;
    let y = ts.values();
    let values = (0..y.len())
        .map(|t| (t >= 2).then(|| (y[t] - 2.0 * y[t - 1] + y[t - 2]) / 2.0))
        .collect();
    Ok(DiffSeries {
        source: ts,
        kind: DiffKind::Sld,
        values,
    })
}

pub fn second_diff(ts: &TimeSeries, kind: DiffKind) -> Result<DiffSeries<'_>> {
    match kind {
        DiffKind::Scd => second_central_diff(ts),
        DiffKind::Sld => second_left_diff(ts),
        DiffKind::Central(order) => central_diff(ts, order),
    }
}

/// The `order`-th central difference `Σ_j (−1)^{m−j} C(m,j) y_{t−⌊m/2⌋+j}`.
pub fn central_diff(ts: &TimeSeries, order: usize) -> Result<DiffSeries<'_>> {
    if order == 0 {
        return Err(Error::Domain("difference order must be positive".into()));
    }
    require_len(ts, order + 1)?;
    let weights = (0..=order)
        .map(|j| {
            let c = binomial(order, j)? as f64;
            Ok(if (order - j) % 2 == 1 { -c } else { c })
        })
        .collect::<Result<Vec<f64>>>()?;
    let left = order / 2;
    let right = order - left;
    let y = ts.values();
    let values = (0..y.len())
        .map(|t| {
            (t >= left && t + right < y.len()).then(|| {
                weights
                    .iter()
                    .zip(&y[t - left..=t + right])
                    .map(|(w, v)| w * v)
                    .sum()
            })
        })
        .collect();
    Ok(DiffSeries {
        source: ts,
        kind: DiffKind::Central(order),
        values,
    })
}

/// How the characteristic point is chosen among the peaks of a difference
/// sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionPolicy {
    /// Earliest strict local maximum.
    #[default]
    FirstLocalMax,
    /// Latest strict local maximum that still dominates everything after it,
    /// up to the first negative value following the first peak.
    LastLocalMaxBeforeDecline,
    /// Largest defined value, earliest on ties.
    GlobalMax,
}

impl fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionPolicy::FirstLocalMax => "first-local-max",
            SelectionPolicy::LastLocalMaxBeforeDecline => "last-local-max-before-decline",
            SelectionPolicy::GlobalMax => "global-max",
        })
    }
}

impl FromStr for SelectionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-local-max" => Ok(SelectionPolicy::FirstLocalMax),
            "last-local-max-before-decline" => Ok(SelectionPolicy::LastLocalMaxBeforeDecline),
            "global-max" => Ok(SelectionPolicy::GlobalMax),
            other => Err(Error::Domain(format!("unknown selection policy '{other}'"))),
        }
    }
}

/// A competing candidate reported next to the selected point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rival {
    pub index: usize,
    pub label: String,
    pub diff_value: f64,
    pub series_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicPoint {
    pub index: usize,
    pub label: String,
    pub diff_value: f64,
    pub series_value: f64,
    pub policy_used: SelectionPolicy,
    pub ambiguity: Vec<Rival>,
}

/// Differences within this fraction of the largest |difference| count as ties.
/// Decimal fixtures such as 0.02 vs 0.02 otherwise compare unequal after
/// rounding.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Rivals within this fraction of the winner's span above the minimum are
/// reported as ambiguous.
pub const AMBIGUITY_FRACTION: f64 = 0.25;

pub fn find_characteristic_point(
    ds: &DiffSeries<'_>,
    policy: SelectionPolicy,
) -> Result<CharacteristicPoint> {
    let defined = ds.defined_count();
    if defined < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: defined,
        });
    }
    let scale = ds.defined().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let tol = TIE_TOLERANCE * scale;
    let above = |a: f64, b: f64| a - b > tol;

    let maxima: Vec<usize> = (1..ds.len().saturating_sub(1))
        .filter(|&t| match (ds.get(t - 1), ds.get(t), ds.get(t + 1)) {
            (Some(l), Some(v), Some(r)) => above(v, l) && above(v, r),
            _ => false,
        })
        .collect();

    let global = ds
        .defined()
        .fold(None::<(usize, f64)>, |best, (i, v)| match best {
            Some((_, bv)) if !above(v, bv) => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
        .expect("at least three defined values");

    let chosen = match policy {
        SelectionPolicy::FirstLocalMax => maxima.first().copied(),
        SelectionPolicy::GlobalMax => Some(global),
        SelectionPolicy::LastLocalMaxBeforeDecline => maxima.first().map(|&first| {
            let end = (first + 1..ds.len())
                .find(|&t| ds.get(t).is_some_and(|v| v < -tol))
                .unwrap_or(ds.len());
            maxima
                .iter()
                .rev()
                .filter(|&&m| m < end)
                .copied()
                .find(|&m| {
                    let peak = ds.get(m).expect("maxima are defined");
                    (m + 1..end).all(|j| ds.get(j).is_none_or(|v| !above(v, peak)))
                })
                .unwrap_or(first)
        }),
    };

    match chosen {
        Some(index) => Ok(build_point(ds, index, policy, &maxima)),
        None => Err(Error::NotFound {
            fallback: Some(Box::new(build_point(
                ds,
                global,
                SelectionPolicy::GlobalMax,
                &maxima,
            ))),
        }),
    }
}

fn build_point(
    ds: &DiffSeries<'_>,
    index: usize,
    policy: SelectionPolicy,
    maxima: &[usize],
) -> CharacteristicPoint {
    let src = ds.source();
    let winner = ds.get(index).expect("selected slot is defined");
    let floor = ds.defined().map(|(_, v)| v).fold(f64::INFINITY, f64::min);
    let band = AMBIGUITY_FRACTION * (winner - floor);
    let ambiguity = ds
        .defined()
        .filter(|&(i, v)| i != index && (maxima.contains(&i) || winner - v <= band))
        .map(|(i, v)| Rival {
            index: i,
            label: src.label(i).to_string(),
            diff_value: v,
            series_value: src.values()[i],
        })
        .collect();
    CharacteristicPoint {
        index,
        label: src.label(index).to_string(),
        diff_value: winner,
        series_value: src.values()[index],
        policy_used: policy,
        ambiguity,
    }
}
