//! Error-rate inequalities for a KS set with `N` contexts and `M` connections.
//!
//! * margin `1 − Mδ − Nε`: positive means the rotation bound (rate δ) and the
//!   sum bound (rate ε) cannot both hold;
//! * the δ lower bound `(1 − Nε)/M` implied by those bounds holding;
//! * for independent flips at rate `r`, `δ = 2r − 2r²` and
//!   `ε = 1 − (1−r)^d − (d−1)(1−r)^{d−2}r²`, so the bounds hold only if
//!   `g(r) = Mδ(r) + Nε(r) ≥ 1`. The critical rate is the first root of
//!   `g(r) = 1`.

use serde::Serialize;
use thiserror::Error;

use crate::model::SetStats;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("{0} = {1} is not a probability in [0, 1]")]
    NotProbability(&'static str, f64),
    #[error("M = 0: the set has no connections, so δ is unconstrained")]
    NoConnections,
    #[error("N and M must be at least 1 and d at least 3 (got N={0}, M={1}, d={2})")]
    BadParameters(usize, usize, usize),
    #[error("g(r) stays below 1 on [0, 1/2]; no critical rate")]
    NoCrossing,
}

fn probability(name: &'static str, p: f64) -> Result<f64, BoundsError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(BoundsError::NotProbability(name, p))
    }
}

/// δ: rotation-mismatch rate; ε: sum-error rate (non-detections included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRates {
    pub delta: f64,
    pub epsilon: f64,
}

impl ErrorRates {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self, BoundsError> {
        Ok(ErrorRates {
            delta: probability("delta", delta)?,
            epsilon: probability("epsilon", epsilon)?,
        })
    }

    /// The rates induced by independent flips at rate `r`.
    pub fn from_noise(r: NoiseRate, d: usize) -> Self {
        ErrorRates {
            delta: delta_analytic(r.get()),
            epsilon: epsilon_analytic(r.get(), d),
        }
    }
}

/// Independent flip probability per individual result.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct NoiseRate(f64);

impl NoiseRate {
    pub fn new(r: f64) -> Result<Self, BoundsError> {
        probability("r", r).map(NoiseRate)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginVerdict {
    pub margin: f64,
    pub contradiction: bool,
}

/// `1 − Mδ − Nε`; a contradiction with non-contextuality iff it is positive.
pub fn theorem2_margin(m: usize, n: usize, rates: ErrorRates) -> MarginVerdict {
    let margin = 1.0 - m as f64 * rates.delta - n as f64 * rates.epsilon;
    MarginVerdict {
        margin,
        contradiction: margin > 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBound {
    /// `max(0, (1 − Nε)/M)`.
    pub delta_min: f64,
    /// True when `Nε ≥ 1` and the bound says nothing.
    pub vacuous: bool,
}

/// Lower bound on δ. A numerator within a few ulps of zero counts as zero so
/// that `ε = 1/N` is reported vacuous despite rounding in `N·(1/N)`.
pub fn cor3_delta_bound(n: usize, m: usize, epsilon: f64) -> Result<DeltaBound, BoundsError> {
    probability("epsilon", epsilon)?;
    if m == 0 {
        return Err(BoundsError::NoConnections);
    }
    let numerator = 1.0 - n as f64 * epsilon;
    if numerator <= 4.0 * f64::EPSILON * n.max(1) as f64 {
        return Ok(DeltaBound {
            delta_min: 0.0,
            vacuous: true,
        });
    }
    Ok(DeltaBound {
        delta_min: numerator / m as f64,
        vacuous: false,
    })
}

/// P(both readings of a shared vector agree) = (1−r)² + r².
pub fn agreement_probability(r: f64) -> f64 {
    (1.0 - r).powi(2) + r * r
}

/// P(a valid d-pattern still has exactly one zero after independent flips)
/// = (1−r)^d + (d−1)(1−r)^{d−2}r²: no flips, or the zero and one one flip.
pub fn sum_success_probability(r: f64, d: usize) -> f64 {
    let q = 1.0 - r;
    q.powi(d as i32) + (d as f64 - 1.0) * q.powi(d as i32 - 2) * r * r
}

/// δ(r) = 2r − 2r².
pub fn delta_analytic(r: f64) -> f64 {
    2.0 * r - 2.0 * r * r
}

/// ε(r, d) = 1 − (1−r)^d − (d−1)(1−r)^{d−2}r².
pub fn epsilon_analytic(r: f64, d: usize) -> f64 {
    1.0 - sum_success_probability(r, d)
}

/// g(r) = M(2r − 2r²) + N(1 − (1−r)^d − (d−1)(1−r)^{d−2}r²).
pub fn cor4_lhs(r: f64, n: usize, m: usize, d: usize) -> f64 {
    let q = 1.0 - r;
    m as f64 * (2.0 * r - 2.0 * r * r)
        + n as f64 * (1.0 - q.powi(d as i32) - (d as f64 - 1.0) * q.powi(d as i32 - 2) * r * r)
}

/// True when independent noise at rate `r` still contradicts
/// non-contextuality, i.e. `g(r) < 1`.
pub fn cor4_contradiction(r: f64, n: usize, m: usize, d: usize) -> bool {
    cor4_lhs(r, n, m, d) < 1.0
}

pub const BISECTION_TOLERANCE: f64 = 1e-12;
const SCAN_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalRate {
    pub r_critical: f64,
    /// `floor(r*·10⁴)/10⁴`, the convention of published 4-decimal tables.
    pub r_floor4: f64,
    /// Final bracket with `g(lo) < 1 ≤ g(hi)`.
    pub bracket: (f64, f64),
    pub iterations: u32,
}

pub fn floor4(r: f64) -> f64 {
    (r * 1e4).floor() / 1e4
}

/// First root of `g(r) = 1` on `[0, 1/2]`. A uniform scan brackets the first
/// crossing (g(0) = 0), then bisection narrows it to [`BISECTION_TOLERANCE`].
pub fn critical_rate(n: usize, m: usize, d: usize) -> Result<CriticalRate, BoundsError> {
    if n == 0 || m == 0 || d < 3 {
        return Err(BoundsError::BadParameters(n, m, d));
    }
    let g = |r: f64| cor4_lhs(r, n, m, d);
    let step = 0.5 / SCAN_STEPS as f64;
    let first = (1..=SCAN_STEPS)
        .find(|&i| g(i as f64 * step) >= 1.0)
        .ok_or(BoundsError::NoCrossing)?;
    let mut lo = (first - 1) as f64 * step;
    let mut hi = first as f64 * step;
    let mut iterations = 0;
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let r = 0.5 * (lo + hi);
    Ok(CriticalRate {
        r_critical: r,
        r_floor4: floor4(r),
        bracket: (lo, hi),
        iterations,
    })
}

/// One table row: a set's parameters. `n_original` is the size of the
/// published set before it was extended to full contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub name: String,
    pub d: usize,
    pub n: usize,
    pub n_original: Option<usize>,
    pub big_n: usize,
    pub big_m: usize,
}

impl TableRow {
    pub fn from_stats(name: &str, stats: &SetStats) -> Self {
        TableRow {
            name: name.to_string(),
            d: stats.dimension,
            n: stats.vector_count,
            n_original: None,
            big_n: stats.context_count,
            big_m: stats.connection_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub name: String,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub r_critical: f64,
    pub r_floor4: f64,
    #[serde(skip)]
    pub n_original: Option<usize>,
}

/// The six published parameter rows, largest set first.
pub fn published_rows() -> Vec<TableRow> {
    let row = |name: &str, d, n, n_original, big_n, big_m| TableRow {
        name: name.to_string(),
        d,
        n,
        n_original,
        big_n,
        big_m,
    };
    vec![
        row("Peres", 3, 57, Some(33), 40, 96),
        row("Kochen & Conway", 3, 51, Some(31), 37, 91),
        row("Schutte", 3, 49, Some(33), 36, 87),
        row("Kernaghan & Peres", 8, 36, None, 11, 72),
        row("Kernaghan", 4, 20, None, 11, 30),
        row("Cabello et al", 4, 18, None, 9, 18),
    ]
}

/// Published critical rates for [`published_rows`], same order.
pub const PUBLISHED_R: [f64; 6] = [0.0032, 0.0034, 0.0035, 0.0043, 0.0097, 0.0142];

pub fn table_report(rows: &[TableRow]) -> Result<Vec<TableEntry>, BoundsError> {
    rows.iter()
        .map(|row| {
            let cr = critical_rate(row.big_n, row.big_m, row.d)?;
            Ok(TableEntry {
                name: row.name.clone(),
                d: row.d,
                n: row.n,
                big_n: row.big_n,
                big_m: row.big_m,
                r_critical: cr.r_critical,
                r_floor4: cr.r_floor4,
                n_original: row.n_original,
            })
        })
        .collect()
}

/// Aligned plain-text rendering of a table report.
pub fn format_table(entries: &[TableEntry]) -> String {
    let n_col = |e: &TableEntry| match e.n_original {
        Some(orig) => format!("{} ({orig})", e.n),
        None => e.n.to_string(),
    };
    let name_w = entries
        .iter()
        .map(|e| e.name.len())
        .max()
        .unwrap_or(0)
        .max(4);
    let n_w = entries
        .iter()
        .map(|e| n_col(e).len())
        .max()
        .unwrap_or(0)
        .max(1);
    let mut out = format!(
        "{:<name_w$}  {:>2}  {:>n_w$}  {:>3}  {:>3}  {:>6}  {:>14}\n",
        "set", "d", "n", "N", "M", "r", "r*"
    );
    for e in entries {
        out.push_str(&format!(
            "{:<name_w$}  {:>2}  {:>n_w$}  {:>3}  {:>3}  {:>6.4}  {:>14.12}\n",
            e.name,
            e.d,
            n_col(e),
            e.big_n,
            e.big_m,
            e.r_floor4,
            e.r_critical
        ));
    }
    out
}

/// Everything the `bounds` command reports for one set and one rate pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub rates: ErrorRates,
    pub margin: MarginVerdict,
    pub delta_bound: DeltaBound,
}

pub fn bound_report(
    name: &str,
    stats: &SetStats,
    rates: ErrorRates,
) -> Result<BoundReport, BoundsError> {
    let (n, m) = (stats.context_count, stats.connection_count);
    Ok(BoundReport {
        name: name.to_string(),
        d: stats.dimension,
        n: stats.vector_count,
        big_n: n,
        big_m: m,
        rates,
        margin: theorem2_margin(m, n, rates),
        delta_bound: cor3_delta_bound(n, m, rates.epsilon)?,
    })
}
