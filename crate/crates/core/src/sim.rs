//! Seeded Monte Carlo of the independent-flip error model.
//!
//! Every trial owns a ChaCha8 stream: the generator is seeded with the 64-bit
//! run seed and switched to stream number `trial`. Slots then draw one `u64`
//! each, in (context, position) order, and flip iff the draw is below
//! `⌊r·2⁶⁴⌋` (always for `r = 1`). A trial's outcome therefore depends only
//! on `(seed, trial, slot)`, so results are identical whatever the thread
//! count, and all accumulation is in integer counters.
//!
//! The estimated per-connection mismatch rates are model diagnostics; they
//! are not something an experiment could measure.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{agreement_probability, sum_success_probability, NoiseRate};
use crate::engine::{
    find_coloring, min_defect, Coloring, ColoringReport, SlotAssignment, SlotLayout,
    VectorAssignment,
};
use crate::model::{KsSet, SetStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("set is colorable, so the inequality check is undefined")]
    NotKs,
    #[error("base assignment has {0} values, set has {1} vectors")]
    BaseSize(usize, usize),
    #[error("need at least one trial")]
    NoTrials,
    #[error("dimension must be at least 3 (got {0})")]
    Dimension(usize),
}

/// Trials run in chunks of this size; chunk results are summed in order.
const CHUNK: u64 = 4096;

struct FlipSource {
    rng: ChaCha8Rng,
    threshold: u64,
    always: bool,
}

impl FlipSource {
    fn new(seed: u64, trial: u64, r: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        FlipSource {
            rng,
            threshold: (r * 18_446_744_073_709_551_616.0) as u64,
            always: r >= 1.0,
        }
    }

    fn flip(&mut self) -> bool {
        let x = self.rng.next_u64();
        self.always || x < self.threshold
    }
}

fn check_trials(trials: u64) -> Result<(), SimError> {
    if trials == 0 {
        Err(SimError::NoTrials)
    } else {
        Ok(())
    }
}

/// Success count over `trials`, evaluated in parallel chunks.
fn count_successes(trials: u64, trial_ok: impl Fn(u64) -> bool + Sync) -> u64 {
    (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            (lo..hi).filter(|&t| trial_ok(t)).count() as u64
        })
        .sum()
}

/// An empirical rate with its analytic expectation and 3σ binomial band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub expected: f64,
    /// 3·√(p(1−p)/trials) with `p = expected`.
    pub half_width: f64,
}

impl RateEstimate {
    fn new(trials: u64, successes: u64, expected: f64) -> Self {
        RateEstimate {
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            expected,
            half_width: three_sigma(expected, trials),
        }
    }

    pub fn within_band(&self) -> bool {
        (self.rate - self.expected).abs() <= self.half_width
    }
}

pub fn three_sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// One vector read in two contexts, each reading flipped independently.
/// Expectation `(1−r)² + r²`.
pub fn simulate_pair(r: NoiseRate, trials: u64, seed: u64) -> Result<RateEstimate, SimError> {
    check_trials(trials)?;
    let r = r.get();
    let agree = count_successes(trials, |t| {
        let mut src = FlipSource::new(seed, t, r);
        src.flip() == src.flip()
    });
    Ok(RateEstimate::new(trials, agree, agreement_probability(r)))
}

/// One context with the valid pattern (0, 1, …, 1) and independent flips on
/// every position. Success means exactly one zero survives. Expectation
/// `(1−r)^d + (d−1)(1−r)^{d−2}r²`.
pub fn simulate_context(
    r: NoiseRate,
    d: usize,
    trials: u64,
    seed: u64,
) -> Result<RateEstimate, SimError> {
    check_trials(trials)?;
    if d < 3 {
        return Err(SimError::Dimension(d));
    }
    let r = r.get();
    let ok = count_successes(trials, |t| {
        let mut src = FlipSource::new(seed, t, r);
        let zeros = (0..d)
            .filter(|&p| {
                let base_zero = p == 0;
                base_zero != src.flip()
            })
            .count();
        zeros == 1
    });
    Ok(RateEstimate::new(trials, ok, sum_success_probability(r, d)))
}

/// A hidden-variable trial model: non-contextual base values, then
/// independent per-slot flips at `flip_rate`.
#[derive(Debug, Clone)]
pub struct TrialModel<'a> {
    pub set: &'a KsSet,
    pub base: VectorAssignment,
    pub flip_rate: NoiseRate,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub seed: u64,
    pub trials: u64,
    pub r: f64,
    /// Per connection (all pairs, in `SetStats::connections` order).
    pub delta_hat: Vec<f64>,
    /// Per context.
    pub epsilon_hat: Vec<f64>,
    pub mean_defect: f64,
    pub delta_half_width: Vec<f64>,
    pub epsilon_half_width: Vec<f64>,
    pub mismatch_counts: Vec<u64>,
    pub sum_error_counts: Vec<u64>,
    pub total_defect: u64,
    /// Smallest total defect seen in any single trial.
    pub min_trial_defect: usize,
}

#[derive(Clone)]
struct Tally {
    mismatch: Vec<u64>,
    sum_error: Vec<u64>,
    total: u64,
    min_trial: usize,
}

impl Tally {
    fn new(links: usize, contexts: usize) -> Self {
        Tally {
            mismatch: vec![0; links],
            sum_error: vec![0; contexts],
            total: 0,
            min_trial: usize::MAX,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.mismatch.iter_mut().zip(other.mismatch) {
            *a += b;
        }
        for (a, b) in self.sum_error.iter_mut().zip(other.sum_error) {
            *a += b;
        }
        self.total += other.total;
        self.min_trial = self.min_trial.min(other.min_trial);
        self
    }
}

pub fn simulate_model(model: &TrialModel<'_>, trials: u64) -> Result<SimSummary, SimError> {
    check_trials(trials)?;
    let set = model.set;
    if model.base.values().len() != set.vectors().len() {
        return Err(SimError::BaseSize(
            model.base.values().len(),
            set.vectors().len(),
        ));
    }
    let layout = SlotLayout::from_set(set);
    let base = SlotAssignment::from_vectors(set, &model.base);
    let d = set.dimension();
    let r = model.flip_rate.get();
    let links = layout.links();

    let run_trial = |t: u64, tally: &mut Tally, slots: &mut SlotAssignment| {
        slots.clone_from(&base);
        let mut src = FlipSource::new(model.seed, t, r);
        for c in 0..layout.context_count() {
            for p in 0..d {
                if src.flip() {
                    slots.flip(c, p);
                }
            }
        }
        let mut defect = 0;
        for (c, &pattern) in slots.patterns().iter().enumerate() {
            if !layout.context_ok(pattern) {
                tally.sum_error[c] += 1;
                defect += 1;
            }
        }
        for (j, link) in links.iter().enumerate() {
            if !layout.link_ok(link, slots) {
                tally.mismatch[j] += 1;
                defect += 1;
            }
        }
        tally.total += defect as u64;
        tally.min_trial = tally.min_trial.min(defect);
    };

    let tally = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            let mut tally = Tally::new(links.len(), layout.context_count());
            let mut slots = base.clone();
            for t in lo..hi {
                run_trial(t, &mut tally, &mut slots);
            }
            tally
        })
        .reduce(
            || Tally::new(links.len(), layout.context_count()),
            Tally::merge,
        );

    let rate = |c: u64| c as f64 / trials as f64;
    let delta_hat: Vec<f64> = tally.mismatch.iter().map(|&c| rate(c)).collect();
    let epsilon_hat: Vec<f64> = tally.sum_error.iter().map(|&c| rate(c)).collect();
    Ok(SimSummary {
        seed: model.seed,
        trials,
        r,
        delta_half_width: delta_hat.iter().map(|&p| three_sigma(p, trials)).collect(),
        epsilon_half_width: epsilon_hat
            .iter()
            .map(|&p| three_sigma(p, trials))
            .collect(),
        delta_hat,
        epsilon_hat,
        mean_defect: rate(tally.total),
        mismatch_counts: tally.mismatch,
        sum_error_counts: tally.sum_error,
        total_defect: tally.total,
        min_trial_defect: tally.min_trial,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub mean_defect: f64,
    pub min_trial_defect: usize,
    /// Every trial violated at least one of the M + N constraints.
    pub holds: bool,
    pub delta_hat_max: f64,
    pub epsilon_hat_max: f64,
    /// `M·δ̂_max + N·ε̂_max` with M the all-pairs connection count.
    pub implied_lhs: f64,
}

/// Checks the per-trial form of the union bound on a simulated KS set: the
/// total defect of every trial is at least one, hence so is the mean, and so
/// is `M·δ̂_max + N·ε̂_max`. `coloring` must show the set uncolorable.
pub fn empirical_inequality_check(
    summary: &SimSummary,
    stats: &SetStats,
    coloring: &ColoringReport,
) -> Result<InequalityCheck, SimError> {
    if coloring.is_colorable() {
        return Err(SimError::NotKs);
    }
    let max = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
    let delta_hat_max = max(&summary.delta_hat);
    let epsilon_hat_max = max(&summary.epsilon_hat);
    let implied_lhs = stats.connections.len() as f64 * delta_hat_max
        + stats.context_count as f64 * epsilon_hat_max;
    Ok(InequalityCheck {
        mean_defect: summary.mean_defect,
        min_trial_defect: summary.min_trial_defect,
        holds: summary.min_trial_defect >= 1 && summary.mean_defect >= 1.0,
        delta_hat_max,
        epsilon_hat_max,
        implied_lhs,
    })
}

/// Default base for [`TrialModel`]: a coloring when one exists, otherwise a
/// vector assignment violating as few contexts as can be found. Dropping one
/// context at a time and coloring the rest gives an optimum of one violated
/// context on critical sets; failing that, each vector takes the majority of
/// its slot values in a minimum-defect witness.
pub fn default_base(set: &KsSet) -> VectorAssignment {
    if let Coloring::Colorable(a) = find_coloring(set).coloring {
        return a;
    }
    let all: Vec<usize> = (0..set.contexts().len()).collect();
    for drop in 0..set.contexts().len() {
        let keep: Vec<usize> = all.iter().copied().filter(|&c| c != drop).collect();
        let Ok(sub) = set.restrict_to_contexts(&keep) else {
            continue;
        };
        if let Coloring::Colorable(a) = find_coloring(&sub).coloring {
            // Vectors only in the dropped context get 1.
            let mut values = vec![1u8; set.vectors().len()];
            for (i, v) in sub.vectors().iter().enumerate() {
                let full = set.vector_index(&v.id).expect("sub-set vector");
                values[full] = a.value(i);
            }
            return VectorAssignment::new(values);
        }
    }
    let witness = match min_defect(set) {
        Ok(report) => report.witness,
        Err(_) => return VectorAssignment::new(vec![1; set.vectors().len()]),
    };
    let mut ones = vec![0usize; set.vectors().len()];
    let mut seen = vec![0usize; set.vectors().len()];
    for (c, ctx) in set.contexts().iter().enumerate() {
        for (p, &v) in ctx.vectors().iter().enumerate() {
            seen[v] += 1;
            ones[v] += usize::from(witness.value(c, p));
        }
    }
    VectorAssignment::new(
        ones.iter()
            .zip(&seen)
            .map(|(&o, &s)| u8::from(2 * o >= s))
            .collect(),
    )
}
