//! Minimum number of violated constraints over all contextual (per-slot)
//! assignments. Each context whose sum is not d−1 costs one, and each
//! connection whose two slots disagree costs one. A set is KS-uncolorable
//! exactly when this minimum is at least one.

use serde::Serialize;
use thiserror::Error;

use super::coloring::{find_coloring, Coloring, VectorAssignment};
use crate::model::{build_stats, KsSet, SetStats};

/// Exhaustive pattern enumeration per context is 2^d.
pub const DEFECT_MAX_DIMENSION: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefectError {
    #[error("dimension {0} too large for exact defect minimization (max {DEFECT_MAX_DIMENSION})")]
    DimensionTooLarge(usize),
}

/// Values per (context, position) slot; bit `p` of `patterns[c]` is the
/// value at position `p` of context `c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlotAssignment {
    dimension: usize,
    patterns: Vec<u64>,
}

impl SlotAssignment {
    pub fn new(dimension: usize, patterns: Vec<u64>) -> Self {
        assert!(dimension <= 64);
        let mask = full_mask(dimension);
        assert!(
            patterns.iter().all(|&p| p & !mask == 0),
            "pattern wider than dimension"
        );
        SlotAssignment {
            dimension,
            patterns,
        }
    }

    /// The non-contextual embedding: every slot takes its vector's value.
    pub fn from_vectors(set: &KsSet, values: &VectorAssignment) -> Self {
        let patterns = set
            .contexts()
            .iter()
            .map(|c| {
                c.vectors()
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (p, &v)| m | (u64::from(values.value(v)) << p))
            })
            .collect();
        SlotAssignment {
            dimension: set.dimension(),
            patterns,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn patterns(&self) -> &[u64] {
        &self.patterns
    }

    pub fn value(&self, context: usize, position: usize) -> u8 {
        (self.patterns[context] >> position & 1) as u8
    }

    pub fn flip(&mut self, context: usize, position: usize) {
        self.patterns[context] ^= 1 << position;
    }

    /// Row-per-context view, for reports.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.patterns.len())
            .map(|c| (0..self.dimension).map(|p| self.value(c, p)).collect())
            .collect()
    }
}

fn full_mask(d: usize) -> u64 {
    if d == 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct DefectBreakdown {
    pub sum_defects: usize,
    pub connection_defects: usize,
}

impl DefectBreakdown {
    pub fn total(&self) -> usize {
        self.sum_defects + self.connection_defects
    }
}

/// A connection resolved to the two slots that must agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotLink {
    pub vector: usize,
    pub first: (usize, usize),
    pub second: (usize, usize),
}

/// Slot-level constraint structure of a set: context sizes and the all-pairs
/// connections as slot pairs. The M override never applies here.
#[derive(Debug, Clone)]
pub struct SlotLayout {
    dimension: usize,
    context_count: usize,
    links: Vec<SlotLink>,
}

impl SlotLayout {
    pub fn new(set: &KsSet, stats: &SetStats) -> Self {
        let contexts = set.contexts();
        let links = stats
            .connections
            .iter()
            .map(|c| SlotLink {
                vector: c.vector,
                first: (c.first, contexts[c.first].position_of(c.vector).unwrap()),
                second: (c.second, contexts[c.second].position_of(c.vector).unwrap()),
            })
            .collect();
        SlotLayout {
            dimension: set.dimension(),
            context_count: contexts.len(),
            links,
        }
    }

    pub fn from_set(set: &KsSet) -> Self {
        Self::new(set, &build_stats(set))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn context_count(&self) -> usize {
        self.context_count
    }

    pub fn links(&self) -> &[SlotLink] {
        &self.links
    }

    pub fn context_ok(&self, pattern: u64) -> bool {
        pattern.count_ones() as usize == self.dimension - 1
    }

    pub fn link_ok(&self, link: &SlotLink, slots: &SlotAssignment) -> bool {
        slots.value(link.first.0, link.first.1) == slots.value(link.second.0, link.second.1)
    }

    pub fn breakdown(&self, slots: &SlotAssignment) -> DefectBreakdown {
        DefectBreakdown {
            sum_defects: slots
                .patterns
                .iter()
                .filter(|&&p| !self.context_ok(p))
                .count(),
            connection_defects: self
                .links
                .iter()
                .filter(|l| !self.link_ok(l, slots))
                .count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectReport {
    pub d_min: usize,
    pub witness: SlotAssignment,
    pub breakdown: DefectBreakdown,
    /// Branch-and-bound nodes expanded (0 when a coloring settles it).
    pub nodes: u64,
}

struct BranchAndBound {
    dimension: usize,
    order: Vec<usize>,
    /// For the context at depth t: per position, earlier slots it must match.
    partners: Vec<Vec<Vec<(usize, usize)>>>,
    lower_bound: usize,
    best: usize,
    best_patterns: Vec<u64>,
    current: Vec<u64>,
    nodes: u64,
}

impl BranchAndBound {
    fn increment(&self, depth: usize, pattern: u64) -> usize {
        let mut cost = usize::from(pattern.count_ones() as usize != self.dimension - 1);
        for (p, partners) in self.partners[depth].iter().enumerate() {
            let bit = pattern >> p & 1;
            cost += partners
                .iter()
                .filter(|&&(c, q)| self.current[c] >> q & 1 != bit)
                .count();
        }
        cost
    }

    fn descend(&mut self, depth: usize, cost: usize) {
        if self.best <= self.lower_bound {
            return;
        }
        if depth == self.order.len() {
            if cost < self.best {
                self.best = cost;
                self.best_patterns = self.current.clone();
            }
            return;
        }
        let mut candidates: Vec<(usize, u64)> = (0..=full_mask(self.dimension))
            .map(|p| (self.increment(depth, p), p))
            .collect();
        candidates.sort_unstable();
        let ctx = self.order[depth];
        for (inc, pattern) in candidates {
            // Admissible bound: defects already forced by the partial assignment.
            if cost + inc >= self.best {
                break;
            }
            self.nodes += 1;
            self.current[ctx] = pattern;
            self.descend(depth + 1, cost + inc);
            if self.best <= self.lower_bound {
                return;
            }
        }
    }
}

/// Orders contexts so each one shares as many connections as possible with
/// those already placed; ties go to declaration order.
fn connectivity_order(layout: &SlotLayout) -> Vec<usize> {
    let n = layout.context_count;
    let mut weight = vec![vec![0usize; n]; n];
    for l in &layout.links {
        weight[l.first.0][l.second.0] += 1;
        weight[l.second.0][l.first.0] += 1;
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&c| !placed[c])
            .max_by_key(|&c| {
                let w: usize = order.iter().map(|&o: &usize| weight[c][o]).sum();
                (w, std::cmp::Reverse(c))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}

/// Exact minimum defect by branch-and-bound over contexts. Colorable sets
/// return 0 with the coloring as witness; otherwise the search starts from
/// the all-ones assignment (defect N) and stops as soon as it reaches the
/// lower bound of 1.
pub fn min_defect(set: &KsSet) -> Result<DefectReport, DefectError> {
    let d = set.dimension();
    if d > DEFECT_MAX_DIMENSION {
        return Err(DefectError::DimensionTooLarge(d));
    }
    let layout = SlotLayout::from_set(set);
    if let Coloring::Colorable(values) = find_coloring(set).coloring {
        let witness = SlotAssignment::from_vectors(set, &values);
        let breakdown = layout.breakdown(&witness);
        debug_assert_eq!(breakdown.total(), 0);
        return Ok(DefectReport {
            d_min: 0,
            witness,
            breakdown,
            nodes: 0,
        });
    }

    let order = connectivity_order(&layout);
    let mut depth_of = vec![0usize; layout.context_count];
    for (t, &c) in order.iter().enumerate() {
        depth_of[c] = t;
    }
    let mut partners = vec![vec![Vec::new(); d]; order.len()];
    for l in &layout.links {
        let (early, late) = if depth_of[l.first.0] < depth_of[l.second.0] {
            (l.first, l.second)
        } else {
            (l.second, l.first)
        };
        partners[depth_of[late.0]][late.1].push(early);
    }

    let all_ones = vec![full_mask(d); layout.context_count];
    let mut bb = BranchAndBound {
        dimension: d,
        order,
        partners,
        lower_bound: 1,
        best: layout.context_count,
        best_patterns: all_ones.clone(),
        current: all_ones,
        nodes: 0,
    };
    bb.descend(0, 0);

    let witness = SlotAssignment::new(d, bb.best_patterns);
    let breakdown = layout.breakdown(&witness);
    debug_assert_eq!(breakdown.total(), bb.best);
    Ok(DefectReport {
        d_min: bb.best,
        witness,
        breakdown,
        nodes: bb.nodes,
    })
}
