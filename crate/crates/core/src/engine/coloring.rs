use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::KsSet;

/// Largest set `brute_force_coloring` will enumerate (2ⁿ assignments).
pub const BRUTE_FORCE_MAX_VECTORS: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("set has {0} vectors; brute force is limited to {BRUTE_FORCE_MAX_VECTORS}")]
    TooLarge(usize),
}

/// One non-contextual 0/1 value per vector, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VectorAssignment(Vec<u8>);

impl VectorAssignment {
    pub fn new(values: Vec<u8>) -> Self {
        assert!(values.iter().all(|&v| v <= 1), "values must be 0 or 1");
        VectorAssignment(values)
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn value(&self, vector: usize) -> u8 {
        self.0[vector]
    }

    /// Context `c` sums to d−1, i.e. holds exactly one zero.
    pub fn satisfies(&self, set: &KsSet, c: usize) -> bool {
        set.contexts()[c]
            .vectors()
            .iter()
            .filter(|&&v| self.0[v] == 0)
            .count()
            == 1
    }

    pub fn violated_contexts(&self, set: &KsSet) -> usize {
        (0..set.contexts().len())
            .filter(|&c| !self.satisfies(set, c))
            .count()
    }

    pub fn is_coloring(&self, set: &KsSet) -> bool {
        self.0.len() == set.vectors().len() && self.violated_contexts(set) == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coloring {
    Colorable(VectorAssignment),
    NoColoring,
}

/// Verdict of the backtracking search, with its node count as certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringReport {
    pub coloring: Coloring,
    pub nodes: u64,
}

impl ColoringReport {
    pub fn is_colorable(&self) -> bool {
        matches!(self.coloring, Coloring::Colorable(_))
    }

    pub fn assignment(&self) -> Option<&VectorAssignment> {
        match &self.coloring {
            Coloring::Colorable(a) => Some(a),
            Coloring::NoColoring => None,
        }
    }
}

const FREE: i8 = -1;

struct Search<'a> {
    contexts: Vec<&'a [usize]>,
    nodes: u64,
}

impl Search<'_> {
    /// Unit propagation of the one-zero-per-context rule. Returns false on a
    /// conflict (two zeros, or no zero left possible).
    fn propagate(&self, values: &mut [i8]) -> bool {
        loop {
            let mut changed = false;
            for ctx in &self.contexts {
                let zeros = ctx.iter().filter(|&&v| values[v] == 0).count();
                let free = ctx.iter().filter(|&&v| values[v] == FREE).count();
                match (zeros, free) {
                    (z, _) if z > 1 => return false,
                    (0, 0) => return false,
                    (1, f) if f > 0 => {
                        for &v in ctx.iter() {
                            if values[v] == FREE {
                                values[v] = 1;
                            }
                        }
                        changed = true;
                    }
                    (0, 1) => {
                        let v = *ctx.iter().find(|&&v| values[v] == FREE).unwrap();
                        values[v] = 0;
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn run(&mut self, mut values: Vec<i8>) -> Option<Vec<i8>> {
        if !self.propagate(&mut values) {
            return None;
        }
        // Most-constrained open context first; ties go to declaration order.
        let mut pick: Option<(usize, usize)> = None;
        for (ci, ctx) in self.contexts.iter().enumerate() {
            if ctx.iter().any(|&v| values[v] == 0) {
                continue;
            }
            let free = ctx.iter().filter(|&&v| values[v] == FREE).count();
            if pick.is_none_or(|(_, best)| free < best) {
                pick = Some((ci, free));
            }
        }
        let Some((ci, _)) = pick else {
            for v in values.iter_mut() {
                if *v == FREE {
                    *v = 1;
                }
            }
            return Some(values);
        };
        let ctx = self.contexts[ci];
        for &zero in ctx {
            if values[zero] != FREE {
                continue;
            }
            self.nodes += 1;
            let mut next = values.clone();
            next[zero] = 0;
            if let Some(found) = self.run(next) {
                return Some(found);
            }
        }
        None
    }
}

/// Backtracking search for a non-contextual assignment with exactly one zero
/// in every context.
pub fn find_coloring(set: &KsSet) -> ColoringReport {
    let mut search = Search {
        contexts: set.contexts().iter().map(|c| c.vectors()).collect(),
        nodes: 0,
    };
    let found = search.run(vec![FREE; set.vectors().len()]);
    let coloring = match found {
        Some(values) => Coloring::Colorable(VectorAssignment(
            values.into_iter().map(|v| v as u8).collect(),
        )),
        None => Coloring::NoColoring,
    };
    ColoringReport {
        coloring,
        nodes: search.nodes,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceReport {
    pub coloring: Coloring,
    /// Always 2ⁿ.
    pub enumerated: u64,
    pub solutions: u64,
}

impl BruteForceReport {
    pub fn is_colorable(&self) -> bool {
        self.solutions > 0
    }
}

/// Enumerates all 2ⁿ assignments. Bit `i` of the mask marks vector `i` as 0;
/// the reported coloring is the one with the smallest mask.
pub fn brute_force_coloring(set: &KsSet) -> Result<BruteForceReport, ColoringError> {
    let n = set.vectors().len();
    if n > BRUTE_FORCE_MAX_VECTORS {
        return Err(ColoringError::TooLarge(n));
    }
    let masks: Vec<u32> = set
        .contexts()
        .iter()
        .map(|c| c.vectors().iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();
    let total = 1u64 << n;
    let ok = |zeros: u32| masks.iter().all(|&m| (zeros & m).count_ones() == 1);

    const CHUNK: u64 = 1 << 14;
    let (solutions, first) = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut count = 0u64;
            let mut first = None;
            for z in lo..hi {
                if ok(z as u32) {
                    count += 1;
                    first.get_or_insert(z as u32);
                }
            }
            (count, first)
        })
        .reduce(
            || (0, None),
            |(c1, f1), (c2, f2)| {
                let first = match (f1, f2) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                (c1 + c2, first)
            },
        );

    let coloring = match first {
        Some(z) => Coloring::Colorable(VectorAssignment(
            (0..n)
                .map(|i| if z >> i & 1 == 1 { 0 } else { 1 })
                .collect(),
        )),
        None => Coloring::NoColoring,
    };
    Ok(BruteForceReport {
        coloring,
        enumerated: total,
        solutions,
    })
}
