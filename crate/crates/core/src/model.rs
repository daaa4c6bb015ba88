//! Rays, contexts and Kochen-Specker sets, plus the `(n, N, M)` statistics
//! every bound is parametrized by.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::engine::validate_orthogonality;
use crate::scalar::{ExactScalar, Radicand, ScalarError};

/// Largest supported dimension; slot patterns are packed into a `u64`.
pub const MAX_DIMENSION: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("invalid set: {0}")]
    Invalid(ValidationReport),
}

/// A ray given by one (unnormalized) representative vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayVector {
    pub id: String,
    pub components: Vec<ExactScalar>,
}

impl RayVector {
    pub fn new(id: impl Into<String>, components: Vec<ExactScalar>) -> Self {
        RayVector {
            id: id.into(),
            components,
        }
    }

    /// Integer components in ℚ; convenient for tests and hand-built sets.
    pub fn from_integers(id: impl Into<String>, components: &[i64]) -> Self {
        let comps = components
            .iter()
            .map(|&c| ExactScalar::from_integer(c, Radicand::RATIONAL))
            .collect();
        Self::new(id, comps)
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ExactScalar::is_zero)
    }
}

/// Exact real inner product `Σ uᵢ·vᵢ` (no conjugation).
pub fn inner_product(u: &RayVector, v: &RayVector) -> Result<ExactScalar, ModelError> {
    if u.dimension() != v.dimension() {
        return Err(ModelError::DimensionMismatch(u.dimension(), v.dimension()));
    }
    let radicand = match u.components.first() {
        Some(c) => c.radicand(),
        None => return Ok(ExactScalar::zero(Radicand::RATIONAL)),
    };
    let mut acc = ExactScalar::zero(radicand);
    for (a, b) in u.components.iter().zip(&v.components) {
        acc = acc.checked_add(&a.checked_mul(b)?)?;
    }
    Ok(acc)
}

/// True iff `u = c·v` for a nonzero field scalar `c`, tested by requiring
/// every 2×2 minor `uᵢvⱼ − uⱼvᵢ` to vanish. Zero vectors span no ray and
/// are never the same ray as anything.
pub fn same_ray(u: &RayVector, v: &RayVector) -> bool {
    if u.dimension() != v.dimension() || u.is_zero() || v.is_zero() {
        return false;
    }
    let d = u.dimension();
    for i in 0..d {
        for j in (i + 1)..d {
            let lhs = u.components[i].checked_mul(&v.components[j]);
            let rhs = u.components[j].checked_mul(&v.components[i]);
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                _ => return false,
            }
        }
    }
    true
}

/// An ordered d-tuple of vector indices measured together.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Context(pub Vec<usize>);

impl Context {
    pub fn vectors(&self) -> &[usize] {
        &self.0
    }

    pub fn position_of(&self, vector: usize) -> Option<usize> {
        self.0.iter().position(|&v| v == vector)
    }

    pub fn contains(&self, vector: usize) -> bool {
        self.0.contains(&vector)
    }
}

/// Unvalidated set parts. [`KsSet::try_from`] runs the full validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDraft {
    pub name: String,
    pub dimension: usize,
    pub radicand: Radicand,
    pub vectors: Vec<RayVector>,
    pub contexts: Vec<Context>,
    pub m_override: Option<u64>,
}

/// One broken invariant. Indices refer to the draft's vectors and contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadName,
    DimensionOutOfRange(usize),
    ComponentCount { vector: usize, found: usize },
    ForeignRing { vector: usize },
    ZeroVector { vector: usize },
    DuplicateVectorId { first: usize, second: usize },
    DuplicateRay { first: usize, second: usize },
    ContextArity { context: usize, found: usize },
    UnknownVector { context: usize, index: usize },
    RepeatedVector { context: usize, vector: usize },
    NotOrthogonal { context: usize, a: usize, b: usize },
    DuplicateContext { first: usize, second: usize },
}

/// Where a violation should be reported in a source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Header,
    Vector(usize),
    Context(usize),
}

impl Violation {
    /// The declaration a diagnostic should point at (the later one for
    /// duplicates).
    pub fn anchor(&self) -> Anchor {
        use Violation::*;
        match *self {
            BadName | DimensionOutOfRange(_) => Anchor::Header,
            ComponentCount { vector, .. } | ForeignRing { vector } | ZeroVector { vector } => {
                Anchor::Vector(vector)
            }
            DuplicateVectorId { second, .. } | DuplicateRay { second, .. } => {
                Anchor::Vector(second)
            }
            ContextArity { context, .. }
            | UnknownVector { context, .. }
            | RepeatedVector { context, .. }
            | NotOrthogonal { context, .. } => Anchor::Context(context),
            DuplicateContext { second, .. } => Anchor::Context(second),
        }
    }

    pub fn summary(&self) -> &'static str {
        use Violation::*;
        match self {
            BadName => "invalid set name",
            DimensionOutOfRange(_) => "dimension out of range",
            ComponentCount { .. } => "wrong component count",
            ForeignRing { .. } => "component outside the declared field",
            ZeroVector { .. } => "zero vector",
            DuplicateVectorId { .. } => "duplicate vector id",
            DuplicateRay { .. } => "duplicate ray",
            ContextArity { .. } => "wrong context size",
            UnknownVector { .. } => "unknown vector in context",
            RepeatedVector { .. } => "vector repeated in context",
            NotOrthogonal { .. } => "context not orthogonal",
            DuplicateContext { .. } => "duplicate context",
        }
    }

    pub fn detail(&self, draft: &SetDraft) -> String {
        use Violation::*;
        let id = |i: usize| {
            draft
                .vectors
                .get(i)
                .map(|v| v.id.as_str())
                .unwrap_or("?")
                .to_string()
        };
        match *self {
            BadName => format!("`{}`", draft.name),
            DimensionOutOfRange(d) => format!("{d} not in 3..={MAX_DIMENSION}"),
            ComponentCount { vector, found } => {
                format!("{} has {found}, expected {}", id(vector), draft.dimension)
            }
            ForeignRing { vector } | ZeroVector { vector } => id(vector),
            DuplicateVectorId { first, .. } => id(first),
            DuplicateRay { first, second } => format!("{} ~ {}", id(second), id(first)),
            ContextArity { found, .. } => format!("{found} vectors, expected {}", draft.dimension),
            UnknownVector { index, .. } => format!("#{index}"),
            RepeatedVector { vector, .. } => id(vector),
            NotOrthogonal { a, b, .. } => format!("{}·{} ≠ 0", id(a), id(b)),
            DuplicateContext { first, .. } => format!("same vectors as context {}", first + 1),
        }
    }

    pub fn describe(&self, draft: &SetDraft) -> String {
        format!("{}: {}", self.summary(), self.detail(draft))
    }
}

/// Every violation found in a draft, with rendered messages.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<(Violation, String)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<_> = self.violations.iter().map(|(_, m)| m.as_str()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// A validated Kochen-Specker candidate set: exact rays, orthogonal contexts,
/// and an optional published connection count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsSet {
    name: String,
    dimension: usize,
    radicand: Radicand,
    vectors: Vec<RayVector>,
    contexts: Vec<Context>,
    m_override: Option<u64>,
}

impl TryFrom<SetDraft> for KsSet {
    type Error = ModelError;

    fn try_from(draft: SetDraft) -> Result<Self, ModelError> {
        let report = validate_orthogonality(&draft);
        if !report.is_valid() {
            return Err(ModelError::Invalid(report));
        }
        let SetDraft {
            name,
            dimension,
            radicand,
            vectors,
            contexts,
            m_override,
        } = draft;
        Ok(KsSet {
            name,
            dimension,
            radicand,
            vectors,
            contexts,
            m_override,
        })
    }
}

impl KsSet {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radicand(&self) -> Radicand {
        self.radicand
    }

    pub fn vectors(&self) -> &[RayVector] {
        &self.vectors
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn m_override(&self) -> Option<u64> {
        self.m_override
    }

    pub fn vector_index(&self, id: &str) -> Option<usize> {
        self.vectors.iter().position(|v| v.id == id)
    }

    pub fn to_draft(&self) -> SetDraft {
        SetDraft {
            name: self.name.clone(),
            dimension: self.dimension,
            radicand: self.radicand,
            vectors: self.vectors.clone(),
            contexts: self.contexts.clone(),
            m_override: self.m_override,
        }
    }

    /// A new set keeping only the listed contexts and the vectors they use.
    /// The override is dropped since it described the full set.
    pub fn restrict_to_contexts(&self, keep: &[usize]) -> Result<KsSet, ModelError> {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut vectors = Vec::new();
        let mut used: Vec<usize> = keep
            .iter()
            .flat_map(|&c| self.contexts[c].0.iter().copied())
            .collect();
        used.sort_unstable();
        used.dedup();
        for v in used {
            remap.insert(v, vectors.len());
            vectors.push(self.vectors[v].clone());
        }
        let contexts = keep
            .iter()
            .map(|&c| Context(self.contexts[c].0.iter().map(|v| remap[v]).collect()))
            .collect();
        KsSet::try_from(SetDraft {
            name: format!("{}-sub", self.name),
            dimension: self.dimension,
            radicand: self.radicand,
            vectors,
            contexts,
            m_override: None,
        })
    }
}

/// A pair of contexts sharing a vector: one rotation about that vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Connection {
    pub vector: usize,
    pub first: usize,
    pub second: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetStats {
    pub dimension: usize,
    /// n
    pub vector_count: usize,
    /// N
    pub context_count: usize,
    /// M: the override when present, else `connections.len()`.
    pub connection_count: usize,
    pub m_overridden: bool,
    /// k_v per vector, in declaration order.
    pub multiplicities: Vec<usize>,
    /// All-pairs connections, ordered by vector then context pair.
    pub connections: Vec<Connection>,
}

impl SetStats {
    /// `(k, number of vectors with multiplicity k)`, ascending in k.
    pub fn multiplicity_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist = std::collections::BTreeMap::new();
        for &k in &self.multiplicities {
            *hist.entry(k).or_insert(0usize) += 1;
        }
        hist.into_iter().collect()
    }

    /// Σ C(k_v, 2), independent of any override.
    pub fn all_pairs_count(&self) -> usize {
        self.connections.len()
    }
}

pub fn build_stats(set: &KsSet) -> SetStats {
    let n = set.vectors.len();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, ctx) in set.contexts.iter().enumerate() {
        for &v in &ctx.0 {
            containing[v].push(ci);
        }
    }
    let mut connections = Vec::new();
    for (v, ctxs) in containing.iter().enumerate() {
        for (i, &a) in ctxs.iter().enumerate() {
            for &b in &ctxs[i + 1..] {
                connections.push(Connection {
                    vector: v,
                    first: a,
                    second: b,
                });
            }
        }
    }
    let connection_count = match set.m_override {
        Some(m) => m as usize,
        None => connections.len(),
    };
    SetStats {
        dimension: set.dimension,
        vector_count: n,
        context_count: set.contexts.len(),
        connection_count,
        m_overridden: set.m_override.is_some(),
        multiplicities: containing.iter().map(Vec::len).collect(),
        connections,
    }
}
