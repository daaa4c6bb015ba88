use std::collections::HashMap;

use crate::model::{inner_product, same_ray, SetDraft, ValidationReport, Violation, MAX_DIMENSION};

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Checks every structural and geometric invariant of a draft and lists all
/// violations: exact pairwise orthogonality within contexts, nonzero vectors,
/// no repeated rays, no repeated contexts.
pub fn validate_orthogonality(draft: &SetDraft) -> ValidationReport {
    let mut found = Vec::new();
    let d = draft.dimension;

    if !valid_name(&draft.name) {
        found.push(Violation::BadName);
    }
    if !(3..=MAX_DIMENSION).contains(&d) {
        found.push(Violation::DimensionOutOfRange(d));
    }

    let mut usable = vec![true; draft.vectors.len()];
    let mut ids: HashMap<&str, usize> = HashMap::new();
    for (i, v) in draft.vectors.iter().enumerate() {
        if let Some(&first) = ids.get(v.id.as_str()) {
            found.push(Violation::DuplicateVectorId { first, second: i });
        } else {
            ids.insert(&v.id, i);
        }
        if v.dimension() != d {
            found.push(Violation::ComponentCount {
                vector: i,
                found: v.dimension(),
            });
            usable[i] = false;
            continue;
        }
        if v.components.iter().any(|c| c.radicand() != draft.radicand) {
            found.push(Violation::ForeignRing { vector: i });
            usable[i] = false;
            continue;
        }
        if v.is_zero() {
            found.push(Violation::ZeroVector { vector: i });
            usable[i] = false;
        }
    }

    for j in 0..draft.vectors.len() {
        if !usable[j] {
            continue;
        }
        if let Some(i) =
            (0..j).find(|&i| usable[i] && same_ray(&draft.vectors[i], &draft.vectors[j]))
        {
            found.push(Violation::DuplicateRay {
                first: i,
                second: j,
            });
        }
    }

    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for (ci, ctx) in draft.contexts.iter().enumerate() {
        let members = ctx.vectors();
        if members.len() != d {
            found.push(Violation::ContextArity {
                context: ci,
                found: members.len(),
            });
        }
        let mut in_range = true;
        for &v in members {
            if v >= draft.vectors.len() {
                found.push(Violation::UnknownVector {
                    context: ci,
                    index: v,
                });
                in_range = false;
            }
        }
        for (p, &v) in members.iter().enumerate() {
            if members[..p].contains(&v) {
                found.push(Violation::RepeatedVector {
                    context: ci,
                    vector: v,
                });
            }
        }
        if in_range {
            for (p, &a) in members.iter().enumerate() {
                for &b in &members[p + 1..] {
                    if a == b || !usable[a] || !usable[b] {
                        continue;
                    }
                    let orthogonal = inner_product(&draft.vectors[a], &draft.vectors[b])
                        .map(|s| s.is_zero())
                        .unwrap_or(false);
                    if !orthogonal {
                        found.push(Violation::NotOrthogonal { context: ci, a, b });
                    }
                }
            }
        }
        let mut key = members.to_vec();
        key.sort_unstable();
        if let Some(&first) = seen.get(&key) {
            found.push(Violation::DuplicateContext { first, second: ci });
        } else {
            seen.insert(key, ci);
        }
    }

    ValidationReport {
        violations: found
            .into_iter()
            .map(|v| {
                let msg = v.describe(draft);
                (v, msg)
            })
            .collect(),
    }
}
