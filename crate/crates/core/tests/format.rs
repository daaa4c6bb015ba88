mod support;

use ksineq_core::catalog::{load_catalog, names, ENTRIES};
use ksineq_core::format::{parse_document, parse_set, serialize_set};
use ksineq_core::model::{KsSet, RayVector};
use ksineq_core::scalar::ExactScalar;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::mutation::{mutate, Kind, KINDS};

/// A random sub-set of a catalog set with every vector rescaled by a
/// nonzero ring element and renamed.
fn variant(name: &str, keep_seed: u64, scales: &[(i64, i64)], rename: bool) -> Option<KsSet> {
    let set = load_catalog(name).unwrap();
    let keep: Vec<usize> = (0..set.contexts().len())
        .filter(|c| (keep_seed >> (c % 64)) & 1 == 1)
        .collect();
    if keep.is_empty() {
        return None;
    }
    let sub = set.restrict_to_contexts(&keep).unwrap();
    let mut draft = sub.to_draft();
    let k = draft.radicand;
    draft.vectors = draft
        .vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (a, b) = scales[i % scales.len()];
            let b = if k.is_rational() { 0 } else { b };
            let c = ExactScalar::from_parts(a, b, k);
            let id = if rename {
                format!("x{i}_{}", v.id)
            } else {
                v.id.clone()
            };
            RayVector::new(id, v.components.iter().map(|x| &c * x).collect())
        })
        .collect();
    KsSet::try_from(draft).ok()
}

fn noisy(text: &str, pad: &[u8]) -> String {
    let mut out = String::from("# generated\n\n");
    for (i, line) in text.lines().enumerate() {
        let p = pad[i % pad.len()] as usize;
        out.push_str(&" ".repeat(p % 3));
        out.push_str(&line.replace(' ', &" ".repeat(1 + p % 2)));
        if p.is_multiple_of(4) {
            out.push_str("   # note");
        }
        out.push_str(if p.is_multiple_of(5) { "\r\n" } else { "\n" });
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn round_trip_identity(
        which in 0usize..4,
        keep in any::<u64>(),
        scales in prop::collection::vec(((1i64..=5).prop_flat_map(|a| prop_oneof![Just(a), Just(-a)]), -3i64..=3), 1..6),
        rename in any::<bool>(),
        pad in prop::collection::vec(any::<u8>(), 1..8),
    ) {
        let name = names()[which];
        let Some(set) = variant(name, keep, &scales, rename) else { return Ok(()) };
        let text = serialize_set(&set);
        let back = parse_set(&text).unwrap();
        prop_assert_eq!(&back, &set);
        prop_assert_eq!(serialize_set(&back), text.clone());
        prop_assert_eq!(parse_set(&noisy(&text, &pad)).unwrap(), set);
    }
}

#[test]
fn catalog_files_round_trip_up_to_whitespace() {
    let squash = |t: &str| -> Vec<String> {
        t.lines()
            .map(|l| {
                l.split('#')
                    .next()
                    .unwrap()
                    .split_whitespace()
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .filter(|l| !l.is_empty())
            .collect()
    };
    for entry in ENTRIES {
        let set = parse_set(entry.text).unwrap();
        assert_eq!(
            squash(&serialize_set(&set)),
            squash(entry.text),
            "{}",
            entry.name
        );
    }
}

#[test]
fn thousand_mutations_all_rejected_with_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    let mut per_kind = [0usize; KINDS.len()];
    let mut attempt = 0usize;
    while done < 1000 {
        let entry = &ENTRIES[attempt % ENTRIES.len()];
        let ki = (attempt / ENTRIES.len()) % KINDS.len();
        attempt += 1;
        let Some(m) = mutate(entry.text, KINDS[ki], &mut rng) else {
            continue;
        };
        let err = match parse_document(&m.text, None) {
            Ok(_) => panic!(
                "{:?} on {} line {} accepted:\n{}",
                m.kind, entry.name, m.line, m.text
            ),
            Err(e) => e,
        };
        let total = m.text.lines().count();
        assert!(!err.diagnostics.is_empty());
        for d in &err.diagnostics {
            assert!(d.line >= 1 && d.line <= total.max(1), "{:?}: {d}", m.kind);
        }
        if m.local {
            assert!(
                err.diagnostics.iter().any(|d| d.line == m.line),
                "{:?} at line {} reported as {err}",
                m.kind,
                m.line
            );
        }
        per_kind[ki] += 1;
        done += 1;
    }
    for (k, n) in KINDS.iter().zip(per_kind) {
        assert!(n > 0, "{k:?} never generated");
    }
    assert!(
        per_kind[KINDS
            .iter()
            .position(|&k| k == Kind::SkewComponent)
            .unwrap()]
            > 10
    );
}
