use ksineq_core::catalog::{load_catalog, load_document, names, ENTRIES};
use ksineq_core::engine::{find_coloring, validate_orthogonality};
use ksineq_core::format::{parse_set, serialize_set};
use ksineq_core::model::build_stats;

fn dnnm(name: &str) -> (usize, usize, usize, usize) {
    let set = load_catalog(name).unwrap();
    let st = build_stats(&set);
    (
        set.dimension(),
        st.vector_count,
        st.context_count,
        st.connection_count,
    )
}

#[test]
fn published_parameters() {
    assert_eq!(dnnm("cabello18"), (4, 18, 9, 18));
    assert_eq!(dnnm("kernaghan20"), (4, 20, 11, 30));
    assert_eq!(dnnm("kernaghan-peres36"), (8, 36, 11, 72));
    assert_eq!(dnnm("peres57"), (3, 57, 40, 96));
}

#[test]
fn override_only_where_all_pairs_differs() {
    for name in names() {
        let set = load_catalog(name).unwrap();
        let st = build_stats(&set);
        match set.m_override() {
            Some(m) => assert_ne!(
                m as usize,
                st.all_pairs_count(),
                "{name}: redundant override"
            ),
            None => assert_eq!(st.connection_count, st.all_pairs_count()),
        }
    }
    // 28 rays in two bases, 8 in four: 28 + 8·6.
    let kp = build_stats(&load_catalog("kernaghan-peres36").unwrap());
    assert_eq!(kp.all_pairs_count(), 76);
    assert_eq!(kp.multiplicity_histogram(), vec![(2, 28), (4, 8)]);
}

#[test]
fn multiplicities_sum_to_n_times_d() {
    for name in names() {
        let set = load_catalog(name).unwrap();
        let st = build_stats(&set);
        let total: usize = st.multiplicities.iter().sum();
        assert_eq!(total, st.context_count * set.dimension(), "{name}");
    }
}

#[test]
fn every_catalog_set_is_valid_and_uncolorable() {
    for name in names() {
        let set = load_catalog(name).unwrap();
        assert!(validate_orthogonality(&set.to_draft()).is_valid(), "{name}");
        let report = find_coloring(&set);
        assert!(!report.is_colorable(), "{name} has a coloring");
        assert!(report.nodes > 0);
    }
}

#[test]
fn catalog_round_trip_fixpoint() {
    for entry in ENTRIES {
        let first = parse_set(entry.text).unwrap();
        let text = serialize_set(&first);
        let second = parse_set(&text).unwrap();
        assert_eq!(first, second, "{}", entry.name);
        assert_eq!(serialize_set(&second), text, "{}", entry.name);
    }
}

#[test]
fn documents_record_declaration_lines() {
    let doc = load_document("cabello18").unwrap();
    assert_eq!(doc.source.as_deref(), Some("catalog:cabello18"));
    assert_eq!(doc.vector_lines.len(), 18);
    assert_eq!(doc.context_lines.len(), 9);
    for &l in &doc.vector_lines {
        assert!(doc.lines[l - 1].starts_with("vec "));
    }
    for &l in &doc.context_lines {
        assert!(doc.lines[l - 1].starts_with("ctx "));
    }
}
