//! Published Kochen-Specker sets bundled as `ksset 1` files under `catalog/`.

use thiserror::Error;

use crate::format::{parse_document, ParseError, SetDocument};
use crate::model::KsSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog set `{0}` (available: {avail})", avail = names().join(", "))]
    Unknown(String),
    /// A bundled file failed validation: a build defect, not a user error.
    #[error("catalog file {0}.ks is invalid:\n{1}")]
    Corrupt(String, ParseError),
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub text: &'static str,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "cabello18",
        text: include_str!("../catalog/cabello18.ks"),
    },
    CatalogEntry {
        name: "kernaghan20",
        text: include_str!("../catalog/kernaghan20.ks"),
    },
    CatalogEntry {
        name: "kernaghan-peres36",
        text: include_str!("../catalog/kernaghan-peres36.ks"),
    },
    CatalogEntry {
        name: "peres57",
        text: include_str!("../catalog/peres57.ks"),
    },
];

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn catalog_text(name: &str) -> Result<&'static str, CatalogError> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.text)
        .ok_or_else(|| CatalogError::Unknown(name.to_string()))
}

pub fn load_document(name: &str) -> Result<SetDocument, CatalogError> {
    let text = catalog_text(name)?;
    parse_document(text, Some(&format!("catalog:{name}")))
        .map_err(|e| CatalogError::Corrupt(name.to_string(), e))
}

pub fn load_catalog(name: &str) -> Result<KsSet, CatalogError> {
    load_document(name).map(|d| d.set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name() {
        let err = load_catalog("nope").unwrap_err();
        assert!(matches!(err, CatalogError::Unknown(_)));
        assert!(err.to_string().contains("cabello18"));
    }

    #[test]
    fn every_entry_parses() {
        for name in names() {
            let set = load_catalog(name).unwrap();
            assert_eq!(set.name(), name);
        }
    }
}
