//! The line-oriented `ksset 1` text format.
//!
//! ```text
//! ksset 1                  # format version, first directive
//! name cabello18
//! dim 4
//! field sqrt 2             # optional, default 1 (rationals)
//! m-override 72            # optional published connection count
//! vec a 1 0 0:1 -1/2       # components p, p/q or p/q:r/s = p/q + (r/s)·√k
//! ctx a b c d              # exactly `dim` vector ids
//! ```
//!
//! `#` starts a comment, blank lines are ignored, CRLF is accepted. Every
//! diagnostic carries the 1-based line number of the offending declaration.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::engine::validate_orthogonality;
use crate::model::{Anchor, Context, KsSet, RayVector, SetDraft};
use crate::scalar::{ExactScalar, Radicand};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
    pub detail: Option<String>,
}

impl Diagnostic {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            message: message.into(),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at line {}", self.message, self.line)?;
        if let Some(d) = &self.detail {
            write!(f, ": {d}")?;
        }
        Ok(())
    }
}

/// All diagnostics for a rejected document, in line order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// A parsed document together with where each declaration came from.
#[derive(Debug, Clone)]
pub struct SetDocument {
    pub source: Option<String>,
    pub lines: Vec<String>,
    pub set: KsSet,
    pub vector_lines: Vec<usize>,
    pub context_lines: Vec<usize>,
}

fn is_identifier(tok: &str) -> bool {
    !tok.is_empty()
        && tok
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn parse_count(tok: &str) -> Option<u64> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    tok.parse().ok()
}

#[derive(Default)]
struct Header {
    version_line: Option<usize>,
    name: Option<(String, usize)>,
    dim: Option<(usize, usize)>,
    field: Option<(Radicand, usize)>,
    m_override: Option<(u64, usize)>,
}

pub fn parse_set(text: &str) -> Result<KsSet, ParseError> {
    parse_document(text, None).map(|doc| doc.set)
}

pub fn parse_document(text: &str, source: Option<&str>) -> Result<SetDocument, ParseError> {
    let lines: Vec<String> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect();
    let mut diags = Vec::new();
    let mut header = Header::default();
    let mut vectors: Vec<RayVector> = Vec::new();
    let mut vector_lines = Vec::new();
    let mut raw_contexts: Vec<(Vec<String>, usize)> = Vec::new();

    for (idx, raw) in lines.iter().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((&directive, args)) = toks.split_first() else {
            continue;
        };

        if header.version_line.is_none() {
            if directive == "ksset" && args.len() == 1 && args[0] == FORMAT_VERSION {
                header.version_line = Some(line);
            } else if directive == "ksset" {
                diags.push(
                    Diagnostic::new(line, "unsupported format version")
                        .with_detail(format!("expected `ksset {FORMAT_VERSION}`")),
                );
                return Err(ParseError { diagnostics: diags });
            } else {
                diags.push(Diagnostic::new(line, "missing `ksset 1` header"));
                return Err(ParseError { diagnostics: diags });
            }
            continue;
        }

        let once = |seen: Option<usize>, diags: &mut Vec<Diagnostic>| -> bool {
            if let Some(prev) = seen {
                diags.push(
                    Diagnostic::new(line, format!("repeated `{directive}`"))
                        .with_detail(format!("first given at line {prev}")),
                );
                false
            } else {
                true
            }
        };

        match directive {
            "ksset" => diags.push(Diagnostic::new(line, "repeated `ksset` header")),
            "name" => {
                if !once(header.name.as_ref().map(|n| n.1), &mut diags) {
                    continue;
                }
                if args.len() != 1 || !is_identifier(args[0]) {
                    diags.push(Diagnostic::new(line, "`name` takes one identifier"));
                } else {
                    header.name = Some((args[0].to_string(), line));
                }
            }
            "dim" => {
                if !once(header.dim.map(|d| d.1), &mut diags) {
                    continue;
                }
                if !vectors.is_empty() || !raw_contexts.is_empty() {
                    diags.push(Diagnostic::new(
                        line,
                        "`dim` must precede vectors and contexts",
                    ));
                    continue;
                }
                match args {
                    [d] => match parse_count(d) {
                        Some(d) if d >= 3 && d <= crate::model::MAX_DIMENSION as u64 => {
                            header.dim = Some((d as usize, line))
                        }
                        _ => diags.push(Diagnostic::new(line, "invalid dimension").with_detail(
                            format!("`{d}` (need 3..={})", crate::model::MAX_DIMENSION),
                        )),
                    },
                    _ => diags.push(Diagnostic::new(line, "`dim` takes one integer")),
                }
            }
            "field" => {
                if !once(header.field.map(|f| f.1), &mut diags) {
                    continue;
                }
                if !vectors.is_empty() {
                    diags.push(Diagnostic::new(line, "`field` must precede vectors"));
                    continue;
                }
                match args {
                    ["sqrt", k] => match parse_count(k).map(Radicand::new) {
                        Some(Ok(r)) => header.field = Some((r, line)),
                        Some(Err(e)) => diags.push(
                            Diagnostic::new(line, "invalid field").with_detail(e.to_string()),
                        ),
                        None => diags.push(
                            Diagnostic::new(line, "invalid field").with_detail(format!("`{k}`")),
                        ),
                    },
                    _ => diags.push(Diagnostic::new(line, "expected `field sqrt <k>`")),
                }
            }
            "m-override" => {
                if !once(header.m_override.map(|m| m.1), &mut diags) {
                    continue;
                }
                match args {
                    [m] => match parse_count(m) {
                        Some(m) => header.m_override = Some((m, line)),
                        None => diags.push(
                            Diagnostic::new(line, "invalid m-override")
                                .with_detail(format!("`{m}`")),
                        ),
                    },
                    _ => diags.push(Diagnostic::new(line, "`m-override` takes one integer")),
                }
            }
            "vec" => {
                let Some((dim, _)) = header.dim else {
                    diags.push(Diagnostic::new(line, "`vec` before `dim`"));
                    continue;
                };
                let radicand = header.field.map(|f| f.0).unwrap_or_default();
                let Some((&id, comps)) = args.split_first() else {
                    diags.push(Diagnostic::new(line, "`vec` needs an id"));
                    continue;
                };
                if !is_identifier(id) {
                    diags.push(
                        Diagnostic::new(line, "invalid vector id").with_detail(format!("`{id}`")),
                    );
                    continue;
                }
                if comps.len() != dim {
                    diags.push(
                        Diagnostic::new(line, "wrong component count")
                            .with_detail(format!("{id} has {}, expected {dim}", comps.len())),
                    );
                    continue;
                }
                let mut parsed = Vec::with_capacity(dim);
                let mut ok = true;
                for tok in comps {
                    match ExactScalar::parse(tok, radicand) {
                        Ok(s) => parsed.push(s),
                        Err(e) => {
                            diags.push(
                                Diagnostic::new(line, "invalid component")
                                    .with_detail(e.to_string()),
                            );
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    vectors.push(RayVector::new(id, parsed));
                    vector_lines.push(line);
                }
            }
            "ctx" => {
                if header.dim.is_none() {
                    diags.push(Diagnostic::new(line, "`ctx` before `dim`"));
                    continue;
                }
                raw_contexts.push((args.iter().map(|s| s.to_string()).collect(), line));
            }
            other => diags
                .push(Diagnostic::new(line, "unknown directive").with_detail(format!("`{other}`"))),
        }
    }

    let last_line = lines.len().max(1);
    let Some(version_line) = header.version_line else {
        diags.push(Diagnostic::new(last_line, "missing `ksset 1` header"));
        return Err(ParseError { diagnostics: diags });
    };
    if header.name.is_none() {
        diags.push(Diagnostic::new(version_line, "missing `name`"));
    }
    if header.dim.is_none() {
        diags.push(Diagnostic::new(version_line, "missing `dim`"));
    }

    // Resolve context ids; duplicate vector ids make lookups ambiguous, so
    // those are reported here and the draft validation skips them.
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, v) in vectors.iter().enumerate() {
        if let Some(&first) = index.get(v.id.as_str()) {
            diags.push(
                Diagnostic::new(vector_lines[i], "duplicate vector id").with_detail(format!(
                    "{} first declared at line {}",
                    v.id, vector_lines[first]
                )),
            );
        } else {
            index.insert(&v.id, i);
        }
    }
    let mut contexts = Vec::new();
    let mut context_lines = Vec::new();
    for (ids, line) in &raw_contexts {
        let mut members = Vec::with_capacity(ids.len());
        let mut ok = true;
        for id in ids {
            match index.get(id.as_str()) {
                Some(&v) => members.push(v),
                None => {
                    diags.push(
                        Diagnostic::new(*line, "undeclared vector id in ctx")
                            .with_detail(format!("`{id}`")),
                    );
                    ok = false;
                }
            }
        }
        if ok {
            contexts.push(Context(members));
            context_lines.push(*line);
        }
    }

    if !diags.is_empty() {
        diags.sort_by_key(|d| d.line);
        return Err(ParseError { diagnostics: diags });
    }

    let (name, name_line) = header.name.unwrap();
    let (dimension, dim_line) = header.dim.unwrap();
    let draft = SetDraft {
        name,
        dimension,
        radicand: header.field.map(|f| f.0).unwrap_or_default(),
        vectors,
        contexts,
        m_override: header.m_override.map(|m| m.0),
    };
    let report = validate_orthogonality(&draft);
    if !report.is_valid() {
        for (v, _) in &report.violations {
            let line = match v.anchor() {
                Anchor::Header => match v {
                    crate::model::Violation::BadName => name_line,
                    _ => dim_line,
                },
                Anchor::Vector(i) => vector_lines[i],
                Anchor::Context(c) => context_lines[c],
            };
            diags.push(Diagnostic::new(line, v.summary()).with_detail(v.detail(&draft)));
        }
        diags.sort_by_key(|d| d.line);
        return Err(ParseError { diagnostics: diags });
    }
    let set = KsSet::try_from(draft).expect("draft validated above");
    Ok(SetDocument {
        source: source.map(str::to_string),
        lines,
        set,
        vector_lines,
        context_lines,
    })
}

/// Canonical document: header, then vectors and contexts in declaration
/// order, single spaces, LF line endings.
pub fn serialize_set(set: &KsSet) -> String {
    let mut out = String::new();
    out.push_str(&format!("ksset {FORMAT_VERSION}\n"));
    out.push_str(&format!("name {}\n", set.name()));
    out.push_str(&format!("dim {}\n", set.dimension()));
    if !set.radicand().is_rational() {
        out.push_str(&format!("field sqrt {}\n", set.radicand()));
    }
    if let Some(m) = set.m_override() {
        out.push_str(&format!("m-override {m}\n"));
    }
    for v in set.vectors() {
        out.push_str("vec ");
        out.push_str(&v.id);
        for c in &v.components {
            out.push(' ');
            out.push_str(&c.to_string());
        }
        out.push('\n');
    }
    for c in set.contexts() {
        out.push_str("ctx");
        for &v in c.vectors() {
            out.push(' ');
            out.push_str(&set.vectors()[v].id);
        }
        out.push('\n');
    }
    out
}
