//! Single-token mutations of a valid `ksset` document. Every kind is built
//! so the result is invalid; kinds that could accidentally stay valid check
//! themselves with a floating-point orthogonality oracle.

use rand::seq::IndexedRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    UnknownDirective,
    DropComponent,
    ExtraComponent,
    GarbageComponent,
    ZeroDenominator,
    SurdInRationalField,
    SkewComponent,
    UndeclaredId,
    RepeatedId,
    ForeignMember,
    DuplicateVecId,
    DimChange,
    VersionChange,
}

pub const KINDS: [Kind; 13] = [
    Kind::UnknownDirective,
    Kind::DropComponent,
    Kind::ExtraComponent,
    Kind::GarbageComponent,
    Kind::ZeroDenominator,
    Kind::SurdInRationalField,
    Kind::SkewComponent,
    Kind::UndeclaredId,
    Kind::RepeatedId,
    Kind::ForeignMember,
    Kind::DuplicateVecId,
    Kind::DimChange,
    Kind::VersionChange,
];

#[derive(Debug, Clone)]
pub struct Mutant {
    pub kind: Kind,
    pub text: String,
    /// 1-based line that was edited.
    pub line: usize,
    /// Whether a diagnostic must point at `line` itself. Orthogonality
    /// breaks are reported on the context lines instead.
    pub local: bool,
}

struct Doc {
    lines: Vec<Vec<String>>,
    radicand: f64,
    vecs: Vec<(usize, String, Vec<f64>)>,
    ctxs: Vec<usize>,
}

fn scalar(tok: &str, k: f64) -> f64 {
    let frac = |s: &str| -> f64 {
        match s.split_once('/') {
            Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
            None => s.parse().unwrap(),
        }
    };
    match tok.split_once(':') {
        Some((a, b)) => frac(a) + frac(b) * k.sqrt(),
        None => frac(tok),
    }
}

fn read(text: &str) -> Doc {
    let lines: Vec<Vec<String>> = text
        .lines()
        .map(|l| {
            let body = l.split('#').next().unwrap();
            body.split_whitespace().map(str::to_string).collect()
        })
        .collect();
    let mut radicand = 1.0;
    let mut vecs = Vec::new();
    let mut ctxs = Vec::new();
    for (i, toks) in lines.iter().enumerate() {
        match toks.first().map(String::as_str) {
            Some("field") => radicand = toks[2].parse().unwrap(),
            Some("vec") => {
                let comps = toks[2..].iter().map(|t| scalar(t, radicand)).collect();
                vecs.push((i, toks[1].clone(), comps));
            }
            Some("ctx") => ctxs.push(i),
            _ => {}
        }
    }
    Doc {
        lines,
        radicand,
        vecs,
        ctxs,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Doc {
    fn vector(&self, id: &str) -> &[f64] {
        &self.vecs.iter().find(|v| v.1 == id).unwrap().2
    }

    /// True if every context stays pairwise orthogonal with `id` bound to `comps`.
    fn contexts_orthogonal_with(&self, id: &str, comps: &[f64]) -> bool {
        self.ctxs.iter().all(|&c| {
            let members = &self.lines[c][1..];
            if !members.iter().any(|m| m == id) {
                return true;
            }
            members
                .iter()
                .filter(|m| *m != id)
                .all(|m| dot(self.vector(m), comps).abs() < 1e-9)
        })
    }

    fn render(&self, line: usize, toks: Vec<String>, original: &str) -> String {
        original
            .lines()
            .enumerate()
            .map(|(i, l)| {
                if i == line {
                    toks.join(" ")
                } else {
                    l.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn line_of(doc: &Doc, directive: &str) -> usize {
    doc.lines
        .iter()
        .position(|t| t.first().map(String::as_str) == Some(directive))
        .unwrap()
}

/// Tries to build a mutant of `kind`; `None` when the document offers no
/// site for it (e.g. a surd mutation in a rational document).
pub fn mutate(text: &str, kind: Kind, rng: &mut impl Rng) -> Option<Mutant> {
    let doc = read(text);
    let (line, toks, local) = match kind {
        Kind::UnknownDirective => {
            let line = *doc
                .vecs
                .iter()
                .map(|v| &v.0)
                .chain(&doc.ctxs)
                .collect::<Vec<_>>()
                .choose(rng)?;
            let mut toks = doc.lines[*line].clone();
            toks[0] = ["vex", "context", "VEC", "ctxs", "vector"]
                .choose(rng)?
                .to_string();
            (*line, toks, true)
        }
        Kind::DropComponent
        | Kind::ExtraComponent
        | Kind::GarbageComponent
        | Kind::ZeroDenominator => {
            let (line, _, comps) = doc.vecs.choose(rng)?;
            let mut toks = doc.lines[*line].clone();
            let pos = 2 + rng.random_range(0..comps.len());
            match kind {
                Kind::DropComponent => {
                    toks.remove(pos);
                }
                Kind::ExtraComponent => toks.insert(pos, rng.random_range(-3..=3).to_string()),
                Kind::GarbageComponent => {
                    toks[pos] = ["x", "1.5", "--1", "1/", "/2", "1/2/3", "+1", "1e3", "½"]
                        .choose(rng)?
                        .to_string()
                }
                _ => toks[pos] = format!("{}/0", rng.random_range(1..=5)),
            }
            (*line, toks, true)
        }
        Kind::SurdInRationalField => {
            if doc.radicand != 1.0 {
                return None;
            }
            let (line, _, comps) = doc.vecs.choose(rng)?;
            let mut toks = doc.lines[*line].clone();
            let pos = 2 + rng.random_range(0..comps.len());
            toks[pos] = format!("{}:1", toks[pos]);
            (*line, toks, true)
        }
        Kind::SkewComponent => {
            let (line, id, comps) = doc.vecs.choose(rng)?;
            let pos = rng.random_range(0..comps.len());
            let delta = *[1i64, -1, 2, 3].choose(rng)?;
            let mut bent = comps.clone();
            bent[pos] += delta as f64;
            if doc.contexts_orthogonal_with(id, &bent) {
                return None;
            }
            let mut toks = doc.lines[*line].clone();
            toks[pos + 2] = if doc.radicand == 1.0 || !toks[pos + 2].contains(':') {
                rational_shift(&toks[pos + 2], delta)
            } else {
                let (a, b) = toks[pos + 2].split_once(':').unwrap();
                format!("{}:{b}", rational_shift(a, delta))
            };
            (*line, toks, false)
        }
        Kind::UndeclaredId | Kind::RepeatedId | Kind::ForeignMember => {
            let line = *doc.ctxs.choose(rng)?;
            let mut toks = doc.lines[line].clone();
            let pos = 1 + rng.random_range(0..toks.len() - 1);
            match kind {
                Kind::UndeclaredId => toks[pos] = format!("{}_ghost", toks[pos]),
                Kind::RepeatedId => {
                    let other = if pos == 1 { 2 } else { 1 };
                    toks[pos] = toks[other].clone();
                }
                _ => {
                    let others: Vec<&String> = toks[1..]
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| i + 1 != pos)
                        .map(|(_, t)| t)
                        .collect();
                    let candidates: Vec<&(usize, String, Vec<f64>)> = doc
                        .vecs
                        .iter()
                        .filter(|v| !toks[1..].contains(&v.1))
                        .filter(|v| others.iter().any(|o| dot(doc.vector(o), &v.2).abs() > 1e-9))
                        .collect();
                    toks[pos] = candidates.choose(rng)?.1.clone();
                }
            }
            (line, toks, true)
        }
        Kind::DuplicateVecId => {
            let a = doc.vecs.choose(rng)?;
            let b = doc.vecs.iter().filter(|v| v.1 != a.1).collect::<Vec<_>>();
            let b = b.choose(rng)?;
            let mut toks = doc.lines[a.0].clone();
            toks[1] = b.1.clone();
            (a.0, toks, a.0 > b.0)
        }
        Kind::DimChange => {
            let line = line_of(&doc, "dim");
            let d: usize = doc.lines[line][1].parse().unwrap();
            let mut toks = doc.lines[line].clone();
            toks[1] = (if rng.random_bool(0.5) { d + 1 } else { d - 1 }).to_string();
            (line, toks, false)
        }
        Kind::VersionChange => {
            let line = line_of(&doc, "ksset");
            let mut toks = doc.lines[line].clone();
            toks[1] = ["2", "0", "1.0", "v1"].choose(rng)?.to_string();
            (line, toks, true)
        }
    };
    Some(Mutant {
        kind,
        text: doc.render(line, toks, text),
        line: line + 1,
        local,
    })
}

fn rational_shift(tok: &str, delta: i64) -> String {
    match tok.split_once('/') {
        Some((p, q)) => {
            let (p, q): (i64, i64) = (p.parse().unwrap(), q.parse().unwrap());
            format!("{}/{q}", p + delta * q)
        }
        None => (tok.parse::<i64>().unwrap() + delta).to_string(),
    }
}
