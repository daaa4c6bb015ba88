//! `ksineq`: validate, color and bound Kochen-Specker sets from the shell.
//! [`run`] takes an argument vector and returns what the binary would print.
//!
//! Exit status: 0 valid or colorable, 2 when a set admits no non-contextual
//! assignment, 1 for usage, input and validation errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ksineq_core::bounds::{
    bound_report, critical_rate, format_table, published_rows, table_report, ErrorRates, NoiseRate,
};
use ksineq_core::catalog;
use ksineq_core::engine::{find_coloring, min_defect, Coloring};
use ksineq_core::format::{parse_document, ParseError, SetDocument};
use ksineq_core::model::build_stats;
use ksineq_core::sim::{default_base, empirical_inequality_check, simulate_model, TrialModel};

#[derive(Parser, Debug)]
#[command(name = "ksineq", version, about = "Kochen-Specker inequality toolkit")]
struct Cli {
    /// Output mode.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check structure and orthogonality of a set.
    Validate { set: String },
    /// Print n, N, M and the multiplicity histogram.
    Stats { set: String },
    /// Search for a non-contextual assignment.
    Color { set: String },
    /// Minimum number of violated constraints over contextual assignments.
    Defect { set: String },
    /// Margin 1 − Mδ − Nε and the bound δ ≥ (1 − Nε)/M.
    Bounds {
        set: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Largest independent flip rate that still forces a contradiction.
    #[command(name = "critical-r")]
    CriticalR {
        /// Take N, M and d from this set instead of the flags.
        #[arg(conflicts_with_all = ["big_n", "big_m", "d"], required_unless_present_all = ["big_n", "big_m", "d"])]
        set: Option<String>,
        #[arg(long = "N", requires_all = ["big_m", "d"])]
        big_n: Option<usize>,
        #[arg(long = "M", requires_all = ["big_n", "d"])]
        big_m: Option<usize>,
        #[arg(long, requires_all = ["big_n", "big_m"])]
        d: Option<usize>,
    },
    /// Monte Carlo trials of the independent-flip model.
    Simulate {
        set: String,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Critical rates for the six published parameter rows.
    Table,
}

/// A failure that ends the run with status 1.
struct Failure(String);

/// Result of one invocation: exit status and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: u8,
    pub stdout: String,
    pub stderr: String,
}

struct Output {
    text: String,
    json: Value,
    status: u8,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            status: 0,
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    status: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    status: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(out) => Outcome {
            status: out.status,
            stdout: match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).unwrap() + "\n",
            },
            stderr: String::new(),
        },
        Err(Failure(msg)) => Outcome {
            status: 1,
            stdout: String::new(),
            stderr: format!("{}\n", msg.trim_end()),
        },
    }
}

fn load(arg: &str) -> Result<SetDocument, Failure> {
    if let Some(name) = arg.strip_prefix("catalog:") {
        return catalog::load_document(name).map_err(|e| Failure(e.to_string()));
    }
    let text = std::fs::read_to_string(Path::new(arg))
        .map_err(|e| Failure(format!("{arg}: cannot read: {e}")))?;
    parse_document(&text, Some(arg)).map_err(|e| Failure(render_diagnostics(arg, &e)))
}

fn render_diagnostics(source: &str, err: &ParseError) -> String {
    let mut out = String::new();
    for d in &err.diagnostics {
        let _ = write!(out, "{source}:{}: {}", d.line, d.message);
        if let Some(detail) = &d.detail {
            let _ = write!(out, ": {detail}");
        }
        out.push('\n');
    }
    out
}

fn diagnostics_json(err: &ParseError) -> Value {
    err.diagnostics
        .iter()
        .map(|d| json!({ "line": d.line, "message": d.message, "detail": d.detail }))
        .collect()
}

fn execute(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Validate { set } => validate(set),
        Command::Stats { set } => stats(set),
        Command::Color { set } => color(set),
        Command::Defect { set } => defect(set),
        Command::Bounds {
            set,
            delta,
            epsilon,
        } => bounds(set, *delta, *epsilon),
        Command::CriticalR {
            set,
            big_n,
            big_m,
            d,
        } => match (set, big_n, big_m, d) {
            (Some(set), ..) => {
                let doc = load(set)?;
                let st = build_stats(&doc.set);
                critical(
                    doc.set.name(),
                    st.context_count,
                    st.connection_count,
                    st.dimension,
                )
            }
            (None, Some(n), Some(m), Some(d)) => critical("parameters", *n, *m, *d),
            _ => Err(Failure(
                "critical-r needs a set or all of --N, --M, --d".into(),
            )),
        },
        Command::Simulate {
            set,
            r,
            trials,
            seed,
        } => simulate(set, *r, *trials, *seed),
        Command::Table => table(),
    }
}

fn validate(arg: &str) -> Result<Output, Failure> {
    // Invalid files still produce a report, so parse errors are not a Failure here.
    let doc = if arg.starts_with("catalog:") {
        load(arg)?
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| Failure(format!("{arg}: cannot read: {e}")))?;
        match parse_document(&text, Some(arg)) {
            Ok(doc) => doc,
            Err(e) => {
                return Ok(Output {
                    text: format!("invalid: {arg}\n{}", render_diagnostics(arg, &e)),
                    json: json!({ "source": arg, "valid": false, "diagnostics": diagnostics_json(&e) }),
                    status: 1,
                })
            }
        }
    };
    let set = &doc.set;
    Ok(Output::ok(
        format!(
            "valid: {} (d={}, n={}, N={}), all contexts orthogonal\n",
            set.name(),
            set.dimension(),
            set.vectors().len(),
            set.contexts().len()
        ),
        json!({ "source": arg, "valid": true, "name": set.name(), "diagnostics": [] }),
    ))
}

fn stats(arg: &str) -> Result<Output, Failure> {
    let doc = load(arg)?;
    let st = build_stats(&doc.set);
    let hist = st.multiplicity_histogram();
    let mut text = format!(
        "set {}\nd {}\nn {}\nN {}\nM {}{}\n",
        doc.set.name(),
        st.dimension,
        st.vector_count,
        st.context_count,
        st.connection_count,
        if st.m_overridden {
            format!(" (override; all pairs {})", st.all_pairs_count())
        } else {
            String::new()
        }
    );
    text.push_str("multiplicity histogram (contexts per vector: vectors)\n");
    for (k, count) in &hist {
        let _ = writeln!(text, "  {k}: {count}");
    }
    Ok(Output::ok(
        text,
        json!({
            "name": doc.set.name(),
            "d": st.dimension,
            "n": st.vector_count,
            "N": st.context_count,
            "M": st.connection_count,
            "m_overridden": st.m_overridden,
            "all_pairs_M": st.all_pairs_count(),
            "histogram": hist.iter().map(|(k, c)| json!({ "contexts": k, "vectors": c })).collect::<Vec<_>>(),
        }),
    ))
}

fn color(arg: &str) -> Result<Output, Failure> {
    let doc = load(arg)?;
    let set = &doc.set;
    let report = find_coloring(set);
    match &report.coloring {
        Coloring::Colorable(a) => {
            let mut text = format!(
                "colorable: {} ({} search nodes)\n",
                set.name(),
                report.nodes
            );
            for (v, &x) in set.vectors().iter().zip(a.values()) {
                let _ = writeln!(text, "  {} {x}", v.id);
            }
            let values: serde_json::Map<String, Value> = set
                .vectors()
                .iter()
                .zip(a.values())
                .map(|(v, &x)| (v.id.clone(), json!(x)))
                .collect();
            Ok(Output::ok(
                text,
                json!({ "name": set.name(), "colorable": true, "nodes": report.nodes, "assignment": values }),
            ))
        }
        Coloring::NoColoring => Ok(Output {
            text: format!(
                "KS: {}: no non-contextual assignment exists (exhaustive search, {} nodes)\n",
                set.name(),
                report.nodes
            ),
            json: json!({ "name": set.name(), "colorable": false, "nodes": report.nodes }),
            status: 2,
        }),
    }
}

fn defect(arg: &str) -> Result<Output, Failure> {
    let doc = load(arg)?;
    let set = &doc.set;
    let report = min_defect(set).map_err(|e| Failure(e.to_string()))?;
    let rows = report.witness.rows();
    let mut text = format!(
        "{}: minimum defect {} (sum defects {}, connection defects {}; {} search nodes)\nwitness (one row per context):\n",
        set.name(),
        report.d_min,
        report.breakdown.sum_defects,
        report.breakdown.connection_defects,
        report.nodes
    );
    let mut contexts = Vec::new();
    for (ctx, row) in set.contexts().iter().zip(&rows) {
        let ids: Vec<&str> = ctx
            .vectors()
            .iter()
            .map(|&v| set.vectors()[v].id.as_str())
            .collect();
        let cells: Vec<String> = ids
            .iter()
            .zip(row)
            .map(|(id, x)| format!("{id}={x}"))
            .collect();
        let _ = writeln!(text, "  {}", cells.join(" "));
        contexts.push(json!({ "vectors": ids, "values": row }));
    }
    Ok(Output::ok(
        text,
        json!({
            "name": set.name(),
            "d_min": report.d_min,
            "sum_defects": report.breakdown.sum_defects,
            "connection_defects": report.breakdown.connection_defects,
            "nodes": report.nodes,
            "witness": contexts,
        }),
    ))
}

fn bounds(arg: &str, delta: f64, epsilon: f64) -> Result<Output, Failure> {
    let doc = load(arg)?;
    let rates = ErrorRates::new(delta, epsilon).map_err(|e| Failure(e.to_string()))?;
    let report = bound_report(doc.set.name(), &build_stats(&doc.set), rates)
        .map_err(|e| Failure(e.to_string()))?;
    let verdict = if report.margin.contradiction {
        "contradiction with non-contextuality"
    } else {
        "no contradiction"
    };
    let text = format!(
        "{} (d={}, n={}, N={}, M={})\ndelta {delta}  epsilon {epsilon}\nmargin 1 - M*delta - N*epsilon = {:.12}: {verdict}\ndelta >= (1 - N*epsilon)/M = {:.12}{}\n",
        report.name,
        report.d,
        report.n,
        report.big_n,
        report.big_m,
        report.margin.margin,
        report.delta_bound.delta_min,
        if report.delta_bound.vacuous { " (vacuous)" } else { "" }
    );
    Ok(Output::ok(text, serde_json::to_value(&report).unwrap()))
}

fn critical(name: &str, n: usize, m: usize, d: usize) -> Result<Output, Failure> {
    let cr = critical_rate(n, m, d).map_err(|e| Failure(e.to_string()))?;
    let text = format!(
        "{name} (N={n}, M={m}, d={d})\nr* = {:.12}\nr (4-decimal floor) = {:.4}\nbracket [{:.15}, {:.15}] after {} bisection steps\n",
        cr.r_critical, cr.r_floor4, cr.bracket.0, cr.bracket.1, cr.iterations
    );
    Ok(Output::ok(
        text,
        json!({
            "name": name,
            "d": d,
            "N": n,
            "M": m,
            "r_critical": cr.r_critical,
            "r_floor4": cr.r_floor4,
            "bracket": [cr.bracket.0, cr.bracket.1],
            "iterations": cr.iterations,
        }),
    ))
}

fn simulate(arg: &str, r: f64, trials: u64, seed: u64) -> Result<Output, Failure> {
    let doc = load(arg)?;
    let set = &doc.set;
    let flip_rate = NoiseRate::new(r).map_err(|e| Failure(e.to_string()))?;
    let model = TrialModel {
        set,
        base: default_base(set),
        flip_rate,
        seed,
    };
    let summary = simulate_model(&model, trials).map_err(|e| Failure(e.to_string()))?;
    let stats = build_stats(set);
    let check = empirical_inequality_check(&summary, &stats, &find_coloring(set)).ok();
    let max = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
    let mut text = format!(
        "{}: {trials} trials, r = {r}, seed = {seed}\nmean total defect {:.6}\nmax per-connection mismatch rate {:.6} over {} connections\nmax per-context sum-error rate {:.6} over {} contexts\n",
        set.name(),
        summary.mean_defect,
        max(&summary.delta_hat),
        summary.delta_hat.len(),
        max(&summary.epsilon_hat),
        summary.epsilon_hat.len(),
    );
    match &check {
        Some(c) => {
            let _ = writeln!(
                text,
                "inequality {}: smallest per-trial defect {}, M*max(delta) + N*max(epsilon) = {:.6}",
                if c.holds { "holds" } else { "VIOLATED" },
                c.min_trial_defect,
                c.implied_lhs
            );
        }
        None => text.push_str("set is colorable: inequality check not applicable\n"),
    }
    Ok(Output::ok(
        text,
        json!({
            "seed": summary.seed,
            "trials": summary.trials,
            "r": summary.r,
            "delta_hat": summary.delta_hat,
            "epsilon_hat": summary.epsilon_hat,
            "mean_defect": summary.mean_defect,
            "min_trial_defect": summary.min_trial_defect,
            "inequality": check,
        }),
    ))
}

fn table() -> Result<Output, Failure> {
    let entries = table_report(&published_rows()).map_err(|e| Failure(e.to_string()))?;
    Ok(Output::ok(
        format_table(&entries),
        serde_json::to_value(&entries).unwrap(),
    ))
}
