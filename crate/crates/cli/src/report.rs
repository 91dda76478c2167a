//! Rendering of analysis results: summary tables, network exports and the
//! per-entity detail file. Every renderer is a pure function of its input so
//! output is byte-stable across runs.

use std::fmt::Write as _;

use serde::Serialize;
use vcnet::network::InfluenceNetwork;
use vcnet::pipeline::{Analysis, PairAnalysis};
use vcnet::{Real, VariableId};

use crate::config::TableFormat;

const NA: &str = "NA";
const MAX_PENWIDTH: f64 = 8.0;

fn fixed<T: Real>(v: T) -> String {
    format!("{:.6}", v.as_f64())
}

fn sci(v: f64) -> String {
    format!("{v:.2e}")
}

fn opt<T: Real>(v: Option<T>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.as_f64().to_string())
}

pub fn pair_label(first: &VariableId, second: &VariableId) -> String {
    format!("[{}, {}]", first.display_name(), second.display_name())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Tsv => self.to_tsv(),
            TableFormat::Text => self.to_text(),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let cols = self.header.len();
        let mut widths = vec![0; cols];
        for line in std::iter::once(&self.header).chain(&self.rows) {
            for (w, cell) in widths.iter_mut().zip(line) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut emit = |line: &[String]| {
            let mut text = String::new();
            for (k, cell) in line.iter().enumerate() {
                if k > 0 {
                    text.push_str("  ");
                }
                text.push_str(cell);
                let pad = widths[k] - cell.chars().count();
                text.extend(std::iter::repeat_n(' ', pad));
            }
            out.push_str(text.trim_end());
            out.push('\n');
        };
        emit(&self.header);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        emit(&rule);
        for row in &self.rows {
            emit(row);
        }
        out
    }
}

/// Mean Pearson correlation per pair.
pub fn pair_correlation_table<T: Real>(pairs: &[PairAnalysis<T>]) -> Table {
    let rows = pairs
        .iter()
        .map(|p| {
            let label = pair_label(&p.first, &p.second);
            match &p.aggregate {
                Some(a) => vec![
                    label,
                    fixed(a.e_c),
                    fixed(a.sigma_c),
                    a.n_pearson.to_string(),
                ],
                None => vec![label, NA.into(), NA.into(), "0".into()],
            }
        })
        .collect();
    Table {
        header: ["pair", "E_C", "sigma_C", "N_C"].map(String::from).to_vec(),
        rows,
    }
}

/// Mean ΔF, its spread, the two-sided p-value and the inferred direction.
pub fn directionality_table<T: Real>(pairs: &[PairAnalysis<T>]) -> Table {
    let rows = pairs
        .iter()
        .map(|p| {
            let label = pair_label(&p.first, &p.second);
            match &p.aggregate {
                Some(a) if a.z.is_some() => vec![
                    label,
                    fixed(a.e_df),
                    fixed(a.sigma_df),
                    sci(a.p_value.as_f64()),
                    a.verdict.arrow().to_string(),
                ],
                Some(a) => vec![
                    label,
                    fixed(a.e_df),
                    fixed(a.sigma_df),
                    NA.into(),
                    String::new(),
                ],
                None => vec![label, NA.into(), NA.into(), NA.into(), String::new()],
            }
        })
        .collect();
    Table {
        header: ["pair", "E_dF", "sigma_dF", "p", "direction"]
            .map(String::from)
            .to_vec(),
        rows,
    }
}

/// One row per (entity, pair) that passed the complete-case filter.
pub fn entity_detail<T: Real>(pairs: &[PairAnalysis<T>]) -> String {
    let mut out = String::from("entity\tfirst\tsecond\tpearson\tF_forward\tF_backward\tdelta_F\tomega_first\tomega_second\n");
    for pair in pairs {
        for firm in &pair.firms {
            let vc = &firm.vc;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                firm.entity,
                firm.pair.0,
                firm.pair.1,
                opt(vc.pearson),
                opt(vc.f_forward),
                opt(vc.f_backward),
                opt(vc.delta_f),
                vc.omega_sizes.0,
                vc.omega_sizes.1
            );
        }
    }
    out
}

#[derive(Serialize)]
struct JsonNode<'a> {
    id: &'a str,
    label: &'a str,
}

#[derive(Serialize)]
struct JsonUndirected<'a> {
    source: &'a str,
    target: &'a str,
    weight: f64,
}

#[derive(Serialize)]
struct JsonDirected<'a> {
    source: &'a str,
    target: &'a str,
    weight: f64,
    p_value: f64,
}

#[derive(Serialize)]
struct JsonNetwork<'a> {
    nodes: Vec<JsonNode<'a>>,
    undirected_edges: Vec<JsonUndirected<'a>>,
    directed_edges: Vec<JsonDirected<'a>>,
}

fn label_of<'a>(variables: &'a [VariableId], code: &'a str) -> &'a str {
    variables
        .iter()
        .find(|v| v.code == code)
        .map_or(code, |v| v.label.as_str())
}

/// Node-link JSON holding both networks. Undirected weights are mean Pearson
/// correlations; directed weights are `-log10(p)`.
pub fn network_json<T: Real>(network: &InfluenceNetwork<T>, variables: &[VariableId]) -> String {
    let doc = JsonNetwork {
        nodes: variables
            .iter()
            .map(|v| JsonNode {
                id: &v.code,
                label: &v.label,
            })
            .chain(
                network
                    .nodes
                    .iter()
                    .filter(|c| !variables.iter().any(|v| &v.code == *c))
                    .map(|c| JsonNode { id: c, label: c }),
            )
            .collect(),
        undirected_edges: network
            .undirected
            .iter()
            .map(|e| JsonUndirected {
                source: &e.a,
                target: &e.b,
                weight: e.weight.as_f64(),
            })
            .collect(),
        directed_edges: network
            .directed
            .iter()
            .map(|e| JsonDirected {
                source: &e.source,
                target: &e.target,
                weight: e.weight.as_f64(),
                p_value: e.p_value.as_f64(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("network serializes");
    text.push('\n');
    text
}

fn penwidth(weight: f64, max: f64) -> f64 {
    if max > 0.0 && weight.is_finite() {
        MAX_PENWIDTH * weight.abs() / max
    } else {
        1.0
    }
}

fn dot_nodes(out: &mut String, network_nodes: &[String], variables: &[VariableId]) {
    let mut codes: Vec<&str> = variables.iter().map(|v| v.code.as_str()).collect();
    for c in network_nodes {
        if !codes.contains(&c.as_str()) {
            codes.push(c);
        }
    }
    for code in codes {
        let _ = writeln!(
            out,
            "  \"{code}\" [label=\"{}({code})\"];",
            label_of(variables, code)
        );
    }
}

/// Graphviz export of the correlation network.
pub fn correlation_dot<T: Real>(network: &InfluenceNetwork<T>, variables: &[VariableId]) -> String {
    let max = network
        .undirected
        .iter()
        .map(|e| e.weight.as_f64().abs())
        .fold(0.0, f64::max);
    let mut out = String::new();
    let _ = writeln!(out, "// edge weight: mean Pearson correlation E_C");
    let _ = writeln!(
        out,
        "// penwidth = {MAX_PENWIDTH} * |E_C| / {max}; negative weights are dashed"
    );
    out.push_str("graph correlation {\n");
    dot_nodes(&mut out, &network.nodes, variables);
    for e in &network.undirected {
        let w = e.weight.as_f64();
        let style = if w < 0.0 { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [weight={w}, label=\"{w:.3}\", penwidth={:.4}{style}];",
            e.a,
            e.b,
            penwidth(w, max)
        );
    }
    out.push_str("}\n");
    out
}

/// Graphviz export of the directed influence network.
pub fn directed_dot<T: Real>(network: &InfluenceNetwork<T>, variables: &[VariableId]) -> String {
    let max = network
        .directed
        .iter()
        .map(|e| e.weight.as_f64())
        .filter(|w| w.is_finite())
        .fold(0.0, f64::max);
    let mut out = String::new();
    let _ = writeln!(out, "// edge weight: -log10(p)");
    let _ = writeln!(out, "// penwidth = {MAX_PENWIDTH} * weight / {max}");
    out.push_str("digraph influence {\n");
    dot_nodes(&mut out, &network.nodes, variables);
    for e in &network.directed {
        let w = e.weight.as_f64();
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [weight={w}, label=\"p={}\", penwidth={:.4}];",
            e.source,
            e.target,
            sci(e.p_value.as_f64()),
            penwidth(w, max)
        );
    }
    out.push_str("}\n");
    out
}

pub const PAIR_CORRELATION: &str = "pair_correlation";
pub const DIRECTIONALITY: &str = "directionality";
pub const NETWORK_JSON: &str = "network.json";
pub const CORRELATION_DOT: &str = "correlation_network.dot";
pub const DIRECTED_DOT: &str = "directed_network.dot";
pub const ENTITY_DETAIL: &str = "entity_detail.tsv";

/// All output files for an analysis as `(file name, contents)`, in write
/// order.
pub fn render_all<T: Real>(
    analysis: &Analysis<T>,
    variables: &[VariableId],
    formats: &[TableFormat],
) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let t1 = pair_correlation_table(&analysis.pairs);
    let t2 = directionality_table(&analysis.pairs);
    for &format in formats {
        files.push((
            format!("{PAIR_CORRELATION}.{}", format.extension()),
            t1.render(format),
        ));
        files.push((
            format!("{DIRECTIONALITY}.{}", format.extension()),
            t2.render(format),
        ));
    }
    files.push((
        NETWORK_JSON.into(),
        network_json(&analysis.network, variables),
    ));
    files.push((
        CORRELATION_DOT.into(),
        correlation_dot(&analysis.network, variables),
    ));
    files.push((
        DIRECTED_DOT.into(),
        directed_dot(&analysis.network, variables),
    ));
    files.push((ENTITY_DETAIL.into(), entity_detail(&analysis.pairs)));
    files
}
