//! Canonical text encoding of instances.
//!
//! A document is a single JSON object laid out one record per line:
//!
//! ```text
//! {"format_version":1,"kind":"mc","params":{"k_sets":1},"node_count":3,
//! "nodes":[
//! {"role":"set"},
//! {"role":"element","weight":2.5,"color":"black"},
//! {"role":"element","weight":1,"color":"black"}
//! ],
//! "edges":[
//! [0,1,1],
//! [0,2,1]
//! ]}
//! ```
//!
//! Edges are sorted by `(src, dst)`. Numbers use the shortest decimal that
//! reads back to the same `f64`, without exponent. DAG nodes carry
//! `duration` and `resource`; ATSP nodes are empty objects and every
//! off-diagonal entry of the matrix appears as an edge.

use std::fmt::Write as _;

use corobust_core::{
    AtspInstance, Color, CoverageBudget, CoverageInstance, DagInstance, Element, Instance, InstanceError,
    Job, ProblemKind,
};
use serde::Deserialize;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("invalid instance: {0}")]
    Validation(#[from] InstanceError),
}

fn field(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field { field: field.into(), message: message.into() }
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::new();
    write_instance(instance, &mut out).expect("writing to a String cannot fail");
    out
}

fn write_instance(instance: &Instance, out: &mut String) -> std::fmt::Result {
    let params = match instance {
        Instance::Coverage(c) => match c.budget() {
            CoverageBudget::Sets(k) => format!("{{\"k_sets\":{k}}}"),
            CoverageBudget::WhiteElements(k) => format!("{{\"k_white\":{k}}}"),
        },
        _ => "{}".to_string(),
    };
    writeln!(
        out,
        "{{\"format_version\":{FORMAT_VERSION},\"kind\":\"{}\",\"params\":{params},\"node_count\":{},",
        instance.kind(),
        instance.node_count()
    )?;
    out.push_str("\"nodes\":[\n");
    let nodes: Vec<String> = match instance {
        Instance::Dag(d) => d
            .jobs()
            .iter()
            .map(|j| format!("{{\"duration\":{},\"resource\":{}}}", j.duration, j.resource))
            .collect(),
        Instance::Atsp(a) => vec!["{}".to_string(); a.cities()],
        Instance::Coverage(c) => {
            let sets = (0..c.set_count()).map(|_| "{\"role\":\"set\"}".to_string());
            let elements = c.elements().iter().map(|e| {
                let color = match e.color {
                    Color::Black => "black",
                    Color::White => "white",
                };
                format!("{{\"role\":\"element\",\"weight\":{},\"color\":\"{color}\"}}", e.weight)
            });
            sets.chain(elements).collect()
        }
    };
    write_lines(out, &nodes);
    out.push_str("],\n\"edges\":[\n");
    let edges: Vec<String> =
        instance.graph_edges().iter().map(|(s, d, w)| format!("[{s},{d},{w}]")).collect();
    write_lines(out, &edges);
    out.push_str("]}\n");
    Ok(())
}

fn write_lines(out: &mut String, lines: &[String]) {
    for (i, line) in lines.iter().enumerate() {
        out.push_str(line);
        out.push_str(if i + 1 < lines.len() { ",\n" } else { "\n" });
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format_version: u32,
    kind: String,
    params: Params,
    node_count: usize,
    nodes: Vec<NodeDoc>,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    k_sets: Option<usize>,
    k_white: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    duration: Option<f64>,
    resource: Option<f64>,
    role: Option<String>,
    weight: Option<f64>,
    color: Option<String>,
}

impl NodeDoc {
    fn is_empty(&self) -> bool {
        self.duration.is_none()
            && self.resource.is_none()
            && self.role.is_none()
            && self.weight.is_none()
            && self.color.is_none()
    }
}

pub fn parse_kind(s: &str) -> Option<ProblemKind> {
    [ProblemKind::Dag, ProblemKind::Atsp, ProblemKind::MaxCover, ProblemKind::MaxCoverSeparate]
        .into_iter()
        .find(|k| k.as_str() == s)
}

pub fn deserialize_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(doc.format_version));
    }
    let kind = parse_kind(&doc.kind).ok_or_else(|| field("kind", format!("unknown kind {:?}", doc.kind)))?;
    if doc.nodes.len() != doc.node_count {
        return Err(field("nodes", format!("{} nodes listed, node_count is {}", doc.nodes.len(), doc.node_count)));
    }
    let n = doc.node_count;
    for (i, &(s, d, w)) in doc.edges.iter().enumerate() {
        if s >= n || d >= n {
            return Err(InstanceError::NodeOutOfRange { node: s.max(d), node_count: n }.into());
        }
        if !w.is_finite() {
            return Err(field(format!("edges[{i}]"), "weight must be finite"));
        }
    }
    let allowed_params = match kind {
        ProblemKind::MaxCover => (true, false),
        ProblemKind::MaxCoverSeparate => (false, true),
        _ => (false, false),
    };
    if (doc.params.k_sets.is_some() && !allowed_params.0) || (doc.params.k_white.is_some() && !allowed_params.1) {
        return Err(field("params", format!("parameter not valid for kind {kind}")));
    }
    match kind {
        ProblemKind::Dag => dag(doc),
        ProblemKind::Atsp => atsp(doc),
        ProblemKind::MaxCover | ProblemKind::MaxCoverSeparate => coverage(doc, kind),
    }
}

fn unit_weight(i: usize, w: f64) -> Result<(), FormatError> {
    if w == 1.0 {
        Ok(())
    } else {
        Err(field(format!("edges[{i}]"), "membership and precedence edges must have weight 1"))
    }
}

fn dag(doc: Document) -> Result<Instance, FormatError> {
    let mut jobs = Vec::with_capacity(doc.nodes.len());
    for (i, node) in doc.nodes.iter().enumerate() {
        let (Some(duration), Some(resource), None, None, None) =
            (node.duration, node.resource, &node.role, node.weight, &node.color)
        else {
            return Err(field(format!("nodes[{i}]"), "dag nodes need exactly duration and resource"));
        };
        jobs.push(Job::new(duration, resource));
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (i, &(s, d, w)) in doc.edges.iter().enumerate() {
        unit_weight(i, w)?;
        edges.push((s, d));
    }
    Ok(Instance::Dag(DagInstance::new(jobs, edges)?))
}

fn atsp(doc: Document) -> Result<Instance, FormatError> {
    let n = doc.node_count;
    if let Some(i) = doc.nodes.iter().position(|node| !node.is_empty()) {
        return Err(field(format!("nodes[{i}]"), "atsp nodes carry no attributes"));
    }
    let mut weights = vec![f64::NAN; n * n];
    for &(s, d, w) in &doc.edges {
        if s == d {
            return Err(InstanceError::SelfLoop { node: s }.into());
        }
        if !weights[s * n + d].is_nan() {
            return Err(InstanceError::DuplicateEdge { src: s, dst: d }.into());
        }
        weights[s * n + d] = w;
    }
    for i in 0..n {
        weights[i * n + i] = 0.0;
        for j in 0..n {
            if weights[i * n + j].is_nan() {
                return Err(field("edges", format!("missing edge ({i}, {j}); the graph must be complete")));
            }
        }
    }
    Ok(Instance::Atsp(AtspInstance::new(n, weights)?))
}

fn coverage(doc: Document, kind: ProblemKind) -> Result<Instance, FormatError> {
    let set_count = doc.nodes.iter().take_while(|node| node.role.as_deref() == Some("set")).count();
    let mut elements = Vec::with_capacity(doc.nodes.len() - set_count);
    for (i, node) in doc.nodes.iter().enumerate() {
        let ok_shape = node.duration.is_none() && node.resource.is_none();
        if i < set_count {
            if !ok_shape || node.weight.is_some() || node.color.is_some() {
                return Err(field(format!("nodes[{i}]"), "set nodes carry only a role"));
            }
            continue;
        }
        if !ok_shape || node.role.as_deref() != Some("element") {
            return Err(field(format!("nodes[{i}]"), "expected an element node after the set nodes"));
        }
        let weight = node.weight.ok_or_else(|| field(format!("nodes[{i}].weight"), "missing"))?;
        let color = match node.color.as_deref() {
            Some("black") => Color::Black,
            Some("white") => Color::White,
            _ => return Err(field(format!("nodes[{i}].color"), "expected \"black\" or \"white\"")),
        };
        elements.push(Element { weight, color });
    }
    let mut sets = vec![Vec::new(); set_count];
    for (i, &(s, d, w)) in doc.edges.iter().enumerate() {
        unit_weight(i, w)?;
        if s >= set_count || d < set_count {
            return Err(InstanceError::NotBipartite { src: s, dst: d }.into());
        }
        sets[s].push(d - set_count);
    }
    let budget = match kind {
        ProblemKind::MaxCover => {
            CoverageBudget::Sets(doc.params.k_sets.ok_or_else(|| field("params.k_sets", "missing"))?)
        }
        _ => CoverageBudget::WhiteElements(doc.params.k_white.ok_or_else(|| field("params.k_white", "missing"))?),
    };
    Ok(Instance::Coverage(CoverageInstance::new(elements, sets, budget)?))
}
