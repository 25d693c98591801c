//! The association network: nodes, weighted edges, symmetrization and
//! serialization to adjacency CSV, JSON and GraphML.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HnetError, Result};
use crate::stats::{Direction, LogP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub feature: String,
    pub label: String,
    pub positives: usize,
    /// Fraction of rows where the parent feature is observed.
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    /// −log10 of the adjusted p-value.
    pub weight: f64,
    /// Set on edges into numeric features.
    pub direction: Option<Direction>,
}

impl Edge {
    pub fn adjusted_log10_p(&self) -> f64 {
        -self.weight
    }

    pub fn adjusted(&self) -> LogP {
        LogP::from_log10(-self.weight)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub alpha: f64,
    pub mtm: String,
    pub n_rows: usize,
    #[serde(default = "default_directed")]
    pub directed: bool,
}

fn default_directed() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub meta: GraphMeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetrizeMode {
    /// Keep a link present in either direction, at the larger weight.
    #[default]
    Max,
    /// Keep a link only when both directions are present.
    And,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    AdjacencyCsv,
    GraphJson,
    GraphMl,
}

impl FromStr for ExportFormat {
    type Err = HnetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" | "adjacency" | "adjacency-csv" => Ok(Self::AdjacencyCsv),
            "json" | "graph-json" => Ok(Self::GraphJson),
            "graphml" => Ok(Self::GraphMl),
            other => Err(HnetError::UnsupportedFormat(other.to_string())),
        }
    }
}

fn feature_parts(feature: &str) -> impl Iterator<Item = &str> {
    feature.split('&')
}

impl NetworkGraph {
    pub fn empty(meta: GraphMeta) -> Self {
        Self {
            nodes: Vec::new(),
            edges: Vec::new(),
            meta,
        }
    }

    pub fn is_directed(&self) -> bool {
        self.meta.directed
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect()
    }

    /// Checks the structural invariants: unique ids, known endpoints, no
    /// self-loops or intra-feature edges, positive finite weights.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(HnetError::InvalidConfig(msg));
        let index = self.index();
        if index.len() != self.nodes.len() {
            return invalid("duplicate node id".into());
        }
        for e in &self.edges {
            let (Some(&s), Some(&t)) = (index.get(e.source.as_str()), index.get(e.target.as_str()))
            else {
                return invalid(format!(
                    "edge {} -> {} has an unknown endpoint",
                    e.source, e.target
                ));
            };
            if s == t {
                return invalid(format!("self-loop on {}", e.source));
            }
            let src: HashSet<&str> = feature_parts(&self.nodes[s].feature).collect();
            if feature_parts(&self.nodes[t].feature).any(|f| src.contains(f)) {
                return invalid(format!("intra-feature edge {} -> {}", e.source, e.target));
            }
            if !(e.weight.is_finite() && e.weight >= 0.0) {
                return invalid(format!(
                    "bad weight {} on {} -> {}",
                    e.weight, e.source, e.target
                ));
            }
        }
        Ok(())
    }

    /// Collapses directed edges onto unordered node pairs. An undirected
    /// input counts each edge as present in both directions, so applying
    /// this twice changes nothing.
    pub fn symmetrize(&self, mode: SymmetrizeMode) -> NetworkGraph {
        let index = self.index();
        // (lo, hi) -> [lo->hi, hi->lo]
        let mut pairs: BTreeMap<(usize, usize), [Option<&Edge>; 2]> = BTreeMap::new();
        for e in &self.edges {
            let (s, t) = (index[e.source.as_str()], index[e.target.as_str()]);
            let key = (s.min(t), s.max(t));
            let slot = pairs.entry(key).or_default();
            if self.meta.directed {
                slot[usize::from(s > t)] = Some(e);
            } else {
                *slot = [Some(e), Some(e)];
            }
        }
        let mut edges = Vec::new();
        for ((lo, hi), slot) in pairs {
            let keep = match mode {
                SymmetrizeMode::Max => slot.iter().any(Option::is_some),
                SymmetrizeMode::And => slot.iter().all(Option::is_some),
            };
            if !keep {
                continue;
            }
            let best = slot
                .iter()
                .flatten()
                .fold(None::<&Edge>, |acc, e| match acc {
                    Some(a) if a.weight >= e.weight => Some(a),
                    _ => Some(e),
                })
                .expect("kept pair has an edge");
            edges.push(Edge {
                source: self.nodes[lo].id.clone(),
                target: self.nodes[hi].id.clone(),
                weight: best.weight,
                direction: best.direction,
            });
        }
        NetworkGraph {
            nodes: self.nodes.clone(),
            edges,
            meta: GraphMeta {
                directed: false,
                ..self.meta.clone()
            },
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let g: NetworkGraph = serde_json::from_slice(bytes)?;
        g.validate()?;
        Ok(g)
    }

    /// Square weight matrix in node order; absent links are 0.
    pub fn adjacency(&self) -> Vec<Vec<f64>> {
        let index = self.index();
        let n = self.nodes.len();
        let mut m = vec![vec![0.0; n]; n];
        for e in &self.edges {
            let (s, t) = (index[e.source.as_str()], index[e.target.as_str()]);
            m[s][t] = e.weight;
            if !self.meta.directed {
                m[t][s] = e.weight;
            }
        }
        m
    }

    pub fn export(&self, format: ExportFormat) -> Result<Vec<u8>> {
        match format {
            ExportFormat::GraphJson => self.to_json(),
            ExportFormat::AdjacencyCsv => self.adjacency_csv(),
            ExportFormat::GraphMl => Ok(self.graphml().into_bytes()),
        }
    }

    fn adjacency_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| HnetError::Io(std::io::Error::other(e));
        let mut header = vec!["node".to_string()];
        header.extend(self.nodes.iter().map(|n| n.id.clone()));
        w.write_record(&header).map_err(csv_err)?;
        for (node, row) in self.nodes.iter().zip(self.adjacency()) {
            let mut rec = vec![node.id.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.into_inner()
            .map_err(|e| HnetError::Io(std::io::Error::other(e.to_string())))
    }

    fn graphml(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str(
            "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
             xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
             xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
             http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
        );
        for (id, target, ty) in [
            ("feature", "node", "string"),
            ("label", "node", "string"),
            ("positives", "node", "int"),
            ("fraction", "node", "double"),
            ("weight", "edge", "double"),
            ("direction", "edge", "string"),
        ] {
            let _ = writeln!(
                s,
                "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
            );
        }
        let default = if self.meta.directed {
            "directed"
        } else {
            "undirected"
        };
        let _ = writeln!(s, "  <graph id=\"hnet\" edgedefault=\"{default}\">");
        for n in &self.nodes {
            let _ = writeln!(s, "    <node id=\"{}\">", xml_escape(&n.id));
            let _ = writeln!(
                s,
                "      <data key=\"feature\">{}</data>",
                xml_escape(&n.feature)
            );
            let _ = writeln!(
                s,
                "      <data key=\"label\">{}</data>",
                xml_escape(&n.label)
            );
            let _ = writeln!(s, "      <data key=\"positives\">{}</data>", n.positives);
            let _ = writeln!(s, "      <data key=\"fraction\">{}</data>", n.fraction);
            s.push_str("    </node>\n");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "    <edge source=\"{}\" target=\"{}\">",
                xml_escape(&e.source),
                xml_escape(&e.target)
            );
            let _ = writeln!(s, "      <data key=\"weight\">{}</data>", e.weight);
            if let Some(d) = e.direction {
                let d = match d {
                    Direction::Higher => "higher",
                    Direction::Lower => "lower",
                };
                let _ = writeln!(s, "      <data key=\"direction\">{d}</data>");
            }
            s.push_str("    </edge>\n");
        }
        s.push_str("  </graph>\n</graphml>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
