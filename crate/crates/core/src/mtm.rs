//! Multiple-testing correction of the raw p-value matrix and thresholding
//! into a network.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HnetError, Result};
use crate::graph::{Edge, GraphMeta, NetworkGraph, Node};
use crate::stats::{Direction, LogP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Method {
    #[default]
    #[serde(rename = "holm")]
    Holm,
    #[serde(rename = "bonferroni")]
    Bonferroni,
    #[serde(rename = "bh")]
    BenjaminiHochberg,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Holm, Method::Bonferroni, Method::BenjaminiHochberg];

    pub fn name(self) -> &'static str {
        match self {
            Method::Holm => "holm",
            Method::Bonferroni => "bonferroni",
            Method::BenjaminiHochberg => "bh",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HnetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "holm" => Ok(Method::Holm),
            "bonferroni" => Ok(Method::Bonferroni),
            "bh" | "fdr_bh" | "benjamini-hochberg" => Ok(Method::BenjaminiHochberg),
            other => Err(HnetError::InvalidConfig(format!(
                "unknown correction method {other:?}"
            ))),
        }
    }
}

/// Which hypotheses are corrected together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyScope {
    /// One family per response row.
    #[default]
    PerResponse,
    /// The whole matrix is one family.
    Global,
}

impl FromStr for FamilyScope {
    type Err = HnetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "per-response" | "per_response" | "response" => Ok(FamilyScope::PerResponse),
            "global" => Ok(FamilyScope::Global),
            other => Err(HnetError::InvalidConfig(format!(
                "unknown family scope {other:?}"
            ))),
        }
    }
}

/// How edges into numeric features are rendered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumericNodeStyle {
    /// One node per (feature, direction, response-group median), e.g.
    /// `Fare=high_60.3`.
    #[default]
    PerGroupMedian,
    /// A single node per numeric feature, id = feature name.
    PerFeature,
}

/// Adjusts one family of p-values. Output is aligned with the input.
pub fn adjust(method: Method, raw: &[LogP]) -> Vec<LogP> {
    let m = raw.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| raw[a].cmp(&raw[b]).then(a.cmp(&b)));
    let mut out = vec![LogP::ONE; m];
    match method {
        Method::Bonferroni => {
            for (o, p) in out.iter_mut().zip(raw) {
                *o = p.scale(m as f64);
            }
        }
        Method::Holm => {
            let mut running: Option<LogP> = None;
            for (rank, &i) in order.iter().enumerate() {
                let v = raw[i].scale((m - rank) as f64);
                let r = running.map_or(v, |r| r.max(v));
                running = Some(r);
                out[i] = r;
            }
        }
        Method::BenjaminiHochberg => {
            let mut running = LogP::ONE;
            for (rank, &i) in order.iter().enumerate().rev() {
                running = running.min(raw[i].scale_ratio(m as f64, (rank + 1) as f64));
                out[i] = running;
            }
        }
    }
    out
}

/// Location shift of a numeric feature between the response group and the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericShift {
    pub direction: Direction,
    pub median_in: f64,
    pub median_out: f64,
}

/// Raw and adjusted p-values between response categories (rows) and
/// candidate categories or numeric features (columns). Cells are row-major;
/// `None` marks a pair that was not tested.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociationMatrix {
    /// Table feature order, used to sort nodes.
    pub features: Vec<String>,
    pub n_rows: usize,
    pub rows: Vec<Node>,
    pub cols: Vec<Node>,
    pub numeric_cols: Vec<bool>,
    pub raw: Vec<Option<LogP>>,
    pub adjusted: Vec<Option<LogP>>,
    pub shifts: Vec<Option<NumericShift>>,
    pub method: Method,
    pub family_scope: FamilyScope,
}

impl AssociationMatrix {
    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn raw_at(&self, row: usize, col: usize) -> Option<LogP> {
        self.raw[row * self.n_cols() + col]
    }

    pub fn adjusted_at(&self, row: usize, col: usize) -> Option<LogP> {
        self.adjusted[row * self.n_cols() + col]
    }

    pub fn shift_at(&self, row: usize, col: usize) -> Option<NumericShift> {
        self.shifts[row * self.n_cols() + col]
    }

    pub fn row_index(&self, id: &str) -> Option<usize> {
        self.rows.iter().position(|n| n.id == id)
    }

    pub fn col_index(&self, id: &str) -> Option<usize> {
        self.cols.iter().position(|n| n.id == id)
    }

    pub fn tested(&self) -> usize {
        self.raw.iter().flatten().count()
    }

    /// Fills `adjusted` from `raw` using the matrix's method and scope.
    pub fn correct(&mut self) {
        let width = self.n_cols();
        match self.family_scope {
            FamilyScope::Global => {
                let cells: Vec<(usize, LogP)> = self
                    .raw
                    .iter()
                    .enumerate()
                    .filter_map(|(i, p)| p.map(|p| (i, p)))
                    .collect();
                let values: Vec<LogP> = cells.iter().map(|c| c.1).collect();
                let adjusted = adjust(self.method, &values);
                self.adjusted = vec![None; self.raw.len()];
                for ((i, _), a) in cells.into_iter().zip(adjusted) {
                    self.adjusted[i] = Some(a);
                }
            }
            FamilyScope::PerResponse => {
                if width == 0 {
                    self.adjusted = self.raw.clone();
                    return;
                }
                let method = self.method;
                self.adjusted = self
                    .raw
                    .par_chunks(width)
                    .flat_map_iter(|row| {
                        let values: Vec<LogP> = row.iter().flatten().copied().collect();
                        let mut adjusted = adjust(method, &values).into_iter();
                        row.iter()
                            .map(|p| p.map(|_| adjusted.next().expect("one per tested cell")))
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
        }
    }

    fn sort_key(&self, node: &Node) -> (Vec<usize>, String) {
        let positions = node
            .feature
            .split('&')
            .map(|f| {
                self.features
                    .iter()
                    .position(|g| g == f)
                    .unwrap_or(usize::MAX)
            })
            .collect();
        (positions, node.label.clone())
    }

    /// Directed network of every adjusted p ≤ `alpha`. Only nodes incident to
    /// an edge are kept; nodes follow feature order, then label.
    pub fn edge_weights(&self, alpha: f64, style: NumericNodeStyle) -> Result<NetworkGraph> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(HnetError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let cutoff = LogP::from_p(alpha);
        let width = self.n_cols();
        let mut nodes: BTreeMap<String, Node> = BTreeMap::new();
        let mut edges = Vec::new();
        for (r, source) in self.rows.iter().enumerate() {
            for (c, col) in self.cols.iter().enumerate() {
                let Some(adj) = self.adjusted[r * width + c] else {
                    continue;
                };
                if adj > cutoff {
                    continue;
                }
                let shift = self.shifts[r * width + c];
                let target = match (self.numeric_cols[c], style, shift) {
                    (true, NumericNodeStyle::PerGroupMedian, Some(s)) => {
                        let side = match s.direction {
                            Direction::Higher => "high",
                            Direction::Lower => "low",
                        };
                        let label = format!("{side}_{:.1}", s.median_in);
                        Node {
                            id: format!("{}={label}", col.feature),
                            label,
                            ..col.clone()
                        }
                    }
                    _ => col.clone(),
                };
                edges.push(Edge {
                    source: source.id.clone(),
                    target: target.id.clone(),
                    weight: adj.weight(),
                    direction: shift.map(|s| s.direction),
                });
                nodes
                    .entry(source.id.clone())
                    .or_insert_with(|| source.clone());
                nodes.entry(target.id.clone()).or_insert(target);
            }
        }
        let mut nodes: Vec<Node> = nodes.into_values().collect();
        nodes.sort_by_cached_key(|n| self.sort_key(n));
        let rank: BTreeMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        edges.sort_by_key(|e| (rank[e.source.as_str()], rank[e.target.as_str()]));
        Ok(NetworkGraph {
            edges,
            meta: GraphMeta {
                alpha,
                mtm: self.method.name().to_string(),
                n_rows: self.n_rows,
                directed: true,
            },
            nodes,
        })
    }
}
