//! Conditional-probability networks and forward sampling.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HnetError, Result};
use crate::ingest::{Column, ColumnData, FeatureKind, FeatureTable};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpdNode {
    pub name: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    /// One row per parent-state combination, first parent varying slowest.
    pub cpt: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork", into = "RawNetwork")]
pub struct CpdNetwork {
    nodes: Vec<CpdNode>,
    parent_index: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    nodes: Vec<CpdNode>,
}

impl TryFrom<RawNetwork> for CpdNetwork {
    type Error = HnetError;

    fn try_from(raw: RawNetwork) -> Result<Self> {
        CpdNetwork::new(raw.nodes)
    }
}

impl From<CpdNetwork> for RawNetwork {
    fn from(net: CpdNetwork) -> Self {
        RawNetwork { nodes: net.nodes }
    }
}

impl CpdNetwork {
    pub fn new(nodes: Vec<CpdNode>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.name.as_str(), i).is_some() {
                return Err(HnetError::DuplicateNode(n.name.clone()));
            }
        }
        let malformed = |node: &CpdNode, reason: String| HnetError::MalformedCpt {
            node: node.name.clone(),
            reason,
        };
        let mut parent_index = Vec::with_capacity(nodes.len());
        for n in &nodes {
            if n.states.is_empty() {
                return Err(malformed(n, "no states".into()));
            }
            let distinct: BTreeSet<&String> = n.states.iter().collect();
            if distinct.len() != n.states.len() {
                return Err(malformed(n, "duplicate state label".into()));
            }
            let mut parents = Vec::with_capacity(n.parents.len());
            for p in &n.parents {
                let &j = index
                    .get(p.as_str())
                    .ok_or_else(|| HnetError::UnknownParent {
                        node: n.name.clone(),
                        parent: p.clone(),
                    })?;
                if parents.contains(&j) {
                    return Err(malformed(n, format!("parent {p} listed twice")));
                }
                parents.push(j);
            }
            let rows: usize = parents.iter().map(|&j| nodes[j].states.len()).product();
            if n.cpt.len() != rows {
                return Err(malformed(
                    n,
                    format!("expected {rows} rows, found {}", n.cpt.len()),
                ));
            }
            for (r, row) in n.cpt.iter().enumerate() {
                if row.len() != n.states.len() {
                    return Err(malformed(
                        n,
                        format!(
                            "row {r} has {} entries for {} states",
                            row.len(),
                            n.states.len()
                        ),
                    ));
                }
                if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(malformed(n, format!("row {r} has an entry outside [0, 1]")));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(malformed(n, format!("row {r} sums to {sum}")));
                }
            }
            parent_index.push(parents);
        }
        let topo = topological_order(&nodes, &parent_index)?;
        Ok(Self {
            nodes,
            parent_index,
            topo,
        })
    }

    pub fn nodes(&self) -> &[CpdNode] {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Option<&CpdNode> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn n_arcs(&self) -> usize {
        self.parent_index.iter().map(Vec::len).sum()
    }

    /// Free parameters: each CPT row contributes `states - 1`.
    pub fn n_parameters(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.cpt.len() * (n.states.len() - 1))
            .sum()
    }

    /// `(parent, child)` index pairs.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.parent_index
            .iter()
            .enumerate()
            .flat_map(|(child, ps)| ps.iter().map(move |&p| (p, child)))
            .collect()
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec_pretty(self)?)
    }
}

/// Kahn's algorithm, always releasing the lowest-index ready node first.
fn topological_order(nodes: &[CpdNode], parents: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = nodes.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n)
            .find(|&i| indegree[i] > 0)
            .map(|i| nodes[i].name.clone())
            .unwrap_or_default();
        return Err(HnetError::CyclicGraph(stuck));
    }
    Ok(order)
}

pub fn load_network(bytes: &[u8]) -> Result<CpdNetwork> {
    let raw: RawNetwork = serde_json::from_slice(bytes)?;
    CpdNetwork::new(raw.nodes)
}

/// The textbook four-node sprinkler network.
pub fn sprinkler() -> CpdNetwork {
    load_network(include_bytes!("../fixtures/sprinkler.json")).expect("bundled fixture is valid")
}

/// The 37-node ALARM monitoring network.
pub fn alarm() -> CpdNetwork {
    load_network(include_bytes!("../fixtures/alarm.json")).expect("bundled fixture is valid")
}

/// Draws `n` rows by ancestral sampling. Rows are generated one after another
/// from a single stream, so a smaller `n` with the same seed yields a prefix.
#[allow(clippy::needless_range_loop)]
pub fn forward_sample(net: &CpdNetwork, n: usize, seed: u64) -> FeatureTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = net.nodes.len();
    let mut states = vec![vec![0usize; n]; k];
    let mut current = vec![0usize; k];
    for row in 0..n {
        for &i in &net.topo {
            let mut cpt_row = 0;
            for &p in &net.parent_index[i] {
                cpt_row = cpt_row * net.nodes[p].states.len() + current[p];
            }
            let probs = &net.nodes[i].cpt[cpt_row];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = probs.len() - 1;
            for (s, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = s;
                    break;
                }
            }
            // rounding can leave u above the final cumulative sum
            while probs[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            current[i] = pick;
            states[i][row] = pick;
        }
    }
    let columns = net
        .nodes
        .iter()
        .zip(states)
        .map(|(node, idx)| Column {
            name: node.name.clone(),
            kind: FeatureKind::Discrete,
            data: ColumnData::Text(
                idx.into_iter()
                    .map(|s| Some(node.states[s].clone()))
                    .collect(),
            ),
        })
        .collect();
    FeatureTable { columns, n_rows: n }
}
