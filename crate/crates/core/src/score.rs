//! Scoring recovered networks against a known structure.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{self, HnetConfig};
use crate::error::{HnetError, Result};
use crate::graph::NetworkGraph;
use crate::mtm::Method;
use crate::simulate::{forward_sample, CpdNetwork};
use crate::stats::{hypergeom_sf, PairCounts};

/// Directed variable-level adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabeling {
    pub nodes: Vec<String>,
    matrix: Vec<bool>,
}

impl EdgeLabeling {
    pub fn empty(nodes: Vec<String>) -> Self {
        let n = nodes.len();
        Self {
            nodes,
            matrix: vec![false; n * n],
        }
    }

    /// The parent → child arcs of `net`.
    pub fn from_network(net: &CpdNetwork) -> Self {
        let mut out = Self::empty(net.nodes().iter().map(|n| n.name.clone()).collect());
        for (p, c) in net.arcs() {
            out.set(p, c, true);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, from: usize, to: usize) -> bool {
        self.matrix[from * self.len() + to]
    }

    /// Diagonal entries are ignored.
    pub fn set(&mut self, from: usize, to: usize, value: bool) {
        if from != to {
            let n = self.len();
            self.matrix[from * n + to] = value;
        }
    }

    pub fn edge_count(&self) -> usize {
        self.matrix.iter().filter(|&&b| b).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j))
            .collect()
    }

    /// Each link in either direction becomes a link in both.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for (i, j) in self.edges() {
            out.set(j, i, true);
        }
        out
    }

    fn universe(&self, mode: ScoreMode) -> Vec<bool> {
        let n = self.len();
        match mode {
            ScoreMode::Directed => (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| self.get(i, j))
                .collect(),
            ScoreMode::Undirected => {
                let s = self.symmetrized();
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .map(|(i, j)| s.get(i, j))
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponsePolicy {
    /// For variables that have a true-like state, only that state's
    /// category nodes act as edge sources; other variables use every state.
    #[default]
    TrueStateOnly,
    AllStates,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    Directed,
    Undirected,
}

impl ScoreMode {
    pub fn name(self) -> &'static str {
        match self {
            ScoreMode::Directed => "directed",
            ScoreMode::Undirected => "undirected",
        }
    }
}

/// `true`, `yes` or `1`, case-insensitively.
pub fn is_true_state(label: &str) -> bool {
    matches!(label.to_ascii_lowercase().as_str(), "true" | "yes" | "1")
}

/// Variables with no true-like state; `TrueStateOnly` scores them with
/// every state.
pub fn fallback_variables(net: &CpdNetwork) -> Vec<&str> {
    net.nodes()
        .iter()
        .filter(|n| !n.states.iter().any(|s| is_true_state(s)))
        .map(|n| n.name.as_str())
        .collect()
}

/// Collapses category-level edges onto the network's variables. A variable
/// `u` links to `v` when some edge runs from a `u` category to a `v` category.
pub fn project_to_variables(
    g: &NetworkGraph,
    net: &CpdNetwork,
    policy: ResponsePolicy,
) -> Result<EdgeLabeling> {
    let mut out = EdgeLabeling::empty(net.nodes().iter().map(|n| n.name.clone()).collect());
    let parts = |id: &str| -> Result<Vec<(usize, String)>> {
        let node = g
            .node(id)
            .ok_or_else(|| HnetError::UnknownVariable(id.to_string()))?;
        let labels: Vec<&str> = if node.feature.contains('&') {
            node.label.split('&').collect()
        } else {
            vec![node.label.as_str()]
        };
        node.feature
            .split('&')
            .zip(labels)
            .map(|(f, l)| {
                net.position(f)
                    .map(|i| (i, l.to_string()))
                    .ok_or_else(|| HnetError::UnknownVariable(f.to_string()))
            })
            .collect()
    };
    let allowed_source = |var: usize, label: &str| match policy {
        ResponsePolicy::AllStates => true,
        ResponsePolicy::TrueStateOnly => {
            let states = &net.nodes()[var].states;
            !states.iter().any(|s| is_true_state(s)) || is_true_state(label)
        }
    };
    for e in &g.edges {
        let sources = parts(&e.source)?;
        let targets = parts(&e.target)?;
        let directions: &[bool] = if g.is_directed() {
            &[false]
        } else {
            &[false, true]
        };
        for &flip in directions {
            let (from, to) = if flip {
                (&targets, &sources)
            } else {
                (&sources, &targets)
            };
            for (u, label) in from {
                if !allowed_source(*u, label) {
                    continue;
                }
                for (v, _) in to {
                    out.set(*u, *v, true);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MccScore {
    pub mcc: f64,
    /// One-sided Fisher exact p for enrichment of true links among predictions.
    pub p_value: f64,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl MccScore {
    pub fn predicted(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn actual(&self) -> u64 {
        self.tp + self.fn_
    }
}

/// Matthews correlation between two labelings. A zero denominator gives 0.
pub fn mcc(predicted: &EdgeLabeling, truth: &EdgeLabeling, mode: ScoreMode) -> Result<MccScore> {
    if predicted.len() != truth.len() {
        return Err(HnetError::DimensionMismatch(predicted.len(), truth.len()));
    }
    let (a, b) = (predicted.universe(mode), truth.universe(mode));
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (&p, &t) in a.iter().zip(&b) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    Ok(confusion_score(tp, fp, tn, fn_))
}

fn confusion_score(tp: u64, fp: u64, tn: u64, fn_: u64) -> MccScore {
    let f = |x: u64| x as f64;
    let denom = (f(tp + fp) * f(tp + fn_) * f(tn + fp) * f(tn + fn_)).sqrt();
    let mcc = if denom == 0.0 {
        0.0
    } else {
        (f(tp) * f(tn) - f(fp) * f(fn_)) / denom
    };
    let counts = PairCounts::new(tp + fp + tn + fn_, tp + fn_, tp + fp, tp)
        .expect("confusion table is consistent");
    let p_value = hypergeom_sf(&counts).expect("validated counts").p();
    MccScore {
        mcc,
        p_value,
        tp,
        fp,
        tn,
        fn_,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub mean_mcc: f64,
    pub std_err: f64,
    pub mean_p_value: f64,
    pub trials: Vec<f64>,
}

/// MCC of uniformly random directed labelings with `n_edges` links each.
/// Trial `t` draws from its own stream of `seed`, so results do not depend
/// on scheduling.
pub fn random_baseline(
    truth: &EdgeLabeling,
    n_edges: usize,
    mode: ScoreMode,
    trials: usize,
    seed: u64,
) -> Result<BaselineSummary> {
    if trials == 0 {
        return Err(HnetError::InvalidConfig("trials must be at least 1".into()));
    }
    let n = truth.len();
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    if n_edges > slots.len() {
        return Err(HnetError::InvalidConfig(format!(
            "{n_edges} edges do not fit in {} slots",
            slots.len()
        )));
    }
    let scores: Vec<MccScore> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut pred = EdgeLabeling::empty(truth.nodes.clone());
            for k in sample(&mut rng, slots.len(), n_edges) {
                let (i, j) = slots[k];
                pred.set(i, j, true);
            }
            mcc(&pred, truth, mode)
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = scores.iter().map(|s| s.mcc).collect();
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let std_err = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    Ok(BaselineSummary {
        mean_mcc: mean,
        std_err,
        mean_p_value: scores.iter().map(|s| s.p_value).sum::<f64>() / k,
        trials: values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub method: Method,
    pub edges: usize,
    /// Jaccard overlap of the directed edge set with the reference run.
    pub overlap: f64,
}

fn edge_set(g: &NetworkGraph) -> BTreeSet<(String, String)> {
    g.edges
        .iter()
        .map(|e| (e.source.clone(), e.target.clone()))
        .collect()
}

fn jaccard(a: &BTreeSet<(String, String)>, b: &BTreeSet<(String, String)>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        1.0
    } else {
        a.intersection(b).count() as f64 / union as f64
    }
}

/// Edge counts along a sample-size grid. One sample of the largest size is
/// drawn and every grid point analyses a prefix of it. Grid points where the
/// pipeline finds nothing to test count as zero edges.
pub fn convergence_curve(
    net: &CpdNetwork,
    n_grid: &[usize],
    reference_n: usize,
    config: &HnetConfig,
    methods: &[Method],
    seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    if n_grid.is_empty() || methods.is_empty() {
        return Err(HnetError::InvalidConfig(
            "empty sample-size grid or method list".into(),
        ));
    }
    let largest = n_grid.iter().copied().max().unwrap_or(0).max(reference_n);
    let data = forward_sample(net, largest, seed);
    let edges_at = |n: usize, method: Method| -> Result<BTreeSet<(String, String)>> {
        let cfg = HnetConfig {
            method,
            ..config.clone()
        };
        match engine::run(&data.head(n), &cfg) {
            Ok(a) => Ok(edge_set(&a.graph)),
            Err(HnetError::NoTestsPerformed | HnetError::NoUsableColumns { .. }) => {
                Ok(BTreeSet::new())
            }
            Err(e) => Err(e),
        }
    };
    let jobs: Vec<(usize, Method)> = n_grid
        .iter()
        .flat_map(|&n| methods.iter().map(move |&m| (n, m)))
        .collect();
    let references: Vec<BTreeSet<(String, String)>> = methods
        .iter()
        .map(|&m| edges_at(reference_n, m))
        .collect::<Result<_>>()?;
    jobs.into_par_iter()
        .map(|(n, method)| {
            let edges = edges_at(n, method)?;
            let mi = methods.iter().position(|&m| m == method).expect("listed");
            Ok(ConvergencePoint {
                n,
                method,
                edges: edges.len(),
                overlap: jaccard(&edges, &references[mi]),
            })
        })
        .collect()
}
