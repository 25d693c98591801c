//! The full pipeline: typing, encoding, combinations, pairwise tests,
//! correction and thresholding.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combi::{expand_combinations, DEFAULT_MAX_CANDIDATES};
use crate::error::{HnetError, Result};
use crate::graph::{NetworkGraph, Node};
use crate::ingest::{
    assign_types, one_hot_encode_all, parse_csv, CategoryColumn, FeatureKind, FeatureTable,
    IngestConfig,
};
use crate::mtm::{AssociationMatrix, FamilyScope, Method, NumericNodeStyle, NumericShift};
use crate::stats::{hypergeom_sf, mann_whitney, pair_counts, LogP};

/// Which category columns each response is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSet {
    /// Every observed category of every discrete feature, regardless of support.
    #[default]
    AllCategories,
    /// Only the support-filtered (and combined) columns used as responses.
    Filtered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HnetConfig {
    pub ingest: IngestConfig,
    pub y_min: usize,
    pub k_max: usize,
    pub max_candidates: usize,
    pub method: Method,
    pub family_scope: FamilyScope,
    pub alpha: f64,
    pub candidates: CandidateSet,
    pub numeric_nodes: NumericNodeStyle,
}

impl Default for HnetConfig {
    fn default() -> Self {
        Self {
            ingest: IngestConfig::default(),
            y_min: 10,
            k_max: 1,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            method: Method::Holm,
            family_scope: FamilyScope::PerResponse,
            alpha: 0.05,
            candidates: CandidateSet::AllCategories,
            numeric_nodes: NumericNodeStyle::PerGroupMedian,
        }
    }
}

impl HnetConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HnetError::InvalidConfig(m));
        if self.y_min == 0 {
            return bad("y_min must be at least 1".into());
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.ingest.unique_fraction > 0.0 && self.ingest.unique_fraction <= 1.0) {
            return bad(format!(
                "unique_fraction must lie in (0, 1], got {}",
                self.ingest.unique_fraction
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub n_rows: usize,
    pub discrete_features: usize,
    pub numeric_features: usize,
    /// One-hot columns before support filtering.
    pub raw_categories: usize,
    /// One-hot columns with at least `y_min` positives.
    pub surviving_categories: usize,
    /// Order ≥ 2 columns added by the combination step.
    pub combinations: usize,
    /// Response columns plus numeric features.
    pub model_features: usize,
    pub responses: usize,
    pub candidate_categories: usize,
    pub category_pairs: usize,
    pub numeric_pairs: usize,
    pub pairs_tested: usize,
    /// Category–numeric pairs skipped because a group had fewer than 2 values.
    pub degenerate_splits: usize,
    pub edges: usize,
    pub undirected_edges: usize,
    pub nodes: usize,
    pub timings: Vec<StageTiming>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub graph: NetworkGraph,
    pub matrix: AssociationMatrix,
    pub report: RunReport,
}

struct Stopwatch {
    last: Instant,
    timings: Vec<StageTiming>,
}

impl Stopwatch {
    fn new() -> Self {
        Self {
            last: Instant::now(),
            timings: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds: (now - self.last).as_secs_f64(),
        });
        self.last = now;
    }
}

fn category_node(c: &CategoryColumn) -> Node {
    let n = c.n_rows();
    Node {
        id: c.id(),
        feature: c.feature_key(),
        label: c.label_key(),
        positives: c.positives,
        fraction: if n == 0 {
            0.0
        } else {
            c.present.count_ones() as f64 / n as f64
        },
    }
}

/// Parses, types and analyses CSV bytes.
pub fn analyze_csv(bytes: &[u8], config: &HnetConfig) -> Result<Analysis> {
    let table = parse_csv(bytes, &config.ingest)?;
    run(&table, config)
}

enum Cell {
    Untested,
    Degenerate,
    Tested(LogP, Option<NumericShift>),
}

/// Runs the pipeline on `table`. Untyped columns are typed with
/// `config.ingest` first.
pub fn run(table: &FeatureTable, config: &HnetConfig) -> Result<Analysis> {
    config.validate()?;
    let mut clock = Stopwatch::new();
    let typed;
    let table = if table.columns.iter().any(|c| c.kind == FeatureKind::Pending) {
        typed = assign_types(table.clone(), &config.ingest)?;
        &typed
    } else {
        table
    };
    clock.lap("typing");

    let raw = one_hot_encode_all(table);
    let filtered = raw.filter_support(config.y_min);
    if filtered.is_empty() {
        return Err(HnetError::NoUsableColumns {
            y_min: config.y_min,
        });
    }
    clock.lap("encoding");

    let expanded =
        expand_combinations(&filtered, config.k_max, config.y_min, config.max_candidates)?;
    clock.lap("combinations");

    let responses = &expanded.columns;
    let candidates = match config.candidates {
        CandidateSet::AllCategories => &raw.columns,
        CandidateSet::Filtered => &expanded.columns,
    };
    let numerics: Vec<(&str, &[Option<f64>])> = table
        .columns
        .iter()
        .filter(|c| c.kind == FeatureKind::Numeric)
        .filter_map(|c| c.numeric().map(|v| (c.name.as_str(), v)))
        .collect();

    let cells: Vec<Cell> = responses
        .par_iter()
        .map(|r| -> Result<Vec<Cell>> {
            let mut row = Vec::with_capacity(candidates.len() + numerics.len());
            for c in candidates {
                if r.shares_feature(c) {
                    row.push(Cell::Untested);
                    continue;
                }
                let counts = pair_counts(r, c)?;
                row.push(Cell::Tested(hypergeom_sf(&counts)?, None));
            }
            for (_, values) in &numerics {
                row.push(match mann_whitney(values, r) {
                    Ok(mw) => Cell::Tested(
                        mw.log_p,
                        Some(NumericShift {
                            direction: mw.direction,
                            median_in: mw.median_in,
                            median_out: mw.median_out,
                        }),
                    ),
                    Err(HnetError::DegenerateSplit(..)) => Cell::Degenerate,
                    // no spread at all: nothing to detect
                    Err(HnetError::ConstantValues) => Cell::Tested(LogP::ONE, None),
                    Err(e) => return Err(e),
                });
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    clock.lap("testing");

    let width = candidates.len() + numerics.len();
    let mut report = RunReport {
        n_rows: table.n_rows,
        discrete_features: table
            .columns
            .iter()
            .filter(|c| c.kind == FeatureKind::Discrete)
            .count(),
        numeric_features: numerics.len(),
        raw_categories: raw.len(),
        surviving_categories: filtered.len(),
        combinations: expanded.len() - filtered.len(),
        model_features: expanded.len() + numerics.len(),
        responses: responses.len(),
        candidate_categories: candidates.len(),
        ..RunReport::default()
    };
    for (i, cell) in cells.iter().enumerate() {
        let numeric = i % width >= candidates.len();
        match cell {
            Cell::Tested(..) if numeric => report.numeric_pairs += 1,
            Cell::Tested(..) => report.category_pairs += 1,
            Cell::Degenerate => report.degenerate_splits += 1,
            Cell::Untested => {}
        }
    }
    report.pairs_tested = report.category_pairs + report.numeric_pairs;
    if report.pairs_tested == 0 {
        return Err(HnetError::NoTestsPerformed);
    }

    let mut cols: Vec<Node> = candidates.iter().map(category_node).collect();
    let mut numeric_cols = vec![false; cols.len()];
    for (name, values) in &numerics {
        let present = values.iter().flatten().count();
        cols.push(Node {
            id: name.to_string(),
            feature: name.to_string(),
            label: String::new(),
            positives: present,
            fraction: if table.n_rows == 0 {
                0.0
            } else {
                present as f64 / table.n_rows as f64
            },
        });
        numeric_cols.push(true);
    }
    let (raw_p, shifts): (Vec<Option<LogP>>, Vec<Option<NumericShift>>) = cells
        .into_iter()
        .map(|c| match c {
            Cell::Tested(p, s) => (Some(p), s),
            _ => (None, None),
        })
        .unzip();
    let mut matrix = AssociationMatrix {
        features: table.columns.iter().map(|c| c.name.clone()).collect(),
        n_rows: table.n_rows,
        rows: responses.iter().map(category_node).collect(),
        cols,
        numeric_cols,
        adjusted: vec![None; raw_p.len()],
        raw: raw_p,
        shifts,
        method: config.method,
        family_scope: config.family_scope,
    };
    matrix.correct();
    clock.lap("correction");

    let graph = matrix.edge_weights(config.alpha, config.numeric_nodes)?;
    clock.lap("graph");

    report.edges = graph.edges.len();
    report.nodes = graph.nodes.len();
    report.undirected_edges = graph
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (e.source.as_str(), e.target.as_str());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect::<BTreeSet<_>>()
        .len();
    report.timings = clock.timings;
    Ok(Analysis {
        graph,
        matrix,
        report,
    })
}
