//! Statistical association networks from mixed-type tabular data.
//!
//! Discrete features are one-hot encoded, every category is tested for
//! over-representation against the categories of every other feature
//! (hypergeometric test) and for a location shift in every numeric feature
//! (Mann-Whitney U). P-values are corrected for multiple testing and the
//! significant ones become weighted, directed edges.
//!
//! ```no_run
//! use hnet::{analyze_csv, HnetConfig};
//!
//! let bytes = std::fs::read("titanic.csv").unwrap();
//! let analysis = analyze_csv(&bytes, &HnetConfig::default()).unwrap();
//! println!("{} edges", analysis.graph.edges.len());
//! ```

pub mod bits;
pub mod combi;
pub mod engine;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod mtm;
pub mod score;
pub mod simulate;
pub mod stats;

pub use engine::{analyze_csv, run, Analysis, CandidateSet, HnetConfig, RunReport};
pub use error::{HnetError, Result};
pub use graph::{Edge, ExportFormat, GraphMeta, NetworkGraph, Node, SymmetrizeMode};
pub use ingest::{FeatureKind, FeatureTable, IngestConfig};
pub use mtm::{AssociationMatrix, FamilyScope, Method, NumericNodeStyle};
pub use stats::{Direction, LogP};
