use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hnet::ingest::FeatureKind;
use hnet::simulate::{self, CpdNetwork};
use hnet::{
    analyze_csv, CandidateSet, ExportFormat, FamilyScope, HnetConfig, HnetError, Method,
    NetworkGraph, NumericNodeStyle, SymmetrizeMode,
};

mod bench;
mod view;

/// Association networks from mixed-type tables.
#[derive(Debug, Parser)]
#[command(name = "hnet", version)]
struct Cli {
    /// Cap the number of worker threads (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Print errors to stderr as single-line JSON
    #[arg(long, global = true)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infer the association network of a CSV file
    Analyze(AnalyzeArgs),
    /// Draw forward samples from a network fixture into a CSV file
    Sample(SampleArgs),
    /// Score recovered structure against a network fixture
    Benchmark(BenchmarkArgs),
    /// Convert a graph JSON file to another format
    Export(ExportArgs),
    /// Write a self-contained interactive HTML view of a graph JSON file
    View(ViewArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// JSON file with analysis settings; explicit flags take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Field delimiter of the input CSV [default: ,]
    #[arg(long, value_name = "CHAR", value_parser = parse_delimiter)]
    delimiter: Option<char>,

    /// Treat this cell value as missing; repeatable, replaces the defaults
    #[arg(long = "na-token", value_name = "TOKEN")]
    na_tokens: Vec<String>,

    /// Minimum number of rows a category needs to become a response [default: 10]
    #[arg(long, value_name = "N")]
    y_min: Option<usize>,

    /// Distinct-value fraction above which a real-valued column is numeric [default: 0.2]
    #[arg(long, value_name = "F")]
    unique_fraction: Option<f64>,

    /// Force a column's type, e.g. `Age=numeric`; repeatable
    #[arg(long = "type-override", value_name = "COL=discrete|numeric", value_parser = parse_override)]
    type_overrides: Vec<(String, FeatureKind)>,

    /// Largest number of categories combined into one column [default: 1]
    #[arg(long, value_name = "K")]
    k_max: Option<usize>,

    /// Upper bound on generated combination columns
    #[arg(long, value_name = "N")]
    max_candidates: Option<usize>,

    /// Multiple-testing correction [default: holm]
    #[arg(long, value_enum, value_name = "METHOD")]
    mtm: Option<MtmArg>,

    /// Correction family: each response separately, or all tests at once [default: per-response]
    #[arg(long, value_enum, value_name = "SCOPE")]
    family: Option<FamilyArg>,

    /// Significance level for the corrected p-values [default: 0.05]
    #[arg(long, value_name = "P")]
    alpha: Option<f64>,

    /// Test responses against every observed category, or only supported ones [default: all]
    #[arg(long, value_enum, value_name = "SET")]
    candidates: Option<CandidatesArg>,

    /// Numeric node naming: one node per group median, or one per feature [default: per-group]
    #[arg(long, value_enum, value_name = "STYLE")]
    numeric_nodes: Option<NumericNodesArg>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Input CSV with a header row
    #[arg(long = "in", value_name = "CSV")]
    input: PathBuf,

    /// Output graph file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Output format of --out
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Collapse both edge directions before writing --out
    #[arg(long, value_enum, value_name = "MODE")]
    symmetrize: Option<SymmetrizeArg>,

    /// Also write an interactive HTML view
    #[arg(long, value_name = "FILE")]
    html: Option<PathBuf>,

    /// Also write the run report (stage counts and timings) as JSON
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,

    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Network fixture JSON, or the built-in `sprinkler` or `alarm`
    #[arg(long, value_name = "FILE")]
    network: String,

    /// Number of rows to draw
    #[arg(long, value_name = "N")]
    n: usize,

    /// Random seed
    #[arg(long, env = "HNET_SEED", default_value_t = 42)]
    seed: u64,

    /// Output CSV
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Network fixture JSON, or the built-in `sprinkler` or `alarm`
    #[arg(long, value_name = "FILE")]
    network: String,

    /// Sample sizes, comma separated
    #[arg(long, value_name = "N,...", value_delimiter = ',', required = true)]
    n: Vec<usize>,

    /// Replicate samples per size, also the number of random labelings
    #[arg(long, default_value_t = 10)]
    trials: usize,

    /// Random seed; replicate t uses seed + t
    #[arg(long, env = "HNET_SEED", default_value_t = 42)]
    seed: u64,

    /// Which category nodes may stand for a variable as edge source
    #[arg(long, value_enum, default_value_t = PolicyArg::TrueState)]
    policy: PolicyArg,

    /// Results CSV (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Graph JSON written by `analyze`
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,

    /// Target format
    #[arg(long, value_enum)]
    format: FormatArg,

    /// Collapse both edge directions first
    #[arg(long, value_enum, value_name = "MODE")]
    symmetrize: Option<SymmetrizeArg>,

    /// Output file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ViewArgs {
    /// Graph JSON written by `analyze`
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,

    /// Output HTML file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MtmArg {
    Holm,
    Bonferroni,
    Bh,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    PerResponse,
    Global,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CandidatesArg {
    All,
    Filtered,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NumericNodesArg {
    PerGroup,
    PerFeature,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Graphml,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SymmetrizeArg {
    Max,
    And,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub(crate) enum PolicyArg {
    TrueState,
    AllStates,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ExportFormat::GraphJson,
            FormatArg::Csv => ExportFormat::AdjacencyCsv,
            FormatArg::Graphml => ExportFormat::GraphMl,
        }
    }
}

impl From<SymmetrizeArg> for SymmetrizeMode {
    fn from(s: SymmetrizeArg) -> Self {
        match s {
            SymmetrizeArg::Max => SymmetrizeMode::Max,
            SymmetrizeArg::And => SymmetrizeMode::And,
        }
    }
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    match s {
        "\\t" | "tab" => Ok('\t'),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(format!("expected a single character, got `{s}`")),
            }
        }
    }
}

fn parse_override(s: &str) -> Result<(String, FeatureKind), String> {
    let (col, kind) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected COL=discrete|numeric, got `{s}`"))?;
    let kind = match kind.to_ascii_lowercase().as_str() {
        "discrete" => FeatureKind::Discrete,
        "numeric" => FeatureKind::Numeric,
        other => {
            return Err(format!(
                "unknown type `{other}`, expected discrete or numeric"
            ))
        }
    };
    if col.is_empty() {
        return Err("empty column name".into());
    }
    Ok((col.to_string(), kind))
}

impl ModelArgs {
    fn config(&self) -> Result<HnetConfig, HnetError> {
        let mut cfg = match &self.config {
            Some(path) => serde_json::from_slice(&fs::read(path)?)?,
            None => HnetConfig::default(),
        };
        if let Some(d) = self.delimiter {
            cfg.ingest.delimiter = d;
        }
        if !self.na_tokens.is_empty() {
            cfg.ingest.na_tokens = self.na_tokens.clone();
        }
        if let Some(f) = self.unique_fraction {
            cfg.ingest.unique_fraction = f;
        }
        for (col, kind) in &self.type_overrides {
            cfg.ingest.type_overrides.insert(col.clone(), *kind);
        }
        if let Some(v) = self.y_min {
            cfg.y_min = v;
        }
        if let Some(v) = self.k_max {
            cfg.k_max = v;
        }
        if let Some(v) = self.max_candidates {
            cfg.max_candidates = v;
        }
        if let Some(m) = self.mtm {
            cfg.method = match m {
                MtmArg::Holm => Method::Holm,
                MtmArg::Bonferroni => Method::Bonferroni,
                MtmArg::Bh => Method::BenjaminiHochberg,
            };
        }
        if let Some(f) = self.family {
            cfg.family_scope = match f {
                FamilyArg::PerResponse => FamilyScope::PerResponse,
                FamilyArg::Global => FamilyScope::Global,
            };
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(c) = self.candidates {
            cfg.candidates = match c {
                CandidatesArg::All => CandidateSet::AllCategories,
                CandidatesArg::Filtered => CandidateSet::Filtered,
            };
        }
        if let Some(s) = self.numeric_nodes {
            cfg.numeric_nodes = match s {
                NumericNodesArg::PerGroup => NumericNodeStyle::PerGroupMedian,
                NumericNodesArg::PerFeature => NumericNodeStyle::PerFeature,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub(crate) fn load_network(spec: &str) -> Result<CpdNetwork, HnetError> {
    let path = Path::new(spec);
    if !path.exists() {
        match spec {
            "sprinkler" => return Ok(simulate::sprinkler()),
            "alarm" => return Ok(simulate::alarm()),
            _ => {}
        }
    }
    simulate::load_network(&fs::read(path)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HnetError> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

fn export(
    g: &NetworkGraph,
    format: FormatArg,
    symmetrize: Option<SymmetrizeArg>,
) -> Result<Vec<u8>, HnetError> {
    match symmetrize {
        Some(mode) => g.symmetrize(mode.into()).export(format.into()),
        None => g.export(format.into()),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<(), HnetError> {
    let cfg = args.model.config()?;
    let analysis = analyze_csv(&fs::read(&args.input)?, &cfg)?;
    write_file(
        &args.out,
        &export(&analysis.graph, args.format, args.symmetrize)?,
    )?;
    if let Some(html) = &args.html {
        write_file(html, view::render(&analysis.graph)?.as_bytes())?;
    }
    if let Some(report) = &args.report {
        write_file(report, &serde_json::to_vec_pretty(&analysis.report)?)?;
    }
    let r = &analysis.report;
    eprintln!(
        "{} rows, {} model features, {} pairs tested, {} edges over {} nodes",
        r.n_rows, r.model_features, r.pairs_tested, r.edges, r.nodes
    );
    Ok(())
}

fn sample(args: &SampleArgs) -> Result<(), HnetError> {
    let net = load_network(&args.network)?;
    let table = simulate::forward_sample(&net, args.n, args.seed);
    let mut out = Vec::new();
    table.write_csv(&mut out)?;
    write_file(&args.out, &out)
}

fn export_cmd(args: &ExportArgs) -> Result<(), HnetError> {
    let g = NetworkGraph::from_json(&fs::read(&args.input)?)?;
    write_file(&args.out, &export(&g, args.format, args.symmetrize)?)
}

fn view_cmd(args: &ViewArgs) -> Result<(), HnetError> {
    let g = NetworkGraph::from_json(&fs::read(&args.input)?)?;
    write_file(&args.out, view::render(&g)?.as_bytes())
}

fn dispatch(cli: &Cli) -> Result<(), HnetError> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sample(a) => sample(a),
        Command::Benchmark(a) => {
            let cfg = a.model.config()?;
            bench::benchmark(a, &cfg)
        }
        Command::Export(a) => export_cmd(a),
        Command::View(a) => view_cmd(a),
    }
}

fn report_error(json: bool, code: &str, message: &str, exit: u8) -> ExitCode {
    if json {
        let line = serde_json::json!({ "error": code, "message": message, "exit_code": exit });
        eprintln!("{line}");
    } else {
        eprintln!("error: {message}");
    }
    ExitCode::from(exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if std::env::args().any(|a| a == "--json-errors") {
                let message = e.to_string();
                let first = message.lines().next().unwrap_or_default();
                let first = first.strip_prefix("error: ").unwrap_or(first);
                return report_error(true, "usage", first, 1);
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return report_error(cli.json_errors, "usage", "--threads must be at least 1", 1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return report_error(cli.json_errors, "threads", &e.to_string(), 2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(cli.json_errors, e.code(), &e.to_string(), 2),
    }
}
