use std::fmt::Write as _;
use std::fs;

use hnet::score::{
    fallback_variables, mcc, project_to_variables, random_baseline, EdgeLabeling, ResponsePolicy,
    ScoreMode,
};
use hnet::simulate::{forward_sample, CpdNetwork};
use hnet::{run, HnetConfig, HnetError};
use rayon::prelude::*;

use crate::{load_network, BenchmarkArgs, PolicyArg};

const MODES: [ScoreMode; 2] = [ScoreMode::Directed, ScoreMode::Undirected];

struct Row {
    model: &'static str,
    n: usize,
    mode: ScoreMode,
    mcc: f64,
    p_value: f64,
    edges_pred: f64,
    edges_true: u64,
}

/// Predicted variable-level links for one sample; a sample too small to
/// test anything predicts nothing.
fn predict(
    net: &CpdNetwork,
    n: usize,
    seed: u64,
    cfg: &HnetConfig,
    policy: ResponsePolicy,
) -> Result<EdgeLabeling, HnetError> {
    match run(&forward_sample(net, n, seed), cfg) {
        Ok(a) => project_to_variables(&a.graph, net, policy),
        Err(HnetError::NoTestsPerformed | HnetError::NoUsableColumns { .. }) => Ok(
            EdgeLabeling::empty(net.nodes().iter().map(|v| v.name.clone()).collect()),
        ),
        Err(e) => Err(e),
    }
}

fn score_size(
    net: &CpdNetwork,
    n: usize,
    args: &BenchmarkArgs,
    cfg: &HnetConfig,
    policy: ResponsePolicy,
) -> Result<Vec<Row>, HnetError> {
    let truth = EdgeLabeling::from_network(net);
    let preds: Vec<EdgeLabeling> = (0..args.trials as u64)
        .into_par_iter()
        .map(|t| predict(net, n, args.seed.wrapping_add(t), cfg, policy))
        .collect::<Result<_, _>>()?;
    let k = preds.len() as f64;
    let mean_edges = preds.iter().map(|p| p.edge_count() as f64).sum::<f64>() / k;

    let mut rows = Vec::new();
    for mode in MODES {
        let scores = preds
            .iter()
            .map(|p| mcc(p, &truth, mode))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(Row {
            model: "hnet",
            n,
            mode,
            mcc: scores.iter().map(|s| s.mcc).sum::<f64>() / k,
            p_value: scores.iter().map(|s| s.p_value).sum::<f64>() / k,
            edges_pred: scores.iter().map(|s| s.predicted() as f64).sum::<f64>() / k,
            edges_true: scores[0].actual(),
        });
        let random = random_baseline(
            &truth,
            mean_edges.round() as usize,
            mode,
            args.trials,
            args.seed,
        )?;
        rows.push(Row {
            model: "random",
            n,
            mode,
            mcc: random.mean_mcc,
            p_value: random.mean_p_value,
            edges_pred: mean_edges.round(),
            edges_true: scores[0].actual(),
        });
        let itself = mcc(&truth, &truth, mode)?;
        rows.push(Row {
            model: "truth",
            n,
            mode,
            mcc: itself.mcc,
            p_value: itself.p_value,
            edges_pred: itself.predicted() as f64,
            edges_true: itself.actual(),
        });
    }
    let sym = mcc(&truth.symmetrized(), &truth, ScoreMode::Directed)?;
    rows.push(Row {
        model: "truth_undirected",
        n,
        mode: ScoreMode::Directed,
        mcc: sym.mcc,
        p_value: sym.p_value,
        edges_pred: sym.predicted() as f64,
        edges_true: sym.actual(),
    });
    Ok(rows)
}

pub(crate) fn benchmark(args: &BenchmarkArgs, cfg: &HnetConfig) -> Result<(), HnetError> {
    if args.trials == 0 {
        return Err(HnetError::InvalidConfig("trials must be at least 1".into()));
    }
    let net = load_network(&args.network)?;
    let policy = match args.policy {
        PolicyArg::TrueState => ResponsePolicy::TrueStateOnly,
        PolicyArg::AllStates => ResponsePolicy::AllStates,
    };
    if policy == ResponsePolicy::TrueStateOnly {
        let fallback = fallback_variables(&net);
        if !fallback.is_empty() {
            eprintln!(
                "warning: {} of {} variables have no true-like state and are scored with every state: {}",
                fallback.len(),
                net.nodes().len(),
                fallback.join(", ")
            );
        }
    }

    let mut out = String::from("model,n,mode,mcc,p_value,edges_pred,edges_true\n");
    for &n in &args.n {
        for r in score_size(&net, n, args, cfg, policy)? {
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{},{}",
                r.model,
                r.n,
                r.mode.name(),
                r.mcc,
                r.p_value,
                r.edges_pred,
                r.edges_true
            );
        }
    }
    match &args.out {
        Some(path) => fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(())
}
