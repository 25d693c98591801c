use std::collections::BTreeSet;

use hnet::mtm::Method;
use hnet::score::{convergence_curve, project_to_variables, ResponsePolicy};
use hnet::simulate::{forward_sample, sprinkler};
use hnet::{
    analyze_csv, run, CandidateSet, Direction, FamilyScope, HnetConfig, HnetError, NetworkGraph,
    NumericNodeStyle,
};

const TITANIC: &[u8] = include_bytes!("../fixtures/titanic.csv");

fn edge<'a>(g: &'a NetworkGraph, source: &str, target: &str) -> Option<&'a hnet::Edge> {
    g.edges.iter().find(|e| {
        e.source == source && (e.target == target || e.target.starts_with(&format!("{target}=")))
    })
}

#[test]
fn titanic_defaults() {
    let a = analyze_csv(TITANIC, &HnetConfig::default()).unwrap();
    let r = &a.report;
    assert_eq!(
        (r.raw_categories, r.surviving_categories, r.model_features),
        (2634, 18, 20)
    );
    assert_eq!(r.pairs_tested, r.category_pairs + r.numeric_pairs);
    assert_eq!(a.matrix.tested(), r.pairs_tested);

    let g = &a.graph;
    g.validate().unwrap();
    for (s, t) in [
        ("Sex=female", "Survived=1"),
        ("Survived=1", "Sex=female"),
        ("Sex=male", "Survived=0"),
        ("Survived=0", "Sex=male"),
    ] {
        assert!(edge(g, s, t).unwrap().weight > 50.0, "{s} -> {t}");
    }
    let first = edge(g, "Pclass=1", "Fare").unwrap();
    assert_eq!(first.direction, Some(Direction::Higher));
    assert_eq!(first.target, "Fare=high_60.3");
    assert!(first.weight > 78.0);
    let third = edge(g, "Pclass=3", "Fare").unwrap();
    assert_eq!(third.direction, Some(Direction::Lower));
    assert_eq!(third.target, "Fare=low_8.1");

    // 60 edges over 47 nodes, within 15%
    assert!((51..=69).contains(&g.edges.len()), "{}", g.edges.len());
    assert!((40..=54).contains(&g.nodes.len()), "{}", g.nodes.len());
}

#[test]
fn titanic_edges_only_leave_supported_categories() {
    let a = analyze_csv(TITANIC, &HnetConfig::default()).unwrap();
    let responses: BTreeSet<&str> = a.matrix.rows.iter().map(|n| n.id.as_str()).collect();
    assert!(a
        .graph
        .edges
        .iter()
        .all(|e| responses.contains(e.source.as_str())));
}

#[test]
fn filtered_candidates_and_global_family_are_available() {
    let cfg = HnetConfig {
        candidates: CandidateSet::Filtered,
        numeric_nodes: NumericNodeStyle::PerFeature,
        ..HnetConfig::default()
    };
    let a = analyze_csv(TITANIC, &cfg).unwrap();
    assert_eq!(a.report.candidate_categories, 18);
    // at most one node per model feature
    assert!(a.graph.nodes.len() <= 20);

    let global = HnetConfig {
        family_scope: FamilyScope::Global,
        ..HnetConfig::default()
    };
    let g = analyze_csv(TITANIC, &global).unwrap();
    assert!(
        g.graph.edges.len()
            <= analyze_csv(TITANIC, &HnetConfig::default())
                .unwrap()
                .graph
                .edges
                .len()
    );
}

#[test]
fn stricter_alpha_gives_a_subset() {
    let loose = analyze_csv(TITANIC, &HnetConfig::default()).unwrap().graph;
    let strict = analyze_csv(
        TITANIC,
        &HnetConfig {
            alpha: 0.01,
            ..HnetConfig::default()
        },
    )
    .unwrap()
    .graph;
    assert!(strict.edges.len() <= loose.edges.len());
    for e in &strict.edges {
        assert!(loose
            .edges
            .iter()
            .any(|f| f.source == e.source && f.target == e.target));
    }
}

#[test]
fn identical_input_gives_identical_json() {
    let a = analyze_csv(TITANIC, &HnetConfig::default())
        .unwrap()
        .graph
        .to_json()
        .unwrap();
    let b = analyze_csv(TITANIC, &HnetConfig::default())
        .unwrap()
        .graph
        .to_json()
        .unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let single = pool.install(|| {
        analyze_csv(TITANIC, &HnetConfig::default())
            .unwrap()
            .graph
            .to_json()
            .unwrap()
    });
    assert_eq!(a, single);
}

#[test]
fn sprinkler_links_recovered() {
    let net = sprinkler();
    let a = run(&forward_sample(&net, 1000, 1), &HnetConfig::default()).unwrap();
    assert!(edge(&a.graph, "Sprinkler=True", "WetGrass=True").is_some());
    assert!(edge(&a.graph, "Sprinkler=True", "Rain=False").is_some());
    let skeleton = project_to_variables(&a.graph, &net, ResponsePolicy::AllStates)
        .unwrap()
        .symmetrized();
    for (u, v) in [
        ("Sprinkler", "WetGrass"),
        ("Rain", "WetGrass"),
        ("Cloudy", "Rain"),
        ("Cloudy", "Sprinkler"),
    ] {
        assert!(
            skeleton.get(net.position(u).unwrap(), net.position(v).unwrap()),
            "{u}-{v}"
        );
    }
}

#[test]
fn convergence_self_overlap_and_small_n() {
    let net = sprinkler();
    let cfg = HnetConfig::default();
    let c = convergence_curve(&net, &[1000], 1000, &cfg, &[Method::Holm], 3).unwrap();
    assert_eq!(c[0].overlap, 1.0);
    let tiny = convergence_curve(&net, &[20], 1000, &cfg, &[Method::Holm], 3).unwrap();
    assert!(tiny[0].edges <= 4, "{}", tiny[0].edges);
    let several = convergence_curve(&net, &[200, 400], 400, &cfg, &Method::ALL, 3).unwrap();
    assert_eq!(several.len(), 6);
}

#[test]
fn single_feature_and_bad_support() {
    let one = "a\n".to_string() + &"x\ny\n".repeat(20);
    assert!(matches!(
        analyze_csv(one.as_bytes(), &HnetConfig::default()),
        Err(HnetError::NoTestsPerformed)
    ));
    assert!(matches!(
        analyze_csv(b"a,b\n1,2\n", &HnetConfig::default()),
        Err(HnetError::NoUsableColumns { .. })
    ));
}
