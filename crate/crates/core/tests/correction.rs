use hnet::graph::Node;
use hnet::mtm::{adjust, AssociationMatrix, FamilyScope, Method, NumericNodeStyle};
use hnet::stats::LogP;
use proptest::prelude::*;

fn quiet(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Textbook definitions in linear space, written without sharing any code
/// with the library.
fn reference(method: Method, p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap().then(a.cmp(&b)));
    let sorted: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
    let mut adj_sorted = vec![0.0; m];
    for i in 0..m {
        adj_sorted[i] = match method {
            Method::Bonferroni => (m as f64 * sorted[i]).min(1.0),
            Method::Holm => (0..=i)
                .map(|j| ((m - j) as f64 * sorted[j]).min(1.0))
                .fold(0.0, f64::max),
            Method::BenjaminiHochberg => (i..m)
                .map(|j| (m as f64 * sorted[j] / (j + 1) as f64).min(1.0))
                .fold(1.0, f64::min),
        };
    }
    let mut out = vec![0.0; m];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = adj_sorted[rank];
    }
    out
}

fn run(method: Method, p: &[f64]) -> Vec<f64> {
    let raw: Vec<LogP> = p.iter().map(|&v| LogP::from_p(v)).collect();
    adjust(method, &raw).into_iter().map(LogP::p).collect()
}

fn family() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![1e-12f64..1.0, 1e-4f64..0.1, Just(0.05), Just(1.0)],
        1..=20,
    )
}

#[test]
fn hand_checked_triples() {
    assert_eq!(run(Method::Holm, &[0.01, 0.02, 0.03]), [0.03, 0.04, 0.04]);
    assert_eq!(
        run(Method::BenjaminiHochberg, &[0.01, 0.02, 0.04]),
        [0.03, 0.03, 0.04]
    );
}

proptest! {
    #![proptest_config(quiet(1000))]

    #[test]
    fn procedures_match_literal_definitions(p in family()) {
        for method in Method::ALL {
            let got = run(method, &p);
            let want = reference(method, &p);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() <= 1e-12, "{method}: {got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn holm_never_exceeds_bonferroni(p in family()) {
        let holm = run(Method::Holm, &p);
        let bonf = run(Method::Bonferroni, &p);
        for (h, b) in holm.iter().zip(&bonf) {
            prop_assert!(h <= &(b * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn adjusted_follows_raw_order_and_never_shrinks(p in family()) {
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap());
        for method in Method::ALL {
            let adj = run(method, &p);
            for (a, r) in adj.iter().zip(&p) {
                prop_assert!(*a >= r * (1.0 - 1e-12) && *a <= 1.0);
            }
            if method != Method::Bonferroni {
                for w in idx.windows(2) {
                    prop_assert!(adj[w[0]] <= adj[w[1]] * (1.0 + 1e-12));
                }
            }
        }
    }
}

fn node(id: &str) -> Node {
    let (feature, label) = id.split_once('=').unwrap();
    Node {
        id: id.into(),
        feature: feature.into(),
        label: label.into(),
        positives: 20,
        fraction: 1.0,
    }
}

fn matrix(cells: Vec<Option<f64>>, method: Method, scope: FamilyScope) -> AssociationMatrix {
    let rows = vec![node("A=1"), node("B=1"), node("C=1")];
    let cols = vec![node("A=1"), node("B=1"), node("C=1"), node("D=1")];
    let raw: Vec<Option<LogP>> = cells.into_iter().map(|c| c.map(LogP::from_p)).collect();
    AssociationMatrix {
        features: ["A", "B", "C", "D"].map(String::from).to_vec(),
        n_rows: 200,
        numeric_cols: vec![false; cols.len()],
        shifts: vec![None; raw.len()],
        adjusted: vec![None; raw.len()],
        rows,
        cols,
        raw,
        method,
        family_scope: scope,
    }
}

fn cells() -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(1e-9f64..1.0, 12).prop_map(|ps| {
        ps.into_iter()
            .enumerate()
            .map(|(i, p)| (i / 4 != i % 4).then_some(p))
            .collect()
    })
}

proptest! {
    #![proptest_config(quiet(200))]

    #[test]
    fn matrix_correction_respects_shape(raw in cells(), global in any::<bool>()) {
        let scope = if global { FamilyScope::Global } else { FamilyScope::PerResponse };
        for method in Method::ALL {
            let mut m = matrix(raw.clone(), method, scope);
            m.correct();
            for (r, a) in m.raw.iter().zip(&m.adjusted) {
                prop_assert_eq!(r.is_some(), a.is_some());
                if let (Some(r), Some(a)) = (r, a) {
                    prop_assert!(a.log10() >= r.log10() - 1e-12 && a.log10() <= 0.0);
                }
            }
        }
    }

    #[test]
    fn lower_alpha_never_adds_edges(raw in cells(), a1 in 0.001f64..0.2, a2 in 0.001f64..0.2) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let mut m = matrix(raw, Method::Holm, FamilyScope::PerResponse);
        m.correct();
        let strict = m.edge_weights(lo, NumericNodeStyle::PerFeature).unwrap();
        let loose = m.edge_weights(hi, NumericNodeStyle::PerFeature).unwrap();
        prop_assert!(strict.edges.len() <= loose.edges.len());
        for e in &strict.edges {
            prop_assert!(loose.edges.iter().any(|f| f.source == e.source && f.target == e.target));
            prop_assert!(e.weight >= -lo.log10() - 1e-12);
        }
    }
}

#[test]
fn weight_is_negative_log10() {
    let mut m = matrix(
        vec![
            None,
            Some(0.001),
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
        ],
        Method::Holm,
        FamilyScope::PerResponse,
    );
    m.correct();
    let g = m.edge_weights(0.05, NumericNodeStyle::PerFeature).unwrap();
    assert_eq!(g.edges.len(), 1);
    assert!((g.edges[0].weight - 3.0).abs() < 1e-12);

    let mut m = matrix(
        vec![
            None,
            Some(0.06),
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
        ],
        Method::Holm,
        FamilyScope::PerResponse,
    );
    m.correct();
    assert!(m
        .edge_weights(0.05, NumericNodeStyle::PerFeature)
        .unwrap()
        .edges
        .is_empty());
}
