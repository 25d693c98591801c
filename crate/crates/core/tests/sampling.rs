use hnet::ingest::FeatureTable;
use hnet::simulate::{alarm, forward_sample, load_network, sprinkler, CpdNetwork, CpdNode};
use hnet::HnetError;
use statrs::distribution::{Binomial, Discrete, DiscreteCDF};

fn states(t: &FeatureTable, name: &str) -> Vec<String> {
    t.column(name)
        .unwrap()
        .text()
        .unwrap()
        .iter()
        .map(|v| v.clone().unwrap())
        .collect()
}

fn within_sigmas(hits: usize, n: usize, p: f64, sigmas: f64) -> bool {
    if n == 0 {
        return true;
    }
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    (hits as f64 - n as f64 * p).abs() <= sigmas * sd + 1e-9
}

/// The 4σ check, falling back to the exact binomial tail when few rows make
/// the normal approximation meaningless: an outcome passes if it is at least
/// as likely as a 4σ normal deviation.
fn plausible(hits: usize, n: usize, p: f64) -> bool {
    if within_sigmas(hits, n, p, 4.0) {
        return true;
    }
    let four_sigma_tail = 0.5 * libm::erfc(4.0 / std::f64::consts::SQRT_2);
    let b = Binomial::new(p, n as u64).unwrap();
    let k = hits as u64;
    let tail = if hits as f64 > n as f64 * p {
        b.sf(k) + b.pmf(k)
    } else {
        b.cdf(k)
    };
    tail >= four_sigma_tail
}

#[test]
fn fair_root_within_three_sigma() {
    let net = CpdNetwork::new(vec![CpdNode {
        name: "Coin".into(),
        states: vec!["True".into(), "False".into()],
        parents: vec![],
        cpt: vec![vec![0.5, 0.5]],
    }])
    .unwrap();
    let t = forward_sample(&net, 10_000, 11);
    let frac = states(&t, "Coin").iter().filter(|s| *s == "True").count() as f64 / 10_000.0;
    assert!((frac - 0.5).abs() <= 0.015, "{frac}");
}

#[test]
fn root_marginals_within_four_sigma() {
    let n = 100_000;
    for (net, seed) in [(sprinkler(), 1u64), (alarm(), 2)] {
        let t = forward_sample(&net, n, seed);
        for node in net.nodes().iter().filter(|n| n.parents.is_empty()) {
            let col = states(&t, &node.name);
            for (s, &p) in node.states.iter().zip(&node.cpt[0]) {
                let hits = col.iter().filter(|v| *v == s).count();
                assert!(
                    within_sigmas(hits, n, p, 4.0),
                    "{}={s}: {hits} of {n} vs {p}",
                    node.name
                );
            }
        }
    }
}

#[test]
fn conditionals_within_four_sigma() {
    let n = 50_000;
    for (net, seed) in [(sprinkler(), 3u64), (alarm(), 4)] {
        let t = forward_sample(&net, n, seed);
        let cols: Vec<Vec<String>> = net.nodes().iter().map(|nd| states(&t, &nd.name)).collect();
        let idx: Vec<Vec<usize>> = net
            .nodes()
            .iter()
            .zip(&cols)
            .map(|(nd, c)| {
                c.iter()
                    .map(|v| nd.states.iter().position(|s| s == v).unwrap())
                    .collect()
            })
            .collect();
        for (i, node) in net.nodes().iter().enumerate() {
            let parents: Vec<usize> = node
                .parents
                .iter()
                .map(|p| net.position(p).unwrap())
                .collect();
            let mut row_of = vec![0usize; n];
            for (r, slot) in row_of.iter_mut().enumerate() {
                *slot = parents
                    .iter()
                    .fold(0, |acc, &p| acc * net.nodes()[p].states.len() + idx[p][r]);
            }
            for (cpt_row, probs) in node.cpt.iter().enumerate() {
                let rows: Vec<usize> = (0..n).filter(|&r| row_of[r] == cpt_row).collect();
                for (s, &p) in probs.iter().enumerate() {
                    let hits = rows.iter().filter(|&&r| idx[i][r] == s).count();
                    assert!(
                        plausible(hits, rows.len(), p),
                        "{} row {cpt_row} state {s}: {hits}/{} vs {p}",
                        node.name,
                        rows.len()
                    );
                }
            }
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let net = alarm();
    let mut a = Vec::new();
    let mut b = Vec::new();
    forward_sample(&net, 2000, 5).write_csv(&mut a).unwrap();
    forward_sample(&net, 2000, 5).write_csv(&mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fixture_validation_errors() {
    let off = br#"{"nodes":[{"name":"A","states":["t","f"],"parents":[],"cpt":[[0.5,0.4]]}]}"#;
    assert!(matches!(
        load_network(off),
        Err(HnetError::MalformedCpt { .. })
    ));
    let ok = br#"{"nodes":[{"name":"A","states":["t","f"],"parents":[],"cpt":[[0.5,0.5]]}]}"#;
    assert_eq!(load_network(ok).unwrap().nodes().len(), 1);
}

#[test]
fn network_shapes() {
    let s = sprinkler();
    assert_eq!((s.nodes().len(), s.n_arcs()), (4, 4));
    let a = alarm();
    assert_eq!(
        (a.nodes().len(), a.n_arcs(), a.n_parameters()),
        (37, 46, 509)
    );
    let order = a.topological_order();
    let pos = |i: usize| order.iter().position(|&j| j == i).unwrap();
    for (p, c) in a.arcs() {
        assert!(pos(p) < pos(c));
    }
}
