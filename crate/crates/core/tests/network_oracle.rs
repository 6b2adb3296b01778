mod common;

use proptest::prelude::*;

use wasteroute::network::{cost_matrix, reachable_within, shortest_path, travel_matrix, Metric};

#[test]
fn dijkstra_matches_enumeration_on_random_graphs() {
    for seed in 0..200 {
        let net = common::random_graph(seed);
        let ids: Vec<_> = net.nodes().iter().map(|n| n.id).collect();
        for metric in [Metric::Time, Metric::Distance] {
            for &s in &ids {
                for &t in &ids {
                    let oracle = common::enumerate_min_cost(&net, s, t, metric);
                    let got = shortest_path(&net, s, t, metric).ok().map(|p| p.cost);
                    assert_eq!(got, oracle, "seed {seed} {s}->{t} {metric}");
                }
            }
        }
    }
}

#[test]
fn path_fields_are_consistent() {
    for seed in 0..50 {
        let net = common::random_graph(seed);
        let ids: Vec<_> = net.nodes().iter().map(|n| n.id).collect();
        for &s in &ids {
            for &t in &ids {
                let Ok(p) = shortest_path(&net, s, t, Metric::Distance) else {
                    continue;
                };
                assert_eq!(p.nodes.first(), Some(&s));
                assert_eq!(p.nodes.last(), Some(&t));
                assert_eq!(p.edges.len() + 1, p.nodes.len());
                let mut d = 0.0;
                for (k, &e) in p.edges.iter().enumerate() {
                    let edge = &net.edges()[e];
                    assert_eq!((edge.from, edge.to), (p.nodes[k], p.nodes[k + 1]));
                    d += edge.length_m;
                }
                assert_eq!(d, p.distance_m);
                assert_eq!(p.cost, p.distance_m);
            }
        }
    }
}

#[test]
fn matrices_agree_with_single_queries() {
    for seed in 0..30 {
        let net = common::random_graph(seed);
        let ids: Vec<_> = net.nodes().iter().map(|n| n.id).collect();
        let cm = cost_matrix(&net, &ids, &ids, Metric::Time).unwrap();
        let tm = travel_matrix(&net, &ids, Metric::Time).unwrap();
        for (i, &s) in ids.iter().enumerate() {
            for (j, &t) in ids.iter().enumerate() {
                let single = shortest_path(&net, s, t, Metric::Time).ok();
                assert_eq!(cm.get(i, j), single.as_ref().map(|p| p.cost));
                assert_eq!(tm.time_s.get(i, j), single.as_ref().map(|p| p.time_s));
                assert_eq!(tm.distance_m.get(i, j), single.as_ref().map(|p| p.distance_m));
            }
        }
    }
}

#[test]
fn bounded_search_is_a_prefix_of_the_full_search() {
    for seed in 0..50 {
        let net = common::random_graph(seed);
        let s = net.nodes()[0].id;
        let all = reachable_within(&net, s, Metric::Distance, f64::INFINITY).unwrap();
        let limit = 700.0;
        let near = reachable_within(&net, s, Metric::Distance, limit).unwrap();
        let expected: Vec<_> = all.into_iter().filter(|(_, c)| *c <= limit).collect();
        assert_eq!(near, expected, "seed {seed}");
    }
}

proptest! {
    #[test]
    fn repeated_queries_are_identical(seed in 0u64..10_000) {
        let net = common::random_graph(seed);
        let ids: Vec<_> = net.nodes().iter().map(|n| n.id).collect();
        for &s in &ids {
            for &t in &ids {
                let a = shortest_path(&net, s, t, Metric::Time).ok();
                let b = shortest_path(&net, s, t, Metric::Time).ok();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn triangle_inequality(seed in 0u64..10_000) {
        let net = common::random_graph(seed);
        let ids: Vec<_> = net.nodes().iter().map(|n| n.id).collect();
        let m = cost_matrix(&net, &ids, &ids, Metric::Distance).unwrap();
        let n = ids.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if let (Some(ab), Some(bc)) = (m.get(a, b), m.get(b, c)) {
                        let ac = m.get(a, c).expect("reachable through b");
                        prop_assert!(ac <= (ab + bc) * (1.0 + 1e-12));
                    }
                }
            }
        }
    }
}
