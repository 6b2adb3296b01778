#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wasteroute::coverage::StopPoint;
use wasteroute::network::{CostMatrix, Edge, Metric, Node, NodeId, RoadNetwork, TravelMatrix};
use wasteroute::vrp::{Depot, Trip};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Directed graph with 2..=10 nodes and at most 25 edges. Parallel edges
/// and self loops may appear.
pub fn random_graph(seed: u64) -> RoadNetwork {
    let mut r = rng(seed);
    let n = r.gen_range(2..=10u64);
    let m = r.gen_range(0..=25usize);
    let nodes = (0..n)
        .map(|i| Node::new(i * 3 + 1, r.gen_range(0.0..2000.0), r.gen_range(0.0..2000.0)))
        .collect();
    let edges = (0..m)
        .map(|_| {
            let a = r.gen_range(0..n) * 3 + 1;
            let b = r.gen_range(0..n) * 3 + 1;
            let len = if r.gen_bool(0.2) {
                // Round lengths make equal-cost alternatives likely.
                100.0 * r.gen_range(1..5) as f64
            } else {
                r.gen_range(10.0..900.0)
            };
            let speed = [20.0, 30.0, 40.0, 50.0][r.gen_range(0..4)];
            Edge::new(a, b, len, speed)
        })
        .collect();
    RoadNetwork::new(nodes, edges).expect("generated graph is valid")
}

/// Cheapest simple path by exhaustive depth-first enumeration. Costs are
/// summed from the source forward, like a label-setting search does.
pub fn enumerate_min_cost(net: &RoadNetwork, source: NodeId, target: NodeId, metric: Metric) -> Option<f64> {
    fn dfs(
        net: &RoadNetwork,
        at: NodeId,
        target: NodeId,
        metric: Metric,
        cost: f64,
        visited: &mut Vec<NodeId>,
        best: &mut Option<f64>,
    ) {
        if at == target {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        for e in net.edges().iter().filter(|e| e.from == at) {
            if visited.contains(&e.to) {
                continue;
            }
            visited.push(e.to);
            dfs(net, e.to, target, metric, cost + e.weight(metric), visited, best);
            visited.pop();
        }
    }
    let mut best = None;
    let mut visited = vec![source];
    dfs(net, source, target, metric, 0.0, &mut visited, &mut best);
    best
}

/// Fewest bins of `capacity` holding all `sizes`, by trying every set
/// partition.
pub fn min_bins(sizes: &[f64], capacity: f64) -> usize {
    fn go(i: usize, sizes: &[f64], cap: f64, bins: &mut Vec<f64>, best: &mut usize) {
        if bins.len() >= *best {
            return;
        }
        if i == sizes.len() {
            *best = bins.len();
            return;
        }
        for b in 0..bins.len() {
            if bins[b] + sizes[i] <= cap {
                bins[b] += sizes[i];
                go(i + 1, sizes, cap, bins, best);
                bins[b] -= sizes[i];
            }
        }
        bins.push(sizes[i]);
        go(i + 1, sizes, cap, bins, best);
        bins.pop();
    }
    let mut best = sizes.len() + 1;
    go(0, sizes, capacity, &mut Vec::new(), &mut best);
    best.min(sizes.len())
}

pub fn trip_of_duration(total_time_s: f64) -> Trip {
    Trip {
        stop_ids: vec![1],
        load_kg: 0.0,
        drive_time_s: 0.0,
        service_time_s: 0.0,
        unload_s: 0.0,
        total_time_s,
        distance_m: 0.0,
        cost: 0.0,
    }
}

pub const DEPOT: Depot = Depot { node: NodeId(0) };

/// Depot at the origin and one stop per point; Euclidean legs at
/// `speed_kmh`. Stop `k` has id and node `k + 1`.
pub fn planar(points: &[(f64, f64)], demand_kg: &[f64], speed_kmh: f64) -> (TravelMatrix, Vec<StopPoint>) {
    let mut all = vec![(0.0, 0.0)];
    all.extend_from_slice(points);
    let mut dist = Vec::new();
    for a in &all {
        for b in &all {
            dist.push((a.0 - b.0).hypot(a.1 - b.1));
        }
    }
    let time = dist.iter().map(|d| d * 3.6 / speed_kmh).collect();
    let ids: Vec<NodeId> = (0..all.len() as u64).map(NodeId).collect();
    let tm = TravelMatrix::new(
        Metric::Time,
        CostMatrix::from_rows(ids.clone(), ids.clone(), Metric::Time, time).unwrap(),
        CostMatrix::from_rows(ids.clone(), ids, Metric::Distance, dist).unwrap(),
    )
    .unwrap();
    let stops = demand_kg
        .iter()
        .enumerate()
        .map(|(k, &kg)| StopPoint {
            id: k as u64 + 1,
            node: NodeId(k as u64 + 1),
            assigned_demand_kg: kg,
            service_time_s: 1800.0,
            covered_demand_ids: vec![],
            overflow: false,
        })
        .collect();
    (tm, stops)
}

/// 4..=7 stops within 5 km of the depot, 300..=600 kg each.
pub fn random_vrp(seed: u64) -> (TravelMatrix, Vec<StopPoint>) {
    let mut r = rng(seed);
    let n = r.gen_range(4..=7);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (r.gen_range(-5000.0..5000.0), r.gen_range(-5000.0..5000.0)))
        .collect();
    let kg: Vec<f64> = (0..n).map(|_| r.gen_range(300..=600) as f64).collect();
    planar(&pts, &kg, 40.0)
}

pub fn same_cost(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}
