//! Label-setting shortest paths.
//!
//! Without turn penalties (or under the distance metric) the search labels
//! nodes. With turn penalties under the time metric it labels edges, since
//! the cost of leaving a node depends on how it was entered.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Metric, NetworkError, NodeId, RoadNetwork};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    /// Edge indices in traversal order.
    pub edges: Vec<usize>,
    /// Minimized cost under the requested metric.
    pub cost: f64,
    /// Travel time along this path, turn penalties included.
    pub time_s: f64,
    pub distance_m: f64,
}

/// Heap entry ordered so that `BinaryHeap` pops the smallest cost first and,
/// among equal costs, the smallest node index (= smallest node id).
#[derive(Debug, Clone, Copy)]
struct Entry {
    cost: f64,
    node: usize,
    state: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.state.cmp(&self.state))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Stop {
    Exhaust,
    AtTarget(usize),
    Beyond(f64),
}

#[derive(Debug)]
enum Back {
    /// Predecessor edge per node.
    Nodes(Vec<usize>),
    /// First settled state per node plus predecessor state per edge state.
    /// State `m` (edge count) is the source.
    Edges { first: Vec<usize>, pred: Vec<usize> },
}

/// Result of one single-source run.
#[derive(Debug)]
pub(crate) struct Tree<'a> {
    net: &'a RoadNetwork,
    source: usize,
    /// Settled cost per node; infinite when not reached.
    cost: Vec<f64>,
    back: Back,
}

impl<'a> Tree<'a> {
    pub(crate) fn grow(net: &'a RoadNetwork, source: usize, metric: Metric, stop: Stop) -> Self {
        if metric == Metric::Time && net.has_turn_penalties() {
            grow_edges(net, source, stop)
        } else {
            grow_nodes(net, source, metric, stop)
        }
    }

    pub(crate) fn cost(&self, node: usize) -> Option<f64> {
        let c = self.cost[node];
        c.is_finite().then_some(c)
    }

    fn edge_path(&self, target: usize) -> Option<Vec<usize>> {
        self.cost(target)?;
        let mut edges = Vec::new();
        match &self.back {
            Back::Nodes(pred) => {
                let mut at = target;
                while at != self.source {
                    let e = pred[at];
                    edges.push(e);
                    at = self.net.edge_tail(e);
                }
            }
            Back::Edges { first, pred } => {
                let source_state = self.net.edges().len();
                let mut st = first[target];
                while st != source_state {
                    edges.push(st);
                    st = pred[st];
                }
            }
        }
        edges.reverse();
        Some(edges)
    }

    pub(crate) fn path(&self, target: usize) -> Option<Path> {
        let cost = self.cost(target)?;
        let edges = self.edge_path(target)?;
        let net = self.net;
        let mut nodes = Vec::with_capacity(edges.len() + 1);
        nodes.push(net.nodes()[self.source].id);
        let (mut time_s, mut distance_m) = (0.0, 0.0);
        let mut prev: Option<usize> = None;
        for &e in &edges {
            let edge = &net.edges()[e];
            let pen = prev.map_or(0.0, |p| net.turn_penalty(p, e));
            time_s = time_s + pen + edge.travel_time_s;
            distance_m += edge.length_m;
            nodes.push(edge.to);
            prev = Some(e);
        }
        Some(Path {
            nodes,
            edges,
            cost,
            time_s,
            distance_m,
        })
    }
}

fn grow_nodes(net: &RoadNetwork, source: usize, metric: Metric, stop: Stop) -> Tree<'_> {
    let n = net.nodes().len();
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut pred = vec![NONE; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        node: source,
        state: source,
    });
    while let Some(Entry { cost, node: u, .. }) = heap.pop() {
        if settled[u] {
            continue;
        }
        if let Stop::Beyond(limit) = stop {
            if cost > limit {
                break;
            }
        }
        settled[u] = true;
        if matches!(stop, Stop::AtTarget(t) if t == u) {
            break;
        }
        for &e in net.outgoing_of(u) {
            let v = net.edge_head(e);
            if settled[v] {
                continue;
            }
            let c = cost + net.edges()[e].weight(metric);
            if c < dist[v] {
                dist[v] = c;
                pred[v] = e;
                heap.push(Entry {
                    cost: c,
                    node: v,
                    state: v,
                });
            }
        }
    }
    for (d, s) in dist.iter_mut().zip(&settled) {
        if !s {
            *d = f64::INFINITY;
        }
    }
    Tree {
        net,
        source,
        cost: dist,
        back: Back::Nodes(pred),
    }
}

fn grow_edges(net: &RoadNetwork, source: usize, stop: Stop) -> Tree<'_> {
    let n = net.nodes().len();
    let m = net.edges().len();
    let mut dist = vec![f64::INFINITY; m + 1];
    let mut settled = vec![false; m + 1];
    let mut pred = vec![NONE; m + 1];
    let mut first = vec![NONE; n];
    let mut node_cost = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[m] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        node: source,
        state: m,
    });
    while let Some(Entry { cost, node, state }) = heap.pop() {
        if settled[state] {
            continue;
        }
        if let Stop::Beyond(limit) = stop {
            if cost > limit {
                break;
            }
        }
        settled[state] = true;
        if first[node] == NONE {
            first[node] = state;
            node_cost[node] = cost;
            if matches!(stop, Stop::AtTarget(t) if t == node) {
                break;
            }
        }
        for &e in net.outgoing_of(node) {
            if settled[e] {
                continue;
            }
            let pen = if state == m { 0.0 } else { net.turn_penalty(state, e) };
            let c = cost + pen + net.edges()[e].travel_time_s;
            if c < dist[e] {
                dist[e] = c;
                pred[e] = state;
                heap.push(Entry {
                    cost: c,
                    node: net.edge_head(e),
                    state: e,
                });
            }
        }
    }
    Tree {
        net,
        source,
        cost: node_cost,
        back: Back::Edges { first, pred },
    }
}

/// Minimum-cost directed path from `source` to `target`.
///
/// Turn penalties count under [`Metric::Time`] only. Equal-cost frontier
/// entries are popped smallest node id first, so the returned path is
/// deterministic.
pub fn shortest_path(net: &RoadNetwork, source: NodeId, target: NodeId, metric: Metric) -> Result<Path, NetworkError> {
    let s = net.index_of(source)?;
    let t = net.index_of(target)?;
    let tree = Tree::grow(net, s, metric, Stop::AtTarget(t));
    tree.path(t).ok_or(NetworkError::Unreachable {
        from: source,
        to: target,
    })
}

/// Every node whose cost from `source` is at most `limit`, ordered by node id.
pub fn reachable_within(
    net: &RoadNetwork,
    source: NodeId,
    metric: Metric,
    limit: f64,
) -> Result<Vec<(NodeId, f64)>, NetworkError> {
    let s = net.index_of(source)?;
    let tree = Tree::grow(net, s, metric, Stop::Beyond(limit));
    Ok(net
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(i, n)| tree.cost(i).filter(|&c| c <= limit).map(|c| (n.id, c)))
        .collect())
}
