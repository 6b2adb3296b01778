//! Street network as a directed weighted graph.
//!
//! Nodes carry planar coordinates in meters. Edges carry a length and a
//! speed; their travel time is derived once at construction. Optional turn
//! penalties attach to (incoming edge, outgoing edge) pairs and only affect
//! the time metric.

mod io;
mod matrix;
mod search;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::TableError;

pub use io::{
    load_network, read_edges, read_nodes, read_turn_penalties, write_network, EdgeRecord, NodeRecord,
    TurnPenaltyRecord, EDGES_FILE, EDGE_COLUMNS, NODES_FILE, NODE_COLUMNS, TURNS_FILE, TURN_COLUMNS,
};
pub use matrix::{cost_matrix, travel_matrix, CostMatrix, TravelMatrix};
pub use search::{reachable_within, shortest_path, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for NodeId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(NodeId)
    }
}

/// Which edge weight a search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Time,
    Distance,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Time => "time",
            Metric::Distance => "distance",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "time" => Ok(Metric::Time),
            "distance" => Ok(Metric::Distance),
            other => Err(format!("expected `time` or `distance`, got `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("nearest node is {distance_m:.1} m away, beyond the {max_dist_m} m limit")]
    NoNodeWithinRange { distance_m: f64, max_dist_m: f64 },
    #[error("network has no nodes")]
    Empty,
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("node {0} has non-finite coordinates")]
    BadCoordinate(NodeId),
    #[error("edge {index}: {reason}")]
    BadEdge { index: usize, reason: String },
    #[error("turn penalty {from_edge}->{to_edge}: {reason}")]
    BadTurnPenalty {
        from_edge: usize,
        to_edge: usize,
        reason: String,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub x_m: f64,
    pub y_m: f64,
}

impl Node {
    pub fn new(id: u64, x_m: f64, y_m: f64) -> Self {
        Node {
            id: NodeId(id),
            x_m,
            y_m,
        }
    }

    pub fn distance_to(&self, x_m: f64, y_m: f64) -> f64 {
        (self.x_m - x_m).hypot(self.y_m - y_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub length_m: f64,
    pub speed_kmh: f64,
    pub travel_time_s: f64,
}

impl Edge {
    /// Builds an edge, deriving its travel time from length and speed.
    pub fn new(from: u64, to: u64, length_m: f64, speed_kmh: f64) -> Self {
        Edge {
            from: NodeId(from),
            to: NodeId(to),
            length_m,
            speed_kmh,
            travel_time_s: length_m * 3.6 / speed_kmh,
        }
    }

    pub fn weight(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Time => self.travel_time_s,
            Metric::Distance => self.length_m,
        }
    }
}

/// Immutable directed road graph. Nodes are kept sorted by id so that node
/// index order and id order coincide; edge indices follow insertion order.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    index: HashMap<NodeId, usize>,
    edges: Vec<Edge>,
    edge_ends: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
    turn_penalty_s: HashMap<(usize, usize), f64>,
}

impl RoadNetwork {
    pub fn new(mut nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, NetworkError> {
        nodes.sort_by_key(|n| n.id);
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if !(n.x_m.is_finite() && n.y_m.is_finite()) {
                return Err(NetworkError::BadCoordinate(n.id));
            }
            if index.insert(n.id, i).is_some() {
                return Err(NetworkError::DuplicateNode(n.id));
            }
        }

        let mut edge_ends = Vec::with_capacity(edges.len());
        let mut outgoing = vec![Vec::new(); nodes.len()];
        for (k, e) in edges.iter().enumerate() {
            let bad = |reason: String| NetworkError::BadEdge { index: k, reason };
            if !(e.length_m.is_finite() && e.length_m > 0.0) {
                return Err(bad(format!("length_m must be > 0, got {}", e.length_m)));
            }
            if !(e.speed_kmh.is_finite() && e.speed_kmh > 0.0) {
                return Err(bad(format!("speed_kmh must be > 0, got {}", e.speed_kmh)));
            }
            let expected = e.length_m * 3.6 / e.speed_kmh;
            if (e.travel_time_s - expected).abs() > 1e-9 * expected {
                return Err(bad(format!(
                    "travel_time_s {} disagrees with length/speed ({expected})",
                    e.travel_time_s
                )));
            }
            let from = *index
                .get(&e.from)
                .ok_or_else(|| bad(format!("unknown from node {}", e.from)))?;
            let to = *index
                .get(&e.to)
                .ok_or_else(|| bad(format!("unknown to node {}", e.to)))?;
            edge_ends.push((from, to));
            outgoing[from].push(k);
        }
        // Scan order within a node: by head id, then edge index.
        for list in &mut outgoing {
            list.sort_by_key(|&k| (edge_ends[k].1, k));
        }

        Ok(RoadNetwork {
            nodes,
            index,
            edges,
            edge_ends,
            outgoing,
            turn_penalty_s: HashMap::new(),
        })
    }

    /// Attaches turn penalties keyed by (incoming edge index, outgoing edge index).
    pub fn with_turn_penalties<I>(mut self, penalties: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        for (from_edge, to_edge, penalty) in penalties {
            let bad = |reason: &str| NetworkError::BadTurnPenalty {
                from_edge,
                to_edge,
                reason: reason.to_string(),
            };
            if from_edge >= self.edges.len() || to_edge >= self.edges.len() {
                return Err(bad("edge index out of range"));
            }
            if self.edge_ends[from_edge].1 != self.edge_ends[to_edge].0 {
                return Err(bad("edges do not share a node"));
            }
            if !(penalty.is_finite() && penalty >= 0.0) {
                return Err(bad("penalty must be finite and >= 0"));
            }
            if self.turn_penalty_s.insert((from_edge, to_edge), penalty).is_some() {
                return Err(bad("duplicate entry"));
            }
        }
        Ok(self)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn has_turn_penalties(&self) -> bool {
        !self.turn_penalty_s.is_empty()
    }

    pub fn turn_penalties(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.turn_penalty_s.iter().map(|(&(a, b), &p)| (a, b, p))
    }

    /// Penalty for entering `to_edge` from `from_edge`; zero when unset.
    pub fn turn_penalty(&self, from_edge: usize, to_edge: usize) -> f64 {
        self.turn_penalty_s.get(&(from_edge, to_edge)).copied().unwrap_or(0.0)
    }

    pub(crate) fn index_of(&self, id: NodeId) -> Result<usize, NetworkError> {
        self.index.get(&id).copied().ok_or(NetworkError::UnknownNode(id))
    }

    pub(crate) fn outgoing_of(&self, node_idx: usize) -> &[usize] {
        &self.outgoing[node_idx]
    }

    pub(crate) fn edge_head(&self, edge: usize) -> usize {
        self.edge_ends[edge].1
    }

    pub(crate) fn edge_tail(&self, edge: usize) -> usize {
        self.edge_ends[edge].0
    }

    /// Nearest node to a planar point; ties within 1e-9 m go to the smaller id.
    pub fn snap(&self, x_m: f64, y_m: f64, max_dist_m: f64) -> Result<NodeId, NetworkError> {
        let mut best: Option<(f64, &Node)> = None;
        for node in &self.nodes {
            let d = node.distance_to(x_m, y_m);
            match best {
                Some((bd, _)) if d >= bd - 1e-9 => {}
                _ => best = Some((d, node)),
            }
        }
        let (d, node) = best.ok_or(NetworkError::Empty)?;
        if d > max_dist_m {
            return Err(NetworkError::NoNodeWithinRange {
                distance_m: d,
                max_dist_m,
            });
        }
        Ok(node.id)
    }

    /// Same nodes with every edge flipped. Turn penalties are dropped.
    pub fn reversed(&self) -> RoadNetwork {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: e.to,
                to: e.from,
                ..*e
            })
            .collect();
        RoadNetwork::new(self.nodes.clone(), edges).expect("reversal preserves validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes3() -> Vec<Node> {
        vec![
            Node::new(1, 0.0, 0.0),
            Node::new(2, 100.0, 0.0),
            Node::new(3, 0.0, 100.0),
        ]
    }

    #[test]
    fn travel_time_is_derived() {
        let e = Edge::new(1, 2, 1000.0, 40.0);
        assert!((e.travel_time_s - 90.0).abs() < 1e-12);
        assert_eq!(e.weight(Metric::Distance), 1000.0);
    }

    #[test]
    fn rejects_bad_edges_and_nodes() {
        assert!(matches!(
            RoadNetwork::new(nodes3(), vec![Edge::new(1, 9, 10.0, 40.0)]),
            Err(NetworkError::BadEdge { index: 0, .. })
        ));
        assert!(matches!(
            RoadNetwork::new(nodes3(), vec![Edge::new(1, 2, 0.0, 40.0)]),
            Err(NetworkError::BadEdge { .. })
        ));
        assert!(matches!(
            RoadNetwork::new(nodes3(), vec![Edge::new(1, 2, 10.0, -1.0)]),
            Err(NetworkError::BadEdge { .. })
        ));
        let mut tampered = Edge::new(1, 2, 10.0, 40.0);
        tampered.travel_time_s *= 1.01;
        assert!(RoadNetwork::new(nodes3(), vec![tampered]).is_err());
        let mut dup = nodes3();
        dup.push(Node::new(2, 5.0, 5.0));
        assert!(matches!(
            RoadNetwork::new(dup, vec![]),
            Err(NetworkError::DuplicateNode(NodeId(2)))
        ));
        assert!(matches!(
            RoadNetwork::new(vec![Node::new(1, f64::NAN, 0.0)], vec![]),
            Err(NetworkError::BadCoordinate(_))
        ));
    }

    #[test]
    fn turn_penalties_must_join_adjacent_edges() {
        let net = RoadNetwork::new(
            nodes3(),
            vec![
                Edge::new(1, 2, 100.0, 40.0),
                Edge::new(2, 3, 100.0, 40.0),
                Edge::new(3, 1, 100.0, 40.0),
            ],
        )
        .unwrap();
        assert!(net.clone().with_turn_penalties([(0, 1, 5.0)]).is_ok());
        assert!(net.clone().with_turn_penalties([(1, 0, 5.0)]).is_err());
        assert!(net.clone().with_turn_penalties([(0, 1, -1.0)]).is_err());
        assert!(net.clone().with_turn_penalties([(0, 7, 1.0)]).is_err());
        let net = net.with_turn_penalties([(0, 1, 5.0)]).unwrap();
        assert_eq!(net.turn_penalty(0, 1), 5.0);
        assert_eq!(net.turn_penalty(1, 2), 0.0);
    }

    #[test]
    fn snap_exact_tie_and_range() {
        let net = RoadNetwork::new(
            vec![
                Node::new(7, 10.0, 0.0),
                Node::new(3, -10.0, 0.0),
                Node::new(2, 100.0, 0.0),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(net.snap(100.0, 0.0, 1.0).unwrap(), NodeId(2));
        assert_eq!(net.snap(0.0, 0.0, 50.0).unwrap(), NodeId(3));
        assert_eq!(net.snap(0.0, 1e-12, 50.0).unwrap(), NodeId(3));
        assert!(matches!(
            net.snap(700.0, 0.0, 500.0),
            Err(NetworkError::NoNodeWithinRange { .. })
        ));
        let empty = RoadNetwork::new(vec![], vec![]).unwrap();
        assert!(matches!(empty.snap(0.0, 0.0, 1.0), Err(NetworkError::Empty)));
    }

    #[test]
    fn metric_parses() {
        assert_eq!("time".parse::<Metric>().unwrap(), Metric::Time);
        assert_eq!("distance".parse::<Metric>().unwrap(), Metric::Distance);
        assert!("speed".parse::<Metric>().is_err());
    }
}
