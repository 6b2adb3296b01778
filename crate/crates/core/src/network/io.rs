use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, NetworkError, Node, RoadNetwork};
use crate::table;

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const TURNS_FILE: &str = "turns.csv";

pub const NODE_COLUMNS: &[&str] = &["id", "x_m", "y_m"];
pub const EDGE_COLUMNS: &[&str] = &["from_id", "to_id", "length_m", "speed_kmh"];
pub const TURN_COLUMNS: &[&str] = &["from_edge_index", "to_edge_index", "penalty_s"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: u64,
    pub x_m: f64,
    pub y_m: f64,
}

/// An empty `speed_kmh` cell falls back to the fleet's default speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub from_id: u64,
    pub to_id: u64,
    pub length_m: f64,
    pub speed_kmh: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnPenaltyRecord {
    pub from_edge_index: usize,
    pub to_edge_index: usize,
    pub penalty_s: f64,
}

pub fn read_nodes(path: &Path) -> Result<Vec<NodeRecord>, NetworkError> {
    Ok(table::read_file(path, NODE_COLUMNS)?)
}

pub fn read_edges(path: &Path) -> Result<Vec<EdgeRecord>, NetworkError> {
    Ok(table::read_file(path, EDGE_COLUMNS)?)
}

pub fn read_turn_penalties(path: &Path) -> Result<Vec<TurnPenaltyRecord>, NetworkError> {
    Ok(table::read_file(path, TURN_COLUMNS)?)
}

/// Loads `nodes.csv`, `edges.csv` and, when present, `turns.csv` from `dir`.
/// Edge indices in the turn table are zero-based row positions in `edges.csv`.
pub fn load_network(dir: &Path, default_speed_kmh: f64) -> Result<RoadNetwork, NetworkError> {
    let nodes = read_nodes(&dir.join(NODES_FILE))?
        .into_iter()
        .map(|r| Node::new(r.id, r.x_m, r.y_m))
        .collect();
    let edges = read_edges(&dir.join(EDGES_FILE))?
        .into_iter()
        .map(|r| Edge::new(r.from_id, r.to_id, r.length_m, r.speed_kmh.unwrap_or(default_speed_kmh)))
        .collect();
    let net = RoadNetwork::new(nodes, edges)?;
    let turns = dir.join(TURNS_FILE);
    if turns.exists() {
        let penalties = read_turn_penalties(&turns)?;
        net.with_turn_penalties(
            penalties
                .into_iter()
                .map(|t| (t.from_edge_index, t.to_edge_index, t.penalty_s)),
        )
    } else {
        Ok(net)
    }
}

pub fn write_network(dir: &Path, net: &RoadNetwork) -> Result<(), NetworkError> {
    let nodes: Vec<NodeRecord> = net
        .nodes()
        .iter()
        .map(|n| NodeRecord {
            id: n.id.0,
            x_m: n.x_m,
            y_m: n.y_m,
        })
        .collect();
    let edges: Vec<EdgeRecord> = net
        .edges()
        .iter()
        .map(|e| EdgeRecord {
            from_id: e.from.0,
            to_id: e.to.0,
            length_m: e.length_m,
            speed_kmh: Some(e.speed_kmh),
        })
        .collect();
    table::write_file(&dir.join(NODES_FILE), NODE_COLUMNS, &nodes)?;
    table::write_file(&dir.join(EDGES_FILE), EDGE_COLUMNS, &edges)?;
    if net.has_turn_penalties() {
        let mut turns: Vec<TurnPenaltyRecord> = net
            .turn_penalties()
            .map(|(a, b, p)| TurnPenaltyRecord {
                from_edge_index: a,
                to_edge_index: b,
                penalty_s: p,
            })
            .collect();
        turns.sort_by_key(|t| (t.from_edge_index, t.to_edge_index));
        table::write_file(&dir.join(TURNS_FILE), TURN_COLUMNS, &turns)?;
    }
    Ok(())
}
