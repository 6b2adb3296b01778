use std::collections::HashMap;

use serde_json::{json, Value};

use crate::coverage::StopPoint;
use crate::network::{shortest_path, NetworkError, NodeId, RoadNetwork};
use crate::vrp::{Depot, RoutePlan};

/// Node sequence of one trip: the concatenated shortest paths between
/// consecutive visits, with consecutive repeats removed.
pub fn trip_vertices(
    net: &RoadNetwork,
    depot: &Depot,
    stop_nodes: &HashMap<u64, NodeId>,
    stop_ids: &[u64],
    plan: &RoutePlan,
) -> Result<Vec<NodeId>, NetworkError> {
    let mut visits = vec![depot.node];
    for id in stop_ids {
        visits.push(*stop_nodes.get(id).ok_or(NetworkError::UnknownNode(NodeId(*id)))?);
    }
    visits.push(depot.node);
    let mut out: Vec<NodeId> = Vec::new();
    for pair in visits.windows(2) {
        let path = shortest_path(net, pair[0], pair[1], plan.objective)?;
        for n in path.nodes {
            if out.last() != Some(&n) {
                out.push(n);
            }
        }
    }
    Ok(out)
}

/// Planar length of a vertex sequence.
pub fn polyline_length(net: &RoadNetwork, vertices: &[NodeId]) -> Result<f64, NetworkError> {
    let mut total = 0.0;
    for pair in vertices.windows(2) {
        let a = net.node(pair[0]).ok_or(NetworkError::UnknownNode(pair[0]))?;
        let b = net.node(pair[1]).ok_or(NetworkError::UnknownNode(pair[1]))?;
        total += a.distance_to(b.x_m, b.y_m);
    }
    Ok(total)
}

/// GeoJSON feature collection with one line string per trip, in planar
/// network coordinates.
pub fn emit_route_geometry(
    plan: &RoutePlan,
    stops: &[StopPoint],
    depot: &Depot,
    net: &RoadNetwork,
) -> Result<Value, NetworkError> {
    if !net.contains(depot.node) {
        return Err(NetworkError::UnknownNode(depot.node));
    }
    let stop_nodes: HashMap<u64, NodeId> = stops.iter().map(|s| (s.id, s.node)).collect();
    let mut features = Vec::new();
    for truck in &plan.trucks {
        for (i, trip) in truck.trips.iter().enumerate() {
            let mut vertices = trip_vertices(net, depot, &stop_nodes, &trip.stop_ids, plan)?;
            if vertices.len() == 1 {
                vertices.push(vertices[0]);
            }
            let coords: Vec<[f64; 2]> = vertices
                .iter()
                .map(|id| {
                    let n = net.node(*id).expect("path nodes exist");
                    [n.x_m, n.y_m]
                })
                .collect();
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "LineString", "coordinates": coords },
                "properties": {
                    "truck_id": truck.truck_id,
                    "trip_index": i + 1,
                    "stop_sequence": crate::table::join_ids(trip.stop_ids.iter().copied()),
                    "load_kg": trip.load_kg,
                    "distance_m": trip.distance_m,
                },
            }));
        }
    }
    Ok(json!({ "type": "FeatureCollection", "features": features }))
}
