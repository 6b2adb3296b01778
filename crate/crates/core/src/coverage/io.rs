use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Building, CoverageError, StopPoint};
use crate::network::NodeId;
use crate::table;

pub const BUILDING_COLUMNS: &[&str] = &["id", "x_m", "y_m", "dwelling_units"];
pub const STOP_COLUMNS: &[&str] = &["stop_id", "node_id", "assigned_kg", "service_time_s", "covered_ids"];

#[derive(Debug, Serialize, Deserialize)]
struct StopRecord {
    stop_id: u64,
    node_id: u64,
    assigned_kg: f64,
    service_time_s: f64,
    covered_ids: String,
}

pub fn read_buildings(path: &Path) -> Result<Vec<Building>, CoverageError> {
    Ok(table::read_file(path, BUILDING_COLUMNS)?)
}

pub fn write_stops(path: &Path, stops: &[StopPoint]) -> Result<(), CoverageError> {
    let rows: Vec<StopRecord> = stops
        .iter()
        .map(|s| StopRecord {
            stop_id: s.id,
            node_id: s.node.0,
            assigned_kg: s.assigned_demand_kg,
            service_time_s: s.service_time_s,
            covered_ids: table::join_ids(s.covered_demand_ids.iter().copied()),
        })
        .collect();
    Ok(table::write_file(path, STOP_COLUMNS, &rows)?)
}

/// Reads a stops table. The overflow flag is not stored and reads back as false.
pub fn read_stops(path: &Path) -> Result<Vec<StopPoint>, CoverageError> {
    let rows: Vec<StopRecord> = table::read_file(path, STOP_COLUMNS)?;
    rows.into_iter()
        .map(|r| {
            let covered = table::split_ids(&r.covered_ids)
                .map_err(|e| CoverageError::BadStopRecord(format!("stop {}: covered_ids: {e}", r.stop_id)))?;
            Ok(StopPoint {
                id: r.stop_id,
                node: NodeId(r.node_id),
                assigned_demand_kg: r.assigned_kg,
                service_time_s: r.service_time_s,
                covered_demand_ids: covered,
                overflow: false,
            })
        })
        .collect()
}
