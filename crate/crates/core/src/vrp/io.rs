use std::path::Path;

use serde::Serialize;

use super::{RoutePlan, VrpError};
use crate::table;

pub const PLAN_COLUMNS: &[&str] = &[
    "truck_id",
    "trip_index",
    "stop_sequence",
    "load_kg",
    "distance_m",
    "drive_s",
    "service_s",
    "unload_s",
];

#[derive(Debug, Serialize)]
struct PlanRecord {
    truck_id: u32,
    trip_index: usize,
    stop_sequence: String,
    load_kg: f64,
    distance_m: f64,
    drive_s: f64,
    service_s: f64,
    unload_s: f64,
}

/// One row per trip; `trip_index` counts from 1 within each truck.
pub fn write_plan(path: &Path, plan: &RoutePlan) -> Result<(), VrpError> {
    let rows: Vec<PlanRecord> = plan
        .trucks
        .iter()
        .flat_map(|truck| {
            truck.trips.iter().enumerate().map(move |(i, t)| PlanRecord {
                truck_id: truck.truck_id,
                trip_index: i + 1,
                stop_sequence: table::join_ids(t.stop_ids.iter().copied()),
                load_kg: t.load_kg,
                distance_m: t.distance_m,
                drive_s: t.drive_time_s,
                service_s: t.service_time_s,
                unload_s: t.unload_s,
            })
        })
        .collect();
    Ok(table::write_file(path, PLAN_COLUMNS, &rows)?)
}
