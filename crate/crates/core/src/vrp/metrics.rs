use serde::Serialize;

use super::{Depot, FleetSpec, Instance, RoutePlan, VrpError};
use crate::coverage::StopPoint;
use crate::network::TravelMatrix;

/// Distance and time totals over a group of trips.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WorkBreakdown {
    pub trips: usize,
    pub stop_visits: usize,
    pub distance_m: f64,
    pub drive_s: f64,
    pub service_s: f64,
    pub unload_s: f64,
    pub total_s: f64,
}

impl WorkBreakdown {
    fn add(&mut self, other: &WorkBreakdown) {
        self.trips += other.trips;
        self.stop_visits += other.stop_visits;
        self.distance_m += other.distance_m;
        self.drive_s += other.drive_s;
        self.service_s += other.service_s;
        self.unload_s += other.unload_s;
        self.total_s += other.total_s;
    }
}

/// Per-truck and fleet totals recomputed from the travel matrix.
///
/// Averages are given both per truck (`avg_route_*`) and per trip
/// (`avg_trip_*`), since a "route" can mean either a truck's day or a
/// single depot-to-depot tour.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteMetrics {
    pub per_truck: Vec<(u32, WorkBreakdown)>,
    pub totals: WorkBreakdown,
    pub fleet_size: usize,
    pub avg_route_km: f64,
    pub avg_route_h: f64,
    pub avg_trip_km: f64,
    pub avg_trip_h: f64,
}

fn ratio(total: f64, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

pub fn route_metrics(
    plan: &RoutePlan,
    matrix: &TravelMatrix,
    stops: &[StopPoint],
    depot: &Depot,
    fleet: &FleetSpec,
) -> Result<RouteMetrics, VrpError> {
    let inst = Instance::new(matrix, stops, depot, fleet, plan.objective)?;
    let mut per_truck = Vec::with_capacity(plan.trucks.len());
    let mut totals = WorkBreakdown::default();
    for truck in &plan.trucks {
        let mut work = WorkBreakdown::default();
        for route in inst.routes_of(&truck.trips)? {
            let drive = inst.route_drive_s(&route);
            let service = inst.route_service_s(&route);
            work.add(&WorkBreakdown {
                trips: 1,
                stop_visits: route.len(),
                distance_m: inst.route_distance_m(&route),
                drive_s: drive,
                service_s: service,
                unload_s: fleet.unload_s,
                total_s: drive + service + fleet.unload_s,
            });
        }
        totals.add(&work);
        per_truck.push((truck.truck_id, work));
    }
    let fleet_size = plan.fleet_size;
    Ok(RouteMetrics {
        avg_route_km: ratio(totals.distance_m / 1000.0, fleet_size),
        avg_route_h: ratio(totals.total_s / 3600.0, fleet_size),
        avg_trip_km: ratio(totals.distance_m / 1000.0, totals.trips),
        avg_trip_h: ratio(totals.total_s / 3600.0, totals.trips),
        per_truck,
        totals,
        fleet_size,
    })
}
