//! Capacitated multi-trip routing from a single depot.
//!
//! Work is routed trip-first: every trip leaves the depot, visits stops
//! until the truck is full, and returns to unload. Trips are then packed
//! onto trucks against the working shift ([`size_fleet`]).
//!
//! The travel matrix passed to the solvers covers the depot at position 0
//! followed by the stops in the order given.

mod exact;
mod fleet;
mod io;
mod local_search;
mod metrics;
mod savings;
mod solver;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::StopPoint;
use crate::network::{CostMatrix, Metric, NodeId, TravelMatrix};
use crate::table::TableError;

pub use exact::{brute_force_vrp, BRUTE_FORCE_MAX_STOPS};
pub use fleet::{first_fit_decreasing, size_fleet, FleetAssignment};
pub use io::{write_plan, PLAN_COLUMNS};
pub use metrics::{route_metrics, RouteMetrics, WorkBreakdown};
pub use savings::clarke_wright;
pub use solver::{improve_local, solve_vrp, solve_vrp_with, SolverOptions};

#[derive(Debug, Error)]
pub enum VrpError {
    #[error("stop {stop_id} needs {demand_kg} kg, above truck capacity {capacity_kg} kg")]
    InfeasibleStop {
        stop_id: u64,
        demand_kg: f64,
        capacity_kg: f64,
    },
    #[error("stop {stop_id} cannot be reached from the depot and back")]
    UnreachableStop { stop_id: u64 },
    #[error("a trip needs {trip_s:.0} s, longer than the {shift_s:.0} s shift")]
    ShiftTooShort { trip_s: f64, shift_s: f64 },
    #[error("exhaustive search is limited to {max} stops, got {stops}")]
    TooLarge { stops: usize, max: usize },
    #[error("travel matrix does not match the depot and stops: {0}")]
    MatrixMismatch(String),
    #[error("duplicate stop id {0}")]
    DuplicateStop(u64),
    #[error("plan references unknown stop {0}")]
    UnknownStop(u64),
    #[error("invalid fleet: {0}")]
    InvalidFleet(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub capacity_kg: f64,
    /// Fallback speed for edges without one.
    pub speed_kmh: f64,
    pub stop_service_s: f64,
    /// Depot turnaround per trip.
    pub unload_s: f64,
    pub shift_s: f64,
    pub crew_size: u32,
}

impl Default for FleetSpec {
    fn default() -> Self {
        FleetSpec {
            capacity_kg: 4000.0,
            speed_kmh: 40.0,
            stop_service_s: 1800.0,
            unload_s: 900.0,
            shift_s: 8.0 * 3600.0,
            crew_size: 3,
        }
    }
}

impl FleetSpec {
    pub fn validate(&self) -> Result<(), VrpError> {
        let fields = [
            ("capacity_kg", self.capacity_kg),
            ("speed_kmh", self.speed_kmh),
            ("stop_service_s", self.stop_service_s),
            ("unload_s", self.unload_s),
            ("shift_s", self.shift_s),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(VrpError::InvalidFleet(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.crew_size == 0 {
            return Err(VrpError::InvalidFleet("crew_size must be > 0".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Depot {
    pub node: NodeId,
}

/// One depot-to-depot tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trip {
    pub stop_ids: Vec<u64>,
    pub load_kg: f64,
    pub drive_time_s: f64,
    pub service_time_s: f64,
    pub unload_s: f64,
    pub total_time_s: f64,
    pub distance_m: f64,
    /// Objective value of the trip (drive time or distance).
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruckPlan {
    pub truck_id: u32,
    pub trips: Vec<Trip>,
}

impl TruckPlan {
    pub fn total_time_s(&self) -> f64 {
        self.trips.iter().map(|t| t.total_time_s).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutePlan {
    pub trucks: Vec<TruckPlan>,
    /// Trucks with at least one trip.
    pub fleet_size: usize,
    pub trip_count: usize,
    pub total_distance_m: f64,
    pub total_drive_time_s: f64,
    pub total_work_time_s: f64,
    pub objective: Metric,
    /// Sum of trip costs under `objective`.
    pub cost: f64,
}

impl RoutePlan {
    /// Packs trips onto trucks and fills in the totals.
    pub fn assemble(trips: Vec<Trip>, fleet: &FleetSpec, objective: Metric) -> Result<Self, VrpError> {
        let assignment = size_fleet(&trips, fleet.shift_s)?;
        let cost = trips.iter().map(|t| t.cost).sum();
        let total_distance_m = trips.iter().map(|t| t.distance_m).sum();
        let total_drive_time_s = trips.iter().map(|t| t.drive_time_s).sum();
        let total_work_time_s = trips.iter().map(|t| t.total_time_s).sum();
        let trip_count = trips.len();
        let mut slots: Vec<Option<Trip>> = trips.into_iter().map(Some).collect();
        let trucks: Vec<TruckPlan> = assignment
            .trucks
            .iter()
            .enumerate()
            .map(|(k, idx)| TruckPlan {
                truck_id: k as u32 + 1,
                trips: idx
                    .iter()
                    .map(|&i| slots[i].take().expect("each trip packed once"))
                    .collect(),
            })
            .collect();
        Ok(RoutePlan {
            fleet_size: trucks.iter().filter(|t| !t.trips.is_empty()).count(),
            trucks,
            trip_count,
            total_distance_m,
            total_drive_time_s,
            total_work_time_s,
            objective,
            cost,
        })
    }

    pub fn trips(&self) -> impl Iterator<Item = &Trip> {
        self.trucks.iter().flat_map(|t| t.trips.iter())
    }

    /// Checks exact cover, capacity, shift and the time decomposition.
    pub fn check(&self, stops: &[StopPoint], fleet: &FleetSpec) -> Result<(), VrpError> {
        let mut seen: HashMap<u64, usize> = HashMap::new();
        for trip in self.trips() {
            if trip.stop_ids.is_empty() {
                return Err(VrpError::InvalidPlan("empty trip".to_string()));
            }
            for id in &trip.stop_ids {
                *seen.entry(*id).or_default() += 1;
            }
            if trip.load_kg > fleet.capacity_kg {
                return Err(VrpError::InvalidPlan(format!(
                    "trip load {} kg exceeds capacity",
                    trip.load_kg
                )));
            }
            let sum = trip.drive_time_s + trip.service_time_s + trip.unload_s;
            if (sum - trip.total_time_s).abs() > 1e-9 * sum.max(1.0) {
                return Err(VrpError::InvalidPlan("trip time does not decompose".to_string()));
            }
        }
        for stop in stops {
            match seen.remove(&stop.id) {
                Some(1) => {}
                Some(n) => return Err(VrpError::InvalidPlan(format!("stop {} visited {n} times", stop.id))),
                None => return Err(VrpError::InvalidPlan(format!("stop {} not visited", stop.id))),
            }
        }
        if let Some(&id) = seen.keys().next() {
            return Err(VrpError::UnknownStop(id));
        }
        for truck in &self.trucks {
            if truck.total_time_s() > fleet.shift_s {
                return Err(VrpError::InvalidPlan(format!(
                    "truck {} works past the shift",
                    truck.truck_id
                )));
            }
        }
        let used = self.trucks.iter().filter(|t| !t.trips.is_empty()).count();
        if used != self.fleet_size {
            return Err(VrpError::InvalidPlan("fleet_size disagrees with trucks".to_string()));
        }
        Ok(())
    }
}

/// Validated view of a routing instance. Stop `k` sits at matrix index `k + 1`.
pub(crate) struct Instance<'a> {
    pub stops: &'a [StopPoint],
    pub fleet: &'a FleetSpec,
    pub objective: Metric,
    cost: &'a CostMatrix,
    time: &'a CostMatrix,
    dist: &'a CostMatrix,
    position: HashMap<u64, usize>,
}

impl<'a> Instance<'a> {
    pub fn new(
        matrix: &'a TravelMatrix,
        stops: &'a [StopPoint],
        depot: &Depot,
        fleet: &'a FleetSpec,
        objective: Metric,
    ) -> Result<Self, VrpError> {
        fleet.validate()?;
        let nodes = matrix.nodes();
        if nodes.len() != stops.len() + 1 {
            return Err(VrpError::MatrixMismatch(format!(
                "matrix covers {} nodes, expected depot + {} stops",
                nodes.len(),
                stops.len()
            )));
        }
        if nodes[0] != depot.node {
            return Err(VrpError::MatrixMismatch(format!(
                "position 0 is node {}, depot is node {}",
                nodes[0], depot.node
            )));
        }
        let mut position = HashMap::with_capacity(stops.len());
        for (k, stop) in stops.iter().enumerate() {
            if nodes[k + 1] != stop.node {
                return Err(VrpError::MatrixMismatch(format!(
                    "position {} is node {}, stop {} sits at node {}",
                    k + 1,
                    nodes[k + 1],
                    stop.id,
                    stop.node
                )));
            }
            if position.insert(stop.id, k).is_some() {
                return Err(VrpError::DuplicateStop(stop.id));
            }
        }
        let inst = Instance {
            stops,
            fleet,
            objective,
            cost: matrix.costs(objective),
            time: &matrix.time_s,
            dist: &matrix.distance_m,
            position,
        };
        for (k, stop) in stops.iter().enumerate() {
            if stop.assigned_demand_kg > fleet.capacity_kg {
                return Err(VrpError::InfeasibleStop {
                    stop_id: stop.id,
                    demand_kg: stop.assigned_demand_kg,
                    capacity_kg: fleet.capacity_kg,
                });
            }
            let out_and_back = [k];
            if !inst.route_cost(&out_and_back).is_finite() || !inst.route_drive_s(&out_and_back).is_finite() {
                return Err(VrpError::UnreachableStop { stop_id: stop.id });
            }
            let t = inst.route_time_s(&out_and_back);
            if t > fleet.shift_s {
                return Err(VrpError::ShiftTooShort {
                    trip_s: t,
                    shift_s: fleet.shift_s,
                });
            }
        }
        Ok(inst)
    }

    pub fn len(&self) -> usize {
        self.stops.len()
    }

    pub fn position(&self, stop_id: u64) -> Option<usize> {
        self.position.get(&stop_id).copied()
    }

    /// Objective cost between matrix indices (0 = depot).
    #[inline]
    pub fn c(&self, a: usize, b: usize) -> f64 {
        self.cost.raw(a, b)
    }

    /// Drive time between matrix indices.
    #[inline]
    pub fn t(&self, a: usize, b: usize) -> f64 {
        self.time.raw(a, b)
    }

    fn walk(m: &CostMatrix, seq: &[usize]) -> f64 {
        let mut total = 0.0;
        let mut at = 0;
        for &k in seq {
            total += m.raw(at, k + 1);
            at = k + 1;
        }
        total + m.raw(at, 0)
    }

    pub fn route_cost(&self, seq: &[usize]) -> f64 {
        Self::walk(self.cost, seq)
    }

    pub fn route_drive_s(&self, seq: &[usize]) -> f64 {
        Self::walk(self.time, seq)
    }

    pub fn route_distance_m(&self, seq: &[usize]) -> f64 {
        Self::walk(self.dist, seq)
    }

    pub fn demand(&self, k: usize) -> f64 {
        self.stops[k].assigned_demand_kg
    }

    pub fn service_s(&self, k: usize) -> f64 {
        self.stops[k].service_time_s
    }

    pub fn route_load(&self, seq: &[usize]) -> f64 {
        seq.iter().map(|&k| self.demand(k)).sum()
    }

    pub fn route_service_s(&self, seq: &[usize]) -> f64 {
        seq.iter().map(|&k| self.service_s(k)).sum()
    }

    pub fn route_time_s(&self, seq: &[usize]) -> f64 {
        self.route_drive_s(seq) + self.route_service_s(seq) + self.fleet.unload_s
    }

    pub fn feasible(&self, seq: &[usize]) -> bool {
        !seq.is_empty()
            && self.route_load(seq) <= self.fleet.capacity_kg
            && self.route_cost(seq).is_finite()
            && self.route_time_s(seq) <= self.fleet.shift_s
    }

    pub fn trip(&self, seq: &[usize]) -> Trip {
        let drive = self.route_drive_s(seq);
        let service = self.route_service_s(seq);
        Trip {
            stop_ids: seq.iter().map(|&k| self.stops[k].id).collect(),
            load_kg: self.route_load(seq),
            drive_time_s: drive,
            service_time_s: service,
            unload_s: self.fleet.unload_s,
            total_time_s: drive + service + self.fleet.unload_s,
            distance_m: self.route_distance_m(seq),
            cost: self.route_cost(seq),
        }
    }

    /// Total objective of a route set, summed in canonical order.
    pub fn total_cost(&self, routes: &[Vec<usize>]) -> f64 {
        routes.iter().map(|r| self.route_cost(r)).sum()
    }

    /// Maps a trip list back to stop positions.
    pub fn routes_of(&self, trips: &[Trip]) -> Result<Vec<Vec<usize>>, VrpError> {
        trips
            .iter()
            .map(|t| {
                t.stop_ids
                    .iter()
                    .map(|&id| self.position(id).ok_or(VrpError::UnknownStop(id)))
                    .collect()
            })
            .collect()
    }

    pub fn plan(&self, mut routes: Vec<Vec<usize>>) -> Result<RoutePlan, VrpError> {
        canonicalize(&mut routes);
        let trips = routes.iter().map(|r| self.trip(r)).collect();
        RoutePlan::assemble(trips, self.fleet, self.objective)
    }
}

/// Drops empty routes and orders the rest by their smallest stop position.
pub(crate) fn canonicalize(routes: &mut Vec<Vec<usize>>) {
    routes.retain(|r| !r.is_empty());
    routes.sort_by_key(|r| r.iter().copied().min());
}
