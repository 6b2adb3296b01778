//! Clarke-Wright savings construction.
//!
//! Every stop starts on its own out-and-back trip. For an ordered pair
//! (i, j) the saving of running i then j on one trip is
//!
//! ```text
//! s(i, j) = c(depot, i) + c(j, depot) - c(i, j)
//! ```
//!
//! Pairs are visited in descending saving (ties by stop id pair). A merge
//! joins the trip ending at i with the trip starting at j when the result
//! stays within capacity and the shift.

use super::{Depot, FleetSpec, Instance, Trip, VrpError};
use crate::coverage::StopPoint;
use crate::network::{Metric, TravelMatrix};

pub(crate) fn savings_routes(inst: &Instance) -> Vec<Vec<usize>> {
    let n = inst.len();
    let mut savings = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let s = inst.c(0, i + 1) + inst.c(j + 1, 0) - inst.c(i + 1, j + 1);
            if s > 0.0 {
                savings.push((s, i, j));
            }
        }
    }
    let id = |k: usize| inst.stops[k].id;
    savings.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| (id(a.1), id(a.2)).cmp(&(id(b.1), id(b.2))))
    });

    let mut routes: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    let mut route_of: Vec<usize> = (0..n).collect();
    for (_, i, j) in savings {
        let (ri, rj) = (route_of[i], route_of[j]);
        if ri == rj || routes[ri].last() != Some(&i) || routes[rj].first() != Some(&j) {
            continue;
        }
        let merged: Vec<usize> = routes[ri].iter().chain(&routes[rj]).copied().collect();
        if !inst.feasible(&merged) {
            continue;
        }
        for &k in &routes[rj] {
            route_of[k] = ri;
        }
        routes[rj].clear();
        routes[ri] = merged;
    }
    routes.retain(|r| !r.is_empty());
    routes
}

/// Initial capacity- and shift-feasible trips from the savings heuristic.
pub fn clarke_wright(
    matrix: &TravelMatrix,
    stops: &[StopPoint],
    depot: &Depot,
    fleet: &FleetSpec,
    objective: Metric,
) -> Result<Vec<Trip>, VrpError> {
    let inst = Instance::new(matrix, stops, depot, fleet, objective)?;
    let mut routes = savings_routes(&inst);
    super::canonicalize(&mut routes);
    Ok(routes.iter().map(|r| inst.trip(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vrp::fixtures::{planar, DEPOT};

    #[test]
    fn close_pair_is_merged() {
        // Out-and-back twice: 2 x 2000 + 2 x 2236 m; merged: 2000 + 1000 + 2236.
        let (tm, stops) = planar(&[(2000.0, 0.0), (2000.0, 1000.0)], &[500.0, 500.0], 40.0);
        let trips = clarke_wright(&tm, &stops, &DEPOT, &FleetSpec::default(), Metric::Distance).unwrap();
        assert_eq!(trips.len(), 1);
        let separate = 2.0 * 2000.0 + 2.0 * 2000f64.hypot(1000.0);
        assert!(trips[0].distance_m < separate);
        assert!((trips[0].distance_m - (3000.0 + 2000f64.hypot(1000.0))).abs() < 1e-9);
    }

    #[test]
    fn capacity_vetoes_merge() {
        let (tm, stops) = planar(&[(2000.0, 0.0), (2000.0, 100.0)], &[2500.0, 2000.0], 40.0);
        let trips = clarke_wright(&tm, &stops, &DEPOT, &FleetSpec::default(), Metric::Time).unwrap();
        assert_eq!(trips.len(), 2);
        assert!(trips.iter().all(|t| t.stop_ids.len() == 1));
    }

    #[test]
    fn single_stop_out_and_back() {
        let (tm, stops) = planar(&[(2000.0, 0.0)], &[500.0], 40.0);
        let trips = clarke_wright(&tm, &stops, &DEPOT, &FleetSpec::default(), Metric::Time).unwrap();
        assert_eq!(trips.len(), 1);
        assert_eq!(trips[0].stop_ids, vec![1]);
        assert!((trips[0].drive_time_s - 360.0).abs() < 1e-9);
    }

    #[test]
    fn shift_vetoes_merge() {
        // Each stop: 360 s drive + 1800 s service + 900 s unload = 3060 s.
        let (tm, stops) = planar(&[(2000.0, 0.0), (2000.0, 100.0)], &[100.0, 100.0], 40.0);
        let fleet = FleetSpec {
            shift_s: 4000.0,
            ..Default::default()
        };
        let trips = clarke_wright(&tm, &stops, &DEPOT, &fleet, Metric::Time).unwrap();
        assert_eq!(trips.len(), 2);
    }
}
