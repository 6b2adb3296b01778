//! Exhaustive optimum for small instances.
//!
//! Every subset of stops is tried as a single trip in every visiting order;
//! the best feasible order per subset feeds a partition recursion over
//! subsets. Feasible means within capacity, within the shift, and using
//! reachable legs only.

use super::{Depot, FleetSpec, Instance, RoutePlan, VrpError};
use crate::coverage::StopPoint;
use crate::network::{Metric, TravelMatrix};

pub const BRUTE_FORCE_MAX_STOPS: usize = 8;

/// Advances `v` to the next lexicographic permutation; false after the last.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Globally minimal plan over all capacity-feasible trip partitions and
/// visiting orders. Intended as a test oracle.
pub fn brute_force_vrp(
    matrix: &TravelMatrix,
    stops: &[StopPoint],
    depot: &Depot,
    fleet: &FleetSpec,
    objective: Metric,
) -> Result<RoutePlan, VrpError> {
    if stops.len() > BRUTE_FORCE_MAX_STOPS {
        return Err(VrpError::TooLarge {
            stops: stops.len(),
            max: BRUTE_FORCE_MAX_STOPS,
        });
    }
    let inst = Instance::new(matrix, stops, depot, fleet, objective)?;
    let n = stops.len();
    let full = (1usize << n) - 1;

    let mut best_order: Vec<Option<(f64, Vec<usize>)>> = vec![None; full + 1];
    for (mask, slot) in best_order.iter_mut().enumerate().skip(1) {
        let mut perm: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        if inst.route_load(&perm) > fleet.capacity_kg {
            continue;
        }
        loop {
            let cost = inst.route_cost(&perm);
            if cost.is_finite()
                && inst.route_time_s(&perm) <= fleet.shift_s
                && slot.as_ref().is_none_or(|(c, _)| cost < *c)
            {
                *slot = Some((cost, perm.clone()));
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }

    // best[mask]: cheapest partition of `mask` into feasible trips.
    let mut best: Vec<Option<(f64, usize)>> = vec![None; full + 1];
    best[0] = Some((0.0, 0));
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // Enumerate subsets of `rest`, each joined with the lowest bit.
        let mut sub = rest;
        loop {
            let trip = sub | low;
            if let (Some((tc, _)), Some((rc, _))) = (&best_order[trip], best[mask ^ trip]) {
                let c = rc + tc;
                if best[mask].is_none_or(|(b, _)| c < b) {
                    best[mask] = Some((c, trip));
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    let mut routes = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let (_, trip) = best[mask].expect("every stop fits a trip on its own");
        routes.push(best_order[trip].as_ref().expect("feasible trip").1.clone());
        mask ^= trip;
    }
    inst.plan(routes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vrp::fixtures::{planar, DEPOT};

    #[test]
    fn permutations_are_complete() {
        let mut v = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(v, vec![3, 2, 1, 0]);
    }

    #[test]
    fn square_around_depot() {
        // Four stops on a 1 km square centred on the depot: one tour of
        // 4 x 1000 m sides plus 2 x 707 m spokes.
        let pts = [(500.0, 500.0), (-500.0, 500.0), (-500.0, -500.0), (500.0, -500.0)];
        let (tm, stops) = planar(&pts, &[100.0; 4], 40.0);
        let plan = brute_force_vrp(&tm, &stops, &DEPOT, &FleetSpec::default(), Metric::Distance).unwrap();
        let expected = 3000.0 + 2.0 * 500f64.hypot(500.0);
        assert_eq!(plan.trip_count, 1);
        assert!((plan.cost - expected).abs() < 1e-9, "{}", plan.cost);
    }

    #[test]
    fn capacity_forces_split() {
        let pts = [(1000.0, 0.0), (1000.0, 10.0), (1000.0, 20.0)];
        let (tm, stops) = planar(&pts, &[2000.0, 2000.0, 2000.0], 40.0);
        let plan = brute_force_vrp(&tm, &stops, &DEPOT, &FleetSpec::default(), Metric::Time).unwrap();
        assert_eq!(plan.trip_count, 2);
        plan.check(&stops, &FleetSpec::default()).unwrap();
    }

    #[test]
    fn too_large() {
        let pts: Vec<(f64, f64)> = (0..9).map(|i| (i as f64 * 100.0 + 100.0, 0.0)).collect();
        let (tm, stops) = planar(&pts, &[10.0; 9], 40.0);
        assert!(matches!(
            brute_force_vrp(&tm, &stops, &DEPOT, &FleetSpec::default(), Metric::Time),
            Err(VrpError::TooLarge { stops: 9, max: 8 })
        ));
    }
}
