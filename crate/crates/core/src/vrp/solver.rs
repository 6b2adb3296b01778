use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::local_search::improve_routes;
use super::savings::savings_routes;
use super::{canonicalize, Depot, FleetSpec, Instance, RoutePlan, Trip, VrpError};
use crate::coverage::StopPoint;
use crate::network::{Metric, TravelMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOptions {
    /// Seeded randomized restarts on top of the savings start.
    pub restarts: usize,
    /// Maximum improving moves applied per local search run.
    pub move_budget: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            restarts: 16,
            move_budget: 10_000,
        }
    }
}

/// Per-restart seed; restart 0 is the savings start and draws nothing.
fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Cheapest feasible insertion of stops taken in random order.
fn random_insertion(inst: &Instance, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.shuffle(rng);
    let mut routes: Vec<Vec<usize>> = Vec::new();
    for k in order {
        let node = k + 1;
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, route) in routes.iter().enumerate() {
            if inst.route_load(route) + inst.demand(k) > inst.fleet.capacity_kg {
                continue;
            }
            for p in 0..=route.len() {
                let x = if p == 0 { 0 } else { route[p - 1] + 1 };
                let y = route.get(p).map_or(0, |&s| s + 1);
                let delta = inst.c(x, node) + inst.c(node, y) - inst.c(x, y);
                if !delta.is_finite() || best.is_some_and(|(b, _, _)| delta >= b) {
                    continue;
                }
                let mut cand = route.clone();
                cand.insert(p, k);
                if inst.route_time_s(&cand) <= inst.fleet.shift_s {
                    best = Some((delta, r, p));
                }
            }
        }
        let alone = inst.c(0, node) + inst.c(node, 0);
        match best {
            Some((delta, r, p)) if delta < alone => routes[r].insert(p, k),
            _ => routes.push(vec![k]),
        }
    }
    routes
}

/// Plans capacity- and shift-feasible trips minimizing total `objective`,
/// then packs them onto trucks.
///
/// The savings construction followed by local search is always one of the
/// candidates, so the result is never worse than that start. Restarts are
/// seeded from `seed` and may run concurrently; the winner is picked by
/// (cost, trip count, restart index), so the plan depends only on the inputs and seed.
pub fn solve_vrp(
    matrix: &TravelMatrix,
    stops: &[StopPoint],
    depot: &Depot,
    fleet: &FleetSpec,
    objective: Metric,
    seed: u64,
) -> Result<RoutePlan, VrpError> {
    solve_vrp_with(matrix, stops, depot, fleet, objective, seed, &SolverOptions::default())
}

pub fn solve_vrp_with(
    matrix: &TravelMatrix,
    stops: &[StopPoint],
    depot: &Depot,
    fleet: &FleetSpec,
    objective: Metric,
    seed: u64,
    options: &SolverOptions,
) -> Result<RoutePlan, VrpError> {
    let inst = Instance::new(matrix, stops, depot, fleet, objective)?;
    if inst.len() == 0 {
        return inst.plan(Vec::new());
    }
    let candidates: Vec<(f64, usize, Vec<Vec<usize>>)> = (0..=options.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                savings_routes(&inst)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r));
                random_insertion(&inst, &mut rng)
            };
            let mut routes = improve_routes(&inst, start, options.move_budget);
            canonicalize(&mut routes);
            (inst.total_cost(&routes), r, routes)
        })
        .collect();
    let (_, _, best) = candidates
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.2.len().cmp(&b.2.len())).then(a.1.cmp(&b.1)))
        .expect("restart 0 always runs");
    inst.plan(best)
}

/// Runs 2-opt / Or-opt on a feasible trip set. The objective never
/// increases and the output stays feasible.
pub fn improve_local(
    trips: &[Trip],
    matrix: &TravelMatrix,
    stops: &[StopPoint],
    depot: &Depot,
    fleet: &FleetSpec,
    objective: Metric,
    move_budget: usize,
) -> Result<Vec<Trip>, VrpError> {
    let inst = Instance::new(matrix, stops, depot, fleet, objective)?;
    let routes = inst.routes_of(trips)?;
    if let Some(bad) = routes.iter().find(|r| !inst.feasible(r)) {
        return Err(VrpError::InvalidPlan(format!(
            "infeasible input trip {:?}",
            bad.iter().map(|&k| stops[k].id).collect::<Vec<_>>()
        )));
    }
    let out = improve_routes(&inst, routes, move_budget);
    Ok(out.iter().map(|r| inst.trip(r)).collect())
}
