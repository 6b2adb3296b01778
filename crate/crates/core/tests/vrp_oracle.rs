mod common;

use proptest::prelude::*;
use rand::Rng;

use common::DEPOT;
use wasteroute::network::Metric;
use wasteroute::vrp::{
    brute_force_vrp, clarke_wright, first_fit_decreasing, improve_local, route_metrics, size_fleet, solve_vrp,
    FleetSpec,
};

#[test]
fn solver_is_feasible_and_close_to_optimal() {
    let fleet = FleetSpec::default();
    let mut exact = 0;
    for seed in 0..40 {
        let (tm, stops) = common::random_vrp(seed);
        let plan = solve_vrp(&tm, &stops, &DEPOT, &fleet, Metric::Time, seed).unwrap();
        plan.check(&stops, &fleet).unwrap();
        let opt = brute_force_vrp(&tm, &stops, &DEPOT, &fleet, Metric::Time).unwrap();
        assert!(
            plan.cost <= 1.15 * opt.cost,
            "seed {seed}: {} vs {}",
            plan.cost,
            opt.cost
        );
        assert!(plan.cost >= opt.cost * (1.0 - 1e-9), "seed {seed}: beat the oracle");
        if common::same_cost(plan.cost, opt.cost) {
            exact += 1;
        }
    }
    assert!(exact >= 32, "only {exact}/40 optimal");
}

#[test]
fn distance_objective_against_oracle() {
    let fleet = FleetSpec::default();
    for seed in 100..120 {
        let (tm, stops) = common::random_vrp(seed);
        let plan = solve_vrp(&tm, &stops, &DEPOT, &fleet, Metric::Distance, 3).unwrap();
        let opt = brute_force_vrp(&tm, &stops, &DEPOT, &fleet, Metric::Distance).unwrap();
        assert!(plan.cost <= 1.15 * opt.cost);
        assert!(common::same_cost(plan.cost, plan.total_distance_m));
    }
}

#[test]
fn local_search_never_worsens_savings() {
    let fleet = FleetSpec::default();
    for seed in 0..30 {
        let (tm, stops) = common::random_vrp(seed);
        let cw = clarke_wright(&tm, &stops, &DEPOT, &fleet, Metric::Time).unwrap();
        let before: f64 = cw.iter().map(|t| t.cost).sum();
        let after = improve_local(&cw, &tm, &stops, &DEPOT, &fleet, Metric::Time, 10_000).unwrap();
        let total: f64 = after.iter().map(|t| t.cost).sum();
        assert!(total <= before * (1.0 + 1e-12), "seed {seed}");
        for t in &after {
            assert!(t.load_kg <= fleet.capacity_kg);
            assert!(t.total_time_s <= fleet.shift_s);
        }
    }
}

#[test]
fn metrics_rebuild_plan_totals() {
    let fleet = FleetSpec::default();
    for seed in 0..20 {
        let (tm, stops) = common::random_vrp(seed);
        let plan = solve_vrp(&tm, &stops, &DEPOT, &fleet, Metric::Time, 0).unwrap();
        let m = route_metrics(&plan, &tm, &stops, &DEPOT, &fleet).unwrap();
        assert!(common::same_cost(m.totals.distance_m, plan.total_distance_m));
        assert!(common::same_cost(m.totals.drive_s, plan.total_drive_time_s));
        assert!(common::same_cost(m.totals.total_s, plan.total_work_time_s));
        assert_eq!(m.totals.stop_visits, stops.len());
        assert_eq!(m.totals.service_s, 1800.0 * stops.len() as f64);
    }
}

#[test]
fn fleet_sizing_matches_exhaustive_packing() {
    let shift = 8.0 * 3600.0;
    let mut ffd_hits = 0;
    for seed in 0..200 {
        let mut r = common::rng(seed);
        let n = r.gen_range(1..=6);
        let sizes: Vec<f64> = (0..n).map(|_| r.gen_range(1800.0..shift)).collect();
        let trips: Vec<_> = sizes.iter().map(|&s| common::trip_of_duration(s)).collect();
        let best = common::min_bins(&sizes, shift);
        let a = size_fleet(&trips, shift).unwrap();
        assert_eq!(a.fleet_size(), best, "seed {seed}: {sizes:?}");
        let mut all: Vec<usize> = a.trucks.concat();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
        for truck in &a.trucks {
            assert!(truck.iter().map(|&i| sizes[i]).sum::<f64>() <= shift);
        }
        if first_fit_decreasing(&sizes, shift).unwrap().len() == best {
            ffd_hits += 1;
        }
    }
    assert!(ffd_hits > 150);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_stop_exactly_once(
        pts in prop::collection::vec((-4000.0f64..4000.0, -4000.0f64..4000.0), 1..12),
        seed in any::<u64>(),
    ) {
        let kg: Vec<f64> = pts.iter().enumerate().map(|(i, _)| 200.0 + 97.0 * (i % 7) as f64).collect();
        let (tm, stops) = common::planar(&pts, &kg, 40.0);
        let fleet = FleetSpec::default();
        let plan = solve_vrp(&tm, &stops, &DEPOT, &fleet, Metric::Time, seed).unwrap();
        prop_assert!(plan.check(&stops, &fleet).is_ok());
        let mut ids: Vec<u64> = plan.trips().flat_map(|t| t.stop_ids.clone()).collect();
        ids.sort_unstable();
        prop_assert_eq!(ids, (1..=pts.len() as u64).collect::<Vec<_>>());
        let again = solve_vrp(&tm, &stops, &DEPOT, &fleet, Metric::Time, seed).unwrap();
        prop_assert_eq!(plan, again);
    }

    #[test]
    fn packing_respects_the_shift(sizes in prop::collection::vec(600.0f64..28_800.0, 0..20)) {
        let trips: Vec<_> = sizes.iter().map(|&s| common::trip_of_duration(s)).collect();
        let a = size_fleet(&trips, 28_800.0).unwrap();
        let lower = (sizes.iter().sum::<f64>() / 28_800.0).ceil() as usize;
        prop_assert!(a.fleet_size() >= lower);
        for truck in &a.trucks {
            prop_assert!(truck.iter().map(|&i| sizes[i]).sum::<f64>() <= 28_800.0);
        }
    }
}
