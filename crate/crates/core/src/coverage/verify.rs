use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{CoverageConfig, DemandPoint, Reach, StopPoint};
use crate::network::RoadNetwork;

const HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower_kg: f64,
    /// Infinite for the last bin, which counts stops above the cap.
    pub upper_kg: f64,
    pub count: usize,
}

/// Post-hoc audit of a stop set against its demand points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Demand ids with no assigned stop inside the service radius.
    pub uncovered: Vec<u64>,
    /// Demand ids listed by more than one stop.
    pub multiply_assigned: Vec<u64>,
    /// Ids listed by stops that match no demand point.
    pub unknown_ids: Vec<u64>,
    /// Stops above the load cap that serve more than one point.
    pub overloaded_stops: Vec<u64>,
    /// Stops whose load disagrees with the sum of their points.
    pub load_mismatches: Vec<u64>,
    pub max_load_kg: f64,
    pub load_histogram: Vec<HistogramBin>,
}

impl CoverageReport {
    pub fn is_clean(&self) -> bool {
        self.uncovered.is_empty()
            && self.multiply_assigned.is_empty()
            && self.unknown_ids.is_empty()
            && self.overloaded_stops.is_empty()
            && self.load_mismatches.is_empty()
    }
}

/// Recomputes distances and loads from scratch; never fails.
pub fn verify_coverage(
    stops: &[StopPoint],
    demands: &[DemandPoint],
    net: &RoadNetwork,
    cfg: &CoverageConfig,
) -> CoverageReport {
    let index: BTreeMap<u64, usize> = demands.iter().enumerate().map(|(i, d)| (d.id, i)).collect();
    let reach = Reach::new(net, demands, cfg);

    let mut assignments: BTreeMap<u64, usize> = BTreeMap::new();
    let mut covered: BTreeSet<u64> = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    let mut overloaded = Vec::new();
    let mut mismatched = Vec::new();
    let cap = cfg.max_stop_load_kg;

    for stop in stops {
        let in_range: BTreeSet<usize> = reach
            .within(stop.node)
            .map(|v| v.into_iter().map(|(d, _)| d).collect())
            .unwrap_or_default();
        let mut load = 0.0;
        for id in &stop.covered_demand_ids {
            *assignments.entry(*id).or_default() += 1;
            match index.get(id) {
                None => {
                    unknown.insert(*id);
                }
                Some(&d) => {
                    load += demands[d].waste_kg_day;
                    if in_range.contains(&d) {
                        covered.insert(*id);
                    }
                }
            }
        }
        if (load - stop.assigned_demand_kg).abs() > 1e-9 * load.max(1.0) {
            mismatched.push(stop.id);
        }
        if stop.assigned_demand_kg > cap * (1.0 + 1e-12) && stop.covered_demand_ids.len() > 1 {
            overloaded.push(stop.id);
        }
    }

    let width = cap / HISTOGRAM_BINS as f64;
    let mut histogram: Vec<HistogramBin> = (0..=HISTOGRAM_BINS)
        .map(|b| HistogramBin {
            lower_kg: b as f64 * width,
            upper_kg: if b == HISTOGRAM_BINS {
                f64::INFINITY
            } else {
                (b + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for stop in stops {
        let b = if stop.assigned_demand_kg > cap {
            HISTOGRAM_BINS
        } else {
            ((stop.assigned_demand_kg / width) as usize).min(HISTOGRAM_BINS - 1)
        };
        histogram[b].count += 1;
    }

    CoverageReport {
        uncovered: demands
            .iter()
            .map(|d| d.id)
            .filter(|id| !covered.contains(id))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        multiply_assigned: assignments
            .into_iter()
            .filter(|&(_, n)| n > 1)
            .map(|(id, _)| id)
            .collect(),
        unknown_ids: unknown.into_iter().collect(),
        overloaded_stops: overloaded,
        load_mismatches: mismatched,
        max_load_kg: stops.iter().map(|s| s.assigned_demand_kg).fold(0.0, f64::max),
        load_histogram: histogram,
    }
}
