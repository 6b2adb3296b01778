//! Household demand and collection stop placement.
//!
//! Buildings are turned into demand points (dwelling units times a daily
//! generation rate). Stops are then opened greedily on network nodes until
//! every demand point lies within the service radius of the stop it is
//! assigned to, with each stop's load held under a cap.

mod io;
mod place;
mod verify;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{reachable_within, Metric, NetworkError, NodeId, RoadNetwork};
use crate::table::TableError;

pub use io::{read_buildings, read_stops, write_stops, BUILDING_COLUMNS, STOP_COLUMNS};
pub use place::place_stops;
pub use verify::{verify_coverage, CoverageReport, HistogramBin};

/// Daily household generation rate, kg per dwelling unit.
pub const DEFAULT_GENERATION_RATE: f64 = 2.49;

/// Tolerance on radius comparisons, meters.
pub(crate) const RADIUS_EPS_M: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("building {id} has negative dwelling units ({units})")]
    NegativeUnits { id: u64, units: i64 },
    #[error("generation rate must be finite and > 0, got {0}")]
    InvalidRate(f64),
    #[error("invalid coverage config: {0}")]
    InvalidConfig(String),
    #[error("duplicate demand point id {0}")]
    DuplicateDemand(u64),
    #[error("no candidate stop within the service radius of demand points {0:?}")]
    UncoverableDemand(Vec<u64>),
    #[error("stops file: {0}")]
    BadStopRecord(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// One row of the buildings table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub id: u64,
    pub x_m: f64,
    pub y_m: f64,
    pub dwelling_units: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandPoint {
    pub id: u64,
    pub x_m: f64,
    pub y_m: f64,
    pub dwelling_units: u64,
    pub waste_kg_day: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopPoint {
    pub id: u64,
    pub node: NodeId,
    pub assigned_demand_kg: f64,
    pub service_time_s: f64,
    /// Ascending demand-point ids.
    pub covered_demand_ids: Vec<u64>,
    /// Set when a single demand point alone exceeds the load cap.
    #[serde(default)]
    pub overflow: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Shortest walk along the street network, either direction.
    #[default]
    Network,
    Euclidean,
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::Network => "network",
            DistanceMode::Euclidean => "euclidean",
        })
    }
}

impl FromStr for DistanceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "network" => Ok(DistanceMode::Network),
            "euclidean" => Ok(DistanceMode::Euclidean),
            other => Err(format!("expected `network` or `euclidean`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub radius_m: f64,
    pub distance_mode: DistanceMode,
    pub max_stop_load_kg: f64,
    /// Nodes allowed to host a stop; all network nodes when `None`.
    pub candidate_nodes: Option<Vec<NodeId>>,
    pub service_time_s: f64,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig {
            radius_m: 300.0,
            distance_mode: DistanceMode::Network,
            max_stop_load_kg: 520.0,
            candidate_nodes: None,
            service_time_s: 1800.0,
        }
    }
}

impl CoverageConfig {
    pub fn validate(&self) -> Result<(), CoverageError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.radius_m) {
            return Err(CoverageError::InvalidConfig(format!(
                "radius_m must be > 0, got {}",
                self.radius_m
            )));
        }
        if !positive(self.max_stop_load_kg) {
            return Err(CoverageError::InvalidConfig(format!(
                "max_stop_load_kg must be > 0, got {}",
                self.max_stop_load_kg
            )));
        }
        if !positive(self.service_time_s) {
            return Err(CoverageError::InvalidConfig(format!(
                "service_time_s must be > 0, got {}",
                self.service_time_s
            )));
        }
        if matches!(&self.candidate_nodes, Some(c) if c.is_empty()) {
            return Err(CoverageError::InvalidConfig("candidate_nodes is empty".to_string()));
        }
        Ok(())
    }
}

/// Turns buildings into demand points, `waste = units x rate`, in input order.
pub fn aggregate_demand(buildings: &[Building], rate_kg_per_unit_day: f64) -> Result<Vec<DemandPoint>, CoverageError> {
    if !(rate_kg_per_unit_day.is_finite() && rate_kg_per_unit_day > 0.0) {
        return Err(CoverageError::InvalidRate(rate_kg_per_unit_day));
    }
    buildings
        .iter()
        .map(|b| {
            let units = u64::try_from(b.dwelling_units).map_err(|_| CoverageError::NegativeUnits {
                id: b.id,
                units: b.dwelling_units,
            })?;
            Ok(DemandPoint {
                id: b.id,
                x_m: b.x_m,
                y_m: b.y_m,
                dwelling_units: units,
                waste_kg_day: units as f64 * rate_kg_per_unit_day,
            })
        })
        .collect()
}

/// Distances from network nodes to demand points under a distance mode.
///
/// In network mode each demand point is first attached to its nearest node
/// (no farther than the radius); the walk is then the shorter of the two
/// directed network distances plus that straight access offset.
pub(crate) struct Reach<'a> {
    net: &'a RoadNetwork,
    demands: &'a [DemandPoint],
    radius_m: f64,
    mode: DistanceMode,
    snapped: Vec<Option<(NodeId, f64)>>,
    reversed: Option<RoadNetwork>,
}

impl<'a> Reach<'a> {
    pub(crate) fn new(net: &'a RoadNetwork, demands: &'a [DemandPoint], cfg: &CoverageConfig) -> Self {
        let (snapped, reversed) = match cfg.distance_mode {
            DistanceMode::Euclidean => (vec![None; demands.len()], None),
            DistanceMode::Network => {
                let snapped = demands
                    .iter()
                    .map(|d| {
                        net.snap(d.x_m, d.y_m, cfg.radius_m).ok().map(|id| {
                            let offset = net.node(id).map_or(0.0, |n| n.distance_to(d.x_m, d.y_m));
                            (id, offset)
                        })
                    })
                    .collect();
                (snapped, Some(net.reversed()))
            }
        };
        Reach {
            net,
            demands,
            radius_m: cfg.radius_m,
            mode: cfg.distance_mode,
            snapped,
            reversed,
        }
    }

    /// Demand indices within the radius of `node`, sorted by (distance, demand id).
    pub(crate) fn within(&self, node: NodeId) -> Result<Vec<(usize, f64)>, NetworkError> {
        let origin = *self.net.node(node).ok_or(NetworkError::UnknownNode(node))?;
        let limit = self.radius_m + RADIUS_EPS_M;
        let mut out: Vec<(usize, f64)> = match self.mode {
            DistanceMode::Euclidean => self
                .demands
                .iter()
                .enumerate()
                .map(|(i, d)| (i, origin.distance_to(d.x_m, d.y_m)))
                .filter(|&(_, dist)| dist <= limit)
                .collect(),
            DistanceMode::Network => {
                let mut walk: HashMap<NodeId, f64> = reachable_within(self.net, node, Metric::Distance, limit)?
                    .into_iter()
                    .collect();
                let reversed = self.reversed.as_ref().expect("network mode keeps a reversed graph");
                for (id, d) in reachable_within(reversed, node, Metric::Distance, limit)? {
                    walk.entry(id).and_modify(|w| *w = w.min(d)).or_insert(d);
                }
                self.snapped
                    .iter()
                    .enumerate()
                    .filter_map(|(i, s)| {
                        let (at, offset) = (*s)?;
                        let dist = walk.get(&at)? + offset;
                        (dist <= limit).then_some((i, dist))
                    })
                    .collect()
            }
        };
        out.sort_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then_with(|| self.demands[a.0].id.cmp(&self.demands[b.0].id))
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn building(id: u64, units: i64) -> Building {
        Building {
            id,
            x_m: 0.0,
            y_m: 0.0,
            dwelling_units: units,
        }
    }

    #[test]
    fn eight_units_make_19_92_kg() {
        let d = aggregate_demand(&[building(1, 8)], 2.49).unwrap();
        assert!((d[0].waste_kg_day - 19.92).abs() < 1e-12);
    }

    #[test]
    fn canonical_cluster_totals_517_92_kg() {
        // 26 buildings x 4 floors x 2 units per floor.
        let b: Vec<Building> = (0..26).map(|i| building(i, 4 * 2)).collect();
        let d = aggregate_demand(&b, DEFAULT_GENERATION_RATE).unwrap();
        let units: u64 = d.iter().map(|p| p.dwelling_units).sum();
        assert_eq!(units, 208);
        let total: f64 = d.iter().map(|p| p.waste_kg_day).sum();
        assert!((total - 517.92).abs() < 1e-9);
    }

    #[test]
    fn zero_units_zero_waste_and_order_kept() {
        let d = aggregate_demand(&[building(5, 0), building(2, 3)], 2.49).unwrap();
        assert_eq!(d[0].waste_kg_day, 0.0);
        assert_eq!(d.iter().map(|p| p.id).collect::<Vec<_>>(), vec![5, 2]);
    }

    #[test]
    fn negative_units_and_bad_rate() {
        assert!(matches!(
            aggregate_demand(&[building(3, -1)], 2.49),
            Err(CoverageError::NegativeUnits { id: 3, units: -1 })
        ));
        assert!(matches!(
            aggregate_demand(&[building(3, 1)], 0.0),
            Err(CoverageError::InvalidRate(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(CoverageConfig::default().validate().is_ok());
        let bad = CoverageConfig {
            radius_m: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = CoverageConfig {
            candidate_nodes: Some(vec![]),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
