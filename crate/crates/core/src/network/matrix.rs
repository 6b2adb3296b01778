//! Many-to-many travel costs, one single-source search per origin.

use rayon::prelude::*;

use super::search::{Stop, Tree};
use super::{Metric, NetworkError, NodeId, RoadNetwork};

/// Dense origin x destination costs. Unreachable pairs hold
/// [`CostMatrix::UNREACHABLE`] and read back as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub origins: Vec<NodeId>,
    pub destinations: Vec<NodeId>,
    pub metric: Metric,
    cost: Vec<f64>,
}

impl CostMatrix {
    pub const UNREACHABLE: f64 = f64::INFINITY;

    /// Wraps row-major costs. Negative or NaN entries are rejected.
    pub fn from_rows(origins: Vec<NodeId>, destinations: Vec<NodeId>, metric: Metric, cost: Vec<f64>) -> Option<Self> {
        let ok = cost.len() == origins.len() * destinations.len() && cost.iter().all(|c| *c >= 0.0 && !c.is_nan());
        ok.then_some(CostMatrix {
            origins,
            destinations,
            metric,
            cost,
        })
    }

    pub fn rows(&self) -> usize {
        self.origins.len()
    }

    pub fn cols(&self) -> usize {
        self.destinations.len()
    }

    /// Cost from origin `i` to destination `j`, `None` if unreachable.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let c = self.raw(i, j);
        c.is_finite().then_some(c)
    }

    /// Raw entry; unreachable pairs are infinite.
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.destinations.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.destinations.len();
        &self.cost[i * w..(i + 1) * w]
    }
}

/// Time and distance along the paths that minimize `metric`, over one node
/// list used as both origins and destinations. Node ids may repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelMatrix {
    pub metric: Metric,
    pub time_s: CostMatrix,
    pub distance_m: CostMatrix,
}

impl TravelMatrix {
    pub fn new(metric: Metric, time_s: CostMatrix, distance_m: CostMatrix) -> Option<Self> {
        let square = |m: &CostMatrix| m.origins == m.destinations;
        let ok = square(&time_s)
            && time_s.origins == distance_m.origins
            && square(&distance_m)
            && time_s.metric == Metric::Time
            && distance_m.metric == Metric::Distance;
        ok.then_some(TravelMatrix {
            metric,
            time_s,
            distance_m,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.time_s.origins
    }

    pub fn len(&self) -> usize {
        self.time_s.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The matrix a route planner minimizes under `metric`.
    pub fn costs(&self, metric: Metric) -> &CostMatrix {
        match metric {
            Metric::Time => &self.time_s,
            Metric::Distance => &self.distance_m,
        }
    }
}

fn indices(net: &RoadNetwork, ids: &[NodeId]) -> Result<Vec<usize>, NetworkError> {
    ids.iter().map(|&id| net.index_of(id)).collect()
}

/// Costs between every origin/destination pair under `metric`.
///
/// Rows are computed independently (in parallel), so the result does not
/// depend on the worker count.
pub fn cost_matrix(
    net: &RoadNetwork,
    origins: &[NodeId],
    destinations: &[NodeId],
    metric: Metric,
) -> Result<CostMatrix, NetworkError> {
    let src = indices(net, origins)?;
    let dst = indices(net, destinations)?;
    let rows: Vec<Vec<f64>> = src
        .par_iter()
        .map(|&s| {
            let tree = Tree::grow(net, s, metric, Stop::Exhaust);
            dst.iter()
                .map(|&t| tree.cost(t).unwrap_or(CostMatrix::UNREACHABLE))
                .collect()
        })
        .collect();
    Ok(CostMatrix {
        origins: origins.to_vec(),
        destinations: destinations.to_vec(),
        metric,
        cost: rows.concat(),
    })
}

/// Square time/distance matrices over `nodes`, measured along the paths
/// that minimize `metric`.
pub fn travel_matrix(net: &RoadNetwork, nodes: &[NodeId], metric: Metric) -> Result<TravelMatrix, NetworkError> {
    let idx = indices(net, nodes)?;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = idx
        .par_iter()
        .map(|&s| {
            let tree = Tree::grow(net, s, metric, Stop::Exhaust);
            idx.iter()
                .map(|&t| match tree.path(t) {
                    Some(p) => (p.time_s, p.distance_m),
                    None => (CostMatrix::UNREACHABLE, CostMatrix::UNREACHABLE),
                })
                .unzip()
        })
        .collect();
    let (time, dist): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().unzip();
    let ids = nodes.to_vec();
    Ok(TravelMatrix {
        metric,
        time_s: CostMatrix {
            origins: ids.clone(),
            destinations: ids.clone(),
            metric: Metric::Time,
            cost: time.concat(),
        },
        distance_m: CostMatrix {
            origins: ids.clone(),
            destinations: ids,
            metric: Metric::Distance,
            cost: dist.concat(),
        },
    })
}
