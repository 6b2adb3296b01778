use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use super::{CoverageConfig, CoverageError, DemandPoint, Reach, StopPoint};
use crate::network::{NetworkError, NodeId, RoadNetwork};

#[derive(Debug)]
struct Draft {
    candidate: usize,
    /// Demand indices, kept sorted by demand id.
    members: Vec<usize>,
    overflow: bool,
}

fn load_of(members: &[usize], demands: &[DemandPoint]) -> f64 {
    members.iter().map(|&d| demands[d].waste_kg_day).sum()
}

fn insert_sorted(members: &mut Vec<usize>, d: usize, demands: &[DemandPoint]) {
    let pos = members.partition_point(|&m| demands[m].id < demands[d].id);
    members.insert(pos, d);
}

/// Places collection stops so every demand point is covered.
///
/// Candidates are opened greedily: each round opens the candidate node that
/// can claim the most uncovered demand mass without exceeding
/// `max_stop_load_kg` (ties: more points, then smaller node id). A candidate
/// claims its uncovered points nearest first. A node may host several
/// stops when its catchment holds more than one stop's load. Points that
/// alone exceed the cap get a dedicated stop at their nearest candidate and
/// are flagged as overflow.
///
/// A final pass, in demand id order, moves each point to a strictly nearer
/// open stop (ties to the smaller stop id) when that stop has room. Stops
/// left empty are dropped and ids are renumbered from 1 in opening order.
pub fn place_stops(
    net: &RoadNetwork,
    demands: &[DemandPoint],
    cfg: &CoverageConfig,
) -> Result<Vec<StopPoint>, CoverageError> {
    cfg.validate()?;
    let mut seen = HashSet::new();
    for d in demands {
        if !seen.insert(d.id) {
            return Err(CoverageError::DuplicateDemand(d.id));
        }
    }

    let candidates: Vec<NodeId> = match &cfg.candidate_nodes {
        Some(list) => {
            let set: BTreeSet<NodeId> = list.iter().copied().collect();
            if let Some(&missing) = set.iter().find(|id| !net.contains(**id)) {
                return Err(NetworkError::UnknownNode(missing).into());
            }
            set.into_iter().collect()
        }
        None => net.nodes().iter().map(|n| n.id).collect(),
    };

    let reach = Reach::new(net, demands, cfg);
    let catchments: Vec<Vec<(usize, f64)>> = candidates
        .par_iter()
        .map(|&c| reach.within(c))
        .collect::<Result<_, _>>()?;
    let distance: Vec<HashMap<usize, f64>> = catchments.iter().map(|c| c.iter().copied().collect()).collect();

    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); demands.len()];
    for (c, catchment) in catchments.iter().enumerate() {
        for &(d, _) in catchment {
            covering[d].push(c);
        }
    }
    let mut uncoverable: Vec<u64> = covering
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_empty())
        .map(|(d, _)| demands[d].id)
        .collect();
    if !uncoverable.is_empty() {
        uncoverable.sort_unstable();
        return Err(CoverageError::UncoverableDemand(uncoverable));
    }

    let cap = cfg.max_stop_load_kg;
    let mut owner: Vec<Option<usize>> = vec![None; demands.len()];
    let mut drafts: Vec<Draft> = Vec::new();

    let mut by_id: Vec<usize> = (0..demands.len()).collect();
    by_id.sort_by_key(|&d| demands[d].id);

    for &d in &by_id {
        if demands[d].waste_kg_day <= cap {
            continue;
        }
        let candidate = *covering[d]
            .iter()
            .min_by(|&&a, &&b| distance[a][&d].total_cmp(&distance[b][&d]).then(a.cmp(&b)))
            .expect("coverable");
        log::warn!(
            "demand point {} alone carries {:.2} kg, above the {} kg stop cap; giving it a dedicated stop",
            demands[d].id,
            demands[d].waste_kg_day,
            cap
        );
        owner[d] = Some(drafts.len());
        drafts.push(Draft {
            candidate,
            members: vec![d],
            overflow: true,
        });
    }

    loop {
        let mut best: Option<(f64, usize, usize, Vec<usize>)> = None;
        for (c, catchment) in catchments.iter().enumerate() {
            let mut load = 0.0;
            let mut claim = Vec::new();
            for &(d, _) in catchment {
                if owner[d].is_none() && load + demands[d].waste_kg_day <= cap {
                    load += demands[d].waste_kg_day;
                    claim.push(d);
                }
            }
            if claim.is_empty() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bl, bn, _, _)) => load > *bl || (load == *bl && claim.len() > *bn),
            };
            if better {
                best = Some((load, claim.len(), c, claim));
            }
        }
        let Some((_, _, candidate, mut claim)) = best else {
            break;
        };
        for &d in &claim {
            owner[d] = Some(drafts.len());
        }
        claim.sort_by_key(|&d| demands[d].id);
        drafts.push(Draft {
            candidate,
            members: claim,
            overflow: false,
        });
    }
    debug_assert!(owner.iter().all(Option::is_some));

    for &d in &by_id {
        let current = owner[d].expect("all demands are owned");
        if drafts[current].overflow {
            continue;
        }
        let here = (distance[drafts[current].candidate][&d], current);
        let w = demands[d].waste_kg_day;
        let target = drafts
            .iter()
            .enumerate()
            .filter(|(s, stop)| *s != current && !stop.overflow)
            .filter_map(|(s, stop)| distance[stop.candidate].get(&d).map(|&dist| (dist, s)))
            .filter(|&key| key.0 < here.0 || (key.0 == here.0 && key.1 < here.1))
            .filter(|&(_, s)| load_of(&drafts[s].members, demands) + w <= cap)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some((_, s)) = target {
            drafts[current].members.retain(|&m| m != d);
            insert_sorted(&mut drafts[s].members, d, demands);
            owner[d] = Some(s);
        }
    }

    Ok(drafts
        .into_iter()
        .filter(|d| !d.members.is_empty())
        .enumerate()
        .map(|(i, d)| StopPoint {
            id: i as u64 + 1,
            node: candidates[d.candidate],
            assigned_demand_kg: load_of(&d.members, demands),
            service_time_s: cfg.service_time_s,
            covered_demand_ids: d.members.iter().map(|&m| demands[m].id).collect(),
            overflow: d.overflow,
        })
        .collect())
}
