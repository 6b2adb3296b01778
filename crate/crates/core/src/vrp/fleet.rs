//! Packing trips onto trucks against the working shift.

use serde::Serialize;

use super::{Trip, VrpError};

/// Above this many trips only first-fit-decreasing is used.
const EXACT_LIMIT: usize = 16;

/// Truck index -> trip indices (ascending) into the input slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FleetAssignment {
    pub trucks: Vec<Vec<usize>>,
}

impl FleetAssignment {
    pub fn fleet_size(&self) -> usize {
        self.trucks.iter().filter(|t| !t.is_empty()).count()
    }
}

/// First-fit-decreasing bin packing of `sizes` into bins of `capacity`.
/// Sizes are taken largest first (ties by index). `None` if any item alone
/// exceeds the capacity.
pub fn first_fit_decreasing(sizes: &[f64], capacity: f64) -> Option<Vec<Vec<usize>>> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].total_cmp(&sizes[a]).then(a.cmp(&b)));
    let mut bins: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in order {
        if sizes[i] > capacity {
            return None;
        }
        match bins.iter_mut().find(|(load, _)| *load + sizes[i] <= capacity) {
            Some((load, items)) => {
                *load += sizes[i];
                items.push(i);
            }
            None => bins.push((sizes[i], vec![i])),
        }
    }
    Some(bins.into_iter().map(|(_, items)| items).collect())
}

/// Depth-first search for a packing with fewer than `limit` bins.
struct Exact<'a> {
    sizes: &'a [f64],
    order: Vec<usize>,
    capacity: f64,
    lower: usize,
    best: Option<Vec<Vec<usize>>>,
    limit: usize,
}

impl Exact<'_> {
    fn search(&mut self, k: usize, bins: &mut Vec<(f64, Vec<usize>)>) {
        if self.limit <= self.lower {
            return;
        }
        if k == self.order.len() {
            self.limit = bins.len();
            self.best = Some(bins.iter().map(|(_, b)| b.clone()).collect());
            return;
        }
        let item = self.order[k];
        let size = self.sizes[item];
        let mut tried: Vec<f64> = Vec::new();
        for b in 0..bins.len() {
            let load = bins[b].0;
            // Bins with equal load are interchangeable.
            if load + size > self.capacity || tried.contains(&load) {
                continue;
            }
            tried.push(load);
            bins[b].0 += size;
            bins[b].1.push(item);
            self.search(k + 1, bins);
            bins[b].1.pop();
            bins[b].0 = load;
        }
        if bins.len() + 1 < self.limit {
            bins.push((size, vec![item]));
            self.search(k + 1, bins);
            bins.pop();
        }
    }
}

/// Assigns trips to the fewest trucks such that each truck's total time
/// fits in `shift_s`.
///
/// Starts from first-fit-decreasing on trip durations. When FFD uses more
/// trucks than the ceil(sum / shift) lower bound and there are at most 16
/// trips, an exhaustive search looks for a packing with fewer trucks.
pub fn size_fleet(trips: &[Trip], shift_s: f64) -> Result<FleetAssignment, VrpError> {
    let sizes: Vec<f64> = trips.iter().map(|t| t.total_time_s).collect();
    if let Some(&worst) = sizes.iter().find(|&&s| s > shift_s) {
        return Err(VrpError::ShiftTooShort { trip_s: worst, shift_s });
    }
    let mut trucks = first_fit_decreasing(&sizes, shift_s).expect("sizes checked against shift");
    let lower = (sizes.iter().sum::<f64>() / shift_s).ceil() as usize;
    if trucks.len() > lower && sizes.len() <= EXACT_LIMIT {
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by(|&a, &b| sizes[b].total_cmp(&sizes[a]).then(a.cmp(&b)));
        let mut exact = Exact {
            sizes: &sizes,
            order,
            capacity: shift_s,
            lower,
            best: None,
            limit: trucks.len(),
        };
        exact.search(0, &mut Vec::new());
        if let Some(better) = exact.best {
            trucks = better;
        }
    }
    for t in &mut trucks {
        t.sort_unstable();
    }
    Ok(FleetAssignment { trucks })
}
