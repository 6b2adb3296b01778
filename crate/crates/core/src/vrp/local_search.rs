//! 2-opt inside trips and Or-opt relocation of 1-2 consecutive stops
//! within or across trips. First improvement, scanned in a fixed order.
//! A relocation that empties its trip is also taken when the cost does not
//! rise, so ties resolve toward fewer trips.

use super::Instance;

/// Relative margin a move must beat to count as an improvement.
const EPS: f64 = 1e-9;

fn improves(new: f64, old: f64) -> bool {
    new < old - EPS * old.abs().max(1.0)
}

fn not_worse(new: f64, old: f64) -> bool {
    new <= old + EPS * old.abs().max(1.0)
}

/// Matrix index of the node before position `p` of `route` (depot at the ends).
fn before(route: &[usize], p: usize) -> usize {
    if p == 0 {
        0
    } else {
        route[p - 1] + 1
    }
}

fn after(route: &[usize], p: usize) -> usize {
    route.get(p).map_or(0, |&k| k + 1)
}

struct State<'a, 'b> {
    inst: &'a Instance<'b>,
    routes: Vec<Vec<usize>>,
    cost: Vec<f64>,
    time: Vec<f64>,
    load: Vec<f64>,
}

impl<'a, 'b> State<'a, 'b> {
    fn refresh(&mut self, r: usize) {
        let route = &self.routes[r];
        if route.is_empty() {
            self.cost[r] = 0.0;
            self.time[r] = 0.0;
            self.load[r] = 0.0;
        } else {
            self.cost[r] = self.inst.route_cost(route);
            self.time[r] = self.inst.route_time_s(route);
            self.load[r] = self.inst.route_load(route);
        }
    }

    fn two_opt(&mut self) -> bool {
        let shift = self.inst.fleet.shift_s;
        for r in 0..self.routes.len() {
            let len = self.routes[r].len();
            for i in 0..len.saturating_sub(1) {
                for j in i + 1..len {
                    let mut cand = self.routes[r].clone();
                    cand[i..=j].reverse();
                    let c = self.inst.route_cost(&cand);
                    if improves(c, self.cost[r]) && self.inst.route_time_s(&cand) <= shift {
                        self.routes[r] = cand;
                        self.refresh(r);
                        return true;
                    }
                }
            }
        }
        false
    }

    fn or_opt(&mut self) -> bool {
        let inst = self.inst;
        let (cap, shift) = (inst.fleet.capacity_kg, inst.fleet.shift_s);
        for seg_len in 1..=2 {
            for r in 0..self.routes.len() {
                let len = self.routes[r].len();
                if len < seg_len {
                    continue;
                }
                for i in 0..=len - seg_len {
                    let route = &self.routes[r];
                    let seg = &route[i..i + seg_len];
                    let (first, last) = (seg[0] + 1, seg[seg_len - 1] + 1);
                    let (a, b) = (before(route, i), after(route, i + seg_len));
                    let seg_load: f64 = seg.iter().map(|&k| inst.demand(k)).sum();
                    let seg_service: f64 = seg.iter().map(|&k| inst.service_s(k)).sum();
                    let rest: Vec<usize> = route[..i].iter().chain(&route[i + seg_len..]).copied().collect();
                    let (rm_cost, rm_time) = if rest.is_empty() {
                        (-self.cost[r], -self.time[r])
                    } else {
                        (
                            inst.c(a, b) - inst.c(a, first) - inst.c(last, b),
                            inst.t(a, b) - inst.t(a, first) - inst.t(last, b),
                        )
                    };
                    for t in 0..self.routes.len() {
                        let same = t == r;
                        if !same && self.load[t] + seg_load > cap {
                            continue;
                        }
                        let host: &[usize] = if same { &rest } else { &self.routes[t] };
                        if same && host.is_empty() {
                            continue;
                        }
                        for p in 0..=host.len() {
                            if same && p == i {
                                continue;
                            }
                            let (x, y) = (before(host, p), after(host, p));
                            let ins_cost = inst.c(x, first) + inst.c(last, y) - inst.c(x, y);
                            let delta = rm_cost + ins_cost;
                            let old = if same {
                                self.cost[r]
                            } else {
                                self.cost[r] + self.cost[t]
                            };
                            let empties = !same && rest.is_empty();
                            let accept = |new: f64| improves(new, old) || (empties && not_worse(new, old));
                            if !delta.is_finite() || !accept(old + delta) {
                                continue;
                            }
                            let ins_time = inst.t(x, first) + inst.t(last, y) - inst.t(x, y);
                            let new_time = if same {
                                self.time[r] + rm_time + ins_time
                            } else {
                                self.time[t] + ins_time + seg_service
                            };
                            if new_time > shift {
                                continue;
                            }
                            let mut host_new = host.to_vec();
                            for (o, &k) in seg.iter().enumerate() {
                                host_new.insert(p + o, k);
                            }
                            let new_cost_host = inst.route_cost(&host_new);
                            let new_total = if same {
                                new_cost_host
                            } else {
                                new_cost_host + if rest.is_empty() { 0.0 } else { inst.route_cost(&rest) }
                            };
                            if !accept(new_total) || inst.route_time_s(&host_new) > shift {
                                continue;
                            }
                            if same {
                                self.routes[r] = host_new;
                            } else {
                                self.routes[t] = host_new;
                                self.routes[r] = rest;
                                self.refresh(t);
                            }
                            self.refresh(r);
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Runs 2-opt and Or-opt to a local optimum or until `budget` moves have
/// been applied. The objective never increases; feasibility is preserved.
pub(crate) fn improve_routes(inst: &Instance, routes: Vec<Vec<usize>>, budget: usize) -> Vec<Vec<usize>> {
    let n = routes.len();
    let mut st = State {
        inst,
        routes,
        cost: vec![0.0; n],
        time: vec![0.0; n],
        load: vec![0.0; n],
    };
    for r in 0..n {
        st.refresh(r);
    }
    let mut moves = 0;
    while moves < budget && (st.two_opt() || st.or_opt()) {
        moves += 1;
        if st.routes.iter().any(Vec::is_empty) {
            let keep: Vec<usize> = (0..st.routes.len()).filter(|&r| !st.routes[r].is_empty()).collect();
            st.routes = keep.iter().map(|&r| std::mem::take(&mut st.routes[r])).collect();
            st.cost = keep.iter().map(|&r| st.cost[r]).collect();
            st.time = keep.iter().map(|&r| st.time[r]).collect();
            st.load = keep.iter().map(|&r| st.load[r]).collect();
        }
    }
    st.routes
}
