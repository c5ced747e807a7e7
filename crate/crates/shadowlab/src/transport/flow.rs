//! Successive-shortest-path solver for balanced transport instances.
//!
//! Supplies and demands are integers (the caller scales real weights to a
//! fixed-point grid), costs are nonnegative f64 distances. Shortest
//! augmenting paths are found by Dijkstra over reduced costs with node
//! potentials, so every path search is nonnegative and the final flow is a
//! minimum-cost one. Integer capacities guarantee termination; a budget on
//! the number of augmentations guards against pathological instances.
//!
//! The partial flow after any number of augmentations is itself a minimum
//! cost flow of its value, and with nonnegative costs the optimal cost is
//! nondecreasing in the flow value; `cap` exploits this to abandon an
//! instance early once the partial cost alone exceeds the cap.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};

/// One positive arc of a solved instance: `amount` units from source `from`
/// to sink `to`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub amount: i64,
}

/// Heap key: smallest distance first; on ties sinks before sources (an
/// unfilled sink at the current minimum ends the search at once), then by
/// node index for determinism.
#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    kind: u8,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.kind.cmp(&other.kind))
            .then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Solve the transport instance with row-major `cost` (n×m), integer
/// `supply` (length n) and `demand` (length m). Totals must balance.
///
/// Returns `None` when `cap` is given and the optimal cost provably
/// exceeds it (the instance is then left unsolved).
pub(crate) fn solve(
    cost: &[f64],
    n: usize,
    m: usize,
    supply: &[i64],
    demand: &[i64],
    cap: Option<f64>,
) -> Result<Option<Vec<FlowArc>>> {
    assert_eq!(cost.len(), n * m);
    assert_eq!(supply.len(), n);
    assert_eq!(demand.len(), m);
    let total: i64 = supply.iter().sum();
    if total != demand.iter().sum::<i64>() {
        return Err(Error::InvalidInput(
            "transport supplies and demands must balance".into(),
        ));
    }
    if supply.iter().chain(demand.iter()).any(|&w| w < 0) {
        return Err(Error::InvalidInput(
            "transport weights must be nonnegative".into(),
        ));
    }

    let v = n + m;
    let mut potential = vec![0.0f64; v];
    let mut remaining_supply = supply.to_vec();
    let mut remaining_demand = demand.to_vec();
    // Per sink: map from source index to positive flow. Backward residual
    // arcs are exactly the entries of these maps.
    let mut flows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); m];
    let mut left = total;
    let mut partial_cost = 0.0f64;

    // Arcs with reduced cost below this are treated as tight; pushing on
    // them is a zero-length shortest-path augmentation, so the greedy phase
    // below preserves optimality (the slack only admits float dust, which
    // perturbs the total by less than the fixed-point grid already does).
    const TIGHT: f64 = 1e-13;

    let budget = 32 * (n + m) + 64;
    let mut augmentations = 0usize;
    while left > 0 {
        augmentations += 1;
        if augmentations > budget {
            return Err(Error::ResourceLimit(format!(
                "transport solver exceeded its augmentation budget ({budget})"
            )));
        }

        // Greedy phase: saturate tight arcs directly. One pass suffices —
        // pushes only consume capacity, and no arc becomes tight without a
        // potential update. This drains the zero-cost plateau that would
        // otherwise cost one Dijkstra scan per augmentation.
        for i in 0..n {
            if remaining_supply[i] == 0 {
                continue;
            }
            let row = i * m;
            for j in 0..m {
                if remaining_demand[j] == 0 {
                    continue;
                }
                if cost[row + j] + potential[i] - potential[n + j] <= TIGHT {
                    let amt = remaining_supply[i].min(remaining_demand[j]);
                    remaining_supply[i] -= amt;
                    remaining_demand[j] -= amt;
                    *flows[j].entry(i).or_insert(0) += amt;
                    left -= amt;
                    partial_cost += amt as f64 * cost[row + j];
                    if remaining_supply[i] == 0 {
                        break;
                    }
                }
            }
        }
        if let Some(cap) = cap {
            if partial_cost > cap {
                return Ok(None);
            }
        }
        if left == 0 {
            break;
        }

        // Dijkstra over reduced costs from the set of live sources.
        let mut dist = vec![f64::INFINITY; v];
        let mut done = vec![false; v];
        let mut parent = vec![usize::MAX; v];
        let mut heap = BinaryHeap::new();
        for i in 0..n {
            if remaining_supply[i] > 0 {
                dist[i] = 0.0;
                heap.push(Reverse(HeapEntry {
                    dist: 0.0,
                    kind: 1,
                    node: i,
                }));
            }
        }
        let mut target = None;
        while let Some(Reverse(entry)) = heap.pop() {
            let node = entry.node;
            if done[node] || entry.dist > dist[node] {
                continue;
            }
            done[node] = true;
            let d = dist[node];
            if node >= n {
                let j = node - n;
                if remaining_demand[j] > 0 {
                    target = Some(node);
                    break;
                }
                for &i in flows[j].keys() {
                    let rc = (potential[node] - potential[i] - cost[i * m + j]).max(0.0);
                    if d + rc < dist[i] {
                        dist[i] = d + rc;
                        parent[i] = node;
                        heap.push(Reverse(HeapEntry {
                            dist: dist[i],
                            kind: 1,
                            node: i,
                        }));
                    }
                }
            } else {
                let row = node * m;
                for j in 0..m {
                    let rc = (cost[row + j] + potential[node] - potential[n + j]).max(0.0);
                    if d + rc < dist[n + j] {
                        dist[n + j] = d + rc;
                        parent[n + j] = node;
                        heap.push(Reverse(HeapEntry {
                            dist: dist[n + j],
                            kind: 0,
                            node: n + j,
                        }));
                    }
                }
            }
        }
        let t = target.ok_or_else(|| Error::Convergence {
            residual: left as f64,
            context: "transport network ran out of reachable demand".into(),
        })?;

        let dt = dist[t];
        for x in 0..v {
            potential[x] += dist[x].min(dt);
        }

        // Walk the path back to its source, collecting arcs, the bottleneck
        // and the true (unreduced) per-unit path cost, then push flow.
        let mut path: Vec<(usize, usize, bool)> = Vec::new();
        let mut bottleneck = remaining_demand[t - n];
        let mut unit_cost = 0.0f64;
        let mut cursor = t;
        while parent[cursor] != usize::MAX {
            let prev = parent[cursor];
            if prev < n {
                unit_cost += cost[prev * m + (cursor - n)];
                path.push((prev, cursor - n, true));
            } else {
                let j = prev - n;
                bottleneck = bottleneck.min(flows[j][&cursor]);
                unit_cost -= cost[cursor * m + j];
                path.push((cursor, j, false));
            }
            cursor = prev;
        }
        bottleneck = bottleneck.min(remaining_supply[cursor]);
        debug_assert!(bottleneck > 0);
        remaining_supply[cursor] -= bottleneck;
        remaining_demand[t - n] -= bottleneck;
        for (i, j, forward) in path {
            if forward {
                *flows[j].entry(i).or_insert(0) += bottleneck;
            } else {
                let entry = flows[j].get_mut(&i).expect("backward arc has flow");
                *entry -= bottleneck;
                if *entry == 0 {
                    flows[j].remove(&i);
                }
            }
        }
        left -= bottleneck;
        partial_cost += bottleneck as f64 * unit_cost;
        if let Some(cap) = cap {
            if partial_cost > cap {
                return Ok(None);
            }
        }
    }

    let mut arcs = Vec::new();
    for (j, per_sink) in flows.iter().enumerate() {
        for (&i, &f) in per_sink {
            arcs.push(FlowArc {
                from: i,
                to: j,
                amount: f,
            });
        }
    }
    Ok(Some(arcs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total_cost(cost: &[f64], m: usize, arcs: &[FlowArc]) -> f64 {
        arcs.iter()
            .map(|a| a.amount as f64 * cost[a.from * m + a.to])
            .sum()
    }

    fn check_feasible(arcs: &[FlowArc], supply: &[i64], demand: &[i64]) {
        let mut out = vec![0i64; supply.len()];
        let mut into = vec![0i64; demand.len()];
        for a in arcs {
            assert!(a.amount > 0);
            out[a.from] += a.amount;
            into[a.to] += a.amount;
        }
        assert_eq!(out, supply);
        assert_eq!(into, demand);
    }

    #[test]
    fn single_pair() {
        let arcs = solve(&[0.3], 1, 1, &[7], &[7], None).unwrap().unwrap();
        check_feasible(&arcs, &[7], &[7]);
        assert!((total_cost(&[0.3], 1, &arcs) - 2.1).abs() < 1e-12);
    }

    #[test]
    fn prefers_cheap_arcs() {
        // Two sources, two sinks; the cross assignment is cheaper.
        let cost = vec![1.0, 0.1, 0.1, 1.0];
        let arcs = solve(&cost, 2, 2, &[5, 5], &[5, 5], None).unwrap().unwrap();
        check_feasible(&arcs, &[5, 5], &[5, 5]);
        assert!((total_cost(&cost, 2, &arcs) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn splits_mass_when_forced() {
        // One source must feed both sinks.
        let cost = vec![0.2, 0.5];
        let arcs = solve(&cost, 1, 2, &[10], &[4, 6], None).unwrap().unwrap();
        check_feasible(&arcs, &[10], &[4, 6]);
        assert!((total_cost(&cost, 2, &arcs) - (0.2 * 4.0 + 0.5 * 6.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_imbalance() {
        assert!(solve(&[0.1], 1, 1, &[3], &[4], None).is_err());
    }

    #[test]
    fn needs_backward_arcs() {
        // Classic instance where the greedy nearest assignment is beaten
        // only by rerouting earlier flow: source 0 is close to sink 0, but
        // source 1 can *only* afford sink 0, forcing 0's mass onward.
        let cost = vec![
            0.1, 0.2, //
            0.1, 0.9,
        ];
        let arcs = solve(&cost, 2, 2, &[1, 1], &[1, 1], None).unwrap().unwrap();
        check_feasible(&arcs, &[1, 1], &[1, 1]);
        let got = total_cost(&cost, 2, &arcs);
        assert!((got - 0.3).abs() < 1e-12, "cost {got}");
    }

    #[test]
    fn cap_abandons_expensive_instances() {
        // Optimal cost is 0.3; a cap below that must abandon, a cap above
        // must return the full solution.
        let cost = vec![
            0.1, 0.2, //
            0.1, 0.9,
        ];
        assert!(solve(&cost, 2, 2, &[1, 1], &[1, 1], Some(0.05))
            .unwrap()
            .is_none());
        let arcs = solve(&cost, 2, 2, &[1, 1], &[1, 1], Some(0.35))
            .unwrap()
            .unwrap();
        assert!((total_cost(&cost, 2, &arcs) - 0.3).abs() < 1e-12);
    }
}
