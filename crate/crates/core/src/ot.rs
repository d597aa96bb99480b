//! Exact discrete optimal transport on the line with ground cost `|x - y|^s`.
//!
//! [`exact_ws`] runs the transportation simplex (the network simplex on the
//! complete bipartite graph). The basis is a spanning tree of the `m + n`
//! source/target nodes, started from the northwest corner rule. Supplies are
//! perturbed by `eps` each and the last demand by `m * eps`, which makes every
//! basis nondegenerate, so the objective drops strictly on every pivot.
//! Entering cells are priced by block search (Bland's rule takes over after a
//! pivot that rounding made degenerate) and ties in the ratio test go to the
//! lowest cell index. After the optimal basis is
//! found its flows are recomputed from the unperturbed marginals.
//!
//! [`w1_cdf`] is the closed form `∫ |F_mu - F_nu|` for `s = 1`.

use crate::error::{check_exponent, Error, Result};
use crate::measures::DiscreteMeasure;

/// Marginal mismatch tolerated before reporting [`Error::UnbalancedMarginals`].
pub const BALANCE_TOL: f64 = 1e-9;

const PERTURBATION: f64 = 1e-12;
const REDUCED_COST_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(source index, target index, mass)` for every cell carrying mass.
    pub entries: Vec<(usize, usize, f64)>,
    pub total_cost: f64,
}

impl TransportPlan {
    pub fn row_sums(&self, sources: usize) -> Vec<f64> {
        let mut sums = vec![0.0; sources];
        for &(i, _, mass) in &self.entries {
            sums[i] += mass;
        }
        sums
    }

    pub fn column_sums(&self, targets: usize) -> Vec<f64> {
        let mut sums = vec![0.0; targets];
        for &(_, j, mass) in &self.entries {
            sums[j] += mass;
        }
        sums
    }
}

/// Minimal `sum gamma_ij |x_i - y_j|^s` over couplings of `mu` and `nu`.
pub fn exact_ws(mu: &DiscreteMeasure, nu: &DiscreteMeasure, s: f64) -> Result<(f64, TransportPlan)> {
    exact_ws_weighted(mu.positions(), mu.weights(), nu.positions(), nu.weights(), s)
}

/// [`exact_ws`] on raw position/weight slices.
pub fn exact_ws_weighted(
    x: &[f64],
    a: &[f64],
    y: &[f64],
    b: &[f64],
    s: f64,
) -> Result<(f64, TransportPlan)> {
    check_exponent(s)?;
    if x.len() != a.len() || y.len() != b.len() {
        return Err(Error::InvalidMeasure("positions and weights differ in length".into()));
    }
    if a.iter().chain(b).any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidMeasure("weights must be finite and nonnegative".into()));
    }
    check_balance(a, b)?;

    let sources: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    let targets: Vec<usize> = (0..b.len()).filter(|&j| b[j] > 0.0).collect();
    if sources.is_empty() || targets.is_empty() {
        return Err(Error::InvalidMeasure("a measure has no positive atom".into()));
    }

    let cost = |xi: f64, yj: f64| {
        let d = (xi - yj).abs();
        if s == 1.0 {
            d
        } else {
            d.powf(s)
        }
    };
    let problem = Transportation {
        supply: sources.iter().map(|&i| a[i]).collect(),
        demand: targets.iter().map(|&j| b[j]).collect(),
        cost: sources
            .iter()
            .flat_map(|&i| targets.iter().map(move |&j| (i, j)))
            .map(|(i, j)| cost(x[i], y[j]))
            .collect(),
    };
    let flows = problem.solve();

    let mut total_cost = 0.0;
    let entries = flows
        .into_iter()
        .filter(|&(_, _, mass)| mass > 0.0)
        .map(|(r, c, mass)| {
            total_cost += mass * problem.cost[r * problem.demand.len() + c];
            (sources[r], targets[c], mass)
        })
        .collect();
    Ok((total_cost, TransportPlan { entries, total_cost }))
}

fn check_balance(a: &[f64], b: &[f64]) -> Result<()> {
    let source_mass: f64 = a.iter().sum();
    let target_mass: f64 = b.iter().sum();
    if (source_mass - target_mass).abs() > BALANCE_TOL || source_mass <= 0.0 {
        return Err(Error::UnbalancedMarginals {
            source_mass,
            target_mass,
        });
    }
    Ok(())
}

/// `∫ |F_mu(t) - F_nu(t)| dt`, the exact 1-Wasserstein distance on the line.
pub fn w1_cdf(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    check_balance(mu.weights(), nu.weights())?;
    let (xs, ws) = (mu.positions(), mu.weights());
    let (ys, vs) = (nu.positions(), nu.weights());
    let (mut i, mut j) = (0, 0);
    let mut gap = 0.0f64; // F_mu - F_nu just right of the current point
    let mut area = 0.0;
    let mut current = xs[0].min(ys[0]);
    while i < xs.len() || j < ys.len() {
        let next = match (xs.get(i), ys.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        area += gap.abs() * (next - current);
        current = next;
        while i < xs.len() && xs[i] == next {
            gap += ws[i];
            i += 1;
        }
        while j < ys.len() && ys[j] == next {
            gap -= vs[j];
            j += 1;
        }
    }
    Ok(area)
}

struct Transportation {
    supply: Vec<f64>,
    demand: Vec<f64>,
    /// Row-major `supply.len() x demand.len()`.
    cost: Vec<f64>,
}

/// Spanning-tree basis over nodes `0..m` (rows) and `m..m+n` (columns).
struct Basis {
    m: usize,
    n: usize,
    /// Basic cells `(row, col)` and their flows; slots are reused on pivots.
    cells: Vec<(usize, usize)>,
    flow: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
}

impl Basis {
    fn add(&mut self, slot: usize, row: usize, col: usize, flow: f64) {
        self.cells[slot] = (row, col);
        self.flow[slot] = flow;
        self.adjacency[row].push(slot);
        self.adjacency[self.m + col].push(slot);
    }

    fn remove(&mut self, slot: usize) {
        let (row, col) = self.cells[slot];
        self.adjacency[row].retain(|&s| s != slot);
        let m = self.m;
        self.adjacency[m + col].retain(|&s| s != slot);
    }

    fn other_end(&self, slot: usize, node: usize) -> usize {
        let (row, col) = self.cells[slot];
        if node == row {
            self.m + col
        } else {
            row
        }
    }

    /// Row potentials `u` and column potentials `v` with `u_i + v_j = c_ij` on
    /// basic cells and `u_0 = 0`.
    fn potentials(&self, cost: &[f64], u: &mut [f64], v: &mut [f64], order: &mut Vec<usize>) {
        let nodes = self.m + self.n;
        let mut seen = vec![false; nodes];
        order.clear();
        order.push(0);
        seen[0] = true;
        u[0] = 0.0;
        let mut head = 0;
        while head < order.len() {
            let node = order[head];
            head += 1;
            for &slot in &self.adjacency[node] {
                let next = self.other_end(slot, node);
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                let (row, col) = self.cells[slot];
                let c = cost[row * self.n + col];
                if next >= self.m {
                    v[col] = c - u[row];
                } else {
                    u[row] = c - v[col];
                }
                order.push(next);
            }
        }
        debug_assert_eq!(order.len(), nodes, "basis must span every node");
    }

    /// Basic slots on the tree path from `from` to `to`, in order.
    fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let nodes = self.m + self.n;
        let mut via = vec![usize::MAX; nodes];
        let mut seen = vec![false; nodes];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(node) = stack.pop() {
            if node == to {
                break;
            }
            for &slot in &self.adjacency[node] {
                let next = self.other_end(slot, node);
                if !seen[next] {
                    seen[next] = true;
                    via[next] = slot;
                    stack.push(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = to;
        while node != from {
            let slot = via[node];
            path.push(slot);
            node = self.other_end(slot, node);
        }
        path.reverse();
        path
    }
}

impl Transportation {
    /// Returns `(row, col, flow)` for the optimal basic cells.
    fn solve(&self) -> Vec<(usize, usize, f64)> {
        let m = self.supply.len();
        let n = self.demand.len();
        let mut supply: Vec<f64> = self.supply.iter().map(|s| s + PERTURBATION).collect();
        let mut demand = self.demand.clone();
        demand[n - 1] += m as f64 * PERTURBATION;

        let size = m + n - 1;
        let mut basis = Basis {
            m,
            n,
            cells: vec![(0, 0); size],
            flow: vec![0.0; size],
            adjacency: vec![Vec::new(); m + n],
        };

        // northwest corner
        let (mut i, mut j) = (0, 0);
        for slot in 0..size {
            let q = supply[i].min(demand[j]);
            basis.add(slot, i, j, q);
            supply[i] -= q;
            demand[j] -= q;
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || supply[i] < demand[j] {
                i += 1;
            } else {
                j += 1;
            }
        }

        let mut u = vec![0.0; m];
        let mut v = vec![0.0; n];
        let mut order = Vec::with_capacity(m + n);
        let mut bland = false;
        let mut cursor = 0;
        let block = ((m * n) as f64).sqrt().ceil().max(16.0) as usize;
        loop {
            basis.potentials(&self.cost, &mut u, &mut v, &mut order);

            let entering = if bland {
                self.first_improving(&u, &v)
            } else {
                self.block_search(&u, &v, &mut cursor, block)
            };
            let Some((row, col)) = entering else {
                break;
            };

            // Cycle: entering cell (+), then alternating signs walking the tree
            // path back from the entering column to the entering row.
            let path = basis.path(m + col, row);
            let mut leaving = usize::MAX;
            let mut theta = f64::INFINITY;
            for &slot in path.iter().step_by(2) {
                let f = basis.flow[slot];
                let key = |s: usize| basis.cells[s].0 * n + basis.cells[s].1;
                if f < theta || (f == theta && key(slot) < key(leaving)) {
                    theta = f;
                    leaving = slot;
                }
            }
            for (t, &slot) in path.iter().enumerate() {
                if t % 2 == 0 {
                    basis.flow[slot] -= theta;
                } else {
                    basis.flow[slot] += theta;
                }
            }
            basis.remove(leaving);
            basis.add(leaving, row, col, theta);
            // rounding can still produce a zero step; Bland's rule then
            // guarantees the degenerate run ends
            bland = theta <= 0.0;
        }

        self.unperturbed_flows(&basis)
    }

    /// Block-search pricing: scans cells cyclically from `cursor` in blocks of
    /// `block` and takes the most negative reduced cost of the first block
    /// that has one. Returns `None` only after a full pass finds nothing.
    fn block_search(
        &self,
        u: &[f64],
        v: &[f64],
        cursor: &mut usize,
        block: usize,
    ) -> Option<(usize, usize)> {
        let n = v.len();
        let total = self.cost.len();
        let mut best = -REDUCED_COST_TOL;
        let mut found = None;
        let (mut row, mut col) = (*cursor / n, *cursor % n);
        for scanned in 1..=total {
            let reduced = self.cost[row * n + col] - u[row] - v[col];
            if reduced < best {
                best = reduced;
                found = Some((row, col));
            }
            col += 1;
            if col == n {
                col = 0;
                row += 1;
                if row == u.len() {
                    row = 0;
                }
            }
            if found.is_some() && (scanned % block == 0 || scanned == total) {
                break;
            }
        }
        *cursor = row * n + col;
        found
    }

    /// Bland pricing: the lowest-index cell with negative reduced cost.
    fn first_improving(&self, u: &[f64], v: &[f64]) -> Option<(usize, usize)> {
        let n = v.len();
        u.iter().enumerate().find_map(|(row, &ur)| {
            self.cost[row * n..(row + 1) * n]
                .iter()
                .zip(v)
                .position(|(c, vc)| c - ur - vc < -REDUCED_COST_TOL)
                .map(|col| (row, col))
        })
    }

    /// Solves the basic flows for the original marginals by peeling leaves.
    fn unperturbed_flows(&self, basis: &Basis) -> Vec<(usize, usize, f64)> {
        let m = self.supply.len();
        let nodes = m + self.demand.len();
        let mut residual: Vec<f64> = self.supply.iter().chain(&self.demand).copied().collect();
        let mut degree: Vec<usize> = basis.adjacency.iter().map(Vec::len).collect();
        let mut done = vec![false; basis.cells.len()];
        let mut flows = vec![0.0; basis.cells.len()];
        let mut leaves: Vec<usize> = (0..nodes).filter(|&k| degree[k] == 1).collect();
        while let Some(node) = leaves.pop() {
            let Some(&slot) = basis.adjacency[node].iter().find(|&&s| !done[s]) else {
                continue;
            };
            done[slot] = true;
            let other = basis.other_end(slot, node);
            let f = residual[node].max(0.0);
            flows[slot] = f;
            residual[node] -= f;
            residual[other] -= f;
            degree[node] -= 1;
            degree[other] -= 1;
            if degree[other] == 1 {
                leaves.push(other);
            }
        }
        basis
            .cells
            .iter()
            .zip(flows)
            .map(|(&(r, c), f)| (r, c, f))
            .collect()
    }
}
