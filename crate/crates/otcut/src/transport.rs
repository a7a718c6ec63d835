//! Exact discrete optimal transport over size constraints.
//!
//! Solves `min ⟨M, X⟩` over the transportation polytope `Π(π^s, π^t)` with a
//! network simplex specialized to the dense bipartite transportation
//! structure. Solutions are basic feasible points, i.e. vertices of the
//! polytope with at most `n + k − 1` strictly positive entries, which is what
//! lets downstream code read transport plans as relaxed partition matrices.
//!
//! Implementation notes:
//! - pivot rule: block search over cells in row-major order, block size
//!   `⌈√(nk)⌉`, most negative reduced cost within the block, with a full
//!   first-negative scan as a fallback; deterministic given input order;
//! - degeneracy: row supplies are perturbed by `i·ε₀` with
//!   `ε₀ = 1e-13 · (smallest positive marginal)` and the total absorbed into
//!   the last column demand; the perturbation only steers pivoting — final
//!   flows are re-solved exactly on the optimal basis with the original
//!   marginals;
//! - initial basis: northwest-corner rule.

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("marginals do not balance: |Σ source − Σ target| = {imbalance:.3e} exceeds 1e-9")]
    InfeasibleMarginals { imbalance: f64 },
    #[error("network simplex exceeded {max_pivots} pivots without reaching optimality")]
    NumericalFailure { max_pivots: usize },
    #[error("marginal entry {value} at index {index} is negative or not finite")]
    InvalidMarginal { index: usize, value: f64 },
    #[error("marginal vector is empty")]
    EmptyMarginal,
    #[error("marginal sums to {sum}, expected 1 within 1e-9")]
    UnnormalizedMarginal { sum: f64 },
    #[error("partition label {label} out of range for {k} clusters")]
    LabelOutOfRange { label: usize, k: usize },
}

/// Source and target probability vectors defining a transportation polytope.
#[derive(Debug, Clone)]
pub struct SizeConstraints {
    source: Vec<f64>,
    target: Vec<f64>,
}

impl SizeConstraints {
    /// Validates and stores the marginals. Each vector must be nonnegative
    /// and sum to 1 within 1e-9; both are renormalized by their exact sums.
    pub fn new(source: Vec<f64>, target: Vec<f64>) -> Result<Self, TransportError> {
        let mut c = SizeConstraints { source, target };
        for v in [&mut c.source, &mut c.target] {
            if v.is_empty() {
                return Err(TransportError::EmptyMarginal);
            }
            for (index, &value) in v.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(TransportError::InvalidMarginal { index, value });
                }
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(TransportError::UnnormalizedMarginal { sum });
            }
            v.iter_mut().for_each(|x| *x /= sum);
        }
        Ok(c)
    }

    /// Uniform rows and columns: `π^s = 𝟙/n`, `π^t = 𝟙/k`.
    pub fn uniform(n: usize, k: usize) -> Self {
        SizeConstraints {
            source: crate::graph::uniform_distribution(n),
            target: crate::graph::uniform_distribution(k),
        }
    }

    pub fn source(&self) -> &[f64] {
        &self.source
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn n(&self) -> usize {
        self.source.len()
    }

    pub fn k(&self) -> usize {
        self.target.len()
    }
}

/// An optimal transport plan: a vertex of the transportation polytope.
///
/// Entries are sorted row-major and strictly positive; there are at most
/// `n + k − 1` of them. The dual potentials certify optimality:
/// `cost[i][j] − u_i − v_j ≥ 0` for every cell, with equality on the basis.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    n: usize,
    k: usize,
    entries: Vec<(usize, usize, f64)>,
    objective: f64,
    row_potentials: Vec<f64>,
    col_potentials: Vec<f64>,
}

impl TransportPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Strictly positive entries `(row, col, mass)`, sorted row-major.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    /// Dual potentials `(u, v)` from the final simplex basis.
    pub fn potentials(&self) -> (&[f64], &[f64]) {
        (&self.row_potentials, &self.col_potentials)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut x = Array2::zeros((self.n, self.k));
        for &(i, j, m) in &self.entries {
            x[[i, j]] = m;
        }
        x
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        for &(i, _, m) in &self.entries {
            s[i] += m;
        }
        s
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.k];
        for &(_, j, m) in &self.entries {
            s[j] += m;
        }
        s
    }

    /// Smallest reduced cost over all cells under the stored potentials.
    /// Optimality requires this to be ≥ −tolerance; used as a post-solve
    /// audit of complementary slackness.
    pub fn min_reduced_cost(&self, cost: ArrayView2<f64>) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.n {
            for j in 0..self.k {
                let r = cost[[i, j]] - self.row_potentials[i] - self.col_potentials[j];
                if r < min {
                    min = r;
                }
            }
        }
        min
    }

    /// Per-row argmax with lowest-index tie breaking.
    pub fn argmax_rows(&self) -> Vec<usize> {
        // absent cells hold zero mass, so column 0 wins all-zero rows
        let mut best = vec![(0.0f64, 0usize); self.n];
        for &(i, j, m) in &self.entries {
            let (bm, bj) = best[i];
            if m > bm || (m == bm && j < bj) {
                best[i] = (m, j);
            }
        }
        best.into_iter().map(|(_, j)| j).collect()
    }
}

/// Solves the transportation problem `min ⟨cost, X⟩` over `Π(π^s, π^t)`
/// exactly, returning an optimal vertex.
pub fn solve_emd(cost: ArrayView2<f64>, c: &SizeConstraints) -> Result<TransportPlan, TransportError> {
    let n = c.n();
    let k = c.k();
    assert_eq!(cost.nrows(), n, "cost rows must match source marginal");
    assert_eq!(cost.ncols(), k, "cost columns must match target marginal");
    assert!(
        cost.iter().all(|v| v.is_finite()),
        "cost matrix must be finite"
    );

    let s_sum: f64 = c.source().iter().sum();
    let t_sum: f64 = c.target().iter().sum();
    let imbalance = (s_sum - t_sum).abs();
    if imbalance > 1e-9 {
        return Err(TransportError::InfeasibleMarginals { imbalance });
    }

    // rebalance: scale the target so both sides sum to the same value, then
    // absorb the residual into the last column
    let supply = c.source().to_vec();
    let scale = s_sum / t_sum;
    let mut demand: Vec<f64> = c.target().iter().map(|d| d * scale).collect();
    let head: f64 = demand[..k - 1].iter().sum();
    demand[k - 1] = (s_sum - head).max(0.0);

    let mut simplex = Simplex::new(n, k, cost, &supply, &demand);
    simplex.run()?;
    Ok(simplex.extract(&supply, &demand))
}

/// Projects a hard partition onto the polytope: solves `solve_emd` with the
/// negated indicator of `init` as cost, which returns the feasible vertex
/// with the most mass on the initial assignment.
pub fn solve_emd_from_partition(
    init: &[usize],
    c: &SizeConstraints,
) -> Result<TransportPlan, TransportError> {
    let n = c.n();
    let k = c.k();
    assert_eq!(init.len(), n, "assignment length must match source marginal");
    for &label in init {
        if label >= k {
            return Err(TransportError::LabelOutOfRange { label, k });
        }
    }
    let mut cost = Array2::zeros((n, k));
    for (i, &label) in init.iter().enumerate() {
        cost[[i, label]] = -1.0;
    }
    solve_emd(cost.view(), c)
}

const ROOT: usize = usize::MAX;

/// Network simplex state over the complete bipartite transportation graph.
/// Node ids: sources `0..n`, sinks `n..n+k`; the spanning-tree basis is held
/// in parent arrays with per-child arc flow.
struct Simplex<'a> {
    n: usize,
    k: usize,
    num_nodes: usize,
    cost: ArrayView2<'a, f64>,
    parent: Vec<usize>,
    parent_cell: Vec<usize>, // cell index i*k + j of the arc to the parent
    arc_flow: Vec<f64>,      // flow on the arc to the parent, keyed by child
    pot: Vec<f64>,
    depth: Vec<u32>,
    visited: Vec<u32>,
    stamp: u32,
    next_cell: usize,
    block_size: usize,
    eps: f64,
    // scratch buffers reused across pivots
    path_a: Vec<usize>,
    path_b: Vec<usize>,
    chain: Vec<usize>,
}

impl<'a> Simplex<'a> {
    fn new(n: usize, k: usize, cost: ArrayView2<'a, f64>, supply: &[f64], demand: &[f64]) -> Self {
        // degeneracy guard: strictly increasing supply perturbations, the
        // total absorbed by the last demand
        let min_pos = supply
            .iter()
            .chain(demand.iter())
            .copied()
            .filter(|&x| x > 0.0)
            .fold(f64::INFINITY, f64::min);
        let eps0 = if min_pos.is_finite() {
            1e-13 * min_pos
        } else {
            0.0
        };
        let mut supply_p = supply.to_vec();
        let mut total_perturb = 0.0;
        for (i, s) in supply_p.iter_mut().enumerate() {
            *s += i as f64 * eps0;
            total_perturb += i as f64 * eps0;
        }
        let mut demand_p = demand.to_vec();
        demand_p[k - 1] += total_perturb;

        let num_nodes = n + k;
        let mut simplex = Simplex {
            n,
            k,
            num_nodes,
            cost,
            parent: vec![ROOT; num_nodes],
            parent_cell: vec![usize::MAX; num_nodes],
            arc_flow: vec![0.0; num_nodes],
            pot: vec![0.0; num_nodes],
            depth: vec![0; num_nodes],
            visited: vec![0; num_nodes],
            stamp: 0,
            next_cell: 0,
            block_size: ((n * k) as f64).sqrt().ceil() as usize,
            eps: 0.0,
            path_a: Vec::new(),
            path_b: Vec::new(),
            chain: Vec::new(),
        };
        let cmax = cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        simplex.eps = 1e-12 * (1.0 + cmax);
        simplex.init_northwest(&supply_p, &demand_p);
        simplex
    }

    /// Northwest-corner starting basis: exactly n + k − 1 staircase cells.
    fn init_northwest(&mut self, supply: &[f64], demand: &[f64]) {
        let (n, k) = (self.n, self.k);
        let mut cells = Vec::with_capacity(n + k - 1);
        let (mut i, mut j) = (0usize, 0usize);
        let mut rs = supply[0];
        let mut rd = demand[0];
        loop {
            let x = rs.min(rd);
            cells.push((i, j, x));
            if i == n - 1 && j == k - 1 {
                break;
            }
            if (rs <= rd && i < n - 1) || j == k - 1 {
                rd -= x;
                i += 1;
                rs = supply[i];
            } else {
                rs -= x;
                j += 1;
                rd = demand[j];
            }
        }
        debug_assert_eq!(cells.len(), n + k - 1);

        // the staircase forms a path; build parent pointers by BFS from node 0
        let mut adj: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); self.num_nodes];
        for &(ci, cj, flow) in &cells {
            let cell = ci * k + cj;
            adj[ci].push((n + cj, cell, flow));
            adj[n + cj].push((ci, cell, flow));
        }
        let mut queue = std::collections::VecDeque::new();
        let mut seen = vec![false; self.num_nodes];
        queue.push_back(0usize);
        seen[0] = true;
        self.parent[0] = ROOT;
        while let Some(u) = queue.pop_front() {
            for &(v, cell, flow) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    self.parent[v] = u;
                    self.parent_cell[v] = cell;
                    self.arc_flow[v] = flow;
                    queue.push_back(v);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s));
        self.refresh();
    }

    /// Recomputes potentials and depths for every node from the parent
    /// arrays. `u + v = c` on basic cells, anchored at `pot[root] = 0`.
    fn refresh(&mut self) {
        self.stamp += 1;
        let stamp = self.stamp;
        self.visited[0] = stamp;
        self.pot[0] = 0.0;
        self.depth[0] = 0;
        let mut chain = std::mem::take(&mut self.chain);
        for start in 0..self.num_nodes {
            if self.visited[start] == stamp {
                continue;
            }
            chain.clear();
            let mut u = start;
            while self.visited[u] != stamp {
                chain.push(u);
                u = self.parent[u];
            }
            for &w in chain.iter().rev() {
                let p = self.parent[w];
                let cell = self.parent_cell[w];
                let c = self.cost[[cell / self.k, cell % self.k]];
                self.pot[w] = c - self.pot[p];
                self.depth[w] = self.depth[p] + 1;
                self.visited[w] = stamp;
            }
        }
        self.chain = chain;
    }

    fn reduced_cost(&self, cell: usize) -> f64 {
        let (i, j) = (cell / self.k, cell % self.k);
        self.cost[[i, j]] - self.pot[i] - self.pot[self.n + j]
    }

    /// Block-search pivot rule; falls back to a first-negative full scan.
    fn find_entering(&mut self) -> Option<usize> {
        let nk = self.n * self.k;
        let mut cell = self.next_cell;
        let mut scanned = 0;
        while scanned < nk {
            let mut best = usize::MAX;
            let mut best_r = -self.eps;
            for _ in 0..self.block_size.min(nk - scanned) {
                let r = self.reduced_cost(cell);
                if r < best_r {
                    best_r = r;
                    best = cell;
                }
                cell += 1;
                if cell == nk {
                    cell = 0;
                }
                scanned += 1;
            }
            if best != usize::MAX {
                self.next_cell = cell;
                return Some(best);
            }
        }
        // fallback: accept the first strictly improving cell anywhere
        for cell in 0..nk {
            if self.reduced_cost(cell) < -self.eps {
                self.next_cell = (cell + 1) % nk;
                return Some(cell);
            }
        }
        None
    }

    /// One simplex pivot: push flow around the unique tree cycle closed by
    /// `cell` and swap the blocking arc out of the basis.
    fn pivot(&mut self, cell: usize) {
        let (ci, cj) = (cell / self.k, cell % self.k);
        let (mut a, mut b) = (ci, self.n + cj);

        let mut path_a = std::mem::take(&mut self.path_a);
        let mut path_b = std::mem::take(&mut self.path_b);
        path_a.clear();
        path_b.clear();
        while self.depth[a] > self.depth[b] {
            path_a.push(a);
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            path_b.push(b);
            b = self.parent[b];
        }
        while a != b {
            path_a.push(a);
            a = self.parent[a];
            path_b.push(b);
            b = self.parent[b];
        }

        // cycle arcs: entering (sign +), then the sink-side path upward, then
        // the source-side path downward; signs alternate around the cycle
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        let mut leave_on_b = false;
        let mut t = 1usize;
        for &x in &path_b {
            if t % 2 == 1 && self.arc_flow[x] < theta {
                theta = self.arc_flow[x];
                leave = x;
                leave_on_b = true;
            }
            t += 1;
        }
        for &x in path_a.iter().rev() {
            if t % 2 == 1 && self.arc_flow[x] < theta {
                theta = self.arc_flow[x];
                leave = x;
                leave_on_b = false;
            }
            t += 1;
        }
        debug_assert!(leave != usize::MAX, "bipartite cycle always has a − arc");

        // apply the flow change
        let mut t = 1usize;
        for &x in &path_b {
            if t % 2 == 1 {
                self.arc_flow[x] -= theta;
            } else {
                self.arc_flow[x] += theta;
            }
            t += 1;
        }
        for &x in path_a.iter().rev() {
            if t % 2 == 1 {
                self.arc_flow[x] -= theta;
            } else {
                self.arc_flow[x] += theta;
            }
            t += 1;
        }
        self.arc_flow[leave] = 0.0;

        // re-root the detached subtree onto the entering arc
        let (ein, eout) = if leave_on_b {
            (self.n + cj, ci)
        } else {
            (ci, self.n + cj)
        };
        let mut carry_parent = eout;
        let mut carry_cell = cell;
        let mut carry_flow = theta;
        let mut cur = ein;
        loop {
            let old_parent = self.parent[cur];
            let old_cell = self.parent_cell[cur];
            let old_flow = self.arc_flow[cur];
            self.parent[cur] = carry_parent;
            self.parent_cell[cur] = carry_cell;
            self.arc_flow[cur] = carry_flow;
            if cur == leave {
                break;
            }
            carry_parent = cur;
            carry_cell = old_cell;
            carry_flow = old_flow;
            cur = old_parent;
        }

        self.path_a = path_a;
        self.path_b = path_b;
        self.refresh();
    }

    fn run(&mut self) -> Result<(), TransportError> {
        let max_pivots = 1000 + 100 * self.num_nodes * (self.k.max(4));
        let mut pivots = 0usize;
        while let Some(cell) = self.find_entering() {
            self.pivot(cell);
            pivots += 1;
            if pivots > max_pivots {
                return Err(TransportError::NumericalFailure { max_pivots });
            }
        }
        Ok(())
    }

    /// Re-solves the flows on the final basis with the unperturbed marginals
    /// (exact leaf elimination), then packs the plan.
    fn extract(&mut self, supply: &[f64], demand: &[f64]) -> TransportPlan {
        let (n, k) = (self.n, self.k);
        // preorder from the root; reversed it processes children first
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.num_nodes];
        for u in 0..self.num_nodes {
            if self.parent[u] != ROOT {
                children[self.parent[u]].push(u);
            }
        }
        let mut order = Vec::with_capacity(self.num_nodes);
        let mut stack = vec![0usize];
        while let Some(u) = stack.pop() {
            order.push(u);
            stack.extend_from_slice(&children[u]);
        }

        let mut residual: Vec<f64> = (0..self.num_nodes)
            .map(|u| if u < n { supply[u] } else { demand[u - n] })
            .collect();
        let mut flows = vec![0.0; self.num_nodes];
        for &u in order.iter().rev() {
            if self.parent[u] == ROOT {
                continue;
            }
            let f = residual[u];
            flows[u] = f;
            residual[self.parent[u]] -= f;
        }

        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(n + k - 1);
        for u in 0..self.num_nodes {
            if self.parent[u] == ROOT {
                continue;
            }
            let cell = self.parent_cell[u];
            let (i, j) = (cell / k, cell % k);
            let mass = flows[u];
            debug_assert!(mass > -1e-6, "basis flow far below zero: {mass}");
            if mass > 0.0 {
                entries.push((i, j, mass));
            }
        }
        entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let objective = entries
            .iter()
            .map(|&(i, j, m)| self.cost[[i, j]] * m)
            .sum();

        TransportPlan {
            n,
            k,
            entries,
            objective,
            row_potentials: self.pot[..n].to_vec(),
            col_potentials: self.pot[n..].to_vec(),
        }
    }
}
