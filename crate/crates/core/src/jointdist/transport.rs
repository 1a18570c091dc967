//! Exact discrete optimal transport (transportation simplex).
//!
//! Small dense problems only: the basis is kept as a spanning tree over
//! supply and demand nodes, potentials are recomputed by a tree walk each
//! pivot, and the entering cell is found by a full reduced-cost scan.

use super::{JointDistribution, WeightKind};
use crate::error::{QjdError, Result};

/// Cap on the combined support size accepted by [`wasserstein1`].
pub const MAX_TRANSPORT_SUPPORT: usize = 4096;

/// Optimal cost and the basic cells of an optimal plan.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution {
    pub cost: f64,
    /// `(supply index, demand index, mass)` for every basic cell.
    pub plan: Vec<(usize, usize, f64)>,
    pub pivots: usize,
}

#[derive(Clone, Copy)]
enum Node {
    Row(usize),
    Col(usize),
}

/// Minimum of `sum c_ij x_ij` over plans with row sums `supply` and column
/// sums `demand`. `cost` is row-major `supply.len() x demand.len()`.
///
/// Both mass vectors must be nonnegative with equal totals (relative
/// mismatch at most `1e-9`); the demand side is rescaled to the supply total.
pub fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<TransportSolution> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(QjdError::InvalidArgument(
            "transport needs nonempty supports".into(),
        ));
    }
    if cost.len() != m * n {
        return Err(QjdError::InvalidArgument(format!(
            "cost has {} entries, expected {}",
            cost.len(),
            m * n
        )));
    }
    if supply
        .iter()
        .chain(demand)
        .any(|x| !(x.is_finite() && *x >= 0.0))
    {
        return Err(QjdError::InvalidArgument(
            "masses must be finite and nonnegative".into(),
        ));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(QjdError::InvalidArgument("non-finite cost".into()));
    }
    let total: f64 = supply.iter().sum();
    let total_demand: f64 = demand.iter().sum();
    if (total - total_demand).abs() > 1e-9 * total.max(total_demand).max(f64::MIN_POSITIVE) {
        return Err(QjdError::InvalidArgument(format!(
            "unbalanced problem: supply {total} vs demand {total_demand}"
        )));
    }
    let demand: Vec<f64> = if total_demand > 0.0 {
        demand.iter().map(|d| d * total / total_demand).collect()
    } else {
        demand.to_vec()
    };

    let idx = |i: usize, j: usize| i * n + j;
    let mut flow = vec![0.0; m * n];
    let mut basic = vec![false; m * n];
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(m + n - 1);

    // North-west corner start; moving exactly one step per cell yields a
    // spanning tree of m + n - 1 cells even under degeneracy.
    {
        let mut s = supply.to_vec();
        let mut d = demand.clone();
        let (mut i, mut j) = (0, 0);
        loop {
            let x = s[i].min(d[j]);
            flow[idx(i, j)] = x;
            basic[idx(i, j)] = true;
            basis.push((i, j));
            s[i] -= x;
            d[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || s[i] <= d[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let cmax = cost.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    let optimality_eps = 1e-13 * cmax.max(1.0);
    let max_pivots = 1_000 + 50 * (m + n) * (m + n).min(64);
    let bland_after = max_pivots / 2;

    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut row_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut col_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pivots = 0;

    loop {
        for a in row_adj.iter_mut() {
            a.clear();
        }
        for a in col_adj.iter_mut() {
            a.clear();
        }
        for &(i, j) in &basis {
            row_adj[i].push(j);
            col_adj[j].push(i);
        }

        // Potentials: u_0 = 0, c_ij = u_i + v_j on basic cells.
        let mut seen_row = vec![false; m];
        let mut seen_col = vec![false; n];
        let mut stack = vec![Node::Row(0)];
        seen_row[0] = true;
        u[0] = 0.0;
        while let Some(node) = stack.pop() {
            match node {
                Node::Row(i) => {
                    for &j in &row_adj[i] {
                        if !seen_col[j] {
                            seen_col[j] = true;
                            v[j] = cost[idx(i, j)] - u[i];
                            stack.push(Node::Col(j));
                        }
                    }
                }
                Node::Col(j) => {
                    for &i in &col_adj[j] {
                        if !seen_row[i] {
                            seen_row[i] = true;
                            u[i] = cost[idx(i, j)] - v[j];
                            stack.push(Node::Row(i));
                        }
                    }
                }
            }
        }
        debug_assert!(
            seen_row.iter().chain(&seen_col).all(|&s| s),
            "basis is not spanning"
        );

        let mut entering = None;
        let mut best = -optimality_eps;
        'scan: for i in 0..m {
            for j in 0..n {
                if basic[idx(i, j)] {
                    continue;
                }
                let reduced = cost[idx(i, j)] - u[i] - v[j];
                if reduced < best {
                    best = reduced;
                    entering = Some((i, j));
                    if pivots >= bland_after {
                        break 'scan;
                    }
                }
            }
        }
        let Some((ei, ej)) = entering else { break };
        if pivots >= max_pivots {
            return Err(QjdError::TransportStalled(pivots));
        }

        let path = tree_path(&row_adj, &col_adj, ei, ej, m, n);
        // Cells on the path alternate -, +, -, ... starting next to the
        // entering row; the entering cell itself gains.
        let mut theta = f64::INFINITY;
        let mut leaving = 0;
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 && flow[idx(i, j)] < theta {
                theta = flow[idx(i, j)];
                leaving = k;
            }
        }
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 {
                flow[idx(i, j)] -= theta;
            } else {
                flow[idx(i, j)] += theta;
            }
        }
        flow[idx(ei, ej)] = theta;
        let (li, lj) = path[leaving];
        flow[idx(li, lj)] = 0.0;
        basic[idx(li, lj)] = false;
        basic[idx(ei, ej)] = true;
        let slot = basis
            .iter()
            .position(|&c| c == (li, lj))
            .expect("leaving cell is basic");
        basis[slot] = (ei, ej);
        pivots += 1;
    }

    let mut total_cost = 0.0;
    let mut plan = Vec::with_capacity(basis.len());
    for &(i, j) in &basis {
        let x = flow[idx(i, j)].max(0.0);
        total_cost += x * cost[idx(i, j)];
        plan.push((i, j, x));
    }
    plan.sort_by_key(|c| (c.0, c.1));
    Ok(TransportSolution {
        cost: total_cost,
        plan,
        pivots,
    })
}

/// Basic cells on the unique tree path from row `from` to column `to`,
/// ordered starting at `from`.
fn tree_path(
    row_adj: &[Vec<usize>],
    col_adj: &[Vec<usize>],
    from: usize,
    to: usize,
    m: usize,
    n: usize,
) -> Vec<(usize, usize)> {
    // parent pointers over m + n nodes: rows are 0..m, columns m..m+n
    let mut parent = vec![usize::MAX; m + n];
    parent[from] = from;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(node) = queue.pop_front() {
        if node == m + to {
            break;
        }
        if node < m {
            for &j in &row_adj[node] {
                if parent[m + j] == usize::MAX {
                    parent[m + j] = node;
                    queue.push_back(m + j);
                }
            }
        } else {
            for &i in &col_adj[node - m] {
                if parent[i] == usize::MAX {
                    parent[i] = node;
                    queue.push_back(i);
                }
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = m + to;
    while node != from {
        let p = parent[node];
        let cell = if node >= m {
            (p, node - m)
        } else {
            (node, p - m)
        };
        cells.push(cell);
        node = p;
    }
    cells.reverse();
    cells
}

/// Exact Wasserstein-1 distance between two probability distributions with
/// the same number of axes, under the L1 distance between outcome tuples in
/// eigenvalue coordinates. The grids may differ.
pub fn wasserstein1(d1: &JointDistribution, d2: &JointDistribution) -> Result<f64> {
    if d1.kind() != WeightKind::Probability || d2.kind() != WeightKind::Probability {
        return Err(QjdError::UnsupportedKind);
    }
    if d1.grid().n_axes() != d2.grid().n_axes() {
        return Err(QjdError::GridMismatch(format!(
            "{} axes vs {} axes",
            d1.grid().n_axes(),
            d2.grid().n_axes()
        )));
    }
    let support = |d: &JointDistribution| -> Vec<(Vec<f64>, f64)> {
        d.weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(flat, w)| (d.grid().coordinates(flat), *w))
            .collect()
    };
    let a = support(d1);
    let b = support(d2);
    let size = a.len() + b.len();
    if size > MAX_TRANSPORT_SUPPORT {
        return Err(QjdError::TooLarge {
            size,
            cap: MAX_TRANSPORT_SUPPORT,
        });
    }
    let normalize = |s: &[(Vec<f64>, f64)]| -> Vec<f64> {
        let total: f64 = s.iter().map(|x| x.1).sum();
        s.iter().map(|x| x.1 / total).collect()
    };
    let supply = normalize(&a);
    let demand = normalize(&b);
    let mut cost = Vec::with_capacity(a.len() * b.len());
    for (x, _) in &a {
        for (y, _) in &b {
            cost.push(x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum());
        }
    }
    Ok(solve(&supply, &demand, &cost)?.cost)
}
