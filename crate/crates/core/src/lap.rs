//! Linear sum assignment.
//!
//! [`solve_lap`] is the O(m³) shortest-augmenting-path form of the Hungarian
//! method. It keeps row and column potentials, so every result carries a dual
//! certificate. Among optimal permutations the lexicographically smallest one
//! is returned: after the solve, rows are fixed in increasing order to the
//! smallest column that still admits a perfect matching on tight edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted dimension for [`solve_lap`].
pub const MAX_DIM: usize = 1 << 14;
/// Largest accepted dimension for [`brute_force_lap`].
pub const MAX_BRUTE_DIM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// `true` when `a` is strictly better than `b`.
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sense::Min => "min",
            Sense::Max => "max",
        })
    }
}

impl std::str::FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Sense::Min),
            "max" => Ok(Sense::Max),
            _ => Err(Error::InvalidArgument(format!("unknown sense `{}`", s))),
        }
    }
}

/// Dense square matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    m: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(m * m);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(Error::NotSquare {
                    rows: m,
                    row: i,
                    len: row.len(),
                });
            }
            data.extend(row);
        }
        Self::from_vec(m, data)
    }

    pub fn from_vec(m: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != m * m {
            return Err(Error::NotSquare {
                rows: m,
                row: data.len() / m.max(1),
                len: data.len() % m,
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: k / m, col: k % m });
        }
        Ok(CostMatrix { m, data })
    }

    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..m * m).map(|k| f(k / m, k % m)).collect();
        Self::from_vec(m, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.m)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Sum of the entries picked by `sigma`, accumulated in row order.
    pub fn objective(&self, sigma: &[usize]) -> f64 {
        sigma.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }

    fn negated(&self) -> CostMatrix {
        CostMatrix {
            m: self.m,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }
}

/// Optimal permutation with its dual certificate. `sigma` is zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub sigma: Vec<usize>,
    pub value: f64,
    pub row_potentials: Vec<f64>,
    pub col_potentials: Vec<f64>,
    pub sense: Sense,
}

/// Outcome of [`Assignment::check_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualCheck {
    pub is_permutation: bool,
    /// `|Σu + Σv − value|`.
    pub duality_gap: f64,
    /// Largest violation of `u_i + v_j ≤ c_ij` (min) or `≥` (max).
    pub worst_infeasibility: f64,
    /// Largest `|u_i + v_σ(i) − c_iσ(i)|`.
    pub worst_slackness: f64,
    pub tolerance: f64,
}

impl DualCheck {
    pub fn passed(&self) -> bool {
        self.is_permutation
            && self.duality_gap <= self.tolerance
            && self.worst_infeasibility <= self.tolerance
            && self.worst_slackness <= self.tolerance
    }
}

impl Assignment {
    pub fn dual_objective(&self) -> f64 {
        self.row_potentials.iter().sum::<f64>() + self.col_potentials.iter().sum::<f64>()
    }

    /// Verifies that `sigma` is a permutation and that the potentials form an
    /// optimal dual solution for it, at tolerance `1e-9 · m · max|c|`. Missing
    /// potentials (as from [`brute_force_lap`]) fail with infinite residuals.
    pub fn check_certificate(&self, cost: &CostMatrix) -> DualCheck {
        let m = cost.dim();
        let tolerance = 1e-9 * m as f64 * cost.max_abs().max(1.0);
        let mut seen = vec![false; m];
        let mut is_permutation = self.sigma.len() == m;
        for &j in &self.sigma {
            if j >= m || seen[j] {
                is_permutation = false;
                break;
            }
            seen[j] = true;
        }
        if self.row_potentials.len() != m || self.col_potentials.len() != m {
            return DualCheck {
                is_permutation,
                duality_gap: f64::INFINITY,
                worst_infeasibility: f64::INFINITY,
                worst_slackness: f64::INFINITY,
                tolerance,
            };
        }
        let mut worst_infeasibility: f64 = 0.0;
        let mut worst_slackness: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let s = self.row_potentials[i] + self.col_potentials[j] - cost.get(i, j);
                let violation = match self.sense {
                    Sense::Min => s,
                    Sense::Max => -s,
                };
                worst_infeasibility = worst_infeasibility.max(violation);
            }
            if let Some(&j) = self.sigma.get(i) {
                if j < m {
                    let s = self.row_potentials[i] + self.col_potentials[j] - cost.get(i, j);
                    worst_slackness = worst_slackness.max(s.abs());
                }
            }
        }
        DualCheck {
            is_permutation,
            duality_gap: (self.dual_objective() - self.value).abs(),
            worst_infeasibility,
            worst_slackness,
            tolerance,
        }
    }
}

/// Reduced costs at or below this are treated as tight.
fn tie_tolerance(cost: &CostMatrix) -> f64 {
    1e-12 * cost.dim() as f64 * cost.max_abs().max(1.0)
}

/// Solves the assignment problem exactly for the given sense.
pub fn solve_lap(cost: &CostMatrix, sense: Sense) -> Result<Assignment> {
    let m = cost.dim();
    if m > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "assignment dimension {} exceeds {}",
            m, MAX_DIM
        )));
    }
    let work = match sense {
        Sense::Min => cost.clone(),
        Sense::Max => cost.negated(),
    };
    let (mut row_to_col, u, v) = hungarian_min(&work);
    let eps = tie_tolerance(&work);
    lex_smallest_tight(&work, &u, &v, eps, &mut row_to_col);

    let (row_potentials, col_potentials) = match sense {
        Sense::Min => (u, v),
        Sense::Max => (u.iter().map(|a| -a).collect(), v.iter().map(|a| -a).collect()),
    };
    Ok(Assignment {
        value: cost.objective(&row_to_col),
        sigma: row_to_col,
        row_potentials,
        col_potentials,
        sense,
    })
}

/// Shortest augmenting path Hungarian algorithm (minimization).
/// Returns the row-to-column map and potentials with `u_i + v_j ≤ a_ij`.
fn hungarian_min(a: &CostMatrix) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = a.dim();
    // 1-based internally; index 0 is the virtual root column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let row = a.row(i0 - 1);
            let ui0 = u[i0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - ui0 - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}

/// Rewrites `row_to_col` into the lexicographically smallest perfect
/// matching that uses only edges with reduced cost `≤ eps`.
fn lex_smallest_tight(a: &CostMatrix, u: &[f64], v: &[f64], eps: f64, row_to_col: &mut [usize]) {
    let m = a.dim();
    let tight = |i: usize, j: usize| a.get(i, j) - u[i] - v[j] <= eps;
    let mut fixed_col = vec![false; m];
    let mut reached = vec![false; m];
    let mut via: Vec<(usize, usize)> = vec![(0, 0); m];
    let mut queue = std::collections::VecDeque::new();

    for i in 0..m {
        let j0 = row_to_col[i];
        if !(0..j0).any(|j| !fixed_col[j] && tight(i, j)) {
            fixed_col[j0] = true;
            continue;
        }
        // Columns from which an alternating path over rows > i leads back to j0.
        reached.iter_mut().for_each(|r| *r = false);
        reached[j0] = true;
        queue.clear();
        queue.push_back(j0);
        while let Some(c) = queue.pop_front() {
            for r in i + 1..m {
                let cr = row_to_col[r];
                if !reached[cr] && tight(r, c) {
                    reached[cr] = true;
                    via[cr] = (r, c);
                    queue.push_back(cr);
                }
            }
        }
        let pick = (0..j0).find(|&j| !fixed_col[j] && reached[j] && tight(i, j));
        if let Some(j) = pick {
            row_to_col[i] = j;
            let mut col = j;
            while col != j0 {
                let (r, c) = via[col];
                row_to_col[r] = c;
                col = c;
            }
        }
        fixed_col[row_to_col[i]] = true;
    }
}

/// Exhaustive search over all permutations (m ≤ 10), same tie-break as
/// [`solve_lap`]. Potentials are left empty.
pub fn brute_force_lap(cost: &CostMatrix, sense: Sense) -> Result<Assignment> {
    let m = cost.dim();
    if m > MAX_BRUTE_DIM {
        return Err(Error::TooLarge {
            m,
            max: MAX_BRUTE_DIM,
        });
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best = cost.objective(&perm);
    loop {
        let value = cost.objective(&perm);
        if sense.better(value, best) {
            best = value;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let tol = tie_tolerance(cost);
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        let value = cost.objective(&perm);
        if (value - best).abs() <= tol {
            return Ok(Assignment {
                sigma: perm,
                value,
                row_potentials: Vec::new(),
                col_potentials: Vec::new(),
                sense,
            });
        }
        if !next_permutation(&mut perm) {
            unreachable!("the optimum is attained by some permutation");
        }
    }
}

/// Advances to the next permutation in lexicographic order.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
