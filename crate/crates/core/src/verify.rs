//! Optimality diagnostics for discrete supports and measure matrices.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lap::Sense;

/// A cycle only counts as a violation when its gain exceeds this.
pub const CYCLE_TOL: f64 = 1e-10;

/// Finite support of a coupling together with the optimization sense.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    pub points: Vec<(f64, f64)>,
    pub sense: Sense,
}

impl SupportSet {
    pub fn new(points: Vec<(f64, f64)>, sense: Sense) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(SupportSet { points, sense })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub pass: bool,
    /// Largest gain over all checked cycles (≤ 0 means no cycle improves).
    pub worst_gap: f64,
    /// Indices into the support, in cycle order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_cycle: Option<Vec<usize>>,
    pub cycles_checked: u64,
}

/// Gain of rerouting `(x_k, y_k) → (x_{k+1}, y_k)` along `cycle`; the cycle
/// violates c-cyclical monotonicity when this is positive.
fn cycle_gap<F: Fn(f64, f64) -> f64>(pts: &[(f64, f64)], cycle: &[usize], cost: &F, sense: Sense) -> f64 {
    let k = cycle.len();
    let mut kept = 0.0;
    let mut shifted = 0.0;
    for t in 0..k {
        let (x, y) = pts[cycle[t]];
        let (x_next, _) = pts[cycle[(t + 1) % k]];
        kept += cost(x, y);
        shifted += cost(x_next, y);
    }
    match sense {
        Sense::Min => kept - shifted,
        Sense::Max => shifted - kept,
    }
}

/// Checks every 2-cycle and `trials` random cycles of each length
/// `3..=max_cycle`. Trial `t` of length `k` draws from its own generator
/// seeded with `seed + t`, so the report does not depend on scheduling.
pub fn check_cyclical_monotonicity<F>(
    support: &SupportSet,
    cost: F,
    max_cycle: usize,
    trials: usize,
    seed: u64,
) -> Result<CycleReport>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if max_cycle < 2 {
        return Err(Error::InvalidArgument("max_cycle must be >= 2".into()));
    }
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let pts = &support.points;
    let sense = support.sense;
    let n = pts.len();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut checked = 0u64;

    for i in 0..n {
        for j in i + 1..n {
            let gap = cycle_gap(pts, &[i, j], &cost, sense);
            checked += 1;
            worst_gap = worst_gap.max(gap);
            if gap > CYCLE_TOL {
                return Ok(CycleReport {
                    pass: false,
                    worst_gap,
                    violating_cycle: Some(vec![i, j]),
                    cycles_checked: checked,
                });
            }
        }
    }

    for len in 3..=max_cycle.min(n) {
        let results: Vec<(f64, Vec<usize>)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
                let cycle = sample(&mut rng, n, len).into_vec();
                (cycle_gap(pts, &cycle, &cost, sense), cycle)
            })
            .collect();
        checked += trials as u64;
        for (gap, cycle) in results {
            worst_gap = worst_gap.max(gap);
            if gap > CYCLE_TOL {
                return Ok(CycleReport {
                    pass: false,
                    worst_gap,
                    violating_cycle: Some(cycle),
                    cycles_checked: checked,
                });
            }
        }
    }
    if n == 1 {
        worst_gap = 0.0;
    }
    Ok(CycleReport {
        pass: true,
        worst_gap,
        violating_cycle: None,
        cycles_checked: checked,
    })
}

/// Target for row and column sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Sums equal `1/m` (cell masses of a coupling).
    Coupling,
    /// Sums equal 1.
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum Line {
    Row(usize),
    Column(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticReport {
    pub pass: bool,
    pub worst_deviation: f64,
    /// Line with the largest deviation when the check fails.
    pub failing: Option<Line>,
}

pub fn check_doubly_stochastic(matrix: &[Vec<f64>], tol: f64, convention: Convention) -> Result<StochasticReport> {
    let m = matrix.len();
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != m {
            return Err(Error::NotSquare { rows: m, row: i, len: row.len() });
        }
        if let Some((j, &v)) = row.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeEntry { row: i, col: j, value: v });
        }
    }
    let target = match convention {
        Convention::Coupling => 1.0 / m as f64,
        Convention::Stochastic => 1.0,
    };
    let mut worst = 0.0;
    let mut worst_line = Line::Row(0);
    for i in 0..m {
        let d = (matrix[i].iter().sum::<f64>() - target).abs();
        if d > worst {
            worst = d;
            worst_line = Line::Row(i);
        }
    }
    for j in 0..m {
        let d = (matrix.iter().map(|r| r[j]).sum::<f64>() - target).abs();
        if d > worst {
            worst = d;
            worst_line = Line::Column(j);
        }
    }
    let pass = worst <= tol;
    Ok(StochasticReport {
        pass,
        worst_deviation: worst,
        failing: if pass { None } else { Some(worst_line) },
    })
}
