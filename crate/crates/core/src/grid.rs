//! Dyadic discretization of the copula-extremal problem.
//!
//! The unit square is cut into `4ⁿ` cells
//! `I_{i,j} = [(i−1)/2ⁿ, i/2ⁿ) × [(j−1)/2ⁿ, j/2ⁿ)`. Each cell gets one number
//! summarizing `c` on it (a sampled extremum in [`Mode::Lower`] and
//! [`Mode::Upper`], the center value in [`Mode::Midpoint`]) and the resulting `2ⁿ × 2ⁿ` assignment problem is solved. Every
//! permutation of cells is a doubly stochastic measure with mass `2^{−n}` per
//! cell, so `2^{−n}` times the assignment value bounds the continuous problem.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costfn::CostFunction;
use crate::error::{Error, Result};
use crate::format::{fmt_f64, parse_f64, SCHEMA_VERSION};
use crate::lap::{solve_lap, CostMatrix, Sense};

/// Largest refinement level accepted by [`bound_sequence`].
pub const MAX_LEVEL: u32 = 10;
/// Default samples per axis per cell in extremum modes.
pub const DEFAULT_SUBSAMPLES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lower,
    Upper,
    Midpoint,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Lower => "lower",
            Mode::Upper => "upper",
            Mode::Midpoint => "midpoint",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Mode::Lower),
            "upper" => Ok(Mode::Upper),
            "midpoint" => Ok(Mode::Midpoint),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{}`", s))),
        }
    }
}

/// How extremum modes treat samples on a declared singular line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularPolicy {
    /// Evaluate anyway; the cost clamps the coordinate.
    Clamp,
    /// Drop the sample.
    #[default]
    ExcludeBoundarySample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: u32,
    pub mode: Mode,
    pub subsamples: usize,
    pub singular_policy: SingularPolicy,
}

impl GridSpec {
    pub fn new(n: u32, mode: Mode) -> Self {
        GridSpec {
            n,
            mode,
            subsamples: DEFAULT_SUBSAMPLES,
            singular_policy: SingularPolicy::default(),
        }
    }

    pub fn with_subsamples(mut self, subsamples: usize) -> Self {
        self.subsamples = subsamples;
        self
    }

    pub fn with_policy(mut self, policy: SingularPolicy) -> Self {
        self.singular_policy = policy;
        self
    }

    pub fn side(&self) -> usize {
        1usize << self.n
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidGrid("level n must be >= 1".into()));
        }
        if self.n > 14 {
            return Err(Error::InvalidGrid(format!("level n = {} is too large", self.n)));
        }
        if self.subsamples < 1 {
            return Err(Error::InvalidGrid("subsamples must be >= 1".into()));
        }
        Ok(())
    }

    /// Sample coordinates along one axis of the cell starting at `lo`.
    /// Always contains the center; contains both endpoints when `subsamples ≥ 2`.
    fn axis_samples(&self, lo: f64, h: f64) -> Vec<f64> {
        let center = lo + 0.5 * h;
        if self.mode == Mode::Midpoint || self.subsamples == 1 {
            return vec![center];
        }
        let k = self.subsamples - 1;
        let mut pts: Vec<f64> = (0..=k).map(|t| lo + h * t as f64 / k as f64).collect();
        if !pts.contains(&center) {
            pts.push(center);
        }
        pts
    }
}

/// Per-cell summaries of a cost; entry `(i, j)` belongs to cell `I_{i+1,j+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCostMatrix {
    pub n: u32,
    pub mode: Mode,
    pub values: CostMatrix,
}

impl GridCostMatrix {
    /// Header `n,mode`, one record, then the matrix row by row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,mode")?;
        writeln!(w, "{},{}", self.n, self.mode.name())?;
        for row in self.values.rows() {
            let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse("unexpected end of grid CSV".into()))?
                .map_err(Error::from)
        };
        if next()?.trim() != "n,mode" {
            return Err(Error::Parse("grid CSV header must be `n,mode`".into()));
        }
        let meta = next()?;
        let (n, mode) = meta
            .split_once(',')
            .ok_or_else(|| Error::Parse("malformed `n,mode` record".into()))?;
        let n: u32 = n.trim().parse().map_err(|_| Error::Parse(format!("bad level `{}`", n)))?;
        let mode: Mode = mode.trim().parse()?;
        let side = 1usize << n;
        let mut rows = Vec::with_capacity(side);
        for _ in 0..side {
            let line = next()?;
            rows.push(line.split(',').map(parse_f64).collect::<Result<Vec<f64>>>()?);
        }
        Ok(GridCostMatrix {
            n,
            mode,
            values: CostMatrix::from_rows(rows)?,
        })
    }
}

/// Builds the grid cost matrix for `c`.
pub fn build_matrix(c: &CostFunction, spec: &GridSpec) -> Result<GridCostMatrix> {
    spec.validate()?;
    let side = spec.side();
    let h = 1.0 / side as f64;
    let skip_singular = spec.singular_policy == SingularPolicy::ExcludeBoundarySample;

    let rows: Vec<Vec<f64>> = (0..side)
        .into_par_iter()
        .map(|i| {
            let xs = spec.axis_samples(i as f64 * h, h);
            (0..side)
                .map(|j| {
                    let ys = spec.axis_samples(j as f64 * h, h);
                    cell_value(c, spec.mode, &xs, &ys, skip_singular).ok_or(Error::CellEvaluation {
                        i: i + 1,
                        j: j + 1,
                        x: (i as f64 + 0.5) * h,
                        y: (j as f64 + 0.5) * h,
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GridCostMatrix {
        n: spec.n,
        mode: spec.mode,
        values: CostMatrix::from_rows(rows)?,
    })
}

fn cell_value(c: &CostFunction, mode: Mode, xs: &[f64], ys: &[f64], skip_singular: bool) -> Option<f64> {
    let mut acc: Option<f64> = None;
    for &x in xs {
        for &y in ys {
            if skip_singular && mode != Mode::Midpoint && c.is_singular_at(x, y) {
                continue;
            }
            let v = c.eval(x, y);
            if !v.is_finite() {
                return None;
            }
            acc = Some(match (acc, mode) {
                (None, _) => v,
                (Some(a), Mode::Lower) => a.min(v),
                (Some(a), Mode::Upper) => a.max(v),
                (Some(a), Mode::Midpoint) => a,
            });
        }
    }
    acc
}

/// Optimal cell permutation; `sigma` is zero-based, each cell carries `2^{−n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteCoupling {
    n: u32,
    sigma: Vec<usize>,
}

impl DiscreteCoupling {
    pub fn new(n: u32, sigma: Vec<usize>) -> Result<Self> {
        let side = 1usize << n;
        if sigma.len() != side {
            return Err(Error::InvalidArgument(format!(
                "coupling at level {} needs {} entries, got {}",
                n,
                side,
                sigma.len()
            )));
        }
        let mut seen = vec![false; side];
        for &j in &sigma {
            if j >= side || seen[j] {
                return Err(Error::InvalidArgument("sigma is not a permutation".into()));
            }
            seen[j] = true;
        }
        Ok(DiscreteCoupling { n, sigma })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn side(&self) -> usize {
        self.sigma.len()
    }

    pub fn cell_mass(&self) -> f64 {
        1.0 / self.side() as f64
    }

    /// Dense measure matrix with `2^{−n}` on each chosen cell.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        let side = self.side();
        let mass = self.cell_mass();
        (0..side)
            .map(|i| {
                let mut row = vec![0.0; side];
                row[self.sigma[i]] = mass;
                row
            })
            .collect()
    }

    /// Cell centers carrying mass, sorted by x.
    pub fn support_points(&self) -> Vec<(f64, f64)> {
        let side = self.side() as f64;
        self.sigma
            .iter()
            .enumerate()
            .map(|(i, &j)| ((i as f64 + 0.5) / side, (j as f64 + 0.5) / side))
            .collect()
    }

    pub fn write_support_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y")?;
        for (x, y) in self.support_points() {
            writeln!(w, "{},{}", fmt_f64(x), fmt_f64(y))?;
        }
        Ok(())
    }

    pub fn to_record(&self, value: f64) -> CouplingRecord {
        CouplingRecord {
            schema: SCHEMA_VERSION,
            n: self.n,
            sigma: self.sigma.iter().map(|j| j + 1).collect(),
            value,
        }
    }
}

/// JSON form of a coupling. `sigma` is one-based: row `i` maps to column `sigma[i-1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRecord {
    pub schema: u32,
    pub n: u32,
    pub sigma: Vec<usize>,
    pub value: f64,
}

impl CouplingRecord {
    pub fn to_coupling(&self) -> Result<DiscreteCoupling> {
        if self.sigma.contains(&0) {
            return Err(Error::InvalidArgument("sigma is one-based".into()));
        }
        DiscreteCoupling::new(self.n, self.sigma.iter().map(|j| j - 1).collect())
    }
}

/// Grid bound and the permutation attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub coupling: DiscreteCoupling,
}

pub fn bound(c: &CostFunction, spec: &GridSpec, sense: Sense) -> Result<Bound> {
    let matrix = build_matrix(c, spec)?;
    bound_from_matrix(&matrix, sense)
}

pub fn bound_from_matrix(matrix: &GridCostMatrix, sense: Sense) -> Result<Bound> {
    let assignment = solve_lap(&matrix.values, sense)?;
    let side = matrix.values.dim() as f64;
    Ok(Bound {
        value: assignment.value / side,
        coupling: DiscreteCoupling::new(matrix.n, assignment.sigma)?,
    })
}

/// Bound values for every level in `levels`. All other settings are taken
/// from `template`.
pub fn bound_sequence(
    c: &CostFunction,
    levels: std::ops::RangeInclusive<u32>,
    template: &GridSpec,
    sense: Sense,
) -> Result<Vec<(u32, f64)>> {
    if *levels.start() < 1 || *levels.end() > MAX_LEVEL {
        return Err(Error::InvalidGrid(format!(
            "levels must lie in 1..={}, got {}..={}",
            MAX_LEVEL,
            levels.start(),
            levels.end()
        )));
    }
    levels
        .map(|n| {
            let spec = GridSpec { n, ..*template };
            bound(c, &spec, sense).map(|b| (n, b.value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costfn::{parse_cost, registry_cost};
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn product_midpoint_level_one() {
        let c = registry_cost("product").unwrap();
        let g = build_matrix(&c, &GridSpec::new(1, Mode::Midpoint)).unwrap();
        let expect = [[0.0625, 0.1875], [0.1875, 0.5625]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(g.values.get(i, j), expect[i][j], 1e-15));
            }
        }
        let b = bound(&c, &GridSpec::new(1, Mode::Midpoint), Sense::Max).unwrap();
        assert!(close(b.value, 0.3125, 1e-15));
        assert_eq!(b.coupling.sigma(), &[0, 1]);
    }

    #[test]
    fn product_upper_uses_corners() {
        let c = registry_cost("product").unwrap();
        for ms in [2, 3, 9] {
            let g = build_matrix(&c, &GridSpec::new(1, Mode::Upper).with_subsamples(ms)).unwrap();
            let expect = [[0.25, 0.5], [0.5, 1.0]];
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(g.values.get(i, j), expect[i][j]);
                }
            }
        }
    }

    #[test]
    fn sinsin_midpoint_is_outer_product() {
        let c = registry_cost("sinsin").unwrap();
        let g = build_matrix(&c, &GridSpec::new(2, Mode::Midpoint)).unwrap();
        let s: Vec<f64> = [1.0, 3.0, 5.0, 7.0].iter().map(|k| (k * PI / 8.0).sin()).collect();
        for i in 0..4 {
            for j in 0..4 {
                assert!(close(g.values.get(i, j), s[i] * s[j], 1e-15));
                assert_eq!(g.values.get(i, j), g.values.get(j, i));
            }
        }
    }

    #[test]
    fn support_points_examples() {
        let id = DiscreteCoupling::new(1, vec![0, 1]).unwrap();
        assert_eq!(id.support_points(), vec![(0.25, 0.25), (0.75, 0.75)]);
        let swap = DiscreteCoupling::new(1, vec![1, 0]).unwrap();
        assert_eq!(swap.support_points(), vec![(0.25, 0.75), (0.75, 0.25)]);
        assert!(DiscreteCoupling::new(1, vec![0, 0]).is_err());
        assert!(DiscreteCoupling::new(2, vec![0, 1]).is_err());
    }

    #[test]
    fn linear_cost_is_permutation_invariant() {
        let c = parse_cost("x + y").unwrap();
        for n in 1..=5 {
            for sense in [Sense::Min, Sense::Max] {
                let b = bound(&c, &GridSpec::new(n, Mode::Midpoint), sense).unwrap();
                assert!(close(b.value, 1.0, 1e-12), "n={} {:?}: {}", n, sense, b.value);
            }
        }
    }

    #[test]
    fn singular_edge_excluded() {
        let c = registry_cost("sin_recip_cos").unwrap();
        let spec = GridSpec::new(2, Mode::Upper).with_subsamples(3);
        let excl = build_matrix(&c, &spec).unwrap();
        let clamp = build_matrix(&c, &spec.with_policy(SingularPolicy::Clamp)).unwrap();
        // Only cells in the first column touch x = 0.
        for i in 1..4 {
            for j in 0..4 {
                assert_eq!(excl.values.get(i, j), clamp.values.get(i, j));
            }
        }
        let m = build_matrix(&c, &GridSpec::new(3, Mode::Midpoint)).unwrap();
        assert!(m.values.rows().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn evaluation_failure_reports_cell() {
        let c = parse_cost("1/(x-0.5)").unwrap();
        match build_matrix(&c, &GridSpec::new(1, Mode::Upper).with_subsamples(3)) {
            Err(Error::CellEvaluation { i, .. }) => assert!(i == 1 || i == 2),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn level_limits() {
        let c = registry_cost("product").unwrap();
        let t = GridSpec::new(1, Mode::Midpoint);
        assert!(bound_sequence(&c, 0..=2, &t, Sense::Max).is_err());
        assert!(bound_sequence(&c, 1..=11, &t, Sense::Max).is_err());
        assert!(build_matrix(&c, &GridSpec::new(0, Mode::Midpoint)).is_err());
        assert!(build_matrix(&c, &GridSpec::new(1, Mode::Upper).with_subsamples(0)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = registry_cost("sincos").unwrap();
        let g = build_matrix(&c, &GridSpec::new(2, Mode::Lower)).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,mode\n2,lower\n"));
        assert_eq!(GridCostMatrix::read_csv(&buf[..]).unwrap(), g);
    }

    #[test]
    fn coupling_record_is_one_based() {
        let cpl = DiscreteCoupling::new(1, vec![1, 0]).unwrap();
        let rec = cpl.to_record(0.5);
        assert_eq!(rec.sigma, vec![2, 1]);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"schema":1,"n":1,"sigma":[2,1],"value":0.5}"#);
        let back: CouplingRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_coupling().unwrap(), cpl);
    }
}
