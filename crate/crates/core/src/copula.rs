//! Copulas on the unit square, with shuffles of M as the main concrete family.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analytic::quad::gauss_legendre;
use crate::costfn::CostFunction;
use crate::error::{Error, Result};
use crate::format::{fmt_f64, SCHEMA_VERSION};
use crate::grid::DiscreteCoupling;

/// Tolerance for the equality axioms and the Fréchet sandwich.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Allowed negative rectangle mass.
pub const INCREASING_SLACK: f64 = 1e-12;
/// Gauss–Legendre nodes per shuffle piece.
pub const DEFAULT_QUAD_NODES: usize = 32;

/// Anything with a distribution function on `[0,1]²`.
pub trait Copula {
    fn cdf(&self, x: f64, y: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64> Copula for F {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

fn check_unit(x: f64, y: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
        Ok(())
    } else {
        Err(Error::Domain { x, y })
    }
}

/// `M(x, y) = min(x, y)`.
pub fn eval_frechet_upper(x: f64, y: f64) -> Result<f64> {
    check_unit(x, y)?;
    Ok(x.min(y))
}

/// `W(x, y) = max(x + y − 1, 0)`.
pub fn eval_frechet_lower(x: f64, y: f64) -> Result<f64> {
    check_unit(x, y)?;
    Ok((x + y - 1.0).max(0.0))
}

#[derive(Debug, Clone, Copy)]
pub struct FrechetUpper;

#[derive(Debug, Clone, Copy)]
pub struct FrechetLower;

impl Copula for FrechetUpper {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        x.min(y)
    }
}

impl Copula for FrechetLower {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        (x + y - 1.0).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Mass on the block diagonal (`ω = +1`).
    Diagonal,
    /// Mass on the block antidiagonal (`ω = −1`).
    Antidiagonal,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Diagonal => 1,
            Orientation::Antidiagonal => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Orientation::Diagonal),
            -1 => Ok(Orientation::Antidiagonal),
            other => Err(Error::InvalidShuffle(format!("orientation must be +1 or -1, got {}", other))),
        }
    }
}

/// Shuffle of M: strip `[s_{i−1}, s_i)` is sent to the `π(i)`-th y-slot of the
/// same width, along the diagonal or antidiagonal of that square.
///
/// `pi` is zero-based here; the JSON form is one-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffleOfM {
    s: Vec<f64>,
    pi: Vec<usize>,
    omega: Vec<Orientation>,
    /// `t[k]` is the lower edge of y-slot `k`; `t.len() == n + 1`.
    t: Vec<f64>,
}

impl ShuffleOfM {
    pub fn new(s: Vec<f64>, pi: Vec<usize>, omega: Vec<Orientation>) -> Result<Self> {
        let n = pi.len();
        if n == 0 {
            return Err(Error::InvalidShuffle("need at least one piece".into()));
        }
        if s.len() != n + 1 || omega.len() != n {
            return Err(Error::InvalidShuffle(format!(
                "{} pieces need {} partition points and {} orientations, got {} and {}",
                n,
                n + 1,
                n,
                s.len(),
                omega.len()
            )));
        }
        if s[0] != 0.0 || s[n] != 1.0 {
            return Err(Error::InvalidShuffle("partition must start at 0 and end at 1".into()));
        }
        if s.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidShuffle("partition must be strictly increasing".into()));
        }
        let mut slot_width = vec![f64::NAN; n];
        for (i, &k) in pi.iter().enumerate() {
            if k >= n || !slot_width[k].is_nan() {
                return Err(Error::InvalidShuffle("pi is not a permutation".into()));
            }
            slot_width[k] = s[i + 1] - s[i];
        }
        let mut t = Vec::with_capacity(n + 1);
        t.push(0.0);
        for w in &slot_width {
            t.push(t.last().unwrap() + w);
        }
        t[n] = 1.0;
        Ok(ShuffleOfM { s, pi, omega, t })
    }

    /// `{1, (0,1), (1), +1}`, i.e. M itself.
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0], vec![0], vec![Orientation::Diagonal]).unwrap()
    }

    /// `{1, (0,1), (1), −1}`, i.e. W.
    pub fn antidiagonal() -> Self {
        Self::new(vec![0.0, 1.0], vec![0], vec![Orientation::Antidiagonal]).unwrap()
    }

    /// Dyadic shuffle with diagonal pieces realizing a grid coupling.
    pub fn from_coupling(coupling: &DiscreteCoupling) -> Self {
        let side = coupling.side();
        let s = (0..=side).map(|k| k as f64 / side as f64).collect();
        Self::new(s, coupling.sigma().to_vec(), vec![Orientation::Diagonal; side]).unwrap()
    }

    pub fn pieces(&self) -> usize {
        self.pi.len()
    }

    pub fn partition(&self) -> &[f64] {
        &self.s
    }

    pub fn target_partition(&self) -> &[f64] {
        &self.t
    }

    pub fn permutation(&self) -> &[usize] {
        &self.pi
    }

    pub fn orientations(&self) -> &[Orientation] {
        &self.omega
    }

    fn block(&self, i: usize) -> (f64, f64, f64, f64) {
        let k = self.pi[i];
        (self.s[i], self.s[i + 1], self.t[k], self.t[k + 1])
    }

    /// Piecewise linear map whose graph carries the mass.
    pub fn support_map(&self, x: f64) -> f64 {
        let i = match self.s[1..].iter().position(|&edge| x < edge) {
            Some(i) => i,
            None => self.pieces() - 1,
        };
        let (s0, _, t0, t1) = self.block(i);
        match self.omega[i] {
            Orientation::Diagonal => t0 + (x - s0),
            Orientation::Antidiagonal => t1 - (x - s0),
        }
    }

    /// Mass of `[0,x] × [0,y]`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit(x, y)?;
        Ok(self.cdf(x, y))
    }

    pub fn to_record(&self) -> ShuffleRecord {
        ShuffleRecord {
            schema: SCHEMA_VERSION,
            n: self.pieces(),
            s: self.s.clone(),
            pi: self.pi.iter().map(|k| k + 1).collect(),
            omega: self.omega.iter().map(|o| o.sign()).collect(),
        }
    }
}

impl Copula for ShuffleOfM {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        let mut mass = 0.0;
        for i in 0..self.pieces() {
            let (s0, s1, t0, t1) = self.block(i);
            if x <= s0 || y <= t0 {
                continue;
            }
            let len = s1 - s0;
            let along_x = (x - s0).min(len);
            let seg = match self.omega[i] {
                Orientation::Diagonal => along_x.min(y - t0),
                Orientation::Antidiagonal => along_x - (t1 - y).max(0.0),
            };
            mass += seg.clamp(0.0, len);
        }
        mass
    }
}

/// JSON form `{schema, n, s, pi, omega}` with one-based `pi` and `omega ∈ {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffleRecord {
    pub schema: u32,
    pub n: usize,
    pub s: Vec<f64>,
    pub pi: Vec<usize>,
    pub omega: Vec<i8>,
}

impl ShuffleRecord {
    pub fn to_shuffle(&self) -> Result<ShuffleOfM> {
        if self.pi.len() != self.n {
            return Err(Error::InvalidShuffle(format!("n = {} but pi has {} entries", self.n, self.pi.len())));
        }
        if self.pi.contains(&0) {
            return Err(Error::InvalidShuffle("pi is one-based".into()));
        }
        let omega = self.omega.iter().map(|&o| Orientation::from_sign(o)).collect::<Result<Vec<_>>>()?;
        ShuffleOfM::new(self.s.clone(), self.pi.iter().map(|k| k - 1).collect(), omega)
    }
}

/// `∫ c dγ_S = Σ_i ∫_{s_{i−1}}^{s_i} c(x, Γ_S(x)) dx`, Gauss–Legendre per piece.
pub fn integrate_against_shuffle(c: &CostFunction, shuffle: &ShuffleOfM, quad_nodes: usize) -> Result<f64> {
    if quad_nodes < 2 {
        return Err(Error::InvalidQuadrature(format!("need at least 2 nodes, got {}", quad_nodes)));
    }
    let rule = gauss_legendre(quad_nodes)?;
    let mut total = 0.0;
    for i in 0..shuffle.pieces() {
        let (s0, s1, t0, t1) = shuffle.block(i);
        let orient = shuffle.omega[i];
        total += rule.integrate(s0, s1, |x| {
            let y = match orient {
                Orientation::Diagonal => t0 + (x - s0),
                Orientation::Antidiagonal => t1 - (x - s0),
            };
            c.eval(x, y)
        });
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomKind {
    Grounding,
    Margin,
    TwoIncreasing,
    FrechetBounds,
}

/// First failed axiom; `(x1, y1)–(x2, y2)` is the offending rectangle
/// (a single point when `x1 == x2` and `y1 == y2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomViolation {
    pub kind: AxiomKind,
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CopulaReport {
    pub pass: bool,
    pub violation: Option<AxiomViolation>,
}

/// Checks the copula axioms on the lattice `{k/grid}²`, then the Fréchet
/// sandwich. The first violation found is reported.
pub fn validate_copula<C: Copula + ?Sized>(copula: &C, grid: usize) -> CopulaReport {
    let grid = grid.max(2);
    let pts: Vec<f64> = (0..=grid).map(|k| k as f64 / grid as f64).collect();
    let values: Vec<Vec<f64>> = pts.iter().map(|&x| pts.iter().map(|&y| copula.cdf(x, y)).collect()).collect();
    let fail = |kind, x1, y1, x2, y2, amount| CopulaReport {
        pass: false,
        violation: Some(AxiomViolation {
            kind,
            x1,
            y1,
            x2,
            y2,
            amount,
        }),
    };

    for (a, &t) in pts.iter().enumerate() {
        let g = values[a][0].abs().max(values[0][a].abs());
        if g > EQUALITY_TOL {
            return fail(AxiomKind::Grounding, t, 0.0, t, 0.0, g);
        }
    }
    for (a, &t) in pts.iter().enumerate() {
        let dx = (values[a][grid] - t).abs();
        if dx > EQUALITY_TOL {
            return fail(AxiomKind::Margin, t, 1.0, t, 1.0, dx);
        }
        let dy = (values[grid][a] - t).abs();
        if dy > EQUALITY_TOL {
            return fail(AxiomKind::Margin, 1.0, t, 1.0, t, dy);
        }
    }
    for a in 0..grid {
        for b in 0..grid {
            let mass = values[a + 1][b + 1] - values[a + 1][b] - values[a][b + 1] + values[a][b];
            if mass < -INCREASING_SLACK {
                return fail(AxiomKind::TwoIncreasing, pts[a], pts[b], pts[a + 1], pts[b + 1], mass);
            }
        }
    }
    for (a, &x) in pts.iter().enumerate() {
        for (b, &y) in pts.iter().enumerate() {
            let v = values[a][b];
            let lo = (x + y - 1.0).max(0.0);
            let hi = x.min(y);
            let excess = (lo - v).max(v - hi);
            if excess > EQUALITY_TOL {
                return fail(AxiomKind::FrechetBounds, x, y, x, y, excess);
            }
        }
    }
    CopulaReport {
        pass: true,
        violation: None,
    }
}

/// Cumulative frequencies `#{x_n < a/r, y_n < b/r} / N` on an `(r+1)²` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCopula {
    resolution: usize,
    count: usize,
    /// `cum[a][b]` for `a, b ∈ 0..=r`.
    cum: Vec<Vec<u64>>,
}

/// Accumulates the empirical copula of `points` at resolution `r`.
pub fn empirical_copula(points: &[(f64, f64)], r: usize) -> Result<EmpiricalCopula> {
    if r == 0 {
        return Err(Error::InvalidArgument("resolution must be >= 1".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points".into()));
    }
    let mut cells = vec![vec![0u64; r]; r];
    for (index, &(x, y)) in points.iter().enumerate() {
        if !((0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)) {
            return Err(Error::PointOutOfRange { index, x, y });
        }
        // Cell a holds x ∈ [a/r, (a+1)/r); exact in binary for dyadic r.
        let a = ((x * r as f64) as usize).min(r - 1);
        let b = ((y * r as f64) as usize).min(r - 1);
        cells[a][b] += 1;
    }
    let mut cum = vec![vec![0u64; r + 1]; r + 1];
    for a in 0..r {
        for b in 0..r {
            cum[a + 1][b + 1] = cells[a][b] + cum[a][b + 1] + cum[a + 1][b] - cum[a][b];
        }
    }
    Ok(EmpiricalCopula {
        resolution: r,
        count: points.len(),
        cum,
    })
}

impl EmpiricalCopula {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn sample_size(&self) -> usize {
        self.count
    }

    /// Value at lattice node `(a/r, b/r)`.
    pub fn at_node(&self, a: usize, b: usize) -> f64 {
        self.cum[a][b] as f64 / self.count as f64
    }

    /// Bilinear interpolation between lattice nodes; exact at the nodes.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let r = self.resolution as f64;
        let (fx, fy) = ((x * r).clamp(0.0, r), (y * r).clamp(0.0, r));
        let (a, b) = ((fx.floor() as usize).min(self.resolution - 1), (fy.floor() as usize).min(self.resolution - 1));
        let (u, v) = (fx - a as f64, fy - b as f64);
        (1.0 - u) * (1.0 - v) * self.at_node(a, b)
            + u * (1.0 - v) * self.at_node(a + 1, b)
            + (1.0 - u) * v * self.at_node(a, b + 1)
            + u * v * self.at_node(a + 1, b + 1)
    }

    /// Header `r,N`, then `r+1` rows of node values (row `a` is `x = a/r`).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,N")?;
        writeln!(w, "{},{}", self.resolution, self.count)?;
        for a in 0..=self.resolution {
            let row: Vec<String> = (0..=self.resolution).map(|b| fmt_f64(self.at_node(a, b))).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

impl Copula for EmpiricalCopula {
    fn cdf(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y)
    }
}
