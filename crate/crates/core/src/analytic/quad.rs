//! Gauss–Legendre quadrature and bisection.

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Computes the `n`-point rule by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Result<GaussLegendre> {
    if n == 0 {
        return Err(Error::InvalidQuadrature("rule needs at least one node".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(GaussLegendre { nodes, weights })
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

impl GaussLegendre {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(mid + half * z)).sum();
        half * sum
    }

    /// Same rule on `panels` equal subintervals.
    pub fn integrate_composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * h;
                let hi = if k + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }
}

/// `∫_a^b f` with an `nodes`-point Gauss–Legendre rule.
pub fn quadrature_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidQuadrature(format!("need a < b, got [{}, {}]", a, b)));
    }
    let rule = gauss_legendre(nodes)?;
    let mut bad = None;
    let value = rule.integrate(a, b, |x| {
        let v = f(x);
        if !v.is_finite() && bad.is_none() {
            bad = Some(x);
        }
        v
    });
    match bad {
        Some(x) => Err(Error::NonFiniteValue(x)),
        None => Ok(value),
    }
}

/// Bisection iteration cap.
pub const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `|g(x)|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection on a sign-changing bracket. Stops once the bracket is no wider
/// than `tol` or cannot be split further in floating point.
pub fn find_root_bisect(g: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<Root> {
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let (mut glo, ghi) = (g(lo), g(hi));
    if !glo.is_finite() {
        return Err(Error::NonFiniteValue(lo));
    }
    if !ghi.is_finite() {
        return Err(Error::NonFiniteValue(hi));
    }
    if glo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if ghi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0 });
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    for it in 1..=MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if !gm.is_finite() {
            return Err(Error::NonFiniteValue(mid));
        }
        if gm == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, iterations: it });
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if hi - lo <= tol || next == lo || next == hi {
            let x = 0.5 * (lo + hi);
            return Ok(Root { x, residual: g(x).abs(), iterations: it });
        }
    }
    Err(Error::NoConvergence(MAX_BISECTION_STEPS))
}
