//! Closed-form extremal copulas.
//!
//! * Costs with a positive mixed derivative: the maximum is attained by M and
//!   the minimum by W ([`solve_monotone`]).
//! * Costs `c(x, y) = φ(x + y)` with `φ` concave then convex: the maximizer is
//!   the shuffle `Γ(x) = β − x` on `[0, β)`, `Γ(x) = x` on `[β, 1]`, where `β`
//!   solves `φ(2β) − φ(β) = βφ′(β)` ([`solve_uckelmann`]). The accompanying
//!   potential pair is checked on a lattice by [`certify_uckelmann`].

pub mod quad;

use std::sync::Arc;

use serde::Serialize;

use crate::costfn::expr::{parse_expr, Env, Var};
use crate::costfn::CostFunction;
use crate::error::{Error, Result};
use crate::format::SCHEMA_VERSION;
use crate::lap::Sense;
use quad::{find_root_bisect, gauss_legendre};

/// Step of the default central-difference derivative.
pub const DERIVATIVE_STEP: f64 = 1e-6;
/// Tolerance of the concavity/convexity check.
pub const SHAPE_TOL: f64 = 1e-6;
/// Points in the bracketing scan of `(0, 1)`.
pub const BRACKET_POINTS: usize = 1024;
/// Tolerance of both certificate conditions.
pub const CERTIFICATE_TOL: f64 = 1e-9;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which Fréchet bound attains the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extremal {
    /// `M(x, y) = min(x, y)`, support on the diagonal.
    M,
    /// `W(x, y) = max(x + y − 1, 0)`, support on the antidiagonal.
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneSolution {
    pub value: f64,
    pub copula: Extremal,
}

/// Central-difference mixed derivative with step `h`.
pub fn cross_derivative(c: &CostFunction, x: f64, y: f64, h: f64) -> f64 {
    (c.eval(x + h, y + h) - c.eval(x + h, y - h) - c.eval(x - h, y + h) + c.eval(x - h, y - h)) / (4.0 * h * h)
}

/// Verifies `∂²c/∂x∂y > 0` on the interior lattice `{k/18 : k = 1..17}²`.
pub fn check_positive_cross_derivative(c: &CostFunction) -> Result<()> {
    const H: f64 = 1e-4;
    for a in 1..=17 {
        for b in 1..=17 {
            let (x, y) = (a as f64 / 18.0, b as f64 / 18.0);
            let value = cross_derivative(c, x, y, H);
            if !(value > 0.0) {
                return Err(Error::CrossDerivative { x, y, value });
            }
        }
    }
    Ok(())
}

/// Optimum over all copulas for a cost with positive mixed derivative:
/// `∫ c(x, x) dx` (max, attained by M) or `∫ c(x, 1 − x) dx` (min, by W).
///
/// The mixed-derivative hypothesis is checked numerically whether or not
/// the cost's flag claims it.
pub fn solve_monotone(c: &CostFunction, sense: Sense, quad_nodes: usize) -> Result<MonotoneSolution> {
    check_positive_cross_derivative(c)?;
    let rule = gauss_legendre(quad_nodes)?;
    Ok(match sense {
        Sense::Max => MonotoneSolution {
            value: rule.integrate(0.0, 1.0, |x| c.eval(x, x)),
            copula: Extremal::M,
        },
        Sense::Min => MonotoneSolution {
            value: rule.integrate(0.0, 1.0, |x| c.eval(x, 1.0 - x)),
            copula: Extremal::W,
        },
    })
}

/// `φ` on `[0, 2]`, concave on `[0, k)` and convex on `(k, 2]`.
#[derive(Clone)]
pub struct PhiSpec {
    name: String,
    phi: ScalarFn,
    dphi: Option<ScalarFn>,
    inflection: f64,
}

impl std::fmt::Debug for PhiSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhiSpec")
            .field("name", &self.name)
            .field("inflection", &self.inflection)
            .field("exact_derivative", &self.dphi.is_some())
            .finish()
    }
}

impl PhiSpec {
    pub fn new<F>(name: impl Into<String>, phi: F, inflection: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PhiSpec {
            name: name.into(),
            phi: Arc::new(phi),
            dphi: None,
            inflection,
        }
    }

    pub fn with_derivative<F>(mut self, dphi: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.dphi = Some(Arc::new(dphi));
        self
    }

    pub fn with_inflection(mut self, inflection: f64) -> Self {
        self.inflection = inflection;
        self
    }

    /// `φ(z) = sin(πz)` with its exact derivative, inflection at 1.
    pub fn sine() -> Self {
        use std::f64::consts::PI;
        PhiSpec::new("sin(pi*z)", |z| (PI * z).sin(), 1.0).with_derivative(|z| PI * (PI * z).cos())
    }

    /// Parses `φ` as an expression in `z`; the derivative is numeric.
    pub fn parse(text: &str, inflection: f64) -> Result<Self> {
        let tree = Arc::new(parse_expr(text, &[Var::Z])?);
        Ok(PhiSpec::new(text, move |z| tree.eval(&Env { x: 0.0, y: 0.0, z }), inflection))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inflection(&self) -> f64 {
        self.inflection
    }

    #[inline]
    pub fn phi(&self, z: f64) -> f64 {
        (self.phi)(z)
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.dphi.is_some()
    }

    pub fn derivative(&self, z: f64) -> f64 {
        match &self.dphi {
            Some(d) => d(z),
            None => central_difference(&self.phi, z, DERIVATIVE_STEP),
        }
    }

    /// Second divided difference, stencil kept inside `[0, 2]`.
    pub fn second_difference(&self, z: f64) -> f64 {
        const H: f64 = 1e-3;
        let z = z.clamp(H, 2.0 - H);
        (self.phi(z + H) - 2.0 * self.phi(z) + self.phi(z - H)) / (H * H)
    }

    /// Zero of the second difference in `[lo, hi]`.
    pub fn locate_inflection(&self, lo: f64, hi: f64) -> Result<f64> {
        find_root_bisect(|z| self.second_difference(z), lo, hi, 1e-12).map(|r| r.x)
    }

    /// The cost `c(x, y) = φ(x + y)`.
    pub fn to_cost(&self) -> CostFunction {
        let phi = self.phi.clone();
        let flags = crate::costfn::CostFlags {
            positive_cross_derivative: false,
            separable_phi: true,
        };
        CostFunction::from_fn(format!("phi(x+y), phi(z) = {}", self.name), flags, vec![], move |x, y| phi(x + y))
    }

    /// Checks `k ∈ (0, 2)` and the sign of `φ″` on 256 points per side.
    pub fn validate(&self) -> Result<()> {
        let k = self.inflection;
        if !(k > 0.0 && k < 2.0) {
            return Err(Error::InvalidPhi(format!("inflection {} outside (0, 2)", k)));
        }
        const SAMPLES: usize = 256;
        for j in 0..SAMPLES {
            let z = k * j as f64 / SAMPLES as f64;
            let d2 = self.second_difference(z);
            if d2 > SHAPE_TOL {
                return Err(Error::InvalidPhi(format!("not concave at z = {}: phi'' ~ {}", z, d2)));
            }
        }
        for j in 1..=SAMPLES {
            let z = k + (2.0 - k) * j as f64 / SAMPLES as f64;
            let d2 = self.second_difference(z);
            if d2 < -SHAPE_TOL {
                return Err(Error::InvalidPhi(format!("not convex at z = {}: phi'' ~ {}", z, d2)));
            }
        }
        Ok(())
    }

    /// `g(β) = φ(2β) − φ(β) − βφ′(β)`.
    pub fn first_order_gap(&self, beta: f64) -> f64 {
        self.phi(2.0 * beta) - self.phi(beta) - beta * self.derivative(beta)
    }
}

fn central_difference(f: &ScalarFn, z: f64, h: f64) -> f64 {
    (f(z + h) - f(z - h)) / (2.0 * h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `Γ(x) = β − x` on `[0, β)`, `x` on `[β, 1]`.
    Shuffle,
    /// No root in `(0, 1)`: `(U, 1 − U)` is optimal.
    Antidiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UckelmannSolution {
    pub beta: Option<f64>,
    pub value: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UckelmannRecord {
    pub schema: u32,
    pub beta: Option<f64>,
    pub value: f64,
    pub branch: Branch,
}

impl UckelmannSolution {
    pub fn support_map(&self, x: f64) -> f64 {
        match (self.branch, self.beta) {
            (Branch::Shuffle, Some(b)) if x < b => b - x,
            (Branch::Shuffle, _) => x,
            (Branch::Antidiagonal, _) => 1.0 - x,
        }
    }

    pub fn to_record(&self) -> UckelmannRecord {
        UckelmannRecord {
            schema: SCHEMA_VERSION,
            beta: self.beta,
            value: self.value,
            branch: self.branch,
        }
    }
}

/// Validates `spec`, then solves. See [`solve_uckelmann_unchecked`].
pub fn solve_uckelmann(spec: &PhiSpec, tol: f64) -> Result<UckelmannSolution> {
    spec.validate()?;
    solve_uckelmann_unchecked(spec, tol)
}

/// Brackets the first sign change of `g(β)` on a 1024-point scan of
/// `(0, 1)` and bisects it. Without a sign change the antidiagonal
/// coupling is returned with value `φ(1)`.
pub fn solve_uckelmann_unchecked(spec: &PhiSpec, tol: f64) -> Result<UckelmannSolution> {
    let g = |b: f64| spec.first_order_gap(b);
    let step = 1.0 / BRACKET_POINTS as f64;
    let mut bracket = None;
    let mut prev = (step, g(step));
    for j in 2..BRACKET_POINTS {
        let b = j as f64 * step;
        let gb = g(b);
        if !gb.is_finite() {
            return Err(Error::NonFiniteValue(b));
        }
        if prev.1 == 0.0 {
            bracket = Some((prev.0, prev.0));
            break;
        }
        if gb.signum() != prev.1.signum() {
            bracket = Some((prev.0, b));
            break;
        }
        prev = (b, gb);
    }
    let Some((lo, hi)) = bracket else {
        return Ok(UckelmannSolution {
            beta: None,
            value: spec.phi(1.0),
            branch: Branch::Antidiagonal,
        });
    };
    let beta = if lo == hi { lo } else { find_root_bisect(g, lo, hi, tol)?.x };
    Ok(UckelmannSolution {
        beta: Some(beta),
        value: shuffle_value(spec, beta)?,
        branch: Branch::Shuffle,
    })
}

/// `βφ(β) + ∫_β^1 φ(2x) dx`.
fn shuffle_value(spec: &PhiSpec, beta: f64) -> Result<f64> {
    let rule = gauss_legendre(32)?;
    Ok(beta * spec.phi(beta) + rule.integrate_composite(beta, 1.0, 8, |x| spec.phi(2.0 * x)))
}

/// `H(α) = ∫_0^α c(x, α − x) dx + ∫_α^1 c(x, x) dx`, the objective of the
/// one-parameter family `Γ_α`.
pub fn h_alpha(c: &CostFunction, alpha: f64) -> Result<f64> {
    let rule = gauss_legendre(32)?;
    let left = rule.integrate_composite(0.0, alpha, 8, |x| c.eval(x, alpha - x));
    let right = rule.integrate_composite(alpha, 1.0, 8, |x| c.eval(x, x));
    Ok(left + right)
}

/// Lattice point where a certificate condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateViolation {
    pub x: f64,
    pub xi: f64,
    /// `|ψ − f|` on the diagonal, `ψ − f` off it.
    pub amount: f64,
    pub diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub pass: bool,
    pub grid: usize,
    pub beta: f64,
    /// Largest `|ψ_{Γ(x)}(x) − f(x)|`.
    pub worst_diagonal_gap: f64,
    /// Largest `ψ_{Γ(x)}(ξ) − f(ξ)`.
    pub worst_margin: f64,
    pub diagonal_violations: usize,
    pub inequality_violations: usize,
    /// Up to ten violations in scan order.
    pub violations: Vec<CertificateViolation>,
}

/// The potential `f` paired with the shuffle support.
pub fn certificate_potential(spec: &PhiSpec, beta: f64, xi: f64) -> f64 {
    let d = spec.derivative(beta);
    if xi < beta {
        xi * d
    } else {
        0.5 * (spec.phi(2.0 * xi) - spec.phi(2.0 * beta)) + beta * d
    }
}

/// `ψ_{Γ(x)}(ξ) = c(ξ, Γ(x)) + a(Γ(x))`.
pub fn certificate_psi(spec: &PhiSpec, beta: f64, x: f64, xi: f64) -> f64 {
    let d = spec.derivative(beta);
    if x < beta {
        spec.phi(beta - x + xi) + x * d - spec.phi(beta)
    } else {
        spec.phi(x + xi) - 0.5 * spec.phi(2.0 * x) - 0.5 * spec.phi(2.0 * beta) + beta * d
    }
}

/// Checks `ψ_{Γ(x)}(x) = f(x)` and `ψ_{Γ(x)}(ξ) ≤ f(ξ)` on
/// `{j/(grid−1)}²`, which places `(x, Γ(x))` in the c-subdifferential of `f`.
pub fn certify_uckelmann(spec: &PhiSpec, sol: &UckelmannSolution, grid: usize) -> Result<CertificateReport> {
    let beta = match (sol.branch, sol.beta) {
        (Branch::Shuffle, Some(b)) if b > 0.0 && b < 1.0 => b,
        _ => {
            return Err(Error::InvalidArgument(
                "certificate requires a shuffle solution with beta in (0, 1)".into(),
            ))
        }
    };
    if grid < 2 {
        return Err(Error::InvalidArgument("certificate grid must be >= 2".into()));
    }
    let pts: Vec<f64> = (0..grid).map(|j| j as f64 / (grid - 1) as f64).collect();
    let f: Vec<f64> = pts.iter().map(|&xi| certificate_potential(spec, beta, xi)).collect();
    let mut report = CertificateReport {
        pass: true,
        grid,
        beta,
        worst_diagonal_gap: 0.0,
        worst_margin: f64::NEG_INFINITY,
        diagonal_violations: 0,
        inequality_violations: 0,
        violations: Vec::new(),
    };
    for &x in &pts {
        let diag = (certificate_psi(spec, beta, x, x) - certificate_potential(spec, beta, x)).abs();
        report.worst_diagonal_gap = report.worst_diagonal_gap.max(diag);
        if diag >= CERTIFICATE_TOL {
            report.diagonal_violations += 1;
            if report.violations.len() < 10 {
                report.violations.push(CertificateViolation { x, xi: x, amount: diag, diagonal: true });
            }
        }
        for (k, &xi) in pts.iter().enumerate() {
            let margin = certificate_psi(spec, beta, x, xi) - f[k];
            report.worst_margin = report.worst_margin.max(margin);
            if margin > CERTIFICATE_TOL {
                report.inequality_violations += 1;
                if report.violations.len() < 10 {
                    report.violations.push(CertificateViolation { x, xi, amount: margin, diagonal: false });
                }
            }
        }
    }
    report.pass = report.diagonal_violations == 0 && report.inequality_violations == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costfn::registry_cost;
    use std::f64::consts::PI;

    const BETA: f64 = 0.7541996008265638;

    #[test]
    fn monotone_product() {
        let c = registry_cost("product").unwrap();
        let max = solve_monotone(&c, Sense::Max, 16).unwrap();
        assert!((max.value - 1.0 / 3.0).abs() < 1e-10);
        assert_eq!(max.copula, Extremal::M);
        let min = solve_monotone(&c, Sense::Min, 16).unwrap();
        assert!((min.value - 1.0 / 6.0).abs() < 1e-10);
        assert_eq!(min.copula, Extremal::W);
    }

    #[test]
    fn monotone_rejects_sin_sum() {
        let c = registry_cost("sin_sum").unwrap();
        assert!(matches!(solve_monotone(&c, Sense::Max, 16), Err(Error::CrossDerivative { .. })));
        assert!(matches!(
            solve_monotone(&registry_cost("abs_diff").unwrap(), Sense::Max, 16),
            Err(Error::CrossDerivative { .. })
        ));
    }

    #[test]
    fn sine_beta() {
        let sol = solve_uckelmann(&PhiSpec::sine(), 1e-16).unwrap();
        let beta = sol.beta.unwrap();
        assert!((beta - BETA).abs() < 1e-12, "{}", beta);
        assert!(PhiSpec::sine().first_order_gap(beta).abs() < 1e-10);
        let oracle = beta * (PI * beta).sin() - (1.0 - (2.0 * PI * beta).cos()) / (2.0 * PI);
        assert!((sol.value - oracle).abs() < 1e-12);
        assert!((sol.value - 0.3713).abs() < 1e-3);
    }

    #[test]
    fn parsed_phi_matches_closed_form_loosely() {
        let spec = PhiSpec::parse("sin(pi*z)", 1.0).unwrap();
        let sol = solve_uckelmann(&spec, 1e-16).unwrap();
        assert!((sol.beta.unwrap() - BETA).abs() < 1e-8);
        assert!(PhiSpec::parse("sin(pi*x)", 1.0).is_err());
    }

    #[test]
    fn concave_phi_is_invalid() {
        let spec = PhiSpec::new("-(z-1)^2", |z| -(z - 1.0) * (z - 1.0), 1.0);
        assert!(matches!(solve_uckelmann(&spec, 1e-14), Err(Error::InvalidPhi(_))));
        assert!(PhiSpec::sine().with_inflection(2.5).validate().is_err());
    }

    #[test]
    fn antidiagonal_branch() {
        // Concave almost everywhere; the convex tail on (1.9, 2] is too short.
        let spec = PhiSpec::new("(z-1.9)^3", |z: f64| (z - 1.9).powi(3), 1.9);
        spec.validate().unwrap();
        let sol = solve_uckelmann(&spec, 1e-14).unwrap();
        assert_eq!(sol.branch, Branch::Antidiagonal);
        assert_eq!(sol.beta, None);
        assert_eq!(sol.value, spec.phi(1.0));
        assert_eq!(sol.support_map(0.25), 0.75);
        assert!(certify_uckelmann(&spec, &sol, 8).is_err());
    }

    #[test]
    fn certificate_passes_for_sine() {
        let spec = PhiSpec::sine();
        let sol = solve_uckelmann(&spec, 1e-16).unwrap();
        let r = certify_uckelmann(&spec, &sol, 64).unwrap();
        assert!(r.pass, "{:?}", r);
        let r = certify_uckelmann(&spec, &sol, 2).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn record_json() {
        let sol = UckelmannSolution { beta: Some(0.5), value: 0.25, branch: Branch::Shuffle };
        assert_eq!(
            serde_json::to_string(&sol.to_record()).unwrap(),
            r#"{"schema":1,"beta":0.5,"value":0.25,"branch":"shuffle"}"#
        );
    }
}
