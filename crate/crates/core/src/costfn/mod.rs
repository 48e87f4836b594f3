//! Cost functions `c(x, y)` on the unit square.
//!
//! A [`CostFunction`] is either one of the built-in registry costs or a parsed
//! expression (see [`expr`] for the grammar). Both are immutable and can be
//! evaluated concurrently.

pub mod expr;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use expr::{Env, Var};

/// Coordinates at singular points are moved to this distance from the pole.
pub const SINGULAR_CLAMP: f64 = 1e-12;

/// Names accepted by [`registry_cost`].
pub const REGISTRY: &[&str] = &[
    "sin_sum",
    "sinsin",
    "sincos",
    "sin_recip_cos",
    "product",
    "abs_diff",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// A line `axis = at` on which the cost is not defined.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SingularLine {
    pub axis: Axis,
    pub at: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostFlags {
    /// `∂²c/∂x∂y > 0` is asserted by the constructor (not proven).
    pub positive_cross_derivative: bool,
    /// `c(x, y) = φ(x + y)` for some scalar `φ`.
    pub separable_phi: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostSource {
    Registry(&'static str),
    Expression(String),
}

impl fmt::Display for CostSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostSource::Registry(name) => write!(f, "{}", name),
            CostSource::Expression(text) => write!(f, "{}", text),
        }
    }
}

type Evaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Deterministic real-valued function on `[0,1]²`.
#[derive(Clone)]
pub struct CostFunction {
    source: CostSource,
    eval: Evaluator,
    flags: CostFlags,
    singular: Vec<SingularLine>,
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostFunction")
            .field("source", &self.source)
            .field("flags", &self.flags)
            .field("singular", &self.singular)
            .finish()
    }
}

impl CostFunction {
    /// Wraps an arbitrary closure. Singular lines are clamped before `f` is called.
    pub fn from_fn<F>(name: impl Into<String>, flags: CostFlags, singular: Vec<SingularLine>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let eval = clamped(singular.clone(), Arc::new(f));
        CostFunction {
            source: CostSource::Expression(name.into()),
            eval,
            flags,
            singular,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn source(&self) -> &CostSource {
        &self.source
    }

    pub fn flags(&self) -> CostFlags {
        self.flags
    }

    pub fn singular_lines(&self) -> &[SingularLine] {
        &self.singular
    }

    /// Whether `(x, y)` lies on a declared singular line.
    pub fn is_singular_at(&self, x: f64, y: f64) -> bool {
        self.singular.iter().any(|s| match s.axis {
            Axis::X => x == s.at,
            Axis::Y => y == s.at,
        })
    }

    /// Pointwise `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &CostFunction, b: f64) -> CostFunction {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut singular = self.singular.clone();
        for s in &other.singular {
            if !singular.contains(s) {
                singular.push(*s);
            }
        }
        CostFunction {
            source: CostSource::Expression(format!("{} * [{}] + {} * [{}]", a, self.source, b, other.source)),
            eval: Arc::new(move |x, y| a * f(x, y) + b * g(x, y)),
            flags: CostFlags::default(),
            singular,
        }
    }
}

fn clamped(singular: Vec<SingularLine>, f: Evaluator) -> Evaluator {
    if singular.is_empty() {
        return f;
    }
    Arc::new(move |mut x, mut y| {
        for s in &singular {
            match s.axis {
                Axis::X if (x - s.at).abs() < SINGULAR_CLAMP => x = s.at + SINGULAR_CLAMP,
                Axis::Y if (y - s.at).abs() < SINGULAR_CLAMP => y = s.at + SINGULAR_CLAMP,
                _ => {}
            }
        }
        f(x, y)
    })
}

/// Parses `text` as a cost in `x` and `y`.
pub fn parse_cost(text: &str) -> Result<CostFunction> {
    let tree = expr::parse_expr(text, &[Var::X, Var::Y])?;
    let singular: Vec<SingularLine> = tree
        .singular_vars()
        .into_iter()
        .filter_map(|v| match v {
            Var::X => Some(SingularLine { axis: Axis::X, at: 0.0 }),
            Var::Y => Some(SingularLine { axis: Axis::Y, at: 0.0 }),
            Var::Z => None,
        })
        .collect();
    let tree = Arc::new(tree);
    let eval = clamped(
        singular.clone(),
        Arc::new(move |x, y| tree.eval(&Env { x, y, z: 0.0 })),
    );
    Ok(CostFunction {
        source: CostSource::Expression(text.to_string()),
        eval,
        flags: CostFlags::default(),
        singular,
    })
}

/// Looks up a built-in cost by name.
pub fn registry_cost(name: &str) -> Result<CostFunction> {
    let (name, f, flags, singular): (&'static str, Evaluator, CostFlags, Vec<SingularLine>) = match name {
        "sin_sum" => (
            "sin_sum",
            Arc::new(|x, y| (PI * (x + y)).sin()),
            CostFlags {
                positive_cross_derivative: false,
                separable_phi: true,
            },
            vec![],
        ),
        "sinsin" => (
            "sinsin",
            Arc::new(|x: f64, y: f64| (PI * x).sin() * (PI * y).sin()),
            CostFlags::default(),
            vec![],
        ),
        "sincos" => (
            "sincos",
            Arc::new(|x: f64, y: f64| (PI * x).sin() * (PI * y).cos()),
            CostFlags::default(),
            vec![],
        ),
        "sin_recip_cos" => (
            "sin_recip_cos",
            Arc::new(|x: f64, y: f64| (PI / x).sin() * (PI * y).cos()),
            CostFlags::default(),
            vec![SingularLine { axis: Axis::X, at: 0.0 }],
        ),
        "product" => (
            "product",
            Arc::new(|x, y| x * y),
            CostFlags {
                positive_cross_derivative: true,
                separable_phi: false,
            },
            vec![],
        ),
        "abs_diff" => (
            "abs_diff",
            Arc::new(|x: f64, y: f64| (x - y).abs()),
            CostFlags::default(),
            vec![],
        ),
        other => return Err(Error::UnknownCost(other.to_string())),
    };
    Ok(CostFunction {
        source: CostSource::Registry(name),
        eval: clamped(singular.clone(), f),
        flags,
        singular,
    })
}

/// Expression text equivalent to each registry cost.
pub fn registry_expression(name: &str) -> Option<&'static str> {
    Some(match name {
        "sin_sum" => "sin(pi*(x+y))",
        "sinsin" => "sin(pi*x)*sin(pi*y)",
        "sincos" => "sin(pi*x)*cos(pi*y)",
        "sin_recip_cos" => "sin(pi/x)*cos(pi*y)",
        "product" => "x*y",
        "abs_diff" => "abs(x-y)",
        _ => return None,
    })
}

/// Resolves a command-line style selector: registry name or expression.
pub fn resolve(cost: Option<&str>, expr: Option<&str>) -> Result<CostFunction> {
    match (cost, expr) {
        (Some(name), None) => registry_cost(name),
        (None, Some(text)) => parse_cost(text),
        _ => Err(Error::InvalidArgument(
            "exactly one of --cost or --expr is required".into(),
        )),
    }
}
