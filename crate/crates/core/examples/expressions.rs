// Parsing cost expressions, including a custom `φ` for the `φ(x + y)` solver.

use copula_transport::analytic::{solve_uckelmann, PhiSpec};
use copula_transport::costfn::{registry_expression, REGISTRY};
use copula_transport::{parse_cost, registry_cost, Result};

pub fn run_example() -> Result<f64> {
    for name in REGISTRY {
        let text = registry_expression(name).unwrap_or("?");
        let a = registry_cost(name)?;
        let b = parse_cost(text)?;
        let diff = (a.eval(0.3, 0.6) - b.eval(0.3, 0.6)).abs();
        println!("{:<14} = {:<26} |registry - parsed| at (0.3, 0.6) = {:.1e}", name, text, diff);
    }

    let c = parse_cost("sin(pi/x)*cos(pi*y)")?;
    println!("singular lines of sin(pi/x)*cos(pi*y): {:?}", c.singular_lines());

    match parse_cost("sin(pi*(x+") {
        Err(e) => println!("parse error: {}", e),
        Ok(_) => println!("unexpectedly parsed"),
    }

    // A concave-convex phi with inflection at z = 1.
    let spec = PhiSpec::parse("(z-1)^3 - z", 1.0)?;
    let sol = solve_uckelmann(&spec, 1e-14)?;
    println!("phi(z) = {}: branch {:?}, beta {:?}, value {:.6}", spec.name(), sol.branch, sol.beta, sol.value);
    Ok(sol.value)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
