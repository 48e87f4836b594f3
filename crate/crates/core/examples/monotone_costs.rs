// Costs with a positive cross derivative are maximized by the comonotone
// coupling and minimized by the countermonotone one.

use copula_transport::analytic::solve_monotone;
use copula_transport::grid::{bound, GridSpec, Mode};
use copula_transport::{parse_cost, registry_cost, Result, Sense};

pub struct Row {
    pub cost: String,
    pub max: f64,
    pub grid_max: f64,
    pub min: f64,
    pub grid_min: f64,
}

pub fn run_example() -> Result<Vec<Row>> {
    let costs = vec![
        registry_cost("product")?,
        parse_cost("exp(x*y)")?,
        parse_cost("-(x-y)^2")?,
    ];
    let spec = GridSpec::new(6, Mode::Midpoint);
    let mut out = Vec::new();
    println!("{:>10} {:>10} {:>10} {:>10} {:>10}", "cost", "max", "grid max", "min", "grid min");
    for c in &costs {
        let max = solve_monotone(c, Sense::Max, 64)?.value;
        let min = solve_monotone(c, Sense::Min, 64)?.value;
        let gmax = bound(c, &spec, Sense::Max)?.value;
        let gmin = bound(c, &spec, Sense::Min)?.value;
        let name = c.source().to_string();
        println!("{:>10} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", name, max, gmax, min, gmin);
        out.push(Row { cost: name, max, grid_max: gmax, min, grid_min: gmin });
    }
    Ok(out)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
