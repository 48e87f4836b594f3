// c-cyclical monotonicity of grid supports, and what a failure looks like.

use copula_transport::grid::{bound, DiscreteCoupling, GridSpec, Mode};
use copula_transport::verify::{check_cyclical_monotonicity, check_doubly_stochastic, Convention, SupportSet};
use copula_transport::{registry_cost, Result, Sense};

pub fn run_example() -> Result<(bool, bool, bool)> {
    let product = registry_cost("product")?;
    let cost = |x: f64, y: f64| product.eval(x, y);
    let m = 16;
    let diagonal = DiscreteCoupling::new(4, (0..m).collect())?;
    let anti = DiscreteCoupling::new(4, (0..m).rev().collect())?;

    let diag_report = check_cyclical_monotonicity(&SupportSet::new(diagonal.support_points(), Sense::Max)?, cost, 4, 500, 1)?;
    let anti_report = check_cyclical_monotonicity(&SupportSet::new(anti.support_points(), Sense::Max)?, cost, 4, 500, 1)?;
    println!("product, max, diagonal support:     pass = {}", diag_report.pass);
    println!(
        "product, max, antidiagonal support: pass = {}, cycle {:?}, gain {:.4}",
        anti_report.pass, anti_report.violating_cycle, anti_report.worst_gap
    );

    let sincos = registry_cost("sincos")?;
    let optimum = bound(&sincos, &GridSpec::new(6, Mode::Midpoint), Sense::Max)?;
    let support = SupportSet::new(optimum.coupling.support_points(), Sense::Max)?;
    let r = check_cyclical_monotonicity(&support, |x, y| sincos.eval(x, y), 4, 2000, 7)?;
    let ds = check_doubly_stochastic(&optimum.coupling.to_matrix(), 0.0, Convention::Coupling)?;
    println!(
        "sincos optimum at n = 6: cyclical pass = {} ({} cycles), doubly stochastic = {}",
        r.pass, r.cycles_checked, ds.pass
    );
    Ok((diag_report.pass, anti_report.pass, r.pass && ds.pass))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
