// Solving a small assignment problem in both senses and reading off the
// dual certificate.

use copula_transport::lap::brute_force_lap;
use copula_transport::{solve_lap, CostMatrix, Result, Sense};

pub fn run_example() -> Result<Vec<(Sense, Vec<usize>, f64)>> {
    let cost = CostMatrix::from_rows(vec![
        vec![7.0, 5.0, 9.0, 8.0],
        vec![6.0, 4.0, 3.0, 7.0],
        vec![5.0, 8.0, 1.0, 8.0],
        vec![7.0, 6.0, 9.0, 4.0],
    ])?;
    let mut out = Vec::new();
    for sense in [Sense::Min, Sense::Max] {
        let a = solve_lap(&cost, sense)?;
        let check = a.check_certificate(&cost);
        let brute = brute_force_lap(&cost, sense)?;
        println!("{}: sigma = {:?}, value = {}", sense, a.sigma, a.value);
        println!("  u = {:?}", a.row_potentials);
        println!("  v = {:?}", a.col_potentials);
        println!("  certificate passed = {}, gap = {:.1e}", check.passed(), check.duality_gap);
        println!("  brute force agrees = {}", brute.sigma == a.sigma && brute.value == a.value);
        out.push((sense, a.sigma, a.value));
    }
    Ok(out)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
