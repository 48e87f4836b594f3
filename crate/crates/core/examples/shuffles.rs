// Building a shuffle of M and integrating a cost against it.

use copula_transport::copula::{integrate_against_shuffle, validate_copula, Copula, Orientation, ShuffleOfM};
use copula_transport::{parse_cost, Result};

pub fn run_example() -> Result<(bool, f64)> {
    let shuffle = ShuffleOfM::new(
        vec![0.0, 0.2, 0.5, 1.0],
        vec![2, 0, 1],
        vec![Orientation::Diagonal, Orientation::Antidiagonal, Orientation::Diagonal],
    )?;
    println!("target slots: {:?}", shuffle.target_partition());
    for x in [0.1, 0.3, 0.45, 0.7] {
        println!("  Gamma({}) = {:.3}", x, shuffle.support_map(x));
    }
    println!("C(0.5, 0.5) = {:.4}", shuffle.cdf(0.5, 0.5));

    let report = validate_copula(&shuffle, 64);
    println!("copula axioms on a 64 x 64 lattice: pass = {}", report.pass);

    let sum = integrate_against_shuffle(&parse_cost("x + y")?, &shuffle, 16)?;
    let prod = integrate_against_shuffle(&parse_cost("x*y")?, &shuffle, 16)?;
    println!("int (x+y) = {:.12}, int xy = {:.6}", sum, prod);

    println!("{}", serde_json::to_string(&shuffle.to_record())?);
    Ok((report.pass, sum))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
