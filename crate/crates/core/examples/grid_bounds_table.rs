// Midpoint-mode grid bounds for the three test costs, levels 2 through 7.
//
// Run with `cargo run --release --example grid_bounds_table`.

use copula_transport::grid::{bound_sequence, GridSpec, Mode};
use copula_transport::{registry_cost, Result, Sense};

pub fn run_example() -> Result<Vec<(u32, [f64; 3])>> {
    let names = ["sinsin", "sincos", "sin_recip_cos"];
    let template = GridSpec::new(2, Mode::Midpoint);
    let mut columns = Vec::new();
    for name in names {
        let c = registry_cost(name)?;
        columns.push(bound_sequence(&c, 2..=7, &template, Sense::Max)?);
    }
    println!("{:>3} {:>12} {:>12} {:>14}", "n", names[0], names[1], names[2]);
    let rows: Vec<(u32, [f64; 3])> = (0..columns[0].len())
        .map(|k| (columns[0][k].0, [columns[0][k].1, columns[1][k].1, columns[2][k].1]))
        .collect();
    for (n, v) in &rows {
        println!("{:>3} {:>12.4} {:>12.4} {:>14.4}", n, v[0], v[1], v[2]);
    }
    Ok(rows)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
