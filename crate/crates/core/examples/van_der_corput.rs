// Consecutive van der Corput terms: mean distance and the empirical copula
// of the pairs `(φ_b(n), φ_b(n+1))`.

use copula_transport::copula::empirical_copula;
use copula_transport::sequences::{
    avg_consecutive_distance, consecutive_distance_limit, consecutive_pairs, empirical_limit_average, VdcParams,
};
use copula_transport::{registry_cost, Result};

pub fn run_example() -> Result<Vec<(u64, f64, f64)>> {
    let mut rows = Vec::new();
    for b in [2u64, 3, 5, 10] {
        let d = avg_consecutive_distance(b, 100_000)?;
        let limit = consecutive_distance_limit(b);
        println!("base {:>2}: mean |phi(n+1) - phi(n)| = {:.6}  (limit {:.6})", b, d, limit);
        rows.push((b, d, limit));
    }

    let pairs = consecutive_pairs(&VdcParams::new(2, 1024))?;
    let emp = empirical_copula(&pairs, 4)?;
    println!("empirical copula of base-2 pairs at quarter nodes:");
    for a in 0..=4 {
        let row: Vec<String> = (0..=4).map(|b| format!("{:.4}", emp.at_node(a, b))).collect();
        println!("  {}", row.join(" "));
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let avg = empirical_limit_average(&xs, &ys, &registry_cost("product")?)?;
    println!("average of x*y along the pairs: {:.6}", avg);
    Ok(rows)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
