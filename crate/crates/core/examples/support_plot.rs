// Writes SVG plots of the maximizing grid supports at level 10.

use std::path::PathBuf;

use copula_transport::grid::{bound, GridSpec, Mode};
use copula_transport::plot::{svg_scatter, PlotOptions};
use copula_transport::{registry_cost, Result, Sense};

pub fn run_example() -> Result<Vec<PathBuf>> {
    let dir = std::env::temp_dir().join("copula-transport-supports");
    std::fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    for name in ["sinsin", "sincos", "sin_recip_cos"] {
        let c = registry_cost(name)?;
        let b = bound(&c, &GridSpec::new(10, Mode::Midpoint), Sense::Max)?;
        let opts = PlotOptions {
            radius: Some(0.8),
            title: Some(format!("{}: bound {:.4}", name, b.value)),
            ..PlotOptions::default()
        };
        let path = dir.join(format!("{}.svg", name));
        std::fs::write(&path, svg_scatter(&b.coupling.support_points(), &opts))?;
        println!("wrote {}", path.display());
        written.push(path);
    }
    Ok(written)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
