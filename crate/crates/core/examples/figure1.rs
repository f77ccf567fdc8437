//! Writes the four activation/derivative panels as CSV and SVG files and
//! checks their qualitative content.
//!
//! ```bash
//! cargo run -p celu --example figure1 -- target/figure1
//! ```

use std::fs::{self, File};
use std::path::PathBuf;

use celu::plot::{verify_figure, CurveGrid};
use celu::Activation;

fn main() -> celu::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/figure1"));
    fs::create_dir_all(&dir)?;

    let mut grids = Vec::new();
    for act in [Activation::Elu, Activation::Celu] {
        let grid = CurveGrid::figure_default(act)?;
        grid.write_csv(File::create(dir.join(format!("{act}.csv")))?)?;
        grid.write_svg(File::create(dir.join(format!("{act}.svg")))?)?;
        println!("wrote {act}.csv and {act}.svg ({} rows)", grid.rows().len());
        grids.push(grid);
    }

    let report = verify_figure(grids[0].rows(), grids[1].rows(), &[0.25, 0.5, 2.0, 4.0])?;
    for j in &report.elu_jumps {
        println!(
            "elu  alpha {:>4}: derivative jumps by {:.4} at 0 (|alpha - 1| = {:.4})",
            j.alpha, j.measured, j.expected
        );
    }
    println!(
        "celu: {} samples off the |dx - 1| <= |x|/alpha envelope, {} outside (0, 1]",
        report.celu_near_one_violations, report.celu_dx_out_of_range
    );
    println!("files in {}", dir.display());
    Ok(())
}
