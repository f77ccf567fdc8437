//! Measures the derivative jump at the origin and the largest local gain for
//! ELU and CELU over a ladder of shape parameters.
//!
//! ```bash
//! cargo run -p celu --example discontinuity
//! ```

use celu::gradcheck::{measure_celu_discontinuity, measure_elu_discontinuity};
use celu::train::gradient_magnitude_comparison;
use celu::ShapeParam;

fn main() -> celu::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>14} {:>14}", "alpha", "elu gap", "celu gap", "max elu gain", "max celu gain");
    for a in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let alpha = ShapeParam::new(a)?;
        let elu = measure_elu_discontinuity(alpha);
        let celu = measure_celu_discontinuity(alpha);
        let (elu_gain, celu_gain) = gradient_magnitude_comparison(alpha, 0);
        println!(
            "{a:>6} {:>12.3e} {:>12.3e} {:>14.6} {:>14.6}",
            elu.gap, celu.gap, elu_gain, celu_gain
        );
    }
    Ok(())
}
