//! Shows that scaling the input and the shape parameter together only scales
//! the CELU output, while ELU has no such symmetry.
//!
//! ```bash
//! cargo run -p celu --example scale_similarity
//! ```

use celu::activation::{celu, check_scale_similarity, elu};
use celu::ShapeParam;

fn main() -> celu::Result<()> {
    let (x, alpha) = (-1.3, ShapeParam::new(0.8)?);
    println!("celu({x}, {alpha}) = {}", celu(x, alpha));
    println!("{:>8} {:>22} {:>14} {:>22}", "c", "celu(cx, ca) / c", "|difference|", "elu(cx, ca) / c");
    for c in [1.0 / 64.0, 0.1, 0.5, 1.0, 3.0, 10.0, 1000.0] {
        let scaled = ShapeParam::new(c * alpha.get())?;
        println!(
            "{c:>8.4} {:>22.16} {:>14.3e} {:>22.16}",
            celu(c * x, scaled) / c,
            check_scale_similarity(x, alpha, c)?,
            elu(c * x, scaled) / c
        );
    }
    Ok(())
}
