//! Evaluates ELU and CELU side by side, including the fused value/gradient
//! triple and a shifted CELU.
//!
//! ```bash
//! cargo run -p celu --example activation_basics
//! ```

use celu::activation::{celu, celu_eval, celu_shifted, elu, elu_dx, relu};
use celu::{ShapeParam, Shift};

fn main() -> celu::Result<()> {
    let alpha = ShapeParam::new(2.0)?;
    println!("alpha = {alpha}");
    println!("{:>6} {:>12} {:>12} {:>10} {:>12} {:>12}", "x", "elu", "celu", "elu'", "celu'", "dcelu/da");
    for x in [-4.0, -2.0, -1.0, -0.5, -1e-3, 0.0, 0.5, 2.0] {
        let ev = celu_eval(x, alpha);
        println!(
            "{x:>6} {:>12.6} {:>12.6} {:>10.6} {:>12.6} {:>12.6}",
            elu(x, alpha),
            ev.value,
            elu_dx(x, alpha),
            ev.dx,
            ev.dalpha
        );
    }

    // alpha = 1 is the one shared member of both families
    let x = -0.37;
    assert_eq!(celu(x, ShapeParam::ONE).to_bits(), elu(x, ShapeParam::ONE).to_bits());
    println!("\ncelu(-0.37, 1) == elu(-0.37, 1): {}", celu(x, ShapeParam::ONE));

    println!("\nsmall alpha approaches relu, large alpha approaches the identity:");
    for a in [1e-3, 0.1, 1.0, 10.0, 1e3] {
        let p = ShapeParam::new(a)?;
        println!(
            "  alpha {a:>7}: celu(-1.5) = {:>10.6}   relu(-1.5) = {}   identity = -1.5",
            celu(-1.5, p),
            relu(-1.5)
        );
    }

    let shift = Shift::new(0.5, -0.25)?;
    println!("\nshifted by (0.5, -0.25): celu_shifted(0.5, 1) = {}", celu_shifted(0.5, ShapeParam::ONE, shift));
    Ok(())
}
