//! Checks the analytic CELU derivatives against central differences, first for
//! the scalar function and then for every parameter of a small network.
//!
//! ```bash
//! cargo run -p celu --example gradient_check
//! ```

use celu::gradcheck::{check_celu_gradients, check_celu_gradients_with, GradCheckConfig};
use celu::train::{check_model_gradients, MlpModel, Task};
use celu::{Activation, ShapeParam};

fn main() -> celu::Result<()> {
    let report = check_celu_gradients(1000, 1, 1e-6)?;
    println!("scalar check over {} samples", report.samples);
    println!("  max rel err d/dx     {:e}", report.max_rel_err_dx);
    println!("  max rel err d/dalpha {:e}", report.max_rel_err_dalpha);
    println!("  worst (x, alpha)     {:?}", report.worst_input);
    println!("  passed               {}", report.passed);

    let narrow = check_celu_gradients_with(&GradCheckConfig {
        alpha_range: (1e-2, 1e-1),
        x_range: (-1.0, -0.01),
        ..GradCheckConfig::default()
    })?;
    println!("negative inputs, small alpha: max err {:e}", narrow.max_rel_err());

    for act in [Activation::Celu, Activation::Elu, Activation::Relu] {
        let model = MlpModel::init(&[1, 4, 1], act, ShapeParam::new(0.7)?, true, 11)?;
        let task = Task::sin2x(8, 11);
        let r = check_model_gradients(&model, &task.inputs, &task.targets, 1e-5)?;
        println!(
            "{act:>5} [1,4,1] network: {} parameters, max rel err {:e}, passed {}",
            r.params_checked, r.max_rel_err, r.passed
        );
    }
    Ok(())
}
