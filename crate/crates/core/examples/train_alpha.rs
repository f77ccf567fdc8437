//! Trains the `[1, 16, 16, 1]` CELU network on `y = sin(2x)` with a learnable
//! per-layer alpha and compares the result against ELU and a frozen alpha.
//!
//! ```bash
//! cargo run -p celu --release --example train_alpha
//! ```

use celu::activation::Activation;
use celu::train::{self, MlpModel, TrainConfig, DEMO_LAYER_SIZES};
use celu::ShapeParam;

fn main() -> celu::Result<()> {
    let config = TrainConfig::new(2000, 0.05, 3)?;
    let runs = [
        (Activation::Celu, true),
        (Activation::Celu, false),
        (Activation::Elu, true),
        (Activation::Relu, false),
    ];

    println!("activation  trainable  initial    final      ratio   max-gain  alphas");
    for (act, trainable) in runs {
        let mut model = MlpModel::init(&DEMO_LAYER_SIZES, act, ShapeParam::ONE, trainable, 3)?;
        let trace = train::train(&mut model, &config)?;
        let max_gain = trace.max_gains.iter().copied().fold(0.0, f64::max);
        let alphas: Vec<String> = trace.final_alphas[..trace.final_alphas.len() - 1]
            .iter()
            .map(|a| format!("{a:.4}"))
            .collect();
        println!(
            "{:<11} {:<10} {:<10.5} {:<10.5} {:<7.3} {:<9.4} [{}]",
            act.name(),
            trainable,
            trace.initial_loss(),
            trace.final_loss,
            trace.loss_ratio(),
            max_gain,
            alphas.join(", ")
        );
    }
    Ok(())
}
