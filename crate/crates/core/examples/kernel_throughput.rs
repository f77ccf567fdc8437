//! Times the batch kernels over a 2^20-element buffer, sequentially and with
//! the chunked parallel kernel.
//!
//! ```bash
//! cargo run -p celu --release --example kernel_throughput
//! ```

use std::time::Instant;

use celu::batch::{bench_input, map_activation_par, map_celu_eval, throughput_bench, BENCH_SEED};
use celu::{Activation, ShapeParam};

fn main() -> celu::Result<()> {
    let n = 1 << 20;
    let alpha = ShapeParam::ONE;
    println!("{:<8} {:>12} {:>12} {:>12}", "kernel", "median ns", "min ns", "max ns");
    for kind in [Activation::Relu, Activation::Elu, Activation::Celu] {
        let r = throughput_bench(kind, alpha, n, 9)?;
        println!(
            "{:<8} {:>12.4} {:>12.4} {:>12.4}",
            kind.name(),
            r.median_ns_per_elem,
            r.min_ns_per_elem,
            r.max_ns_per_elem
        );
    }

    let input = bench_input(n, BENCH_SEED);
    let start = Instant::now();
    let out = map_activation_par(&input, alpha, Activation::Celu);
    let par = start.elapsed();
    let start = Instant::now();
    let ev = map_celu_eval(&input, alpha);
    let fused = start.elapsed();
    println!(
        "parallel celu: {:.4} ns/elem, fused value+dx+dalpha: {:.4} ns/elem (checksums {:.6} {:.6})",
        par.as_nanos() as f64 / n as f64,
        fused.as_nanos() as f64 / n as f64,
        out.iter().sum::<f64>(),
        ev.dalpha.iter().sum::<f64>()
    );
    Ok(())
}
