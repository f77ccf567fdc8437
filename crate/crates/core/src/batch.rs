//! Elementwise kernels over contiguous buffers.
//!
//! Every kernel produces, element for element, the same bits as the scalar
//! function in [`crate::activation`]. The activation kind is dispatched once per
//! call, not per element, so the inner loops are monomorphic and vectorizable
//! by the compiler where the target allows it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::activation::{self, Activation, ShapeParam};
use crate::error::{Error, Result};

/// Seed of the benchmark input buffer.
pub const BENCH_SEED: u64 = 0x5EED;

/// Benchmark inputs are drawn uniformly from `[-BENCH_RANGE, BENCH_RANGE]`.
pub const BENCH_RANGE: f64 = 4.0;

/// Chunk length used by the parallel kernels.
pub const PAR_CHUNK: usize = 1 << 14;

/// Batched [`activation::ActivationEval`]: three buffers of equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalBuffers {
    pub value: Vec<f64>,
    pub dx: Vec<f64>,
    pub dalpha: Vec<f64>,
}

impl EvalBuffers {
    pub fn with_len(len: usize) -> Self {
        EvalBuffers {
            value: vec![0.0; len],
            dx: vec![0.0; len],
            dalpha: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}

#[inline(always)]
fn map_with(input: &[f64], out: &mut [f64], f: impl Fn(f64) -> f64) {
    for (o, &x) in out.iter_mut().zip(input) {
        *o = f(x);
    }
}

#[inline(always)]
fn map_inplace_with(buf: &mut [f64], f: impl Fn(f64) -> f64) {
    for v in buf.iter_mut() {
        *v = f(*v);
    }
}

/// Writes `kind(input[i])` into `out[i]`.
///
/// # Panics
///
/// If the two slices differ in length.
pub fn map_activation_into(input: &[f64], out: &mut [f64], alpha: ShapeParam, kind: Activation) {
    assert_eq!(input.len(), out.len(), "input/output length mismatch");
    match kind {
        Activation::Elu => map_with(input, out, |x| activation::elu(x, alpha)),
        Activation::Celu => map_with(input, out, |x| activation::celu(x, alpha)),
        Activation::Relu => map_with(input, out, activation::relu),
        Activation::Linear => out.copy_from_slice(input),
    }
}

pub fn map_activation(input: &[f64], alpha: ShapeParam, kind: Activation) -> Vec<f64> {
    let mut out = vec![0.0; input.len()];
    map_activation_into(input, &mut out, alpha, kind);
    out
}

pub fn map_activation_inplace(buf: &mut [f64], alpha: ShapeParam, kind: Activation) {
    match kind {
        Activation::Elu => map_inplace_with(buf, |x| activation::elu(x, alpha)),
        Activation::Celu => map_inplace_with(buf, |x| activation::celu(x, alpha)),
        Activation::Relu => map_inplace_with(buf, activation::relu),
        Activation::Linear => {}
    }
}

/// Data-parallel [`map_activation`] over disjoint chunks of [`PAR_CHUNK`] elements.
pub fn map_activation_par(input: &[f64], alpha: ShapeParam, kind: Activation) -> Vec<f64> {
    let mut out = vec![0.0; input.len()];
    out.par_chunks_mut(PAR_CHUNK)
        .zip(input.par_chunks(PAR_CHUNK))
        .for_each(|(o, i)| map_activation_into(i, o, alpha, kind));
    out
}

/// Fused CELU value and derivatives for every element; one exponential per
/// negative element.
pub fn map_celu_eval(input: &[f64], alpha: ShapeParam) -> EvalBuffers {
    let mut out = EvalBuffers::with_len(input.len());
    map_celu_eval_into(input, &mut out, alpha);
    out
}

/// # Panics
///
/// If `out` does not hold exactly `input.len()` elements per buffer.
pub fn map_celu_eval_into(input: &[f64], out: &mut EvalBuffers, alpha: ShapeParam) {
    let n = input.len();
    assert!(
        out.value.len() == n && out.dx.len() == n && out.dalpha.len() == n,
        "eval buffers must match the input length"
    );
    let EvalBuffers { value, dx, dalpha } = out;
    for (i, &x) in input.iter().enumerate() {
        let ev = activation::celu_eval(x, alpha);
        value[i] = ev.value;
        dx[i] = ev.dx;
        dalpha[i] = ev.dalpha;
    }
}

/// Deterministic benchmark input: `n` samples uniform on `[-4, 4]`.
pub fn bench_input(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| rng.gen_range(-BENCH_RANGE..=BENCH_RANGE))
        .collect()
}

/// FNV-1a over the bit patterns of the buffer.
pub fn checksum(values: &[f64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    values.iter().fold(OFFSET, |h, v| {
        v.to_bits()
            .to_le_bytes()
            .iter()
            .fold(h, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub kind: Activation,
    pub n: usize,
    pub repeats: usize,
    pub median_ns_per_elem: f64,
    pub min_ns_per_elem: f64,
    pub max_ns_per_elem: f64,
    /// Checksum of the input buffer, identical for identical seeds.
    pub input_checksum: u64,
    /// Sum of the last output buffer; keeps the kernel from being optimized away.
    pub output_sum: f64,
}

pub fn throughput_bench(
    kind: Activation,
    alpha: ShapeParam,
    n: usize,
    repeats: usize,
) -> Result<BenchReport> {
    throughput_bench_seeded(kind, alpha, n, repeats, BENCH_SEED)
}

/// Times `repeats` passes of [`map_activation_into`] over an `n`-element buffer.
pub fn throughput_bench_seeded(
    kind: Activation,
    alpha: ShapeParam,
    n: usize,
    repeats: usize,
    seed: u64,
) -> Result<BenchReport> {
    if n == 0 {
        return Err(Error::InvalidConfig("benchmark length must be >= 1".into()));
    }
    if repeats == 0 {
        return Err(Error::InvalidConfig("benchmark repeats must be >= 1".into()));
    }

    let input = bench_input(n, seed);
    let mut out = vec![0.0; n];
    let mut per_elem = Vec::with_capacity(repeats);
    let mut output_sum = 0.0;
    for _ in 0..repeats {
        let start = Instant::now();
        map_activation_into(std::hint::black_box(&input), &mut out, alpha, kind);
        output_sum = std::hint::black_box(out.iter().sum::<f64>());
        let elapsed = start.elapsed().as_nanos() as f64;
        // clock granularity can report zero for tiny buffers
        per_elem.push(elapsed.max(1.0) / n as f64);
    }
    per_elem.sort_by(f64::total_cmp);

    let mid = per_elem.len() / 2;
    let median = if per_elem.len() % 2 == 1 {
        per_elem[mid]
    } else {
        0.5 * (per_elem[mid - 1] + per_elem[mid])
    };

    Ok(BenchReport {
        kind,
        n,
        repeats,
        median_ns_per_elem: median,
        min_ns_per_elem: per_elem[0],
        max_ns_per_elem: per_elem[per_elem.len() - 1],
        input_checksum: checksum(&input),
        output_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [Activation; 3] = [Activation::Elu, Activation::Celu, Activation::Relu];

    fn bits(v: &[f64]) -> Vec<u64> {
        v.iter().map(|x| x.to_bits()).collect()
    }

    #[test]
    fn empty_buffers() {
        let one = ShapeParam::ONE;
        assert!(map_activation(&[], one, Activation::Celu).is_empty());
        let mut empty: [f64; 0] = [];
        map_activation_inplace(&mut empty, one, Activation::Celu);
        assert!(map_celu_eval(&[], one).is_empty());
    }

    #[test]
    fn small_examples() {
        let one = ShapeParam::ONE;
        let out = map_activation(&[0.0, 1.0, -1.0], one, Activation::Celu);
        assert_eq!(out[0], 0.0);
        assert_eq!(out[1], 1.0);
        assert!((out[2] - -0.632_120_558_828_557_678_4).abs() < 1e-16);

        let elu = map_activation(&[-2.0], one, Activation::Elu);
        assert_eq!(elu[0].to_bits(), activation::elu(-2.0, one).to_bits());

        let mut buf = [0.5];
        map_activation_inplace(&mut buf, ShapeParam::new(2.0).unwrap(), Activation::Celu);
        assert_eq!(buf, [0.5]);

        let ev = map_celu_eval(&[1.0], ShapeParam::new(3.0).unwrap());
        assert_eq!((ev.value[0], ev.dx[0], ev.dalpha[0]), (1.0, 1.0, 0.0));
    }

    #[test]
    fn inplace_matches_out_of_place() {
        let alpha = ShapeParam::new(0.7).unwrap();
        let input = bench_input(1024, 11);
        for kind in Activation::ALL {
            let out = map_activation(&input, alpha, kind);
            let mut buf = input.clone();
            map_activation_inplace(&mut buf, alpha, kind);
            assert_eq!(bits(&out), bits(&buf), "{kind}");
        }
    }

    #[test]
    fn fused_eval_matches_scalar() {
        let alpha = ShapeParam::new(1.9).unwrap();
        let input = bench_input(4096, 12);
        let ev = map_celu_eval(&input, alpha);
        for (i, &x) in input.iter().enumerate() {
            let s = activation::celu_eval(x, alpha);
            assert_eq!(ev.value[i].to_bits(), s.value.to_bits());
            assert_eq!(ev.dx[i].to_bits(), s.dx.to_bits());
            assert_eq!(ev.dalpha[i].to_bits(), s.dalpha.to_bits());
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let alpha = ShapeParam::new(0.3).unwrap();
        let input = bench_input(3 * PAR_CHUNK + 17, 13);
        for kind in KINDS {
            assert_eq!(
                bits(&map_activation_par(&input, alpha, kind)),
                bits(&map_activation(&input, alpha, kind))
            );
        }
    }

    #[test]
    fn nan_propagates_through_kernels() {
        let out = map_activation(&[f64::NAN], ShapeParam::ONE, Activation::Relu);
        assert!(out[0].is_nan());
        let ev = map_celu_eval(&[f64::NAN], ShapeParam::ONE);
        assert!(ev.value[0].is_nan() && ev.dx[0].is_nan() && ev.dalpha[0].is_nan());
    }

    #[test]
    fn bench_input_is_deterministic_and_in_range() {
        let a = bench_input(1000, BENCH_SEED);
        let b = bench_input(1000, BENCH_SEED);
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(checksum(&a), checksum(&b));
        assert_ne!(checksum(&a), checksum(&bench_input(1000, BENCH_SEED + 1)));
        assert!(a.iter().all(|x| x.abs() <= BENCH_RANGE));
        assert!(a.iter().any(|&x| x < 0.0) && a.iter().any(|&x| x > 0.0));
    }

    #[test]
    fn bench_report_statistics() {
        let r = throughput_bench(Activation::Relu, ShapeParam::ONE, 1 << 16, 5).unwrap();
        assert!(r.min_ns_per_elem <= r.median_ns_per_elem);
        assert!(r.median_ns_per_elem <= r.max_ns_per_elem);
        assert!(r.median_ns_per_elem > 0.0);
        let r2 = throughput_bench(Activation::Celu, ShapeParam::ONE, 1 << 16, 2).unwrap();
        assert_eq!(r.input_checksum, r2.input_checksum);
        assert!(r2.median_ns_per_elem > 0.0);
    }

    #[test]
    fn bench_rejects_zero_sizes() {
        assert!(throughput_bench(Activation::Celu, ShapeParam::ONE, 0, 5).is_err());
        assert!(throughput_bench(Activation::Celu, ShapeParam::ONE, 10, 0).is_err());
    }
}
