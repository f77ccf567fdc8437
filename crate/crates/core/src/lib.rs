//! ELU and CELU activations with fused analytic gradients.
//!
//! CELU is `x` for `x >= 0` and `alpha * (exp(x / alpha) - 1)` otherwise. Unlike
//! ELU its derivative is continuous at the origin for every `alpha`, bounded by
//! one, and the family is closed under `(x, alpha) -> (c x, c alpha)`.
//!
//! - [`activation`]: scalar definitions, derivatives and the fused [`celu_eval`].
//! - [`batch`]: bit-exact elementwise kernels over slices and a throughput bench.
//! - [`gradcheck`]: central-difference oracle and the derivative-jump measurement.
//! - [`train`]: a small MLP with a trainable per-layer `alpha`.
//! - [`plot`]: sampled curves as CSV or SVG.
//! - [`cli`]: the `celu` command-line front end.
//!
//! ```
//! use celu::{activation, ShapeParam};
//!
//! let alpha = ShapeParam::new(2.0)?;
//! let ev = activation::celu_eval(-1.0, alpha);
//! assert_eq!(ev.value, activation::celu(-1.0, alpha));
//! assert!(ev.dx > 0.0 && ev.dx <= 1.0);
//! # Ok::<(), celu::Error>(())
//! ```
//!
//! [`celu_eval`]: activation::celu_eval

pub mod activation;
pub mod batch;
pub mod cli;
pub mod error;
pub mod gradcheck;
pub mod plot;
pub mod train;

pub use activation::{Activation, ActivationEval, ShapeParam, Shift};
pub use error::{Error, Result};
