//! Property tests for the scalar activations and the batch kernels.

use celu::activation::{
    celu, celu_dalpha, celu_dx, celu_eval, check_scale_similarity, elu, elu_dx, relu,
};
use celu::batch::{map_activation, map_activation_inplace, map_activation_par, map_celu_eval};
use celu::{Activation, ShapeParam};
use proptest::prelude::*;

/// Spacing between `v` and the next representable number away from zero.
fn ulp(v: f64) -> f64 {
    let v = v.abs();
    f64::from_bits(v.to_bits() + 1) - v
}

fn alpha_strategy() -> impl Strategy<Value = ShapeParam> {
    (-4.0f64..=4.0).prop_map(|e| ShapeParam::new(2f64.powf(e)).unwrap())
}

fn wide_alpha() -> impl Strategy<Value = ShapeParam> {
    (-20.0f64..=20.0).prop_map(|e| ShapeParam::new(2f64.powf(e)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn positive_branch_is_identity(x in 0.0f64..1e6, alpha in wide_alpha()) {
        prop_assert_eq!(celu(x, alpha), x);
        prop_assert_eq!(celu_dx(x, alpha), 1.0);
        prop_assert_eq!(celu_dalpha(x, alpha), 0.0);
    }

    #[test]
    fn negative_range(x in -1e3f64..0.0, alpha in alpha_strategy()) {
        let a = alpha.get();
        let v = celu(x, alpha);
        prop_assert!(-a <= v && v <= 0.0);
        let u = x / a;
        // strict where exp(u) is neither saturated nor rounded to 1
        if (-30.0..=-1e-6).contains(&u) {
            prop_assert!(-a < v && v < 0.0, "x={x} alpha={a} v={v}");
        }
    }

    #[test]
    fn bounded_derivative(x in -50.0f64..50.0, alpha in alpha_strategy()) {
        let d = celu_dx(x, alpha);
        prop_assert!(d > 0.0 && d <= 1.0, "x={x} alpha={} dx={d}", alpha.get());
    }

    #[test]
    fn elu_derivative_exceeds_one_near_zero(alpha in 1.01f64..16.0, x in -1e-3f64..-1e-12) {
        let a = ShapeParam::new(alpha).unwrap();
        prop_assert!(elu_dx(x, a) > 1.0);
    }

    #[test]
    fn c1_at_zero(x in -1e-6f64..0.0, alpha in wide_alpha()) {
        let gap = (celu_dx(x, alpha) - 1.0).abs();
        // half an ulp of 1 from rounding 1 + (exp(u) - 1)
        prop_assert!(gap <= x.abs() / alpha.get() + f64::EPSILON / 2.0);
    }

    #[test]
    fn monotone(x1 in -100.0f64..100.0, x2 in -100.0f64..100.0, alpha in alpha_strategy()) {
        let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
        let (vl, vh) = (celu(lo, alpha), celu(hi, alpha));
        prop_assert!(vl <= vh);
        if hi - lo > 1e-6 * lo.abs().max(1.0) && lo / alpha.get() > -30.0 {
            prop_assert!(vl < vh, "lo={lo} hi={hi}");
        }
    }

    #[test]
    fn alpha_one_matches_elu_bitwise(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        let (c, e) = (celu(x, ShapeParam::ONE), elu(x, ShapeParam::ONE));
        prop_assert!(c.to_bits() == e.to_bits() || (c.is_nan() && e.is_nan()));
    }

    #[test]
    fn scale_similarity(
        x in -10.0f64..10.0,
        alpha in alpha_strategy(),
        c in (-10.0f64..=10.0).prop_map(|e| 2f64.powf(e)),
    ) {
        let d = check_scale_similarity(x, alpha, c).unwrap();
        let v = celu(x, alpha).abs();
        prop_assert!(d <= 4.0 * ulp(v + f64::EPSILON), "x={x} alpha={} c={c} d={d:e} v={v:e}", alpha.get());
    }

    #[test]
    fn scale_similarity_is_exact_for_powers_of_two(
        x in -10.0f64..10.0,
        alpha in alpha_strategy(),
        k in -10i32..=10,
    ) {
        prop_assert_eq!(check_scale_similarity(x, alpha, 2f64.powi(k)).unwrap(), 0.0);
    }

    #[test]
    fn relu_limit_bound(x in -1e3f64..1e3, alpha in wide_alpha()) {
        prop_assert!((celu(x, alpha) - relu(x)).abs() <= alpha.get());
    }

    #[test]
    fn identity_limit_bound(x in -3.0f64..0.0, alpha in (0.0f64..=20.0).prop_map(|e| ShapeParam::new(2f64.powf(e)).unwrap())) {
        let d = celu(x, alpha) - x;
        let bound = x * x / (2.0 * alpha.get());
        // the evaluated celu carries up to an ulp of x in rounding
        let slack = 2.0 * ulp(x);
        prop_assert!(d >= -slack, "x={x} d={d:e}");
        prop_assert!(d <= bound + slack, "x={x} d={d:e} bound={bound:e}");
    }

    #[test]
    fn dalpha_negative_and_bounded(x in -1e3f64..0.0, alpha in alpha_strategy()) {
        let u = x / alpha.get();
        let g = celu_dalpha(x, alpha);
        prop_assert!((-1.0..=0.0).contains(&g));
        if (-700.0..=-1e-7).contains(&u) {
            prop_assert!(g < 0.0, "u={u} g={g}");
        }
    }

    #[test]
    fn fused_matches_standalone(bits in any::<u64>(), alpha in wide_alpha()) {
        let x = f64::from_bits(bits);
        let ev = celu_eval(x, alpha);
        let same = |a: f64, b: f64| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan());
        prop_assert!(same(ev.value, celu(x, alpha)));
        prop_assert!(same(ev.dx, celu_dx(x, alpha)));
        prop_assert!(same(ev.dalpha, celu_dalpha(x, alpha)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn batch_matches_scalar(input in prop::collection::vec(-20.0f64..20.0, 0..300), alpha in alpha_strategy()) {
        for kind in [Activation::Elu, Activation::Celu, Activation::Relu] {
            let out = map_activation(&input, alpha, kind);
            let par = map_activation_par(&input, alpha, kind);
            let mut inplace = input.clone();
            map_activation_inplace(&mut inplace, alpha, kind);
            prop_assert_eq!(out.len(), input.len());
            for (i, &x) in input.iter().enumerate() {
                let s = kind.apply(x, alpha).to_bits();
                prop_assert_eq!(out[i].to_bits(), s);
                prop_assert_eq!(par[i].to_bits(), s);
                prop_assert_eq!(inplace[i].to_bits(), s);
            }
        }
        let ev = map_celu_eval(&input, alpha);
        prop_assert_eq!(ev.len(), input.len());
        for (i, &x) in input.iter().enumerate() {
            let s = celu_eval(x, alpha);
            prop_assert_eq!(ev.value[i].to_bits(), s.value.to_bits());
            prop_assert_eq!(ev.dx[i].to_bits(), s.dx.to_bits());
            prop_assert_eq!(ev.dalpha[i].to_bits(), s.dalpha.to_bits());
        }
    }
}
