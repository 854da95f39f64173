//! Shared generators and floating-point oracles.
//!
//! The oracles evaluate T-SPEC envelopes straight from their parameters and
//! search suprema on dense grids; they never touch the piecewise-curve
//! machinery they are used to check.

#![allow(dead_code)]

use ebac_core::rational::{int, ratio, to_f64};
use ebac_core::{FlowClass, FlowMix, Rational, TSpec};
use proptest::prelude::*;

pub fn reference_catalog() -> Vec<TSpec> {
    vec![
        TSpec::new(int(29_000_000), int(1_000), int(700_000), int(38_000)).unwrap(),
        TSpec::new(int(7_000_000), int(1_000), int(700_000), int(368_000)).unwrap(),
        TSpec::new(int(300_000), int(15_000), int(30_000), int(38_000)).unwrap(),
    ]
}

pub fn reference_mix(counts: &[u64], delay: Rational) -> FlowMix {
    let classes = reference_catalog()
        .into_iter()
        .zip(counts)
        .map(|(s, n)| FlowClass::new(s, *n))
        .collect();
    FlowMix::new(classes, delay).unwrap()
}

/// `(p, M, r, b)` as floats.
#[derive(Clone, Copy, Debug)]
pub struct FSpec {
    pub p: f64,
    pub m: f64,
    pub r: f64,
    pub b: f64,
}

impl FSpec {
    pub fn of(spec: &TSpec) -> Self {
        FSpec {
            p: to_f64(spec.peak()),
            m: to_f64(spec.max_packet()),
            r: to_f64(spec.rate()),
            b: to_f64(spec.burst()),
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (self.p * t + self.m).min(self.r * t + self.b)
        }
    }

    pub fn gamma(&self) -> f64 {
        (self.b - self.m) / (self.p - self.r)
    }
}

/// Scalar evaluation of `Σ nᵢ·min(pᵢt + Mᵢ, rᵢt + bᵢ)`.
pub fn mix_at(classes: &[(FSpec, f64)], t: f64) -> f64 {
    classes.iter().map(|(s, n)| n * s.at(t)).sum()
}

pub fn float_classes(mix: &FlowMix) -> Vec<(FSpec, f64)> {
    mix.classes()
        .iter()
        .map(|c| (FSpec::of(&c.spec), c.count as f64))
        .collect()
}

/// Maximize `f` over `(0, hi]` on a uniform grid of `samples` points, then
/// refine twice around the best sample.
pub fn grid_sup(f: impl Fn(f64) -> f64, hi: f64, samples: usize) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = hi;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for _round in 0..3 {
        let step = (hi - lo) / samples as f64;
        for k in 1..=samples {
            let s = lo + step * k as f64;
            let v = f(s);
            if v > best.0 {
                best = (v, s);
            }
        }
        lo = (best.1 - step).max(0.0);
        hi = best.1 + step;
    }
    best
}

/// Minimum of `f` over `[0, hi]` on a uniform grid.
pub fn grid_inf(f: impl Fn(f64) -> f64, hi: f64, samples: usize) -> f64 {
    (0..=samples)
        .map(|k| f(hi * k as f64 / samples as f64))
        .fold(f64::INFINITY, f64::min)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

prop_compose! {
    /// Valid non-degenerate T-SPEC with integral parameters.
    pub fn arb_tspec()(r in 0i64..2_000, extra in 1i64..20_000, m in 0i64..2_000, slack in 0i64..20_000) -> TSpec {
        TSpec::new(int(r + extra), int(m), int(r), int(m + slack)).unwrap()
    }
}

prop_compose! {
    /// Positive rational delay in `(0, 20]` with millisecond granularity
    /// and some odd denominators.
    pub fn arb_delay()(n in 1i64..20_000, d in prop::sample::select(vec![1000i64, 999, 7, 1])) -> Rational {
        let v = ratio(n, d);
        if v > int(20) { ratio(n % 20 + 1, 1) } else { v }
    }
}

prop_compose! {
    pub fn arb_mix()(classes in prop::collection::vec((arb_tspec(), 0u64..50), 1..=5), pad in 1u64..50, delay in arb_delay()) -> FlowMix {
        let mut classes: Vec<FlowClass> = classes.into_iter().map(|(s, n)| FlowClass::new(s, n)).collect();
        if classes.iter().all(|c| c.count == 0) {
            classes[0].count = pad;
        }
        FlowMix::new(classes, delay).unwrap()
    }
}
