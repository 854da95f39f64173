//! Effective bandwidth and equivalent capacity.
//!
//! * `e_D(α) = sup_{s≥0} α(s) / (s + D)`: the smallest constant service rate
//!   under which every bit of an `α`-constrained flow leaves within `D`.
//! * `f_B(α) = sup_{s>0} (α(s) − B) / s`: the smallest constant service rate
//!   under which the backlog never exceeds `B`.
//!
//! For a concave piecewise-linear `α` both ratios are monotone on every
//! affine piece, so the suprema are maxima over breakpoints plus the `0+`
//! jump and the long-run slope.

use alloc::vec::Vec;
use core::cmp::max;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::curve::{PiecewiseCurve, Shape, TSpec};
use crate::error::{BandwidthError, CurveError};
use crate::rational::{Extended, Rational};

fn require_concave(alpha: &PiecewiseCurve) -> Result<(), BandwidthError> {
    if alpha.shape() != Shape::ConcaveMin {
        return Err(CurveError::Unsupported("effective bandwidth needs a concave arrival curve").into());
    }
    Ok(())
}

/// Effective bandwidth `e_D(α)`.
pub fn effective_bandwidth(alpha: &PiecewiseCurve, delay: &Rational) -> Result<Extended, BandwidthError> {
    require_concave(alpha)?;
    if delay.is_negative() {
        return Err(BandwidthError::NegativeDelay(delay.clone()));
    }
    let origin = alpha.right_limit_at_zero();
    if delay.is_zero() {
        if origin.is_positive() {
            return Ok(Extended::Infinite);
        }
        // α(s)/s is largest at 0+, where it tends to the initial slope.
        return Ok(Extended::Finite(alpha.pieces()[0].slope().clone()));
    }
    let mut best = max(origin / delay, alpha.long_run_slope().clone());
    for x in alpha.breakpoints() {
        best = max(best, alpha.value(x) / (x + delay));
    }
    Ok(Extended::Finite(best))
}

/// Equivalent capacity `f_B(α)`; unbounded when `B < α(0+)`.
pub fn equivalent_capacity(alpha: &PiecewiseCurve, buffer: &Rational) -> Result<Extended, BandwidthError> {
    require_concave(alpha)?;
    if buffer.is_negative() {
        return Err(BandwidthError::NegativeBuffer(buffer.clone()));
    }
    let origin = alpha.right_limit_at_zero();
    if origin > buffer {
        return Ok(Extended::Infinite);
    }
    let mut best = alpha.long_run_slope().clone();
    if origin == buffer {
        best = max(best, alpha.pieces()[0].slope().clone());
    }
    for x in alpha.breakpoints() {
        best = max(best, (alpha.value(x) - buffer) / x);
    }
    Ok(Extended::Finite(best))
}

/// `sup_{s≥0} α(s) − rate·s` for `rate` at least the long-run slope of `α`.
fn peak_excess(alpha: &PiecewiseCurve, rate: &Rational) -> Rational {
    let mut best = max(Rational::zero(), alpha.right_limit_at_zero().clone());
    for x in alpha.breakpoints() {
        best = max(best, alpha.value(x) - rate * x);
    }
    best
}

/// Buffer `h(D) = sup_{s≥0} α(s) − e_D(α)·s` that a server running at the
/// effective bandwidth needs.
pub fn buffer_for_delay(alpha: &PiecewiseCurve, delay: &Rational) -> Result<Rational, BandwidthError> {
    let rate = effective_bandwidth(alpha, delay)?
        .into_finite()
        .ok_or(BandwidthError::UnboundedRate)?;
    Ok(peak_excess(alpha, &rate))
}

/// Delay `g(B) = sup_{s≥0} (α(s) − f_B(α)·s) / f_B(α)` experienced when a
/// buffer of size `B` is served at the equivalent capacity.
pub fn delay_for_buffer(alpha: &PiecewiseCurve, buffer: &Rational) -> Result<Rational, BandwidthError> {
    let rate = match equivalent_capacity(alpha, buffer)? {
        Extended::Infinite => return Ok(Rational::zero()),
        Extended::Finite(rate) => rate,
    };
    if rate.is_zero() {
        return Err(BandwidthError::ZeroRate);
    }
    Ok(peak_excess(alpha, &rate) / rate)
}

/// `n` flows of one T-SPEC type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlowClass {
    pub spec: TSpec,
    pub count: u64,
}

impl FlowClass {
    pub fn new(spec: TSpec, count: u64) -> Self {
        FlowClass { spec, count }
    }
}

/// Classes multiplexed into one FIFO queue under a shared delay constraint.
///
/// Classes are kept sorted by `(Γ, b, M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowMix {
    classes: Vec<FlowClass>,
    delay: Rational,
}

fn class_order(a: &TSpec, b: &TSpec) -> core::cmp::Ordering {
    a.gamma()
        .cmp(&b.gamma())
        .then_with(|| a.burst().cmp(b.burst()))
        .then_with(|| a.max_packet().cmp(b.max_packet()))
}

impl FlowMix {
    pub fn new(mut classes: Vec<FlowClass>, delay: Rational) -> Result<Self, BandwidthError> {
        if classes.is_empty() {
            return Err(BandwidthError::EmptyMix);
        }
        if delay.is_negative() {
            return Err(BandwidthError::NegativeDelay(delay));
        }
        classes.sort_by(|a, b| class_order(&a.spec, &b.spec));
        Ok(FlowMix { classes, delay })
    }

    /// Mix whose classes carry their own delay bounds; the shared constraint
    /// is the tightest of them.
    pub fn with_class_delays(classes: Vec<(FlowClass, Rational)>) -> Result<Self, BandwidthError> {
        let delay = classes
            .iter()
            .map(|(_, d)| d.clone())
            .min()
            .ok_or(BandwidthError::EmptyMix)?;
        FlowMix::new(classes.into_iter().map(|(c, _)| c).collect(), delay)
    }

    pub fn classes(&self) -> &[FlowClass] {
        &self.classes
    }

    pub fn delay(&self) -> &Rational {
        &self.delay
    }

    pub fn with_delay(&self, delay: Rational) -> Result<Self, BandwidthError> {
        FlowMix::new(self.classes.clone(), delay)
    }

    /// `α* = Σ nᵢ·αᵢ`.
    pub fn aggregate_curve(&self) -> PiecewiseCurve {
        aggregate_curve(self.classes.iter().map(|c| (&c.spec, c.count)))
    }

    pub fn total_rate(&self) -> Rational {
        weighted_sum(self.classes.iter().map(|c| (c.spec.rate(), c.count)))
    }
}

fn weighted_sum<'a>(terms: impl Iterator<Item = (&'a Rational, u64)>) -> Rational {
    terms.fold(Rational::zero(), |acc, (v, n)| {
        acc + v * Rational::from_integer(BigInt::from(n))
    })
}

pub(crate) fn aggregate_curve<'a>(classes: impl Iterator<Item = (&'a TSpec, u64)>) -> PiecewiseCurve {
    let mut sum: Option<PiecewiseCurve> = None;
    for (spec, count) in classes {
        let term = spec
            .curve()
            .scale(&Rational::from_integer(BigInt::from(count)))
            .expect("counts are non-negative");
        sum = Some(match sum {
            None => term,
            Some(acc) => acc.add(&term).expect("T-SPEC curves are concave"),
        });
    }
    sum.unwrap_or_else(|| PiecewiseCurve::linear_arrival(Rational::zero()).expect("zero curve"))
}

/// Candidate rates and regime thresholds of the closed-form aggregate EB.
///
/// Indices are 0-based: `candidates[0]` is the jump term `ΣnM/D`,
/// `candidates[j]` for `1 ≤ j ≤ I` is `α*(Γⱼ)/(Γⱼ + D)` at the `j`-th
/// smallest breakpoint, and `candidates[I+1]` is the long-run rate `Σnr`.
/// `thresholds[j]` is the delay at which the maximum moves from
/// `candidates[j]` to `candidates[j+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateEbProfile {
    pub candidates: Vec<Extended>,
    pub thresholds: Vec<Extended>,
    pub selected_eb: Extended,
    pub regime_index: usize,
}

impl AggregateEbProfile {
    /// The flattening delay `Σnb / Σnr` beyond which the EB equals `Σnr`.
    pub fn flattening_delay(&self) -> &Extended {
        &self.thresholds[self.thresholds.len() - 1]
    }

    pub fn long_run_rate(&self) -> &Rational {
        self.candidates[self.candidates.len() - 1]
            .finite()
            .expect("long-run rate is finite")
    }
}

/// Slope and intercept of the affine piece of `α*` that is active on
/// `[Γ_{k−1}, Γ_k]`: classes before `k` have switched to their sustained
/// piece, the rest are still on their peak piece.
struct AggregatePieces {
    slopes: Vec<Rational>,
    intercepts: Vec<Rational>,
    gammas: Vec<Rational>,
    packets: Rational,
    rates: Rational,
    bursts: Rational,
}

impl AggregatePieces {
    fn new(sorted: &[(&TSpec, u64)]) -> Self {
        let count = |n: u64| Rational::from_integer(BigInt::from(n));
        let packets = weighted_sum(sorted.iter().map(|(s, n)| (s.max_packet(), *n)));
        let peaks = weighted_sum(sorted.iter().map(|(s, n)| (s.peak(), *n)));
        let mut slopes = Vec::with_capacity(sorted.len());
        let mut intercepts = Vec::with_capacity(sorted.len());
        let mut slope = peaks;
        let mut intercept = packets.clone();
        for (spec, n) in sorted {
            slopes.push(slope.clone());
            intercepts.push(intercept.clone());
            let k = count(*n);
            slope -= (spec.peak() - spec.rate()) * &k;
            intercept += (spec.burst() - spec.max_packet()) * &k;
        }
        AggregatePieces {
            slopes,
            intercepts,
            gammas: sorted.iter().map(|(s, _)| s.gamma()).collect(),
            packets,
            rates: slope,
            bursts: intercept,
        }
    }

    fn value_at_gamma(&self, k: usize) -> Rational {
        &self.slopes[k] * &self.gammas[k] + &self.intercepts[k]
    }
}

fn ratio_or_infinite(numer: &Rational, denom: &Rational) -> Extended {
    if denom.is_zero() {
        if numer.is_zero() {
            Extended::zero()
        } else {
            Extended::Infinite
        }
    } else {
        Extended::Finite(numer / denom)
    }
}

/// `sorted` must be ordered by `(Γ, b, M)`.
pub(crate) fn aggregate_profile(
    sorted: &[(&TSpec, u64)],
    delay: &Rational,
) -> Result<AggregateEbProfile, BandwidthError> {
    if sorted.is_empty() {
        return Err(BandwidthError::EmptyMix);
    }
    if sorted.iter().all(|(_, n)| *n == 0) {
        return Err(BandwidthError::NoActiveClass);
    }
    if delay.is_negative() {
        return Err(BandwidthError::NegativeDelay(delay.clone()));
    }
    let agg = AggregatePieces::new(sorted);
    let classes = sorted.len();

    let jump = if delay.is_zero() {
        if agg.packets.is_positive() {
            Extended::Infinite
        } else {
            Extended::Finite(agg.slopes[0].clone())
        }
    } else {
        Extended::Finite(&agg.packets / delay)
    };

    let mut candidates = Vec::with_capacity(classes + 2);
    candidates.push(jump.clone());
    for k in 0..classes {
        let horizon = &agg.gammas[k] + delay;
        if horizon.is_zero() {
            candidates.push(jump.clone());
        } else {
            candidates.push(Extended::Finite(agg.value_at_gamma(k) / horizon));
        }
    }
    candidates.push(Extended::Finite(agg.rates.clone()));

    let mut thresholds: Vec<Extended> = (0..classes)
        .map(|k| ratio_or_infinite(&agg.intercepts[k], &agg.slopes[k]))
        .collect();
    thresholds.push(ratio_or_infinite(&agg.bursts, &agg.rates));

    let (regime_index, selected_eb) =
        candidates
            .iter()
            .enumerate()
            .fold((0, candidates[0].clone()), |(bi, best), (i, c)| {
                if *c > best {
                    (i, c.clone())
                } else {
                    (bi, best)
                }
            });

    Ok(AggregateEbProfile {
        candidates,
        thresholds,
        selected_eb,
        regime_index,
    })
}

pub(crate) fn aggregate_buffer_sorted(sorted: &[(&TSpec, u64)], delay: &Rational) -> Result<Rational, BandwidthError> {
    let profile = aggregate_profile(sorted, delay)?;
    let rate = profile.selected_eb.into_finite().ok_or(BandwidthError::UnboundedRate)?;
    let agg = AggregatePieces::new(sorted);
    let mut best = max(Rational::zero(), agg.packets.clone());
    for k in 0..sorted.len() {
        best = max(best, agg.value_at_gamma(k) - &rate * &agg.gammas[k]);
    }
    Ok(best)
}

fn sorted_view(mix: &FlowMix) -> Vec<(&TSpec, u64)> {
    mix.classes.iter().map(|c| (&c.spec, c.count)).collect()
}

/// Closed-form effective bandwidth of `Σ nᵢ·T-SPECᵢ` at the mix delay.
pub fn aggregate_eb(mix: &FlowMix) -> Result<AggregateEbProfile, BandwidthError> {
    aggregate_profile(&sorted_view(mix), &mix.delay)
}

/// Shared buffer `sup_{s≥0} α*(s) − e_D(α*)·s` evaluated over
/// `{0+, Γ₁, …, Γ_I}`.
pub fn aggregate_buffer(mix: &FlowMix) -> Result<Rational, BandwidthError> {
    aggregate_buffer_sorted(&sorted_view(mix), &mix.delay)
}

/// `(e_D(Σ αᵢ), Σ e_D(αᵢ))` for the arrival curves of `mixes`.
pub fn eb_subadditivity_gap(mixes: &[FlowMix], delay: &Rational) -> Result<(Extended, Extended), BandwidthError> {
    let curves: Vec<PiecewiseCurve> = mixes.iter().map(FlowMix::aggregate_curve).collect();
    let mut separate = Extended::zero();
    for curve in &curves {
        separate = separate.add(&effective_bandwidth(curve, delay)?);
    }
    let joint_curve = curves
        .iter()
        .skip(1)
        .try_fold(curves.first().cloned().ok_or(BandwidthError::EmptyMix)?, |acc, c| {
            acc.add(c)
        })?;
    Ok((effective_bandwidth(&joint_curve, delay)?, separate))
}
