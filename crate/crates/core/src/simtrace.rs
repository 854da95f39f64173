//! Discrete-time fluid simulation of regulated sources feeding a FIFO
//! constant-rate server.
//!
//! Time is sampled on the lattice `k·dt`. A trace stores the cumulative
//! amount of data `R(k·dt)`; the server output follows
//! `out(k) = min(in(k), out(k−1) + rate·dt)`. All arithmetic is exact.

use alloc::vec::Vec;
use core::cmp::max;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::admission::LinkConfig;
use crate::bandwidth::{aggregate_buffer, aggregate_eb, FlowMix};
use crate::curve::{horizontal_deviation, vertical_deviation, PiecewiseCurve, Shape};
use crate::error::{BandwidthError, SimError};
use crate::rational::{Extended, Rational};

/// Cumulative arrivals or departures sampled every `dt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    dt: Rational,
    cumulative: Vec<Rational>,
}

impl Trace {
    /// `cumulative[0]` must be 0 and the samples non-decreasing.
    pub fn new(dt: Rational, cumulative: Vec<Rational>) -> Result<Self, SimError> {
        if !dt.is_positive() {
            return Err(SimError::NonPositiveStep);
        }
        let starts_at_zero = cumulative.first().is_some_and(|v| v.is_zero());
        if !starts_at_zero || cumulative.windows(2).any(|w| w[1] < w[0]) {
            return Err(SimError::InvalidTrace);
        }
        Ok(Trace { dt, cumulative })
    }

    pub fn dt(&self) -> &Rational {
        &self.dt
    }

    pub fn samples(&self) -> &[Rational] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn time_at(&self, k: usize) -> Rational {
        &self.dt * Rational::from_integer(BigInt::from(k))
    }

    /// Sample-wise sum of two traces on the same lattice, truncated to the
    /// shorter one.
    pub fn merge(&self, other: &Trace) -> Result<Trace, SimError> {
        if self.dt != other.dt {
            return Err(SimError::InvalidTrace);
        }
        let cumulative = self
            .cumulative
            .iter()
            .zip(&other.cumulative)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Trace {
            dt: self.dt.clone(),
            cumulative,
        })
    }
}

fn steps_in(horizon: &Rational, dt: &Rational) -> Result<usize, SimError> {
    if !dt.is_positive() {
        return Err(SimError::NonPositiveStep);
    }
    if horizon.is_negative() {
        return Err(SimError::NegativeHorizon);
    }
    let q = horizon / dt;
    Ok(q.numer().div_floor(q.denom()).to_usize().unwrap_or(usize::MAX))
}

/// The greedy source `R(k·dt) = α(k·dt)`: it sends as much as `α` allows at
/// every instant, which is the worst case for concave envelopes.
pub fn greedy_source(alpha: &PiecewiseCurve, horizon: &Rational, dt: &Rational) -> Result<Trace, SimError> {
    if alpha.shape() != Shape::ConcaveMin {
        return Err(crate::error::CurveError::Unsupported("greedy source needs a concave arrival curve").into());
    }
    let steps = steps_in(horizon, dt)?;
    let cumulative = (0..=steps)
        .map(|k| alpha.value(&(dt * Rational::from_integer(BigInt::from(k)))))
        .collect();
    Ok(Trace {
        dt: dt.clone(),
        cumulative,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conformance {
    Pass,
    /// First pair of sample indices `s < t` with `R(t) − R(s) > α(t − s)`,
    /// scanning by `t` then `s`.
    Violation {
        s: usize,
        t: usize,
    },
}

impl Conformance {
    pub fn passed(&self) -> bool {
        matches!(self, Conformance::Pass)
    }
}

/// Check `R(t) − R(s) ≤ α(t − s)` on every pair of samples.
pub fn conformance_check(trace: &Trace, alpha: &PiecewiseCurve) -> Conformance {
    let lags: Vec<Rational> = (0..trace.len()).map(|k| alpha.value(&trace.time_at(k))).collect();
    let r = &trace.cumulative;
    for t in 1..r.len() {
        for s in 0..t {
            if &r[t] - &r[s] > lags[t - s] {
                return Conformance::Violation { s, t };
            }
        }
    }
    Conformance::Pass
}

/// Outcome of pushing a trace through a constant-rate server.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerRun {
    pub output: Trace,
    pub max_backlog: Rational,
    /// Largest lattice delay `min{j·dt : out(k+j) ≥ in(k)}`. Samples still
    /// queued at the end of the horizon contribute the time they have
    /// waited so far.
    pub max_virtual_delay: Rational,
    /// Samples whose data had not left by the end of the horizon.
    pub unresolved: usize,
    /// First step at which the backlog exceeded the buffer capacity, if any.
    pub first_overflow: Option<usize>,
}

/// Work-conserving fluid FIFO server. Overflow against `buffer_cap` is
/// reported, never dropped.
pub fn fifo_server(
    trace: &Trace,
    service_rate: &Rational,
    buffer_cap: Option<&Rational>,
) -> Result<ServerRun, SimError> {
    if !service_rate.is_positive() {
        return Err(SimError::NonPositiveRate);
    }
    let input = &trace.cumulative;
    let per_step = service_rate * &trace.dt;

    let mut output = Vec::with_capacity(input.len());
    let mut max_backlog = Rational::zero();
    let mut first_overflow = None;
    for (k, arrived) in input.iter().enumerate() {
        let sent = match output.last() {
            None => arrived.clone(),
            Some(prev) => core::cmp::min(arrived.clone(), prev + &per_step),
        };
        let backlog = arrived - &sent;
        if let Some(cap) = buffer_cap {
            if first_overflow.is_none() && &backlog > cap {
                first_overflow = Some(k);
            }
        }
        max_backlog = max(max_backlog, backlog);
        output.push(sent);
    }

    // Both sequences are non-decreasing, so the departure index only moves
    // forward.
    let mut max_steps = 0usize;
    let mut unresolved = 0usize;
    let mut j = 0usize;
    for (k, arrived) in input.iter().enumerate() {
        j = j.max(k);
        while j < output.len() && &output[j] < arrived {
            j += 1;
        }
        if j == output.len() {
            unresolved += 1;
            max_steps = max_steps.max(output.len() - k);
        } else {
            max_steps = max_steps.max(j - k);
        }
    }
    let max_virtual_delay = &trace.dt * Rational::from_integer(BigInt::from(max_steps));

    Ok(ServerRun {
        output: Trace {
            dt: trace.dt.clone(),
            cumulative: output,
        },
        max_backlog,
        max_virtual_delay,
        unresolved,
        first_overflow,
    })
}

/// Measured versus analytic backlog and delay for one scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimReport {
    pub dt: Rational,
    pub horizon: Rational,
    pub service_rate: Rational,
    pub delay_constraint: Rational,
    pub max_backlog: Rational,
    pub max_virtual_delay: Rational,
    /// Backlog the analysis guarantees at this rate.
    pub analytic_backlog_bound: Extended,
    /// Delay the analysis guarantees at this rate.
    pub analytic_delay_bound: Extended,
    pub unresolved: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundViolation {
    /// `max_virtual_delay > D + dt`.
    Delay { measured: Rational, limit: Rational },
    /// `max_backlog > bound + rate·dt`.
    Backlog { measured: Rational, limit: Extended },
}

impl SimReport {
    pub fn violations(&self) -> Vec<BoundViolation> {
        let mut found = Vec::new();
        let delay_limit = &self.delay_constraint + &self.dt;
        if self.max_virtual_delay > delay_limit {
            found.push(BoundViolation::Delay {
                measured: self.max_virtual_delay.clone(),
                limit: delay_limit,
            });
        }
        let slack = &self.service_rate * &self.dt;
        let backlog_limit = self.analytic_backlog_bound.add(&Extended::Finite(slack));
        if Extended::Finite(self.max_backlog.clone()) > backlog_limit {
            found.push(BoundViolation::Backlog {
                measured: self.max_backlog.clone(),
                limit: backlog_limit,
            });
        }
        found
    }

    pub fn holds(&self) -> bool {
        self.violations().is_empty()
    }
}

/// `min(Γ₁, D)/100`, ignoring zero breakpoints.
pub fn default_step(mix: &FlowMix) -> Rational {
    let hundred = Rational::from_integer(BigInt::from(100));
    let first_gamma = mix
        .classes()
        .iter()
        .filter(|c| c.count > 0)
        .map(|c| c.spec.gamma())
        .filter(|g| g.is_positive())
        .min();
    match first_gamma {
        Some(g) if &g < mix.delay() => g / hundred,
        _ => mix.delay() / hundred,
    }
}

/// `3·max(τ_{I+1}, Γᵢ) + D`.
pub fn default_horizon(mix: &FlowMix) -> Result<Rational, SimError> {
    let profile = aggregate_eb(mix)?;
    let flattening = profile
        .flattening_delay()
        .finite()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let longest = mix.classes().iter().map(|c| c.spec.gamma()).fold(flattening, max);
    Ok(longest * Rational::from_integer(BigInt::from(3)) + mix.delay())
}

/// Drive the greedy aggregate of `mix` through a server at `service_rate`.
/// The delay target is the mix's delay constraint.
pub fn run_at_rate(
    mix: &FlowMix,
    service_rate: &Rational,
    dt: &Rational,
    horizon: &Rational,
) -> Result<SimReport, SimError> {
    let alpha = mix.aggregate_curve();
    let trace = greedy_source(&alpha, horizon, dt)?;
    let run = fifo_server(&trace, service_rate, None)?;
    let beta = PiecewiseCurve::constant_rate(service_rate.clone())?;
    Ok(SimReport {
        dt: dt.clone(),
        horizon: horizon.clone(),
        service_rate: service_rate.clone(),
        delay_constraint: mix.delay().clone(),
        max_backlog: run.max_backlog,
        max_virtual_delay: run.max_virtual_delay,
        analytic_backlog_bound: vertical_deviation(&alpha, &beta)?,
        analytic_delay_bound: horizontal_deviation(&alpha, &beta)?,
        unresolved: run.unresolved,
    })
}

/// Serve the mix at its aggregate effective bandwidth and measure.
///
/// `link` supplies the delay constraint; the mix's own delay is replaced by
/// it. Bound violations are reported through [`SimReport::violations`].
pub fn validate_scenario(
    mix: &FlowMix,
    link: &LinkConfig,
    dt: Option<&Rational>,
    horizon: Option<&Rational>,
) -> Result<SimReport, SimError> {
    let mix = mix.with_delay(link.delay().clone())?;
    let rate = aggregate_eb(&mix)?
        .selected_eb
        .into_finite()
        .ok_or(BandwidthError::UnboundedRate)?;
    if !rate.is_positive() {
        return Err(SimError::NonPositiveRate);
    }
    let dt = dt.cloned().unwrap_or_else(|| default_step(&mix));
    let horizon = match horizon {
        Some(h) => h.clone(),
        None => default_horizon(&mix)?,
    };
    let mut report = run_at_rate(&mix, &rate, &dt, &horizon)?;
    // At the EB rate the analytic backlog is the provisioned shared buffer.
    report.analytic_backlog_bound = Extended::Finite(aggregate_buffer(&mix)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::TSpec;
    use crate::rational::{int, ratio};
    use crate::FlowClass;
    use alloc::vec;

    #[test]
    fn trace_validation() {
        assert_eq!(Trace::new(int(0), vec![int(0)]), Err(SimError::NonPositiveStep));
        assert_eq!(Trace::new(int(1), vec![int(1)]), Err(SimError::InvalidTrace));
        assert_eq!(
            Trace::new(int(1), vec![int(0), int(2), int(1)]),
            Err(SimError::InvalidTrace)
        );
    }

    #[test]
    fn token_bucket_greedy_shape() {
        let alpha = PiecewiseCurve::token_bucket(int(2), int(10)).unwrap();
        let trace = greedy_source(&alpha, &int(3), &int(1)).unwrap();
        assert_eq!(trace.samples(), &[int(0), int(12), int(14), int(16)]);
        assert!(conformance_check(&trace, &alpha).passed());
    }

    #[test]
    fn doubled_greedy_violates() {
        let alpha = PiecewiseCurve::token_bucket(int(2), int(10)).unwrap();
        let doubled = alpha.scale(&int(2)).unwrap();
        let trace = greedy_source(&doubled, &int(3), &int(1)).unwrap();
        assert_eq!(conformance_check(&trace, &alpha), Conformance::Violation { s: 0, t: 1 });
    }

    #[test]
    fn convex_source_is_rejected() {
        let beta = PiecewiseCurve::constant_rate(int(1)).unwrap();
        assert!(greedy_source(&beta, &int(1), &int(1)).is_err());
    }

    #[test]
    fn constant_input_at_its_rate_never_queues() {
        let alpha = PiecewiseCurve::linear_arrival(int(5)).unwrap();
        let trace = greedy_source(&alpha, &int(10), &ratio(1, 4)).unwrap();
        let run = fifo_server(&trace, &int(5), None).unwrap();
        assert_eq!(run.max_backlog, int(0));
        assert_eq!(run.max_virtual_delay, int(0));
        assert_eq!(run.output, trace);
    }

    #[test]
    fn server_respects_rate_and_reports_overflow() {
        let trace = Trace::new(int(1), vec![int(0), int(10), int(10), int(10)]).unwrap();
        let run = fifo_server(&trace, &int(4), Some(&int(5))).unwrap();
        assert_eq!(run.output.samples(), &[int(0), int(4), int(8), int(10)]);
        assert_eq!(run.max_backlog, int(6));
        assert_eq!(run.first_overflow, Some(1));
        // Data of sample 1 fully leaves at step 3.
        assert_eq!(run.max_virtual_delay, int(2));
        assert_eq!(run.unresolved, 0);
        assert!(fifo_server(&trace, &int(0), None).is_err());
    }

    #[test]
    fn unresolved_samples_are_counted() {
        let trace = Trace::new(int(1), vec![int(0), int(10), int(20)]).unwrap();
        let run = fifo_server(&trace, &int(1), None).unwrap();
        assert_eq!(run.unresolved, 2);
        assert_eq!(run.max_virtual_delay, int(2));
    }

    #[test]
    fn single_class_scenario_holds() {
        let spec = TSpec::new(int(7_000_000), int(1_000), int(700_000), int(368_000)).unwrap();
        let mix = FlowMix::new(vec![FlowClass::new(spec, 2)], ratio(1, 10)).unwrap();
        let link = LinkConfig::new(int(100_000_000), ratio(1, 10)).unwrap();
        let report = validate_scenario(&mix, &link, Some(&ratio(1, 2000)), None).unwrap();
        assert!(report.holds(), "{:?}", report.violations());
        assert_eq!(report.analytic_delay_bound, Extended::Finite(ratio(1, 10)));
    }
}
