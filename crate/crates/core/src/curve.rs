//! Piecewise-linear curves and their min-plus algebra.
//!
//! Every curve is 0 at `t = 0` and may jump at `0+` to the value of its
//! first affine piece. A [`Shape::ConcaveMin`] curve is the minimum of its
//! pieces on `t > 0` (arrival curves: token buckets, T-SPECs and their sums).
//! A [`Shape::ConvexMax`] curve is `max(0, pieces)` on `t > 0` (service
//! curves: constant rate, rate-latency).
//!
//! Suprema between a concave and a convex curve are attained at breakpoints,
//! at the `0+` limit, or diverge with the long-run slopes, so every deviation
//! below is an exact finite enumeration.

use alloc::vec::Vec;
use core::cmp::{max, Ordering};

use num_traits::{Signed, Zero};

use crate::error::CurveError;
use crate::rational::{Extended, Rational};

/// `slope · t + intercept`, with `slope ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffinePiece {
    slope: Rational,
    intercept: Rational,
}

impl AffinePiece {
    pub fn new(slope: Rational, intercept: Rational) -> Result<Self, CurveError> {
        if slope.is_negative() {
            return Err(CurveError::NegativeSlope(slope));
        }
        Ok(AffinePiece { slope, intercept })
    }

    pub fn slope(&self) -> &Rational {
        &self.slope
    }

    pub fn intercept(&self) -> &Rational {
        &self.intercept
    }

    pub fn at(&self, t: &Rational) -> Rational {
        &self.slope * t + &self.intercept
    }

    /// Abscissa where the two lines meet. Slopes must differ.
    fn crossing(&self, other: &AffinePiece) -> Rational {
        (&other.intercept - &self.intercept) / (&self.slope - &other.slope)
    }

    fn scaled(&self, k: &Rational) -> AffinePiece {
        AffinePiece {
            slope: &self.slope * k,
            intercept: &self.intercept * k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `min` of the pieces on `t > 0`.
    ConcaveMin,
    /// `max(0, max of the pieces)` on `t > 0`.
    ConvexMax,
}

/// A normalized piecewise-linear curve.
///
/// Pieces are stored in the order they become active as `t` grows, so
/// `pieces[i]` is the curve on `[breakpoints[i-1], breakpoints[i]]` (with an
/// implicit leading breakpoint at 0). No stored piece is dominated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseCurve {
    shape: Shape,
    pieces: Vec<AffinePiece>,
    breakpoints: Vec<Rational>,
}

impl PiecewiseCurve {
    /// Lower envelope of `pieces`. Intercepts of the envelope must be ≥ 0.
    pub fn concave(pieces: Vec<AffinePiece>) -> Result<Self, CurveError> {
        if pieces.is_empty() {
            return Err(CurveError::Empty);
        }
        let curve = Self::normalize(Shape::ConcaveMin, pieces);
        let origin = curve.pieces[0].intercept.clone();
        if origin.is_negative() {
            return Err(CurveError::NegativeOrigin(origin));
        }
        Ok(curve)
    }

    /// Upper envelope of `pieces` and the zero line.
    pub fn convex(mut pieces: Vec<AffinePiece>) -> Result<Self, CurveError> {
        if pieces.is_empty() {
            return Err(CurveError::Empty);
        }
        pieces.push(AffinePiece {
            slope: Rational::zero(),
            intercept: Rational::zero(),
        });
        Ok(Self::normalize(Shape::ConvexMax, pieces))
    }

    /// `λ_R(t) = R·t`, as a service curve.
    pub fn constant_rate(rate: Rational) -> Result<Self, CurveError> {
        Self::convex(alloc::vec![AffinePiece::new(rate, Rational::zero())?])
    }

    /// `β(t) = R·max(0, t − T)`.
    pub fn rate_latency(rate: Rational, latency: Rational) -> Result<Self, CurveError> {
        if latency.is_negative() {
            return Err(CurveError::NegativeTime(latency));
        }
        let intercept = -(&rate * &latency);
        Self::convex(alloc::vec![AffinePiece::new(rate, intercept)?])
    }

    /// `γ(t) = r·t + b`, as an arrival curve.
    pub fn token_bucket(rate: Rational, burst: Rational) -> Result<Self, CurveError> {
        Self::concave(alloc::vec![AffinePiece::new(rate, burst)?])
    }

    /// The arrival curve `t ↦ r·t`.
    pub fn linear_arrival(rate: Rational) -> Result<Self, CurveError> {
        Self::token_bucket(rate, Rational::zero())
    }

    fn normalize(shape: Shape, mut lines: Vec<AffinePiece>) -> Self {
        // Order by the sequence in which pieces become active as t grows;
        // among equal slopes the binding one comes first.
        match shape {
            Shape::ConcaveMin => {
                lines.sort_by(|a, b| b.slope.cmp(&a.slope).then_with(|| a.intercept.cmp(&b.intercept)))
            }
            Shape::ConvexMax => lines.sort_by(|a, b| a.slope.cmp(&b.slope).then_with(|| b.intercept.cmp(&a.intercept))),
        }
        lines.dedup_by(|later, earlier| later.slope == earlier.slope);

        // `binds_at_zero(new, top)`: the new line is at least as binding as
        // `top` at 0+ and stays so because of its slope.
        let binds_at_zero = |new: &AffinePiece, top: &AffinePiece| match shape {
            Shape::ConcaveMin => new.intercept <= top.intercept,
            Shape::ConvexMax => new.intercept >= top.intercept,
        };

        let mut hull: Vec<AffinePiece> = Vec::with_capacity(lines.len());
        for line in lines {
            while let Some(top) = hull.last() {
                if binds_at_zero(&line, top) {
                    hull.pop();
                    continue;
                }
                if hull.len() >= 2 {
                    let prev = &hull[hull.len() - 2];
                    if prev.crossing(top) >= top.crossing(&line) {
                        hull.pop();
                        continue;
                    }
                }
                break;
            }
            hull.push(line);
        }

        let breakpoints = hull.windows(2).map(|w| w[0].crossing(&w[1])).collect();
        PiecewiseCurve {
            shape,
            pieces: hull,
            breakpoints,
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Strictly increasing, strictly positive abscissas where the active
    /// piece changes.
    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    /// `lim_{t→0+} f(t)`.
    pub fn right_limit_at_zero(&self) -> &Rational {
        &self.pieces[0].intercept
    }

    pub fn long_run_slope(&self) -> &Rational {
        &self.pieces[self.pieces.len() - 1].slope
    }

    /// Slope of the piece that is active just after `t`.
    pub fn slope_after(&self, t: &Rational) -> &Rational {
        &self.active_piece(t).slope
    }

    fn active_piece(&self, t: &Rational) -> &AffinePiece {
        let idx = self.breakpoints.partition_point(|b| b <= t);
        &self.pieces[idx]
    }

    pub fn evaluate(&self, t: &Rational) -> Result<Rational, CurveError> {
        if t.is_negative() {
            return Err(CurveError::NegativeTime(t.clone()));
        }
        Ok(self.value(t))
    }

    /// Evaluation without the domain check; `t` must be ≥ 0.
    pub(crate) fn value(&self, t: &Rational) -> Rational {
        if t.is_zero() {
            return Rational::zero();
        }
        self.active_piece(t).at(t)
    }

    /// Value at `t`, treating `t = 0` as the `0+` limit.
    fn value_right(&self, t: &Rational) -> Rational {
        if t.is_zero() {
            self.right_limit_at_zero().clone()
        } else {
            self.value(t)
        }
    }

    /// `k · f` for `k ≥ 0`.
    pub fn scale(&self, k: &Rational) -> Result<Self, CurveError> {
        if k.is_negative() {
            return Err(CurveError::Unsupported("negative scaling of a curve"));
        }
        if k.is_zero() {
            let zero = AffinePiece {
                slope: Rational::zero(),
                intercept: Rational::zero(),
            };
            return Ok(Self::normalize(self.shape, alloc::vec![zero]));
        }
        let pieces = self.pieces.iter().map(|p| p.scaled(k)).collect();
        Ok(PiecewiseCurve {
            shape: self.shape,
            pieces,
            breakpoints: self.breakpoints.clone(),
        })
    }

    /// Pointwise sum of two concave curves (the arrival curve of the
    /// multiplexed flows).
    pub fn add(&self, other: &PiecewiseCurve) -> Result<Self, CurveError> {
        if self.shape != Shape::ConcaveMin || other.shape != Shape::ConcaveMin {
            return Err(CurveError::Unsupported("sum is defined for concave curves only"));
        }
        let mut cuts: Vec<Rational> = Vec::with_capacity(1 + self.breakpoints.len() + other.breakpoints.len());
        cuts.push(Rational::zero());
        cuts.extend(self.breakpoints.iter().cloned());
        cuts.extend(other.breakpoints.iter().cloned());
        cuts.sort();
        cuts.dedup();
        let pieces = cuts
            .iter()
            .map(|left| {
                let a = self.active_piece(left);
                let b = other.active_piece(left);
                AffinePiece {
                    slope: &a.slope + &b.slope,
                    intercept: &a.intercept + &b.intercept,
                }
            })
            .collect();
        Self::concave(pieces)
    }

    /// `Some((R, T))` when the curve is `R·max(0, t − T)`.
    pub fn as_rate_latency(&self) -> Option<(Rational, Rational)> {
        if self.shape != Shape::ConvexMax {
            return None;
        }
        match self.pieces.as_slice() {
            [only] if only.intercept.is_zero() => Some((only.slope.clone(), Rational::zero())),
            [flat, ramp] if flat.slope.is_zero() && flat.intercept.is_zero() && ramp.intercept <= Rational::zero() => {
                Some((ramp.slope.clone(), -&ramp.intercept / &ramp.slope))
            }
            _ => None,
        }
    }
}

/// Traffic specification `(p, M, r, b)`: arrival curve `min(p·t + M, r·t + b)`.
///
/// Rates are in bits per second and sizes in bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TSpec {
    peak: Rational,
    max_packet: Rational,
    rate: Rational,
    burst: Rational,
}

impl TSpec {
    pub fn new(peak: Rational, max_packet: Rational, rate: Rational, burst: Rational) -> Result<Self, CurveError> {
        if rate.is_negative() || max_packet.is_negative() {
            return Err(CurveError::InvalidTSpec("rates and sizes must be non-negative"));
        }
        match peak.cmp(&rate) {
            Ordering::Less => return Err(CurveError::InvalidTSpec("peak rate below sustainable rate")),
            Ordering::Equal => return Err(CurveError::DegenerateTSpec(peak)),
            Ordering::Greater => {}
        }
        if burst < max_packet {
            return Err(CurveError::InvalidTSpec("burst tolerance below maximum packet size"));
        }
        Ok(TSpec {
            peak,
            max_packet,
            rate,
            burst,
        })
    }

    pub fn peak(&self) -> &Rational {
        &self.peak
    }

    pub fn max_packet(&self) -> &Rational {
        &self.max_packet
    }

    pub fn rate(&self) -> &Rational {
        &self.rate
    }

    pub fn burst(&self) -> &Rational {
        &self.burst
    }

    /// Time at which the peak piece meets the sustained piece.
    pub fn gamma(&self) -> Rational {
        (&self.burst - &self.max_packet) / (&self.peak - &self.rate)
    }

    pub fn curve(&self) -> PiecewiseCurve {
        let peak = AffinePiece {
            slope: self.peak.clone(),
            intercept: self.max_packet.clone(),
        };
        let sustained = AffinePiece {
            slope: self.rate.clone(),
            intercept: self.burst.clone(),
        };
        PiecewiseCurve::normalize(Shape::ConcaveMin, alloc::vec![peak, sustained])
    }
}

impl From<&TSpec> for PiecewiseCurve {
    fn from(spec: &TSpec) -> Self {
        spec.curve()
    }
}

/// `(f ⊗ g)(t) = inf_{0≤s≤t} f(s) + g(t − s)`.
///
/// Supported for two concave curves (the result is their pointwise minimum)
/// and for two rate-latency curves (rates take the minimum, latencies add).
pub fn min_plus_convolve(f: &PiecewiseCurve, g: &PiecewiseCurve) -> Result<PiecewiseCurve, CurveError> {
    match (f.shape, g.shape) {
        (Shape::ConcaveMin, Shape::ConcaveMin) => {
            let mut pieces = f.pieces.clone();
            pieces.extend(g.pieces.iter().cloned());
            PiecewiseCurve::concave(pieces)
        }
        (Shape::ConvexMax, Shape::ConvexMax) => {
            let (r1, t1) = f
                .as_rate_latency()
                .ok_or(CurveError::Unsupported("convolution of general convex curves"))?;
            let (r2, t2) = g
                .as_rate_latency()
                .ok_or(CurveError::Unsupported("convolution of general convex curves"))?;
            PiecewiseCurve::rate_latency(r1.min(r2), t1 + t2)
        }
        _ => Err(CurveError::Unsupported("convolution of a concave with a convex curve")),
    }
}

fn require_concave_convex(alpha: &PiecewiseCurve, beta: &PiecewiseCurve) -> Result<(), CurveError> {
    if alpha.shape != Shape::ConcaveMin {
        return Err(CurveError::Unsupported("first operand must be a concave arrival curve"));
    }
    if beta.shape != Shape::ConvexMax {
        return Err(CurveError::Unsupported("second operand must be a convex service curve"));
    }
    Ok(())
}

/// `(f ⊘ g)(t) = sup_{v≥0} f(t + v) − g(v)` for concave `f`, convex `g`.
///
/// Infinite when `f` outgrows `g`.
pub fn min_plus_deconvolve_at(f: &PiecewiseCurve, g: &PiecewiseCurve, t: &Rational) -> Result<Extended, CurveError> {
    require_concave_convex(f, g)?;
    if t.is_negative() {
        return Err(CurveError::NegativeTime(t.clone()));
    }
    if f.long_run_slope() > g.long_run_slope() {
        return Ok(Extended::Infinite);
    }
    // v = 0 gives f(t) − g(0) = f(t).
    let mut best = f.value(t);
    best = max(best, f.value_right(t) - g.right_limit_at_zero());
    for x in f.breakpoints.iter().filter(|x| *x > t) {
        best = max(best, f.value(x) - g.value(&(x - t)));
    }
    for v in &g.breakpoints {
        best = max(best, f.value(&(t + v)) - g.value(v));
    }
    Ok(Extended::Finite(best))
}

/// Backlog bound `sup_{s≥0} α(s) − β(s)`.
pub fn vertical_deviation(alpha: &PiecewiseCurve, beta: &PiecewiseCurve) -> Result<Extended, CurveError> {
    min_plus_deconvolve_at(alpha, beta, &Rational::zero())
}

/// `inf{t ≥ 0 : β(t) ≥ y}` for `y > 0`, or `inf{t ≥ 0 : β(t) > y}` when
/// `strict`.
fn service_reach(beta: &PiecewiseCurve, y: &Rational, strict: bool) -> Extended {
    let mut best: Option<Rational> = None;
    for piece in &beta.pieces {
        let reach = if piece.slope.is_zero() {
            let ok = if strict {
                &piece.intercept > y
            } else {
                &piece.intercept >= y
            };
            if ok {
                Some(Rational::zero())
            } else {
                None
            }
        } else {
            Some(max(Rational::zero(), (y - &piece.intercept) / &piece.slope))
        };
        if let Some(reach) = reach {
            best = Some(match best {
                Some(b) => b.min(reach),
                None => reach,
            });
        }
    }
    match best {
        Some(b) => Extended::Finite(b),
        None => Extended::Infinite,
    }
}

/// `inf{s ≥ 0 : α(s) ≥ y}` for a concave `α` and `y > α(0+)`.
fn arrival_reach(alpha: &PiecewiseCurve, y: &Rational) -> Option<Rational> {
    let mut latest = Rational::zero();
    for piece in &alpha.pieces {
        if piece.slope.is_zero() {
            if &piece.intercept < y {
                return None;
            }
        } else {
            latest = max(latest, (y - &piece.intercept) / &piece.slope);
        }
    }
    Some(latest)
}

/// Delay bound `sup_{s≥0} inf{T ≥ 0 : α(s) ≤ β(s + T)}`.
///
/// `φ(s) = β⁻¹(α(s)) − s` is piecewise linear with breakpoints at the
/// breakpoints of `α` and where `α` crosses a breakpoint ordinate of `β`;
/// it is left-continuous, so the supremum is the largest value or right
/// limit over those abscissas (plus `0+`).
pub fn horizontal_deviation(alpha: &PiecewiseCurve, beta: &PiecewiseCurve) -> Result<Extended, CurveError> {
    require_concave_convex(alpha, beta)?;
    if alpha.long_run_slope() > beta.long_run_slope() {
        return Ok(Extended::Infinite);
    }

    let wait = |s: &Rational, strict: bool| -> Extended {
        let y = alpha.value_right(s);
        if !strict && !y.is_positive() {
            return Extended::zero();
        }
        match service_reach(beta, &y, strict) {
            Extended::Finite(reach) => Extended::Finite(max(Rational::zero(), reach - s)),
            Extended::Infinite => Extended::Infinite,
        }
    };

    let mut abscissas: Vec<Rational> = Vec::new();
    abscissas.push(Rational::zero());
    abscissas.extend(alpha.breakpoints.iter().cloned());
    let origin = alpha.right_limit_at_zero();
    let mut levels: Vec<Rational> = beta.breakpoints.iter().map(|x| beta.value(x)).collect();
    levels.push(beta.right_limit_at_zero().clone());
    for level in levels.iter().filter(|y| *y > origin) {
        if let Some(s) = arrival_reach(alpha, level) {
            abscissas.push(s);
        }
    }

    let mut best = Extended::zero();
    for s in &abscissas {
        if !s.is_zero() {
            best = max(best, wait(s, false));
        }
        // Right limit: only reached if α keeps growing past s.
        let strict = alpha.slope_after(s).is_positive();
        best = max(best, wait(s, strict));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn piece(s: i64, c: i64) -> AffinePiece {
        AffinePiece::new(int(s), int(c)).unwrap()
    }

    fn reference_catalog(i: usize) -> TSpec {
        // (p Mb/s, M kb, r Mb/s, b kb) in bits.
        let rows = [
            (ratio(29_000_000, 1), int(1_000), ratio(700_000, 1), int(38_000)),
            (int(7_000_000), int(1_000), int(700_000), int(368_000)),
            (int(300_000), int(15_000), int(30_000), int(38_000)),
        ];
        let (p, m, r, b) = rows[i].clone();
        TSpec::new(p, m, r, b).unwrap()
    }

    #[test]
    fn normalization_drops_dominated_pieces() {
        let c = PiecewiseCurve::concave(alloc::vec![piece(1, 10), piece(5, 0), piece(3, 20), piece(5, 2)]).unwrap();
        assert_eq!(c.pieces(), &[piece(5, 0), piece(1, 10)]);
        assert_eq!(c.breakpoints(), &[ratio(5, 2)]);

        let again = PiecewiseCurve::concave(c.pieces().to_vec()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn convex_keeps_the_latency_flat() {
        let beta = PiecewiseCurve::rate_latency(int(4), int(2)).unwrap();
        assert_eq!(beta.pieces().len(), 2);
        assert_eq!(beta.breakpoints(), &[int(2)]);
        assert_eq!(beta.evaluate(&int(1)).unwrap(), int(0));
        assert_eq!(beta.evaluate(&int(3)).unwrap(), int(4));
        assert_eq!(beta.as_rate_latency(), Some((int(4), int(2))));

        let lambda = PiecewiseCurve::constant_rate(int(3)).unwrap();
        assert_eq!(lambda.pieces(), &[piece(3, 0)]);
        assert_eq!(lambda.as_rate_latency(), Some((int(3), int(0))));
    }

    #[test]
    fn evaluate_origin_and_domain() {
        let c = reference_catalog(0).curve();
        assert_eq!(c.evaluate(&int(0)).unwrap(), int(0));
        assert_eq!(c.right_limit_at_zero(), &int(1_000));
        assert!(matches!(c.evaluate(&int(-1)), Err(CurveError::NegativeTime(_))));
        // r·1 + b
        assert_eq!(c.evaluate(&int(1)).unwrap(), int(738_000));
    }

    #[test]
    fn tspec_is_continuous_at_gamma() {
        let spec = reference_catalog(2);
        let g = spec.gamma();
        let peak = spec.peak() * &g + spec.max_packet();
        let sustained = spec.rate() * &g + spec.burst();
        assert_eq!(peak, sustained);
        assert_eq!(spec.curve().evaluate(&g).unwrap(), peak);
        assert_eq!(spec.curve().breakpoints(), &[g]);
    }

    #[test]
    fn tspec_constructor_errors() {
        assert!(matches!(
            TSpec::new(int(5), int(1), int(5), int(3)),
            Err(CurveError::DegenerateTSpec(_))
        ));
        assert!(matches!(
            TSpec::new(int(4), int(1), int(5), int(3)),
            Err(CurveError::InvalidTSpec(_))
        ));
        assert!(matches!(
            TSpec::new(int(6), int(4), int(5), int(3)),
            Err(CurveError::InvalidTSpec(_))
        ));
        // b = M collapses to a single piece.
        let flat = TSpec::new(int(6), int(3), int(5), int(3)).unwrap();
        assert_eq!(flat.gamma(), int(0));
        assert_eq!(flat.curve().pieces(), &[piece(5, 3)]);
    }

    #[test]
    fn concave_self_convolution_is_identity() {
        let f = PiecewiseCurve::token_bucket(int(1), int(5)).unwrap();
        assert_eq!(min_plus_convolve(&f, &f).unwrap(), f);
    }

    #[test]
    fn rate_latency_convolution() {
        let a = PiecewiseCurve::rate_latency(int(10), int(1)).unwrap();
        let b = PiecewiseCurve::rate_latency(int(4), int(2)).unwrap();
        let c = min_plus_convolve(&a, &b).unwrap();
        assert_eq!(c.as_rate_latency(), Some((int(4), int(3))));
    }

    #[test]
    fn mixed_convolution_is_unsupported() {
        let a = PiecewiseCurve::token_bucket(int(1), int(1)).unwrap();
        let b = PiecewiseCurve::constant_rate(int(2)).unwrap();
        assert!(matches!(min_plus_convolve(&a, &b), Err(CurveError::Unsupported(_))));
    }

    #[test]
    fn token_bucket_deviations() {
        let alpha = PiecewiseCurve::token_bucket(int(3), int(12)).unwrap();
        let beta = PiecewiseCurve::constant_rate(int(4)).unwrap();
        assert_eq!(vertical_deviation(&alpha, &beta).unwrap(), Extended::Finite(int(12)));
        assert_eq!(horizontal_deviation(&alpha, &beta).unwrap(), Extended::Finite(int(3)));
    }

    #[test]
    fn equal_rates_have_zero_deviation() {
        let alpha = PiecewiseCurve::linear_arrival(int(7)).unwrap();
        let beta = PiecewiseCurve::constant_rate(int(7)).unwrap();
        assert_eq!(vertical_deviation(&alpha, &beta).unwrap(), Extended::zero());
        assert_eq!(horizontal_deviation(&alpha, &beta).unwrap(), Extended::zero());
    }

    #[test]
    fn slope_violation_is_infinite() {
        let alpha = PiecewiseCurve::token_bucket(int(5), int(1)).unwrap();
        let beta = PiecewiseCurve::rate_latency(int(4), int(1)).unwrap();
        assert_eq!(vertical_deviation(&alpha, &beta).unwrap(), Extended::Infinite);
        assert_eq!(horizontal_deviation(&alpha, &beta).unwrap(), Extended::Infinite);
    }

    #[test]
    fn rate_latency_delay_adds_latency() {
        // Classic bound T + b/R.
        let alpha = PiecewiseCurve::token_bucket(int(1), int(6)).unwrap();
        let beta = PiecewiseCurve::rate_latency(int(3), int(2)).unwrap();
        assert_eq!(horizontal_deviation(&alpha, &beta).unwrap(), Extended::Finite(int(4)));
        // b + r·T
        assert_eq!(vertical_deviation(&alpha, &beta).unwrap(), Extended::Finite(int(8)));
    }

    #[test]
    fn service_with_initial_jump() {
        // β = max(2, 4t − 2): flat at 2 until t = 1.
        let beta = PiecewiseCurve::convex(alloc::vec![piece(0, 2), piece(4, -2)]).unwrap();
        assert_eq!(beta.right_limit_at_zero(), &int(2));
        // α(s) = s crosses level 2 at s = 2, where β⁻¹(2+) = 1 → no wait.
        let alpha = PiecewiseCurve::linear_arrival(int(1)).unwrap();
        assert_eq!(horizontal_deviation(&alpha, &beta).unwrap(), Extended::zero());
        // α = 2 + s: right after 0 the level exceeds 2 so the wait is 1.
        let alpha = PiecewiseCurve::token_bucket(int(1), int(2)).unwrap();
        assert_eq!(horizontal_deviation(&alpha, &beta).unwrap(), Extended::Finite(int(1)));
    }

    #[test]
    fn deconvolution_at_positive_t() {
        // (γ_{r,b} ⊘ λ_C)(t) = b + r·t for C ≥ r.
        let alpha = PiecewiseCurve::token_bucket(int(2), int(10)).unwrap();
        let beta = PiecewiseCurve::constant_rate(int(5)).unwrap();
        assert_eq!(
            min_plus_deconvolve_at(&alpha, &beta, &int(3)).unwrap(),
            Extended::Finite(int(16))
        );
        assert!(min_plus_deconvolve_at(&alpha, &beta, &int(-1)).is_err());
    }

    #[test]
    fn sum_of_tspecs() {
        let a = reference_catalog(0).curve();
        let b = reference_catalog(1).curve();
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.pieces().len(), 3);
        for t in [ratio(1, 1000), ratio(1, 100), ratio(1, 10), int(2)] {
            assert_eq!(sum.value(&t), a.value(&t) + b.value(&t));
        }
        let scaled = a.scale(&int(3)).unwrap();
        assert_eq!(scaled.value(&int(1)), int(3 * 738_000));
        let zero = a.scale(&int(0)).unwrap();
        assert_eq!(zero.value(&int(5)), int(0));
    }
}
