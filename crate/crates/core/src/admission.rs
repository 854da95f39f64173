//! EB-based admission control.
//!
//! A mix `(n₁, …, n_I)` is admitted on a link of capacity `C` with delay
//! bound `D` iff `e_D(Σ nᵢαᵢ) ≤ C`. Accepted mixes are provisioned with the
//! shared buffer `sup_s α*(s) − e_D(α*)·s`. Because the effective bandwidth is
//! monotone in every count, the admissible set is downward closed and is
//! described by its Pareto-maximal vectors.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bandwidth::{aggregate_buffer_sorted, aggregate_profile};
use crate::curve::TSpec;
use crate::error::AdmissionError;
use crate::rational::{Extended, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkConfig {
    capacity: Rational,
    delay: Rational,
}

impl LinkConfig {
    /// `capacity` must be positive. A zero delay is accepted so that the
    /// unbounded-EB rejection path can be expressed.
    pub fn new(capacity: Rational, delay: Rational) -> Result<Self, AdmissionError> {
        if !capacity.is_positive() {
            return Err(AdmissionError::NonPositiveCapacity(capacity));
        }
        if delay.is_negative() {
            return Err(AdmissionError::NegativeDelay(delay));
        }
        Ok(LinkConfig { capacity, delay })
    }

    pub fn capacity(&self) -> &Rational {
        &self.capacity
    }

    pub fn delay(&self) -> &Rational {
        &self.delay
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissionDecision {
    pub accepted: bool,
    pub aggregate_eb: Extended,
    /// Shared buffer for the accepted aggregate; `None` when rejected.
    pub required_buffer: Option<Rational>,
    /// `C − aggregate_eb`; `None` when the EB is unbounded.
    pub headroom: Option<Rational>,
}

/// Pareto-maximal admissible count vectors, in catalog order, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissionRegion {
    pub frontier: Vec<Vec<u64>>,
}

impl AdmissionRegion {
    /// True when `counts` lies in the downward closure of the frontier.
    pub fn contains(&self, counts: &[u64]) -> bool {
        self.frontier.iter().any(|f| f.iter().zip(counts).all(|(a, b)| b <= a))
    }

    /// Every vector admitted by `other` is admitted by `self`.
    pub fn dominates(&self, other: &AdmissionRegion) -> bool {
        other.frontier.iter().all(|v| self.contains(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TradeoffRow {
    /// Counts of the swept free class (empty when only one class is free).
    pub free_counts: Vec<u64>,
    /// Largest admissible count of the last free class.
    pub max_remaining: u64,
}

/// Catalog pre-sorted for the closed-form EB, with the inverse mapping to
/// catalog positions.
struct Evaluator<'a> {
    sorted: Vec<(&'a TSpec, usize)>,
    link: &'a LinkConfig,
}

impl<'a> Evaluator<'a> {
    fn new(catalog: &'a [TSpec], link: &'a LinkConfig) -> Self {
        let mut sorted: Vec<(&TSpec, usize)> = catalog.iter().zip(0..).collect();
        sorted.sort_by(|(a, _), (b, _)| {
            a.gamma()
                .cmp(&b.gamma())
                .then_with(|| a.burst().cmp(b.burst()))
                .then_with(|| a.max_packet().cmp(b.max_packet()))
        });
        Evaluator { sorted, link }
    }

    fn view(&self, counts: &[u64]) -> Vec<(&'a TSpec, u64)> {
        self.sorted.iter().map(|(s, i)| (*s, counts[*i])).collect()
    }

    fn eb(&self, counts: &[u64]) -> Result<Extended, AdmissionError> {
        if counts.iter().all(|n| *n == 0) {
            return Ok(Extended::zero());
        }
        Ok(aggregate_profile(&self.view(counts), &self.link.delay)?.selected_eb)
    }

    fn admissible(&self, counts: &[u64]) -> Result<bool, AdmissionError> {
        Ok(self.eb(counts)? <= Extended::Finite(self.link.capacity.clone()))
    }

    /// Largest `m ≤ hi` with `counts[slot] = m` admissible, assuming `m = 0`
    /// is.
    fn max_in_slot(&self, counts: &mut [u64], slot: usize, hi: u64) -> Result<u64, AdmissionError> {
        let (mut lo, mut hi) = (0u64, hi);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            counts[slot] = mid;
            if self.admissible(counts)? {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        counts[slot] = 0;
        Ok(lo)
    }
}

fn check_catalog<T>(catalog: &[TSpec], counts: &[T]) -> Result<(), AdmissionError> {
    if catalog.is_empty() {
        return Err(AdmissionError::EmptyCatalog);
    }
    if counts.len() != catalog.len() {
        return Err(AdmissionError::LengthMismatch {
            expected: catalog.len(),
            got: counts.len(),
        });
    }
    Ok(())
}

/// Apply `e_D(Σ nᵢαᵢ) ≤ C`. Ties are admitted.
pub fn decide(catalog: &[TSpec], counts: &[u64], link: &LinkConfig) -> Result<AdmissionDecision, AdmissionError> {
    check_catalog(catalog, counts)?;
    if counts.iter().all(|n| *n == 0) {
        return Err(AdmissionError::NothingRequested);
    }
    let eval = Evaluator::new(catalog, link);
    let aggregate_eb = eval.eb(counts)?;
    let headroom = aggregate_eb.finite().map(|eb| &link.capacity - eb);
    let accepted = matches!(&headroom, Some(h) if !h.is_negative());
    let required_buffer = if accepted {
        Some(aggregate_buffer_sorted(&eval.view(counts), &link.delay)?)
    } else {
        None
    };
    Ok(AdmissionDecision {
        accepted,
        aggregate_eb,
        required_buffer,
        headroom,
    })
}

/// Upper bound on each count implied by `Σnr ≤ e_D ≤ C` and
/// `ΣnM/D ≤ e_D ≤ C`, intersected with `cap`.
fn class_bounds(catalog: &[TSpec], link: &LinkConfig, cap: Option<u64>) -> Result<Vec<u64>, AdmissionError> {
    let floor_u64 = |q: Rational| -> u64 {
        let f: BigInt = q.numer().div_floor(q.denom());
        f.to_u64().unwrap_or(u64::MAX)
    };
    catalog
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut bound = match cap {
                Some(c) => c,
                None if spec.rate().is_zero() => return Err(AdmissionError::UnboundedClass(i)),
                None => u64::MAX,
            };
            if spec.rate().is_positive() {
                bound = bound.min(floor_u64(&link.capacity / spec.rate()));
            }
            if spec.max_packet().is_positive() {
                bound = bound.min(floor_u64(&link.capacity * &link.delay / spec.max_packet()));
            }
            Ok(bound)
        })
        .collect()
}

/// Enumerate the Pareto frontier of admissible count vectors.
///
/// Classes are visited by descending sustainable rate; every prefix is
/// extended while it stays admissible, and the last class is maximized by
/// binary search.
pub fn admission_region(
    catalog: &[TSpec],
    link: &LinkConfig,
    cap: Option<u64>,
) -> Result<AdmissionRegion, AdmissionError> {
    if catalog.is_empty() {
        return Err(AdmissionError::EmptyCatalog);
    }
    let bounds = class_bounds(catalog, link, cap)?;
    let eval = Evaluator::new(catalog, link);

    let mut order: Vec<usize> = (0..catalog.len()).collect();
    order.sort_by(|a, b| catalog[*b].rate().cmp(catalog[*a].rate()).then(a.cmp(b)));
    let last = order[order.len() - 1];
    let prefix_slots = &order[..order.len() - 1];

    // Max of the last coordinate for every admissible prefix.
    let mut best_last: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut counts = vec![0u64; catalog.len()];
    descend(&eval, &bounds, prefix_slots, last, 0, &mut counts, &mut best_last)?;

    let mut frontier = Vec::new();
    for (prefix, m) in &best_last {
        let maximal = prefix_slots.iter().all(|slot| {
            let mut bumped = prefix.clone();
            bumped[*slot] += 1;
            best_last.get(&bumped).is_none_or(|m2| m2 < m)
        });
        if maximal {
            let mut v = prefix.clone();
            v[last] = *m;
            frontier.push(v);
        }
    }
    frontier.sort();
    Ok(AdmissionRegion { frontier })
}

fn descend(
    eval: &Evaluator<'_>,
    bounds: &[u64],
    slots: &[usize],
    last: usize,
    depth: usize,
    counts: &mut Vec<u64>,
    out: &mut BTreeMap<Vec<u64>, u64>,
) -> Result<(), AdmissionError> {
    if depth == slots.len() {
        let m = eval.max_in_slot(counts, last, bounds[last])?;
        out.insert(counts.clone(), m);
        return Ok(());
    }
    let slot = slots[depth];
    let mut v = 0u64;
    loop {
        counts[slot] = v;
        if !eval.admissible(counts)? {
            break;
        }
        descend(eval, bounds, slots, last, depth + 1, counts, out)?;
        if v == bounds[slot] {
            break;
        }
        v += 1;
    }
    counts[slot] = 0;
    Ok(())
}

/// Trade-off between free classes with the others held fixed.
///
/// `fixed[i] = None` marks a free class. With one free class the table has a
/// single row; with two, the first free class is swept from 0 while the
/// mix stays admissible and each row holds the maximum of the second.
pub fn region_tradeoff_table(
    catalog: &[TSpec],
    link: &LinkConfig,
    fixed: &[Option<u64>],
    cap: Option<u64>,
) -> Result<Vec<TradeoffRow>, AdmissionError> {
    check_catalog(catalog, fixed)?;
    let free: Vec<usize> = (0..fixed.len()).filter(|i| fixed[*i].is_none()).collect();
    if free.is_empty() || free.len() > 2 {
        return Err(AdmissionError::FreeClassCount(free.len()));
    }
    let bounds = class_bounds(catalog, link, cap)?;
    let eval = Evaluator::new(catalog, link);
    let mut counts: Vec<u64> = fixed.iter().map(|c| c.unwrap_or(0)).collect();
    let remaining = free[free.len() - 1];

    let mut rows = Vec::new();
    match free.as_slice() {
        [_] => {
            if eval.admissible(&counts)? {
                let m = eval.max_in_slot(&mut counts, remaining, bounds[remaining])?;
                rows.push(TradeoffRow {
                    free_counts: Vec::new(),
                    max_remaining: m,
                });
            }
        }
        [swept, _] => {
            let swept = *swept;
            for v in 0..=bounds[swept] {
                counts[swept] = v;
                if !eval.admissible(&counts)? {
                    break;
                }
                let m = eval.max_in_slot(&mut counts, remaining, bounds[remaining])?;
                rows.push(TradeoffRow {
                    free_counts: vec![v],
                    max_remaining: m,
                });
            }
        }
        _ => unreachable!(),
    }
    Ok(rows)
}

/// Whether `counts` passes the EBBAC test (the zero vector always does).
pub fn is_admissible(catalog: &[TSpec], counts: &[u64], link: &LinkConfig) -> Result<bool, AdmissionError> {
    check_catalog(catalog, counts)?;
    Evaluator::new(catalog, link).admissible(counts)
}
