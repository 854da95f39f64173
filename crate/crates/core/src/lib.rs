//! Exact deterministic network calculus for T-SPEC regulated traffic.
//!
//! The crate covers four layers:
//!
//! * [`curve`]: piecewise-linear arrival and service curves with min-plus
//!   convolution, deconvolution and the vertical/horizontal deviations that
//!   bound backlog and delay.
//! * [`bandwidth`]: effective bandwidth (rate needed to meet a delay bound),
//!   equivalent capacity (rate needed to stay within a buffer), the duality
//!   between the two, and the closed-form aggregate EB of a mix of T-SPEC
//!   classes together with its shared buffer requirement.
//! * [`admission`]: EB-based admission decisions against a link and the
//!   Pareto frontier of admissible class counts.
//! * [`simtrace`]: a discrete-time fluid simulator (greedy sources into a
//!   FIFO constant-rate server) used to check the analytic bounds.
//!
//! All analytic quantities are exact [`Rational`]s; unbounded suprema are
//! reported as [`Extended::Infinite`]. The crate is `no_std` and only needs
//! `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod admission;
pub mod bandwidth;
pub mod curve;
pub mod error;
pub mod rational;
pub mod simtrace;

pub use admission::{AdmissionDecision, AdmissionRegion, LinkConfig, TradeoffRow};
pub use bandwidth::{AggregateEbProfile, FlowClass, FlowMix};
pub use curve::{AffinePiece, PiecewiseCurve, Shape, TSpec};
pub use error::{AdmissionError, BandwidthError, CurveError, SimError};
pub use rational::{Extended, Rational};
pub use simtrace::{Conformance, ServerRun, SimReport, Trace};
