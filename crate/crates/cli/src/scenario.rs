//! Scenario files: flow classes, link and simulation settings as JSON.
//!
//! Files use Mb/s for rates, kb for sizes and seconds for times, with
//! 1 kb = 1000 bits and 1 Mb/s = 10⁶ bit/s. [`Scenario`] holds the
//! validated file together with the catalog converted to bits and seconds.

use std::fs;
use std::path::{Path, PathBuf};

use ebac_core::rational::int;
use ebac_core::{CurveError, FlowClass, FlowMix, Rational, TSpec};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::number::Exact;

/// Bits per kb.
pub const BITS_PER_KB: i64 = 1_000;
/// Bit/s per Mb/s.
pub const BPS_PER_MBPS: i64 = 1_000_000;

pub fn kb_to_bits(kb: &Rational) -> Rational {
    kb * int(BITS_PER_KB)
}

pub fn bits_to_kb(bits: &Rational) -> Rational {
    bits / int(BITS_PER_KB)
}

pub fn mbps_to_bps(mbps: &Rational) -> Rational {
    mbps * int(BPS_PER_MBPS)
}

pub fn bps_to_mbps(bps: &Rational) -> Rational {
    bps / int(BPS_PER_MBPS)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub name: String,
    /// Peak rate, Mb/s.
    pub p: Exact,
    /// Maximum packet size, kb.
    #[serde(rename = "M")]
    pub max_packet: Exact,
    /// Sustainable rate, Mb/s.
    pub r: Exact,
    /// Burst tolerance, kb.
    pub b: Exact,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    /// Capacity, Mb/s.
    #[serde(rename = "C")]
    pub capacity: Exact,
    /// Delay constraint, s.
    #[serde(rename = "D")]
    pub delay: Exact,
    /// Provisioned buffer, kb.
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub buffer: Option<Exact>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationEntry {
    /// Step, s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<Exact>,
    /// Horizon, s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<Exact>,
}

/// On-disk layout, values in file units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub classes: Vec<ClassEntry>,
    pub link: LinkEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationEntry>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("scenario has no classes")]
    NoClasses,
    #[error("class `{name}`: {source}")]
    Class {
        name: String,
        #[source]
        source: CurveError,
    },
    #[error("link.{0}")]
    Link(&'static str),
    #[error("simulation.{0}")]
    Simulation(&'static str),
}

/// Validated scenario with the catalog in bits and seconds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    file: ScenarioFile,
    catalog: Vec<TSpec>,
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        if file.classes.is_empty() {
            return Err(ScenarioError::NoClasses);
        }
        let catalog = file
            .classes
            .iter()
            .map(|c| {
                TSpec::new(
                    mbps_to_bps(&c.p.0),
                    kb_to_bits(&c.max_packet.0),
                    mbps_to_bps(&c.r.0),
                    kb_to_bits(&c.b.0),
                )
                .map_err(|source| ScenarioError::Class {
                    name: c.name.clone(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !file.link.capacity.0.is_positive() {
            return Err(ScenarioError::Link("C must be positive"));
        }
        if file.link.delay.0.is_negative() {
            return Err(ScenarioError::Link("D must be non-negative"));
        }
        if file.link.buffer.as_ref().is_some_and(|b| b.0.is_negative()) {
            return Err(ScenarioError::Link("B must be non-negative"));
        }
        if let Some(sim) = &file.simulation {
            if sim.dt.as_ref().is_some_and(|dt| !dt.0.is_positive()) {
                return Err(ScenarioError::Simulation("dt must be positive"));
            }
            if sim.horizon.as_ref().is_some_and(|h| h.0.is_negative()) {
                return Err(ScenarioError::Simulation("horizon must be non-negative"));
            }
        }
        Ok(Scenario { file, catalog })
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        Scenario::from_file(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_owned(),
            source,
        })?;
        Scenario::from_json(&text)
    }

    /// Pretty JSON that parses back to an identical scenario.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.file).expect("scenario serializes");
        text.push('\n');
        text
    }

    pub fn file(&self) -> &ScenarioFile {
        &self.file
    }

    /// T-SPECs in bits and bit/s, in file order.
    pub fn catalog(&self) -> &[TSpec] {
        &self.catalog
    }

    pub fn names(&self) -> Vec<&str> {
        self.file.classes.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.file.classes.iter().map(|c| c.count).collect()
    }

    /// Capacity in bit/s.
    pub fn capacity(&self) -> Rational {
        mbps_to_bps(&self.file.link.capacity.0)
    }

    /// Delay constraint in seconds.
    pub fn delay(&self) -> Rational {
        self.file.link.delay.0.clone()
    }

    /// Provisioned buffer in bits.
    pub fn buffer(&self) -> Option<Rational> {
        self.file.link.buffer.as_ref().map(|b| kb_to_bits(&b.0))
    }

    pub fn step(&self) -> Option<Rational> {
        self.file.simulation.as_ref()?.dt.as_ref().map(|e| e.0.clone())
    }

    pub fn horizon(&self) -> Option<Rational> {
        self.file.simulation.as_ref()?.horizon.as_ref().map(|e| e.0.clone())
    }

    /// Flow mix of the catalog with the given counts and delay.
    pub fn mix(&self, counts: &[u64], delay: Rational) -> Result<FlowMix, ebac_core::BandwidthError> {
        let classes = self
            .catalog
            .iter()
            .zip(counts)
            .map(|(spec, n)| FlowClass::new(spec.clone(), *n))
            .collect();
        FlowMix::new(classes, delay)
    }
}
