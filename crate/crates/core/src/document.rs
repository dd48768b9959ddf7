//! Portable JSON representation of a synthesized sequence.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "time_order": "first-applied-first",
//!   "target": "z(phi=3.141592653589793)",
//!   "robustness": "ae",
//!   "pulses": [{ "theta": 3.14159, "phi": 4.71238 }, ...],
//!   "provenance": [{ "kind": "quadrilateral", "phi3": ..., "phi4": ..., "branch": "principal", "r": ... }]
//! }
//! ```
//!
//! Pulses are listed in the order they are applied. Angles are radians,
//! written in the shortest decimal form that parses back to the same `f64`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{Pulse, Sequence};
use crate::targets::{Provenance, Robustness, Synthesis, TargetKind, TargetSpec};

pub const FORMAT_VERSION: u32 = 1;
pub const TIME_ORDER: &str = "first-applied-first";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDocument {
    pub format_version: u32,
    pub time_order: String,
    pub target: String,
    pub robustness: String,
    pub pulses: Vec<PulseRecord>,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
}

impl SequenceDocument {
    pub fn from_synthesis(spec: &TargetSpec, synth: &Synthesis) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            time_order: TIME_ORDER.to_owned(),
            target: spec.kind.to_string(),
            robustness: spec.robustness.to_string(),
            pulses: synth
                .sequence
                .iter()
                .map(|p| PulseRecord {
                    theta: p.theta(),
                    phi: p.phi(),
                })
                .collect(),
            provenance: synth.provenance.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SequenceDocument = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("sequence document: {e}")))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        if doc.time_order != TIME_ORDER {
            return Err(Error::Parse(format!(
                "unsupported time order {:?} (expected {TIME_ORDER:?})",
                doc.time_order
            )));
        }
        Ok(doc)
    }

    pub fn sequence(&self) -> Result<Sequence> {
        self.pulses
            .iter()
            .map(|p| Pulse::try_new(p.theta, p.phi))
            .collect::<Result<Vec<_>>>()
            .map(Sequence::from_pulses)
    }

    pub fn target_kind(&self) -> Result<TargetKind> {
        self.target.parse()
    }

    pub fn robustness_level(&self) -> Result<Robustness> {
        self.robustness.parse()
    }
}
