//! CORPSE composite pulses and nesting.
//!
//! CORPSE replaces `(θ)_φ` by three pulses about `±n(φ)` whose off-resonance
//! errors cancel to first order. Because all three axes are collinear, the
//! amplitude error of the triple is exactly that of the bare pulse, so nesting
//! an amplitude-robust sequence keeps its amplitude robustness.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{Pulse, Sequence};

/// Pulses this close to a full turn are already off-resonance robust.
pub const FULL_TURN_TOL: f64 = 1e-9;

/// Winding numbers `(n₁, n₂, n₃)` with `n₁ − n₂ + n₃ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpseWindings {
    pub n1: i32,
    pub n2: i32,
    pub n3: i32,
}

impl CorpseWindings {
    /// `(1, 1, 0)`: all three flip angles positive for every `θ ∈ (0, 2π]`.
    pub const SHORT: CorpseWindings = CorpseWindings {
        n1: 1,
        n2: 1,
        n3: 0,
    };

    pub fn new(n1: i32, n2: i32, n3: i32) -> Result<Self> {
        if n1 - n2 + n3 != 0 {
            return Err(Error::InvalidWindings(format!(
                "n₁ − n₂ + n₃ = {} for ({n1}, {n2}, {n3}); must be 0",
                n1 - n2 + n3
            )));
        }
        Ok(Self { n1, n2, n3 })
    }
}

impl Default for CorpseWindings {
    fn default() -> Self {
        Self::SHORT
    }
}

/// `k = arcsin(sin(θ/2) / 2)`.
pub fn corpse_k(theta: f64) -> f64 {
    ((0.5 * theta).sin() / 2.0).asin()
}

/// Flip angles `(2n₁π + θ/2 − k, 2n₂π − 2k, 2n₃π + θ/2 − k)`.
pub fn corpse_angles(theta: f64, w: CorpseWindings) -> [f64; 3] {
    let k = corpse_k(theta);
    [
        f64::from(w.n1) * TAU + 0.5 * theta - k,
        f64::from(w.n2) * TAU - 2.0 * k,
        f64::from(w.n3) * TAU + 0.5 * theta - k,
    ]
}

/// The CORPSE triple for `p`, time-ordered, with phases `φ, φ + π, φ`.
pub fn corpse(p: &Pulse, w: CorpseWindings) -> Result<Sequence> {
    CorpseWindings::new(w.n1, w.n2, w.n3)?;
    let angles = corpse_angles(p.theta(), w);
    if let Some(bad) = angles.iter().find(|&&a| a <= 0.0) {
        return Err(Error::InvalidWindings(format!(
            "windings ({}, {}, {}) give non-positive flip angle {bad} for θ = {}",
            w.n1,
            w.n2,
            w.n3,
            p.theta()
        )));
    }
    let phases = [p.phi(), p.phi() + PI, p.phi()];
    angles
        .iter()
        .zip(phases)
        .map(|(&theta, phi)| Pulse::try_new(theta, phi))
        .collect::<Result<Vec<_>>>()
        .map(Sequence::from_pulses)
}

/// Replaces every pulse that is not a full turn by its short CORPSE triple.
///
/// Full turns and zero-angle pulses pass through unchanged.
pub fn nest(seq: &Sequence) -> Sequence {
    nest_with(seq, CorpseWindings::SHORT).expect("short windings are valid for θ ∈ (0, 4π)")
}

pub fn nest_with(seq: &Sequence, w: CorpseWindings) -> Result<Sequence> {
    let mut out = Sequence::new();
    for p in seq {
        if (p.theta() - TAU).abs() < FULL_TURN_TOL || p.theta() == 0.0 {
            out.push(*p);
        } else {
            for q in &corpse(p, w)? {
                out.push(*q);
            }
        }
    }
    Ok(out)
}
