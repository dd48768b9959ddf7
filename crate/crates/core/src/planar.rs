//! Amplitude-error cancellation for `Θ = (θ₂)_{φ₁}(θ₁)_{φ₁+φ₂}` by planar geometry.
//!
//! Two full turns `(2π)_{φ₃}` and `(2π)_{φ₄}` are inserted between the legs of
//! `Θ`. They leave the ideal propagator untouched, and their phases are chosen
//! so that the four first-order error vectors
//!
//! ```text
//! AB = θ₂ n(φ₁),  BC = θ₁ n(φ₁+φ₂),  CD = 2π n(φ₃),  DA = 2π n(φ₄)
//! ```
//!
//! close into a quadrilateral ABCD. With `r = |AC|`, the triangle ACD has
//! sides `r, 2π, 2π`, which fixes the angles at C and D:
//!
//! ```text
//! φ₃ = π + φ₁ + φ₂ − ∠ACB − ∠ACD,   ∠ACD = arccos(r / 4π)
//! φ₄ = π + φ₃ − ∠CDA,               ∠CDA = arccos(1 − r² / 8π²)
//! ```
//!
//! `∠ACB` comes from the sine rule in triangle ABC and is only known up to
//! its supplement, so both values are tried. Reflecting ACD across the
//! diagonal gives a second, mirrored solution.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_model::quadrilateral_error_vector;
use crate::su2::{wrap_phase, Pulse, Sequence, ThetaDecomposition, SYNTH_TOL};

/// Diagonals shorter than this are treated as a trivial `Θ`.
pub const DEGENERATE_R: f64 = 1e-9;

/// Which quadrilateral a [`QuadSolution`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The closed form with the principal `arcsin` for `∠ACB`.
    Principal,
    /// Same orientation, with `∠ACB = π − arcsin(·)` (obtuse angle at C).
    Supplementary,
    /// Triangle ACD reflected across the diagonal AC.
    Mirror,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Principal => "principal",
            Branch::Supplementary => "supplementary",
            Branch::Mirror => "mirror",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSolution {
    pub phi3: f64,
    pub phi4: f64,
    /// Length of the diagonal AC.
    pub r: f64,
    pub branch: Branch,
    /// Norm of the error-vector sum at `(φ₃, φ₄)`.
    pub residual: f64,
}

/// `r = √(θ₁² + θ₂² + 2θ₁θ₂ cos φ₂)`.
pub fn diagonal_r(d: &ThetaDecomposition) -> f64 {
    let sq = d.theta1 * d.theta1 + d.theta2 * d.theta2 + 2.0 * d.theta1 * d.theta2 * d.phi2.cos();
    sq.max(0.0).sqrt()
}

/// Whether a single `(2π)` pulse could close the error triangle, i.e. `r = 2π`.
///
/// Only the two-turn construction is ever synthesized; this predicate exists
/// to document why a single turn is not enough once `r > 2π`.
pub fn single_2pi_feasible(d: &ThetaDecomposition, tol: f64) -> bool {
    (diagonal_r(d) - TAU).abs() < tol
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Phases of the two inserted full turns that cancel the first-order
/// amplitude error of `Θ`.
pub fn solve_quadrilateral(d: &ThetaDecomposition) -> Result<QuadSolution> {
    let r = diagonal_r(d);
    if r < DEGENERATE_R {
        return Err(Error::DegenerateTarget(format!(
            "Θ has diagonal r = {r:.3e}; it is a trivial rotation and needs no correction"
        )));
    }

    let asin = clamp_unit(d.theta2 * d.phi2.sin() / r).asin();
    let acd = clamp_unit(r / (2.0 * TAU)).acos();
    let cda = clamp_unit(1.0 - r * r / (2.0 * TAU * TAU)).acos();

    let candidate = |acb: f64, orientation: f64| {
        let phi3 = PI + d.phi1 + d.phi2 - acb - orientation * acd;
        let phi4 = PI + phi3 - orientation * cda;
        let residual = quadrilateral_error_vector(d, phi3, phi4).norm();
        (wrap_phase(phi3), wrap_phase(phi4), residual)
    };

    let attempts = [
        (Branch::Principal, asin, 1.0),
        (Branch::Supplementary, PI - asin, 1.0),
        (Branch::Mirror, asin, -1.0),
        (Branch::Mirror, PI - asin, -1.0),
    ];
    let mut best = f64::INFINITY;
    for (branch, acb, orientation) in attempts {
        let (phi3, phi4, residual) = candidate(acb, orientation);
        if residual < SYNTH_TOL {
            return Ok(QuadSolution {
                phi3,
                phi4,
                r,
                branch,
                residual,
            });
        }
        best = best.min(residual);
    }
    Err(Error::InfeasibleClosure(format!(
        "{d:?}: smallest residual {best:.3e} on any branch"
    )))
}

/// The amplitude-robust sequence for `Θ`, time-ordered as
/// `[(θ₁)_{φ₁+φ₂}, (2π)_{φ₃}, (2π)_{φ₄}, (θ₂)_{φ₁}]`.
pub fn build_robust_theta(d: &ThetaDecomposition) -> Result<Sequence> {
    build_robust_theta_with_solution(d).map(|(seq, _)| seq)
}

/// Like [`build_robust_theta`], also returning the closure solution used.
pub fn build_robust_theta_with_solution(
    d: &ThetaDecomposition,
) -> Result<(Sequence, QuadSolution)> {
    let sol = solve_quadrilateral(d)?;
    let seq = Sequence::from_pulses(vec![
        Pulse::try_new(d.theta1, d.phi1 + d.phi2)?,
        Pulse::try_new(TAU, sol.phi3)?,
        Pulse::try_new(TAU, sol.phi4)?,
        Pulse::try_new(d.theta2, d.phi1)?,
    ]);
    Ok((seq, sol))
}
