//! Exact 2×2 complex algebra for single-qubit propagators.
//!
//! Conventions used throughout the crate:
//!
//! * An elementary pulse `(θ)_φ` is the rotation
//!   `cos(θ/2)·I − i·sin(θ/2)·(cos φ·σx + sin φ·σy)`.
//! * `Z_φ = exp(−i φ σz / 2)`.
//! * A [`Sequence`] is stored in **time order**: element 0 is applied first.
//!   Its propagator is `U_N ··· U_2 U_1`, i.e. the last-applied pulse is the
//!   leftmost factor of the operator product.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for checks on synthesized sequences.
pub const SYNTH_TOL: f64 = 1e-10;
/// Threshold below which a rotation component counts as absent when
/// classifying a target as trivial, planar or a pure z-rotation.
pub const DISPATCH_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix, row-major.
///
/// Every propagator in this crate is unitary; the one exception is the
/// literal first-order expansion in [`crate::error_model::first_order_pulse`],
/// which shares the type for convenience.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [Complex64; 4],
}

impl Unitary2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [a, b, c, d] }
    }

    /// Builds a matrix and rejects it unless it is unitary to within `tol`.
    pub fn try_unitary(entries: [Complex64; 4], tol: f64) -> Result<Self> {
        let u = Self { m: entries };
        if u.entries()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NotUnitary("non-finite entry".into()));
        }
        let dev = u.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary(format!(
                "max |U†U − I| entry = {dev:.3e}"
            )));
        }
        Ok(u)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn pauli_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn pauli_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn pauli_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn hadamard() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(s, s, s, -s)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[2 * row + col]
    }

    pub fn dagger(&self) -> Self {
        let [a, b, c, d] = self.m;
        Self::new(a.conj(), c.conj(), b.conj(), d.conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let [a, b, c, d] = self.m;
        Self::new(s * a, s * b, s * c, s * d)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol && (self.det().norm() - 1.0).abs() <= tol
    }

    /// Coefficients `(q0, q)` with `U = e^{iγ}(q0·I − i q·σ)` and `q0² + |q|² = 1`.
    ///
    /// The global phase is removed by dividing by a square root of the
    /// determinant, so the result is fixed only up to an overall sign.
    pub fn su2_coefficients(&self) -> (f64, [f64; 3]) {
        let root = self.det().sqrt();
        let u = self.scale(root.inv());
        let [a, b, c, d] = u.m;
        let q0 = 0.5 * (a.re + d.re);
        let qx = -0.5 * (b.im + c.im);
        let qy = 0.5 * (c.re - b.re);
        let qz = 0.5 * (d.im - a.im);
        (q0, [qx, qy, qz])
    }
}

impl Default for Unitary2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = rhs.m;
        Unitary2::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}

impl Add for Unitary2 {
    type Output = Unitary2;

    fn add(self, rhs: Unitary2) -> Unitary2 {
        let m: Vec<_> = self
            .m
            .iter()
            .zip(rhs.m.iter())
            .map(|(x, y)| x + y)
            .collect();
        Unitary2::new(m[0], m[1], m[2], m[3])
    }
}

impl Sub for Unitary2 {
    type Output = Unitary2;

    fn sub(self, rhs: Unitary2) -> Unitary2 {
        self + (-rhs)
    }
}

impl Neg for Unitary2 {
    type Output = Unitary2;

    fn neg(self) -> Unitary2 {
        self.scale(-ONE)
    }
}

impl fmt::Display for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "[[{a:.6}, {b:.6}], [{c:.6}, {d:.6}]]")
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_signed(phi: f64) -> f64 {
    let w = wrap_phase(phi);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Reduces a flip angle modulo 4π.
///
/// `(θ + 4π)_φ = (θ)_φ` exactly, so this never changes the propagator.
/// Reduction modulo 2π would flip its sign; synthesis only does that where a
/// global phase is explicitly irrelevant.
pub fn canonical_theta(theta: f64) -> f64 {
    let w = theta.rem_euclid(2.0 * TAU);
    if w >= 2.0 * TAU {
        0.0
    } else {
        w
    }
}

/// One elementary rotation `(θ)_φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    theta: f64,
    phi: f64,
}

impl Pulse {
    /// Creates a pulse; the phase is normalized into `[0, 2π)`.
    ///
    /// Panics if `theta` is negative or either argument is not finite.
    pub fn new(theta: f64, phi: f64) -> Self {
        Self::try_new(theta, phi).expect("invalid pulse")
    }

    pub fn try_new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidPulse(format!(
                "non-finite pulse ({theta}, {phi})"
            )));
        }
        if theta < 0.0 {
            return Err(Error::InvalidPulse(format!("negative flip angle {theta}")));
        }
        Ok(Self {
            theta,
            phi: wrap_phase(phi),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unitary(&self) -> Unitary2 {
        rotation(self.theta, self.phi)
    }
}

/// Time-ordered list of pulses; index 0 is applied first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence(Vec<Pulse>);

impl Sequence {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_pulses(pulses: Vec<Pulse>) -> Self {
        Self(pulses)
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, p: Pulse) {
        self.0.push(p);
    }

    /// Appends `later`, whose pulses are applied after all of `self`.
    pub fn then(mut self, later: Sequence) -> Sequence {
        self.0.extend(later.0);
        self
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Pulse> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Pulse> {
        self.0
    }

    pub fn unitary(&self) -> Unitary2 {
        compose(self)
    }
}

impl FromIterator<Pulse> for Sequence {
    fn from_iter<T: IntoIterator<Item = Pulse>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Sequence {
    type Item = &'a Pulse;
    type IntoIter = std::slice::Iter<'a, Pulse>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Rotation by `angle` about the (not necessarily normalized) `axis`:
/// `cos(angle/2)·I − i·sin(angle/2)·(â·σ)`.
pub(crate) fn axis_rotation(angle: f64, axis: [f64; 3]) -> Unitary2 {
    let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (s, c) = (0.5 * angle).sin_cos();
    if len == 0.0 {
        return Unitary2::identity().scale(Complex64::new(c, 0.0));
    }
    let (x, y, z) = (axis[0] / len, axis[1] / len, axis[2] / len);
    // −i s (xσx + yσy + zσz)
    Unitary2::new(
        Complex64::new(c, -s * z),
        Complex64::new(-s * y, -s * x),
        Complex64::new(s * y, -s * x),
        Complex64::new(c, s * z),
    )
}

/// The elementary pulse propagator `(θ)_φ`.
pub fn rotation(theta: f64, phi: f64) -> Unitary2 {
    let (sp, cp) = phi.sin_cos();
    let (s, c) = (0.5 * theta).sin_cos();
    Unitary2::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s * sp, -s * cp),
        Complex64::new(s * sp, -s * cp),
        Complex64::new(c, 0.0),
    )
}

/// `Z_φ = diag(e^{−iφ/2}, e^{iφ/2})`.
pub fn z_rotation(phi: f64) -> Unitary2 {
    let (s, c) = (0.5 * phi).sin_cos();
    Unitary2::new(Complex64::new(c, -s), ZERO, ZERO, Complex64::new(c, s))
}

/// Propagator of a time-ordered sequence.
pub fn compose(seq: &Sequence) -> Unitary2 {
    seq.iter()
        .fold(Unitary2::identity(), |acc, p| p.unitary() * acc)
}

/// `1 − |Tr(target† · actual)| / 2`, clamped to `[0, 1]`.
pub fn infidelity(target: &Unitary2, actual: &Unitary2) -> f64 {
    let overlap = (target.dagger() * *actual).trace().norm();
    (1.0 - 0.5 * overlap).clamp(0.0, 1.0)
}

pub fn equal_up_to_phase(a: &Unitary2, b: &Unitary2, tol: f64) -> bool {
    infidelity(a, b) < tol
}

/// Parameters `(θ₁, θ₂, φ₁, φ₂)` of `Θ = (θ₂)_{φ₁} (θ₁)_{φ₁+φ₂}`.
///
/// Flip angles are restricted to `[0, 2π]`; phases are kept as given since
/// every formula that consumes them is 2π-periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaDecomposition {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl ThetaDecomposition {
    pub fn new(theta1: f64, theta2: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let ok = |t: f64| t.is_finite() && (-IDENTITY_TOL..=TAU + IDENTITY_TOL).contains(&t);
        if !ok(theta1) || !ok(theta2) {
            return Err(Error::InvalidDecomposition(format!(
                "flip angles must lie in [0, 2π], got θ₁={theta1}, θ₂={theta2}"
            )));
        }
        if !phi1.is_finite() || !phi2.is_finite() {
            return Err(Error::InvalidDecomposition("non-finite phase".into()));
        }
        Ok(Self {
            theta1: theta1.clamp(0.0, TAU),
            theta2: theta2.clamp(0.0, TAU),
            phi1,
            phi2,
        })
    }

    /// `Θ = (θ₂)_{φ₁} (θ₁)_{φ₁+φ₂}`.
    pub fn theta_unitary(&self) -> Unitary2 {
        rotation(self.theta2, self.phi1) * rotation(self.theta1, self.phi1 + self.phi2)
    }

    /// `(θ₂)_{φ₁} Z_{φ₂} (θ₁)_{φ₁}`, which equals `Θ·Z_{φ₂}`.
    pub fn target_unitary(&self) -> Unitary2 {
        rotation(self.theta2, self.phi1) * z_rotation(self.phi2) * rotation(self.theta1, self.phi1)
    }

    /// The bare two-pulse sequence implementing `Θ`.
    pub fn bare_sequence(&self) -> Sequence {
        Sequence::from_pulses(vec![
            Pulse::new(self.theta1, self.phi1 + self.phi2),
            Pulse::new(self.theta2, self.phi1),
        ])
    }
}

/// Factors `u` (up to global phase) as `(θ₂)_{φ₁} Z_{φ₂} (θ₁)_{φ₁}`.
///
/// Returns the decomposition together with the z-phase `φ₂`, so that
/// `u ≅ Θ·Z_{φ₂}`. The factorization is not unique; the branch taken is:
///
/// * pure z-rotation `Z_φ` → `(0, 0, 0, φ)`, i.e. `Θ = I`;
/// * planar rotation `(θ)_φ` → `(θ, 0, φ, 0)`;
/// * otherwise `θ₁ = π` and the rest comes from the ZXZ Euler angles of
///   `u·(π)_0†`, using `(π)_0 Z_{−φ₁} = Z_{φ₁} (π)_0`.
pub fn decompose_target(u: &Unitary2) -> Result<(ThetaDecomposition, f64)> {
    let (q0, [qx, qy, qz]) = u.su2_coefficients();
    let planar_norm = qx.hypot(qy);

    let d = if planar_norm < DISPATCH_TOL {
        let phi = 2.0 * qz.atan2(q0);
        ThetaDecomposition::new(0.0, 0.0, 0.0, wrap_signed(phi))?
    } else if qz.abs() < DISPATCH_TOL {
        // fix the overall sign so that the flip angle lands in [0, 2π]
        let theta = 2.0 * planar_norm.atan2(q0);
        let phi = qy.atan2(qx);
        ThetaDecomposition::new(theta, 0.0, wrap_phase(phi), 0.0)?
    } else {
        let v = *u * rotation(PI, 0.0).dagger();
        let (v00, v01, v10, v11) = (v.get(0, 0), v.get(0, 1), v.get(1, 0), v.get(1, 1));
        let b = 2.0 * v10.norm().atan2(v00.norm());
        let sum = if v00.norm() > DISPATCH_TOL {
            (v11 * v00.conj()).arg()
        } else {
            0.0
        };
        let diff = if v10.norm() > DISPATCH_TOL {
            (v10 * v01.conj()).arg()
        } else {
            0.0
        };
        // halving the phase sums fixes a and c only mod π; shifting both by π
        // flips the sign of the middle rotation, so keep whichever lift fits
        let a = 0.5 * (sum + diff);
        let c = 0.5 * (sum - diff);
        let lift =
            |shift: f64| ThetaDecomposition::new(PI, b, wrap_phase(a + shift), wrap_signed(c - a));
        let (d0, d1) = (lift(0.0)?, lift(PI)?);
        if infidelity(u, &d0.target_unitary()) <= infidelity(u, &d1.target_unitary()) {
            d0
        } else {
            d1
        }
    };

    let rebuilt = d.target_unitary();
    let err = infidelity(u, &rebuilt);
    if err >= SYNTH_TOL {
        return Err(Error::Reconstruction(format!(
            "decomposition {d:?} reproduces the target only to infidelity {err:.3e}"
        )));
    }
    Ok((d, d.phi2))
}
