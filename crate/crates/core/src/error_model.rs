//! Propagators under systematic amplitude and off-resonance errors.
//!
//! A pulse `(θ)_φ` with amplitude error `ε` and off-resonance error `f` is
//! generated by `A(n(φ)·σ + f σz)/2` for a time scaled by `(1 + ε)`. The
//! off-resonance term rides on the control amplitude, so it only acts while a
//! pulse is on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::su2::{axis_rotation, compose, rotation, Pulse, Sequence, ThetaDecomposition, Unitary2};

/// Central-difference step for generator extraction.
pub const GENERATOR_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorParams {
    /// Relative amplitude error: `θ → (1 + ε)θ`.
    pub epsilon: f64,
    /// Relative off-resonance error, the coefficient of `σz` in units of the amplitude.
    pub f: f64,
}

impl ErrorParams {
    pub const NONE: ErrorParams = ErrorParams {
        epsilon: 0.0,
        f: 0.0,
    };

    pub fn new(epsilon: f64, f: f64) -> Self {
        Self { epsilon, f }
    }

    pub fn amplitude(epsilon: f64) -> Self {
        Self { epsilon, f: 0.0 }
    }

    pub fn off_resonance(f: f64) -> Self {
        Self { epsilon: 0.0, f }
    }
}

/// A real 3-vector `(m_x, m_y, m_z)` multiplying `σ` in a first-order error term.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorVector(pub [f64; 3]);

impl ErrorVector {
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// In-plane vector `length · n(phi)`.
    pub fn planar(length: f64, phi: f64) -> Self {
        Self([length * phi.cos(), length * phi.sin(), 0.0])
    }

    pub fn add(&self, other: &ErrorVector) -> ErrorVector {
        ErrorVector([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    pub fn sub(&self, other: &ErrorVector) -> ErrorVector {
        ErrorVector([
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ])
    }

    /// The vector `g'` with `g'·σ = u (g·σ) u†`.
    pub fn conjugated_by(&self, u: &Unitary2) -> ErrorVector {
        let g = pauli_combination(self.0);
        pauli_components(&(*u * g * u.dagger()))
    }
}

impl std::iter::Sum for ErrorVector {
    fn sum<I: Iterator<Item = ErrorVector>>(iter: I) -> Self {
        iter.fold(ErrorVector::default(), |acc, v| acc.add(&v))
    }
}

fn pauli_combination(v: [f64; 3]) -> Unitary2 {
    Unitary2::pauli_x().scale(Complex64::new(v[0], 0.0))
        + Unitary2::pauli_y().scale(Complex64::new(v[1], 0.0))
        + Unitary2::pauli_z().scale(Complex64::new(v[2], 0.0))
}

/// Real parts of `Tr(M σ_k) / 2`.
fn pauli_components(m: &Unitary2) -> ErrorVector {
    let c = |p: Unitary2| 0.5 * (*m * p).trace().re;
    ErrorVector([
        c(Unitary2::pauli_x()),
        c(Unitary2::pauli_y()),
        c(Unitary2::pauli_z()),
    ])
}

/// Exact propagator of one pulse under `err`.
///
/// Equals a rotation by `θ(1+ε)√(1+f²)` about `(cos φ, sin φ, f)/√(1+f²)`.
pub fn faulty_pulse(p: &Pulse, err: ErrorParams) -> Unitary2 {
    if err.f == 0.0 {
        return rotation(p.theta() * (1.0 + err.epsilon), p.phi());
    }
    let (s, c) = p.phi().sin_cos();
    let angle = p.theta() * (1.0 + err.epsilon) * (1.0 + err.f * err.f).sqrt();
    axis_rotation(angle, [c, s, err.f])
}

/// Time-ordered product of [`faulty_pulse`] over `seq`.
pub fn faulty_compose(seq: &Sequence, err: ErrorParams) -> Unitary2 {
    seq.iter()
        .fold(Unitary2::identity(), |acc, p| faulty_pulse(p, err) * acc)
}

/// First-order expansion `(I − iεθ/2 n(φ)·σ)(θ)_φ − i f sin(θ/2) σz`.
/// Not unitary in general.
pub fn first_order_pulse(p: &Pulse, err: ErrorParams) -> Unitary2 {
    let theta = p.theta();
    let (s, c) = p.phi().sin_cos();
    let n_sigma = Unitary2::pauli_x().scale(Complex64::new(c, 0.0))
        + Unitary2::pauli_y().scale(Complex64::new(s, 0.0));
    let lead =
        Unitary2::identity() + n_sigma.scale(Complex64::new(0.0, -0.5 * err.epsilon * theta));
    let z = Complex64::new(0.0, -err.f * (0.5 * theta).sin());
    lead * rotation(theta, p.phi()) + Unitary2::pauli_z().scale(z)
}

/// First-order amplitude-error generator `g` of a sequence, defined by
/// `faulty_compose(seq, ε, 0) = (I − iε g·σ/2 + O(ε²)) · compose(seq)`.
///
/// Extracted numerically by a central difference with step
/// [`GENERATOR_STEP`]; accurate to roughly 1e-4 relative.
pub fn amplitude_error_generator(seq: &Sequence) -> ErrorVector {
    let h = GENERATOR_STEP;
    let plus = faulty_compose(seq, ErrorParams::amplitude(h));
    let minus = faulty_compose(seq, ErrorParams::amplitude(-h));
    let derivative = (plus - minus).scale(Complex64::new(0.5 / h, 0.0));
    // derivative · U† = −i g·σ/2  ⇒  g·σ = 2i · derivative · U†
    let m = derivative * compose(seq).dagger();
    pauli_components(&m.scale(Complex64::new(0.0, 2.0)))
}

/// The in-plane vector sum
/// `θ₁ n(φ₁+φ₂) + 2π n(φ₃) + 2π n(φ₄) + θ₂ n(φ₁)`.
///
/// This is the first-order amplitude-error generator of the robust `Θ`
/// sequence, expressed in the frame between its first and last pulse.
pub fn quadrilateral_error_vector(d: &ThetaDecomposition, phi3: f64, phi4: f64) -> ErrorVector {
    let two_pi = std::f64::consts::TAU;
    [
        ErrorVector::planar(d.theta1, d.phi1 + d.phi2),
        ErrorVector::planar(two_pi, phi3),
        ErrorVector::planar(two_pi, phi4),
        ErrorVector::planar(d.theta2, d.phi1),
    ]
    .into_iter()
    .sum()
}
