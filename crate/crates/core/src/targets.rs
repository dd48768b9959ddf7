//! Robust sequences for named gates and for arbitrary SU(2) targets.
//!
//! An arbitrary target is factored as `U ≅ Θ·Z_{φ₂}`; the z-rotation is
//! itself a `Θ` built from two π pulses, `Z_φ ≅ (π)_0 (π)_{−φ/2}`, so both
//! factors go through the same quadrilateral construction. In time order the
//! z block comes first.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::corpse::nest;
use crate::error::{Error, Result};
use crate::error_model::ErrorVector;
use crate::planar::{build_robust_theta_with_solution, diagonal_r, QuadSolution, DEGENERATE_R};
use crate::su2::{
    canonical_theta, decompose_target, rotation, wrap_signed, z_rotation, Pulse, Sequence,
    ThetaDecomposition, Unitary2, DISPATCH_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Robustness {
    /// First-order amplitude-error cancellation.
    #[serde(rename = "ae")]
    AmplitudeOnly,
    /// Amplitude and off-resonance cancellation via CORPSE nesting.
    Nested,
}

impl fmt::Display for Robustness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Robustness::AmplitudeOnly => "ae",
            Robustness::Nested => "nested",
        })
    }
}

impl FromStr for Robustness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ae" | "amplitude" => Ok(Robustness::AmplitudeOnly),
            "nested" => Ok(Robustness::Nested),
            other => Err(Error::Parse(format!("unknown robustness level {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetKind {
    Z {
        phi: f64,
    },
    /// `U_H ≅ (π/2)_{3π/2}(π)_0`.
    HadamardAsym,
    /// `U_H ≅ (π/4)_{3π/2}(π)_0(π/4)_{−3π/2}`.
    HadamardSym,
    Planar {
        theta: f64,
        phi: f64,
    },
    Arbitrary(Unitary2),
}

impl TargetKind {
    /// The ideal gate, defined up to global phase.
    pub fn unitary(&self) -> Unitary2 {
        match *self {
            TargetKind::Z { phi } => z_rotation(phi),
            TargetKind::HadamardAsym | TargetKind::HadamardSym => Unitary2::hadamard(),
            TargetKind::Planar { theta, phi } => rotation(theta, phi),
            TargetKind::Arbitrary(u) => u,
        }
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!(
        "{}{}{}j",
        z.re,
        if z.im.is_sign_negative() { "-" } else { "+" },
        z.im.abs()
    )
}

/// Parses `re`, `imj`, `re+imj` or `re-imj` (`i` is accepted for `j`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("invalid complex number {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        return Ok(Complex64::new(num(&s)?, 0.0));
    };
    // split before the last sign that is not the leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let im_of = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        t => num(t),
    };
    match split {
        Some(i) => Ok(Complex64::new(num(&body[..i])?, im_of(&body[i..])?)),
        None => Ok(Complex64::new(0.0, im_of(body)?)),
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetKind::Z { phi } => write!(f, "z(phi={phi})"),
            TargetKind::HadamardAsym => f.write_str("hadamard"),
            TargetKind::HadamardSym => f.write_str("hadamard-sym"),
            TargetKind::Planar { theta, phi } => write!(f, "rot(theta={theta},phi={phi})"),
            TargetKind::Arbitrary(u) => {
                let e: Vec<String> = u.entries().into_iter().map(fmt_complex).collect();
                write!(f, "arbitrary({})", e.join(";"))
            }
        }
    }
}

impl FromStr for TargetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::Parse(format!("invalid target {s:?}: {why}"));
        let (name, args) = match s.find('(') {
            Some(i) => {
                let rest = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| bad("missing ')'"))?;
                (&s[..i], Some(rest))
            }
            None => (s, None),
        };
        let keyed = |args: &str, key: &str| -> Result<f64> {
            args.split(',')
                .filter_map(|kv| kv.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .ok_or_else(|| bad(&format!("missing {key}")))
                .and_then(|(_, v)| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(&format!("bad {key}")))
                })
        };
        match (name, args) {
            ("hadamard", None) => Ok(TargetKind::HadamardAsym),
            ("hadamard-sym", None) => Ok(TargetKind::HadamardSym),
            ("z", Some(a)) => Ok(TargetKind::Z {
                phi: keyed(a, "phi")?,
            }),
            ("rot", Some(a)) => Ok(TargetKind::Planar {
                theta: keyed(a, "theta")?,
                phi: keyed(a, "phi")?,
            }),
            ("arbitrary", Some(a)) => {
                let entries = a
                    .split(';')
                    .map(parse_complex)
                    .collect::<Result<Vec<_>>>()?;
                let arr: [Complex64; 4] = entries
                    .try_into()
                    .map_err(|_| bad("expected four matrix entries"))?;
                Ok(TargetKind::Arbitrary(Unitary2::try_unitary(arr, 1e-9)?))
            }
            _ => Err(bad("unknown target kind")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub robustness: Robustness,
}

/// How a block of a synthesized sequence had its amplitude error cancelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Quadrilateral {
        decomposition: ThetaDecomposition,
        #[serde(flatten)]
        solution: QuadSolution,
    },
    SymmetricHadamard {
        phi1: f64,
        phi2: f64,
        residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub target: Unitary2,
    pub sequence: Sequence,
    pub provenance: Vec<Provenance>,
}

impl Synthesis {
    /// Largest closure residual over all blocks; zero for an empty sequence.
    pub fn closure_residual(&self) -> f64 {
        self.provenance
            .iter()
            .map(|p| match p {
                Provenance::Quadrilateral { solution, .. } => solution.residual,
                Provenance::SymmetricHadamard { residual, .. } => *residual,
            })
            .fold(0.0, f64::max)
    }
}

fn finish(target: Unitary2, seq: Sequence, prov: Vec<Provenance>, rob: Robustness) -> Synthesis {
    let sequence = match rob {
        Robustness::AmplitudeOnly => seq,
        Robustness::Nested => nest(&seq),
    };
    Synthesis {
        target,
        sequence,
        provenance: prov,
    }
}

fn theta_block(d: &ThetaDecomposition) -> Result<(Sequence, Provenance)> {
    let (seq, solution) = build_robust_theta_with_solution(d)?;
    // a zero-angle leg is an exact identity under both error models
    let seq = seq
        .into_inner()
        .into_iter()
        .filter(|p| p.theta() != 0.0)
        .collect();
    Ok((
        seq,
        Provenance::Quadrilateral {
            decomposition: *d,
            solution,
        },
    ))
}

/// `Z_φ ≅ (π)_0 (π)_{−φ/2}` as a `Θ` with `θ₁ = θ₂ = π`, `φ₁ = 0`, `φ₂ = −φ/2`.
pub fn z_decomposition(phi: f64) -> ThetaDecomposition {
    ThetaDecomposition {
        theta1: PI,
        theta2: PI,
        phi1: 0.0,
        phi2: -phi / 2.0,
    }
}

/// `Θ = (π/2)_{3π/2} (π)_0`, a Hadamard up to global phase.
pub fn hadamard_decomposition() -> ThetaDecomposition {
    ThetaDecomposition {
        theta1: PI,
        theta2: FRAC_PI_2,
        phi1: 1.5 * PI,
        phi2: -1.5 * PI,
    }
}

fn synth_z(phi: f64, rob: Robustness) -> Result<Synthesis> {
    let d = z_decomposition(phi);
    // r = 2π|cos(φ/4)|
    if (phi / 4.0).cos().abs() <= DISPATCH_TOL {
        return Err(Error::DegenerateTarget(format!(
            "Z_φ with φ = {phi} is ±identity (φ ≡ 2π mod 4π)"
        )));
    }
    let (seq, prov) = theta_block(&d)?;
    Ok(finish(z_rotation(phi), seq, vec![prov], rob))
}

pub fn robust_z(phi: f64, rob: Robustness) -> Result<Sequence> {
    synth_z(phi, rob).map(|s| s.sequence)
}

fn synth_hadamard_asym(rob: Robustness) -> Synthesis {
    let (seq, prov) = theta_block(&hadamard_decomposition()).expect("Hadamard Θ closes");
    finish(Unitary2::hadamard(), seq, vec![prov], rob)
}

pub fn robust_hadamard_asym(rob: Robustness) -> Sequence {
    synth_hadamard_asym(rob).sequence
}

/// First-order error vector of the symmetric Hadamard sequence with free
/// phases `(φ₁, φ₂)` on its two full turns:
/// `π (2cos φ₁ + 2cos φ₂ + 1, 2sin φ₁ − 2sin φ₂ + 1/2, 0)`.
pub fn symmetric_error_vector(phi1: f64, phi2: f64) -> ErrorVector {
    ErrorVector([
        PI * (2.0 * phi1.cos() + 2.0 * phi2.cos() + 1.0),
        PI * (2.0 * phi1.sin() - 2.0 * phi2.sin() + 0.5),
        0.0,
    ])
}

/// The root `(α, β)` of [`symmetric_error_vector`]:
/// `α = arccos((−10 − √295)/40)`, `β = arccos((−10 + √295)/40)`.
pub fn symmetric_hadamard_phases() -> (f64, f64) {
    let s = 295f64.sqrt();
    (((-10.0 - s) / 40.0).acos(), ((-10.0 + s) / 40.0).acos())
}

/// Time order: `(π/4)_{−3π/2}, (2π)_{φ₁}, (π)_0, (2π)_{φ₂}, (π/4)_{3π/2}`.
pub fn symmetric_hadamard_sequence(phi1: f64, phi2: f64) -> Sequence {
    Sequence::from_pulses(vec![
        Pulse::new(FRAC_PI_4, -1.5 * PI),
        Pulse::new(TAU, phi1),
        Pulse::new(PI, 0.0),
        Pulse::new(TAU, phi2),
        Pulse::new(FRAC_PI_4, 1.5 * PI),
    ])
}

fn synth_hadamard_sym(rob: Robustness) -> Synthesis {
    let (alpha, beta) = symmetric_hadamard_phases();
    let residual = symmetric_error_vector(alpha, beta).norm();
    let prov = Provenance::SymmetricHadamard {
        phi1: alpha,
        phi2: beta,
        residual,
    };
    finish(
        Unitary2::hadamard(),
        symmetric_hadamard_sequence(alpha, beta),
        vec![prov],
        rob,
    )
}

pub fn robust_hadamard_sym(rob: Robustness) -> Sequence {
    synth_hadamard_sym(rob).sequence
}

fn synth_planar(theta: f64, phi: f64, rob: Robustness) -> Result<Synthesis> {
    let target = rotation(theta, phi);
    let (mut theta, mut phi) = (theta, phi);
    if theta < 0.0 {
        // (−θ)_φ = (θ)_{φ+π}
        theta = -theta;
        phi += PI;
    }
    // up to global phase (θ)_φ ≅ (θ − 2π)_φ
    let theta = canonical_theta(theta) % TAU;
    if theta < DISPATCH_TOL || TAU - theta < DISPATCH_TOL {
        return Ok(Synthesis {
            target,
            sequence: Sequence::new(),
            provenance: vec![],
        });
    }
    let d = ThetaDecomposition::new(theta, 0.0, phi, 0.0)?;
    let (seq, prov) = theta_block(&d)?;
    Ok(finish(target, seq, vec![prov], rob))
}

/// Robust planar rotation `(θ)_φ`: the pulse plus two compensating full turns.
pub fn robust_planar(theta: f64, phi: f64, rob: Robustness) -> Result<Sequence> {
    synth_planar(theta, phi, rob).map(|s| s.sequence)
}

fn synth_arbitrary(u: &Unitary2, rob: Robustness) -> Result<Synthesis> {
    if !u.is_unitary(1e-9) {
        return Err(Error::NotUnitary(format!("{u}")));
    }
    let (d, zphase) = decompose_target(u)?;
    let zphase = wrap_signed(zphase);
    let mut seq = Sequence::new();
    let mut provenance = Vec::new();

    if zphase.abs() >= DISPATCH_TOL {
        let z = synth_z(zphase, Robustness::AmplitudeOnly)?;
        seq = seq.then(z.sequence);
        provenance.extend(z.provenance);
    }
    if diagonal_r(&d) >= DEGENERATE_R {
        let (theta, prov) = theta_block(&d)?;
        seq = seq.then(theta);
        provenance.push(prov);
    }
    Ok(finish(*u, seq, provenance, rob))
}

/// Robust sequence for any single-qubit gate: the robust `Z_{φ₂}` followed by
/// the robust `Θ`. Identity, pure z-rotations and planar rotations collapse to
/// the shorter special cases.
pub fn robust_arbitrary(u: &Unitary2, rob: Robustness) -> Result<Sequence> {
    synth_arbitrary(u, rob).map(|s| s.sequence)
}

pub fn synthesize(spec: &TargetSpec) -> Result<Synthesis> {
    let rob = spec.robustness;
    match spec.kind {
        TargetKind::Z { phi } => synth_z(phi, rob),
        TargetKind::HadamardAsym => Ok(synth_hadamard_asym(rob)),
        TargetKind::HadamardSym => Ok(synth_hadamard_sym(rob)),
        TargetKind::Planar { theta, phi } => synth_planar(theta, phi, rob),
        TargetKind::Arbitrary(u) => synth_arbitrary(&u, rob),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::time_cost;
    use crate::error_model::amplitude_error_generator;
    use crate::planar::solve_quadrilateral;
    use crate::su2::{compose, infidelity, SYNTH_TOL};

    #[test]
    fn z_pi_amplitude_only() {
        let seq = robust_z(PI, Robustness::AmplitudeOnly).unwrap();
        assert_eq!(seq.len(), 4);
        assert!((time_cost(&seq) - 6.0).abs() < 1e-12);
        assert!(infidelity(&z_rotation(PI), &compose(&seq)) < SYNTH_TOL);
        assert!(amplitude_error_generator(&seq).norm() < 1e-4);
        let sol = solve_quadrilateral(&z_decomposition(PI)).unwrap();
        assert!((sol.phi3 - 1.1468).abs() < 1e-4);
        assert!((sol.phi4 - 3.5657).abs() < 1e-4);
    }

    #[test]
    fn z_pi_nested() {
        let seq = robust_z(PI, Robustness::Nested).unwrap();
        assert_eq!(seq.len(), 8);
        assert!((time_cost(&seq) - 38.0 / 3.0).abs() < 1e-12);
        assert!(infidelity(&z_rotation(PI), &compose(&seq)) < SYNTH_TOL);
    }

    #[test]
    fn z_identity_is_valid_and_full_turn_is_degenerate() {
        let seq = robust_z(0.0, Robustness::AmplitudeOnly).unwrap();
        assert!(infidelity(&Unitary2::identity(), &compose(&seq)) < SYNTH_TOL);
        for phi in [TAU, -TAU, 3.0 * TAU] {
            assert!(matches!(
                robust_z(phi, Robustness::AmplitudeOnly),
                Err(Error::DegenerateTarget(_))
            ));
        }
    }

    #[test]
    fn hadamard_asym() {
        let ae = robust_hadamard_asym(Robustness::AmplitudeOnly);
        assert_eq!(ae.len(), 4);
        assert!((time_cost(&ae) - 5.5).abs() < 1e-12);
        assert!((ae.pulses()[1].phi() - 1.39).abs() < 0.005);
        assert!((ae.pulses()[2].phi() - 3.97).abs() < 0.005);
        let nested = robust_hadamard_asym(Robustness::Nested);
        assert_eq!(nested.len(), 8);
        assert!((time_cost(&nested) - 12.4).abs() < 0.05);
        for s in [&ae, &nested] {
            assert!(infidelity(&Unitary2::hadamard(), &compose(s)) < SYNTH_TOL);
        }
    }

    #[test]
    fn hadamard_sym() {
        let (a, b) = symmetric_hadamard_phases();
        assert!((a - 2.32).abs() < 0.005 && (b - 1.39).abs() < 0.005);
        assert!(symmetric_error_vector(a, b).norm() < 1e-10);
        let ae = robust_hadamard_sym(Robustness::AmplitudeOnly);
        assert_eq!(ae.len(), 5);
        assert!((time_cost(&ae) - 5.5).abs() < 1e-12);
        assert!(amplitude_error_generator(&ae).norm() < 1e-4);
        assert!(infidelity(&Unitary2::hadamard(), &compose(&ae)) < SYNTH_TOL);
        let nested = robust_hadamard_sym(Robustness::Nested);
        assert_eq!(nested.len(), 11);
        assert!((time_cost(&nested) - 16.3).abs() < 0.05);
    }

    #[test]
    fn symmetric_sequence_commutes_through_pi() {
        // (θ)_φ(π)_0 = (π)_0(θ)_{−φ} turns the symmetric sequence into
        // (π/4)_{3π/2}(π)_0 · W-shaped interior
        let (a, b) = symmetric_hadamard_phases();
        let seq = symmetric_hadamard_sequence(a, b);
        let moved = Sequence::from_pulses(vec![
            Pulse::new(FRAC_PI_4, -1.5 * PI),
            Pulse::new(TAU, a),
            Pulse::new(TAU, -b),
            Pulse::new(PI, 0.0),
            Pulse::new(FRAC_PI_4, 1.5 * PI),
        ]);
        assert!(compose(&seq).max_abs_diff(&compose(&moved)) < 1e-12);
    }

    #[test]
    fn planar_targets() {
        let seq = robust_planar(1.2, 0.5, Robustness::AmplitudeOnly).unwrap();
        assert_eq!(seq.len(), 3);
        assert!(infidelity(&rotation(1.2, 0.5), &compose(&seq)) < SYNTH_TOL);
        assert!(amplitude_error_generator(&seq).norm() < 1e-4);
        let big = robust_planar(9.0, -0.5, Robustness::Nested).unwrap();
        assert!(infidelity(&rotation(9.0, -0.5), &compose(&big)) < SYNTH_TOL);
        let neg = robust_planar(-1.0, 0.3, Robustness::AmplitudeOnly).unwrap();
        assert!(infidelity(&rotation(-1.0, 0.3), &compose(&neg)) < SYNTH_TOL);
        assert!(robust_planar(TAU, 0.1, Robustness::Nested)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn arbitrary_dispatch() {
        let id = robust_arbitrary(&Unitary2::identity(), Robustness::Nested).unwrap();
        assert!(id.is_empty());
        let z = robust_arbitrary(&z_rotation(1.0), Robustness::AmplitudeOnly).unwrap();
        assert_eq!(z.len(), 4);
        let r = robust_arbitrary(&rotation(2.0, 1.0), Robustness::AmplitudeOnly).unwrap();
        assert_eq!(r.len(), 3);
        let h = robust_arbitrary(&Unitary2::hadamard(), Robustness::AmplitudeOnly).unwrap();
        assert_eq!(h.len(), 8);
        assert!(infidelity(&Unitary2::hadamard(), &compose(&h)) < SYNTH_TOL);
        assert!(amplitude_error_generator(&h).norm() < 2e-4);
    }

    #[test]
    fn arbitrary_rejects_non_unitary() {
        let m = Unitary2::identity().scale(Complex64::new(2.0, 0.0));
        assert!(matches!(
            robust_arbitrary(&m, Robustness::Nested),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn target_text_round_trip() {
        let kinds = [
            TargetKind::HadamardAsym,
            TargetKind::HadamardSym,
            TargetKind::Z { phi: 0.1 + 0.2 },
            TargetKind::Planar {
                theta: 1e-20,
                phi: -3.5,
            },
            TargetKind::Arbitrary(rotation(0.3, 0.7) * z_rotation(-1.1)),
        ];
        for k in kinds {
            let back: TargetKind = k.to_string().parse().unwrap();
            assert_eq!(back, k, "{k}");
        }
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("-2.5j").unwrap(), Complex64::new(0.0, -2.5));
        assert_eq!(
            parse_complex("0.5-0.25j").unwrap(),
            Complex64::new(0.5, -0.25)
        );
        assert_eq!(
            parse_complex("1e-3+2E+1j").unwrap(),
            Complex64::new(1e-3, 20.0)
        );
        assert_eq!(parse_complex("-j").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("3 + 4i").unwrap(), Complex64::new(3.0, 4.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn target_parse_errors() {
        for s in [
            "z",
            "z(theta=1)",
            "rot(theta=1)",
            "bogus",
            "arbitrary(1;0;0)",
            "arbitrary(1;1;0;1)",
        ] {
            assert!(s.parse::<TargetKind>().is_err(), "{s}");
        }
    }
}
