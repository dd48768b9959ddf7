//! Infidelity sweeps, time-cost accounting, scaling exponents and the
//! reference table of reference pulse counts and time costs.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpse::{corpse_k, FULL_TURN_TOL};
use crate::error::{Error, Result};
use crate::error_model::{faulty_compose, ErrorParams};
use crate::su2::{infidelity, Sequence, ThetaDecomposition, Unitary2};
use crate::targets::Robustness;

/// Slope window used by every robustness check.
pub const SLOPE_WINDOW: (f64, f64) = (1e-3, 1e-2);
/// Minimum slope accepted as second-order (or better) robustness.
pub const ROBUST_SLOPE: f64 = 3.5;
/// Infidelities below this are rounding noise and are left out of fits.
pub const INFIDELITY_FLOOR: f64 = 1e-14;
/// Points sampled per scaling fit.
pub const SLOPE_POINTS: usize = 8;

/// Total flip angle in units of π.
pub fn time_cost(seq: &Sequence) -> f64 {
    seq.iter().map(|p| p.theta().abs() / PI).sum()
}

/// Closed-form time cost of the robust `Θ` sequence for `d`.
///
/// Amplitude-only: `4 + (θ₁ + θ₂)/π`. Nested: `12 + [θ₁ + θ₂ − 4(k₁ + k₂)]/π`
/// with `kᵢ = arcsin(sin(θᵢ/2)/2)`. Legs that nesting leaves alone (zero
/// angle or a full turn) contribute only `θᵢ/π`.
pub fn predicted_time_cost(d: &ThetaDecomposition, rob: Robustness) -> f64 {
    let legs = [d.theta1, d.theta2];
    match rob {
        Robustness::AmplitudeOnly => 4.0 + legs.iter().sum::<f64>() / PI,
        Robustness::Nested => {
            4.0 + legs
                .iter()
                .map(|&t| {
                    if t == 0.0 || (t - TAU).abs() < FULL_TURN_TOL {
                        t / PI
                    } else {
                        4.0 + (t - 4.0 * corpse_k(t)) / PI
                    }
                })
                .sum::<f64>()
        }
    }
}

/// Infidelity as a function of `(f, ε)`; rows are `f` values, columns `ε` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub target_id: String,
    pub sequence_id: String,
    pub epsilons: Vec<f64>,
    pub fs: Vec<f64>,
    pub infidelity: Vec<Vec<f64>>,
}

impl SweepGrid {
    pub fn at(&self, f_index: usize, eps_index: usize) -> f64 {
        self.infidelity[f_index][eps_index]
    }

    /// Rows of `(f, ε, infidelity)` with `f` outermost.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.fs
            .iter()
            .zip(&self.infidelity)
            .flat_map(move |(&f, row)| self.epsilons.iter().zip(row).map(move |(&e, &v)| (f, e, v)))
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Default amplitude-error axis: `[−0.2, 0.2]` at 81 points.
pub fn default_epsilons() -> Vec<f64> {
    linspace(-0.2, 0.2, 81)
}

/// Default off-resonance values `{0, 0.001, 0.01, 0.1}`.
pub fn default_fs() -> Vec<f64> {
    vec![0.0, 0.001, 0.01, 0.1]
}

/// Evaluates every grid cell independently (in parallel). The result does not
/// depend on evaluation order.
pub fn sweep(target: &Unitary2, seq: &Sequence, epsilons: &[f64], fs: &[f64]) -> SweepGrid {
    sweep_labeled(target, seq, epsilons, fs, "target", "sequence")
}

pub fn sweep_labeled(
    target: &Unitary2,
    seq: &Sequence,
    epsilons: &[f64],
    fs: &[f64],
    target_id: &str,
    sequence_id: &str,
) -> SweepGrid {
    let infidelity = fs
        .par_iter()
        .map(|&f| {
            epsilons
                .par_iter()
                .map(|&e| infidelity(target, &faulty_compose(seq, ErrorParams::new(e, f))))
                .collect()
        })
        .collect();
    SweepGrid {
        target_id: target_id.to_owned(),
        sequence_id: sequence_id.to_owned(),
        epsilons: epsilons.to_vec(),
        fs: fs.to_vec(),
        infidelity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorAxis {
    Epsilon,
    F,
}

/// Least-squares slope of `log I` against `log x` over
/// [`SLOPE_POINTS`] log-spaced points of `window`, with the other error held
/// at zero. Points below [`INFIDELITY_FLOOR`] are dropped.
pub fn scaling_exponent(
    seq: &Sequence,
    target: &Unitary2,
    axis: ErrorAxis,
    window: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InsufficientData(format!(
            "invalid window [{lo}, {hi}]"
        )));
    }
    let points: Vec<(f64, f64)> = logspace(lo, hi, SLOPE_POINTS)
        .into_iter()
        .filter_map(|x| {
            let err = match axis {
                ErrorAxis::Epsilon => ErrorParams::amplitude(x),
                ErrorAxis::F => ErrorParams::off_resonance(x),
            };
            let i = infidelity(target, &faulty_compose(seq, err));
            (i >= INFIDELITY_FLOOR).then(|| (x.ln(), i.ln()))
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} of {SLOPE_POINTS} points above the numerical floor",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    Hadamard,
    #[serde(rename = "z")]
    ZPhi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorClasses {
    pub amplitude: bool,
    pub off_resonance: bool,
}

impl ErrorClasses {
    pub const AE: ErrorClasses = ErrorClasses {
        amplitude: true,
        off_resonance: false,
    };
    pub const AE_ORE: ErrorClasses = ErrorClasses {
        amplitude: true,
        off_resonance: true,
    };

    pub fn label(&self) -> &'static str {
        match (self.amplitude, self.off_resonance) {
            (true, true) => "AE, ORE",
            (true, false) => "AE",
            (false, true) => "ORE",
            (false, false) => "-",
        }
    }
}

/// One reference (sequence, gate) cell: pulse count and time cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub gate: Gate,
    pub pulses: usize,
    pub time_cost: f64,
    pub robustness: ErrorClasses,
}

/// Two full turns between the legs of `Θ`.
pub const PLANAR: &str = "planar";
/// The symmetric Hadamard with interleaved full turns.
pub const PLANAR_SYM: &str = "planar-sym";
pub const NESTED_PLANAR: &str = "nested planar";
pub const NESTED_PLANAR_SYM: &str = "nested planar-sym";

/// Row names in catalog order.
pub const CATALOG_ROWS: [&str; 10] = [
    PLANAR,
    PLANAR_SYM,
    "SCROFULOUS",
    "SK1",
    "BB1",
    NESTED_PLANAR,
    NESTED_PLANAR_SYM,
    "reduced CinSK",
    "reduced CinBB",
    "reduced SKinsC",
];

/// Reference pulse counts and time costs for Hadamard and `Z_φ`.
///
/// Rows for sequences this crate does not construct are stored verbatim.
pub fn table1_catalog() -> Vec<CatalogEntry> {
    use Gate::*;
    let ae = ErrorClasses::AE;
    let both = ErrorClasses::AE_ORE;
    type Cell = Option<(usize, f64)>;
    let rows: [(&'static str, Cell, Cell, ErrorClasses); 10] = [
        (PLANAR, Some((4, 5.5)), Some((4, 6.0)), ae),
        (PLANAR_SYM, Some((5, 5.5)), None, ae),
        ("SCROFULOUS", Some((6, 5.3)), Some((6, 6.0)), ae),
        ("SK1", Some((6, 9.5)), Some((6, 10.0)), ae),
        ("BB1", Some((8, 9.5)), Some((8, 10.0)), ae),
        (NESTED_PLANAR, Some((8, 12.4)), Some((8, 12.7)), both),
        (NESTED_PLANAR_SYM, Some((11, 16.3)), None, both),
        ("reduced CinSK", Some((10, 16.4)), Some((10, 16.7)), both),
        ("reduced CinBB", Some((12, 16.4)), Some((12, 16.7)), both),
        ("reduced SKinsC", Some((12, 12.4)), Some((12, 12.7)), both),
    ];
    rows.into_iter()
        .flat_map(|(name, h, z, robustness)| {
            [(Hadamard, h), (ZPhi, z)]
                .into_iter()
                .filter_map(move |(gate, cell)| {
                    cell.map(|(pulses, time_cost)| CatalogEntry {
                        name,
                        gate,
                        pulses,
                        time_cost,
                        robustness,
                    })
                })
        })
        .collect()
}

pub fn lookup(name: &str, gate: Gate) -> Option<CatalogEntry> {
    table1_catalog()
        .into_iter()
        .find(|e| e.name == name && e.gate == gate)
}

/// Pulse count and time cost of the sequence this crate builds for a
/// catalog cell, or `None` for sequences it does not construct.
pub fn recompute_catalog_entry(name: &str, gate: Gate) -> Option<(usize, f64)> {
    use crate::targets::{robust_hadamard_asym, robust_hadamard_sym, robust_z};
    let z = |rob| robust_z(PI, rob).expect("Z_π is not degenerate");
    let seq = match (name, gate) {
        (PLANAR, Gate::Hadamard) => robust_hadamard_asym(Robustness::AmplitudeOnly),
        (PLANAR, Gate::ZPhi) => z(Robustness::AmplitudeOnly),
        (PLANAR_SYM, Gate::Hadamard) => robust_hadamard_sym(Robustness::AmplitudeOnly),
        (NESTED_PLANAR, Gate::Hadamard) => robust_hadamard_asym(Robustness::Nested),
        (NESTED_PLANAR, Gate::ZPhi) => z(Robustness::Nested),
        (NESTED_PLANAR_SYM, Gate::Hadamard) => robust_hadamard_sym(Robustness::Nested),
        _ => return None,
    };
    Some((seq.len(), time_cost(&seq)))
}

/// Rounds to one decimal place.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}
