//! Analytic ground-state theory of the anisotropic Rabi model in the limit of
//! an infinite effective frequency ratio.
//!
//! Points are addressed by reduced couplings `lambda = g_r / g_c` and
//! `mu = g_cr / g_c`. Five phases exist: normal (N), superradiant-x (SX),
//! superradiant-p (SP) and the two gapless lines SXPa (`g_r = 0`) and SXPb
//! (`g_cr = 0`). Frequencies enter through their magnitudes so that models
//! with negative effective frequencies keep a real spectrum.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::EffectiveModel;
use crate::value::Value;

/// Default tolerance for on-boundary detection.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Finite-difference step in the reduced couplings.
pub const DERIVATIVE_STEP: f64 = 1e-4;

const RADICAND_SLACK: f64 = 1e-14;
const PATH_SAMPLES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PhaseError {
    #[error("critical coupling g_c is zero; reduced couplings are undefined")]
    ZeroCritical,
    #[error("point (lambda = {lambda}, mu = {mu}) lies on a phase boundary")]
    AmbiguousBoundary { lambda: f64, mu: f64 },
    #[error("{quantity} is not defined in the {phase} phase at (lambda = {lambda}, mu = {mu})")]
    OutOfPhaseDomain {
        phase: PhaseLabel,
        quantity: &'static str,
        lambda: f64,
        mu: f64,
    },
    #[error("anisotropy epsilon is undefined for g_r = 0")]
    NeedsEpsilonSign,
    #[error("finite-difference stencil at (lambda = {lambda}, mu = {mu}) crosses a phase boundary")]
    BoundaryTooClose { lambda: f64, mu: f64 },
    #[error("path does not cross a phase boundary")]
    NoTransition,
    #[error("path crosses {0} phase boundaries; expected exactly one")]
    MultipleBoundaries(usize),
    #[error("derivative jumps are below both classification thresholds")]
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCouplings {
    pub lambda: f64,
    pub mu: f64,
    /// `(lambda + mu) / 2`
    pub zeta: f64,
    /// `(lambda - mu) / 2`
    pub zeta_prime: f64,
}

impl ReducedCouplings {
    pub fn new(lambda: f64, mu: f64) -> Self {
        Self {
            lambda,
            mu,
            zeta: (lambda + mu) / 2.0,
            zeta_prime: (lambda - mu) / 2.0,
        }
    }

    pub fn from_model(model: &EffectiveModel) -> Result<Self, PhaseError> {
        if model.g_c == 0.0 {
            return Err(PhaseError::ZeroCritical);
        }
        Ok(Self::new(model.g_r / model.g_c, model.g_cr / model.g_c))
    }

    /// `mu / lambda`.
    pub fn epsilon(&self) -> Value {
        if self.lambda == 0.0 {
            Value::Infinite
        } else {
            Value::Finite(self.mu / self.lambda)
        }
    }
}

pub fn reduced_couplings(model: &EffectiveModel) -> Result<ReducedCouplings, PhaseError> {
    ReducedCouplings::from_model(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    Normal,
    Sx,
    Sp,
    SxpA,
    SxpB,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Normal => "N",
            PhaseLabel::Sx => "SX",
            PhaseLabel::Sp => "SP",
            PhaseLabel::SxpA => "SXPa",
            PhaseLabel::SxpB => "SXPb",
        }
    }

    pub fn is_superradiant(self) -> bool {
        self != PhaseLabel::Normal
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Frequency magnitudes the closed forms are evaluated with.
#[derive(Debug, Clone, Copy)]
struct Scales {
    w0: f64,
    wc: f64,
    eta: f64,
    g_c: f64,
}

impl Scales {
    fn of(model: &EffectiveModel) -> Self {
        Self {
            w0: model.omega0_eff.abs(),
            wc: model.omega_c_eff.abs(),
            eta: model.eta_eff.abs(),
            g_c: model.g_c,
        }
    }
}

pub fn classify_phase(rc: &ReducedCouplings, tol: f64) -> Result<PhaseLabel, PhaseError> {
    let ambiguous = PhaseError::AmbiguousBoundary {
        lambda: rc.lambda,
        mu: rc.mu,
    };
    let radius = rc.lambda.abs() + rc.mu.abs();
    if (radius - 2.0).abs() <= tol {
        return Err(ambiguous);
    }
    if radius < 2.0 {
        return Ok(PhaseLabel::Normal);
    }
    superradiant_label(rc, tol).ok_or(ambiguous)
}

/// SX/SP/SXPa/SXPb by the sign rule alone, ignoring the normal region.
fn superradiant_label(rc: &ReducedCouplings, tol: f64) -> Option<PhaseLabel> {
    if rc.lambda.abs() <= tol {
        return Some(PhaseLabel::SxpA);
    }
    if rc.mu.abs() <= tol {
        return Some(PhaseLabel::SxpB);
    }
    // zeta² - zeta'² = lambda mu
    let split = rc.lambda * rc.mu;
    if split.abs() <= tol {
        None
    } else if split > 0.0 {
        Some(PhaseLabel::Sx)
    } else {
        Some(PhaseLabel::Sp)
    }
}

/// Label whose closed forms describe the point, resolving boundaries by
/// continuity: the normal branch on the normal boundary, SX on the
/// SX/SP line.
fn continuous_branch(rc: &ReducedCouplings) -> PhaseLabel {
    match classify_phase(rc, DEFAULT_TOL) {
        Ok(label) => label,
        Err(_) if ((rc.lambda.abs() + rc.mu.abs()) - 2.0).abs() <= DEFAULT_TOL => PhaseLabel::Normal,
        Err(_) => PhaseLabel::Sx,
    }
}

fn checked_sqrt(x: f64, phase: PhaseLabel, quantity: &'static str, rc: &ReducedCouplings) -> Result<f64, PhaseError> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -RADICAND_SLACK {
        Ok(0.0)
    } else {
        Err(PhaseError::OutOfPhaseDomain {
            phase,
            quantity,
            lambda: rc.lambda,
            mu: rc.mu,
        })
    }
}

fn excitation_in(label: PhaseLabel, rc: &ReducedCouplings, s: &Scales) -> Result<f64, PhaseError> {
    let (z, zp) = (rc.zeta, rc.zeta_prime);
    let radicand = match label {
        PhaseLabel::Normal => (1.0 - z * z) * (1.0 - zp * zp),
        PhaseLabel::Sx => (1.0 - z.powi(-4)) * (1.0 - (zp / z).powi(2)),
        PhaseLabel::Sp => (1.0 - zp.powi(-4)) * (1.0 - (z / zp).powi(2)),
        PhaseLabel::SxpA | PhaseLabel::SxpB => return Ok(0.0),
    };
    Ok(s.wc * checked_sqrt(radicand, label, "excitation energy", rc)?)
}

/// Lowest excitation energy; exactly zero on the normal boundary and on the
/// Goldstone lines.
pub fn excitation_energy(rc: &ReducedCouplings, model: &EffectiveModel) -> Result<f64, PhaseError> {
    match classify_phase(rc, DEFAULT_TOL) {
        Ok(label) => excitation_in(label, rc, &Scales::of(model)),
        // both adjacent branches close the gap on every boundary
        Err(PhaseError::AmbiguousBoundary { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParameters {
    pub x_mean: f64,
    pub p_mean: f64,
    pub var_x: Value,
    pub var_p: Value,
}

/// `s(x) = sqrt(eta/2 (x² - 1/x²))`.
fn order_s(x: f64, s: &Scales, phase: PhaseLabel, rc: &ReducedCouplings) -> Result<f64, PhaseError> {
    checked_sqrt(s.eta / 2.0 * (x * x - 1.0 / (x * x)), phase, "order parameter", rc)
}

/// `v(x1, x2) = (1/2) sqrt((1 - x2²) / (1 - x1²))`.
fn order_v(x1: f64, x2: f64, rc: &ReducedCouplings) -> Result<f64, PhaseError> {
    let den = 1.0 - x1 * x1;
    if den <= 0.0 {
        return Err(PhaseError::OutOfPhaseDomain {
            phase: PhaseLabel::Normal,
            quantity: "variance",
            lambda: rc.lambda,
            mu: rc.mu,
        });
    }
    Ok(0.5 * checked_sqrt((1.0 - x2 * x2) / den, PhaseLabel::Normal, "variance", rc)?)
}

/// `w(x1, x2) = sqrt(x1) / (1 + x1) * x2² / sqrt(x2⁴ - 1)`.
fn order_w(x1: f64, x2: f64, phase: PhaseLabel, rc: &ReducedCouplings) -> Result<f64, PhaseError> {
    let root = checked_sqrt(x1, phase, "variance", rc)?;
    let tail = checked_sqrt(x2.powi(4) - 1.0, phase, "variance", rc)?;
    if tail == 0.0 {
        return Err(PhaseError::OutOfPhaseDomain {
            phase,
            quantity: "variance",
            lambda: rc.lambda,
            mu: rc.mu,
        });
    }
    Ok(root / (1.0 + x1) * x2 * x2 / tail)
}

/// Quadrature means and variances with `x = (a + a^dag)/sqrt2`,
/// `p = i(a^dag - a)/sqrt2`. Means take the positive branch.
pub fn order_parameters(rc: &ReducedCouplings, model: &EffectiveModel) -> Result<OrderParameters, PhaseError> {
    let label = classify_phase(rc, DEFAULT_TOL)?;
    let s = Scales::of(model);
    let (z, zp) = (rc.zeta, rc.zeta_prime);
    let op = match label {
        PhaseLabel::Normal => OrderParameters {
            x_mean: 0.0,
            p_mean: 0.0,
            var_x: Value::Finite(order_v(z, zp, rc)?),
            var_p: Value::Finite(order_v(zp, z, rc)?),
        },
        PhaseLabel::Sx => {
            let eps = rc.epsilon().finite().ok_or(PhaseError::NeedsEpsilonSign)?;
            let w = order_w(eps, z, label, rc)?;
            OrderParameters {
                x_mean: order_s(z, &s, label, rc)?,
                p_mean: 0.0,
                var_x: Value::Finite(w),
                var_p: Value::Finite(1.0 / (4.0 * w)),
            }
        }
        PhaseLabel::Sp => {
            let eps = rc.epsilon().finite().ok_or(PhaseError::NeedsEpsilonSign)?;
            let w = order_w(-eps, zp, label, rc)?;
            OrderParameters {
                x_mean: 0.0,
                p_mean: order_s(zp, &s, label, rc)?,
                var_x: Value::Finite(1.0 / (4.0 * w)),
                var_p: Value::Finite(w),
            }
        }
        PhaseLabel::SxpA => OrderParameters {
            x_mean: order_s(rc.mu / 2.0, &s, label, rc)?,
            p_mean: 0.0,
            var_x: Value::Finite(0.0),
            var_p: Value::Infinite,
        },
        PhaseLabel::SxpB => OrderParameters {
            x_mean: order_s(rc.lambda / 2.0, &s, label, rc)?,
            p_mean: 0.0,
            var_x: Value::Finite(0.0),
            var_p: Value::Infinite,
        },
    };
    Ok(op)
}

/// Displacement and rescaled qubit frequency of a superradiant phase, with
/// the coupling prefactors `chi_1(z) = sqrt2 g_c / z`, `chi_2(z) = sqrt2 g_c z`
/// and `chi_3 = g_c / sqrt2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperradiantFrame {
    pub label: PhaseLabel,
    /// `|alpha_k|`
    pub alpha: f64,
    /// `Omega_k`
    pub omega_k: f64,
    /// SX: `chi_1(zeta)`; SP: `chi_1(zeta')`; absent on the gapless lines.
    pub chi1: Option<f64>,
    /// SX: `chi_2(zeta')`; SP: `chi_2(zeta)`; absent on the gapless lines.
    pub chi2: Option<f64>,
    pub chi3: f64,
}

pub fn displacement_and_qubit_freq(
    rc: &ReducedCouplings,
    model: &EffectiveModel,
) -> Result<SuperradiantFrame, PhaseError> {
    let label = match classify_phase(rc, DEFAULT_TOL) {
        Ok(PhaseLabel::Normal) => {
            return Err(PhaseError::OutOfPhaseDomain {
                phase: PhaseLabel::Normal,
                quantity: "displacement",
                lambda: rc.lambda,
                mu: rc.mu,
            })
        }
        Ok(label) => label,
        // on the onset boundary the superradiant branch is continued down to alpha = 0
        Err(e @ PhaseError::AmbiguousBoundary { .. }) => superradiant_label(rc, DEFAULT_TOL).ok_or(e)?,
        Err(e) => return Err(e),
    };
    let s = Scales::of(model);
    let (z, zp) = (rc.zeta, rc.zeta_prime);
    let chi1 = |x: f64| std::f64::consts::SQRT_2 * s.g_c / x;
    let chi2 = |x: f64| std::f64::consts::SQRT_2 * s.g_c * x;
    let chi3 = s.g_c / std::f64::consts::SQRT_2;
    let frame = match label {
        PhaseLabel::Sx => SuperradiantFrame {
            label,
            alpha: order_s(z, &s, label, rc)?,
            omega_k: s.w0 * z * z,
            chi1: Some(chi1(z)),
            chi2: Some(chi2(zp)),
            chi3,
        },
        PhaseLabel::Sp => SuperradiantFrame {
            label,
            alpha: order_s(zp, &s, label, rc)?,
            omega_k: s.w0 * zp * zp,
            chi1: Some(chi1(zp)),
            chi2: Some(chi2(z)),
            chi3,
        },
        PhaseLabel::SxpA | PhaseLabel::SxpB => {
            let c = if label == PhaseLabel::SxpA { rc.mu } else { rc.lambda };
            let alpha = checked_sqrt(s.eta * (c * c / 16.0 - 1.0 / (c * c)), label, "displacement", rc)?;
            // g² / wc with g = c g_c
            let g = c * s.g_c;
            SuperradiantFrame {
                label,
                alpha,
                omega_k: g * g / s.wc,
                chi1: None,
                chi2: None,
                chi3,
            }
        }
        PhaseLabel::Normal => unreachable!(),
    };
    Ok(frame)
}

fn energy_in(label: PhaseLabel, rc: &ReducedCouplings, s: &Scales) -> Result<f64, PhaseError> {
    let (z, zp) = (rc.zeta, rc.zeta_prime);
    let (w0, wc) = (s.w0, s.wc);
    let e = match label {
        PhaseLabel::Normal => excitation_in(label, rc, s)? / 2.0 + wc / 2.0 * z * zp - w0 / 2.0 - wc / 2.0,
        PhaseLabel::Sx => {
            excitation_in(label, rc, s)? / 2.0 + wc / 2.0 * zp / z.powi(3)
                - w0 / 4.0 * (z * z + 1.0 / (z * z))
                - wc / 2.0
        }
        PhaseLabel::Sp => {
            excitation_in(label, rc, s)? / 2.0 + wc / 2.0 * z / zp.powi(3)
                - w0 / 4.0 * (zp * zp + 1.0 / (zp * zp))
                - wc / 2.0
        }
        PhaseLabel::SxpA => {
            let m2 = rc.mu * rc.mu;
            -wc / 2.0 * (1.0 + 4.0 / m2) - w0 * (m2 / 16.0 + 1.0 / m2)
        }
        PhaseLabel::SxpB => {
            let l2 = rc.lambda * rc.lambda;
            -wc / 2.0 * (1.0 - 4.0 / l2) - w0 * (l2 / 16.0 + 1.0 / l2)
        }
    };
    Ok(e)
}

/// Leading-order ground energy: the part of [`ground_energy`] that scales
/// with the qubit frequency, i.e. its value for `wc / w0 -> 0` at fixed
/// reduced couplings. The zero-point terms proportional to `wc` carry
/// square-root cusps at the boundaries that vanish in this limit.
fn limit_energy_in(label: PhaseLabel, rc: &ReducedCouplings, s: &Scales) -> f64 {
    let (z, zp) = (rc.zeta, rc.zeta_prime);
    let quartic = |x: f64| x * x / 16.0 + 1.0 / (x * x);
    match label {
        PhaseLabel::Normal => -s.w0 / 2.0,
        PhaseLabel::Sx => -s.w0 / 4.0 * (z * z + 1.0 / (z * z)),
        PhaseLabel::Sp => -s.w0 / 4.0 * (zp * zp + 1.0 / (zp * zp)),
        PhaseLabel::SxpA => -s.w0 * quartic(rc.mu),
        PhaseLabel::SxpB => -s.w0 * quartic(rc.lambda),
    }
}

/// Ground-state energy `E_G` of the point's phase. Continuous across every
/// boundary; on-boundary points are evaluated by continuity.
pub fn ground_energy(rc: &ReducedCouplings, model: &EffectiveModel) -> Result<f64, PhaseError> {
    energy_in(continuous_branch(rc), rc, &Scales::of(model))
}

/// Leading-order ground energy (see [`ground_energy`]), the quantity whose
/// derivative discontinuities classify the transitions.
pub fn ground_energy_limit(rc: &ReducedCouplings, model: &EffectiveModel) -> f64 {
    limit_energy_in(continuous_branch(rc), rc, &Scales::of(model))
}

pub fn squeezing_parameter(rc: &ReducedCouplings, model: &EffectiveModel) -> Result<Value, PhaseError> {
    let _ = model;
    let label = classify_phase(rc, DEFAULT_TOL)?;
    let (z, zp) = (rc.zeta, rc.zeta_prime);
    let ratio = match label {
        PhaseLabel::Normal => (1.0 - z * z) / (1.0 - zp * zp),
        PhaseLabel::Sx => (1.0 - z.powi(-4)) / (1.0 - (zp / z).powi(2)),
        PhaseLabel::Sp => (1.0 - (z / zp).powi(2)) / (1.0 - zp.powi(-4)),
        PhaseLabel::SxpA | PhaseLabel::SxpB => return Ok(Value::Infinite),
    };
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(PhaseError::OutOfPhaseDomain {
            phase: label,
            quantity: "squeezing parameter",
            lambda: rc.lambda,
            mu: rc.mu,
        });
    }
    Ok(Value::Finite(ratio.ln() / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeOrder {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Lambda,
    Mu,
}

/// Central finite difference of [`ground_energy`] with respect to `lambda` or
/// `mu`, evaluated inside the point's own phase.
pub fn energy_derivative(
    rc: &ReducedCouplings,
    model: &EffectiveModel,
    order: DerivativeOrder,
    direction: Direction,
) -> Result<f64, PhaseError> {
    let label = classify_phase(rc, DEFAULT_TOL)?;
    let s = Scales::of(model);
    let h = DERIVATIVE_STEP;
    let shifted = |k: f64| -> Result<f64, PhaseError> {
        let p = match direction {
            Direction::Lambda => ReducedCouplings::new(rc.lambda + k * h, rc.mu),
            Direction::Mu => ReducedCouplings::new(rc.lambda, rc.mu + k * h),
        };
        match classify_phase(&p, DEFAULT_TOL) {
            Ok(l) if l == label => energy_in(label, &p, &s),
            _ => Err(PhaseError::BoundaryTooClose {
                lambda: rc.lambda,
                mu: rc.mu,
            }),
        }
    };
    let (plus, minus) = (shifted(1.0)?, shifted(-1.0)?);
    Ok(match order {
        DerivativeOrder::First => (plus - minus) / (2.0 * h),
        DerivativeOrder::Second => (plus - 2.0 * energy_in(label, rc, &s)? + minus) / (h * h),
    })
}

/// Straight segment in the `(lambda, mu)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPath {
    pub start: (f64, f64),
    pub end: (f64, f64),
}

impl CouplingPath {
    pub fn new(start: (f64, f64), end: (f64, f64)) -> Self {
        Self { start, end }
    }

    fn at(&self, t: f64) -> ReducedCouplings {
        ReducedCouplings::new(
            self.start.0 + t * (self.end.0 - self.start.0),
            self.start.1 + t * (self.end.1 - self.start.1),
        )
    }

    fn length(&self) -> f64 {
        (self.end.0 - self.start.0).hypot(self.end.1 - self.start.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionOrder {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub order: TransitionOrder,
    pub from: PhaseLabel,
    pub to: PhaseLabel,
    /// Crossing point `(lambda, mu)`.
    pub boundary: (f64, f64),
    /// `|Δ dE/dg|` across the boundary, per unit physical coupling.
    pub first_jump: f64,
    /// `|Δ d²E/dg²|` across the boundary.
    pub second_jump: f64,
}

/// Order of the transition met along `path`.
///
/// One-sided derivatives of the leading-order ground energy along the path
/// are compared at the crossing, per unit physical coupling `g = lambda g_c`.
/// The transition is first order when the first derivatives differ by more
/// than `1e-3 |w0| / g_c`, second order when they agree but the second
/// derivatives differ by more than `1e-2 |w0| / g_c²`.
pub fn transition_order(path: &CouplingPath, model: &EffectiveModel) -> Result<TransitionReport, PhaseError> {
    if model.g_c == 0.0 {
        return Err(PhaseError::ZeroCritical);
    }
    let length = path.length();
    if length == 0.0 {
        return Err(PhaseError::NoTransition);
    }
    let labels: Vec<Option<PhaseLabel>> = (0..PATH_SAMPLES)
        .map(|i| classify_phase(&path.at(i as f64 / (PATH_SAMPLES - 1) as f64), DEFAULT_TOL).ok())
        .collect();
    // a transversal crossing of a gapless line can land one sample on it
    let mut region: Vec<(usize, PhaseLabel)> = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        let Some(label) = *label else { continue };
        let isolated_line = matches!(label, PhaseLabel::SxpA | PhaseLabel::SxpB)
            && labels.get(i.wrapping_sub(1)).copied().flatten() != Some(label)
            && labels.get(i + 1).copied().flatten() != Some(label);
        if !isolated_line {
            region.push((i, label));
        }
    }
    let changes: Vec<usize> = (1..region.len()).filter(|&k| region[k].1 != region[k - 1].1).collect();
    match changes.len() {
        0 => return Err(PhaseError::NoTransition),
        1 => {}
        n => return Err(PhaseError::MultipleBoundaries(n)),
    }
    let k = changes[0];
    let (from, to) = (region[k - 1].1, region[k].1);
    let step = 1.0 / (PATH_SAMPLES - 1) as f64;
    let (mut lo, mut hi) = (region[k - 1].0 as f64 * step, region[k].0 as f64 * step);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if classify_phase(&path.at(mid), DEFAULT_TOL).ok() == Some(from) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);

    let s = Scales::of(model);
    // derivative step in path parameter giving DERIVATIVE_STEP in arc length
    let dt = DERIVATIVE_STEP / length;
    let h = DERIVATIVE_STEP;
    let side = |label: PhaseLabel, sign: f64| -> (f64, f64) {
        let f: Vec<f64> = (0..4)
            .map(|j| limit_energy_in(label, &path.at(crossing + sign * j as f64 * dt), &s))
            .collect();
        let first = sign * (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        let second = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
        (first, second)
    };
    let (d1_from, d2_from) = side(from, -1.0);
    let (d1_to, d2_to) = side(to, 1.0);
    let first_jump = (d1_to - d1_from).abs() / s.g_c;
    let second_jump = (d2_to - d2_from).abs() / (s.g_c * s.g_c);
    let p = path.at(crossing);
    let order = if first_jump > 1e-3 * s.w0 / s.g_c {
        TransitionOrder::First
    } else if second_jump > 1e-2 * s.w0 / (s.g_c * s.g_c) {
        TransitionOrder::Second
    } else {
        return Err(PhaseError::Indeterminate);
    };
    Ok(TransitionReport {
        order,
        from,
        to,
        boundary: (p.lambda, p.mu),
        first_jump,
        second_jump,
    })
}

/// Everything the analytic theory says about one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePointResult {
    pub label: PhaseLabel,
    pub excitation: f64,
    pub x_mean: f64,
    pub p_mean: f64,
    pub var_x: Value,
    pub var_p: Value,
    pub ground_energy: f64,
    pub squeeze: Value,
    /// `|alpha_k|`; zero in the normal phase.
    pub alpha: f64,
    /// `Omega_k`; `|w0|` in the normal phase.
    pub omega_k: f64,
}

impl PhasePointResult {
    /// `<x> / sqrt(eta)`, finite as `eta -> infinity`.
    pub fn x_scaled(&self, model: &EffectiveModel) -> f64 {
        self.x_mean / model.eta_eff.abs().sqrt()
    }

    pub fn p_scaled(&self, model: &EffectiveModel) -> f64 {
        self.p_mean / model.eta_eff.abs().sqrt()
    }
}

pub fn evaluate_point(rc: &ReducedCouplings, model: &EffectiveModel, tol: f64) -> Result<PhasePointResult, PhaseError> {
    let label = classify_phase(rc, tol)?;
    let orders = order_parameters(rc, model)?;
    let (alpha, omega_k) = if label.is_superradiant() {
        let frame = displacement_and_qubit_freq(rc, model)?;
        (frame.alpha, frame.omega_k)
    } else {
        (0.0, model.omega0_eff.abs())
    };
    Ok(PhasePointResult {
        label,
        excitation: excitation_energy(rc, model)?,
        x_mean: orders.x_mean,
        p_mean: orders.p_mean,
        var_x: orders.var_x,
        var_p: orders.var_p,
        ground_energy: ground_energy(rc, model)?,
        squeeze: squeezing_parameter(rc, model)?,
        alpha,
        omega_k,
    })
}
