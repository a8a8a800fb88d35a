//! Bare model, qubit-frequency modulation and the sideband-engineering
//! pipeline that turns them into an effective anisotropic Rabi model.
//!
//! All frequencies share one unit; the CLI and the presets use units of the
//! qubit frequency `omega0`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bessel::{bessel_j, BesselError};
use crate::value::Value;

/// Default half-width of the sideband search window.
pub const DEFAULT_SEARCH_WINDOW: i32 = 64;
/// Default bar for every smallness ratio in [`RwaReport`].
pub const DEFAULT_RWA_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error("{branch} sideband {index} is exactly resonant; the max-ratio rule diverges (use min-detuning or manual selection)")]
    DegenerateResonance { branch: Branch, index: i32 },
    #[error("effective cavity frequency vanishes; the effective frequency ratio is undefined")]
    ZeroEffectiveCavity,
}

/// Rotating (`sigma_+ a`) or counter-rotating (`sigma_+ a^dag`) family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Rotating,
    CounterRotating,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Rotating => f.write_str("rotating"),
            Branch::CounterRotating => f.write_str("counter-rotating"),
        }
    }
}

/// Bare qubit-cavity system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Qubit transition frequency; the unit scale.
    pub omega0: f64,
    /// Cavity frequency.
    pub omega_c: f64,
    /// Qubit-cavity coupling.
    pub g: f64,
    /// Dimensionless A² coefficient.
    pub chi: f64,
    /// Cavity dissipation rate, only used for the dissipative critical shift.
    pub kappa: f64,
}

impl SystemParams {
    pub fn new(omega0: f64, omega_c: f64, g: f64, chi: f64, kappa: f64) -> Result<Self, ModelError> {
        let params = Self {
            omega0,
            omega_c,
            g,
            chi,
            kappa,
        };
        params.validate()?;
        Ok(params)
    }

    /// `omega0 = 1`, `omega_c = 1 / eta`, no dissipation.
    pub fn from_eta(eta: f64, g: f64, chi: f64) -> Result<Self, ModelError> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(invalid("eta", eta, "must be positive and finite"));
        }
        Self::new(1.0, 1.0 / eta, g, chi, 0.0)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Result<Self, ModelError> {
        self.kappa = kappa;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        positive("omega0", self.omega0)?;
        positive("omega_c", self.omega_c)?;
        non_negative("g", self.g)?;
        non_negative("chi", self.chi)?;
        non_negative("kappa", self.kappa)?;
        Ok(())
    }
}

/// Sinusoidal qubit-frequency modulation `(xi nu / 2) cos(nu t) sigma_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationParams {
    /// Dimensionless amplitude.
    pub xi: f64,
    /// Modulation frequency.
    pub nu: f64,
}

impl ModulationParams {
    pub fn new(xi: f64, nu: f64) -> Result<Self, ModelError> {
        let m = Self { xi, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        non_negative("xi", self.xi)?;
        positive("nu", self.nu)?;
        Ok(())
    }
}

/// How the retained sidebands are picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Largest `|J_n(xi) / delta_n|`.
    MaxRatio,
    /// Smallest `|delta_n|`; independent of `xi`.
    MinDetuning,
    /// Caller-supplied indices.
    Manual { n0: i32, m0: i32 },
}

impl Default for SelectionMode {
    fn default() -> Self {
        SelectionMode::MinDetuning
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidebandChoice {
    /// Rotating sideband index.
    pub n0: i32,
    /// Counter-rotating sideband index.
    pub m0: i32,
    pub mode: SelectionMode,
}

/// Effective anisotropic Rabi model
/// `w0/2 sz + wc a^dag a + g_r (a s+ + a^dag s-) + g_cr (a^dag s+ + a s-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    pub g_r: f64,
    pub g_cr: f64,
    /// `g_cr / g_r`; infinite when `g_r = 0`.
    pub epsilon: Value,
    /// Effective qubit frequency (signed).
    pub omega0_eff: f64,
    /// Effective cavity frequency (signed).
    pub omega_c_eff: f64,
    /// Signed ratio `omega0_eff / omega_c_eff`.
    pub eta_eff: f64,
    /// Isotropic critical coupling `sqrt|w0 wc| / 2`.
    pub g_c: f64,
    /// Anisotropic boundary `2 g_c / (1 + |epsilon|)`.
    pub g_tilde_c: f64,
    pub omega_c_prime: f64,
    pub g_a2: f64,
    /// `None` for models specified directly rather than derived from a
    /// modulation.
    pub selection: Option<SidebandChoice>,
}

impl EffectiveModel {
    /// A model given directly by its effective frequencies and couplings.
    pub fn from_frequencies(omega0_eff: f64, omega_c_eff: f64, g_r: f64, g_cr: f64) -> Result<Self, ModelError> {
        if omega_c_eff == 0.0 {
            return Err(ModelError::ZeroEffectiveCavity);
        }
        let epsilon = if g_r != 0.0 {
            Value::Finite(g_cr / g_r)
        } else if g_cr != 0.0 {
            Value::Infinite
        } else {
            Value::Finite(1.0)
        };
        Ok(Self::assemble(
            omega0_eff,
            omega_c_eff,
            g_r,
            g_cr,
            epsilon,
            omega_c_eff,
            0.0,
            None,
        ))
    }

    /// A model with `omega0_eff = omega0`, `omega_c_eff = omega0 / eta_eff` and
    /// couplings given in units of the resulting `g_c`.
    pub fn from_reduced(omega0: f64, eta_eff: f64, lambda: f64, mu: f64) -> Result<Self, ModelError> {
        positive("omega0", omega0)?;
        if !(eta_eff.is_finite() && eta_eff != 0.0) {
            return Err(invalid("eta_eff", eta_eff, "must be finite and non-zero"));
        }
        let base = Self::from_frequencies(omega0, omega0 / eta_eff, 0.0, 0.0)?;
        Ok(base.with_reduced(lambda, mu))
    }

    /// Same frequencies, couplings replaced by `lambda g_c` and `mu g_c`.
    pub fn with_reduced(&self, lambda: f64, mu: f64) -> Self {
        let g_r = lambda * self.g_c;
        let g_cr = mu * self.g_c;
        let epsilon = if lambda != 0.0 {
            Value::Finite(mu / lambda)
        } else if mu != 0.0 {
            Value::Infinite
        } else {
            self.epsilon
        };
        Self::assemble(
            self.omega0_eff,
            self.omega_c_eff,
            g_r,
            g_cr,
            epsilon,
            self.omega_c_prime,
            self.g_a2,
            self.selection,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        omega0_eff: f64,
        omega_c_eff: f64,
        g_r: f64,
        g_cr: f64,
        epsilon: Value,
        omega_c_prime: f64,
        g_a2: f64,
        selection: Option<SidebandChoice>,
    ) -> Self {
        let g_c = (omega0_eff * omega_c_eff).abs().sqrt() / 2.0;
        let g_tilde_c = match epsilon {
            Value::Finite(e) => 2.0 * g_c / (1.0 + e.abs()),
            Value::Infinite => 0.0,
        };
        Self {
            g_r,
            g_cr,
            epsilon,
            omega0_eff,
            omega_c_eff,
            eta_eff: omega0_eff / omega_c_eff,
            g_c,
            g_tilde_c,
            omega_c_prime,
            g_a2,
            selection,
        }
    }
}

/// Dimensionless smallness parameters behind the two-sideband approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaRatios {
    /// `g / nu`.
    pub coupling: f64,
    /// `max |g J_n(xi)| / nu` over the retained sideband windows.
    pub sideband_coupling: f64,
    /// `|delta_n0| / nu`.
    pub rotating_detuning: f64,
    /// `|Delta_m0| / nu`.
    pub counter_rotating_detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A2Ratios {
    /// `g_A2 / (2 omega_c')`.
    pub to_cavity: f64,
    /// `g_A2 / g`; zero when `g = 0`.
    pub to_coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaReport {
    pub ratios: RwaRatios,
    pub a2_ratios: A2Ratios,
    pub threshold: f64,
    pub pass: bool,
}

/// `(g_A2, omega_c')` with `g_A2 = chi g² / omega0` and `omega_c' = omega_c + 2 g_A2`.
pub fn a2_amplitude(params: &SystemParams) -> (f64, f64) {
    let g_a2 = params.chi * params.g * params.g / params.omega0;
    (g_a2, params.omega_c + 2.0 * g_a2)
}

/// `(delta_n, Delta_n)`: oscillation frequencies of the `n`-th rotating and
/// counter-rotating sidebands.
pub fn sideband_detunings(params: &SystemParams, modulation: &ModulationParams, n: i32) -> (f64, f64) {
    let (_, wc) = a2_amplitude(params);
    let shift = n as f64 * modulation.nu;
    (params.omega0 - wc + shift, params.omega0 + wc + shift)
}

/// Magnitude below which dropped sideband amplitudes `|J_n(xi)|` must fall.
pub const SIDEBAND_TAIL: f64 = 1e-15;

/// Half-width of the sideband window kept around `center`: at least
/// `max(ceil(xi) + 15, 25)`, widened until every dropped `|J_n(xi)|` is
/// below [`SIDEBAND_TAIL`].
pub fn sideband_window(xi: f64, center: i32) -> i32 {
    let floor = (xi.ceil() as i32 + 15).max(25);
    // |J_n(xi)| decreases monotonically in |n| once |n| > xi
    let mut edge = xi.ceil() as i32 + 1;
    while edge < crate::bessel::MAX_ORDER
        && bessel_j(edge, xi.min(crate::bessel::MAX_ARG)).map_or(false, |j| j.abs() >= SIDEBAND_TAIL)
    {
        edge += 1;
    }
    floor.max(edge + center.abs())
}

pub fn select_sidebands(
    params: &SystemParams,
    modulation: &ModulationParams,
    mode: SelectionMode,
) -> Result<SidebandChoice, ModelError> {
    select_sidebands_within(params, modulation, mode, DEFAULT_SEARCH_WINDOW)
}

pub fn select_sidebands_within(
    params: &SystemParams,
    modulation: &ModulationParams,
    mode: SelectionMode,
    window: i32,
) -> Result<SidebandChoice, ModelError> {
    params.validate()?;
    modulation.validate()?;
    let (n0, m0) = match mode {
        SelectionMode::Manual { n0, m0 } => (n0, m0),
        SelectionMode::MinDetuning => {
            let n0 = argbest(window, |n| -sideband_detunings(params, modulation, n).0.abs());
            let m0 = argbest(window, |m| -sideband_detunings(params, modulation, m).1.abs());
            (n0, m0)
        }
        SelectionMode::MaxRatio => {
            if modulation.xi <= 0.0 {
                return Err(invalid("xi", modulation.xi, "max-ratio selection needs xi > 0"));
            }
            let mut bessel = Vec::with_capacity(2 * window as usize + 1);
            for n in -window..=window {
                bessel.push(bessel_j(n, modulation.xi)?);
            }
            let j = |n: i32| bessel[(n + window) as usize];
            for branch in [Branch::Rotating, Branch::CounterRotating] {
                for n in -window..=window {
                    let (delta, big_delta) = sideband_detunings(params, modulation, n);
                    let d = if branch == Branch::Rotating { delta } else { big_delta };
                    if d == 0.0 && j(n) != 0.0 {
                        return Err(ModelError::DegenerateResonance { branch, index: n });
                    }
                }
            }
            let ratio = |j: f64, d: f64| if j == 0.0 { 0.0 } else { (j / d).abs() };
            let n0 = argbest(window, |n| ratio(j(n), sideband_detunings(params, modulation, n).0));
            let m0 = argbest(window, |m| ratio(j(m), sideband_detunings(params, modulation, m).1));
            (n0, m0)
        }
    };
    Ok(SidebandChoice { n0, m0, mode })
}

/// Index in `[-window, window]` maximising `score`; ties go to smaller `|n|`,
/// then to negative `n`.
fn argbest(window: i32, score: impl Fn(i32) -> f64) -> i32 {
    let mut best = 0;
    let mut best_score = score(0);
    for k in 1..=window {
        for n in [-k, k] {
            let s = score(n);
            // strictly better only: earlier candidates win ties
            if s > best_score {
                best = n;
                best_score = s;
            }
        }
    }
    best
}

pub fn effective_model(
    params: &SystemParams,
    modulation: &ModulationParams,
    selection: SidebandChoice,
) -> Result<EffectiveModel, ModelError> {
    params.validate()?;
    modulation.validate()?;
    let (g_a2, omega_c_prime) = a2_amplitude(params);
    let j_n = bessel_j(selection.n0, modulation.xi)?;
    let j_m = bessel_j(selection.m0, modulation.xi)?;
    let (delta, _) = sideband_detunings(params, modulation, selection.n0);
    let (_, big_delta) = sideband_detunings(params, modulation, selection.m0);
    let omega0_eff = (big_delta + delta) / 2.0;
    let omega_c_eff = (big_delta - delta) / 2.0;
    if omega_c_eff == 0.0 {
        return Err(ModelError::ZeroEffectiveCavity);
    }
    let epsilon = anisotropy(selection.n0, selection.m0, j_n, j_m);
    Ok(EffectiveModel::assemble(
        omega0_eff,
        omega_c_eff,
        params.g * j_n,
        params.g * j_m,
        epsilon,
        omega_c_prime,
        g_a2,
        Some(selection),
    ))
}

/// Select sidebands and build the effective model in one step.
pub fn derive_model(
    params: &SystemParams,
    modulation: &ModulationParams,
    mode: SelectionMode,
) -> Result<EffectiveModel, ModelError> {
    let choice = select_sidebands(params, modulation, mode)?;
    effective_model(params, modulation, choice)
}

/// `J_m0 / J_n0`, which equals `g_cr / g_r` and stays defined for `g = 0`.
/// At `xi = 0` both values may vanish; the small-`xi` limit is used then.
fn anisotropy(n0: i32, m0: i32, j_n: f64, j_m: f64) -> Value {
    if n0 == m0 {
        return Value::Finite(1.0);
    }
    if j_n != 0.0 {
        return Value::Finite(j_m / j_n);
    }
    if j_m != 0.0 {
        return Value::Infinite;
    }
    match m0.abs().cmp(&n0.abs()) {
        std::cmp::Ordering::Greater => Value::Finite(0.0),
        std::cmp::Ordering::Less => Value::Infinite,
        // m0 = -n0: J_{-n} / J_n = (-1)^n
        std::cmp::Ordering::Equal => Value::Finite(if n0 % 2 == 0 { 1.0 } else { -1.0 }),
    }
}

pub fn rwa_validity(
    params: &SystemParams,
    modulation: &ModulationParams,
    model: &EffectiveModel,
    threshold: f64,
) -> Result<RwaReport, ModelError> {
    let choice = model.selection.ok_or(invalid(
        "selection",
        f64::NAN,
        "model was not derived from a modulation",
    ))?;
    let nu = modulation.nu;
    let mut max_j: f64 = 0.0;
    for center in [choice.n0, choice.m0] {
        let half = sideband_window(modulation.xi, center);
        for n in (center - half)..=(center + half) {
            if n.abs() <= crate::bessel::MAX_ORDER {
                max_j = max_j.max(bessel_j(n, modulation.xi)?.abs());
            }
        }
    }
    let (delta, _) = sideband_detunings(params, modulation, choice.n0);
    let (_, big_delta) = sideband_detunings(params, modulation, choice.m0);
    let ratios = RwaRatios {
        coupling: params.g / nu,
        sideband_coupling: params.g * max_j / nu,
        rotating_detuning: delta.abs() / nu,
        counter_rotating_detuning: big_delta.abs() / nu,
    };
    let (g_a2, wc) = a2_amplitude(params);
    let a2_ratios = A2Ratios {
        to_cavity: g_a2 / (2.0 * wc),
        to_coupling: if params.g > 0.0 { g_a2 / params.g } else { 0.0 },
    };
    // Without coupling there is nothing to discard: the approximation is exact.
    let pass = params.g == 0.0
        || [
            ratios.coupling,
            ratios.sideband_coupling,
            ratios.rotating_detuning,
            ratios.counter_rotating_detuning,
            a2_ratios.to_cavity,
            a2_ratios.to_coupling,
        ]
        .iter()
        .all(|&r| r < threshold);
    Ok(RwaReport {
        ratios,
        a2_ratios,
        threshold,
        pass,
    })
}

/// Critical coupling shifted by cavity loss,
/// `(1/2) sqrt(|w0 / wc| (wc² + kappa²))`.
pub fn g_c_dissipative(model: &EffectiveModel, kappa: f64) -> Result<f64, ModelError> {
    non_negative("kappa", kappa)?;
    if model.omega_c_eff == 0.0 {
        return Err(ModelError::ZeroEffectiveCavity);
    }
    let wc = model.omega_c_eff;
    Ok(0.5 * ((model.omega0_eff / wc).abs() * (wc * wc + kappa * kappa)).sqrt())
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> ModelError {
    ModelError::InvalidParameter { name, value, reason }
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, value, "must be positive and finite"))
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, value, "must be non-negative and finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig5() -> (SystemParams, ModulationParams) {
        (
            SystemParams::from_eta(100.0, 0.06, 0.0).unwrap(),
            ModulationParams::new(1.5, 0.68).unwrap(),
        )
    }

    #[test]
    fn a2_switched_off() {
        let p = SystemParams::new(1.0, 0.01, 0.06, 0.0, 0.0).unwrap();
        assert_eq!(a2_amplitude(&p), (0.0, 0.01));
    }

    #[test]
    fn a2_dispersive_and_resonant() {
        let p = SystemParams::new(1.0, 0.01, 0.06, 0.058, 0.0).unwrap();
        let (ga, wc) = a2_amplitude(&p);
        assert_abs_diff_eq!(ga, 2.088e-4, epsilon = 1e-12);
        assert_abs_diff_eq!(wc, 0.0104176, epsilon = 1e-10);

        let p = SystemParams::new(1.0, 1.0, 0.06, 5.787, 0.0).unwrap();
        let (ga, wc) = a2_amplitude(&p);
        assert_abs_diff_eq!(ga, 0.0208332, epsilon = 1e-9);
        assert_abs_diff_eq!(wc, 1.0416664, epsilon = 1e-9);
    }

    #[test]
    fn detunings() {
        let p = SystemParams::new(1.0, 0.01, 0.06, 0.0, 0.0).unwrap();
        let m = ModulationParams::new(1.0, 0.68).unwrap();
        let (d, big) = sideband_detunings(&p, &m, -1);
        assert_abs_diff_eq!(d, 0.31, epsilon = 1e-14);
        assert_abs_diff_eq!(big, 0.33, epsilon = 1e-14);
        assert_eq!(sideband_detunings(&p, &m, 0), (0.99, 1.01));

        let m = ModulationParams::new(1.0, 0.402).unwrap();
        assert_abs_diff_eq!(sideband_detunings(&p, &m, -2).0, 0.186, epsilon = 1e-14);
        assert_abs_diff_eq!(sideband_detunings(&p, &m, -3).1, -0.196, epsilon = 1e-14);
    }

    #[test]
    fn min_detuning_choices() {
        let (p, m) = fig5();
        let c = select_sidebands(&p, &m, SelectionMode::MinDetuning).unwrap();
        assert_eq!((c.n0, c.m0), (-1, -1));

        let m = ModulationParams::new(1.0, 0.402).unwrap();
        let c = select_sidebands(&p, &m, SelectionMode::MinDetuning).unwrap();
        assert_eq!((c.n0, c.m0), (-2, -3));

        for xi in [0.0, 0.7, 2.4, 9.0] {
            let m = ModulationParams::new(xi, 2.0 * 1.01 + 1e-3).unwrap();
            let c = select_sidebands(&p, &m, SelectionMode::MinDetuning).unwrap();
            assert_eq!(c.m0, 0);
        }
    }

    #[test]
    fn manual_passes_through() {
        let (p, m) = fig5();
        let c = select_sidebands(&p, &m, SelectionMode::Manual { n0: 3, m0: -7 }).unwrap();
        assert_eq!((c.n0, c.m0), (3, -7));
    }

    #[test]
    fn max_ratio_rejects_exact_resonance() {
        // delta_{-1} = 1 - 0.5 - 0.5 = 0 exactly
        let p = SystemParams::new(1.0, 0.5, 0.06, 0.0, 0.0).unwrap();
        let m = ModulationParams::new(1.0, 0.5).unwrap();
        let err = select_sidebands(&p, &m, SelectionMode::MaxRatio).unwrap_err();
        assert!(matches!(
            err,
            ModelError::DegenerateResonance {
                branch: Branch::Rotating,
                index: -1
            }
        ));
        let m0 = ModulationParams::new(0.0, 0.68).unwrap();
        assert!(select_sidebands(&p, &m0, SelectionMode::MaxRatio).is_err());
    }

    #[test]
    fn max_ratio_agrees_when_one_sideband_dominates() {
        let (p, m) = fig5();
        let c = select_sidebands(&p, &m, SelectionMode::MaxRatio).unwrap();
        assert_eq!((c.n0, c.m0), (-1, -1));
    }

    #[test]
    fn tie_breaking_prefers_small_then_negative() {
        assert_eq!(argbest(5, |n| -((n.abs() as f64) - 2.0).abs()), -2);
        assert_eq!(argbest(5, |_| 1.0), 0);
    }

    #[test]
    fn fig5_effective_model() {
        let (p, m) = fig5();
        let model = derive_model(&p, &m, SelectionMode::MinDetuning).unwrap();
        assert_abs_diff_eq!(model.omega0_eff, 0.32, epsilon = 1e-14);
        assert_abs_diff_eq!(model.omega_c_eff, 0.01, epsilon = 1e-14);
        assert_abs_diff_eq!(model.eta_eff, 32.0, epsilon = 1e-10);
        assert_abs_diff_eq!(model.g_c, 0.0282843, epsilon = 1e-7);
        assert_eq!(model.epsilon, Value::Finite(1.0));
        assert_eq!(model.g_tilde_c, model.g_c);
        let j = bessel_j(-1, 1.5).unwrap();
        assert_eq!(model.g_r, 0.06 * j);
        assert_eq!(model.g_cr, 0.06 * j);
    }

    #[test]
    fn zero_amplitude_decouples() {
        let (p, _) = fig5();
        let m = ModulationParams::new(0.0, 0.68).unwrap();
        let model = derive_model(&p, &m, SelectionMode::MinDetuning).unwrap();
        assert_eq!((model.g_r, model.g_cr), (0.0, 0.0));
    }

    #[test]
    fn zero_effective_cavity_is_an_error() {
        // delta_{-1} = 0.5 and Delta_{-2} = 0.5 give omega_c_eff = 0
        let p = SystemParams::new(1.0, 0.5, 0.06, 0.0, 0.0).unwrap();
        let m = ModulationParams::new(1.0, 1.0).unwrap();
        let err = effective_model(
            &p,
            &m,
            SidebandChoice {
                n0: 0,
                m0: -1,
                mode: SelectionMode::Manual { n0: 0, m0: -1 },
            },
        );
        assert_eq!(err.unwrap_err(), ModelError::ZeroEffectiveCavity);
    }

    #[test]
    fn negative_effective_frequencies_use_magnitudes() {
        let p = SystemParams::from_eta(100.0, 0.06, 0.0).unwrap();
        let m = ModulationParams::new(4.0, 0.402).unwrap();
        let model = derive_model(&p, &m, SelectionMode::MinDetuning).unwrap();
        assert!(model.omega0_eff < 0.0 && model.omega_c_eff < 0.0);
        assert_abs_diff_eq!(model.g_c, (0.005f64 * 0.191).sqrt() / 2.0, epsilon = 1e-12);
        assert!(model.eta_eff > 0.0);
    }

    #[test]
    fn rwa_report_ratios() {
        let (p, m) = fig5();
        let model = derive_model(&p, &m, SelectionMode::MinDetuning).unwrap();
        let strict = rwa_validity(&p, &m, &model, 0.2).unwrap();
        assert_abs_diff_eq!(strict.ratios.rotating_detuning, 0.31 / 0.68, epsilon = 1e-12);
        assert!(!strict.pass);
        let loose = rwa_validity(&p, &m, &model, 0.5).unwrap();
        assert!(loose.pass);

        let p0 = SystemParams::from_eta(100.0, 0.0, 0.0).unwrap();
        let model0 = derive_model(&p0, &m, SelectionMode::MinDetuning).unwrap();
        let r = rwa_validity(&p0, &m, &model0, 0.2).unwrap();
        assert_eq!(r.ratios.coupling, 0.0);
        assert_eq!(r.ratios.sideband_coupling, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn rwa_a2_ratio() {
        let p = SystemParams::from_eta(100.0, 0.06, 0.058).unwrap();
        let m = ModulationParams::new(1.5, 0.68).unwrap();
        let model = derive_model(&p, &m, SelectionMode::MinDetuning).unwrap();
        let r = rwa_validity(&p, &m, &model, 0.2).unwrap();
        assert_abs_diff_eq!(r.a2_ratios.to_cavity, 0.01, epsilon = 5e-4);
    }

    #[test]
    fn dissipative_shift() {
        let (p, m) = fig5();
        let model = derive_model(&p, &m, SelectionMode::MinDetuning).unwrap();
        assert_eq!(g_c_dissipative(&model, 0.0).unwrap(), model.g_c);
        let shifted = g_c_dissipative(&model, 0.002).unwrap();
        assert_abs_diff_eq!(shifted / model.g_c, 1.02, epsilon = 0.005);
        let equal = g_c_dissipative(&model, 0.01).unwrap();
        assert_abs_diff_eq!(equal / model.g_c, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn direct_models() {
        let m = EffectiveModel::from_reduced(1.0, 1000.0, 0.5, -0.25).unwrap();
        assert_abs_diff_eq!(m.g_r / m.g_c, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.g_cr / m.g_c, -0.25, epsilon = 1e-15);
        assert_eq!(m.epsilon, Value::Finite(-0.5));
        assert!(m.selection.is_none());
        let pure_cr = m.with_reduced(0.0, 2.5);
        assert_eq!(pure_cr.epsilon, Value::Infinite);
        assert_eq!(pure_cr.g_tilde_c, 0.0);
    }
}
