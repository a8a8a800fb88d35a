//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any fails. Tolerances are pinned below.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rayon::prelude::*;

use rabiqpt::fock::{
    checked_fidelity_trace, default_initial_state, ed_summary, effective_static, ground_state_ed, heuristic_cutoff,
    FockSpace, SparseOp,
};
use rabiqpt::phase::{
    classify_phase, excitation_energy, ground_energy, order_parameters, reduced_couplings, transition_order,
    CouplingPath, ReducedCouplings, TransitionOrder,
};
use rabiqpt::sweep::{figure_preset, point_model, run_sweep, GridResult};
use rabiqpt::{
    a2_amplitude, bessel_j, derive_model, g_c_dissipative, EffectiveModel, ModulationParams, PhaseLabel, SelectionMode,
    SystemParams,
};

const TRANSITION_TOL: f64 = 0.005;
const COUPLING_EXTREME_TOL: f64 = 0.005;
const BOUNDARY_ZERO_TOL: f64 = 0.01;
const BOUNDARY_MAX_TOL: f64 = 0.001;
const CRITICAL_TOL: f64 = 1e-12;
const A2_TOL: f64 = 5e-4;
const DISSIPATIVE_TOL: f64 = 0.005;
const FIDELITY_FLOOR: f64 = 0.9;
const FIDELITY_FLOOR_BEST: f64 = 0.97;
const HALVING_TOL: f64 = 1e-4;
const FIDELITY_BUDGET: Duration = Duration::from_secs(120);
const GAP_TOL: f64 = 0.02;
const ORDER_TOL: f64 = 0.05;
const PROPERTY_CASES: u32 = 200;

type Outcome = Result<String, String>;

fn fail<T: std::fmt::Debug>(name: &str, e: proptest::test_runner::TestError<T>) -> String {
    format!("{name}: {e}")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn column(r: &GridResult, name: &str) -> Vec<f64> {
    r.column(name)
        .unwrap_or_else(|| panic!("column {name}"))
        .into_iter()
        .map(|c| c.as_f64().unwrap_or(f64::NAN))
        .collect()
}

fn preset(name: &str) -> Result<GridResult, String> {
    run_sweep(&figure_preset(name).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

/// Default-selection model at `omega0 = 1`, `eta = 100`, `g = 0.06`.
fn modulated(nu: f64, xi: f64) -> EffectiveModel {
    let p = SystemParams::from_eta(100.0, 0.06, 0.0).unwrap();
    derive_model(&p, &ModulationParams::new(xi, nu).unwrap(), SelectionMode::MinDetuning).unwrap()
}

/// Root of a sign change of `f` in `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimum of a unimodal `f` on `[lo, hi]`.
fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5.0_f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (a, b) = (hi - r * (hi - lo), lo + r * (hi - lo));
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

fn transitions_along_amplitude() -> Outcome {
    let r = preset("fig5")?;
    let xi = column(&r, "xi");
    let labels: Vec<String> = r
        .column("phase")
        .unwrap()
        .into_iter()
        .map(|c| c.as_text().unwrap_or("?").to_string())
        .collect();
    let mut sequence = vec![labels[0].clone()];
    let mut brackets = Vec::new();
    for k in 1..labels.len() {
        if labels[k] != labels[k - 1] {
            sequence.push(labels[k].clone());
            brackets.push((xi[k - 1], xi[k]));
        }
    }
    if sequence != ["N", "SX", "N"] {
        return Err(format!("phase sequence {sequence:?}"));
    }
    let radius = |x: f64| {
        let rc = reduced_couplings(&modulated(0.68, x)).unwrap();
        rc.lambda.abs() + rc.mu.abs() - 2.0
    };
    let roots: Vec<f64> = brackets.iter().map(|&(a, b)| bisect(a, b, radius)).collect();
    let omega: Vec<f64> = roots
        .iter()
        .map(|&x| {
            let m = modulated(0.68, x);
            excitation_energy(&reduced_couplings(&m).unwrap(), &m).unwrap()
        })
        .collect();
    let ok = (roots[0] - 1.102).abs() <= TRANSITION_TOL
        && (roots[1] - 2.598).abs() <= TRANSITION_TOL
        && omega.iter().all(|w| *w < 1e-6);
    check(
        ok,
        format!("N -> SX -> N, omega = 0 at xi = {:.4}, {:.4}", roots[0], roots[1]),
    )
}

fn coupling_extremes() -> Outcome {
    let r = preset("fig2c")?;
    let xi = column(&r, "xi");
    let lambda = column(&r, "lambda");
    let k_min = (0..xi.len()).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap();
    let k_max = (0..xi.len()).max_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap();
    let lambda_at = |x: f64| reduced_couplings(&modulated(0.68, x)).unwrap().lambda;
    let around = |k: usize| (xi[k.saturating_sub(1)], xi[(k + 1).min(xi.len() - 1)]);
    let (a, b) = around(k_min);
    let min = lambda_at(golden_min(a, b, lambda_at));
    let (a, b) = around(k_max);
    let max = lambda_at(golden_min(a, b, |x| -lambda_at(x)));
    let mu_equal = column(&r, "mu") == lambda;
    let ok = (min + 1.234).abs() <= COUPLING_EXTREME_TOL && (max - 0.734).abs() <= COUPLING_EXTREME_TOL && mu_equal;
    check(ok, format!("g_r/g_c = g_cr/g_c in [{min:.4}, {max:.4}]"))
}

fn anisotropic_boundary() -> Outcome {
    let r = preset("fig3")?;
    let nu = column(&r, "nu");
    let xi = column(&r, "xi");
    let g = column(&r, "g_tilde_c");
    let rows = |target: f64| -> Vec<usize> { (0..nu.len()).filter(|&k| nu[k] == target).collect() };
    let low = rows(0.402);
    let boundary_at = |x: f64| modulated(0.402, x).g_tilde_c;
    let mut zeros = Vec::new();
    for w in low.windows(3) {
        let (a, b, c) = (g[w[0]], g[w[1]], g[w[2]]);
        if b < a && b <= c && b < 1e-3 {
            zeros.push(golden_min(xi[w[0]], xi[w[2]], boundary_at));
        }
    }
    let max = low.iter().map(|&k| g[k]).fold(0.0, f64::max);
    let expected = [5.136, 8.417, 11.62];
    let zeros_ok = zeros.len() == 3
        && zeros
            .iter()
            .zip(expected)
            .all(|(z, e)| (z - e).abs() <= BOUNDARY_ZERO_TOL);
    let spread = |target: f64| {
        let v: Vec<f64> = rows(target).into_iter().map(|k| g[k]).collect();
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(l, h), x| (l.min(*x), h.max(*x)));
        (hi - lo) / hi
    };
    let flat = [spread(0.68), spread(0.8)];
    let ok = zeros_ok && (max - 0.031).abs() <= BOUNDARY_MAX_TOL && flat.iter().all(|s| *s < 1e-12);
    check(
        ok,
        format!(
            "zeros {zeros:.4?}, max {max:.5}, relative spread at nu = 0.68, 0.8: {:.1e}, {:.1e}",
            flat[0], flat[1]
        ),
    )
}

fn spectrum_criticalities() -> Outcome {
    // (preset, swept axis, couplings where the gap closes)
    let cases: [(&str, &str, fn(f64) -> bool); 4] = [
        ("fig4a", "mu", |m| (m.abs() - 1.0).abs() < CRITICAL_TOL),
        ("fig4b", "mu", |m| m.abs() < CRITICAL_TOL),
        ("fig4c", "mu", |m| m.abs() >= 2.0 - CRITICAL_TOL),
        ("fig4d", "lambda", |l| l.abs() >= 2.0 - CRITICAL_TOL),
    ];
    let mut details = Vec::new();
    for (name, axis, gapless) in cases {
        let r = preset(name)?;
        let x = column(&r, axis);
        let omega = column(&r, "omega");
        let mut closed = 0;
        for (x, w) in x.iter().zip(&omega) {
            if gapless(*x) {
                if w.abs() > CRITICAL_TOL {
                    return Err(format!("{name}: omega = {w:e} at {axis} = {x}"));
                }
                closed += 1;
            } else if !(*w > CRITICAL_TOL) {
                return Err(format!("{name}: gap closes off the critical set at {axis} = {x}"));
            }
        }
        details.push(format!("{name} {closed}"));
    }
    Ok(format!("gap zero exactly on the critical set: {}", details.join(", ")))
}

fn transition_orders() -> Outcome {
    let model = EffectiveModel::from_reduced(1.0, 100.0, 0.0, 0.0).unwrap();
    let cases = [
        ((-0.5, 2.5), (0.5, 2.5), TransitionOrder::First),
        ((1.5, 0.0), (2.5, 0.0), TransitionOrder::Second),
        ((0.5, 1.0), (1.5, 1.0), TransitionOrder::Second),
        ((-1.5, 1.0), (-0.5, 1.0), TransitionOrder::Second),
    ];
    let mut details = Vec::new();
    for (start, end, want) in cases {
        let report = transition_order(&CouplingPath::new(start, end), &model).map_err(|e| e.to_string())?;
        if report.order != want {
            return Err(format!("{start:?} -> {end:?}: {:?}, expected {want:?}", report.order));
        }
        details.push(format!("{}->{} {:?}", report.from, report.to, report.order));
    }
    Ok(details.join(", "))
}

fn a2_audit() -> Outcome {
    let mut details = Vec::new();
    for (eta, chi) in [(100.0, 0.058), (1.0, 5.787)] {
        let (g_a2, wc) = a2_amplitude(&SystemParams::from_eta(eta, 0.06, chi).map_err(|e| e.to_string())?);
        let ratio = g_a2 / (2.0 * wc);
        if (ratio - 0.01).abs() > A2_TOL {
            return Err(format!("eta = {eta}, chi = {chi}: ratio {ratio}"));
        }
        details.push(format!("{ratio:.5}"));
    }
    Ok(format!("g_A2 / 2 omega_c' = {}", details.join(", ")))
}

fn dissipative_boundary() -> Outcome {
    let mut p = BTreeMap::new();
    p.insert("xi".to_string(), 1.5);
    let model = point_model(&p, SelectionMode::MinDetuning).map_err(|e| e.to_string())?;
    let ratio = g_c_dissipative(&model, 0.002).map_err(|e| e.to_string())? / model.g_c;
    check(
        (ratio - 1.02).abs() <= DISSIPATIVE_TOL,
        format!("g_c_diss / g_c = {ratio:.5}"),
    )
}

fn two_sideband_fidelity() -> Outcome {
    let start = Instant::now();
    let spec = figure_preset("fig14").map_err(|e| e.to_string())?;
    let n_max = spec.fixed["n_max"] as usize;
    let periods: Vec<f64> = spec.axes[1].points();
    let times: Vec<f64> = periods.iter().map(|t| t * 2.0 * PI).collect();
    let runs: Vec<_> = [0.49, 0.68, 1.0]
        .par_iter()
        .map(|&nu| {
            let params = SystemParams::from_eta(100.0, 0.06, 0.0).unwrap();
            let modulation = ModulationParams::new(1.5, nu).unwrap();
            let model = derive_model(&params, &modulation, SelectionMode::MinDetuning).unwrap();
            let space = FockSpace::new(n_max).unwrap();
            let init = default_initial_state(space, Complex64::new(0.1, 0.0)).unwrap();
            (
                nu,
                checked_fidelity_trace(&params, &modulation, &model, &init, &times, None),
            )
        })
        .collect();
    let elapsed = start.elapsed();
    let mut details = Vec::new();
    let mut ok = elapsed < FIDELITY_BUDGET;
    for (nu, run) in runs {
        let run = run.map_err(|e| format!("nu = {nu}: {e}"))?;
        let until = |limit: f64| {
            periods
                .iter()
                .zip(&run.fidelity)
                .filter(|(t, _)| **t <= limit + 1e-12)
                .map(|(_, f)| *f)
                .fold(1.0, f64::min)
        };
        let (f9, f10) = (until(9.0), until(10.0));
        ok &= f9 >= FIDELITY_FLOOR && run.halving_deviation < HALVING_TOL;
        if nu == 0.68 {
            ok &= f10 >= FIDELITY_FLOOR_BEST;
        }
        details.push(format!(
            "nu {nu}: min F(t<=9) {f9:.4}, min F(t<=10) {f10:.4}, halving {:.1e}",
            run.halving_deviation
        ));
    }
    details.push(format!("n_max {n_max}, {:.1}s", elapsed.as_secs_f64()));
    check(ok, details.join("; "))
}

/// ED at effective ratio `eta`: relative errors of the scaled gap at
/// `lambda = mu = 0.5` and of `<x²> 2 / eta` at `lambda = mu = 1.5`, plus the
/// scaled photon number `<a^dag a> 2 / eta` there.
fn ed_errors(eta: f64) -> Result<(f64, f64, f64), String> {
    let normal = EffectiveModel::from_reduced(1.0, eta, 0.5, 0.5).unwrap();
    let ed = ed_summary(&normal, FockSpace::new(heuristic_cutoff(&normal)).unwrap(), 0.0).map_err(|e| e.to_string())?;
    let analytic = excitation_energy(&reduced_couplings(&normal).unwrap(), &normal).unwrap();
    let gap_err = (ed.gap - analytic).abs() / analytic;

    let sx = EffectiveModel::from_reduced(1.0, eta, 1.5, 1.5).unwrap();
    let ed = ground_state_ed(&sx, FockSpace::new(heuristic_cutoff(&sx)).unwrap(), 0.0, 1).map_err(|e| e.to_string())?;
    let o = ed.ground_state().observables();
    // x = (a + a^dag)/sqrt2, so <a^dag a> ~ <x>²/2 deep in the superradiant phase
    let x2 = o.var_x + o.x_mean * o.x_mean;
    let zeta: f64 = 1.5;
    let target = zeta * zeta - 1.0 / (zeta * zeta);
    let order_err = (x2 * 2.0 / eta - target).abs() / target;
    Ok((gap_err, order_err, o.n_mean * 2.0 / eta))
}

fn ed_against_analytic() -> Outcome {
    let etas = [32.0, 100.0, 300.0, 1000.0];
    let errors = etas
        .par_iter()
        .map(|&eta| ed_errors(eta))
        .collect::<Result<Vec<_>, _>>()?;
    let (gap, order, photons) = *errors.last().unwrap();
    let shrinking = errors.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let gaps: Vec<String> = errors.iter().map(|e| format!("{:.2e}", e.0)).collect();
    let orders: Vec<String> = errors.iter().map(|e| format!("{:.2e}", e.1)).collect();
    check(
        gap <= GAP_TOL && order <= ORDER_TOL && shrinking,
        format!(
            "gap errors [{}], <x²> 2/eta_eff errors [{}] over eta_eff {etas:?}; <a^dag a> 2/eta_eff = {photons:.4} at 1000",
            gaps.join(", "),
            orders.join(", ")
        ),
    )
}

fn clear_point() -> impl Strategy<Value = (f64, f64)> {
    (-3.0..3.0_f64, -3.0..3.0_f64).prop_filter("near a boundary", |&(l, m)| {
        (l.abs() + m.abs() - 2.0).abs() > 1e-3 && l.abs() > 1e-3 && m.abs() > 1e-3
    })
}

fn property_suites() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });

    runner
        .run(
            &(-2.0..2.0_f64, 0.01..1.0_f64, -1.0..1.0_f64, -1.0..1.0_f64, 1usize..10),
            |(w0, wc, g_r, g_cr, n_max)| {
                let space = FockSpace::new(n_max).unwrap();
                let h = effective_static(space, w0, wc, g_r, g_cr).at(0.0);
                let (hd, pd) = (h.to_dense(), SparseOp::parity(&space).to_dense());
                let commutator = (&hd * &pd - &pd * &hd).iter().map(|z| z.norm()).fold(0.0, f64::max);
                prop_assert!(commutator < 1e-12 && h.hermiticity_defect() < 1e-12);
                Ok(())
            },
        )
        .map_err(|e| fail("parity and hermiticity", e))?;

    runner
        .run(&(clear_point(), 10.0..1e4_f64), |((l, m), eta)| {
            let model = EffectiveModel::from_reduced(1.0, eta, l, m).unwrap();
            let (rc, mirror) = (ReducedCouplings::new(l, m), ReducedCouplings::new(l, -m));
            let label = classify_phase(&rc, 1e-12).unwrap();
            let w = excitation_energy(&rc, &model).unwrap();
            let w_mirror = excitation_energy(&mirror, &model).unwrap();
            prop_assert!((w - w_mirror).abs() <= 1e-12 * w.abs().max(1e-300));
            if matches!(label, PhaseLabel::Sx | PhaseLabel::Sp) {
                prop_assert!(classify_phase(&mirror, 1e-12).unwrap() != label);
                let op = order_parameters(&rc, &model).unwrap();
                let product = op.var_x.finite().unwrap() * op.var_p.finite().unwrap();
                prop_assert!((product - 0.25).abs() < 1e-12);
            }
            Ok(())
        })
        .map_err(|e| fail("mirror symmetry and minimal uncertainty", e))?;

    runner
        .run(
            &(0.02..0.98_f64, 0usize..4, 10.0..1e4_f64),
            |(fraction, quadrant, eta)| {
                let (sl, sm) = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)][quadrant];
                let (l, m) = (sl * 2.0 * fraction, sm * 2.0 * (1.0 - fraction));
                let step = 1e-6 / 2.0_f64.sqrt();
                let model = EffectiveModel::from_reduced(1.0, eta, l, m).unwrap();
                let inside = ground_energy(&ReducedCouplings::new(l - sl * step, m - sm * step), &model).unwrap();
                let outside = ground_energy(&ReducedCouplings::new(l + sl * step, m + sm * step), &model).unwrap();
                prop_assert!((inside - outside).abs() < 1e-5 * model.omega0_eff.abs());
                Ok(())
            },
        )
        .map_err(|e| fail("ground-energy continuity", e))?;

    runner
        .run(&(-40i32..40, 0.05..50.0_f64), |(n, x)| {
            let (a, b, c) = (
                bessel_j(n - 1, x).unwrap(),
                bessel_j(n, x).unwrap(),
                bessel_j(n + 1, x).unwrap(),
            );
            let scale = a.abs().max(b.abs()).max(c.abs()).max(1e-3);
            prop_assert!((a + c - 2.0 * n as f64 / x * b).abs() <= 1e-12 * scale);
            let norm = (1..=120).fold(bessel_j(0, x).unwrap().powi(2), |s, k| {
                s + 2.0 * bessel_j(k, x).unwrap().powi(2)
            });
            prop_assert!((norm - 1.0).abs() < 1e-12);
            Ok(())
        })
        .map_err(|e| fail("Bessel recurrence and normalisation", e))?;

    Ok(format!("4 suites x {PROPERTY_CASES} cases"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        (
            "excitation-energy zeros along the modulation amplitude",
            transitions_along_amplitude,
        ),
        ("extremes of the reduced couplings", coupling_extremes),
        ("anisotropic boundary zeros and maximum", anisotropic_boundary),
        ("exact criticalities of the excitation spectra", spectrum_criticalities),
        ("first- and second-order transitions", transition_orders),
        ("A² ratio at the audited points", a2_audit),
        ("loss-shifted critical coupling", dissipative_boundary),
        ("two-sideband fidelity", two_sideband_fidelity),
        ("exact diagonalization against the analytic limit", ed_against_analytic),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
