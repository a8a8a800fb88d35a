//! Named sweeps reproducing the standard data sets: effective ratio and
//! couplings against the modulation, the anisotropic boundary, excitation
//! spectra, order parameters, energy derivatives, the A² audit and the
//! two-sideband fidelity.
//!
//! Parameters the named data set leaves open use the sweep defaults. One-axis
//! grids have 300 points and two-axis grids 121 per axis, except where a
//! feature has to sit on a grid point (see the individual presets).

use super::spec::{Axis, Engine, SweepSpec};
use super::SweepError;
use crate::model::SelectionMode;

/// Name and one-line description of every preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2a", "effective ratio eta_eff versus nu for eta = 100 and 1000"),
    ("fig2b", "g_r/g_c and g_cr/g_c versus xi, eta = 1, nu = 0.49, manual sidebands (-1, -4), which neither selection rule picks here"),
    ("fig2c", "g_r/g_c and g_cr/g_c versus xi, eta = 100, nu = 0.68"),
    ("fig3", "anisotropic boundary g_tilde_c versus xi for nu = 0.402, 0.68, 0.8"),
    ("fig4a", "excitation energy versus g_cr/g_c at g_r/g_c = 1"),
    ("fig4b", "excitation energy versus g_cr/g_c at g_r/g_c = 2.5"),
    ("fig4c", "excitation energy versus g_cr/g_c at g_r = 0"),
    ("fig4d", "excitation energy versus g_r/g_c at g_cr = 0"),
    ("fig5", "excitation energy and phase versus xi, eta = 100, nu = 0.68, g = 0.06"),
    ("fig6", "<x> and <p> over the (g_r/g_c, g_cr/g_c) plane"),
    ("fig7", "coupling trajectory and <x> versus xi in [0, 3]"),
    ("fig8", "first and second derivatives of the ground energy over the coupling plane"),
    ("fig10a", "g_A2 / (2 omega_c') over (g, chi) at eta = 100"),
    ("fig10b", "g_A2 / (2 omega_c') over (g, chi) at eta = 1"),
    ("fig14", "two-sideband fidelity F(t) for nu = 0.49, 0.68, 1 (dynamics engine)"),
];

const LINE: usize = 300;
const PLANE: usize = 121;
/// 0.02 spacing on [-3, 3], so the critical couplings 0, ±1, ±2 are grid points.
const COUPLING_LINE: usize = 301;

fn spectrum_along(axis: &str, other: &str, value: f64) -> SweepSpec {
    SweepSpec::new(vec![Axis::linear(axis, -3.0, 3.0, COUPLING_LINE)])
        .fix(other, value)
        .fix("eta", 100.0)
        .fix("nu", 0.68)
        .quantities(&["phase", "omega", "omega_scaled"])
}

fn coupling_plane(quantities: &[&str]) -> SweepSpec {
    SweepSpec::new(vec![
        Axis::linear("lambda", -3.0, 3.0, PLANE),
        Axis::linear("mu", -3.0, 3.0, PLANE),
    ])
    .fix("eta", 100.0)
    .quantities(quantities)
}

fn a2_plane(eta: f64, chi_max: f64) -> SweepSpec {
    SweepSpec::new(vec![
        Axis::linear("g", 0.01, 0.1, PLANE),
        Axis::linear("chi", 0.0, chi_max, PLANE),
    ])
    .fix("eta", eta)
    .quantities(&["a2_ratio", "a2_coupling_ratio"])
}

pub fn figure_preset(name: &str) -> Result<SweepSpec, SweepError> {
    let spec = match name {
        "fig2a" => SweepSpec::new(vec![
            Axis::list("eta", &[100.0, 1000.0]),
            Axis::linear("nu", 0.1, 1.5, LINE),
        ])
        .fix("g", 0.06)
        .quantities(&["eta_eff", "omega0_eff", "omega_c_eff", "n0"]),
        "fig2b" => SweepSpec::new(vec![Axis::linear("xi", 0.0, 12.0, LINE)])
            .fix("eta", 1.0)
            .fix("nu", 0.49)
            .fix("g", 0.06)
            .selection(SelectionMode::Manual { n0: -1, m0: -4 })
            .quantities(&["lambda", "mu", "eta_eff"]),
        "fig2c" => SweepSpec::new(vec![Axis::linear("xi", 0.0, 12.0, LINE)])
            .fix("eta", 100.0)
            .fix("nu", 0.68)
            .fix("g", 0.06)
            .quantities(&["lambda", "mu"]),
        // 0.01 spacing in xi so the zeros of the boundary are resolved.
        "fig3" => SweepSpec::new(vec![
            Axis::list("nu", &[0.402, 0.68, 0.8]),
            Axis::linear("xi", 0.0, 12.0, 1201),
        ])
        .fix("eta", 100.0)
        .fix("g", 0.06)
        .quantities(&["g_tilde_c"]),
        "fig4a" => spectrum_along("mu", "lambda", 1.0),
        "fig4b" => spectrum_along("mu", "lambda", 2.5),
        "fig4c" => spectrum_along("mu", "lambda", 0.0),
        "fig4d" => spectrum_along("lambda", "mu", 0.0),
        "fig5" => SweepSpec::new(vec![Axis::linear("xi", 0.0, 3.0, LINE)])
            .fix("eta", 100.0)
            .fix("nu", 0.68)
            .fix("g", 0.06)
            .quantities(&["phase", "omega", "omega_scaled", "lambda", "mu"]),
        "fig6" => coupling_plane(&["phase", "x_mean", "p_mean", "x_scaled", "p_scaled"]),
        "fig7" => SweepSpec::new(vec![Axis::linear("xi", 0.0, 3.0, LINE)])
            .fix("eta", 100.0)
            .fix("nu", 0.68)
            .fix("g", 0.06)
            .quantities(&["lambda", "mu", "phase", "x_mean", "x_scaled"]),
        "fig8" => coupling_plane(&["de_dlambda", "de_dmu", "d2e_dlambda2", "d2e_dmu2"]).fix("omega0", 1.0),
        "fig10a" => a2_plane(100.0, 2.0),
        "fig10b" => a2_plane(1.0, 10.0),
        "fig14" => SweepSpec::new(vec![
            Axis::list("nu", &[0.49, 0.68, 1.0]),
            Axis::linear("t", 0.0, 10.0, 101),
        ])
        .fix("eta", 100.0)
        .fix("g", 0.06)
        .fix("chi", 0.0)
        .fix("xi", 1.5)
        .fix("alpha", 0.1)
        .fix("n_max", 22.0)
        .engine(Engine::Dynamics)
        .quantities(&["fidelity"]),
        _ => return Err(SweepError::UnknownPreset(name.to_string())),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run_sweep, Cell};

    #[test]
    fn every_preset_is_valid() {
        for (name, _) in PRESETS {
            figure_preset(name)
                .unwrap()
                .validate()
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(figure_preset("fig9"), Err(SweepError::UnknownPreset(_))));
    }

    #[test]
    fn stated_parameters() {
        let fig5 = figure_preset("fig5").unwrap();
        assert_eq!(fig5.axes, vec![Axis::linear("xi", 0.0, 3.0, 300)]);
        assert_eq!(
            (fig5.fixed["eta"], fig5.fixed["nu"], fig5.fixed["g"]),
            (100.0, 0.68, 0.06)
        );
        assert_eq!(fig5.engine, Engine::Analytic);

        let fig14 = figure_preset("fig14").unwrap();
        assert_eq!(fig14.engine, Engine::Dynamics);
        assert_eq!((fig14.fixed["xi"], fig14.fixed["alpha"]), (1.5, 0.1));
        assert_eq!(fig14.axes[0], Axis::list("nu", &[0.49, 0.68, 1.0]));

        let fig10a = figure_preset("fig10a").unwrap();
        let names: Vec<&str> = fig10a.axes.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["g", "chi"]);
        assert_eq!(fig10a.fixed["eta"], 100.0);
        assert_eq!(fig10a.quantities[0], "a2_ratio");

        let fig2b = figure_preset("fig2b").unwrap();
        assert_eq!(fig2b.selection, SelectionMode::Manual { n0: -1, m0: -4 });
        assert_eq!((fig2b.fixed["eta"], fig2b.fixed["nu"]), (1.0, 0.49));

        for (name, lambda) in [("fig4a", 1.0), ("fig4b", 2.5), ("fig4c", 0.0)] {
            let s = figure_preset(name).unwrap();
            assert_eq!(s.fixed["lambda"], lambda);
            assert_eq!(s.axes[0].name, "mu");
        }
        assert_eq!(figure_preset("fig8").unwrap().fixed["omega0"], 1.0);
    }

    #[test]
    fn fig3_table_has_three_columns() {
        let r = run_sweep(&figure_preset("fig3").unwrap()).unwrap();
        assert_eq!(r.columns, ["nu", "xi", "g_tilde_c"]);
        assert_eq!(r.rows.len(), 3 * 1201);
        let low: Vec<f64> = r.rows[..1201].iter().map(|row| row[2].as_f64().unwrap()).collect();
        let max = low.iter().cloned().fold(0.0, f64::max);
        assert!((max - 0.031).abs() < 0.001, "{max}");
        let flat: Vec<f64> = r.rows[1201..2402].iter().map(|row| row[2].as_f64().unwrap()).collect();
        assert!(flat.iter().all(|v| (v - flat[0]).abs() < 1e-15));
    }

    #[test]
    fn fig6_order_parameter_regions() {
        let r = run_sweep(&figure_preset("fig6").unwrap()).unwrap();
        for row in &r.rows {
            let (l, m) = (row[0].as_f64().unwrap(), row[1].as_f64().unwrap());
            if l.abs() + m.abs() < 2.0 - 1e-9 {
                assert_eq!(row[3], Cell::Num(0.0), "({l}, {m})");
                assert_eq!(row[4], Cell::Num(0.0), "({l}, {m})");
            }
            if row[2] == Cell::Text("SX".into()) {
                assert!(row[3].as_f64().unwrap() > 0.0, "({l}, {m})");
            }
        }
    }
}
