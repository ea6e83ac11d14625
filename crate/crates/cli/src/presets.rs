//! Figure presets 1–9, each written as config text.

use crate::config::{parse_config_with, ExperimentConfig, Overrides};
use crate::error::{CliError, Result};

const RANGE_NOTE: &str = "axis range not stated numerically; chosen to cover the reported features";

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    /// Output subdirectory, e.g. `fig1a`.
    pub name: String,
    pub config: ExperimentConfig,
}

struct PanelText {
    suffix: &'static str,
    text: String,
    assumed: Vec<(&'static str, &'static str)>,
}

fn closed(body: &str) -> String {
    format!("mode = closed_sweep\ncharge.omega = 1\nmodel.k = 7pi/8\n{body}")
}

fn open(body: &str) -> String {
    format!("mode = open_scaling\nmodel.N_range = 2..8\nnoise.g = 0.2\n{body}")
}

fn fig1() -> Vec<PanelText> {
    [("a", "0.01", "0", "8"), ("b", "0.01", "-8", "0"), ("c", "0.1", "0", "50"), ("d", "0.1", "-50", "0")]
        .into_iter()
        .map(|(suffix, t, lo, hi)| PanelText {
            suffix,
            text: closed(&format!(
                "model.delta = 0\nmodel.Gamma = 0\nmodel.gamma = 0\nbath.T = {t}\n\
                 sweep.param = J\nsweep.min = {lo}\nsweep.max = {hi}\n\
                 sweep.curve_param = B\nsweep.curve_values = 0, 0.25, 0.5, 0.75, 1\n"
            )),
            assumed: vec![("sweep.min", RANGE_NOTE), ("sweep.max", RANGE_NOTE)],
        })
        .collect()
}

fn fig2() -> Vec<PanelText> {
    [("a", "0", "50"), ("b", "-50", "0")]
        .into_iter()
        .map(|(suffix, lo, hi)| PanelText {
            suffix,
            text: closed(&format!(
                "model.B = 0\nmodel.Gamma = 0\nmodel.gamma = 0\nbath.T = 0.1\n\
                 sweep.param = J\nsweep.min = {lo}\nsweep.max = {hi}\n\
                 sweep.curve_param = delta\nsweep.curve_values = 0.1, 0.2, 0.3, 0.4, 0.5\n"
            )),
            assumed: vec![("sweep.min", RANGE_NOTE), ("sweep.max", RANGE_NOTE)],
        })
        .collect()
}

fn fig3() -> Vec<PanelText> {
    vec![PanelText {
        suffix: "",
        text: closed(
            "model.J = 0\nmodel.delta = 0\nmodel.B = 0\nbath.T = 0.01\n\
             sweep.param = Gamma\nsweep.min = 0\nsweep.max = 10\n\
             sweep.curve_param = gamma\nsweep.curve_values = -1, -0.5, 0, 0.5, 1\n",
        ),
        assumed: vec![("sweep.min", RANGE_NOTE), ("sweep.max", RANGE_NOTE)],
    }]
}

fn fig4() -> Vec<PanelText> {
    const SCALED: &str = "Gamma values of panel (a) scaled by 1000";
    vec![
        PanelText {
            suffix: "a",
            text: closed(
                "model.J = 0\nmodel.delta = 0\nmodel.B = 0\nmodel.gamma = 0.5\n\
                 sweep.param = T\nsweep.min = 0.01\nsweep.max = 5\n\
                 sweep.curve_param = Gamma\nsweep.curve_values = 1, 1.25, 1.5, 1.75, 2\n",
            ),
            assumed: vec![("sweep.min", RANGE_NOTE), ("sweep.max", RANGE_NOTE)],
        },
        PanelText {
            suffix: "b",
            text: closed(
                "model.J = 0\nmodel.delta = 0\nmodel.B = 0\nmodel.gamma = 0.5\n\
                 sweep.param = T\nsweep.min = 10\nsweep.max = 5000\n\
                 sweep.curve_param = Gamma\nsweep.curve_values = 1000, 1250, 1500, 1750, 2000\n",
            ),
            assumed: vec![
                ("sweep.min", RANGE_NOTE),
                ("sweep.max", RANGE_NOTE),
                ("sweep.curve_values", SCALED),
            ],
        },
    ]
}

fn fig5() -> Vec<PanelText> {
    const NO_DELTA: &str = "anisotropy not given; it has no effect at J = 0";
    [("a", "0.25"), ("b", "1")]
        .into_iter()
        .map(|(suffix, b)| PanelText {
            suffix,
            text: open(&format!(
                "model.J = 0\nmodel.delta = 0\nmodel.Gamma = 0\nmodel.gamma = 0\nmodel.B = {b}\n\
                 charge.omega = 0.25\nbath.T = 0.1\n"
            )),
            assumed: vec![("model.delta", NO_DELTA)],
        })
        .collect()
}

fn fig6() -> Vec<PanelText> {
    const NO_DELTA: &str = "anisotropy not given; it has no effect at J = 0";
    const NO_T: &str = "temperature not given; matches the other open-system figures";
    [("a", "0.1"), ("b", "0.4")]
        .into_iter()
        .map(|(suffix, omega)| PanelText {
            suffix,
            text: open(&format!(
                "model.J = 0\nmodel.delta = 0\nmodel.Gamma = 0\nmodel.gamma = 0\nmodel.B = 0.1\n\
                 charge.omega = {omega}\nbath.T = 0.1\n"
            )),
            assumed: vec![("model.delta", NO_DELTA), ("bath.T", NO_T)],
        })
        .collect()
}

fn fig7() -> Vec<PanelText> {
    const NO_OMEGA: &str = "charging strength not given; matches B = Omega = 0.2 of the next figure";
    [("a", "0.5"), ("b", "1")]
        .into_iter()
        .map(|(suffix, j)| PanelText {
            suffix,
            text: open(&format!(
                "model.J = {j}\nmodel.delta = 0\nmodel.Gamma = 0\nmodel.gamma = 0\nmodel.B = 0.2\n\
                 charge.omega = 0.2\nbath.T = 0.1\n"
            )),
            assumed: vec![("charge.omega", NO_OMEGA)],
        })
        .collect()
}

fn fig8() -> Vec<PanelText> {
    [("a", "0.5"), ("b", "1")]
        .into_iter()
        .map(|(suffix, j)| PanelText {
            suffix,
            text: open(&format!(
                "model.J = {j}\nmodel.delta = 0.5\nmodel.Gamma = 0\nmodel.gamma = 0\nmodel.B = 0.2\n\
                 charge.omega = 0.2\nbath.T = 0.1\n"
            )),
            assumed: vec![],
        })
        .collect()
}

fn fig9() -> Vec<PanelText> {
    [("a", "2.5"), ("b", "5")]
        .into_iter()
        .map(|(suffix, gamma_cap)| PanelText {
            suffix,
            text: open(&format!(
                "model.J = 0.2\nmodel.delta = 0.5\nmodel.Gamma = {gamma_cap}\nmodel.gamma = -1\nmodel.B = 0.2\n\
                 charge.omega = 0.2\nbath.T = 0.1\n"
            )),
            assumed: vec![],
        })
        .collect()
}

/// Every panel of figure `id`, with `integrate.*` lines from `extra` and the
/// command-line `overrides` applied on top of the preset.
pub fn figure_panels(id: u32, extra: &[(String, String)], overrides: &Overrides) -> Result<Vec<Panel>> {
    let panels = match id {
        1 => fig1(),
        2 => fig2(),
        3 => fig3(),
        4 => fig4(),
        5 => fig5(),
        6 => fig6(),
        7 => fig7(),
        8 => fig8(),
        9 => fig9(),
        other => return Err(CliError::UnknownFigure(other)),
    };
    let overrides = Overrides {
        out_dir: None,
        ..overrides.clone()
    };
    panels
        .into_iter()
        .map(|p| {
            let mut text = p.text;
            let open_mode = text.starts_with("mode = open");
            for (key, value) in extra {
                if open_mode {
                    text.push_str(&format!("{key} = {value}\n"));
                }
            }
            let mut config = parse_config_with(&text, &overrides)?;
            for (key, note) in p.assumed {
                config.mark_assumed(key, note);
            }
            Ok(Panel {
                name: format!("fig{id}{}", p.suffix),
                config,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;
    use qbattery::SweepParam;

    #[test]
    fn every_figure_parses() {
        for id in 1..=9 {
            let panels = figure_panels(id, &[], &Overrides::default()).unwrap();
            assert!(!panels.is_empty());
            for p in &panels {
                assert_eq!(p.config.figure, None);
                assert!(p.name.starts_with(&format!("fig{id}")));
            }
        }
    }

    #[test]
    fn unknown_figure() {
        assert!(matches!(
            figure_panels(0, &[], &Overrides::default()),
            Err(CliError::UnknownFigure(0))
        ));
        assert!(matches!(
            figure_panels(10, &[], &Overrides::default()),
            Err(CliError::UnknownFigure(10))
        ));
    }

    #[test]
    fn fig1_has_four_panels_of_five_curves() {
        let panels = figure_panels(1, &[], &Overrides::default()).unwrap();
        assert_eq!(panels.len(), 4);
        for p in &panels {
            let sweep = p.config.sweep.as_ref().unwrap();
            assert_eq!(sweep.param, SweepParam::J);
            assert_eq!(sweep.curve_param, Some(SweepParam::B));
            assert_eq!(sweep.curve_values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        }
        assert_eq!(panels[0].config.temperature, 0.01);
        assert_eq!(panels[2].config.temperature, 0.1);
    }

    #[test]
    fn fig3_curves_over_gamma() {
        let panels = figure_panels(3, &[], &Overrides::default()).unwrap();
        assert_eq!(panels.len(), 1);
        let sweep = panels[0].config.sweep.as_ref().unwrap();
        assert_eq!(sweep.curve_values, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn open_presets_flag_their_assumptions() {
        let fig6 = figure_panels(6, &[], &Overrides::default()).unwrap();
        assert!(fig6.iter().all(|p| p.config.params["bath.T"].assumed && p.config.temperature == 0.1));
        let fig7 = figure_panels(7, &[], &Overrides::default()).unwrap();
        assert!(fig7.iter().all(|p| p.config.params["charge.omega"].assumed && p.config.omega == 0.2));
        let fig8 = figure_panels(8, &[], &Overrides::default()).unwrap();
        assert!(fig8.iter().all(|p| !p.config.params["charge.omega"].assumed));
        let fig9 = figure_panels(9, &[], &Overrides::default()).unwrap();
        assert_eq!(fig9[1].config.model.gamma_cap, 5.0);
        assert_eq!(fig9[0].config.mode, Mode::OpenScaling);
        assert_eq!(fig9[0].config.sizes, (2..=8).collect::<Vec<_>>());
    }

    #[test]
    fn overrides_reach_open_panels() {
        let extra = vec![("integrate.record_stride".to_string(), "10".to_string())];
        let ov = Overrides {
            t_max: Some(3.0),
            ..Overrides::default()
        };
        let panels = figure_panels(5, &extra, &ov).unwrap();
        assert_eq!(panels[0].config.integrator.t_max, 3.0);
        assert_eq!(panels[0].config.integrator.record_stride, 10);
        // closed presets ignore integrator settings
        let closed = figure_panels(3, &extra, &ov).unwrap();
        assert!(!closed[0].config.warnings.is_empty());
    }
}
