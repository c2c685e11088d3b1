//! One function per subcommand, each turning a configuration into a report
//! and, where it makes sense, a plot.

use gthresh_core::bath::{correlation_from_spectrum, SpectralDensity, SpectrumKind};
use gthresh_core::dephasing::{cnot_error_bound, cnot_error_from_exponent, dephasing_exponent, flip_probabilities};
use gthresh_core::oracle::suite::run_verification;
use gthresh_core::quad::Tolerance;
use gthresh_core::strength::{
    almost_markovian, gaussian_strength, long_range_report, ohmic_closed, short_range_report, StrengthReport,
};
use gthresh_core::threshold::{
    level_reduce, malignant_residual, malignant_threshold, postselect_residual, postselect_threshold,
    threshold_from_counts,
};

use crate::config::{ModelConfig, RunConfig, TimeGrid};
use crate::error::CliError;
use crate::plot::{Plot, Series};
use crate::report::{Cell, Report, Table};

/// Relative quadrature tolerance when `--tol` is absent.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Samples in the default `spectrum` time grid.
const DEFAULT_POINTS: usize = 201;

pub struct Output {
    pub report: Report,
    pub plot: Option<Plot>,
}

fn quad_tol(rel: Option<f64>) -> Tolerance {
    Tolerance::default().with_rel(rel.unwrap_or(DEFAULT_REL_TOL))
}

fn sample_times(grid: Option<&TimeGrid>, spec: &SpectralDensity) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::config(msg, Some("/times".into()));
    if let Some(g) = grid {
        if let Some(v) = &g.values {
            if g.start.is_some() || g.stop.is_some() || g.points.is_some() {
                return Err(bad("give either `values` or `start`/`stop`/`points`"));
            }
            if v.iter().any(|t| !t.is_finite()) {
                return Err(bad("sample times must be finite"));
            }
            return Ok(v.clone());
        }
        let (Some(start), Some(stop)) = (g.start, g.stop) else {
            return Err(bad("a time range needs `start` and `stop`"));
        };
        let points = g.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 || !(stop > start) || !start.is_finite() || !stop.is_finite() {
            return Err(bad("need finite start < stop and at least two points"));
        }
        return Ok(linspace(start, stop, points));
    }
    // Ten natural time scales of the spectrum.
    let scale = match spec.kind() {
        SpectrumKind::Ohmic { cutoff_time, .. } => *cutoff_time,
        SpectrumKind::Modes(modes) => {
            let fastest = modes.iter().map(|m| m.frequency).fold(0.0, f64::max);
            if fastest > 0.0 {
                2.0 * std::f64::consts::PI / fastest
            } else {
                1.0
            }
        }
        SpectrumKind::Tabulated(table) => {
            let reach = table.omega().iter().fold(0.0f64, |a, w| a.max(w.abs()));
            2.0 * std::f64::consts::PI / reach
        }
    };
    Ok(linspace(0.0, 10.0 * scale, DEFAULT_POINTS))
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let step = (stop - start) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { stop } else { start + step * i as f64 })
        .collect()
}

/// `Δ(t)` on a time grid.
pub fn spectrum(cfg: &RunConfig, rel_tol: Option<f64>) -> Result<Output, CliError> {
    let spec = cfg.spectrum()?;
    let times = sample_times(cfg.times.as_ref(), &spec)?;
    let tol = quad_tol(rel_tol);
    let mut table = Table::new("correlation", &["t", "re", "im", "abs", "error"]);
    let (mut re, mut im) = (Vec::new(), Vec::new());
    for &t in &times {
        let est = correlation_from_spectrum(&spec, t, tol)?;
        table.push(vec![
            t.into(),
            est.value.re.into(),
            est.value.im.into(),
            est.value.norm().into(),
            est.error.into(),
        ]);
        re.push((t, est.value.re));
        im.push((t, est.value.im));
    }
    let mut report = Report::new("spectrum");
    report.tables.push(table);
    Ok(Output {
        report,
        plot: Some(Plot {
            title: "bath correlation function".into(),
            x_label: "t".into(),
            y_label: "Δ(t)".into(),
            series: vec![
                Series {
                    label: "Re Δ".into(),
                    points: re,
                },
                Series {
                    label: "Im Δ".into(),
                    points: im,
                },
            ],
        }),
    })
}

fn strength_report(cfg: &RunConfig, rel_tol: Option<f64>) -> Result<StrengthReport, CliError> {
    let model = cfg.model.unwrap_or(ModelConfig::Gaussian);
    let at = |e| CliError::core_at(e, "/model");
    match model {
        ModelConfig::Gaussian => {
            let spec = cfg.spectrum()?;
            let schedule = cfg.schedule()?;
            let corr = cfg.correlation(&spec, rel_tol)?;
            Ok(gaussian_strength(&schedule, &corr)?)
        }
        ModelConfig::ShortRange { norm_max } => short_range_report(norm_max, cfg.schedule()?.gate_time()).map_err(at),
        ModelConfig::LongRange { row_sum_norm } => {
            long_range_report(row_sum_norm, cfg.schedule()?.gate_time()).map_err(at)
        }
        ModelConfig::AlmostMarkovian { rate } => almost_markovian(rate, cfg.schedule()?.gate_time()).map_err(at),
        ModelConfig::OhmicClosed => {
            let spec = cfg.spectrum()?;
            let t0 = cfg.schedule()?.gate_time();
            match (spec.kind(), spec.beta()) {
                (SpectrumKind::Ohmic { amplitude, cutoff_time }, None) => {
                    ohmic_closed(*amplitude, t0, *cutoff_time).map_err(at)
                }
                _ => Err(CliError::config(
                    "the ohmic_closed model needs a zero-temperature Ohmic spectrum",
                    Some("/spectrum".into()),
                )),
            }
        }
    }
}

/// Noise strength for the configured model.
pub fn strength(cfg: &RunConfig, rel_tol: Option<f64>) -> Result<Output, CliError> {
    let r = strength_report(cfg, rel_tol)?;
    let mut table = Table::new("strength", &["model", "E", "epsilon", "valid", "argmax_location"]);
    table.push(vec![
        r.model.name().into(),
        r.integrated.into(),
        r.epsilon.into(),
        r.valid.into(),
        r.argmax_location.into(),
    ]);
    let mut report = Report::new("strength");
    report.tables.push(table);
    Ok(Output { report, plot: None })
}

/// Noise strength per concatenation level.
pub fn levels(cfg: &RunConfig) -> Result<Output, CliError> {
    let lv = cfg.require_levels()?;
    let counts = if lv.threshold.is_none() || lv.s.is_none() {
        Some(cfg.counts()?)
    } else {
        None
    };
    let threshold = match (lv.threshold, counts) {
        (Some(t), _) => t,
        (None, Some(c)) => threshold_from_counts(c.locations, c.faults_to_fail, c.zeta_at(Some(lv.epsilon)))
            .map_err(|e| CliError::core_at(e, "/gadget_counts"))?,
        (None, None) => unreachable!("counts are loaded whenever the threshold is absent"),
    };
    let s = match (lv.s, counts) {
        (Some(s), _) => s,
        (None, Some(c)) => u32::try_from(c.faults_to_fail)
            .map_err(|_| CliError::config("faults_to_fail is too large", Some("/gadget_counts".into())))?,
        (None, None) => unreachable!("counts are loaded whenever s is absent"),
    };
    let trace = level_reduce(lv.epsilon, threshold, s, lv.k_max).map_err(|e| CliError::core_at(e, "/levels"))?;
    let mut table = Table::new("levels", &["k", "epsilon", "threshold"]);
    let mut points = Vec::new();
    for (k, &e) in trace.per_level.iter().enumerate() {
        table.push(vec![k.into(), e.into(), threshold.into()]);
        points.push((k as f64, e));
    }
    let mut report = Report::new("levels");
    report.tables.push(table);
    Ok(Output {
        report,
        plot: Some(Plot {
            title: "noise strength by level".into(),
            x_label: "level k".into(),
            y_label: "ε(k)".into(),
            series: vec![Series {
                label: format!("ε₀ = {threshold:.3e}, s = {s}"),
                points,
            }],
        }),
    })
}

/// Threshold estimates from gadget counts.
pub fn threshold(cfg: &RunConfig) -> Result<Output, CliError> {
    let c = cfg.counts()?;
    let at = |e| CliError::core_at(e, "/gadget_counts");
    let mut table = Table::new("threshold", &["method", "threshold", "residual"]);
    let fault = threshold_from_counts(c.locations, c.faults_to_fail, c.zeta_at(None)).map_err(at)?;
    table.push(vec!["fault_count".into(), fault.into(), Cell::Missing]);
    if c.malignant_pairs > 0 {
        let (b, cc, d) = (c.malignant_pairs as f64, c.preparation as f64, c.triples as f64);
        let m = malignant_threshold(c.malignant_pairs, c.triples).map_err(at)?;
        table.push(vec![
            "malignant_pairs".into(),
            m.into(),
            malignant_residual(b, d, m).into(),
        ]);
        let p = postselect_threshold(c.malignant_pairs, c.preparation, c.triples).map_err(at)?;
        table.push(vec![
            "postselected".into(),
            p.closed_form.into(),
            postselect_residual(b, cc, d, p.closed_form).into(),
        ]);
        table.push(vec![
            "postselected_bisection".into(),
            p.root.into(),
            postselect_residual(b, cc, d, p.root).into(),
        ]);
    }
    let mut report = Report::new("threshold");
    report.tables.push(table);
    Ok(Output { report, plot: None })
}

/// Repetition-code CNOT gadget under dephasing noise.
pub fn dephasing(cfg: &RunConfig, rel_tol: Option<f64>) -> Result<Output, CliError> {
    let spec = cfg.spectrum()?;
    let dc = cfg.require_dephasing()?;
    let bad = |msg: &str| CliError::config(msg, Some("/dephasing".into()));
    let ohmic = match spec.kind() {
        SpectrumKind::Ohmic { amplitude, cutoff_time } => Some((*amplitude, *cutoff_time)),
        _ => None,
    };
    let t0 = match (dc.t0, dc.t0_over_tauc, ohmic) {
        (Some(_), Some(_), _) => return Err(bad("give either `t0` or `t0_over_tauc`, not both")),
        (Some(t0), None, _) => t0,
        (None, Some(r), Some((_, tau))) => r * tau,
        (None, Some(_), None) => return Err(bad("`t0_over_tauc` needs an Ohmic spectrum")),
        (None, None, _) => return Err(bad("the gate time needs `t0` or `t0_over_tauc`")),
    };
    let tol = quad_tol(rel_tol);
    let at = |e| CliError::core_at(e, "/dephasing");
    let mut table = Table::new(
        "dephasing",
        &[
            "n",
            "exposure",
            "exponent_bound",
            "exponent",
            "p_bad",
            "eps_cnot",
            "meaningful",
        ],
    );
    let mut points = Vec::new();
    for n in dc.n.values() {
        let exposure = f64::from(3 * n + 2) * t0;
        let exponent = dephasing_exponent(&spec, exposure, tol)?;
        let (p_bad, _) = flip_probabilities(exponent)?;
        let (bound, eps, meaningful) = match (ohmic, spec.beta()) {
            (Some((a, tau)), None) => {
                let b = cnot_error_bound(n, a, t0, tau).map_err(at)?;
                (b.exponent, b.epsilon, b.meaningful)
            }
            _ => (
                exponent,
                cnot_error_from_exponent(n, exponent).map_err(at)?,
                exponent < 1.0,
            ),
        };
        table.push(vec![
            n.into(),
            exposure.into(),
            bound.into(),
            exponent.into(),
            p_bad.into(),
            eps.into(),
            meaningful.into(),
        ]);
        points.push((f64::from(n), eps));
    }
    let mut report = Report::new("dephasing");
    report.tables.push(table);
    Ok(Output {
        report,
        plot: Some(Plot {
            title: "CNOT gadget error bound".into(),
            x_label: "repetition length n".into(),
            y_label: "ε_CNOT".into(),
            series: vec![Series {
                label: "bound".into(),
                points,
            }],
        }),
    })
}

/// The oracle suites. A failing suite still produces its report.
pub fn verify() -> Result<(Output, Vec<String>), CliError> {
    let outcome = run_verification()?;
    let mut table = Table::new("verify", &["suite", "cases", "max_deviation", "tolerance", "passed"]);
    let mut failed = Vec::new();
    for s in &outcome.suites {
        table.push(vec![
            s.name.as_str().into(),
            s.cases.into(),
            s.max_deviation.into(),
            s.tolerance.into(),
            s.passed.into(),
        ]);
        if !s.passed {
            failed.push(s.name.clone());
        }
    }
    let mut report = Report::new("verify");
    report.tables.push(table);
    Ok((Output { report, plot: None }, failed))
}

/// Every computation whose inputs the configuration provides.
pub fn report(cfg: &RunConfig, rel_tol: Option<f64>) -> Result<Output, CliError> {
    let mut combined = Report::new("report");
    let mut take = |out: Output| combined.tables.extend(out.report.tables);
    if cfg.spectrum.is_some() {
        take(spectrum(cfg, rel_tol)?);
    }
    let model_ready = match cfg.model.unwrap_or(ModelConfig::Gaussian) {
        ModelConfig::Gaussian | ModelConfig::OhmicClosed => cfg.spectrum.is_some() && cfg.schedule.is_some(),
        _ => cfg.schedule.is_some(),
    };
    if model_ready {
        take(strength(cfg, rel_tol)?);
    }
    if cfg.gadget_counts.is_some() {
        take(threshold(cfg)?);
    }
    if cfg.levels.is_some() {
        take(levels(cfg)?);
    }
    if cfg.dephasing.is_some() {
        take(dephasing(cfg, rel_tol)?);
    }
    if combined.tables.is_empty() {
        return Err(CliError::config("the configuration enables no computation", None));
    }
    Ok(Output {
        report: combined,
        plot: None,
    })
}
