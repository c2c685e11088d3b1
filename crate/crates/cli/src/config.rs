//! JSON run configuration. Parsing is strict: unknown keys are rejected and
//! every error carries a JSON pointer to the offending value.

use std::path::Path;

use gthresh_core::bath::{CorrelationFunction, Kernel, Mode, SpatialStructure, SpectralDensity, Table};
use gthresh_core::geometry::{LocationSpec, Schedule};
use gthresh_core::threshold::GadgetCounts;
use gthresh_core::Complex64;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spectrum: Option<SpectrumConfig>,
    pub schedule: Option<ScheduleConfig>,
    pub model: Option<ModelConfig>,
    pub correlation: Option<CorrelationConfig>,
    pub gadget_counts: Option<CountsConfig>,
    pub levels: Option<LevelsConfig>,
    pub dephasing: Option<DephasingConfig>,
    pub times: Option<TimeGrid>,
    pub output: Option<OutputConfig>,
}

/// One of `{"kind":"ohmic","A","tau_c","beta"?}`, `{"kind":"modes","modes","beta"?}`
/// or `{"kind":"table","omega","value"}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub kind: SpectrumName,
    #[serde(rename = "A")]
    pub amplitude: Option<f64>,
    pub tau_c: Option<f64>,
    pub beta: Option<f64>,
    pub modes: Option<Vec<ModeEntry>>,
    pub omega: Option<Vec<f64>>,
    pub value: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumName {
    Ohmic,
    Modes,
    Table,
}

/// `[g, ω]` or `[Re g, Im g, ω]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(try_from = "Vec<f64>")]
pub struct ModeEntry(Mode);

impl TryFrom<Vec<f64>> for ModeEntry {
    type Error = String;

    fn try_from(v: Vec<f64>) -> Result<Self, String> {
        match v.as_slice() {
            [g, w] => Ok(ModeEntry(Mode::new(*g, *w))),
            [re, im, w] => Ok(ModeEntry(Mode {
                coupling: Complex64::new(*re, *im),
                frequency: *w,
            })),
            _ => Err(format!(
                "a mode is [g, omega] or [re_g, im_g, omega], got {} numbers",
                v.len()
            )),
        }
    }
}

/// Either a uniform schedule (`num_qubits`, `depth`, `t0`, `arity`) or an
/// explicit `locations` list.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub num_qubits: Option<usize>,
    pub depth: Option<usize>,
    pub t0: Option<f64>,
    pub arity: Option<usize>,
    pub locations: Option<Vec<LocationConfig>>,
    pub total_duration: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationConfig {
    pub qubits: Vec<usize>,
    pub start: f64,
    pub end: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Gaussian,
    ShortRange { norm_max: f64 },
    LongRange { row_sum_norm: f64 },
    AlmostMarkovian { rate: f64 },
    OhmicClosed,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationConfig {
    #[serde(default = "one")]
    pub n_pol: usize,
    #[serde(default)]
    pub structure: StructureConfig,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureConfig {
    #[default]
    Uncorrelated,
    Shared,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsConfig {
    #[serde(alias = "A_loc")]
    pub locations: u64,
    #[serde(alias = "s")]
    pub faults_to_fail: u64,
    #[serde(alias = "B_mal", default)]
    pub malignant_pairs: u64,
    #[serde(alias = "C_prep", default)]
    pub preparation: u64,
    #[serde(alias = "D_trip", default)]
    pub triples: u64,
    pub zeta: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsConfig {
    pub epsilon: f64,
    /// Defaults to the fault-count threshold of `gadget_counts`.
    pub threshold: Option<f64>,
    /// Defaults to `gadget_counts.faults_to_fail`.
    pub s: Option<u32>,
    pub k_max: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingConfig {
    pub n: OneOrMany,
    pub t0_over_tauc: Option<f64>,
    pub t0: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(u32),
    Many(Vec<u32>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<u32> {
        match self {
            OneOrMany::One(n) => vec![*n],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Sample times for the `spectrum` command: an explicit list or an
/// evenly spaced range.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_from_path(&e.path().to_string());
        CliError::config(e.inner().to_string(), Some(pointer))
    })
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(e, path))?;
    parse(&text)
}

/// `a.b[2].c` → `/a/b/2/c`.
fn pointer_from_path(path: &str) -> String {
    if path == "." {
        return String::new();
    }
    let mut out = String::new();
    for seg in path.split('.') {
        let mut rest = seg;
        while let Some(open) = rest.find('[') {
            let (head, tail) = rest.split_at(open);
            if !head.is_empty() {
                out.push('/');
                out.push_str(head);
            }
            let close = tail.find(']').unwrap_or(tail.len());
            out.push('/');
            out.push_str(&tail[1..close]);
            rest = tail.get(close + 1..).unwrap_or("");
        }
        if !rest.is_empty() {
            out.push('/');
            out.push_str(rest);
        }
    }
    out
}

fn missing(section: &str) -> CliError {
    CliError::config(
        format!("this command needs a `{section}` section"),
        Some(format!("/{section}")),
    )
}

impl RunConfig {
    pub fn spectrum(&self) -> Result<SpectralDensity, CliError> {
        let cfg = self.spectrum.as_ref().ok_or_else(|| missing("spectrum"))?;
        let at = |e: gthresh_core::Error| CliError::core_at(e, "/spectrum");
        let present = [
            ("A", cfg.amplitude.is_some()),
            ("tau_c", cfg.tau_c.is_some()),
            ("beta", cfg.beta.is_some()),
            ("modes", cfg.modes.is_some()),
            ("omega", cfg.omega.is_some()),
            ("value", cfg.value.is_some()),
        ];
        let allowed: &[&str] = match cfg.kind {
            SpectrumName::Ohmic => &["A", "tau_c", "beta"],
            SpectrumName::Modes => &["modes", "beta"],
            SpectrumName::Table => &["omega", "value"],
        };
        if let Some((key, _)) = present.iter().find(|(k, set)| *set && !allowed.contains(k)) {
            return Err(CliError::config(
                format!("`{key}` does not apply to this spectrum kind"),
                Some(format!("/spectrum/{key}")),
            ));
        }
        let need = |key: &str| {
            CliError::config(
                format!("this spectrum kind needs `{key}`"),
                Some(format!("/spectrum/{key}")),
            )
        };
        let base = match cfg.kind {
            SpectrumName::Ohmic => SpectralDensity::ohmic(
                cfg.amplitude.ok_or_else(|| need("A"))?,
                cfg.tau_c.ok_or_else(|| need("tau_c"))?,
            )
            .map_err(at)?,
            SpectrumName::Modes => {
                let modes = cfg.modes.as_ref().ok_or_else(|| need("modes"))?;
                SpectralDensity::modes(modes.iter().map(|m| m.0).collect()).map_err(at)?
            }
            SpectrumName::Table => {
                let omega = cfg.omega.clone().ok_or_else(|| need("omega"))?;
                let value = cfg.value.clone().ok_or_else(|| need("value"))?;
                SpectralDensity::tabulated(Table::new(omega, value).map_err(at)?).map_err(at)?
            }
        };
        match cfg.beta {
            Some(b) => base.with_beta(b).map_err(at),
            None => Ok(base),
        }
    }

    pub fn schedule(&self) -> Result<Schedule, CliError> {
        let cfg = self.schedule.as_ref().ok_or_else(|| missing("schedule"))?;
        let at = |e: gthresh_core::Error| CliError::core_at(e, "/schedule");
        let schedule = match &cfg.locations {
            Some(locs) => {
                if cfg.depth.is_some() || cfg.t0.is_some() || cfg.arity.is_some() {
                    return Err(CliError::config(
                        "explicit locations exclude depth, t0 and arity",
                        Some("/schedule".into()),
                    ));
                }
                let specs = locs
                    .iter()
                    .map(|l| LocationSpec {
                        qubits: l.qubits.clone(),
                        start: l.start,
                        end: l.end,
                    })
                    .collect();
                Schedule::new(specs, cfg.num_qubits, cfg.total_duration).map_err(at)?
            }
            None => {
                let need = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| {
                        CliError::config(
                            format!("uniform schedule needs `{key}`"),
                            Some(format!("/schedule/{key}")),
                        )
                    })
                };
                let nq = need(cfg.num_qubits.map(|n| n as f64), "num_qubits")? as usize;
                let depth = need(cfg.depth.map(|n| n as f64), "depth")? as usize;
                let t0 = need(cfg.t0, "t0")?;
                let s = Schedule::uniform(nq, depth, t0, cfg.arity.unwrap_or(1)).map_err(at)?;
                match cfg.total_duration {
                    Some(total) => s.with_total_duration(total).map_err(at)?,
                    None => s,
                }
            }
        };
        Ok(schedule)
    }

    pub fn correlation(
        &self,
        spectrum: &SpectralDensity,
        rel_tol: Option<f64>,
    ) -> Result<CorrelationFunction, CliError> {
        let cfg = self.correlation.unwrap_or(CorrelationConfig {
            n_pol: 1,
            structure: StructureConfig::Uncorrelated,
        });
        let structure = match cfg.structure {
            StructureConfig::Uncorrelated => SpatialStructure::Uncorrelated,
            StructureConfig::Shared => SpatialStructure::Shared,
        };
        let corr = CorrelationFunction::uniform(Kernel::from_spectrum(spectrum), cfg.n_pol, structure)
            .map_err(|e| CliError::core_at(e, "/correlation"))?;
        Ok(match rel_tol {
            Some(rel) => {
                let tol = corr.tolerance().with_rel(rel);
                corr.with_tolerance(tol)
            }
            None => corr,
        })
    }

    pub fn counts(&self) -> Result<GadgetCounts, CliError> {
        let c = self.gadget_counts.ok_or_else(|| missing("gadget_counts"))?;
        let counts = GadgetCounts {
            locations: c.locations,
            faults_to_fail: c.faults_to_fail,
            malignant_pairs: c.malignant_pairs,
            preparation: c.preparation,
            triples: c.triples,
            zeta: c.zeta,
        };
        counts.validate().map_err(|e| CliError::core_at(e, "/gadget_counts"))?;
        Ok(counts)
    }

    pub fn output_format(&self) -> Option<Format> {
        self.output.as_ref().and_then(|o| o.format)
    }

    pub fn output_path(&self) -> Option<&str> {
        self.output.as_ref().and_then(|o| o.path.as_deref())
    }

    pub fn require_levels(&self) -> Result<LevelsConfig, CliError> {
        self.levels.ok_or_else(|| missing("levels"))
    }

    pub fn require_dephasing(&self) -> Result<&DephasingConfig, CliError> {
        self.dephasing.as_ref().ok_or_else(|| missing("dephasing"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointers() {
        assert_eq!(pointer_from_path("spectrum.A"), "/spectrum/A");
        assert_eq!(
            pointer_from_path("schedule.locations[2].start"),
            "/schedule/locations/2/start"
        );
        assert_eq!(pointer_from_path("."), "");
    }

    #[test]
    fn unknown_keys_rejected_with_pointer() {
        let err = parse(r#"{"spectrum":{"kind":"ohmic","A":1,"tau_c":1,"bogus":2}}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_json().contains("/spectrum"), "{}", err.to_json());
        let err = parse(r#"{"nonsense":1}"#).unwrap_err();
        assert!(err.to_json().contains("nonsense"));
    }

    #[test]
    fn modes_accept_complex_couplings() {
        let cfg = parse(r#"{"spectrum":{"kind":"modes","modes":[[0.1,1.0],[0.1,0.2,2.0]]}}"#).unwrap();
        assert!(cfg.spectrum().is_ok());
        let err = parse(r#"{"spectrum":{"kind":"modes","modes":[[0.1]]}}"#).unwrap_err();
        assert!(err.to_json().contains("/spectrum/modes/0"), "{}", err.to_json());
    }

    #[test]
    fn uniform_schedule_needs_fields() {
        let cfg = parse(r#"{"schedule":{"num_qubits":2,"t0":1}}"#).unwrap();
        assert!(cfg.schedule().unwrap_err().to_json().contains("/schedule/depth"));
    }

    #[test]
    fn keys_must_match_the_spectrum_kind() {
        let cfg = parse(r#"{"spectrum":{"kind":"ohmic","A":1,"tau_c":1,"modes":[]}}"#).unwrap();
        assert!(cfg.spectrum().unwrap_err().to_json().contains("/spectrum/modes"));
        let cfg = parse(r#"{"spectrum":{"kind":"table","omega":[0,1]}}"#).unwrap();
        assert!(cfg.spectrum().unwrap_err().to_json().contains("/spectrum/value"));
    }
}
