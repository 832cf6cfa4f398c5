//! The scenario document: one JSON file that drives every subcommand.
//!
//! The document mirrors how the infrastructure is shared — one spectrum
//! plan, one route, one detector — with optional sections for time-transfer
//! and sensing runs. Frequencies are stored in THz and rounded to six
//! decimal digits on output, so a load/save cycle is byte-identical.
//!
//! [`Scenario::resolve`] validates the document into domain types; profile
//! tables omitted from the document fall back to the supplied defaults,
//! and the resolved scenario can be echoed back fully explicit via
//! [`Scenario::to_doc`], which is how reports become self-describing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linkbudget::{
    Amplifier, AttenuationProfile, DetectorModel, FiberSpan, LinkElement, LinkError, LinkModel,
    OpticalFilter,
};
use crate::raman::{RamanError, RamanGainProfile, ThermalEnvironment};
use crate::sensing::{DisturbanceEvent, EventShape, SensingError};
use crate::spectral::{
    validate_plan, Band, Channel, ChannelPlan, ChannelRole, Frequency, SpectralError, Violation,
    Wavelength,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("channel plan has {} violation(s):\n{}", .0.len(), format_violations(.0))]
    PlanViolations(Vec<Violation>),
    #[error("scenario I/O: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl From<SpectralError> for ScenarioError {
    fn from(e: SpectralError) -> Self {
        ScenarioError::Schema(e.to_string())
    }
}

impl From<LinkError> for ScenarioError {
    fn from(e: LinkError) -> Self {
        ScenarioError::Schema(e.to_string())
    }
}

impl From<RamanError> for ScenarioError {
    fn from(e: RamanError) -> Self {
        ScenarioError::Schema(e.to_string())
    }
}

impl From<SensingError> for ScenarioError {
    fn from(e: SensingError) -> Self {
        ScenarioError::Schema(e.to_string())
    }
}

/// Round to six decimal digits; the canonical precision for THz values in
/// documents and reports.
pub fn round6(x: f64) -> f64 {
    if x.abs() >= 1e15 {
        x
    } else {
        (x * 1e6).round() / 1e6
    }
}

// ── document structs (serde layer) ──────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub plan: PlanDoc,
    pub link: LinkDoc,
    pub detector: DetectorDoc,
    pub environment: EnvironmentDoc,
    /// Quantum signal photon rate at the detector; required by the noise
    /// budget, unused elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_rate_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<ProfilesDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timesync: Option<TimesyncDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensing: Option<SensingDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDoc {
    #[serde(default)]
    pub guard_band_ghz: f64,
    pub channels: Vec<ChannelDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    pub center_thz: f64,
    pub width_ghz: f64,
    pub role: ChannelRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub launch_power_dbm: Option<f64>,
    #[serde(default)]
    pub amplified: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub elements: Vec<ElementDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementDoc {
    Span {
        length_km: f64,
        /// Omitted spans use the scenario-wide attenuation table.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attenuation: Option<AttenuationProfileDoc>,
    },
    Amplifier {
        gain_db: f64,
        noise_factor: f64,
        band: BandDoc,
    },
    Filter {
        center_thz: f64,
        passband_width_ghz: f64,
        insertion_loss_db: f64,
        out_of_band_isolation_db: f64,
        return_loss_db: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandDoc {
    pub name: String,
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorDoc {
    pub gate_rate_hz: f64,
    pub gate_width_s: f64,
    pub efficiency: f64,
    pub dark_rate_cps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentDoc {
    pub temperature_k: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilesDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raman_gain: Option<RamanProfileDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attenuation: Option<AttenuationProfileDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanProfileDoc {
    pub reference_pump_nm: f64,
    #[serde(default)]
    pub scale_with_pump: bool,
    /// (shift_thz, gain_per_w_km) pairs.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuationProfileDoc {
    /// (lambda_nm, loss_db_per_km) pairs.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesyncDoc {
    pub offset_ps: i64,
    #[serde(default)]
    pub drift_ppb: f64,
    #[serde(default = "default_granularity")]
    pub granularity_ps: i64,
    pub forward_ps: i64,
    pub backward_ps: i64,
    #[serde(default)]
    pub jitter_sigma_ps: f64,
    pub rounds: u32,
    pub seed: u64,
}

fn default_granularity() -> i64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingDoc {
    pub events: Vec<EventDoc>,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub noise_sigma_rad: f64,
    pub seed: u64,
    /// Wavelength of the sensing carrier; defaults to 1550 nm.
    #[serde(default = "default_sensing_lambda")]
    pub lambda_nm: f64,
}

fn default_sensing_lambda() -> f64 {
    1550.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    pub position_km: f64,
    pub start_s: f64,
    pub duration_s: f64,
    pub amplitude_um: f64,
    pub shape: ShapeDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDoc {
    GaussianPulse,
    Sinusoid { frequency_hz: f64 },
}

// ── resolved scenario (domain layer) ────────────────────────────────────

/// Profile tables used when the document does not override them. The CLI
/// layers the `COEXIST_SIM_PROFILE_DIR` tables on top of the shipped
/// defaults before resolving.
#[derive(Debug, Clone)]
pub struct ProfileDefaults {
    pub raman_gain: RamanGainProfile,
    pub attenuation: AttenuationProfile,
}

impl Default for ProfileDefaults {
    fn default() -> Self {
        Self {
            raman_gain: RamanGainProfile::default_silica(),
            attenuation: AttenuationProfile::default_g652(),
        }
    }
}

/// Time-transfer section, resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimesyncScenario {
    pub clock: crate::timesync::ClockState,
    pub delays: crate::timesync::LinkDelays,
    pub rounds: u32,
    pub seed: u64,
}

/// Sensing section, resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingScenario {
    pub events: Vec<DisturbanceEvent>,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub noise_sigma_rad: f64,
    pub seed: u64,
    pub lambda: Wavelength,
}

/// A fully validated scenario with all defaults filled in.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub plan: ChannelPlan,
    pub link: LinkModel,
    pub detector: DetectorModel,
    pub environment: ThermalEnvironment,
    pub signal_rate_per_s: Option<f64>,
    pub raman_profile: RamanGainProfile,
    /// Attenuation table applied to spans without their own override.
    pub attenuation: AttenuationProfile,
    pub timesync: Option<TimesyncScenario>,
    pub sensing: Option<SensingScenario>,
}

impl Scenario {
    /// Parse and resolve a scenario from JSON text. Plan violations are an
    /// error here — every subcommand except `plan validate` requires a
    /// clean plan, and that one inspects the violations itself.
    pub fn from_json_str(text: &str, defaults: &ProfileDefaults) -> Result<Self, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        Self::resolve(&doc, defaults)
    }

    /// Resolve a parsed document into validated domain types.
    pub fn resolve(doc: &ScenarioDoc, defaults: &ProfileDefaults) -> Result<Self, ScenarioError> {
        let attenuation = match doc.profiles.as_ref().and_then(|p| p.attenuation.as_ref()) {
            Some(a) => attenuation_from_doc(a)?,
            None => defaults.attenuation.clone(),
        };
        let raman_profile = match doc.profiles.as_ref().and_then(|p| p.raman_gain.as_ref()) {
            Some(r) => {
                RamanGainProfile::new(Wavelength::new(r.reference_pump_nm)?, r.points.clone())?
                    .with_pump_scaling(r.scale_with_pump)
            }
            None => defaults.raman_gain.clone(),
        };

        let mut channels = Vec::with_capacity(doc.plan.channels.len());
        for (i, ch) in doc.plan.channels.iter().enumerate() {
            let center = Frequency::new(ch.center_thz)
                .map_err(|e| ScenarioError::Schema(format!("channel {i}: {e}")))?;
            channels.push(
                Channel::new(
                    center,
                    ch.width_ghz,
                    ch.role,
                    ch.launch_power_dbm,
                    ch.amplified,
                )
                .map_err(|e| ScenarioError::Schema(format!("channel {i}: {e}")))?,
            );
        }
        let plan = ChannelPlan::new(channels, doc.plan.guard_band_ghz)?;
        let violations = validate_plan(&plan);
        if !violations.is_empty() {
            return Err(ScenarioError::PlanViolations(violations));
        }

        let mut elements = Vec::with_capacity(doc.link.elements.len());
        for el in &doc.link.elements {
            let mapped = match el {
                ElementDoc::Span {
                    length_km,
                    attenuation: span_att,
                } => {
                    let table = match span_att {
                        Some(a) => attenuation_from_doc(a)?,
                        None => attenuation.clone(),
                    };
                    LinkElement::Span(FiberSpan::new(*length_km, table)?)
                }
                ElementDoc::Amplifier {
                    gain_db,
                    noise_factor,
                    band,
                } => LinkElement::Amplifier(Amplifier::new(
                    *gain_db,
                    *noise_factor,
                    Band::new(
                        band.name.clone(),
                        Wavelength::new(band.lambda_min_nm)?,
                        Wavelength::new(band.lambda_max_nm)?,
                    )?,
                )?),
                ElementDoc::Filter {
                    center_thz,
                    passband_width_ghz,
                    insertion_loss_db,
                    out_of_band_isolation_db,
                    return_loss_db,
                } => LinkElement::Filter(OpticalFilter::new(
                    Frequency::new(*center_thz)?,
                    *passband_width_ghz,
                    *insertion_loss_db,
                    *out_of_band_isolation_db,
                    *return_loss_db,
                )?),
            };
            elements.push(mapped);
        }
        let link = LinkModel::new(elements)?;

        let detector = DetectorModel::new(
            doc.detector.gate_rate_hz,
            doc.detector.gate_width_s,
            doc.detector.efficiency,
            doc.detector.dark_rate_cps,
        )?;
        let environment = ThermalEnvironment::new(doc.environment.temperature_k)?;

        if let Some(rate) = doc.signal_rate_per_s {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(ScenarioError::Schema(format!(
                    "signal_rate_per_s must be non-negative, got {rate}"
                )));
            }
        }

        let timesync = match &doc.timesync {
            Some(t) => {
                if t.granularity_ps < 1 {
                    return Err(ScenarioError::Schema(format!(
                        "timesync granularity must be at least 1 ps, got {}",
                        t.granularity_ps
                    )));
                }
                if t.forward_ps <= 0 || t.backward_ps <= 0 {
                    return Err(ScenarioError::Schema(
                        "timesync delays must be positive".into(),
                    ));
                }
                if !(t.jitter_sigma_ps.is_finite() && t.jitter_sigma_ps >= 0.0) {
                    return Err(ScenarioError::Schema(
                        "timesync jitter sigma must be non-negative".into(),
                    ));
                }
                if t.rounds < 1 {
                    return Err(ScenarioError::Schema(
                        "timesync rounds must be at least 1".into(),
                    ));
                }
                Some(TimesyncScenario {
                    clock: crate::timesync::ClockState::new(
                        t.offset_ps,
                        t.drift_ppb,
                        t.granularity_ps,
                    ),
                    delays: crate::timesync::LinkDelays::new(
                        t.forward_ps,
                        t.backward_ps,
                        t.jitter_sigma_ps,
                    ),
                    rounds: t.rounds,
                    seed: t.seed,
                })
            }
            None => None,
        };

        let sensing = match &doc.sensing {
            Some(s) => {
                let events = s
                    .events
                    .iter()
                    .map(|e| {
                        DisturbanceEvent::new(
                            e.position_km,
                            e.start_s,
                            e.duration_s,
                            e.amplitude_um,
                            match e.shape {
                                ShapeDoc::GaussianPulse => EventShape::GaussianPulse,
                                ShapeDoc::Sinusoid { frequency_hz } => {
                                    EventShape::Sinusoid { frequency_hz }
                                }
                            },
                        )
                        .map_err(ScenarioError::from)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Some(SensingScenario {
                    events,
                    duration_s: s.duration_s,
                    sample_rate_hz: s.sample_rate_hz,
                    noise_sigma_rad: s.noise_sigma_rad,
                    seed: s.seed,
                    lambda: Wavelength::new(s.lambda_nm)?,
                })
            }
            None => None,
        };

        Ok(Self {
            plan,
            link,
            detector,
            environment,
            signal_rate_per_s: doc.signal_rate_per_s,
            raman_profile,
            attenuation,
            timesync,
            sensing,
        })
    }

    /// Echo the resolved scenario as a fully explicit document: every
    /// default filled in, every frequency rounded to the canonical six
    /// decimals. Serializing this is how reports describe the run.
    pub fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            plan: PlanDoc {
                guard_band_ghz: self.plan.guard_band_ghz(),
                channels: self
                    .plan
                    .channels()
                    .iter()
                    .map(|c| ChannelDoc {
                        center_thz: round6(c.center().thz()),
                        width_ghz: c.width_ghz(),
                        role: c.role(),
                        launch_power_dbm: c.launch_power_dbm(),
                        amplified: c.amplified(),
                    })
                    .collect(),
            },
            link: LinkDoc {
                elements: self
                    .link
                    .elements()
                    .iter()
                    .map(|el| match el {
                        LinkElement::Span(s) => ElementDoc::Span {
                            length_km: s.length_km(),
                            attenuation: Some(attenuation_to_doc(s.attenuation())),
                        },
                        LinkElement::Amplifier(a) => ElementDoc::Amplifier {
                            gain_db: a.gain_db(),
                            noise_factor: a.noise_factor(),
                            band: BandDoc {
                                name: a.band().name().to_string(),
                                lambda_min_nm: a.band().lambda_min().nm(),
                                lambda_max_nm: a.band().lambda_max().nm(),
                            },
                        },
                        LinkElement::Filter(f) => ElementDoc::Filter {
                            center_thz: round6(f.center().thz()),
                            passband_width_ghz: f.passband_width_ghz(),
                            insertion_loss_db: f.insertion_loss_db(),
                            out_of_band_isolation_db: f.out_of_band_isolation_db(),
                            return_loss_db: f.return_loss_db(),
                        },
                    })
                    .collect(),
            },
            detector: DetectorDoc {
                gate_rate_hz: self.detector.gate_rate_hz(),
                gate_width_s: self.detector.gate_width_s(),
                efficiency: self.detector.efficiency(),
                dark_rate_cps: self.detector.dark_rate_cps(),
            },
            environment: EnvironmentDoc {
                temperature_k: self.environment.temperature_k(),
            },
            signal_rate_per_s: self.signal_rate_per_s,
            profiles: Some(ProfilesDoc {
                raman_gain: Some(RamanProfileDoc {
                    reference_pump_nm: self.raman_profile.reference_pump().nm(),
                    scale_with_pump: self.raman_profile.scale_with_pump(),
                    points: self.raman_profile.points().to_vec(),
                }),
                attenuation: Some(attenuation_to_doc(&self.attenuation)),
            }),
            timesync: self.timesync.as_ref().map(|t| TimesyncDoc {
                offset_ps: t.clock.offset_ps,
                drift_ppb: t.clock.drift_ppb,
                granularity_ps: t.clock.timestamp_granularity_ps,
                forward_ps: t.delays.forward_ps,
                backward_ps: t.delays.backward_ps,
                jitter_sigma_ps: t.delays.jitter_sigma_ps,
                rounds: t.rounds,
                seed: t.seed,
            }),
            sensing: self.sensing.as_ref().map(|s| SensingDoc {
                events: s
                    .events
                    .iter()
                    .map(|e| EventDoc {
                        position_km: e.position_km,
                        start_s: e.start_s,
                        duration_s: e.duration_s,
                        amplitude_um: e.amplitude_um,
                        shape: match e.shape {
                            EventShape::GaussianPulse => ShapeDoc::GaussianPulse,
                            EventShape::Sinusoid { frequency_hz } => {
                                ShapeDoc::Sinusoid { frequency_hz }
                            }
                        },
                    })
                    .collect(),
                duration_s: s.duration_s,
                sample_rate_hz: s.sample_rate_hz,
                noise_sigma_rad: s.noise_sigma_rad,
                seed: s.seed,
                lambda_nm: s.lambda.nm(),
            }),
        }
    }

    /// The quantum channel a noise budget is computed for. Exactly one is
    /// expected; with several, the lowest-frequency one is used.
    pub fn quantum_channel(&self) -> Option<&Channel> {
        self.plan
            .quantum_channels()
            .min_by(|a, b| a.center().thz().total_cmp(&b.center().thz()))
    }
}

fn attenuation_from_doc(doc: &AttenuationProfileDoc) -> Result<AttenuationProfile, ScenarioError> {
    let points = doc
        .points
        .iter()
        .map(|&(nm, loss)| Ok((Wavelength::new(nm)?, loss)))
        .collect::<Result<Vec<_>, SpectralError>>()?;
    Ok(AttenuationProfile::new(points)?)
}

fn attenuation_to_doc(profile: &AttenuationProfile) -> AttenuationProfileDoc {
    AttenuationProfileDoc {
        points: profile
            .points()
            .iter()
            .map(|&(wl, loss)| (wl.nm(), loss))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "plan": {
            "guard_band_ghz": 0.0,
            "channels": [
                {"center_thz": 193.414489, "width_ghz": 100.0, "role": "classical", "launch_power_dbm": 0.0},
                {"center_thz": 228.849205, "width_ghz": 100.0, "role": "quantum"}
            ]
        },
        "link": {
            "elements": [
                {"kind": "span", "length_km": 50.0},
                {"kind": "filter", "center_thz": 228.849205, "passband_width_ghz": 100.0,
                 "insertion_loss_db": 1.0, "out_of_band_isolation_db": 80.0, "return_loss_db": 45.0}
            ]
        },
        "detector": {"gate_rate_hz": 1e6, "gate_width_s": 1e-9, "efficiency": 0.2, "dark_rate_cps": 100.0},
        "environment": {"temperature_k": 293.0},
        "signal_rate_per_s": 1e6
    }"#;

    #[test]
    fn minimal_scenario_resolves() {
        let s = Scenario::from_json_str(MINIMAL, &ProfileDefaults::default()).unwrap();
        assert_eq!(s.plan.channels().len(), 2);
        assert!(s.quantum_channel().is_some());
        assert_eq!(s.link.total_length_km(), 50.0);
        assert!(s.timesync.is_none());
        assert!(s.sensing.is_none());
        // Spans without overrides picked up the default table.
        let span = s.link.spans().next().unwrap();
        assert_eq!(span.attenuation(), &AttenuationProfile::default_g652());
    }

    #[test]
    fn parse_error_carries_position() {
        let err = Scenario::from_json_str("", &ProfileDefaults::default()).unwrap_err();
        match err {
            ScenarioError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other}"),
        }
        let err = Scenario::from_json_str("{\n  \"plan\": [,\n}", &ProfileDefaults::default())
            .unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MINIMAL.replacen("\"plan\"", "\"extra\": 1, \"plan\"", 1);
        assert!(matches!(
            Scenario::from_json_str(&text, &ProfileDefaults::default()),
            Err(ScenarioError::Parse { .. })
        ));
    }

    #[test]
    fn plan_violations_fail_the_load() {
        // Amplified classical + quantum at 1310 nm (228.849 THz ≈ 1310 nm).
        let text = MINIMAL.replace(
            "\"role\": \"classical\", \"launch_power_dbm\": 0.0",
            "\"role\": \"classical\", \"launch_power_dbm\": 0.0, \"amplified\": true",
        );
        let err = Scenario::from_json_str(&text, &ProfileDefaults::default()).unwrap_err();
        match err {
            ScenarioError::PlanViolations(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(
                    v[0].rule.name(),
                    "quantum-above-1290-with-amplified-classical"
                );
            }
            other => panic!("expected plan violations, got {other}"),
        }
    }

    #[test]
    fn echo_round_trips_byte_identically() {
        let s = Scenario::from_json_str(MINIMAL, &ProfileDefaults::default()).unwrap();
        let doc = s.to_doc();
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let s2 = Scenario::from_json_str(&json, &ProfileDefaults::default()).unwrap();
        let json2 = serde_json::to_string_pretty(&s2.to_doc()).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn profile_overrides_take_precedence() {
        let text = MINIMAL.replacen(
            "\"signal_rate_per_s\": 1e6",
            r#""signal_rate_per_s": 1e6,
            "profiles": {
                "raman_gain": {"reference_pump_nm": 1540.0,
                               "points": [[0.0, 0.0], [5.0, 0.2], [13.2, 0.5], [30.0, 0.0]]},
                "attenuation": {"points": [[1260.0, 0.6], [1400.0, 0.4], [1620.0, 0.3]]}
            }"#,
            1,
        );
        let s = Scenario::from_json_str(&text, &ProfileDefaults::default()).unwrap();
        assert_eq!(s.raman_profile.reference_pump().nm(), 1540.0);
        assert_eq!(s.raman_profile.points().len(), 4);
        assert_eq!(s.attenuation.points().len(), 3);
        // Spans inherit the scenario-wide override.
        let span = s.link.spans().next().unwrap();
        assert_eq!(span.attenuation(), &s.attenuation);
    }

    #[test]
    fn timesync_and_sensing_sections_resolve() {
        let text = MINIMAL.replacen(
            "\"signal_rate_per_s\": 1e6",
            r#""signal_rate_per_s": 1e6,
            "timesync": {"offset_ps": 5000, "forward_ps": 250000000, "backward_ps": 250000000,
                         "jitter_sigma_ps": 100.0, "rounds": 100, "seed": 7},
            "sensing": {"events": [{"position_km": 25.0, "start_s": 4.5, "duration_s": 1.0,
                                     "amplitude_um": 1.0, "shape": {"kind": "gaussian_pulse"}}],
                        "duration_s": 10.0, "sample_rate_hz": 200.0,
                        "noise_sigma_rad": 0.02, "seed": 3}"#,
            1,
        );
        let s = Scenario::from_json_str(&text, &ProfileDefaults::default()).unwrap();
        let t = s.timesync.unwrap();
        assert_eq!(t.clock.offset_ps, 5000);
        assert_eq!(t.clock.timestamp_granularity_ps, 1);
        let sens = s.sensing.unwrap();
        assert_eq!(sens.events.len(), 1);
        assert_eq!(sens.lambda.nm(), 1550.0);
    }

    #[test]
    fn schema_violations_are_reported() {
        // Quantum channel with a launch power.
        let text = MINIMAL.replacen(
            "{\"center_thz\": 228.849205, \"width_ghz\": 100.0, \"role\": \"quantum\"}",
            "{\"center_thz\": 228.849205, \"width_ghz\": 100.0, \"role\": \"quantum\", \"launch_power_dbm\": 0.0}",
            1,
        );
        assert!(matches!(
            Scenario::from_json_str(&text, &ProfileDefaults::default()),
            Err(ScenarioError::Schema(_))
        ));
    }
}
