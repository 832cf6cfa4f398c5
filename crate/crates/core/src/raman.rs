//! Spontaneous Raman scattering from classical channels into a quantum
//! detection window.
//!
//! Photons scattered off thermally excited molecular vibrations appear red-
//! shifted (Stokes, weight n̄+1) or blue-shifted (anti-Stokes, weight n̄),
//! where n̄ is the Bose–Einstein phonon occupation at the pump/probe
//! frequency shift. The anti-Stokes branch is always the weaker one because
//! higher-energy vibrational states are less populated; at large shifts and
//! room temperature it is suppressed by orders of magnitude.
//!
//! The magnitude of the scattered flux is set by the fiber's Raman gain
//! profile g_R(Δν) — tabulated here, peaked near 13.2 THz for fused silica
//! — together with a calibration constant [`DEFAULT_K_SPONT`]. Attenuation
//! enters through the pump effective length and the probe path loss.

use thiserror::Error;

use crate::constants::{BOLTZMANN_J_PER_K, PLANCK_J_S};
use crate::spectral::{shift_between, wl_to_freq, Channel, ChannelRole, Wavelength};

/// Converts g_R · launch power · effective length · filter width products
/// into a scattered power fraction. Calibration knob: the default places
/// the reference desk scenario (0 dBm pump at 1550 nm, quantum window at
/// 1310 nm, 100 GHz filter, 50 km of G.652 fiber, 293 K) near 1e5
/// photons/s, the observed magnitude on deployed links.
pub const DEFAULT_K_SPONT: f64 = 8.0e-8;

/// ln(10)/10: dB/km to 1/km.
const DB_TO_NEPER_PER_KM: f64 = core::f64::consts::LN_10 / 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RamanError {
    #[error("gain profile invalid: {0}")]
    InvalidProfile(String),
    #[error("temperature {0} K outside supported range [4, 400] K")]
    TemperatureOutOfRange(f64),
    #[error("scatter geometry invalid: {0}")]
    InvalidGeometry(String),
    #[error("thermal occupation undefined for non-positive shift {0} THz")]
    NonPositiveShift(f64),
    #[error("a quantum channel cannot act as Raman pump")]
    QuantumPump,
    #[error("filter width must be positive, got {0} GHz")]
    NonPositiveFilterWidth(f64),
    #[error("profile CSV line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

/// Tabulated Raman gain coefficient versus pump–probe frequency shift.
///
/// Linear interpolation between points, zero beyond the last tabulated
/// shift. Stokes and anti-Stokes share the shape; their asymmetry enters
/// only through the thermal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanGainProfile {
    reference_pump: Wavelength,
    scale_with_pump: bool,
    points: Vec<(f64, f64)>,
}

impl RamanGainProfile {
    /// `points` are (shift in THz, gain in 1/(W·km)) pairs: strictly
    /// increasing shifts starting at (0, 0), at least 4 points, all finite
    /// and non-negative.
    pub fn new(reference_pump: Wavelength, points: Vec<(f64, f64)>) -> Result<Self, RamanError> {
        if points.len() < 4 {
            return Err(RamanError::InvalidProfile(format!(
                "need at least 4 points, got {}",
                points.len()
            )));
        }
        if points[0] != (0.0, 0.0) {
            return Err(RamanError::InvalidProfile(
                "profile must start at shift 0 with gain 0".into(),
            ));
        }
        if points
            .iter()
            .any(|&(s, g)| !s.is_finite() || !g.is_finite() || g < 0.0)
        {
            return Err(RamanError::InvalidProfile(
                "shifts and gains must be finite, gains non-negative".into(),
            ));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(RamanError::InvalidProfile(format!(
                    "shifts must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self {
            reference_pump,
            scale_with_pump: false,
            points,
        })
    }

    /// Generic fused-silica shape: broad peak of 0.42 1/(W·km) at 13.2 THz,
    /// support ending at 36 THz. Referenced to a 1550 nm pump. Ships as
    /// data so deployments can recalibrate without a code change.
    pub fn default_silica() -> Self {
        Self::new(
            Wavelength::new(1550.0).expect("1550 nm is in range"),
            vec![
                (0.0, 0.0),
                (3.0, 0.10),
                (8.0, 0.22),
                (13.2, 0.42),
                (15.0, 0.30),
                (20.0, 0.08),
                (27.0, 0.03),
                (36.0, 0.0),
            ],
        )
        .expect("default table is valid")
    }

    /// Enable rescaling of the gain with actual pump frequency relative to
    /// the reference pump (g ∝ ν_pump). Off by default.
    pub fn with_pump_scaling(mut self, enabled: bool) -> Self {
        self.scale_with_pump = enabled;
        self
    }

    pub fn reference_pump(&self) -> Wavelength {
        self.reference_pump
    }

    pub fn scale_with_pump(&self) -> bool {
        self.scale_with_pump
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn max_shift_thz(&self) -> f64 {
        self.points.last().map(|&(s, _)| s).unwrap_or(0.0)
    }

    /// Gain at |shift| by linear interpolation; zero beyond the table end.
    pub fn gain_at_shift(&self, shift_thz: f64) -> f64 {
        let s = shift_thz.abs();
        if s > self.max_shift_thz() {
            return 0.0;
        }
        for w in self.points.windows(2) {
            let (s0, g0) = w[0];
            let (s1, g1) = w[1];
            if s <= s1 {
                return g0 + (g1 - g0) * (s - s0) / (s1 - s0);
            }
        }
        self.points.last().map(|&(_, g)| g).unwrap_or(0.0)
    }

    /// Parse a profile from CSV with header `shift_thz,gain_per_w_km`.
    /// The reference pump defaults to 1550 nm.
    pub fn from_csv_str(text: &str) -> Result<Self, RamanError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(RamanError::Csv {
            line: 1,
            msg: "empty file".into(),
        })?;
        if header.trim() != "shift_thz,gain_per_w_km" {
            return Err(RamanError::Csv {
                line: 1,
                msg: format!("expected header 'shift_thz,gain_per_w_km', got '{header}'"),
            });
        }
        let mut points = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |field: Option<&str>, name: &str| -> Result<f64, RamanError> {
                field
                    .ok_or_else(|| RamanError::Csv {
                        line: idx + 1,
                        msg: format!("missing column {name}"),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| RamanError::Csv {
                        line: idx + 1,
                        msg: format!("bad {name}: {e}"),
                    })
            };
            let shift = parse(cols.next(), "shift_thz")?;
            let gain = parse(cols.next(), "gain_per_w_km")?;
            points.push((shift, gain));
        }
        Self::new(Wavelength::new(1550.0).expect("in range"), points)
    }

    /// Emit the table as CSV with header `shift_thz,gain_per_w_km`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("shift_thz,gain_per_w_km\n");
        for &(s, g) in &self.points {
            out.push_str(&format!("{s:.4},{g:.6}\n"));
        }
        out
    }
}

/// Fiber temperature, bounded to [4, 400] K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEnvironment {
    temperature_k: f64,
}

impl ThermalEnvironment {
    pub fn new(temperature_k: f64) -> Result<Self, RamanError> {
        if !(temperature_k.is_finite() && (4.0..=400.0).contains(&temperature_k)) {
            return Err(RamanError::TemperatureOutOfRange(temperature_k));
        }
        Ok(Self { temperature_k })
    }

    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }
}

/// Relative propagation direction of pump and scattered probe light.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScatterDirection {
    CoPropagating,
    CounterPropagating,
}

/// One fiber section as seen by the scattering integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterGeometry {
    pub direction: ScatterDirection,
    pub fiber_length_km: f64,
    pub pump_attenuation_db_per_km: f64,
    pub probe_attenuation_db_per_km: f64,
}

impl ScatterGeometry {
    pub fn new(
        direction: ScatterDirection,
        fiber_length_km: f64,
        pump_attenuation_db_per_km: f64,
        probe_attenuation_db_per_km: f64,
    ) -> Result<Self, RamanError> {
        if !(fiber_length_km.is_finite() && fiber_length_km > 0.0) {
            return Err(RamanError::InvalidGeometry(format!(
                "length must be positive, got {fiber_length_km} km"
            )));
        }
        if !(pump_attenuation_db_per_km.is_finite() && pump_attenuation_db_per_km >= 0.0)
            || !(probe_attenuation_db_per_km.is_finite() && probe_attenuation_db_per_km >= 0.0)
        {
            return Err(RamanError::InvalidGeometry(
                "attenuations must be non-negative".into(),
            ));
        }
        Ok(Self {
            direction,
            fiber_length_km,
            pump_attenuation_db_per_km,
            probe_attenuation_db_per_km,
        })
    }
}

/// Bose–Einstein phonon occupation n̄ = 1/(exp(hΔν/kT) − 1).
pub fn thermal_occupation(shift_thz: f64, env: &ThermalEnvironment) -> Result<f64, RamanError> {
    if shift_thz.is_nan() || shift_thz <= 0.0 {
        return Err(RamanError::NonPositiveShift(shift_thz));
    }
    let x = PLANCK_J_S * shift_thz * 1e12 / (BOLTZMANN_J_PER_K * env.temperature_k());
    Ok(1.0 / (x.exp() - 1.0))
}

/// Stokes branch weight n̄ + 1 (phonon emission).
pub fn stokes_weight(n_bar: f64) -> f64 {
    n_bar + 1.0
}

/// Anti-Stokes branch weight n̄ (phonon absorption); always below the
/// Stokes weight.
pub fn antistokes_weight(n_bar: f64) -> f64 {
    n_bar
}

/// Effective interaction length (1 − e^{−αL})/α under attenuation, exactly
/// L when the fiber is lossless.
pub fn effective_length_km(attenuation_db_per_km: f64, length_km: f64) -> f64 {
    let alpha = attenuation_db_per_km * DB_TO_NEPER_PER_KM;
    if alpha == 0.0 {
        length_km
    } else {
        (1.0 - (-alpha * length_km).exp()) / alpha
    }
}

/// Spontaneously scattered photon rate from `pump` into a rectangular
/// detection window of `filter_width_ghz` centered at `quantum_center`,
/// using [`DEFAULT_K_SPONT`].
pub fn spontaneous_rate(
    pump: &Channel,
    quantum_center: Wavelength,
    filter_width_ghz: f64,
    profile: &RamanGainProfile,
    geometry: &ScatterGeometry,
    env: &ThermalEnvironment,
) -> Result<f64, RamanError> {
    spontaneous_rate_with(
        DEFAULT_K_SPONT,
        pump,
        quantum_center,
        filter_width_ghz,
        profile,
        geometry,
        env,
    )
}

/// [`spontaneous_rate`] with an explicit calibration constant.
///
/// Scattered power at the fiber output:
///
/// - co-propagating: `P_pump · ρ · B · L_eff(α_pump, L) · e^{−α_probe·L}`
///   — probe attenuation is applied over the full length;
/// - counter-propagating: `P_pump · ρ · B · (1 − e^{−(α_p+α_q)L})/(α_p+α_q)`;
///
/// with `ρ = k_spont · g_R(|Δν|) · w` and `w` the anti-Stokes weight for a
/// blue-shifted probe, the Stokes weight otherwise. The returned value is
/// power over photon energy at the quantum-channel frequency, in photons/s.
/// Pump depletion is ignored: spontaneous scattering removes a negligible
/// fraction of the pump.
pub fn spontaneous_rate_with(
    k_spont: f64,
    pump: &Channel,
    quantum_center: Wavelength,
    filter_width_ghz: f64,
    profile: &RamanGainProfile,
    geometry: &ScatterGeometry,
    env: &ThermalEnvironment,
) -> Result<f64, RamanError> {
    if pump.role() == ChannelRole::Quantum {
        return Err(RamanError::QuantumPump);
    }
    if !(filter_width_ghz.is_finite() && filter_width_ghz > 0.0) {
        return Err(RamanError::NonPositiveFilterWidth(filter_width_ghz));
    }
    let pump_wl = pump.center_wavelength();
    let shift = shift_between(pump_wl, quantum_center);
    let mut gain = profile.gain_at_shift(shift);
    if profile.scale_with_pump() {
        gain *= wl_to_freq(pump_wl).thz() / wl_to_freq(profile.reference_pump()).thz();
    }
    if gain == 0.0 {
        // Covers zero shift (profile starts at gain 0) and shifts beyond
        // the table support.
        return Ok(0.0);
    }
    let n_bar = thermal_occupation(shift.abs(), env)?;
    let weight = if shift > 0.0 {
        antistokes_weight(n_bar)
    } else {
        stokes_weight(n_bar)
    };
    let rho = k_spont * gain * weight;
    let pump_w = pump.launch_power_mw() * 1e-3;
    let alpha_p = geometry.pump_attenuation_db_per_km * DB_TO_NEPER_PER_KM;
    let alpha_q = geometry.probe_attenuation_db_per_km * DB_TO_NEPER_PER_KM;
    let length = geometry.fiber_length_km;
    let path_factor = match geometry.direction {
        ScatterDirection::CoPropagating => {
            effective_length_km(geometry.pump_attenuation_db_per_km, length)
                * (-alpha_q * length).exp()
        }
        ScatterDirection::CounterPropagating => {
            let a = alpha_p + alpha_q;
            if a == 0.0 {
                length
            } else {
                (1.0 - (-a * length).exp()) / a
            }
        }
    };
    let scattered_w = pump_w * rho * filter_width_ghz * path_factor;
    Ok(scattered_w / wl_to_freq(quantum_center).photon_energy_j())
}
