//! Spectral units, bands, channel grids, and channel-plan validation.
//!
//! Wavelengths live in [1000, 2000] nm and frequencies in the image of that
//! range under ν = c/λ. Conversions use c = 299 792 458 m/s exactly so that
//! reports are bit-reproducible.
//!
//! A [`ChannelPlan`] is the central planning object: an ordered set of
//! [`Channel`]s with roles (classical / time-frequency / quantum) and launch
//! powers. [`validate_plan`] checks the allocation rules — passband overlap,
//! guard-band separation, and the requirement that quantum channels sit
//! below 1290 nm whenever amplified classical traffic shares the fiber.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::C_NM_THZ;

/// Lowest wavelength handled by this tool (nm).
pub const MIN_WAVELENGTH_NM: f64 = 1000.0;
/// Highest wavelength handled by this tool (nm).
pub const MAX_WAVELENGTH_NM: f64 = 2000.0;
/// Lowest valid frequency (THz): the image of 2000 nm.
pub const MIN_FREQUENCY_THZ: f64 = C_NM_THZ / MAX_WAVELENGTH_NM;
/// Highest valid frequency (THz): the image of 1000 nm.
pub const MAX_FREQUENCY_THZ: f64 = C_NM_THZ / MIN_WAVELENGTH_NM;

/// Quantum channels must sit below this wavelength when any amplified
/// channel shares the plan.
pub const QUANTUM_WAVELENGTH_LIMIT_NM: f64 = 1290.0;

/// Tolerance for passband comparisons, in THz (1 kHz). Absorbs float
/// rounding when adjacent passbands touch exactly.
const FREQ_TOL_THZ: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(
        "wavelength {0} nm outside supported range [{MIN_WAVELENGTH_NM}, {MAX_WAVELENGTH_NM}] nm"
    )]
    WavelengthOutOfRange(f64),
    #[error("frequency {0} THz outside supported range [{MIN_FREQUENCY_THZ:.6}, {MAX_FREQUENCY_THZ:.6}] THz")]
    FrequencyOutOfRange(f64),
    #[error("band '{name}': lambda_min {min_nm} nm must be below lambda_max {max_nm} nm")]
    InvalidBand {
        name: String,
        min_nm: f64,
        max_nm: f64,
    },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("grid spacing must be positive, got {0} GHz")]
    NonPositiveSpacing(f64),
    #[error("channel width must be non-negative and finite, got {0} GHz")]
    InvalidChannelWidth(f64),
    #[error("channel width {width_ghz} GHz exceeds band span {span_ghz:.3} GHz")]
    WidthExceedsSpan { width_ghz: f64, span_ghz: f64 },
    #[error("guard band must be non-negative and finite, got {0} GHz")]
    InvalidGuardBand(f64),
}

/// Wavelength in nanometres, restricted to [1000, 2000] nm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn new(nm: f64) -> Result<Self, SpectralError> {
        if !nm.is_finite() || !(MIN_WAVELENGTH_NM..=MAX_WAVELENGTH_NM).contains(&nm) {
            return Err(SpectralError::WavelengthOutOfRange(nm));
        }
        Ok(Self(nm))
    }

    pub fn nm(&self) -> f64 {
        self.0
    }
}

/// Optical frequency in terahertz, restricted to the image of the
/// wavelength range under ν = c/λ.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub fn new(thz: f64) -> Result<Self, SpectralError> {
        if !thz.is_finite() || !(MIN_FREQUENCY_THZ..=MAX_FREQUENCY_THZ).contains(&thz) {
            return Err(SpectralError::FrequencyOutOfRange(thz));
        }
        Ok(Self(thz))
    }

    pub fn thz(&self) -> f64 {
        self.0
    }

    /// Energy of one photon at this frequency, in joules.
    pub fn photon_energy_j(&self) -> f64 {
        crate::constants::PLANCK_J_S * self.0 * 1e12
    }
}

/// ν = c/λ. Infallible: every valid wavelength maps into the valid
/// frequency range (the result is clamped by at most one float ulp at the
/// range edges).
pub fn wl_to_freq(lambda: Wavelength) -> Frequency {
    Frequency((C_NM_THZ / lambda.nm()).clamp(MIN_FREQUENCY_THZ, MAX_FREQUENCY_THZ))
}

/// λ = c/ν. Infallible for the same reason as [`wl_to_freq`].
pub fn freq_to_wl(nu: Frequency) -> Wavelength {
    Wavelength((C_NM_THZ / nu.thz()).clamp(MIN_WAVELENGTH_NM, MAX_WAVELENGTH_NM))
}

/// Signed frequency shift ν(target) − ν(pump) in THz. Positive means the
/// target is anti-Stokes (blue-shifted) relative to the pump.
pub fn shift_between(pump: Wavelength, target: Wavelength) -> f64 {
    wl_to_freq(target).thz() - wl_to_freq(pump).thz()
}

/// A named wavelength band, e.g. the 1540–1546 nm time/frequency window.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    name: String,
    lambda_min: Wavelength,
    lambda_max: Wavelength,
}

impl Band {
    pub fn new(
        name: impl Into<String>,
        lambda_min: Wavelength,
        lambda_max: Wavelength,
    ) -> Result<Self, SpectralError> {
        let name = name.into();
        if lambda_min.nm() >= lambda_max.nm() {
            return Err(SpectralError::InvalidBand {
                name,
                min_nm: lambda_min.nm(),
                max_nm: lambda_max.nm(),
            });
        }
        Ok(Self {
            name,
            lambda_min,
            lambda_max,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lambda_min(&self) -> Wavelength {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> Wavelength {
        self.lambda_max
    }

    /// Frequency span of the band in GHz (ν at the short-wavelength edge
    /// minus ν at the long-wavelength edge).
    pub fn freq_span_ghz(&self) -> f64 {
        (wl_to_freq(self.lambda_min).thz() - wl_to_freq(self.lambda_max).thz()) * 1e3
    }

    /// Low-frequency edge of the band (at lambda_max), in THz.
    pub fn low_edge_thz(&self) -> f64 {
        wl_to_freq(self.lambda_max).thz()
    }

    pub fn contains_wavelength(&self, lambda: Wavelength) -> bool {
        (self.lambda_min.nm()..=self.lambda_max.nm()).contains(&lambda.nm())
    }

    /// Midpoint of the band's frequency extent.
    pub fn center_frequency(&self) -> Frequency {
        Frequency((wl_to_freq(self.lambda_min).thz() + wl_to_freq(self.lambda_max).thz()) / 2.0)
    }
}

/// What a channel carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelRole {
    Classical,
    TimeFrequency,
    Quantum,
}

impl ChannelRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelRole::Classical => "classical",
            ChannelRole::TimeFrequency => "time_frequency",
            ChannelRole::Quantum => "quantum",
        }
    }
}

/// One occupied spectral channel.
///
/// Quantum channels carry no dBm launch power — their signal level is a
/// photon flux that enters only through the detector model — so
/// `launch_power_dbm` is `None` exactly when the role is `Quantum`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    center: Frequency,
    width_ghz: f64,
    role: ChannelRole,
    launch_power_dbm: Option<f64>,
    amplified: bool,
}

impl Channel {
    pub fn new(
        center: Frequency,
        width_ghz: f64,
        role: ChannelRole,
        launch_power_dbm: Option<f64>,
        amplified: bool,
    ) -> Result<Self, SpectralError> {
        if !(width_ghz.is_finite() && width_ghz > 0.0) {
            return Err(SpectralError::InvalidChannel(format!(
                "width must be positive, got {width_ghz} GHz"
            )));
        }
        let half = width_ghz / 2.0 * 1e-3;
        if center.thz() - half < MIN_FREQUENCY_THZ - FREQ_TOL_THZ
            || center.thz() + half > MAX_FREQUENCY_THZ + FREQ_TOL_THZ
        {
            return Err(SpectralError::InvalidChannel(format!(
                "passband of channel at {:.6} THz (width {width_ghz} GHz) leaves the valid range",
                center.thz()
            )));
        }
        match role {
            ChannelRole::Quantum => {
                if amplified {
                    return Err(SpectralError::InvalidChannel(
                        "quantum channels cannot be amplified".into(),
                    ));
                }
                if launch_power_dbm.is_some() {
                    return Err(SpectralError::InvalidChannel(
                        "quantum channels carry no dBm launch power".into(),
                    ));
                }
            }
            _ => {
                let Some(p) = launch_power_dbm else {
                    return Err(SpectralError::InvalidChannel(format!(
                        "{} channel requires a launch power in dBm",
                        role.as_str()
                    )));
                };
                if p.is_nan() {
                    return Err(SpectralError::InvalidChannel(
                        "launch power must not be NaN".into(),
                    ));
                }
            }
        }
        Ok(Self {
            center,
            width_ghz,
            role,
            launch_power_dbm,
            amplified,
        })
    }

    pub fn center(&self) -> Frequency {
        self.center
    }

    pub fn center_wavelength(&self) -> Wavelength {
        freq_to_wl(self.center)
    }

    pub fn width_ghz(&self) -> f64 {
        self.width_ghz
    }

    pub fn role(&self) -> ChannelRole {
        self.role
    }

    pub fn launch_power_dbm(&self) -> Option<f64> {
        self.launch_power_dbm
    }

    /// Launch power in milliwatts; 0 for quantum channels (and for a
    /// launch power of −∞ dBm, which models a switched-off transmitter).
    pub fn launch_power_mw(&self) -> f64 {
        self.launch_power_dbm
            .map(|dbm| 10f64.powf(dbm / 10.0))
            .unwrap_or(0.0)
    }

    pub fn amplified(&self) -> bool {
        self.amplified
    }

    /// Passband as (low, high) in THz.
    pub fn passband_thz(&self) -> (f64, f64) {
        let half = self.width_ghz / 2.0 * 1e-3;
        (self.center.thz() - half, self.center.thz() + half)
    }
}

/// The set of occupied channels plus the minimum separation required
/// between adjacent passbands.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlan {
    channels: Vec<Channel>,
    guard_band_ghz: f64,
}

impl ChannelPlan {
    /// Plan-level rule violations are data, not construction failures;
    /// only the guard band itself is validated here. See [`validate_plan`].
    pub fn new(channels: Vec<Channel>, guard_band_ghz: f64) -> Result<Self, SpectralError> {
        if !(guard_band_ghz.is_finite() && guard_band_ghz >= 0.0) {
            return Err(SpectralError::InvalidGuardBand(guard_band_ghz));
        }
        Ok(Self {
            channels,
            guard_band_ghz,
        })
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn guard_band_ghz(&self) -> f64 {
        self.guard_band_ghz
    }

    pub fn quantum_channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels
            .iter()
            .filter(|c| c.role() == ChannelRole::Quantum)
    }

    pub fn non_quantum_channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels
            .iter()
            .filter(|c| c.role() != ChannelRole::Quantum)
    }
}

/// Plan rules that [`validate_plan`] can flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PlanRule {
    GuardBand,
    Overlap,
    QuantumAbove1290WithAmplifiedClassical,
}

impl PlanRule {
    pub fn name(&self) -> &'static str {
        match self {
            PlanRule::GuardBand => "guard-band",
            PlanRule::Overlap => "overlap",
            PlanRule::QuantumAbove1290WithAmplifiedClassical => {
                "quantum-above-1290-with-amplified-classical"
            }
        }
    }
}

/// One violated plan rule, naming the offending channel indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub rule: PlanRule,
    /// Indices into the plan's channel list, ascending.
    pub channels: Vec<usize>,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} (channels {:?})",
            self.rule.name(),
            self.detail,
            self.channels
        )
    }
}

/// Check every plan invariant and return all violations, sorted by the
/// lowest involved channel center frequency and then by rule name.
///
/// Passband comparisons use a 1 kHz tolerance so that plans whose adjacent
/// passbands touch exactly (width == spacing grids) validate clean.
pub fn validate_plan(plan: &ChannelPlan) -> Vec<Violation> {
    let chans = plan.channels();
    let mut violations = Vec::new();

    // Pairwise overlap.
    for i in 0..chans.len() {
        for j in (i + 1)..chans.len() {
            let (lo_i, hi_i) = chans[i].passband_thz();
            let (lo_j, hi_j) = chans[j].passband_thz();
            let overlap = hi_i.min(hi_j) - lo_i.max(lo_j);
            if overlap > FREQ_TOL_THZ {
                violations.push(Violation {
                    rule: PlanRule::Overlap,
                    channels: vec![i, j],
                    detail: format!(
                        "passbands of channels at {:.6} and {:.6} THz overlap by {:.3} GHz",
                        chans[i].center().thz(),
                        chans[j].center().thz(),
                        overlap * 1e3
                    ),
                });
            }
        }
    }

    // Guard band between adjacent (non-overlapping) passbands.
    let mut order: Vec<usize> = (0..chans.len()).collect();
    order.sort_by(|&a, &b| {
        chans[a]
            .passband_thz()
            .0
            .total_cmp(&chans[b].passband_thz().0)
    });
    for pair in order.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let gap = chans[b].passband_thz().0 - chans[a].passband_thz().1;
        // Overlapping pairs are already reported above.
        if gap >= -FREQ_TOL_THZ && gap + FREQ_TOL_THZ < plan.guard_band_ghz() * 1e-3 {
            violations.push(Violation {
                rule: PlanRule::GuardBand,
                channels: vec![a.min(b), a.max(b)],
                detail: format!(
                    "adjacent passbands separated by {:.3} GHz, guard band is {:.3} GHz",
                    gap.max(0.0) * 1e3,
                    plan.guard_band_ghz()
                ),
            });
        }
    }

    // Quantum channels must be below 1290 nm when anything is amplified.
    if chans.iter().any(|c| c.amplified()) {
        for (i, c) in chans.iter().enumerate() {
            if c.role() == ChannelRole::Quantum
                && c.center_wavelength().nm() >= QUANTUM_WAVELENGTH_LIMIT_NM
            {
                violations.push(Violation {
                    rule: PlanRule::QuantumAbove1290WithAmplifiedClassical,
                    channels: vec![i],
                    detail: format!(
                        "quantum channel at {:.1} nm; amplified classical traffic requires quantum channels below {QUANTUM_WAVELENGTH_LIMIT_NM} nm",
                        c.center_wavelength().nm()
                    ),
                });
            }
        }
    }

    violations.sort_by(|a, b| {
        let key = |v: &Violation| {
            v.channels
                .iter()
                .map(|&i| chans[i].center().thz())
                .fold(f64::INFINITY, f64::min)
        };
        key(a)
            .total_cmp(&key(b))
            .then_with(|| a.rule.name().cmp(b.rule.name()))
    });
    violations
}

/// How channel centers are anchored when counting grid capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridAnchor {
    /// Centers start at the band's low-frequency edge plus half the channel
    /// width. This anchoring reproduces the deployed channel counts.
    BandEdge,
    /// Centers lie on an absolute grid `reference_thz + k·spacing`.
    Itu { reference_thz: f64 },
}

/// Standard ITU grid reference frequency (THz).
pub const ITU_REFERENCE_THZ: f64 = 193.1;

/// Number of channels of the given width placeable in `band` at `spacing`,
/// anchored at the band's low-frequency edge.
pub fn grid_capacity(
    band: &Band,
    spacing_ghz: f64,
    channel_width_ghz: f64,
) -> Result<u32, SpectralError> {
    grid_capacity_anchored(band, spacing_ghz, channel_width_ghz, GridAnchor::BandEdge)
}

/// [`grid_capacity`] with an explicit anchoring mode.
pub fn grid_capacity_anchored(
    band: &Band,
    spacing_ghz: f64,
    channel_width_ghz: f64,
    anchor: GridAnchor,
) -> Result<u32, SpectralError> {
    if !(spacing_ghz.is_finite() && spacing_ghz > 0.0) {
        return Err(SpectralError::NonPositiveSpacing(spacing_ghz));
    }
    if !(channel_width_ghz.is_finite() && channel_width_ghz >= 0.0) {
        return Err(SpectralError::InvalidChannelWidth(channel_width_ghz));
    }
    let span_ghz = band.freq_span_ghz();
    if channel_width_ghz > span_ghz {
        return Err(SpectralError::WidthExceedsSpan {
            width_ghz: channel_width_ghz,
            span_ghz,
        });
    }
    match anchor {
        GridAnchor::BandEdge => {
            Ok(((span_ghz - channel_width_ghz) / spacing_ghz).floor() as u32 + 1)
        }
        GridAnchor::Itu { reference_thz } => {
            let low_ghz = band.low_edge_thz() * 1e3 + channel_width_ghz / 2.0;
            let high_ghz = low_ghz - channel_width_ghz + span_ghz;
            let ref_ghz = reference_thz * 1e3;
            let k_min = ((low_ghz - ref_ghz) / spacing_ghz).ceil() as i64;
            let k_max = ((high_ghz - ref_ghz) / spacing_ghz).floor() as i64;
            Ok((k_max - k_min + 1).max(0) as u32)
        }
    }
}

/// Place `grid_capacity` channels in `band` at the given spacing, anchored
/// at the band's low-frequency edge. The generated plan validates clean
/// whenever `spacing ≥ width + guard_band`.
pub fn grid_channels(
    band: &Band,
    spacing_ghz: f64,
    channel_width_ghz: f64,
    role: ChannelRole,
    launch_power_dbm: Option<f64>,
    amplified: bool,
) -> Result<Vec<Channel>, SpectralError> {
    let count = grid_capacity(band, spacing_ghz, channel_width_ghz)?;
    let base_thz = band.low_edge_thz() + channel_width_ghz / 2.0 * 1e-3;
    (0..count)
        .map(|k| {
            let center = Frequency::new(base_thz + k as f64 * spacing_ghz * 1e-3)?;
            Channel::new(center, channel_width_ghz, role, launch_power_dbm, amplified)
        })
        .collect()
}
