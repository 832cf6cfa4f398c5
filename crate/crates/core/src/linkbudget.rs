//! Route composition and the noise budget seen by a quantum receiver.
//!
//! A [`LinkModel`] is an ordered list of fiber spans, amplifiers, and
//! filters. [`total_budget`] folds a [`ChannelPlan`] through it and returns
//! a [`NoiseBudget`]: spontaneous-Raman photons scattered into the quantum
//! detection window, amplified spontaneous emission leaking through the
//! terminal filter, residual classical power past the filter isolation,
//! detector dark counts, and the QBER these imply for a given signal rate.
//!
//! The detector is treated as broadband: any photon that makes it past the
//! terminal filter is counted, whatever its wavelength.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raman::{
    spontaneous_rate, RamanError, RamanGainProfile, ScatterDirection, ScatterGeometry,
    ThermalEnvironment,
};
use crate::spectral::{
    freq_to_wl, validate_plan, Band, Channel, ChannelPlan, ChannelRole, Frequency, Violation,
    Wavelength,
};

/// Out-of-band isolation is capped here; anything above is treated as this
/// value (a practical bound for cascaded thin-film filters).
pub const MAX_ISOLATION_DB: f64 = 200.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error("attenuation profile invalid: {0}")]
    InvalidProfile(String),
    #[error("wavelength {0} nm outside the attenuation table support")]
    WavelengthOutsideSupport(f64),
    #[error("fiber span invalid: {0}")]
    InvalidSpan(String),
    #[error("amplifier invalid: {0}")]
    InvalidAmplifier(String),
    #[error("optical filter invalid: {0}")]
    InvalidFilter(String),
    #[error("link model invalid: {0}")]
    InvalidLink(String),
    #[error("detector model invalid: {0}")]
    InvalidDetector(String),
    #[error("channel plan has violations: {0:?}")]
    InvalidPlan(Vec<Violation>),
    #[error("quantum channel not found in plan (or not a quantum channel)")]
    QuantumChannelMissing,
    #[error(transparent)]
    Raman(#[from] RamanError),
    #[error("profile CSV line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

/// Fiber loss in dB/km versus wavelength, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuationProfile {
    points: Vec<(Wavelength, f64)>,
}

impl AttenuationProfile {
    /// Points must be strictly increasing in wavelength, non-negative in
    /// loss, at least three, and span [1260, 1620] nm.
    pub fn new(points: Vec<(Wavelength, f64)>) -> Result<Self, LinkError> {
        if points.len() < 3 {
            return Err(LinkError::InvalidProfile(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        // Wavelengths are finite by construction of the newtype.
        for w in points.windows(2) {
            if w[1].0.nm() <= w[0].0.nm() {
                return Err(LinkError::InvalidProfile(
                    "wavelengths must be strictly increasing".into(),
                ));
            }
        }
        if points.iter().any(|&(_, l)| !l.is_finite() || l < 0.0) {
            return Err(LinkError::InvalidProfile(
                "losses must be finite and non-negative".into(),
            ));
        }
        let (first, last) = (points[0].0.nm(), points[points.len() - 1].0.nm());
        if first > 1260.0 || last < 1620.0 {
            return Err(LinkError::InvalidProfile(format!(
                "table must span [1260, 1620] nm, got [{first}, {last}]"
            )));
        }
        Ok(Self { points })
    }

    /// Generic G.652 water-peak shape. Ships as data; callers can override
    /// per span or per scenario.
    pub fn default_g652() -> Self {
        let wl = |nm: f64| Wavelength::new(nm).expect("in range");
        Self::new(vec![
            (wl(1260.0), 0.50),
            (wl(1310.0), 0.35),
            (wl(1383.0), 0.60),
            (wl(1458.0), 0.28),
            (wl(1550.0), 0.20),
            (wl(1620.0), 0.23),
        ])
        .expect("default table is valid")
    }

    pub fn points(&self) -> &[(Wavelength, f64)] {
        &self.points
    }

    /// Interpolated loss at `lambda`; errors outside the tabulated support.
    pub fn loss_db_per_km(&self, lambda: Wavelength) -> Result<f64, LinkError> {
        let nm = lambda.nm();
        let first = self.points[0].0.nm();
        let last = self.points[self.points.len() - 1].0.nm();
        if nm < first || nm > last {
            return Err(LinkError::WavelengthOutsideSupport(nm));
        }
        for w in self.points.windows(2) {
            let (l0, a0) = (w[0].0.nm(), w[0].1);
            let (l1, a1) = (w[1].0.nm(), w[1].1);
            if nm <= l1 {
                return Ok(a0 + (a1 - a0) * (nm - l0) / (l1 - l0));
            }
        }
        Ok(self.points[self.points.len() - 1].1)
    }

    /// Parse from CSV with header `lambda_nm,loss_db_per_km`.
    pub fn from_csv_str(text: &str) -> Result<Self, LinkError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(LinkError::Csv {
            line: 1,
            msg: "empty file".into(),
        })?;
        if header.trim() != "lambda_nm,loss_db_per_km" {
            return Err(LinkError::Csv {
                line: 1,
                msg: format!("expected header 'lambda_nm,loss_db_per_km', got '{header}'"),
            });
        }
        let mut points = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |field: Option<&str>, name: &str| -> Result<f64, LinkError> {
                field
                    .ok_or_else(|| LinkError::Csv {
                        line: idx + 1,
                        msg: format!("missing column {name}"),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| LinkError::Csv {
                        line: idx + 1,
                        msg: format!("bad {name}: {e}"),
                    })
            };
            let nm = parse(cols.next(), "lambda_nm")?;
            let loss = parse(cols.next(), "loss_db_per_km")?;
            let lambda = Wavelength::new(nm).map_err(|e| LinkError::Csv {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            points.push((lambda, loss));
        }
        Self::new(points)
    }

    /// Emit the table as CSV with header `lambda_nm,loss_db_per_km`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("lambda_nm,loss_db_per_km\n");
        for &(wl, loss) in &self.points {
            out.push_str(&format!("{:.1},{:.4}\n", wl.nm(), loss));
        }
        out
    }
}

/// Wavelength-dependent dB/km loss over `length_km`.
pub fn attenuation_db(
    profile: &AttenuationProfile,
    lambda: Wavelength,
    length_km: f64,
) -> Result<f64, LinkError> {
    Ok(profile.loss_db_per_km(lambda)? * length_km)
}

/// One fiber section with its attenuation table. Connector and splice
/// losses are folded into the span attenuation.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpan {
    length_km: f64,
    attenuation: AttenuationProfile,
}

impl FiberSpan {
    pub fn new(length_km: f64, attenuation: AttenuationProfile) -> Result<Self, LinkError> {
        if !(length_km.is_finite() && length_km > 0.0) {
            return Err(LinkError::InvalidSpan(format!(
                "length must be positive, got {length_km} km"
            )));
        }
        Ok(Self {
            length_km,
            attenuation,
        })
    }

    pub fn length_km(&self) -> f64 {
        self.length_km
    }

    pub fn attenuation(&self) -> &AttenuationProfile {
        &self.attenuation
    }
}

/// An optical amplifier with flat gain inside its band and unity gain
/// outside. `noise_factor` is the spontaneous-emission factor n_sp.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplifier {
    gain_db: f64,
    noise_factor: f64,
    band: Band,
}

impl Amplifier {
    pub fn new(gain_db: f64, noise_factor: f64, band: Band) -> Result<Self, LinkError> {
        if !(gain_db.is_finite() && (0.0..=40.0).contains(&gain_db)) {
            return Err(LinkError::InvalidAmplifier(format!(
                "gain must be in [0, 40] dB, got {gain_db}"
            )));
        }
        if !(noise_factor.is_finite() && noise_factor >= 1.0) {
            return Err(LinkError::InvalidAmplifier(format!(
                "noise factor n_sp must be ≥ 1, got {noise_factor}"
            )));
        }
        Ok(Self {
            gain_db,
            noise_factor,
            band,
        })
    }

    pub fn gain_db(&self) -> f64 {
        self.gain_db
    }

    pub fn noise_factor(&self) -> f64 {
        self.noise_factor
    }

    pub fn band(&self) -> &Band {
        &self.band
    }

    pub fn amplifies(&self, lambda: Wavelength) -> bool {
        self.band.contains_wavelength(lambda)
    }
}

/// A band-pass filter characterised by passband, insertion loss, and
/// out-of-band isolation.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalFilter {
    center: Frequency,
    passband_width_ghz: f64,
    insertion_loss_db: f64,
    out_of_band_isolation_db: f64,
    return_loss_db: f64,
}

impl OpticalFilter {
    pub fn new(
        center: Frequency,
        passband_width_ghz: f64,
        insertion_loss_db: f64,
        out_of_band_isolation_db: f64,
        return_loss_db: f64,
    ) -> Result<Self, LinkError> {
        if !(passband_width_ghz.is_finite() && passband_width_ghz > 0.0) {
            return Err(LinkError::InvalidFilter(format!(
                "passband width must be positive, got {passband_width_ghz} GHz"
            )));
        }
        let half = passband_width_ghz / 2.0 * 1e-3;
        if Frequency::new(center.thz() - half).is_err()
            || Frequency::new(center.thz() + half).is_err()
        {
            return Err(LinkError::InvalidFilter(
                "passband leaves the valid frequency range".into(),
            ));
        }
        for (name, v) in [
            ("insertion loss", insertion_loss_db),
            ("isolation", out_of_band_isolation_db),
            ("return loss", return_loss_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LinkError::InvalidFilter(format!(
                    "{name} must be non-negative, got {v} dB"
                )));
            }
        }
        if out_of_band_isolation_db < insertion_loss_db {
            return Err(LinkError::InvalidFilter(
                "isolation must be at least the insertion loss".into(),
            ));
        }
        Ok(Self {
            center,
            passband_width_ghz,
            insertion_loss_db,
            out_of_band_isolation_db,
            return_loss_db,
        })
    }

    pub fn center(&self) -> Frequency {
        self.center
    }

    pub fn passband_width_ghz(&self) -> f64 {
        self.passband_width_ghz
    }

    pub fn insertion_loss_db(&self) -> f64 {
        self.insertion_loss_db
    }

    pub fn out_of_band_isolation_db(&self) -> f64 {
        self.out_of_band_isolation_db
    }

    pub fn return_loss_db(&self) -> f64 {
        self.return_loss_db
    }

    /// Isolation with the [`MAX_ISOLATION_DB`] cap applied.
    pub fn effective_isolation_db(&self) -> f64 {
        self.out_of_band_isolation_db.min(MAX_ISOLATION_DB)
    }

    pub fn passes(&self, f: Frequency) -> bool {
        let half = self.passband_width_ghz / 2.0 * 1e-3;
        (self.center.thz() - half..=self.center.thz() + half).contains(&f.thz())
    }
}

/// One element of a route.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkElement {
    Span(FiberSpan),
    Amplifier(Amplifier),
    Filter(OpticalFilter),
}

/// An ordered route: at least one span, total length at most 2000 km.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    elements: Vec<LinkElement>,
}

impl LinkModel {
    pub fn new(elements: Vec<LinkElement>) -> Result<Self, LinkError> {
        let total: f64 = elements
            .iter()
            .filter_map(|e| match e {
                LinkElement::Span(s) => Some(s.length_km()),
                _ => None,
            })
            .sum();
        if total == 0.0 {
            return Err(LinkError::InvalidLink(
                "at least one fiber span required".into(),
            ));
        }
        if total > 2000.0 {
            return Err(LinkError::InvalidLink(format!(
                "total span length {total} km exceeds 2000 km"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[LinkElement] {
        &self.elements
    }

    pub fn spans(&self) -> impl Iterator<Item = &FiberSpan> {
        self.elements.iter().filter_map(|e| match e {
            LinkElement::Span(s) => Some(s),
            _ => None,
        })
    }

    pub fn amplifiers(&self) -> impl Iterator<Item = &Amplifier> {
        self.elements.iter().filter_map(|e| match e {
            LinkElement::Amplifier(a) => Some(a),
            _ => None,
        })
    }

    pub fn filters(&self) -> impl Iterator<Item = &OpticalFilter> {
        self.elements.iter().filter_map(|e| match e {
            LinkElement::Filter(f) => Some(f),
            _ => None,
        })
    }

    /// The last filter in the route; it defines the quantum receiver's
    /// detection window and the isolation applied to out-of-band noise.
    pub fn terminal_filter(&self) -> Option<&OpticalFilter> {
        self.filters().last()
    }

    pub fn total_length_km(&self) -> f64 {
        self.spans().map(FiberSpan::length_km).sum()
    }
}

/// Gated single-photon detector parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    gate_rate_hz: f64,
    gate_width_s: f64,
    efficiency: f64,
    dark_rate_cps: f64,
}

impl DetectorModel {
    pub fn new(
        gate_rate_hz: f64,
        gate_width_s: f64,
        efficiency: f64,
        dark_rate_cps: f64,
    ) -> Result<Self, LinkError> {
        if !(gate_rate_hz.is_finite() && gate_rate_hz > 0.0) {
            return Err(LinkError::InvalidDetector(format!(
                "gate rate must be positive, got {gate_rate_hz} Hz"
            )));
        }
        if !(gate_width_s.is_finite() && gate_width_s >= 0.0) {
            return Err(LinkError::InvalidDetector(format!(
                "gate width must be non-negative, got {gate_width_s} s"
            )));
        }
        if gate_width_s * gate_rate_hz > 1.0 {
            return Err(LinkError::InvalidDetector(
                "gate_width · gate_rate must not exceed 1 (duty cycle)".into(),
            ));
        }
        if !(efficiency.is_finite() && (0.0..=1.0).contains(&efficiency)) {
            return Err(LinkError::InvalidDetector(format!(
                "efficiency must be in [0, 1], got {efficiency}"
            )));
        }
        if !(dark_rate_cps.is_finite() && dark_rate_cps >= 0.0) {
            return Err(LinkError::InvalidDetector(format!(
                "dark rate must be non-negative, got {dark_rate_cps}"
            )));
        }
        Ok(Self {
            gate_rate_hz,
            gate_width_s,
            efficiency,
            dark_rate_cps,
        })
    }

    pub fn gate_rate_hz(&self) -> f64 {
        self.gate_rate_hz
    }

    pub fn gate_width_s(&self) -> f64 {
        self.gate_width_s
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn dark_rate_cps(&self) -> f64 {
        self.dark_rate_cps
    }
}

/// Per-source photon rates arriving in the quantum detection window, plus
/// the QBER they imply. `total_rate_per_s` is always the exact sum of the
/// four components, added in field order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub raman_rate_per_s: f64,
    pub ase_rate_per_s: f64,
    pub leakage_rate_per_s: f64,
    pub dark_rate_per_s: f64,
    pub total_rate_per_s: f64,
    pub qber_estimate: f64,
}

impl NoiseBudget {
    pub fn from_components(
        raman_rate_per_s: f64,
        ase_rate_per_s: f64,
        leakage_rate_per_s: f64,
        dark_rate_per_s: f64,
        qber_estimate: f64,
    ) -> Self {
        Self {
            raman_rate_per_s,
            ase_rate_per_s,
            leakage_rate_per_s,
            dark_rate_per_s,
            total_rate_per_s: raman_rate_per_s
                + ase_rate_per_s
                + leakage_rate_per_s
                + dark_rate_per_s,
            qber_estimate,
        }
    }
}

/// Two-polarization ASE power P = 2·n_sp·h·ν·(G − 1)·B inside the
/// amplifier band; zero outside.
pub fn ase_power_w(amp: &Amplifier, at: Frequency, bandwidth_ghz: f64) -> f64 {
    if !amp.amplifies(freq_to_wl(at)) {
        return 0.0;
    }
    let gain_linear = 10f64.powf(amp.gain_db() / 10.0);
    2.0 * amp.noise_factor() * at.photon_energy_j() * (gain_linear - 1.0) * bandwidth_ghz * 1e9
}

/// Residual classical power reaching the detector through `filter`, summed
/// over channels and converted to photons/s at each contributing channel's
/// own frequency (the detector is broadband, so leaked photons count even
/// though they land at classical wavelengths).
///
/// Channels inside the filter passband contribute at the insertion loss —
/// a plan error normally caught by `validate_plan` — the rest at the
/// out-of-band isolation, capped at [`MAX_ISOLATION_DB`].
pub fn leakage_rate(classical: &[Channel], filter: &OpticalFilter, link_loss_db: f64) -> f64 {
    classical
        .iter()
        .map(|ch| {
            let through_db = if filter.passes(ch.center()) {
                filter.insertion_loss_db()
            } else {
                filter.effective_isolation_db()
            };
            let residual_dbm = match ch.launch_power_dbm() {
                Some(dbm) => dbm - link_loss_db - through_db,
                None => return 0.0,
            };
            let watts = 10f64.powf(residual_dbm / 10.0) * 1e-3;
            watts / ch.center().photon_energy_j()
        })
        .sum()
}

/// End-to-end loss seen by one channel: span attenuation at its wavelength,
/// minus amplifier gain where the channel sits in an amplifier band, plus
/// any non-terminal filter it traverses (insertion loss in the passband,
/// capped isolation outside). Launch powers are taken at each element's
/// published values; a negative result means net gain.
fn channel_link_loss_db(
    link: &LinkModel,
    lambda: Wavelength,
    center: Frequency,
) -> Result<f64, LinkError> {
    let terminal = link.terminal_filter();
    let mut loss = 0.0;
    let mut filters_seen = 0usize;
    let total_filters = link.filters().count();
    for element in link.elements() {
        match element {
            LinkElement::Span(span) => {
                loss += attenuation_db(span.attenuation(), lambda, span.length_km())?;
            }
            LinkElement::Amplifier(amp) => {
                if amp.amplifies(lambda) {
                    loss -= amp.gain_db();
                }
            }
            LinkElement::Filter(filter) => {
                filters_seen += 1;
                let is_terminal = filters_seen == total_filters && terminal == Some(filter);
                if !is_terminal {
                    loss += if filter.passes(center) {
                        filter.insertion_loss_db()
                    } else {
                        filter.effective_isolation_db()
                    };
                }
            }
        }
    }
    Ok(loss)
}

/// Full noise budget for `quantum` at the end of `link`.
///
/// Raman rates are evaluated per span and per non-quantum channel in the
/// co-propagating direction, with each span's own attenuation at the pump
/// and quantum wavelengths and the channel's launch power at the span
/// input (cascaded power evolution between spans is not modeled; single-
/// pump contributions add linearly). ASE from each amplifier is evaluated
/// at the amplifier's band center over the detection bandwidth and passes
/// the terminal filter at its capped isolation. The detection bandwidth is
/// the terminal filter's passband width, or the quantum channel width if
/// the route has no filter.
///
/// `signal_rate_per_s` is the quantum signal photon rate arriving at the
/// detector; the QBER estimate is the symmetric-error form
/// 0.5·p_noise/(p_signal + p_noise) with per-gate probabilities
/// p_noise = total_rate·gate_width and p_signal = signal_rate·efficiency/gate_rate.
pub fn total_budget(
    link: &LinkModel,
    plan: &ChannelPlan,
    quantum: &Channel,
    det: &DetectorModel,
    profile: &RamanGainProfile,
    env: &ThermalEnvironment,
    signal_rate_per_s: f64,
) -> Result<NoiseBudget, LinkError> {
    let violations = validate_plan(plan);
    if !violations.is_empty() {
        return Err(LinkError::InvalidPlan(violations));
    }
    if quantum.role() != ChannelRole::Quantum || !plan.channels().contains(quantum) {
        return Err(LinkError::QuantumChannelMissing);
    }

    let quantum_wl = quantum.center_wavelength();
    let terminal = link.terminal_filter();
    let detection_width_ghz = terminal
        .map(OpticalFilter::passband_width_ghz)
        .unwrap_or_else(|| quantum.width_ghz());

    // Spontaneous Raman scattering, per span and per pump channel.
    let mut raman = 0.0;
    for span in link.spans() {
        let probe_att = span.attenuation().loss_db_per_km(quantum_wl)?;
        for pump in plan.non_quantum_channels() {
            let pump_att = span
                .attenuation()
                .loss_db_per_km(pump.center_wavelength())?;
            let geometry = ScatterGeometry::new(
                ScatterDirection::CoPropagating,
                span.length_km(),
                pump_att,
                probe_att,
            )?;
            raman += spontaneous_rate(
                pump,
                quantum_wl,
                detection_width_ghz,
                profile,
                &geometry,
                env,
            )?;
        }
    }

    // ASE through the terminal filter's isolation. Amplifier bands sit in
    // the classical region, away from the quantum passband.
    let isolation_db = terminal
        .map(OpticalFilter::effective_isolation_db)
        .unwrap_or(0.0);
    let mut ase = 0.0;
    for amp in link.amplifiers() {
        let at = amp.band().center_frequency();
        let power = ase_power_w(amp, at, detection_width_ghz) * 10f64.powf(-isolation_db / 10.0);
        ase += power / at.photon_energy_j();
    }

    // Residual classical power past the terminal filter.
    let mut leakage = 0.0;
    for ch in plan.non_quantum_channels() {
        let loss = channel_link_loss_db(link, ch.center_wavelength(), ch.center())?;
        leakage += match terminal {
            Some(filter) => leakage_rate(std::slice::from_ref(ch), filter, loss),
            None => {
                let residual_dbm = ch.launch_power_dbm().unwrap_or(f64::NEG_INFINITY) - loss;
                10f64.powf(residual_dbm / 10.0) * 1e-3 / ch.center().photon_energy_j()
            }
        };
    }

    let dark = det.dark_rate_cps();
    let total = raman + ase + leakage + dark;
    let p_noise = total * det.gate_width_s();
    let p_signal = signal_rate_per_s * det.efficiency() / det.gate_rate_hz();
    let qber = if p_signal + p_noise == 0.0 {
        0.0
    } else {
        0.5 * p_noise / (p_signal + p_noise)
    };

    Ok(NoiseBudget::from_components(
        raman, ase, leakage, dark, qber,
    ))
}
