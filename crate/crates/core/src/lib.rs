//! Planning and noise simulation for a shared optical-fiber infrastructure
//! that co-propagates classical data, precise-time, coherent-frequency, and
//! quantum (QKD) channels.
//!
//! The crate is organised around one planning object, [`spectral::ChannelPlan`],
//! and the physics that constrains it:
//!
//! - [`spectral`] — wavelength/frequency units, bands, channel grids, and
//!   channel-plan validation rules (quantum channels below 1290 nm when
//!   amplified classical traffic is present, overlap and guard-band checks).
//! - [`raman`] — spontaneous Raman scattering into a quantum channel:
//!   thermal phonon occupation, Stokes/anti-Stokes weights, gain-profile
//!   lookup, and scattered-photon-rate prediction.
//! - [`linkbudget`] — fiber spans, amplifiers, and filters composed into a
//!   route; attenuation, ASE, filter leakage, and a QBER estimate.
//! - [`timesync`] — two-way time transfer in integer picoseconds: timestamp
//!   exchange, offset/delay estimation, and asymmetry error sources.
//! - [`sensing`] — synthesis of interferometric phase traces from fiber
//!   disturbances and threshold-based event detection.
//! - [`scenario`] — the JSON scenario document that drives all of the above.
//!
//! All simulation randomness flows through [`rng`], a fixed xoshiro256**
//! stream, so identically-seeded runs reproduce byte-identical results.

pub mod constants;
pub mod linkbudget;
pub mod raman;
pub mod rng;
pub mod scenario;
pub mod sensing;
pub mod spectral;
pub mod timesync;

pub use linkbudget::{
    Amplifier, AttenuationProfile, DetectorModel, FiberSpan, LinkElement, LinkModel, NoiseBudget,
    OpticalFilter,
};
pub use raman::{RamanGainProfile, ScatterDirection, ScatterGeometry, ThermalEnvironment};
pub use scenario::Scenario;
pub use sensing::{DetectedEvent, DisturbanceEvent, EventShape, PhaseTrace};
pub use spectral::{Band, Channel, ChannelPlan, ChannelRole, Frequency, Violation, Wavelength};
pub use timesync::{ClockState, LinkDelays, SessionStats, SyncEstimate, TwoWayExchange};
