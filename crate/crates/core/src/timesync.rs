//! Two-way time transfer over a bidirectional fiber link.
//!
//! One round exchanges four timestamps: the master sends at t1, the slave
//! receives at t2 and replies at t3, the master receives at t4. From these,
//!
//! - offset  = ((t2 − t1) − (t4 − t3)) / 2
//! - delay   = ((t2 − t1) + (t4 − t3)) / 2
//!
//! The method is blind to forward/backward delay asymmetry, which biases
//! the offset estimate by half the difference; [`chromatic_asymmetry_ps`]
//! gives the dispersion-induced contribution when the two directions use
//! different wavelengths.
//!
//! All timestamps are integer picoseconds, so reports are bit-exact and
//! free of float drift. The halving divisions round toward negative
//! infinity, which keeps `offset_est − true_offset = (forward − backward)/2`
//! an exact identity for every parameter combination.

use crate::rng::{SplitMix64, Xoshiro256StarStar};
use crate::spectral::Wavelength;

/// Slave processing time between t2 and t3. Any constant cancels in the
/// estimation algebra; use [`run_exchange_with_turnaround`] to change it.
pub const DEFAULT_TURNAROUND_PS: i64 = 1_000_000;

/// Spacing between successive exchanges in a session (1 s).
const ROUND_SPACING_PS: i64 = 1_000_000_000_000;

/// Slave clock model: constant offset, linear drift, and timestamping
/// granularity shared by both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockState {
    /// Slave minus master, in picoseconds.
    pub offset_ps: i64,
    /// Slave rate error in parts per billion (1 ppb = 1000 ps/s).
    pub drift_ppb: f64,
    /// Timestamp quantisation step, at least 1 ps.
    pub timestamp_granularity_ps: i64,
}

impl ClockState {
    pub fn new(offset_ps: i64, drift_ppb: f64, timestamp_granularity_ps: i64) -> Self {
        assert!(
            timestamp_granularity_ps >= 1,
            "granularity must be at least 1 ps"
        );
        assert!(drift_ppb.is_finite(), "drift must be finite");
        Self {
            offset_ps,
            drift_ppb,
            timestamp_granularity_ps,
        }
    }
}

/// One-way propagation delays and per-message timing jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDelays {
    pub forward_ps: i64,
    pub backward_ps: i64,
    pub jitter_sigma_ps: f64,
}

impl LinkDelays {
    pub fn new(forward_ps: i64, backward_ps: i64, jitter_sigma_ps: f64) -> Self {
        assert!(forward_ps > 0 && backward_ps > 0, "delays must be positive");
        assert!(
            jitter_sigma_ps.is_finite() && jitter_sigma_ps >= 0.0,
            "jitter sigma must be non-negative"
        );
        Self {
            forward_ps,
            backward_ps,
            jitter_sigma_ps,
        }
    }

    pub fn symmetric(delay_ps: i64, jitter_sigma_ps: f64) -> Self {
        Self::new(delay_ps, delay_ps, jitter_sigma_ps)
    }
}

/// The four timestamps of one round: t1 and t4 in the master timescale,
/// t2 and t3 in the slave timescale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoWayExchange {
    pub t1: i64,
    pub t2: i64,
    pub t3: i64,
    pub t4: i64,
}

impl TwoWayExchange {
    pub fn is_valid(&self) -> bool {
        self.t4 > self.t1 && self.t3 >= self.t2
    }
}

/// Offset and delay recovered from one exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncEstimate {
    pub offset_est_ps: i64,
    pub round_trip_ps: i64,
    pub one_way_delay_est_ps: i64,
}

/// Floor an integer-plus-jitter sum to the timestamp grid. The integer
/// part is handled in exact i64 arithmetic; the float path only ever sees
/// the sub-granularity residual plus the jitter, so large timestamps do
/// not lose precision.
fn quantize(exact_ps: i64, jitter_ps: f64, granularity_ps: i64) -> i64 {
    let base = exact_ps.div_euclid(granularity_ps) * granularity_ps;
    if jitter_ps == 0.0 {
        return base;
    }
    let residual = (exact_ps - base) as f64;
    base + ((residual + jitter_ps) / granularity_ps as f64).floor() as i64 * granularity_ps
}

/// Floor division by two (round toward negative infinity).
fn half_floor(x: i64) -> i64 {
    x.div_euclid(2)
}

/// Simulate one exchange starting at master time `t1`. Jitter samples are
/// drawn from a Gaussian stream seeded with `seed` (two draws per
/// exchange), so identical inputs give identical exchanges.
pub fn run_exchange(
    clock: &ClockState,
    delays: &LinkDelays,
    t1_ps: i64,
    seed: u64,
) -> TwoWayExchange {
    run_exchange_with_turnaround(clock, delays, t1_ps, seed, DEFAULT_TURNAROUND_PS)
}

/// [`run_exchange`] with an explicit slave turnaround time.
pub fn run_exchange_with_turnaround(
    clock: &ClockState,
    delays: &LinkDelays,
    t1_ps: i64,
    seed: u64,
    turnaround_ps: i64,
) -> TwoWayExchange {
    assert!(t1_ps >= 0, "t1 must be non-negative");
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    let (j1, j2) = if delays.jitter_sigma_ps == 0.0 {
        (0.0, 0.0)
    } else {
        (
            rng.next_gaussian() * delays.jitter_sigma_ps,
            rng.next_gaussian() * delays.jitter_sigma_ps,
        )
    };
    let g = clock.timestamp_granularity_ps;
    let t2 = quantize(t1_ps + delays.forward_ps + clock.offset_ps, j1, g);
    let t3 = t2 + turnaround_ps;
    let t4 = quantize(t3 - clock.offset_ps + delays.backward_ps, j2, g);
    TwoWayExchange {
        t1: t1_ps,
        t2,
        t3,
        t4,
    }
}

/// Recover offset and delay from one exchange. Halving divisions round
/// toward negative infinity.
pub fn estimate(x: &TwoWayExchange) -> SyncEstimate {
    let forward_leg = x.t2 - x.t1;
    let backward_leg = x.t4 - x.t3;
    let round_trip = forward_leg + backward_leg;
    SyncEstimate {
        offset_est_ps: half_floor(forward_leg - backward_leg),
        round_trip_ps: round_trip,
        one_way_delay_est_ps: half_floor(round_trip),
    }
}

/// The bias the two-way method cannot see: (forward − backward)/2.
pub fn asymmetry_error_ps(delays: &LinkDelays) -> i64 {
    half_floor(delays.forward_ps - delays.backward_ps)
}

/// Delay difference accumulated by chromatic dispersion when the two
/// directions use different wavelengths: D · L · Δλ, rounded to 1 ps.
/// Feed the result into [`LinkDelays`] as a forward/backward difference to
/// see the resulting offset bias.
pub fn chromatic_asymmetry_ps(
    lambda_fwd: Wavelength,
    lambda_bwd: Wavelength,
    dispersion_ps_per_nm_km: f64,
    length_km: f64,
) -> i64 {
    assert!(length_km > 0.0, "length must be positive");
    (dispersion_ps_per_nm_km * length_km * (lambda_fwd.nm() - lambda_bwd.nm())).round() as i64
}

/// One row of a simulated session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u32,
    pub exchange: TwoWayExchange,
    pub offset_est_ps: i64,
    pub true_offset_ps: i64,
    pub error_ps: i64,
}

/// Mean and standard deviation (population) of the per-round offset error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionStats {
    pub rounds: u32,
    pub mean_offset_error_ps: f64,
    pub std_offset_error_ps: f64,
}

/// Run `rounds` exchanges at 1 s spacing. The slave offset is advanced by
/// the drift once per round, evaluated at that round's t1; each exchange
/// draws its jitter from a sub-seed derived from `seed` via SplitMix64, so
/// sessions are bitwise reproducible.
pub fn session_records(
    clock: &ClockState,
    delays: &LinkDelays,
    rounds: u32,
    seed: u64,
) -> Vec<RoundRecord> {
    assert!(rounds >= 1, "at least one round required");
    let mut seeder = SplitMix64::new(seed);
    let mut records = Vec::with_capacity(rounds as usize);
    for round in 0..rounds {
        let t1 = round as i64 * ROUND_SPACING_PS;
        let drift_ps = (clock.drift_ppb * 1e-9 * t1 as f64).round() as i64;
        let true_offset = clock.offset_ps + drift_ps;
        let round_clock = ClockState {
            offset_ps: true_offset,
            ..*clock
        };
        let exchange = run_exchange(&round_clock, delays, t1, seeder.next_u64());
        let est = estimate(&exchange);
        records.push(RoundRecord {
            round,
            exchange,
            offset_est_ps: est.offset_est_ps,
            true_offset_ps: true_offset,
            error_ps: est.offset_est_ps - true_offset,
        });
    }
    records
}

/// Summary statistics over [`session_records`].
pub fn simulate_session(
    clock: &ClockState,
    delays: &LinkDelays,
    rounds: u32,
    seed: u64,
) -> SessionStats {
    let records = session_records(clock, delays, rounds, seed);
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.error_ps as f64).sum::<f64>() / n;
    let var = records
        .iter()
        .map(|r| {
            let d = r.error_ps as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    SessionStats {
        rounds,
        mean_offset_error_ps: mean,
        std_offset_error_ps: var.sqrt(),
    }
}
