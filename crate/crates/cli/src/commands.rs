//! Subcommand implementations.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use coexist_core::linkbudget::{total_budget, AttenuationProfile, OpticalFilter};
use coexist_core::raman::{spontaneous_rate, RamanGainProfile, ScatterDirection, ScatterGeometry};
use coexist_core::scenario::{ProfileDefaults, Scenario, ScenarioError};
use coexist_core::sensing::{detect_events, synthesize_trace, PhaseTrace, TRACE_MAGIC};
use coexist_core::spectral::{
    grid_capacity_anchored, shift_between, Band, GridAnchor, Wavelength, ITU_REFERENCE_THZ,
};
use coexist_core::timesync::{session_records, SessionStats};
use coexist_core::FiberSpan;

use crate::report::{bytes_digest, envelope, round3, round6, round9, to_json_bytes, write_file};
use crate::sweep::{set_path, SweepSpec};
use crate::{AnchorArg, CliError, CommonArgs, ProfileKind, TraceFormat, PROFILE_DIR_ENV};

/// Shipped defaults, with `COEXIST_SIM_PROFILE_DIR` tables layered on top
/// when the variable is set and the files exist.
fn load_defaults() -> Result<ProfileDefaults, CliError> {
    let mut defaults = ProfileDefaults::default();
    if let Ok(dir) = std::env::var(PROFILE_DIR_ENV) {
        let dir = Path::new(&dir);
        let raman_path = dir.join("raman_gain.csv");
        if raman_path.exists() {
            let text = fs::read_to_string(&raman_path)?;
            defaults.raman_gain = RamanGainProfile::from_csv_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", raman_path.display())))?;
        }
        let att_path = dir.join("attenuation.csv");
        if att_path.exists() {
            let text = fs::read_to_string(&att_path)?;
            defaults.attenuation = AttenuationProfile::from_csv_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", att_path.display())))?;
        }
    }
    Ok(defaults)
}

struct LoadedScenario {
    text: String,
    digest: String,
    file_name: String,
    scenario: Scenario,
}

fn load_scenario(path: &Path) -> Result<LoadedScenario, CliError> {
    let defaults = load_defaults()?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let scenario = Scenario::from_json_str(&text, &defaults)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(LoadedScenario {
        digest: bytes_digest(text.as_bytes()),
        text,
        file_name: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        scenario,
    })
}

fn scenario_inputs(loaded: &LoadedScenario) -> Value {
    json!({
        "scenario_file": loaded.file_name,
        "scenario_sha256": loaded.digest,
    })
}

fn effective_echo(scenario: &Scenario) -> Value {
    serde_json::to_value(scenario.to_doc()).expect("scenario echo serialization")
}

// ── plan ─────────────────────────────────────────────────────────────────

pub fn plan_validate(common: &CommonArgs, path: &Path) -> Result<(), CliError> {
    let defaults = load_defaults()?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let digest = bytes_digest(text.as_bytes());
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let (violations, effective) = match Scenario::from_json_str(&text, &defaults) {
        Ok(s) => (Vec::new(), effective_echo(&s)),
        Err(ScenarioError::PlanViolations(v)) => (v, Value::Null),
        Err(e) => return Err(CliError::Usage(format!("{}: {e}", path.display()))),
    };

    let result = json!({
        "violation_count": violations.len(),
        "violations": violations.iter().map(|v| json!({
            "rule": v.rule.name(),
            "channels": v.channels,
            "detail": v.detail,
        })).collect::<Vec<_>>(),
    });
    let report = envelope(
        "plan validate",
        json!({"scenario_file": file_name, "scenario_sha256": digest}),
        effective,
        result,
    );
    if common.format.json() {
        write_file(&common.out, "validate.json", &to_json_bytes(&report))?;
    }
    if common.format.csv() {
        let mut csv = String::from("rule,channels,detail\n");
        for v in &violations {
            let channels = v
                .channels
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(";");
            csv.push_str(&format!(
                "{},{},\"{}\"\n",
                v.rule.name(),
                channels,
                v.detail
            ));
        }
        write_file(&common.out, "validate.csv", csv.as_bytes())?;
    }
    println!("{} violations", violations.len());
    for v in &violations {
        println!("  - {v}");
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violations)
    }
}

pub fn plan_capacity(
    common: &CommonArgs,
    lambda_min_nm: f64,
    lambda_max_nm: f64,
    spacing_ghz: f64,
    width_ghz: f64,
    anchor: AnchorArg,
) -> Result<(), CliError> {
    let band = Band::new(
        "band",
        Wavelength::new(lambda_min_nm).map_err(|e| CliError::Usage(e.to_string()))?,
        Wavelength::new(lambda_max_nm).map_err(|e| CliError::Usage(e.to_string()))?,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let (anchor_kind, grid_anchor) = match anchor {
        AnchorArg::BandEdge => ("band-edge", GridAnchor::BandEdge),
        AnchorArg::Itu => (
            "itu",
            GridAnchor::Itu {
                reference_thz: ITU_REFERENCE_THZ,
            },
        ),
    };
    let capacity = grid_capacity_anchored(&band, spacing_ghz, width_ghz, grid_anchor)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let result = json!({
        "lambda_min_nm": lambda_min_nm,
        "lambda_max_nm": lambda_max_nm,
        "band_span_ghz": round3(band.freq_span_ghz()),
        "spacing_ghz": spacing_ghz,
        "channel_width_ghz": width_ghz,
        "anchor": anchor_kind,
        "capacity": capacity,
    });
    let report = envelope("plan capacity", Value::Null, Value::Null, result);
    if common.format.json() {
        write_file(&common.out, "capacity.json", &to_json_bytes(&report))?;
    }
    if common.format.csv() {
        let csv = format!(
            "lambda_min_nm,lambda_max_nm,spacing_ghz,channel_width_ghz,anchor,capacity\n{},{},{},{},{},{}\n",
            lambda_min_nm, lambda_max_nm, spacing_ghz, width_ghz, anchor_kind, capacity
        );
        write_file(&common.out, "capacity.csv", csv.as_bytes())?;
    }
    println!("capacity {capacity}");
    Ok(())
}

// ── noise ────────────────────────────────────────────────────────────────

struct RamanContribution {
    span_index: usize,
    channel_index: usize,
    center_thz: f64,
    role: &'static str,
    shift_thz: f64,
    rate_per_s: f64,
}

fn raman_contributions(scenario: &Scenario) -> Result<Vec<RamanContribution>, CliError> {
    let quantum = scenario
        .quantum_channel()
        .ok_or_else(|| CliError::Usage("scenario has no quantum channel".into()))?;
    let quantum_wl = quantum.center_wavelength();
    let detection_width = scenario
        .link
        .terminal_filter()
        .map(OpticalFilter::passband_width_ghz)
        .unwrap_or_else(|| quantum.width_ghz());

    let mut rows = Vec::new();
    for (span_index, span) in scenario.link.spans().enumerate() {
        let probe_att = span
            .attenuation()
            .loss_db_per_km(quantum_wl)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for (channel_index, pump) in scenario.plan.channels().iter().enumerate() {
            if pump.role() == coexist_core::ChannelRole::Quantum {
                continue;
            }
            let pump_att = span
                .attenuation()
                .loss_db_per_km(pump.center_wavelength())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let geometry = ScatterGeometry::new(
                ScatterDirection::CoPropagating,
                span.length_km(),
                pump_att,
                probe_att,
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let rate = spontaneous_rate(
                pump,
                quantum_wl,
                detection_width,
                &scenario.raman_profile,
                &geometry,
                &scenario.environment,
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            rows.push(RamanContribution {
                span_index,
                channel_index,
                center_thz: pump.center().thz(),
                role: pump.role().as_str(),
                shift_thz: shift_between(pump.center_wavelength(), quantum_wl),
                rate_per_s: rate,
            });
        }
    }
    Ok(rows)
}

pub fn noise_raman(common: &CommonArgs, path: &Path) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    let rows = raman_contributions(&loaded.scenario)?;
    let total: f64 = rows.iter().map(|r| round3(r.rate_per_s)).sum();

    let result = json!({
        "contributions": rows.iter().map(|r| json!({
            "span_index": r.span_index,
            "channel_index": r.channel_index,
            "center_thz": round6(r.center_thz),
            "role": r.role,
            "shift_thz": round6(r.shift_thz),
            "rate_per_s": round3(r.rate_per_s),
        })).collect::<Vec<_>>(),
        "total_rate_per_s": total,
    });
    let report = envelope(
        "noise raman",
        scenario_inputs(&loaded),
        effective_echo(&loaded.scenario),
        result,
    );
    if common.format.json() {
        write_file(&common.out, "raman.json", &to_json_bytes(&report))?;
    }
    if common.format.csv() {
        let mut csv =
            String::from("span_index,channel_index,center_thz,role,shift_thz,rate_per_s\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{:.6},{},{:.6},{:.3}\n",
                r.span_index, r.channel_index, r.center_thz, r.role, r.shift_thz, r.rate_per_s
            ));
        }
        write_file(&common.out, "raman.csv", csv.as_bytes())?;
    }
    println!(
        "raman total {total:.3} photons/s over {} contributions",
        rows.len()
    );
    Ok(())
}

/// Budget with all components quantized to the report precision; the total
/// is recomputed from the quantized components so text consumers re-sum to
/// the same bits.
struct QuantizedBudget {
    raman: f64,
    ase: f64,
    leakage: f64,
    dark: f64,
    total: f64,
    qber: f64,
}

fn compute_budget(scenario: &Scenario) -> Result<QuantizedBudget, CliError> {
    let quantum = scenario
        .quantum_channel()
        .ok_or_else(|| CliError::Usage("scenario has no quantum channel".into()))?;
    let signal_rate = scenario.signal_rate_per_s.ok_or_else(|| {
        CliError::Usage("scenario field signal_rate_per_s is required for noise budget".into())
    })?;
    let budget = total_budget(
        &scenario.link,
        &scenario.plan,
        quantum,
        &scenario.detector,
        &scenario.raman_profile,
        &scenario.environment,
        signal_rate,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let raman = round3(budget.raman_rate_per_s);
    let ase = round3(budget.ase_rate_per_s);
    let leakage = round3(budget.leakage_rate_per_s);
    let dark = round3(budget.dark_rate_per_s);
    Ok(QuantizedBudget {
        raman,
        ase,
        leakage,
        dark,
        total: raman + ase + leakage + dark,
        qber: round9(budget.qber_estimate),
    })
}

fn budget_json(b: &QuantizedBudget) -> Value {
    json!({
        "raman_rate_per_s": b.raman,
        "ase_rate_per_s": b.ase,
        "leakage_rate_per_s": b.leakage,
        "dark_rate_per_s": b.dark,
        "total_rate_per_s": b.total,
        "qber_estimate": b.qber,
    })
}

const BUDGET_CSV_HEADER: &str =
    "raman_rate_per_s,ase_rate_per_s,leakage_rate_per_s,dark_rate_per_s,total_rate_per_s,qber_estimate";

fn budget_csv_row(b: &QuantizedBudget) -> String {
    format!(
        "{:.3},{:.3},{:.3},{:.3},{:.3},{:.9}",
        b.raman, b.ase, b.leakage, b.dark, b.total, b.qber
    )
}

pub fn noise_budget(common: &CommonArgs, path: &Path) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    match &common.sweep {
        None => {
            let b = compute_budget(&loaded.scenario)?;
            let report = envelope(
                "noise budget",
                scenario_inputs(&loaded),
                effective_echo(&loaded.scenario),
                budget_json(&b),
            );
            if common.format.json() {
                write_file(&common.out, "budget.json", &to_json_bytes(&report))?;
            }
            if common.format.csv() {
                let csv = format!("{BUDGET_CSV_HEADER}\n{}\n", budget_csv_row(&b));
                write_file(&common.out, "budget.csv", csv.as_bytes())?;
            }
            println!(
                "total {:.3} photons/s (raman {:.3}, ase {:.3}, leakage {:.3}, dark {:.3}), qber {:.9}",
                b.total, b.raman, b.ase, b.leakage, b.dark, b.qber
            );
            Ok(())
        }
        Some(spec_text) => {
            let spec = SweepSpec::parse(spec_text)?;
            let defaults = load_defaults()?;
            let base_doc: Value = serde_json::from_str(&loaded.text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut points = Vec::with_capacity(spec.steps);
            let mut csv = format!("sweep_index,sweep_key,sweep_value,{BUDGET_CSV_HEADER}\n");
            for i in 0..spec.steps {
                let value = spec.value_at(i);
                let mut doc = base_doc.clone();
                set_path(&mut doc, &spec.key, value)?;
                let text = serde_json::to_string(&doc).expect("sweep document");
                let scenario = Scenario::from_json_str(&text, &defaults).map_err(|e| {
                    CliError::Usage(format!("sweep point {i} ({}={value}): {e}", spec.key))
                })?;
                let b = compute_budget(&scenario)?;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    i,
                    spec.key,
                    value,
                    budget_csv_row(&b)
                ));
                points.push(json!({
                    "sweep_index": i,
                    "sweep_value": value,
                    "budget": budget_json(&b),
                }));
            }
            let result = json!({
                "sweep": {
                    "key": spec.key,
                    "start": spec.start,
                    "stop": spec.stop,
                    "steps": spec.steps,
                },
                "points": points,
            });
            let report = envelope(
                "noise budget",
                scenario_inputs(&loaded),
                effective_echo(&loaded.scenario),
                result,
            );
            if common.format.json() {
                write_file(&common.out, "budget_sweep.json", &to_json_bytes(&report))?;
            }
            if common.format.csv() {
                write_file(&common.out, "budget_sweep.csv", csv.as_bytes())?;
            }
            println!("swept {} over {} points", spec.key, spec.steps);
            Ok(())
        }
    }
}

// ── timesync ─────────────────────────────────────────────────────────────

pub fn timesync_simulate(
    common: &CommonArgs,
    path: &Path,
    rounds_override: Option<u32>,
) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    let section = loaded
        .scenario
        .timesync
        .ok_or_else(|| CliError::Usage("scenario has no timesync section".into()))?;
    let rounds = rounds_override.unwrap_or(section.rounds);
    if rounds < 1 {
        return Err(CliError::Usage("rounds must be at least 1".into()));
    }
    let seed = common.seed.unwrap_or(section.seed);

    let records = session_records(&section.clock, &section.delays, rounds, seed);
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
    let stats = SessionStats {
        rounds,
        mean_offset_error_ps: mean,
        std_offset_error_ps: var.sqrt(),
    };

    // The per-round CSV is the primary data artifact; always written.
    let mut csv = String::from("round,t1,t2,t3,t4,offset_est_ps,true_offset_ps,error_ps\n");
    for r in &records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.round,
            r.exchange.t1,
            r.exchange.t2,
            r.exchange.t3,
            r.exchange.t4,
            r.offset_est_ps,
            r.true_offset_ps,
            r.error_ps
        ));
    }
    write_file(&common.out, "timesync_rounds.csv", csv.as_bytes())?;

    if common.format.json() {
        let result = json!({
            "rounds": rounds,
            "seed": seed,
            "rng": "xoshiro256** (SplitMix64 seeding, Box-Muller gaussians)",
            "mean_offset_error_ps": round3(stats.mean_offset_error_ps),
            "std_offset_error_ps": round3(stats.std_offset_error_ps),
            "asymmetry_error_ps": coexist_core::timesync::asymmetry_error_ps(&section.delays),
        });
        let report = envelope(
            "timesync simulate",
            scenario_inputs(&loaded),
            effective_echo(&loaded.scenario),
            result,
        );
        write_file(&common.out, "timesync.json", &to_json_bytes(&report))?;
    }
    println!(
        "{} rounds: mean error {:.3} ps, std {:.3} ps",
        rounds, stats.mean_offset_error_ps, stats.std_offset_error_ps
    );
    Ok(())
}

// ── sensing ──────────────────────────────────────────────────────────────

pub fn sense_synth(
    common: &CommonArgs,
    path: &Path,
    trace_format: TraceFormat,
) -> Result<(), CliError> {
    let loaded = load_scenario(path)?;
    let section = loaded
        .scenario
        .sensing
        .as_ref()
        .ok_or_else(|| CliError::Usage("scenario has no sensing section".into()))?;
    let seed = common.seed.unwrap_or(section.seed);
    let fiber = loaded
        .scenario
        .link
        .spans()
        .next()
        .cloned()
        .unwrap_or_else(|| {
            FiberSpan::new(1.0, loaded.scenario.attenuation.clone()).expect("valid span")
        });
    let trace = synthesize_trace(
        &section.events,
        section.duration_s,
        section.sample_rate_hz,
        section.noise_sigma_rad,
        &fiber,
        section.lambda,
        seed,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut bytes = Vec::new();
    let trace_name = match trace_format {
        TraceFormat::Csv => {
            trace
                .write_csv(&mut bytes)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            "trace.csv"
        }
        TraceFormat::Bin => {
            trace
                .write_binary(&mut bytes)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            "trace.bin"
        }
    };
    write_file(&common.out, trace_name, &bytes)?;

    if common.format.json() {
        let peak = trace.samples.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
        let result = json!({
            "trace_file": trace_name,
            "trace_sha256": bytes_digest(&bytes),
            "samples": trace.samples.len(),
            "sample_rate_hz": section.sample_rate_hz,
            "duration_s": section.duration_s,
            "noise_sigma_rad": section.noise_sigma_rad,
            "seed": seed,
            "rng": "xoshiro256** (SplitMix64 seeding, Box-Muller gaussians)",
            "peak_abs_phase_rad": round9(peak),
        });
        let report = envelope(
            "sense synth",
            scenario_inputs(&loaded),
            effective_echo(&loaded.scenario),
            result,
        );
        write_file(&common.out, "synth.json", &to_json_bytes(&report))?;
    }
    println!(
        "synthesized {} samples at {} Hz (seed {seed})",
        trace.samples.len(),
        section.sample_rate_hz
    );
    Ok(())
}

pub fn sense_detect(
    common: &CommonArgs,
    trace_path: &Path,
    window: usize,
    threshold: f64,
) -> Result<(), CliError> {
    let bytes = fs::read(trace_path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", trace_path.display())))?;
    let trace = if bytes.starts_with(TRACE_MAGIC) {
        PhaseTrace::read_binary(bytes.as_slice())
    } else {
        PhaseTrace::read_csv(bytes.as_slice())
    }
    .map_err(|e| CliError::Usage(format!("{}: {e}", trace_path.display())))?;

    let events =
        detect_events(&trace, window, threshold).map_err(|e| CliError::Usage(e.to_string()))?;

    if common.format.json() {
        let result = json!({
            "window": window,
            "threshold_sigma": threshold,
            "samples": trace.samples.len(),
            "sample_rate_hz": trace.sample_rate_hz,
            "event_count": events.len(),
            "events": events.iter().map(|e| json!({
                "time_s": round9(e.time_s),
                "score": round3(e.score),
            })).collect::<Vec<_>>(),
        });
        let report = envelope(
            "sense detect",
            json!({
                "trace_file": trace_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                "trace_sha256": bytes_digest(&bytes),
            }),
            Value::Null,
            result,
        );
        write_file(&common.out, "events.json", &to_json_bytes(&report))?;
    }
    if common.format.csv() {
        let mut csv = String::from("time_s,score\n");
        for e in &events {
            csv.push_str(&format!("{:.9},{:.3}\n", e.time_s, e.score));
        }
        write_file(&common.out, "events.csv", csv.as_bytes())?;
    }
    println!("{} events", events.len());
    for e in &events {
        println!("  - t = {:.3} s, score {:.1}", e.time_s, e.score);
    }
    Ok(())
}

// ── profiles ─────────────────────────────────────────────────────────────

pub fn profile_dump(common: &CommonArgs, kind: ProfileKind) -> Result<(), CliError> {
    let defaults = load_defaults()?;
    let (name, csv) = match kind {
        ProfileKind::Raman => ("raman_gain.csv", defaults.raman_gain.to_csv_string()),
        ProfileKind::Attenuation => ("attenuation.csv", defaults.attenuation.to_csv_string()),
    };
    write_file(&common.out, name, csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}
