//! Seeded Monte-Carlo execution of independent codeword drops.
//!
//! One trial follows a single codeword through its repetition schedule: every
//! scheduled transmission is placed in its frame segment, sent over the
//! channel, collected, MRC-combined with the earlier copies, decoded, and fed
//! to the stop-feedback protocol. Trials derive their seeds from
//! `(master_seed, trial_index)` and run in fixed-size chunks, so aggregate
//! results are identical for any worker count; early stopping on the block
//! error budget is decided only at chunk boundaries.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use zcqo_core::channel::{derive_seed, sample_fading, transmit, FadingProcess};
use zcqo_core::codec::{
    decode_full_correlation, decode_with_indication, derate_match, detect_indicator_shifts,
    encode, encode_with_indication, rate_match, DecoderConfig,
};
use zcqo_core::dictionary::Message;
use zcqo_core::link::{
    build_frame, mrc_combine, step_protocol, CodewordProcess, DecodeOutcome, ProcessState,
    ReceivedCopy,
};
use zcqo_core::mdc::{concat_segments, mdc_decode, mdc_encode};
use zcqo_core::zc::energy;
use zcqo_core::Complex64;

use crate::config::{CampaignPlan, ChannelModel, CodingPlan, ReuseMode, Scheme, SimConfig};
use crate::results::{ResultRow, SimResult, TrialRecord};
use crate::{CliError, CliResult};

/// Trials per scheduling chunk; early stopping is evaluated between chunks.
const CHUNK_TRIALS: u64 = 1024;

struct DecodeSummary {
    message: Option<Message>,
    residual_fraction: f64,
}

fn decode_combined(plan: &CampaignPlan, combined: &[Complex64]) -> DecodeSummary {
    match &plan.coding {
        CodingPlan::Ssc { spec } => {
            let folded = derate_match(combined, spec.p() as usize);
            let input_energy = energy(&folded).max(f64::MIN_POSITIVE);
            let result = match plan.config.scheme {
                Scheme::Ssc => decode_full_correlation(spec, &folded),
                Scheme::SscIndicated => {
                    let cfg = DecoderConfig::new(
                        plan.config.l_prime.min(spec.p() as usize - 1),
                        plan.config.alpha,
                    );
                    decode_with_indication(spec, &cfg, &folded)
                }
                Scheme::Mdc => unreachable!("MDC uses the segmented plan"),
            }
            .expect("validated decode parameters");
            DecodeSummary {
                message: result.message,
                residual_fraction: result.residual_energy / input_energy,
            }
        }
        CodingPlan::Mdc { mdc } => {
            let result = mdc_decode(mdc, combined).expect("validated band length");
            let p = mdc.segment_spec().p() as usize;
            let mut total = 0.0;
            for s in 0..mdc.segments() {
                let slice = &combined[s * mdc.res_per_segment()..(s + 1) * mdc.res_per_segment()];
                total += energy(&derate_match(slice, p));
            }
            let residual: f64 = result
                .segment_results
                .iter()
                .map(|r| r.residual_energy)
                .sum();
            DecodeSummary {
                message: result.message,
                residual_fraction: residual / total.max(f64::MIN_POSITIVE),
            }
        }
    }
}

/// Coarse per-copy phase estimate for MRC. Without indicators there is no
/// phase reference, so combining falls back to unrotated copies.
fn copy_phase(plan: &CampaignPlan, copy: &[Complex64]) -> f64 {
    match &plan.coding {
        CodingPlan::Ssc { spec } if plan.config.scheme == Scheme::SscIndicated => {
            let folded = derate_match(copy, spec.p() as usize);
            match detect_indicator_shifts(spec, &folded, spec.l()) {
                Ok(detections) if !detections.is_empty() => {
                    detections.iter().map(|d| d.1).sum::<Complex64>().arg()
                }
                _ => 0.0,
            }
        }
        _ => 0.0,
    }
}

fn encode_segment(plan: &CampaignPlan, message: &Message) -> Vec<Complex64> {
    match &plan.coding {
        CodingPlan::Ssc { spec } => {
            let cw = match plan.config.scheme {
                Scheme::Ssc => encode(spec, message),
                Scheme::SscIndicated => encode_with_indication(spec, message, plan.config.alpha),
                Scheme::Mdc => unreachable!(),
            }
            .expect("validated encode parameters");
            rate_match(&cw, plan.res_per_segment).symbols
        }
        CodingPlan::Mdc { mdc } => {
            concat_segments(&mdc_encode(mdc, message).expect("validated encode parameters"))
        }
    }
}

fn payload_bits(plan: &CampaignPlan) -> usize {
    plan.config.info_bits
}

/// Runs one independent codeword drop.
pub fn run_trial(plan: &CampaignPlan, trial_index: u64) -> TrialRecord {
    let cfg = &plan.config;
    let trial_seed = derive_seed(cfg.seed, trial_index);
    let mut message_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, 0));
    let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, 2));

    let schedule = plan.schedule;
    let span = (schedule.total - 1) * schedule.spacing_slots + 1;
    let gains: Vec<Complex64> = match cfg.channel {
        ChannelModel::Awgn => vec![Complex64::new(1.0, 0.0); span],
        ChannelModel::Rician => sample_fading(
            &FadingProcess {
                k_factor_db: cfg.k_factor_db,
                doppler_hz: cfg.doppler_hz,
                slot_duration_s: cfg.slot_ms * 1e-3,
            },
            span,
            derive_seed(trial_seed, 1),
        ),
    };

    let message = Message::random(payload_bits(plan), &mut message_rng);
    let segment_symbols = encode_segment(plan, &message);
    let band_len = plan.res_per_segment * schedule.total;

    let mut process = CodewordProcess::new(trial_index);
    let mut copies: Vec<ReceivedCopy> = Vec::with_capacity(schedule.total);
    let mut success = false;

    for j in 0..schedule.total {
        let t = j * schedule.spacing_slots;
        let frame = build_frame(std::slice::from_ref(&process), t, &schedule);
        let Some(segment_index) = frame
            .segments
            .iter()
            .position(|s| s.map_or(false, |seg| seg.process == 0))
        else {
            // Stop-feedback reached the transmitter: nothing scheduled.
            break;
        };
        if process.state == ProcessState::Pending {
            process.origin_slot = Some(t - segment_index * schedule.spacing_slots);
            process.state = ProcessState::InFlight;
        }

        // Assemble the slot band: our segment's symbols, others idle.
        let mut band = vec![Complex64::new(0.0, 0.0); band_len];
        let start = segment_index * plan.res_per_segment;
        band[start..start + plan.res_per_segment].copy_from_slice(&segment_symbols);
        let received_band = transmit(&band, gains[t], plan.snr_db, &mut noise_rng);
        let received = &received_band[start..start + plan.res_per_segment];
        process.sent += 1;

        let mean_power = energy(received) / received.len() as f64;
        copies.push(ReceivedCopy {
            symbols: received.to_vec(),
            phase: copy_phase(plan, received),
            mean_power,
        });

        // The receiver decodes after each copy when a stop-feedback channel
        // exists; without one it waits for the full schedule.
        let receiver_done = matches!(process.state, ProcessState::Decoded { .. });
        let attempt_now = !receiver_done
            && (plan.feedback.is_some() || process.sent == schedule.total);
        if attempt_now {
            let combined = mrc_combine(&copies).expect("at least one copy");
            let summary = decode_combined(plan, &combined);
            success = summary.message.as_ref() == Some(&message);
            let outcome = DecodeOutcome {
                matches_truth: success,
                residual_fraction: summary.residual_fraction,
            };
            step_protocol(&mut process, &outcome, plan.feedback.as_ref(), t, &schedule);
        }
    }

    let transmissions = process.sent;
    let res_consumed = match cfg.reuse_mode {
        // Freed REs carry new data, so this codeword is charged only what it
        // used; otherwise its full R-share stays reserved.
        ReuseMode::NewData => transmissions * plan.res_per_segment,
        ReuseMode::ExtraRepetitions | ReuseMode::None => {
            schedule.total * plan.res_per_segment
        }
    };
    TrialRecord {
        success,
        transmissions,
        res_consumed,
    }
}

/// Runs the configured campaign: independent trials in deterministic chunks,
/// stopping early once the block-error budget is met.
pub fn run_campaign(config: &SimConfig) -> CliResult<SimResult> {
    let plan = CampaignPlan::new(config)?;
    let start = Instant::now();

    let mut records: Vec<TrialRecord> = Vec::new();
    let mut block_errors = 0u64;
    let mut next = 0u64;
    while next < config.trials {
        let hi = (next + CHUNK_TRIALS).min(config.trials);
        let chunk: Vec<TrialRecord> = (next..hi)
            .into_par_iter()
            .map(|i| run_trial(&plan, i))
            .collect();
        block_errors += chunk.iter().filter(|r| !r.success).count() as u64;
        records.extend(chunk);
        next = hi;
        if block_errors >= config.max_block_errors {
            break;
        }
    }

    let trials = records.len() as u64;
    let bler = block_errors as f64 / trials as f64;
    let bler_ci95 = 1.96 * (bler * (1.0 - bler) / trials as f64).sqrt();

    let mut tx_histogram = vec![0u64; config.repetitions];
    let mut total_tx = 0u64;
    let mut res_consumed = 0u64;
    let mut payload_delivered = 0u64;
    let k = config.info_bits as u64;
    for r in &records {
        tx_histogram[r.transmissions - 1] += 1;
        total_tx += r.transmissions as u64;
        res_consumed += r.res_consumed as u64;
        if r.success {
            payload_delivered += k;
        }
    }
    let bits_per_re = payload_delivered as f64 / res_consumed as f64;
    let throughput_bits_per_slot = bits_per_re * config.res_per_slot() as f64;

    let row = ResultRow {
        scheme: config.scheme.to_string(),
        n_prb: config.n_prb,
        info_bits: config.info_bits,
        l: config.l,
        alpha: config.alpha,
        l_prime: config.l_prime,
        repetitions: config.repetitions,
        t_r: config.t_r_slots,
        feedback: config.feedback_mode.to_string(),
        snr_db: plan.snr_db,
        trials,
        block_errors,
        bler,
        bler_ci95,
        throughput_bits_per_slot,
        avg_tx_per_codeword: total_tx as f64 / trials as f64,
        seed: config.seed,
    };
    Ok(SimResult {
        row,
        tx_histogram,
        gamma_info_bits: (1.0 - bler) * config.info_bits as f64,
        bits_per_re,
        wall_time_s: start.elapsed().as_secs_f64(),
        records,
    })
}

/// Runs one campaign per axis value. Values whose configuration cannot carry
/// the payload are skipped with a note on stderr, so mixed-feasibility sweeps
/// still produce the feasible rows.
pub fn sweep(template: &SimConfig, axis: &str, values: &[String]) -> CliResult<Vec<SimResult>> {
    // Surface unknown axis names as parameter errors up front.
    if !values.is_empty() {
        let mut probe = template.clone();
        probe.set(axis, values[0].trim())?;
    }
    let mut out = Vec::new();
    for value in values {
        let mut cfg = template.clone();
        cfg.set(axis, value.trim())?;
        match run_campaign(&cfg) {
            Ok(result) => out.push(result),
            Err(CliError::Capacity(msg)) => {
                eprintln!("sweep: skipping {axis}={value}: {msg}");
            }
            Err(other) => return Err(other),
        }
    }
    Ok(out)
}
