//! Multi-codeword framing, repetition combining, and the stop-feedback
//! protocol.
//!
//! Each slot carries a wideband frame of `R` equal segments. A codeword first
//! transmitted in segment 0 at slot `t` is repeated in segment `j` at slot
//! `t + j*T_R`, so one lookup rule places every in-flight codeword: segment
//! `j` of slot `t` belongs to the codeword whose schedule originates at
//! `t - j*T_R`. When a stop-feedback event frees a segment, the next pending
//! codeword is born into it and inherits the remaining tail of that
//! position's schedule.
//!
//! Repetitions of one codeword are combined by maximum ratio combining using
//! the per-copy coarse phase estimate and measured received power. A single
//! stop-feedback message (not ACK/NACK) halts the remaining scheduled
//! repetitions once decoding succeeds; with a feedback delay, repetitions
//! already due before the stop becomes effective are still sent.

use num_complex::Complex;

use crate::{Complex64, Error, Result};

/// `R` transmissions per codeword, `T_R` slots apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepetitionSchedule {
    pub total: usize,
    pub spacing_slots: usize,
}

impl RepetitionSchedule {
    pub fn new(total: usize, spacing_slots: usize) -> Result<Self> {
        if total < 1 || spacing_slots < 1 {
            return Err(Error::parameter(format!(
                "repetition schedule R={total}, T_R={spacing_slots} must both be >= 1"
            )));
        }
        Ok(RepetitionSchedule {
            total,
            spacing_slots,
        })
    }
}

/// One received copy of a codeword segment.
#[derive(Debug, Clone)]
pub struct ReceivedCopy {
    pub symbols: Vec<Complex64>,
    /// Coarse channel phase estimate for this copy, radians.
    pub phase: f64,
    /// Measured mean received power of this copy.
    pub mean_power: f64,
}

/// Lifecycle of one codeword.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessState {
    /// Created, waiting for a free segment.
    Pending,
    /// Transmitting according to its schedule.
    InFlight,
    /// Successfully decoded; the transmitter stops once the feedback lands.
    Decoded {
        decoded_at: usize,
        stop_effective: usize,
    },
    /// All scheduled transmissions used without a successful decode.
    Failed,
}

/// Transmitter/receiver state for one codeword.
#[derive(Debug, Clone)]
pub struct CodewordProcess {
    pub id: u64,
    /// Slot where this codeword's schedule originates. A codeword born into
    /// segment `j` at slot `t` has origin `t - j*T_R`; its first actual
    /// transmission is then position `j`, and it gets the remaining
    /// `R - j` transmissions of that position track.
    pub origin_slot: Option<usize>,
    /// Actual transmissions performed so far.
    pub sent: usize,
    pub state: ProcessState,
    pub copies: Vec<ReceivedCopy>,
}

impl CodewordProcess {
    pub fn new(id: u64) -> Self {
        CodewordProcess {
            id,
            origin_slot: None,
            sent: 0,
            state: ProcessState::Pending,
            copies: Vec::new(),
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.state, ProcessState::Decoded { .. } | ProcessState::Failed)
    }

    /// Whether the transmitter still sends a copy due at `slot`.
    pub fn should_transmit(&self, slot: usize) -> bool {
        match self.state {
            ProcessState::InFlight => true,
            ProcessState::Decoded { stop_effective, .. } => slot <= stop_effective,
            ProcessState::Pending | ProcessState::Failed => false,
        }
    }
}

/// How the receiver decides that decoding succeeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeedbackMode {
    /// Compare the decoded message against the transmitted truth.
    Genie,
    /// Declare success when residual energy / total energy falls below tau.
    ResidualThreshold(f64),
}

/// Stop-feedback link: detection mode plus the slots the message needs to
/// reach the transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackChannel {
    pub delay_slots: usize,
    pub mode: FeedbackMode,
}

/// Segment assignment inside one slot's frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSegment {
    /// Index into the queue passed to [`build_frame`].
    pub process: usize,
    /// 0-based copy number this transmission represents.
    pub transmission_index: usize,
}

/// The wideband multi-codeword frame of one slot: `R` segments, possibly
/// empty where nothing is scheduled and no pending codeword exists.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCodewordFrame {
    pub slot: usize,
    pub segments: Vec<Option<FrameSegment>>,
}

/// Assembles the frame for slot `t`.
///
/// Segment `j` carries the in-flight codeword whose schedule originates at
/// `t - j*T_R`; segments left free (never scheduled, or freed by a stop)
/// are filled with pending codewords from the queue in order, which start
/// their schedules in that position.
pub fn build_frame(
    queue: &[CodewordProcess],
    t: usize,
    schedule: &RepetitionSchedule,
) -> MultiCodewordFrame {
    let mut segments: Vec<Option<FrameSegment>> = vec![None; schedule.total];
    for (j, slot_seg) in segments.iter_mut().enumerate() {
        let offset = j * schedule.spacing_slots;
        if offset > t {
            continue;
        }
        let origin = t - offset;
        if let Some(pi) = queue.iter().position(|p| {
            p.origin_slot == Some(origin) && p.sent == j && p.should_transmit(t)
        }) {
            *slot_seg = Some(FrameSegment {
                process: pi,
                transmission_index: queue[pi].sent,
            });
        }
    }
    // Fill freed/unused segments with pending codewords, in queue order.
    let mut pending = queue
        .iter()
        .enumerate()
        .filter(|(_, p)| p.state == ProcessState::Pending)
        .map(|(i, _)| i);
    for slot_seg in segments.iter_mut() {
        if slot_seg.is_none() {
            if let Some(pi) = pending.next() {
                *slot_seg = Some(FrameSegment {
                    process: pi,
                    transmission_index: 0,
                });
            }
        }
    }
    MultiCodewordFrame { slot: t, segments }
}

/// Maximum ratio combining of repeated receptions: each copy is rotated by
/// its estimated phase and weighted by the square root of its measured
/// received power (equal noise variance across copies), with the weights
/// normalized to sum to one.
pub fn mrc_combine(copies: &[ReceivedCopy]) -> Result<Vec<Complex64>> {
    let first = copies
        .first()
        .ok_or_else(|| Error::parameter("cannot combine zero copies".to_string()))?;
    let len = first.symbols.len();
    if copies.iter().any(|c| c.symbols.len() != len) {
        return Err(Error::parameter("copies have mismatched lengths".to_string()));
    }
    let mut weights: Vec<f64> = copies.iter().map(|c| c.mean_power.max(0.0).sqrt()).collect();
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in &mut weights {
            *w /= total;
        }
    } else {
        weights.fill(1.0 / copies.len() as f64);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (copy, w) in copies.iter().zip(&weights) {
        let rot = Complex::from_polar(*w, -copy.phase);
        for (o, y) in out.iter_mut().zip(&copy.symbols) {
            *o += rot * y;
        }
    }
    Ok(out)
}

/// What the receiver observed for one decode attempt.
#[derive(Debug, Clone, Copy)]
pub struct DecodeOutcome {
    /// Decoded message equals the transmitted one (known to the genie).
    pub matches_truth: bool,
    /// Residual energy left by the decoder, as a fraction of total energy.
    pub residual_fraction: f64,
}

/// Protocol decision after a decode attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolEvent {
    /// Keep transmitting per the schedule.
    Continue,
    /// Stop-feedback sent; transmissions due after `effective_slot` are
    /// suppressed.
    Stopped { effective_slot: usize },
    /// Schedule exhausted without success: block error.
    Exhausted,
}

/// Advances one codeword's protocol state after a decode attempt at slot `t`.
///
/// Success is judged per the feedback mode; without a feedback channel the
/// transmitter is never stopped and the codeword runs its full schedule.
/// After the last scheduled transmission fails, the process is terminal.
pub fn step_protocol(
    process: &mut CodewordProcess,
    outcome: &DecodeOutcome,
    feedback: Option<&FeedbackChannel>,
    t: usize,
    schedule: &RepetitionSchedule,
) -> ProtocolEvent {
    debug_assert!(!process.is_terminal(), "stepping a terminal process");
    debug_assert!(process.sent >= 1, "decode before any transmission");

    let success = match feedback {
        Some(fb) => match fb.mode {
            FeedbackMode::Genie => outcome.matches_truth,
            FeedbackMode::ResidualThreshold(tau) => outcome.residual_fraction < tau,
        },
        None => false,
    };
    if success {
        let delay = feedback.expect("checked above").delay_slots;
        process.state = ProcessState::Decoded {
            decoded_at: t,
            stop_effective: t + delay,
        };
        return ProtocolEvent::Stopped {
            effective_slot: t + delay,
        };
    }
    // Next transmission would sit at position (t - origin)/T_R + 1.
    let origin = process.origin_slot.expect("in-flight process has an origin");
    let position = (t - origin) / schedule.spacing_slots;
    if position + 1 >= schedule.total {
        process.state = ProcessState::Failed;
        ProtocolEvent::Exhausted
    } else {
        ProtocolEvent::Continue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sched(r: usize, t_r: usize) -> RepetitionSchedule {
        RepetitionSchedule::new(r, t_r).unwrap()
    }

    fn in_flight(id: u64, origin: usize, sent: usize) -> CodewordProcess {
        CodewordProcess {
            id,
            origin_slot: Some(origin),
            sent,
            state: ProcessState::InFlight,
            copies: Vec::new(),
        }
    }

    #[test]
    fn frame_r1_is_current_codeword_only() {
        let queue = vec![CodewordProcess::new(0)];
        let frame = build_frame(&queue, 5, &sched(1, 4));
        assert_eq!(frame.segments.len(), 1);
        assert_eq!(
            frame.segments[0],
            Some(FrameSegment {
                process: 0,
                transmission_index: 0
            })
        );
    }

    #[test]
    fn frame_r2_carries_current_and_lagged_codeword() {
        // Slot 4: segment 0 takes the fresh codeword, segment 1 repeats the
        // codeword whose schedule started at slot 0.
        let queue = vec![in_flight(0, 0, 1), CodewordProcess::new(1)];
        let frame = build_frame(&queue, 4, &sched(2, 4));
        assert_eq!(
            frame.segments,
            vec![
                Some(FrameSegment {
                    process: 1,
                    transmission_index: 0
                }),
                Some(FrameSegment {
                    process: 0,
                    transmission_index: 1
                }),
            ]
        );
    }

    #[test]
    fn frame_reuses_freed_segment_for_new_codeword() {
        // The lagged codeword was decoded with immediate feedback, so its
        // segment is handed to the next pending codeword.
        let mut decoded = in_flight(0, 0, 1);
        decoded.state = ProcessState::Decoded {
            decoded_at: 0,
            stop_effective: 0,
        };
        let queue = vec![decoded, CodewordProcess::new(1), CodewordProcess::new(2)];
        let frame = build_frame(&queue, 4, &sched(2, 4));
        assert_eq!(
            frame.segments,
            vec![
                Some(FrameSegment {
                    process: 1,
                    transmission_index: 0
                }),
                Some(FrameSegment {
                    process: 2,
                    transmission_index: 0
                }),
            ]
        );
    }

    #[test]
    fn frame_leaves_segment_empty_without_pending() {
        let queue = vec![in_flight(0, 4, 0)];
        let frame = build_frame(&queue, 4, &sched(2, 4));
        assert_eq!(
            frame.segments,
            vec![
                Some(FrameSegment {
                    process: 0,
                    transmission_index: 0
                }),
                None,
            ]
        );
    }

    #[test]
    fn mrc_single_copy_is_identity() {
        let y: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let combined = mrc_combine(&[ReceivedCopy {
            symbols: y.clone(),
            phase: 0.0,
            mean_power: 2.0,
        }])
        .unwrap();
        for (a, b) in combined.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(mrc_combine(&[]).is_err());
    }

    #[test]
    fn mrc_compensates_opposed_phases() {
        let y: Vec<Complex64> = (0..8)
            .map(|k| Complex::from_polar(1.0, 0.7 * k as f64))
            .collect();
        let flipped: Vec<Complex64> = y.iter().map(|v| -v).collect();
        let combined = mrc_combine(&[
            ReceivedCopy {
                symbols: y.clone(),
                phase: 0.0,
                mean_power: 1.0,
            },
            ReceivedCopy {
                symbols: flipped,
                phase: std::f64::consts::PI,
                mean_power: 1.0,
            },
        ])
        .unwrap();
        for (a, b) in combined.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mrc_equal_copies_reduce_to_mean() {
        let a: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, -1.0)).collect();
        let b: Vec<Complex64> = (0..8).map(|k| Complex64::new(1.0, k as f64)).collect();
        let combined = mrc_combine(&[
            ReceivedCopy {
                symbols: a.clone(),
                phase: 0.0,
                mean_power: 3.0,
            },
            ReceivedCopy {
                symbols: b.clone(),
                phase: 0.0,
                mean_power: 3.0,
            },
        ])
        .unwrap();
        for k in 0..8 {
            assert!((combined[k] - (a[k] + b[k]) / 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn mrc_two_equal_snr_copies_gain_3db() {
        // Monte-Carlo estimate of the post-combining SNR against the known
        // 3 dB analytic gain for two equal-SNR copies.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 64;
        let signal: Vec<Complex64> = (0..n)
            .map(|k| Complex::from_polar(1.0, 0.11 * k as f64 * k as f64))
            .collect();
        let snr_db = 3.0;
        let mut pre = 0.0;
        let mut post = 0.0;
        let trials = 10_000;
        for _ in 0..trials {
            let copies: Vec<ReceivedCopy> = (0..2)
                .map(|_| {
                    let y = crate::channel::transmit(
                        &signal,
                        Complex64::new(1.0, 0.0),
                        snr_db,
                        &mut rng,
                    );
                    let mean_power = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
                    ReceivedCopy {
                        symbols: y,
                        phase: 0.0,
                        mean_power,
                    }
                })
                .collect();
            let noise_of = |y: &[Complex64], scale: f64| -> f64 {
                y.iter()
                    .zip(&signal)
                    .map(|(a, b)| (a - scale * b).norm_sqr())
                    .sum::<f64>()
                    / n as f64
            };
            pre += noise_of(&copies[0].symbols, 1.0) / trials as f64;
            let combined = mrc_combine(&copies).unwrap();
            post += noise_of(&combined, 1.0) / trials as f64;
        }
        let gain_db = 10.0 * (pre / post).log10();
        assert!(
            (gain_db - 3.0).abs() < 0.3,
            "MRC gain {gain_db} dB, expected 3 +/- 0.3"
        );
    }

    #[test]
    fn protocol_stop_with_zero_delay_suppresses_repetition() {
        let mut p = in_flight(0, 10, 1);
        let fb = FeedbackChannel {
            delay_slots: 0,
            mode: FeedbackMode::Genie,
        };
        let outcome = DecodeOutcome {
            matches_truth: true,
            residual_fraction: 0.9,
        };
        let event = step_protocol(&mut p, &outcome, Some(&fb), 10, &sched(2, 4));
        assert_eq!(event, ProtocolEvent::Stopped { effective_slot: 10 });
        assert!(!p.should_transmit(14), "repetition must be suppressed");
    }

    #[test]
    fn protocol_late_feedback_sends_repetition_anyway() {
        let mut p = in_flight(0, 10, 1);
        let fb = FeedbackChannel {
            delay_slots: 4,
            mode: FeedbackMode::Genie,
        };
        let outcome = DecodeOutcome {
            matches_truth: true,
            residual_fraction: 0.9,
        };
        step_protocol(&mut p, &outcome, Some(&fb), 10, &sched(2, 4));
        assert!(p.should_transmit(14), "feedback arrives too late to stop");
        assert!(!p.should_transmit(18));
    }

    #[test]
    fn protocol_exhausts_after_r_failures() {
        let mut p = in_flight(0, 10, 1);
        let fb = FeedbackChannel {
            delay_slots: 0,
            mode: FeedbackMode::Genie,
        };
        let outcome = DecodeOutcome {
            matches_truth: false,
            residual_fraction: 0.9,
        };
        assert_eq!(
            step_protocol(&mut p, &outcome, Some(&fb), 10, &sched(2, 4)),
            ProtocolEvent::Continue
        );
        p.sent = 2;
        assert_eq!(
            step_protocol(&mut p, &outcome, Some(&fb), 14, &sched(2, 4)),
            ProtocolEvent::Exhausted
        );
        assert_eq!(p.state, ProcessState::Failed);
    }

    #[test]
    fn protocol_threshold_mode_uses_residual() {
        let mut p = in_flight(0, 0, 1);
        let fb = FeedbackChannel {
            delay_slots: 0,
            mode: FeedbackMode::ResidualThreshold(0.2),
        };
        let stop = DecodeOutcome {
            matches_truth: false,
            residual_fraction: 0.1,
        };
        assert!(matches!(
            step_protocol(&mut p, &stop, Some(&fb), 0, &sched(2, 4)),
            ProtocolEvent::Stopped { .. }
        ));

        let mut p = in_flight(0, 0, 1);
        let keep = DecodeOutcome {
            matches_truth: true,
            residual_fraction: 0.5,
        };
        assert_eq!(
            step_protocol(&mut p, &keep, Some(&fb), 0, &sched(2, 4)),
            ProtocolEvent::Continue
        );
    }

    #[test]
    fn protocol_without_feedback_never_stops() {
        let mut p = in_flight(0, 0, 1);
        let outcome = DecodeOutcome {
            matches_truth: true,
            residual_fraction: 0.0,
        };
        assert_eq!(
            step_protocol(&mut p, &outcome, None, 0, &sched(2, 4)),
            ProtocolEvent::Continue
        );
        assert!(p.should_transmit(4));
    }

    #[test]
    fn schedule_validation() {
        assert!(RepetitionSchedule::new(0, 1).is_err());
        assert!(RepetitionSchedule::new(1, 0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r: usize = rng.gen_range(1..5);
        assert!(RepetitionSchedule::new(r, 4).is_ok());
    }
}
