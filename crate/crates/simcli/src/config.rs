//! Simulation configuration: flat key-value text files, CLI overrides, and
//! the derived per-campaign geometry.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment; blank
//! lines are ignored. Unknown keys are rejected. The same key names are used
//! by `--override key=value` and as sweep axes.

use std::fmt;
use std::path::Path;

use zcqo_core::channel::{snr_from_budget, LinkBudget};
use zcqo_core::dictionary::{build_spec, DictionarySpec};
use zcqo_core::link::{FeedbackChannel, FeedbackMode, RepetitionSchedule};
use zcqo_core::mdc::{build_mdc, MdcConfig};
use zcqo_core::zc::largest_prime_leq;

use crate::{CliError, CliResult};

/// Transmission scheme under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Segmented single-sequence baseline.
    Mdc,
    /// Plain sparse superposition, full-correlation decoding.
    Ssc,
    /// Sparse superposition with embedded data-root indication.
    SscIndicated,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Mdc => "mdc",
            Scheme::Ssc => "ssc",
            Scheme::SscIndicated => "ssc_indicated",
        })
    }
}

/// Channel model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    /// Unit gain, AWGN only.
    Awgn,
    /// Flat Rician block fading with Doppler phase drift.
    Rician,
}

/// Stop-feedback configuration selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeedbackSetting {
    None,
    Genie,
    Threshold,
}

impl fmt::Display for FeedbackSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeedbackSetting::None => "none",
            FeedbackSetting::Genie => "genie",
            FeedbackSetting::Threshold => "threshold",
        })
    }
}

/// What freed resource elements are used for after an early stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReuseMode {
    /// Freed REs carry new codewords: throughput counts only consumed REs.
    NewData,
    /// Freed REs would fund extra repetitions elsewhere; accounted like
    /// `None` here since independent drops cannot transfer them.
    ExtraRepetitions,
    /// Freed REs stay reserved: every codeword is charged the full R share.
    None,
}

/// Full simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub n_prb: u32,
    pub info_bits: usize,
    pub l: usize,
    pub alpha: f64,
    pub l_prime: usize,
    pub mdc_segments: usize,

    pub channel: ChannelModel,
    pub cnr_db: f64,
    /// Direct per-RE SNR override; when set, the CNR budget is bypassed.
    pub snr_db: Option<f64>,
    pub snr_offset_db: f64,
    pub k_factor_db: f64,
    pub doppler_hz: f64,
    pub slot_ms: f64,
    pub seed: u64,

    pub repetitions: usize,
    pub t_r_slots: usize,
    pub feedback_mode: FeedbackSetting,
    pub feedback_delay_slots: usize,
    pub residual_threshold: f64,
    pub reuse_mode: ReuseMode,

    pub trials: u64,
    pub max_block_errors: u64,

    pub sc_per_prb: usize,
    pub os_per_slot: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scheme: Scheme::SscIndicated,
            n_prb: 2,
            info_bits: 28,
            l: 2,
            alpha: 0.5,
            l_prime: 7,
            mdc_segments: 2,
            channel: ChannelModel::Rician,
            cnr_db: -2.15,
            snr_db: None,
            snr_offset_db: 0.0,
            k_factor_db: 10.0,
            doppler_hz: 5.6,
            slot_ms: 1.0,
            seed: 1,
            repetitions: 1,
            t_r_slots: 4,
            feedback_mode: FeedbackSetting::None,
            feedback_delay_slots: 0,
            residual_threshold: 0.5,
            reuse_mode: ReuseMode::NewData,
            trials: 10_000,
            max_block_errors: 200,
            sc_per_prb: 12,
            os_per_slot: 14,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse '{value}' for key '{key}'")))
}

impl SimConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let v = value.trim();
        match key {
            "scheme" => {
                self.scheme = match v {
                    "mdc" => Scheme::Mdc,
                    "ssc" => Scheme::Ssc,
                    "ssc_indicated" => Scheme::SscIndicated,
                    _ => {
                        return Err(CliError::Config(format!(
                            "scheme '{v}' is not one of mdc|ssc|ssc_indicated"
                        )))
                    }
                }
            }
            "n_prb" => self.n_prb = parse_num(key, v)?,
            "info_bits" => self.info_bits = parse_num(key, v)?,
            "L" => self.l = parse_num(key, v)?,
            "alpha" => self.alpha = parse_num(key, v)?,
            "L_prime" => self.l_prime = parse_num(key, v)?,
            "mdc_segments" => self.mdc_segments = parse_num(key, v)?,
            "channel" => {
                self.channel = match v {
                    "awgn" => ChannelModel::Awgn,
                    "rician" => ChannelModel::Rician,
                    _ => {
                        return Err(CliError::Config(format!(
                            "channel '{v}' is not one of awgn|rician"
                        )))
                    }
                }
            }
            "cnr_db" => self.cnr_db = parse_num(key, v)?,
            "snr_db" => self.snr_db = Some(parse_num(key, v)?),
            "snr_offset_db" => self.snr_offset_db = parse_num(key, v)?,
            "k_factor_db" => self.k_factor_db = parse_num(key, v)?,
            "doppler_hz" => self.doppler_hz = parse_num(key, v)?,
            "slot_ms" => self.slot_ms = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "R" => self.repetitions = parse_num(key, v)?,
            "T_R_slots" => self.t_r_slots = parse_num(key, v)?,
            "feedback_mode" => {
                self.feedback_mode = match v {
                    "none" => FeedbackSetting::None,
                    "genie" => FeedbackSetting::Genie,
                    "threshold" => FeedbackSetting::Threshold,
                    _ => {
                        return Err(CliError::Config(format!(
                            "feedback_mode '{v}' is not one of none|genie|threshold"
                        )))
                    }
                }
            }
            "feedback_delay_slots" => self.feedback_delay_slots = parse_num(key, v)?,
            "residual_threshold" => self.residual_threshold = parse_num(key, v)?,
            "reuse_mode" => {
                self.reuse_mode = match v {
                    "new_data" => ReuseMode::NewData,
                    "extra_repetitions" => ReuseMode::ExtraRepetitions,
                    "none" => ReuseMode::None,
                    _ => {
                        return Err(CliError::Config(format!(
                            "reuse_mode '{v}' is not one of new_data|extra_repetitions|none"
                        )))
                    }
                }
            }
            "trials" => self.trials = parse_num(key, v)?,
            "max_block_errors" => self.max_block_errors = parse_num(key, v)?,
            "sc_per_prb" => self.sc_per_prb = parse_num(key, v)?,
            "os_per_slot" => self.os_per_slot = parse_num(key, v)?,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Parses the flat key-value grammar.
    pub fn from_text(text: &str) -> CliResult<Self> {
        let mut cfg = SimConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Applies `key=value` override strings in order.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> CliResult<()> {
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                CliError::Config(format!("override '{item}' is not key=value"))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Effective per-RE SNR: direct override or the CNR budget, plus offset.
    pub fn effective_snr_db(&self) -> f64 {
        let base = self.snr_db.unwrap_or_else(|| {
            snr_from_budget(&LinkBudget {
                cnr_db: self.cnr_db,
                n_prb: self.n_prb,
            })
        });
        base + self.snr_offset_db
    }

    /// Total REs in one slot over the allocated band.
    pub fn res_per_slot(&self) -> usize {
        self.n_prb as usize * self.sc_per_prb * self.os_per_slot
    }
}

/// Scheme-specific coding layout derived from a config.
#[derive(Debug, Clone)]
pub enum CodingPlan {
    Ssc { spec: DictionarySpec },
    Mdc { mdc: MdcConfig },
}

/// Everything a campaign needs, with capacity checked up front.
#[derive(Debug, Clone)]
pub struct CampaignPlan {
    pub config: SimConfig,
    pub coding: CodingPlan,
    /// REs available to one codeword transmission (one frame segment).
    pub res_per_segment: usize,
    pub schedule: RepetitionSchedule,
    pub feedback: Option<FeedbackChannel>,
    pub snr_db: f64,
}

impl CampaignPlan {
    /// Validates the configuration and builds the dictionary layout.
    pub fn new(config: &SimConfig) -> CliResult<Self> {
        if config.trials < 1 {
            return Err(CliError::Config("trials must be >= 1".to_string()));
        }
        if config.n_prb < 1 {
            return Err(CliError::Config("n_prb must be >= 1".to_string()));
        }
        let total = config.res_per_slot();
        let schedule = RepetitionSchedule::new(config.repetitions, config.t_r_slots)?;
        if total % config.repetitions != 0 {
            return Err(CliError::Config(format!(
                "{total} REs per slot do not divide into R={} segments",
                config.repetitions
            )));
        }
        let res_per_segment = total / config.repetitions;

        let coding = match config.scheme {
            Scheme::Mdc => CodingPlan::Mdc {
                mdc: build_mdc(res_per_segment, config.mdc_segments, config.info_bits)?,
            },
            Scheme::Ssc | Scheme::SscIndicated => {
                let p = largest_prime_leq(res_per_segment as u64)?;
                let spec = build_spec(p, config.l, config.info_bits)?;
                if config.scheme == Scheme::SscIndicated {
                    if !(config.alpha > 0.0 && config.alpha < 1.0) {
                        return Err(CliError::Config(format!(
                            "alpha={} outside (0, 1)",
                            config.alpha
                        )));
                    }
                    if config.l_prime < config.l {
                        return Err(CliError::Config(format!(
                            "L_prime={} below L={}",
                            config.l_prime, config.l
                        )));
                    }
                }
                CodingPlan::Ssc { spec }
            }
        };

        let feedback = match config.feedback_mode {
            FeedbackSetting::None => None,
            FeedbackSetting::Genie => Some(FeedbackChannel {
                delay_slots: config.feedback_delay_slots,
                mode: FeedbackMode::Genie,
            }),
            FeedbackSetting::Threshold => Some(FeedbackChannel {
                delay_slots: config.feedback_delay_slots,
                mode: FeedbackMode::ResidualThreshold(config.residual_threshold),
            }),
        };

        Ok(CampaignPlan {
            config: config.clone(),
            coding,
            res_per_segment,
            schedule,
            feedback,
            snr_db: config.effective_snr_db(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_grammar() {
        let text = "\
# comparison point
scheme = ssc_indicated
n_prb = 2
info_bits = 28   # feasible at P=331
L = 2
alpha = 0.5
L_prime = 7
channel = awgn
snr_db = -6.0
seed = 7
R = 2
T_R_slots = 4
feedback_mode = genie
";
        let cfg = SimConfig::from_text(text).unwrap();
        assert_eq!(cfg.scheme, Scheme::SscIndicated);
        assert_eq!(cfg.info_bits, 28);
        assert_eq!(cfg.snr_db, Some(-6.0));
        assert_eq!(cfg.repetitions, 2);
        assert_eq!(cfg.feedback_mode, FeedbackSetting::Genie);
        assert_eq!(cfg.effective_snr_db(), -6.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(SimConfig::from_text("bogus = 1").is_err());
        assert!(SimConfig::from_text("n_prb = many").is_err());
        assert!(SimConfig::from_text("scheme = qam").is_err());
        assert!(SimConfig::from_text("n_prb 2").is_err());
    }

    #[test]
    fn overrides_apply_in_order() {
        let mut cfg = SimConfig::default();
        cfg.apply_overrides(&["seed=5".to_string(), "seed=9".to_string()])
            .unwrap();
        assert_eq!(cfg.seed, 9);
        assert!(cfg.apply_overrides(&["nope".to_string()]).is_err());
    }

    #[test]
    fn budget_flows_into_effective_snr() {
        let mut cfg = SimConfig::default();
        cfg.cnr_db = -2.15;
        cfg.n_prb = 80;
        cfg.snr_db = None;
        cfg.snr_offset_db = 1.0;
        assert!((cfg.effective_snr_db() - (-20.18)).abs() < 0.01);
    }

    #[test]
    fn plan_checks_capacity_before_running() {
        let mut cfg = SimConfig::default();
        cfg.scheme = Scheme::Ssc;
        cfg.n_prb = 2;
        cfg.info_bits = 32; // infeasible at P=331 with L=2
        cfg.l = 2;
        match CampaignPlan::new(&cfg) {
            Err(CliError::Capacity(_)) => {}
            other => panic!("expected capacity error, got {other:?}"),
        }
        cfg.info_bits = 28;
        assert!(CampaignPlan::new(&cfg).is_ok());
    }

    #[test]
    fn plan_derives_segment_geometry() {
        let mut cfg = SimConfig::default();
        cfg.scheme = Scheme::SscIndicated;
        cfg.repetitions = 2;
        cfg.info_bits = 24;
        let plan = CampaignPlan::new(&cfg).unwrap();
        assert_eq!(cfg.res_per_slot(), 336);
        assert_eq!(plan.res_per_segment, 168);
        match &plan.coding {
            CodingPlan::Ssc { spec } => assert_eq!(spec.p(), 167),
            _ => panic!("wrong plan"),
        }
    }
}
