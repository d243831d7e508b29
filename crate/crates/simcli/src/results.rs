//! Result records and machine-readable emission.
//!
//! The CSV schema is fixed; JSON mirrors the same fields so that
//! `parse(emit(x)) == x` holds for the JSON path.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// Exact CSV header emitted (and required when parsing back).
pub const CSV_HEADER: &str = "scheme,n_prb,K,L,alpha,L_prime,R,T_R,feedback,snr_db,trials,\
block_errors,bler,bler_ci95,throughput_bits_per_slot,avg_tx_per_codeword,seed";

/// One campaign's result line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: String,
    pub n_prb: u32,
    #[serde(rename = "K")]
    pub info_bits: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub alpha: f64,
    #[serde(rename = "L_prime")]
    pub l_prime: usize,
    #[serde(rename = "R")]
    pub repetitions: usize,
    #[serde(rename = "T_R")]
    pub t_r: usize,
    pub feedback: String,
    pub snr_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub bler_ci95: f64,
    pub throughput_bits_per_slot: f64,
    pub avg_tx_per_codeword: f64,
    pub seed: u64,
}

impl ResultRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.n_prb,
            self.info_bits,
            self.l,
            self.alpha,
            self.l_prime,
            self.repetitions,
            self.t_r,
            self.feedback,
            self.snr_db,
            self.trials,
            self.block_errors,
            self.bler,
            self.bler_ci95,
            self.throughput_bits_per_slot,
            self.avg_tx_per_codeword,
            self.seed
        )
    }
}

/// Per-trial outcome record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub success: bool,
    pub transmissions: usize,
    /// REs charged to this codeword under the configured reuse policy.
    pub res_consumed: usize,
}

/// Aggregated campaign outcome.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub row: ResultRow,
    /// Histogram of transmissions used per codeword, index = count - 1.
    pub tx_histogram: Vec<u64>,
    /// Paper-style throughput `(1 - BLER) * N_info` in bits per codeword.
    pub gamma_info_bits: f64,
    /// Successful payload bits per RE actually charged.
    pub bits_per_re: f64,
    pub wall_time_s: f64,
    /// Raw per-trial records, in trial order.
    pub records: Vec<TrialRecord>,
}

/// Output format for result emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Chooses a format from a file extension, defaulting to CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

/// Writes campaign rows in the requested format.
pub fn emit_results(
    results: &[SimResult],
    format: OutputFormat,
    writer: &mut impl Write,
) -> CliResult<()> {
    if results.iter().any(|r| r.row.trials == 0) {
        return Err(CliError::Config(
            "refusing to emit BLER for a zero-trial campaign".to_string(),
        ));
    }
    let rows: Vec<&ResultRow> = results.iter().map(|r| &r.row).collect();
    match format {
        OutputFormat::Csv => {
            writeln!(writer, "{CSV_HEADER}")?;
            for row in rows {
                writeln!(writer, "{}", row.csv_line())?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *writer, &rows)
                .map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

/// Parses rows back from the JSON emission.
pub fn parse_json_rows(text: &str) -> CliResult<Vec<ResultRow>> {
    serde_json::from_str(text).map_err(|e| CliError::Io(e.to_string()))
}
