//! SSC codeword construction and decoding.
//!
//! Encoding superposes `L` cyclically shifted ZC data sequences scaled by
//! `1/sqrt(L)`. With embedded indication, each data sequence additionally
//! contributes an indicator: the reserved-root sequence cyclically shifted by
//! the data root index, with transmit power split `alpha` (data) versus
//! `1 - alpha` (indicators).
//!
//! Two decoders are provided. [`decode_full_correlation`] is the reference
//! single-pass decoder: non-coherent per-section argmax over all section
//! columns. [`decode_with_indication`] first detects candidate data roots from
//! the indicator correlations, then for every section-compatible root subset
//! estimates the global channel phase, cancels the indicators, coherently
//! detects and cancels the data sequences, and finally keeps the candidate
//! leaving the smallest residual energy.

use std::collections::HashMap;

use num_complex::Complex;

use crate::dictionary::{
    map_message, unmap_selection, DictionarySpec, Message, RootShift, SparseSelection,
};
use crate::zc::{self, ZcRoot};
use crate::{Complex64, Error, Result};

/// SSC codeword of `P` complex symbols.
#[derive(Debug, Clone)]
pub struct Codeword {
    pub symbols: Vec<Complex64>,
    /// Power split between data and indicator sequences; 1 means no indicator.
    pub alpha: f64,
}

/// How a codeword was fitted to the resource-element budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMatchMode {
    /// `M >= P`: cyclic extension, `symbols[k] = codeword[k mod P]`.
    Extended,
    /// `M < P`: tail puncturing, first `M` codeword symbols.
    Punctured,
}

/// Codeword after puncturing/extension to `M` resource elements.
#[derive(Debug, Clone)]
pub struct RateMatchedWord {
    pub symbols: Vec<Complex64>,
    pub codeword_len: usize,
    pub mode: RateMatchMode,
}

/// OFDM resource grid, `n_sc` subcarriers by `n_os` symbols, frequency-first.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    n_sc: usize,
    n_os: usize,
    symbols: Vec<Complex64>,
}

impl ResourceGrid {
    pub fn n_sc(&self) -> usize {
        self.n_sc
    }

    pub fn n_os(&self) -> usize {
        self.n_os
    }

    /// Element at (subcarrier, OFDM symbol).
    pub fn at(&self, sc: usize, os: usize) -> Complex64 {
        self.symbols[os * self.n_sc + sc]
    }
}

/// Decoder knobs for the embedded-indication procedure.
#[derive(Debug, Clone, Copy)]
pub struct DecoderConfig {
    /// Indicator-shift candidates retained, `L' >= L`.
    pub l_prime: usize,
    /// Power split assumed at the transmitter.
    pub alpha: f64,
    /// Guard against accidentally huge inputs.
    pub max_len: usize,
}

impl DecoderConfig {
    pub fn new(l_prime: usize, alpha: f64) -> Self {
        DecoderConfig {
            l_prime,
            alpha,
            max_len: 8192,
        }
    }
}

/// Decoder output.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// Recovered message, or `None` on decode failure (counted as block error).
    pub message: Option<Message>,
    /// The winning column selection, when one exists.
    pub selection: Option<SparseSelection>,
    /// Unnormalized global channel estimate; only its phase is meaningful.
    pub channel_estimate: Complex64,
    /// Received energy left after cancelling all detected sequences.
    pub residual_energy: f64,
    /// Root-subset candidates evaluated.
    pub candidates_examined: usize,
    /// All-shift correlation passes performed.
    pub correlations_used: usize,
}

/// Builds the shifted data sequence `z_root(. + shift)`.
fn shifted_sequence(p: u64, root: u64, shift: usize) -> Vec<Complex64> {
    let seq = zc::zc_sequence(ZcRoot::new(p, root).expect("validated root"));
    let p = p as usize;
    (0..p).map(|k| seq[(k + shift) % p]).collect()
}

/// Encodes a message: `c[k] = 1/sqrt(L) * sum_l z_{r_l}(k + s_l mod P)`.
pub fn encode(spec: &DictionarySpec, message: &Message) -> Result<Codeword> {
    let selection = map_message(spec, message)?;
    let p = spec.p() as usize;
    let scale = 1.0 / (spec.l() as f64).sqrt();
    let mut symbols = vec![Complex64::new(0.0, 0.0); p];
    for pair in &selection.pairs {
        let seq = shifted_sequence(spec.p(), pair.root, pair.shift);
        for (c, z) in symbols.iter_mut().zip(&seq) {
            *c += scale * z;
        }
    }
    Ok(Codeword { symbols, alpha: 1.0 })
}

/// Encodes with embedded data-root indication:
/// `c[k] = 1/sqrt(L) * sum_l [sqrt(alpha) z_{r_l}(k+s_l) + sqrt(1-alpha) z_rbar(k+r_l)]`.
///
/// The indicator for data sequence `l` is the reserved-root sequence shifted
/// by the data root index `r_l`.
pub fn encode_with_indication(
    spec: &DictionarySpec,
    message: &Message,
    alpha: f64,
) -> Result<Codeword> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::parameter(format!(
            "power split alpha={alpha} outside (0, 1)"
        )));
    }
    let selection = map_message(spec, message)?;
    let p = spec.p() as usize;
    let scale = 1.0 / (spec.l() as f64).sqrt();
    let data_amp = scale * alpha.sqrt();
    let ind_amp = scale * (1.0 - alpha).sqrt();
    let mut symbols = vec![Complex64::new(0.0, 0.0); p];
    for pair in &selection.pairs {
        let data = shifted_sequence(spec.p(), pair.root, pair.shift);
        let indicator = shifted_sequence(spec.p(), spec.indicator_root(), pair.root as usize);
        for k in 0..p {
            symbols[k] += data_amp * data[k] + ind_amp * indicator[k];
        }
    }
    Ok(Codeword { symbols, alpha })
}

/// Fits a codeword to `m` resource elements by cyclic extension or tail
/// puncturing.
pub fn rate_match(codeword: &Codeword, m: usize) -> RateMatchedWord {
    assert!(m >= 1, "resource element count must be positive");
    let p = codeword.symbols.len();
    if m >= p {
        RateMatchedWord {
            symbols: (0..m).map(|k| codeword.symbols[k % p]).collect(),
            codeword_len: p,
            mode: RateMatchMode::Extended,
        }
    } else {
        RateMatchedWord {
            symbols: codeword.symbols[..m].to_vec(),
            codeword_len: p,
            mode: RateMatchMode::Punctured,
        }
    }
}

/// Inverse of [`rate_match`]: extension copies add coherently (the channel is
/// constant over a codeword), punctured positions are zero-filled.
pub fn derate_match(received: &[Complex64], p: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p];
    for (i, y) in received.iter().enumerate() {
        out[i % p] += y;
    }
    out
}

/// Places rate-matched symbols on the grid in frequency-first order: symbol
/// `i` goes to subcarrier `i mod N_SC`, OFDM symbol `floor(i / N_SC)`.
pub fn map_to_grid(word: &RateMatchedWord, n_sc: usize, n_os: usize) -> Result<ResourceGrid> {
    if n_sc * n_os != word.symbols.len() {
        return Err(Error::parameter(format!(
            "grid {n_sc}x{n_os} does not hold {} symbols",
            word.symbols.len()
        )));
    }
    Ok(ResourceGrid {
        n_sc,
        n_os,
        symbols: word.symbols.clone(),
    })
}

/// Reads the grid back in frequency-first order. Exact inverse of
/// [`map_to_grid`].
pub fn grid_to_vector(grid: &ResourceGrid) -> Vec<Complex64> {
    grid.symbols.clone()
}

/// Correlation engine shared by both decoders. Caches per-root reference
/// spectra (large `P`) or time-domain references (small `P`) and counts
/// all-shift passes for the complexity contract.
struct Correlator {
    p: u64,
    references: HashMap<u64, Vec<Complex64>>,
    calls: usize,
}

impl Correlator {
    fn new(p: u64) -> Self {
        Correlator {
            p,
            references: HashMap::new(),
            calls: 0,
        }
    }

    fn correlate(&mut self, received: &[Complex64], root: u64) -> Vec<Complex64> {
        self.calls += 1;
        let p = self.p;
        let use_direct = (p as usize) <= zc::DIRECT_CORRELATION_MAX;
        let reference = self.references.entry(root).or_insert_with(|| {
            let seq = zc::zc_sequence(ZcRoot::new(p, root).expect("validated root"));
            if use_direct {
                seq
            } else {
                zc::reference_spectrum(&seq)
            }
        });
        if use_direct {
            zc::correlate_direct(received, reference)
        } else {
            zc::correlate_with_spectrum(received, reference)
        }
    }
}

/// Correlations of `y` against every cyclic shift of one dictionary root;
/// entry `s` is the full-dictionary correlation of column `(root, s)`.
pub fn section_correlations(
    spec: &DictionarySpec,
    received: &[Complex64],
    root: u64,
) -> Result<Vec<Complex64>> {
    if !spec.is_data_root(root) {
        return Err(Error::parameter(format!("{root} is not a data root")));
    }
    zc::correlate_all_shifts(received, ZcRoot::new(spec.p(), root)?)
}

fn check_received(spec: &DictionarySpec, received: &[Complex64]) -> Result<()> {
    if received.len() != spec.p() as usize {
        return Err(Error::parameter(format!(
            "received length {} does not match P={}",
            received.len(),
            spec.p()
        )));
    }
    Ok(())
}

/// Reference decoder: per-section non-coherent argmax over all section
/// columns, computed one orthogonal subset (root) at a time.
pub fn decode_full_correlation(
    spec: &DictionarySpec,
    received: &[Complex64],
) -> Result<DecodeResult> {
    check_received(spec, received)?;
    let p = spec.p();
    let mut correlator = Correlator::new(p);
    let mut pairs = Vec::with_capacity(spec.l());
    for section in 0..spec.l() {
        let mut best: Option<(f64, RootShift)> = None;
        for root_offset in 0..spec.roots_per_section() {
            let root = spec.first_root(section) + root_offset;
            let xi = correlator.correlate(received, root);
            let valid = spec.valid_shifts(root)?;
            for (shift, v) in xi.iter().take(valid).enumerate() {
                let mag = v.norm();
                if best.map_or(true, |(b, _)| mag > b) {
                    best = Some((mag, RootShift { root, shift }));
                }
            }
        }
        pairs.push(best.expect("sections are non-empty").1);
    }

    // Least-squares amplitudes of the winning columns, for the informational
    // channel estimate and the residual.
    let mut residual = received.to_vec();
    let mut amp_sum = Complex64::new(0.0, 0.0);
    for pair in &pairs {
        let seq = shifted_sequence(p, pair.root, pair.shift);
        let a = zc::inner_product(&residual, &seq) / p as f64;
        amp_sum += a;
        for (r, z) in residual.iter_mut().zip(&seq) {
            *r -= a * z;
        }
    }
    let channel_estimate = amp_sum / (spec.l() as f64).sqrt();

    let selection = SparseSelection { pairs };
    let message = unmap_selection(spec, &selection).ok();
    Ok(DecodeResult {
        message,
        selection: Some(selection),
        channel_estimate,
        residual_energy: zc::energy(&residual),
        candidates_examined: 1,
        correlations_used: correlator.calls,
    })
}

fn indicator_detections(
    spec: &DictionarySpec,
    received: &[Complex64],
    l_prime: usize,
    correlator: &mut Correlator,
) -> Vec<(usize, Complex64)> {
    let xi = correlator.correlate(received, spec.indicator_root());
    let mut detections: Vec<(usize, Complex64)> = xi
        .into_iter()
        .enumerate()
        .filter(|(shift, _)| spec.is_data_root(*shift as u64))
        .collect();
    detections.sort_by(|a, b| {
        b.1.norm()
            .total_cmp(&a.1.norm())
            .then_with(|| a.0.cmp(&b.0))
    });
    detections.truncate(l_prime);
    detections
}

/// Detects the `L'` most likely indicator shifts: cyclic shifts of the
/// reserved-root sequence with the largest correlation magnitudes, restricted
/// to shifts that are valid data-root indices. Returns fewer entries when the
/// dictionary has fewer data roots than `L'`.
pub fn detect_indicator_shifts(
    spec: &DictionarySpec,
    received: &[Complex64],
    l_prime: usize,
) -> Result<Vec<(usize, Complex64)>> {
    check_received(spec, received)?;
    if l_prime == 0 || l_prime > spec.p() as usize {
        return Err(Error::parameter(format!("L'={l_prime} out of range")));
    }
    let mut correlator = Correlator::new(spec.p());
    Ok(indicator_detections(spec, received, l_prime, &mut correlator))
}

/// Coarse global channel estimate from the indicator sequences:
/// `h_hat = sum_l <y, z_rbar(. + shift_l)>`, unnormalized. Only the phase is
/// consumed downstream.
pub fn estimate_channel(
    received: &[Complex64],
    indicator_shifts: &[usize],
    indicator_root: ZcRoot,
) -> Complex64 {
    let seq = zc::zc_sequence(indicator_root);
    let p = seq.len();
    indicator_shifts
        .iter()
        .map(|&s| {
            received
                .iter()
                .enumerate()
                .map(|(k, y)| y * seq[(k + s) % p].conj())
                .sum::<Complex64>()
        })
        .sum()
}

/// Candidate bookkeeping for the subset search.
struct Candidate {
    selection: SparseSelection,
    residual_energy: f64,
    indicator_metric: f64,
    channel_estimate: Complex64,
}

/// Visits every size-`k` index combination of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Full embedded-indication decoding procedure.
///
/// 1. Detect the `L'` strongest indicator shifts.
/// 2. For each section-compatible size-`L` subset: estimate and compensate
///    the global channel phase, cancel the indicators (least-squares
///    amplitudes), then detect and cancel the data sequence of each candidate
///    root in descending indicator-correlation order, maximizing the real
///    part of the correlation over the section's valid shifts.
/// 3. Keep the candidate with the smallest residual energy; ties fall back to
///    the larger summed indicator correlation, then lexicographic selection.
pub fn decode_with_indication(
    spec: &DictionarySpec,
    cfg: &DecoderConfig,
    received: &[Complex64],
) -> Result<DecodeResult> {
    check_received(spec, received)?;
    if received.len() > cfg.max_len {
        return Err(Error::parameter(format!(
            "received length {} exceeds the configured guard {}",
            received.len(),
            cfg.max_len
        )));
    }
    if cfg.l_prime < spec.l() {
        return Err(Error::parameter(format!(
            "L'={} must be at least L={}",
            cfg.l_prime,
            spec.l()
        )));
    }
    if cfg.l_prime > spec.p() as usize - 1 {
        return Err(Error::parameter(format!(
            "L'={} exceeds P-1={}",
            cfg.l_prime,
            spec.p() - 1
        )));
    }

    let p = spec.p();
    let pf = p as f64;
    let mut correlator = Correlator::new(p);
    let detections = indicator_detections(spec, received, cfg.l_prime, &mut correlator);

    let mut best: Option<Candidate> = None;
    let mut candidates_examined = 0usize;

    for_each_combination(detections.len(), spec.l(), |combo| {
        // Exactly one candidate root per section, else the subset cannot
        // index a valid selection.
        let mut section_seen = vec![false; spec.l()];
        let mut compatible = true;
        for &i in combo {
            match spec.section_of_root(detections[i].0 as u64) {
                Some(s) if !section_seen[s] => section_seen[s] = true,
                _ => {
                    compatible = false;
                    break;
                }
            }
        }
        if !compatible {
            return;
        }
        candidates_examined += 1;

        // Global phase from the already-computed indicator correlations.
        let h_hat: Complex64 = combo.iter().map(|&i| detections[i].1).sum();
        let rotation = Complex::from_polar(1.0, -h_hat.arg());
        let mut residual: Vec<Complex64> = received.iter().map(|y| y * rotation).collect();

        // Cancel the indicator sequences at their least-squares amplitudes.
        // Distinct shifts of one root are orthogonal, so per-sequence LS is
        // also the joint LS solution.
        let indicator_amps: Vec<(usize, Complex64)> = combo
            .iter()
            .map(|&i| {
                let shift = detections[i].0;
                let seq = shifted_sequence(p, spec.indicator_root(), shift);
                (shift, zc::inner_product(&residual, &seq) / pf)
            })
            .collect();
        for (shift, a) in &indicator_amps {
            let seq = shifted_sequence(p, spec.indicator_root(), *shift);
            for (r, z) in residual.iter_mut().zip(&seq) {
                *r -= a * z;
            }
        }

        // Detect data sequences root by root, cancelling as we go.
        let mut pairs: Vec<RootShift> = Vec::with_capacity(spec.l());
        for &i in combo {
            let root = detections[i].0 as u64;
            let xi = correlator.correlate(&residual, root);
            let valid = spec.valid_shifts(root).expect("candidate is a data root");
            let (shift, value) = xi
                .iter()
                .take(valid)
                .enumerate()
                .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
                .expect("sections are non-empty");
            let a = value / pf;
            let seq = shifted_sequence(p, root, shift);
            for (r, z) in residual.iter_mut().zip(&seq) {
                *r -= a * z;
            }
            pairs.push(RootShift { root, shift });
        }
        pairs.sort_by_key(|pair| spec.section_of_root(pair.root));

        let candidate = Candidate {
            selection: SparseSelection { pairs },
            residual_energy: zc::energy(&residual),
            indicator_metric: combo.iter().map(|&i| detections[i].1.norm()).sum(),
            channel_estimate: h_hat,
        };
        let replace = match &best {
            None => true,
            Some(current) => {
                match candidate.residual_energy.total_cmp(&current.residual_energy) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        match candidate
                            .indicator_metric
                            .total_cmp(&current.indicator_metric)
                        {
                            std::cmp::Ordering::Greater => true,
                            std::cmp::Ordering::Less => false,
                            std::cmp::Ordering::Equal => candidate.selection < current.selection,
                        }
                    }
                }
            }
        };
        if replace {
            best = Some(candidate);
        }
    });

    let correlations_used = correlator.calls;
    match best {
        Some(winner) => {
            let message = unmap_selection(spec, &winner.selection).ok();
            Ok(DecodeResult {
                message,
                selection: Some(winner.selection),
                channel_estimate: winner.channel_estimate,
                residual_energy: winner.residual_energy,
                candidates_examined,
                correlations_used,
            })
        }
        // No section-compatible subset among the detected shifts.
        None => Ok(DecodeResult {
            message: None,
            selection: None,
            channel_estimate: Complex64::new(0.0, 0.0),
            residual_energy: zc::energy(received),
            candidates_examined,
            correlations_used,
        }),
    }
}
