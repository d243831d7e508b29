//! Segmented single-sequence baseline: SSC with `L = 1` per segment.
//!
//! The block of `K` bits is split across `segments` independent codewords,
//! each owning an equal share of the resource elements (consecutive band
//! slices). Every segment uses its own `L = 1` dictionary over the largest
//! prime not exceeding its RE share and is detected non-coherently by
//! per-column correlation magnitude.

use crate::codec::{
    self, decode_full_correlation, rate_match, DecodeResult, RateMatchedWord,
};
use crate::dictionary::{build_spec, DictionarySpec, Message};
use crate::zc::largest_prime_leq;
use crate::{Complex64, Error, Result};

/// Segmented baseline configuration.
#[derive(Debug, Clone)]
pub struct MdcConfig {
    segments: usize,
    res_per_segment: usize,
    bits_per_segment: usize,
    spec: DictionarySpec,
}

impl MdcConfig {
    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn res_per_segment(&self) -> usize {
        self.res_per_segment
    }

    pub fn bits_per_segment(&self) -> usize {
        self.bits_per_segment
    }

    pub fn total_bits(&self) -> usize {
        self.segments * self.bits_per_segment
    }

    /// The per-segment `L = 1` dictionary (identical across segments).
    pub fn segment_spec(&self) -> &DictionarySpec {
        &self.spec
    }
}

/// Builds the baseline over `total_res` REs carrying `total_bits` bits in
/// `segments` equal slices.
pub fn build_mdc(total_res: usize, segments: usize, total_bits: usize) -> Result<MdcConfig> {
    if segments == 0 {
        return Err(Error::parameter("segments must be >= 1".to_string()));
    }
    if total_res % segments != 0 {
        return Err(Error::parameter(format!(
            "{total_res} REs do not divide into {segments} segments"
        )));
    }
    if total_bits % segments != 0 {
        return Err(Error::parameter(format!(
            "{total_bits} bits do not divide into {segments} segments"
        )));
    }
    let res_per_segment = total_res / segments;
    let bits_per_segment = total_bits / segments;
    let p = largest_prime_leq(res_per_segment as u64)?;
    let spec = build_spec(p, 1, bits_per_segment)?;
    Ok(MdcConfig {
        segments,
        res_per_segment,
        bits_per_segment,
        spec,
    })
}

/// Encodes each segment independently and rate-matches it to its RE share.
pub fn mdc_encode(cfg: &MdcConfig, message: &Message) -> Result<Vec<RateMatchedWord>> {
    if message.len() != cfg.total_bits() {
        return Err(Error::parameter(format!(
            "message has {} bits, config carries {}",
            message.len(),
            cfg.total_bits()
        )));
    }
    (0..cfg.segments)
        .map(|s| {
            let bits = message.bits()[s * cfg.bits_per_segment..(s + 1) * cfg.bits_per_segment]
                .to_vec();
            let cw = codec::encode(&cfg.spec, &Message::new(bits))?;
            Ok(rate_match(&cw, cfg.res_per_segment))
        })
        .collect()
}

/// Concatenates segment words into the band vector (segment-major,
/// frequency-first within each slice).
pub fn concat_segments(words: &[RateMatchedWord]) -> Vec<Complex64> {
    words.iter().flat_map(|w| w.symbols.iter().copied()).collect()
}

/// Decoder output with per-segment detail.
#[derive(Debug, Clone)]
pub struct MdcDecodeResult {
    /// Concatenated message, `None` when any segment fails to decode.
    pub message: Option<Message>,
    pub segment_results: Vec<DecodeResult>,
}

/// Decodes each band slice independently and concatenates the bits.
pub fn mdc_decode(cfg: &MdcConfig, band: &[Complex64]) -> Result<MdcDecodeResult> {
    if band.len() != cfg.segments * cfg.res_per_segment {
        return Err(Error::parameter(format!(
            "band has {} REs, config expects {}",
            band.len(),
            cfg.segments * cfg.res_per_segment
        )));
    }
    let mut bits = Vec::with_capacity(cfg.total_bits());
    let mut ok = true;
    let mut segment_results = Vec::with_capacity(cfg.segments);
    for s in 0..cfg.segments {
        let slice = &band[s * cfg.res_per_segment..(s + 1) * cfg.res_per_segment];
        let folded = codec::derate_match(slice, cfg.spec.p() as usize);
        let result = decode_full_correlation(&cfg.spec, &folded)?;
        match &result.message {
            Some(m) => bits.extend_from_slice(m.bits()),
            None => ok = false,
        }
        segment_results.push(result);
    }
    Ok(MdcDecodeResult {
        message: ok.then(|| Message::new(bits)),
        segment_results,
    })
}
