//! Link-level building blocks for pilot-less sparse superposition coding (SSC)
//! over Zadoff-Chu quasi-orthogonal (ZC-QO) dictionaries.
//!
//! A codeword is a scaled superposition of `L` cyclically shifted prime-length
//! Zadoff-Chu sequences selected by the message. The receiver is non-coherent:
//! no pilots are transmitted. Optionally, the data root indices are embedded in
//! the transmitted signal through superposed indicator sequences drawn from a
//! reserved root, which lets the decoder restrict its search to the indicated
//! orthogonal subsets and extract a coarse channel phase estimate.
//!
//! Modules:
//! - [`zc`] — Zadoff-Chu sequence generation and all-shift circular correlation
//! - [`dictionary`] — column indexing and the message ↔ sparse-selection mapping
//! - [`codec`] — encoding, rate matching, grid mapping, and both decoders
//! - [`channel`] — CNR/SNR budget, AWGN, and flat Rician block fading
//! - [`link`] — multi-codeword framing, MRC combining, stop-feedback protocol
//! - [`mdc`] — segmented single-sequence (L = 1) baseline

pub mod channel;
pub mod codec;
pub mod dictionary;
pub mod link;
pub mod mdc;
pub mod zc;

mod error;

pub use error::Error;

/// Complex sample type used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
