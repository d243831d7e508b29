//! Power-limited satellite link model: CNR-to-SNR budget, AWGN, and a flat
//! Rician block-fading process with Doppler-driven phase drift.
//!
//! The transmit power is fixed, so widening the allocation lowers the per-RE
//! SNR by `10*log10(N_PRB)`. The delay spread of the target link is a few
//! nanoseconds at 15 kHz subcarrier spacing, i.e. frequency-flat, so fading
//! is modeled as one complex gain per slot: a line-of-sight term whose phase
//! random-walks with the Doppler rate plus an AR(1) scattered component whose
//! slot-lag autocorrelation follows the zeroth-order Bessel value.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::Complex64;

/// Carrier-to-noise ratio at the 1-PRB reference and the allocated width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub cnr_db: f64,
    pub n_prb: u32,
}

/// Per-RE SNR at fixed transmit power: `cnr_db - 10*log10(n_prb)`.
pub fn snr_from_budget(budget: &LinkBudget) -> f64 {
    budget.cnr_db - 10.0 * (budget.n_prb as f64).log10()
}

/// Flat Rician block-fading parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingProcess {
    /// Rician K-factor in dB; large values approach pure line-of-sight.
    pub k_factor_db: f64,
    /// Maximum Doppler frequency in Hz.
    pub doppler_hz: f64,
    /// Slot duration in seconds.
    pub slot_duration_s: f64,
}

impl FadingProcess {
    /// Normalized per-slot Doppler angle `2*pi*f_D*T_slot`.
    fn doppler_angle(&self) -> f64 {
        std::f64::consts::TAU * self.doppler_hz * self.slot_duration_s
    }
}

/// Samples one per-slot complex gain trajectory, `E[|h|^2] = 1`.
///
/// `h_t = sqrt(K/(K+1)) e^{j phi_t} + sqrt(1/(K+1)) g_t`, where `phi_t` is a
/// random walk with per-slot increment standard deviation `2*pi*f_D*T_slot`
/// and `g_t` is AR(1) complex Gaussian with lag-1 coefficient
/// `J_0(2*pi*f_D*T_slot)`. Deterministic given the seed.
pub fn sample_fading(process: &FadingProcess, n_slots: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 10f64.powf(process.k_factor_db / 10.0);
    let los_amp = (k / (k + 1.0)).sqrt();
    let nlos_amp = (1.0 / (k + 1.0)).sqrt();
    let sigma_phi = process.doppler_angle();
    let rho = libm::j0(process.doppler_angle()).clamp(-1.0, 1.0);
    let innovation = (1.0 - rho * rho).max(0.0).sqrt();
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let half = std::f64::consts::FRAC_1_SQRT_2;

    let mut phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut g = Complex64::new(unit.sample(&mut rng), unit.sample(&mut rng)) * half;
    (0..n_slots)
        .map(|t| {
            if t > 0 {
                phi += sigma_phi * unit.sample(&mut rng);
                let w = Complex64::new(unit.sample(&mut rng), unit.sample(&mut rng)) * half;
                g = rho * g + innovation * w;
            }
            los_amp * Complex::from_polar(1.0, phi) + nlos_amp * g
        })
        .collect()
}

/// Applies the slot gain and adds circularly symmetric AWGN:
/// `y[i] = h * c[i] + n[i]`, noise variance `10^(-snr_db/10)` per RE with the
/// signal normalized to unit average power.
pub fn transmit(
    symbols: &[Complex64],
    h: Complex64,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Vec<Complex64> {
    let noise_var = 10f64.powf(-snr_db / 10.0);
    let sigma = (noise_var / 2.0).sqrt();
    let noise = Normal::new(0.0, sigma).expect("valid normal");
    symbols
        .iter()
        .map(|c| h * c + Complex64::new(noise.sample(rng), noise.sample(rng)))
        .collect()
}

/// Stable per-trial seed derivation (splitmix64 finalizer over the pair), so
/// results do not depend on worker scheduling.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
