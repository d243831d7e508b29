//! Analytic and oracle property checks behind the `verify` subcommand.
//!
//! Each check returns `Ok(())` or a description of the first violation; the
//! acceptance suite reuses them directly.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zcqo_core::channel::{snr_from_budget, LinkBudget};
use zcqo_core::codec::{
    decode_full_correlation, decode_with_indication, encode, encode_with_indication,
    section_correlations, DecoderConfig,
};
use zcqo_core::dictionary::{build_spec, Message};
use zcqo_core::zc::{
    correlate_all_shifts, correlate_direct, cyclic_shift, energy, inner_product, zc_sequence,
    ZcRoot,
};
use zcqo_core::Complex64;

type Check = Result<(), String>;

/// Autocorrelation sidelobes vanish and cross-root magnitudes equal sqrt(P),
/// for all roots of each prime.
pub fn zc_identities(primes: &[u64]) -> Check {
    for &p in primes {
        let tol = 1e-9 * p as f64;
        let sqrt_p = (p as f64).sqrt();
        let sequences: Vec<Vec<Complex64>> = (1..p)
            .map(|r| zc_sequence(ZcRoot::new(p, r).expect("prime root")))
            .collect();
        for r in 1..p {
            let root = ZcRoot::new(p, r).expect("prime root");
            let auto = correlate_all_shifts(&sequences[(r - 1) as usize], root)
                .map_err(|e| e.to_string())?;
            if (auto[0].re - p as f64).abs() > tol {
                return Err(format!("P={p} r={r}: main lobe {}", auto[0].re));
            }
            for (s, v) in auto.iter().enumerate().skip(1) {
                if v.norm() > tol {
                    return Err(format!("P={p} r={r}: sidelobe {} at s={s}", v.norm()));
                }
            }
            for r2 in 1..p {
                if r2 == r {
                    continue;
                }
                let cross = correlate_all_shifts(&sequences[(r2 - 1) as usize], root)
                    .map_err(|e| e.to_string())?;
                for (s, v) in cross.iter().enumerate() {
                    if (v.norm() - sqrt_p).abs() > tol {
                        return Err(format!(
                            "P={p} r={r} r'={r2} s={s}: |corr| = {}",
                            v.norm()
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Frequency-domain and direct correlation agree within 1e-9 relative error
/// on `n` random inputs per prime.
pub fn fft_direct_equivalence(primes: &[u64], n: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for &p in primes {
        for r in [1, p / 2 + 1, p - 1] {
            let root = ZcRoot::new(p, r).expect("prime root");
            let reference = zc_sequence(root);
            for trial in 0..n {
                let y: Vec<Complex64> = (0..p)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let fast = correlate_all_shifts(&y, root).map_err(|e| e.to_string())?;
                let direct = correlate_direct(&y, &reference);
                let scale: f64 = direct.iter().map(|v| v.norm()).sum::<f64>() / p as f64;
                for (s, (a, b)) in fast.iter().zip(&direct).enumerate() {
                    if (a - b).norm() > 1e-9 * scale.max(1.0) {
                        return Err(format!(
                            "P={p} r={r} trial {trial} s={s}: |Δ| = {}",
                            (a - b).norm()
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exhaustive noiseless message sweep at P=31, L=2 under `n_phases` global
/// rotations, both decoders, zero errors.
pub fn noiseless_exactness_p31(n_phases: usize) -> Check {
    let spec = build_spec(31, 2, 8).map_err(|e| e.to_string())?;
    let cfg = DecoderConfig::new(2, 0.5);
    let k = spec.info_bits();
    for v in 0..1u64 << k {
        let m = Message::new((0..k).rev().map(|i| (v >> i) & 1 == 1).collect());
        let plain = encode(&spec, &m).map_err(|e| e.to_string())?;
        let indicated = encode_with_indication(&spec, &m, 0.5).map_err(|e| e.to_string())?;
        for i in 0..n_phases {
            let theta = i as f64 * std::f64::consts::TAU / n_phases as f64;
            let rot = Complex::from_polar(1.0, theta);
            let y_plain: Vec<Complex64> = plain.symbols.iter().map(|c| c * rot).collect();
            let full = decode_full_correlation(&spec, &y_plain).map_err(|e| e.to_string())?;
            if full.message.as_ref() != Some(&m) {
                return Err(format!("full decoder missed message {v} at theta {theta}"));
            }
            let y_ind: Vec<Complex64> = indicated.symbols.iter().map(|c| c * rot).collect();
            let dec = decode_with_indication(&spec, &cfg, &y_ind).map_err(|e| e.to_string())?;
            if dec.message.as_ref() != Some(&m) {
                return Err(format!(
                    "indicated decoder missed message {v} at theta {theta}"
                ));
            }
        }
    }
    Ok(())
}

/// At P=11 the per-root correlations both decoders consume equal the
/// brute-force full-dictionary correlations on the true roots.
pub fn oracle_equivalence_p11() -> Check {
    let spec = build_spec(11, 2, 6).map_err(|e| e.to_string())?;
    let tol = 1e-9 * spec.p() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..25 {
        let m = Message::random(spec.info_bits(), &mut rng);
        let y = encode(&spec, &m).map_err(|e| e.to_string())?.symbols;
        let truth = zcqo_core::dictionary::map_message(&spec, &m).map_err(|e| e.to_string())?;
        for pair in &truth.pairs {
            // Brute-force dictionary column correlations for this root.
            let base = zc_sequence(ZcRoot::new(spec.p(), pair.root).expect("data root"));
            let xi = section_correlations(&spec, &y, pair.root).map_err(|e| e.to_string())?;
            for shift in 0..spec.p() as usize {
                let column = cyclic_shift(&base, shift).map_err(|e| e.to_string())?;
                let expected = inner_product(&y, &column);
                if (xi[shift] - expected).norm() > tol {
                    return Err(format!(
                        "root {} shift {shift}: decoder {} vs dictionary {}",
                        pair.root, xi[shift], expected
                    ));
                }
            }
        }
    }
    Ok(())
}

/// The indicated decoder performs at most `1 + C(L', L) * L` all-shift
/// correlation passes and examines at most `C(L', L)` candidates.
pub fn complexity_contract() -> Check {
    let spec = build_spec(331, 2, 28).map_err(|e| e.to_string())?;
    let cfg = DecoderConfig::new(7, 0.5);
    let subsets = 21; // C(7, 2)
    let bound = 1 + subsets * spec.l();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for snr_db in [f64::INFINITY, 10.0, 0.0, -10.0] {
        let m = Message::random(spec.info_bits(), &mut rng);
        let cw = encode_with_indication(&spec, &m, 0.5).map_err(|e| e.to_string())?;
        let y = zcqo_core::channel::transmit(&cw.symbols, Complex64::new(1.0, 0.0), snr_db, &mut rng);
        let result = decode_with_indication(&spec, &cfg, &y).map_err(|e| e.to_string())?;
        if result.correlations_used > bound {
            return Err(format!(
                "{} correlations at {snr_db} dB exceeds bound {bound}",
                result.correlations_used
            ));
        }
        if result.candidates_examined > subsets {
            return Err(format!(
                "{} candidates exceeds C(L',L) = {subsets}",
                result.candidates_examined
            ));
        }
        if result.residual_energy > energy(&y) + 1e-9 {
            return Err("residual energy exceeds received energy".to_string());
        }
    }
    Ok(())
}

/// Wideband SNR budget values (exact arithmetic, quoted to 2 decimals).
pub fn snr_budget() -> Check {
    let at = |n_prb| {
        snr_from_budget(&LinkBudget {
            cnr_db: -2.15,
            n_prb,
        })
    };
    let exact80 = -2.15 - 10.0 * 80f64.log10();
    if at(80) != exact80 {
        return Err("budget at 80 PRB is not exact arithmetic".to_string());
    }
    for (n_prb, quoted) in [(80u32, -21.18), (160, -24.19)] {
        let got = at(n_prb);
        if (got - quoted).abs() > 5e-3 {
            return Err(format!("{n_prb} PRB: {got} dB vs quoted {quoted}"));
        }
    }
    if at(1) != -2.15 {
        return Err("1 PRB budget must equal the CNR".to_string());
    }
    Ok(())
}

/// Runs the full battery, printing one line per check. Returns `true` when
/// everything passes.
pub fn run_verify() -> bool {
    let checks: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        (
            "zc identities (P in {11, 31, 127, 331}, all roots)",
            Box::new(|| zc_identities(&[11, 31, 127, 331])),
        ),
        (
            "fft/direct correlation equivalence (100 inputs)",
            Box::new(|| fft_direct_equivalence(&[11, 127, 331], 100)),
        ),
        (
            "noiseless exactness at P=31 under 8 phases",
            Box::new(|| noiseless_exactness_p31(8)),
        ),
        (
            "oracle equivalence at P=11",
            Box::new(oracle_equivalence_p11),
        ),
        ("decoder complexity contract", Box::new(complexity_contract)),
        ("snr budget arithmetic", Box::new(snr_budget)),
    ];
    let mut all_ok = true;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("[verify] {name}: PASS"),
            Err(msg) => {
                println!("[verify] {name}: FAIL ({msg})");
                all_ok = false;
            }
        }
    }
    all_ok
}
