//! Analytic sequence identities checked exhaustively, plus randomized
//! invariants for the shift/mapping plumbing.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zcqo_core::zc::{
    correlate_all_shifts, correlate_direct, cyclic_shift, is_prime, zc_sequence, ZcRoot,
};
use zcqo_core::Complex64;

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

#[test]
fn autocorrelation_sidelobes_vanish_for_all_odd_primes_up_to_257() {
    // P = 2 is excluded: z_r has period P only for odd P (for P = 2 the
    // sequence is antiperiodic), so the zero-lag identity does not apply.
    for p in primes_up_to(257).into_iter().filter(|&p| p > 2) {
        for r in 1..p {
            let root = ZcRoot::new(p, r).unwrap();
            let corr = correlate_all_shifts(&zc_sequence(root), root).unwrap();
            assert!((corr[0].re - p as f64).abs() < 1e-9 * p as f64);
            for v in corr.iter().skip(1) {
                assert!(v.norm() < 1e-9 * p as f64, "sidelobe at P={p} r={r}");
            }
        }
    }
}

#[test]
fn cross_correlation_constant_for_all_root_pairs() {
    for p in [11u64, 31, 127] {
        let sqrt_p = (p as f64).sqrt();
        let sequences: Vec<Vec<Complex64>> = (1..p)
            .map(|r| zc_sequence(ZcRoot::new(p, r).unwrap()))
            .collect();
        for r in 1..p {
            let root = ZcRoot::new(p, r).unwrap();
            for r2 in 1..p {
                if r2 == r {
                    continue;
                }
                let corr = correlate_all_shifts(&sequences[(r2 - 1) as usize], root).unwrap();
                for (s, v) in corr.iter().enumerate() {
                    assert!(
                        (v.norm() - sqrt_p).abs() < 1e-9 * p as f64,
                        "P={p} r={r} r'={r2} s={s}: |corr|={}",
                        v.norm()
                    );
                }
            }
        }
    }
}

#[test]
fn fft_and_direct_paths_agree_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in [11u64, 127, 331] {
        for r in [1, p / 2, p - 1] {
            let root = ZcRoot::new(p, r).unwrap();
            let reference = zc_sequence(root);
            for _ in 0..100 {
                let y: Vec<Complex64> = (0..p)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let via_api = correlate_all_shifts(&y, root).unwrap();
                let direct = correlate_direct(&y, &reference);
                let scale: f64 =
                    direct.iter().map(|v| v.norm()).sum::<f64>() / p as f64;
                for (a, b) in via_api.iter().zip(&direct) {
                    assert!((a - b).norm() <= 1e-9 * scale.max(1.0));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn shift_composition_is_additive(s1 in 0usize..31, s2 in 0usize..31, r in 1u64..31) {
        let seq = zc_sequence(ZcRoot::new(31, r).unwrap());
        let once = cyclic_shift(&cyclic_shift(&seq, s1).unwrap(), s2).unwrap();
        let both = cyclic_shift(&seq, (s1 + s2) % 31).unwrap();
        prop_assert_eq!(once, both);
    }

    #[test]
    fn shifted_sequences_of_one_root_stay_orthogonal(r in 1u64..31, s in 1usize..31) {
        let root = ZcRoot::new(31, r).unwrap();
        let z = zc_sequence(root);
        let shifted = cyclic_shift(&z, s).unwrap();
        let ip: Complex64 = z.iter().zip(&shifted).map(|(a, b)| a * b.conj()).sum();
        prop_assert!(ip.norm() < 1e-9 * 31.0);
    }
}
