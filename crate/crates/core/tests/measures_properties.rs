use duality_core::{
    density_from_beams, distinguishability, distinguishability_prime, linear_identity,
    pythagorean_identity, quantum_coherence, random_coherence, visibility_analytic,
    CoherenceMatrix, Complex64, DualityReport,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Textbook evaluation, pair by pair, independent of the library's
/// cancellation-free rewriting.
mod oracle {
    pub fn s(i: &[f64]) -> f64 {
        let n = i.len();
        let total: f64 = i.iter().sum();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    acc += (i[a] * i[b]).sqrt() / total;
                }
            }
        }
        acc / (n - 1) as f64
    }

    pub fn d(i: &[f64]) -> f64 {
        (1.0 - s(i).powi(2)).max(0.0).sqrt()
    }

    pub fn d_prime(i: &[f64]) -> f64 {
        1.0 - s(i)
    }
}

fn instance() -> impl Strategy<Value = (Vec<f64>, u64, usize)> {
    (2usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec(prop_oneof![Just(0.0), 1e-3f64..10.0], n),
            any::<u64>(),
            1usize..=n,
        )
    })
}

fn positive(i: &[f64]) -> bool {
    i.iter().sum::<f64>() > 1e-6
}

#[test]
fn oracle_agrees_on_hand_values() {
    assert!((oracle::d(&[1.0, 1.0, 0.0]) - 3f64.sqrt() / 2.0).abs() < 1e-15);
    assert!((oracle::d_prime(&[4.0, 1.0]) - 0.2).abs() < 1e-15);
    assert!((distinguishability(&[1.0, 1.0, 0.0]).unwrap() - 0.8660254037844386).abs() < 1e-15);
}

#[test]
fn two_slit_reductions() {
    for k in 0..1000 {
        let i1 = 0.01 + (k as f64 * 0.7548776662).fract() * 5.0;
        let i2 = 0.01 + (k as f64 * 0.5698402910).fract() * 5.0;
        let i = [i1, i2];
        let d = distinguishability(&i).unwrap();
        assert!((d - (i1 - i2).abs() / (i1 + i2)).abs() < 1e-12);
        let dp = distinguishability_prime(&i).unwrap();
        let form19 = 1.0 - 2.0 * (i1 * i2).sqrt() / (i1 + i2);
        let form20 = (i1.sqrt() - i2.sqrt()).powi(2) / (i1 + i2);
        assert!((dp - form19).abs() < 1e-12 && (dp - form20).abs() < 1e-12);
    }
}

#[test]
fn ensemble_identities_and_bridge() {
    let mut worst = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..10_000u64 {
        let n = 2 + (seed % 7) as usize;
        let coh = random_coherence(n, 1 + (seed as usize / 7) % n, seed).unwrap();
        let i: Vec<f64> = (0..n).map(|k| ((seed * 31 + k as u64 * 17) % 97) as f64 / 10.0 + 0.05).collect();
        let p = pythagorean_identity(&i, &coh).unwrap();
        let l = linear_identity(&i, &coh).unwrap();
        let v = visibility_analytic(&i, &coh).unwrap();
        let rho = density_from_beams(&i, &coh).unwrap();
        let c = quantum_coherence(&rho);
        worst.0 = worst.0.max(p.residual);
        worst.1 = worst.1.max(l.residual);
        worst.2 = worst.2.max(p.lhs.max(l.lhs));
        worst.3 = worst.3.max((c - v).abs());
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.eigenvalues().iter().all(|&e| e >= -1e-10));
        // Independent route for D.
        assert!((distinguishability(&i).unwrap() - oracle::d(&i)).abs() < 1e-7);
        assert!((distinguishability_prime(&i).unwrap() - oracle::d_prime(&i)).abs() < 1e-12);
    }
    assert!(worst.0 < 1e-12 && worst.1 < 1e-12, "{worst:?}");
    assert!(worst.2 <= 1.0 + 1e-12);
    assert!(worst.3 < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn measures_in_unit_interval((i, seed, rank) in instance()) {
        prop_assume!(positive(&i));
        let coh = random_coherence(i.len(), rank, seed).unwrap();
        let r = DualityReport::compute(&i, &coh).unwrap();
        for v in [r.v_c, r.d, r.d_prime, r.gamma_n, r.c] {
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&v), "{r:?}");
        }
        prop_assert!(r.pyth_holds && r.lin_holds);
        prop_assert!(r.d_prime <= r.d + 1e-15);
    }

    #[test]
    fn scale_invariance((i, seed, rank) in instance(), c in 1e-3f64..1e3) {
        prop_assume!(positive(&i));
        let coh = random_coherence(i.len(), rank, seed).unwrap();
        let scaled: Vec<f64> = i.iter().map(|x| x * c).collect();
        let a = DualityReport::compute(&i, &coh).unwrap();
        let b = DualityReport::compute(&scaled, &coh).unwrap();
        for (x, y) in [(a.v_c, b.v_c), (a.d, b.d), (a.d_prime, b.d_prime), (a.c, b.c),
                       (a.pyth_lhs, b.pyth_lhs), (a.lin_lhs, b.lin_lhs)] {
            // D near 0 is a square root of a quantity near 0: compare its square.
            prop_assert!((x - y).abs() < 1e-12 || (x * x - y * y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn permutation_invariance(
        (i, seed, rank) in instance(),
        shuffle_seed in any::<u64>(),
    ) {
        prop_assume!(positive(&i));
        let n = i.len();
        let coh = random_coherence(n, rank, seed).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&k| (k as u64 + 1).wrapping_mul(shuffle_seed | 1).rotate_left(17));
        let pi: Vec<f64> = perm.iter().map(|&k| i[k]).collect();
        let pc = coh.permuted(&perm).unwrap();
        let a = DualityReport::compute(&i, &coh).unwrap();
        let b = DualityReport::compute(&pi, &pc).unwrap();
        for (x, y) in [(a.v_c, b.v_c), (a.d_prime, b.d_prime), (a.gamma_n, b.gamma_n), (a.c, b.c),
                       (a.pyth_lhs, b.pyth_lhs), (a.lin_lhs, b.lin_lhs)] {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((a.d * a.d - b.d * b.d).abs() < 1e-12);
    }

    #[test]
    fn visibility_monotone_in_each_modulus(
        (i, seed) in (2usize..9).prop_flat_map(|n| (prop::collection::vec(1e-3f64..10.0, n), any::<u64>())),
        pair in (0usize..64, 0usize..64),
        factor in 0.9f64..1.0,
    ) {
        let n = i.len();
        let (a, b) = (pair.0 % n, pair.1 % n);
        prop_assume!(a != b);
        // Full rank leaves room to shrink one modulus without leaving the PSD cone.
        let coh = random_coherence(n, n + 2, seed).unwrap();
        let mut m = coh.as_matrix().clone();
        m[(a, b)] *= Complex64::new(factor, 0.0);
        m[(b, a)] *= Complex64::new(factor, 0.0);
        let lowered = CoherenceMatrix::validate(m);
        prop_assume!(lowered.is_ok());
        let lowered = lowered.unwrap();
        prop_assert!(visibility_analytic(&i, &lowered).unwrap() <= visibility_analytic(&i, &coh).unwrap());
        let lo = CoherenceMatrix::uniform(n, 0.3 * factor).unwrap();
        let hi = CoherenceMatrix::uniform(n, 0.3 * factor + 0.2).unwrap();
        prop_assert!(visibility_analytic(&i, &lo).unwrap() <= visibility_analytic(&i, &hi).unwrap());
    }

    #[test]
    fn equal_intensity_visibility_is_gamma_n(n in 2usize..10, rank in 1usize..6, seed in any::<u64>(), c in 0.01f64..100.0) {
        let coh = random_coherence(n, rank, seed).unwrap();
        let v = visibility_analytic(&vec![c; n], &coh).unwrap();
        prop_assert!((v - coh.gamma_n()).abs() < 1e-14);
    }

    #[test]
    fn saturation_iff_full_coherence_on_lit_pairs((i, seed, _rank) in instance()) {
        prop_assume!(positive(&i));
        let n = i.len();
        let coh = random_coherence(n, 1, seed).unwrap();
        prop_assert!((pythagorean_identity(&i, &coh).unwrap().lhs - 1.0).abs() < 1e-12);
        prop_assert!((linear_identity(&i, &coh).unwrap().lhs - 1.0).abs() < 1e-12);

        // Partial coherence on a lit pair drops both below 1.
        let lit = i.iter().filter(|&&x| x > 0.0).count();
        prop_assume!(lit >= 2);
        let partial = CoherenceMatrix::uniform(n, 0.5).unwrap();
        prop_assert!(pythagorean_identity(&i, &partial).unwrap().lhs < 1.0 - 1e-6);
        prop_assert!(linear_identity(&i, &partial).unwrap().lhs < 1.0 - 1e-6);
    }
}

#[test]
fn density_matrix_psd_via_embedding() {
    for seed in 0..200 {
        let n = 2 + (seed % 6) as usize;
        let coh = random_coherence(n, 2, seed).unwrap();
        let i: Vec<f64> = (0..n).map(|k| (k + 1) as f64).collect();
        let rho = density_from_beams(&i, &coh).unwrap();
        let m: &DMatrix<Complex64> = rho.as_matrix();
        let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |r, c| {
            let z = m[(r % n, c % n)];
            let shift = if r == c { 1e-10 } else { 0.0 };
            match (r < n, c < n) {
                (true, true) | (false, false) => z.re + shift,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        assert!(nalgebra::Cholesky::new(real).is_some());
    }
}
