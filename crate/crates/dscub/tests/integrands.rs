//! Integrand evaluation and reference values against independent
//! implementations: series/continued-fraction normal CDF, a Hermite
//! rule, a complex recursion for the radial integral, Monte Carlo, and
//! exhaustive grids for Walsh polynomial means.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use dscub::digital::sobol_generator_with;
use dscub::integrands::{keister_reference_with_error, normal_cdf, write_reference_csv};
use dscub::{
    apply_scramble, cone_check, eval_walsh_poly, inverse_normal_cdf, keister, keister_reference,
    nu_map, sample_mean, spectrum_sums, ConeSpec, DigitalPoint, Error, OmegaFn, SlotContext,
    WalshPolynomial, Wavenumber,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[test]
fn keister_worked_values() {
    assert!((keister(&[0.5]) - PI.sqrt()).abs() < 1e-14);
    assert!((keister(&[0.5, 0.5]) - PI).abs() < 1e-14);
    let at_one = normal_cdf(1.0);
    let expected = PI.sqrt() * (1.0 / 2.0f64.sqrt()).cos();
    assert!((keister(&[at_one]) - expected).abs() < 1e-9);
}

#[test]
fn keister_is_symmetric_and_clamped() {
    let x = [0.3, 0.71, 0.12];
    let perm = [0.71, 0.12, 0.3];
    assert!((keister(&x) - keister(&perm)).abs() < 1e-13);
    let reflected = [0.7, 0.29, 0.88];
    assert!((keister(&x) - keister(&reflected)).abs() < 1e-10);
    assert!(keister(&[0.0]).is_finite());
    assert!(keister(&[1.0]).is_finite());
    assert!(keister(&[0.0, 1.0, 0.5]).is_finite());
}

#[test]
fn inverse_normal_cdf_round_trips() {
    let mut ps = vec![1e-9, 1e-6, 1e-4, 0.01, 0.1, 0.25, 0.5];
    let upper: Vec<f64> = ps.iter().map(|p| 1.0 - p).collect();
    ps.extend(upper);
    for &p in &ps {
        let x = inverse_normal_cdf(p).unwrap();
        assert!(
            (common::oracle_normal_cdf(x) - p).abs() < 1e-9,
            "round trip off at p={p}"
        );
        assert!((normal_cdf(x) - p).abs() < 1e-9);
    }
    // Far lower tail, where only a relative round trip is meaningful.
    // (The upper side is exact reflection; see the antisymmetry test.)
    for &p in &[1e-20, 1e-15, 1e-12] {
        let x = inverse_normal_cdf(p).unwrap();
        assert!(
            ((common::oracle_normal_cdf(x) - p) / p).abs() < 1e-9,
            "relative round trip off at p={p}"
        );
    }
    assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
}

#[test]
fn inverse_normal_cdf_is_antisymmetric() {
    for &p in &[0.01, 0.1, 0.25, 0.3, 0.45] {
        let q = 1.0 - p;
        let a = inverse_normal_cdf(p).unwrap();
        let b = inverse_normal_cdf(q).unwrap();
        assert!((a + b).abs() < 1e-12, "asymmetry at p={p}");
    }
}

#[test]
fn inverse_normal_cdf_rejects_bad_probabilities() {
    for bad in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
        assert!(matches!(
            inverse_normal_cdf(bad),
            Err(Error::InvalidProbability { .. })
        ));
    }
}

#[test]
fn reference_value_1d_matches_closed_form() {
    let truth = PI.sqrt() * (-0.25f64).exp();
    let (value, bound) = keister_reference_with_error(1).unwrap();
    assert!((value - truth).abs() < 1e-10);
    assert!((value - truth).abs() <= bound.max(1e-13));
    assert!(bound < 1e-8);
}

#[test]
fn reference_value_2d_matches_hermite_rule() {
    let oracle = common::oracle_keister_2d_hermite();
    let value = keister_reference(2).unwrap();
    assert!(
        (value - oracle).abs() < 1e-8,
        "quadrature {value} vs hermite {oracle}"
    );
}

#[test]
fn reference_values_match_complex_recursion() {
    for d in 1..=6 {
        let oracle = common::oracle_keister_by_recursion(d);
        let value = keister_reference(d).unwrap();
        assert!(
            (value - oracle).abs() < 1e-9 * oracle.abs().max(1.0),
            "d={d}: {value} vs {oracle}"
        );
    }
}

#[test]
fn reference_values_match_monte_carlo() {
    for d in [4, 8] {
        let (mc, se) = common::oracle_keister_monte_carlo(d, 200_000, 99);
        let value = keister_reference(d).unwrap();
        assert!(
            (value - mc).abs() < 4.0 * se,
            "d={d}: {value} vs {mc} (se {se})"
        );
    }
}

#[test]
fn reference_rejects_out_of_range_dimensions() {
    assert!(matches!(
        keister_reference(0),
        Err(Error::DimensionOutOfRange { .. })
    ));
    assert!(matches!(
        keister_reference(31),
        Err(Error::DimensionOutOfRange { .. })
    ));
}

#[test]
fn reference_csv_shape() {
    let mut out = Vec::new();
    write_reference_csv(&[1, 2, 3], &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,value,abs_error_bound"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for (row, d) in rows.iter().zip([1, 2, 3]) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 3);
        assert_eq!(fields[0], d.to_string());
        let value: f64 = fields[1].parse().unwrap();
        assert!((value - keister_reference(d).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn walsh_polynomial_basics() {
    let empty = WalshPolynomial::new(vec![], 2, 2).unwrap();
    let point = DigitalPoint::from_values(&[0.3, 0.6], 2, 53).unwrap();
    assert_eq!(empty.eval(&point).unwrap(), Complex64::ZERO);
    assert_eq!(empty.integral(), Complex64::ZERO);

    let c = Complex64::new(1.5, -0.5);
    let constant =
        WalshPolynomial::new(vec![(Wavenumber::zero(2), c)], 2, 2).unwrap();
    assert_eq!(constant.eval(&point).unwrap(), c);
    assert_eq!(constant.integral(), c);
    assert_eq!(eval_walsh_poly(&constant, &point).unwrap(), c);

    assert!(matches!(
        WalshPolynomial::new(vec![(Wavenumber::zero(3), c)], 2, 2),
        Err(Error::DimensionMismatch { .. })
    ));
    let nan = Complex64::new(f64::NAN, 0.0);
    assert!(WalshPolynomial::new(vec![(Wavenumber::zero(2), nan)], 2, 2).is_err());
}

fn random_poly(rng: &mut ChaCha12Rng, dimension: usize, base: u32, kmax: u64) -> WalshPolynomial {
    let terms: Vec<(Wavenumber, Complex64)> = (0..12)
        .map(|_| {
            let k = Wavenumber::new(
                (0..dimension).map(|_| rng.random_range(0..kmax)).collect(),
            );
            let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            (k, c)
        })
        .collect();
    WalshPolynomial::new(terms, dimension, base).unwrap()
}

#[test]
fn grid_mean_recovers_integral() {
    // Averaging over the full digit grid integrates any polynomial whose
    // wavenumbers fit inside it.
    let mut rng = ChaCha12Rng::seed_from_u64(21);
    for (dimension, base, g) in [(2usize, 2u32, 4u32), (3, 2, 3), (2, 3, 3)] {
        let kmax = (base as u64).pow(g);
        let poly = random_poly(&mut rng, dimension, base, kmax);
        let precision = if base == 2 { 53 } else { 33 };
        let mean = common::oracle_grid_mean(&poly, g, precision).unwrap();
        assert!(
            (mean - poly.integral()).norm() < 1e-10,
            "grid mean {mean} vs integral {}",
            poly.integral()
        );
    }
}

#[test]
fn slot_spectrum_construction_hits_prescribed_slots() {
    let mut rng = ChaCha12Rng::seed_from_u64(33);
    for dimension in 1..=3usize {
        for mix in [false, true] {
            let gen = apply_scramble(
                &sobol_generator_with(dimension, 12).unwrap(),
                7 + dimension as u64,
            );
            let m_cap = 8u32;
            let mut slots: Vec<(u64, Complex64)> = vec![(0, Complex64::new(0.7, 0.0))];
            let mut used = std::collections::HashSet::from([0u64]);
            while slots.len() < 12 {
                let slot = rng.random_range(0..1u64 << m_cap);
                if used.insert(slot) {
                    slots.push((slot, Complex64::new(rng.random::<f64>() + 0.1, 0.0)));
                }
            }
            let poly =
                WalshPolynomial::from_slot_spectrum(&gen, m_cap, &slots, mix, &mut rng).unwrap();
            assert_eq!(poly.terms().len(), slots.len());
            for ((slot, c), (k, coeff)) in slots.iter().zip(poly.terms()) {
                assert_eq!(nu_map(k, &gen, m_cap).unwrap(), *slot);
                assert_eq!(c, coeff);
                if *slot == 0 {
                    assert!(k.is_zero());
                }
                if !mix {
                    assert!(k.digits[1..].iter().all(|&v| v == 0));
                }
            }
            // The sampled mean over the level-m_cap net sees exactly the
            // slot-0 coefficient: every other slot is outside the dual
            // net.
            let mut samples = Vec::with_capacity(1 << m_cap);
            for i in 0..1u64 << m_cap {
                samples.push(poly.eval(&gen.net_point(i).unwrap()).unwrap().re);
            }
            let mean = sample_mean(&samples, 2).unwrap();
            assert!((mean - 0.7).abs() < 1e-12);
        }
    }
}

#[test]
fn slot_spectrum_construction_rejects_bad_slots() {
    let gen = sobol_generator_with(2, 12).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(0);
    let c = Complex64::new(1.0, 0.0);
    assert!(matches!(
        WalshPolynomial::from_slot_spectrum(&gen, 4, &[(16, c)], false, &mut rng),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(
        WalshPolynomial::from_slot_spectrum(&gen, 4, &[(3, c), (3, c)], false, &mut rng).is_err()
    );
    assert!(matches!(
        WalshPolynomial::from_slot_spectrum(&gen, 13, &[(0, c)], false, &mut rng),
        Err(Error::LevelOutOfRange { .. })
    ));
}

#[test]
fn spectrum_sums_worked_example() {
    // One term at slot 5 (window 3) with |c| = 2, one at slot 1
    // (window 1) with |c| = 0.5, level m = 2: slot 5 is tail mass and
    // folds onto residue 1.
    let gen = sobol_generator_with(1, 10).unwrap();
    let ctx = SlotContext::new(&gen, 6).unwrap();
    let poly = WalshPolynomial::from_slot_spectrum(
        &gen,
        6,
        &[
            (5, Complex64::new(0.0, 2.0)),
            (1, Complex64::new(0.5, 0.0)),
        ],
        false,
        &mut ChaCha12Rng::seed_from_u64(0),
    )
    .unwrap();
    let sums = spectrum_sums(&poly, &ctx, 2).unwrap();
    assert_eq!(sums.m, 2);
    assert_eq!(sums.s[0], 0.0);
    assert_eq!(sums.s[1], 0.5);
    assert_eq!(sums.s[2], 0.0);
    assert_eq!(sums.s[3], 2.0);
    assert_eq!(sums.s_hat[0], 0.0);
    assert_eq!(sums.s_hat[1], 2.0);
    assert_eq!(sums.s_hat[2], 0.0);
    assert_eq!(sums.s_check, 2.0);

    // At level 3 the whole spectrum is below the cap: no tail at all.
    let sums = spectrum_sums(&poly, &ctx, 3).unwrap();
    assert_eq!(sums.s_check, 0.0);
    assert!(sums.s_hat.iter().all(|&v| v == 0.0));

    assert!(matches!(
        spectrum_sums(&poly, &ctx, 7),
        Err(Error::LevelOutOfRange { .. })
    ));
}

#[test]
fn tail_sums_bound_the_net_average_error() {
    // The net average of a Walsh polynomial misses its integral by at
    // most the aliasing mass folded onto slot zero.
    let mut rng = ChaCha12Rng::seed_from_u64(55);
    let gen = apply_scramble(&sobol_generator_with(2, 12).unwrap(), 13);
    let m_cap = 9u32;
    let ctx = SlotContext::new(&gen, m_cap).unwrap();
    let mut slots: Vec<(u64, Complex64)> = Vec::new();
    let mut used = std::collections::HashSet::new();
    while slots.len() < 20 {
        let slot = rng.random_range(0..1u64 << m_cap);
        if used.insert(slot) {
            slots.push((
                slot,
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ));
        }
    }
    let poly = WalshPolynomial::from_slot_spectrum(&gen, m_cap, &slots, true, &mut rng).unwrap();
    for m in 4..=7u32 {
        let sums = spectrum_sums(&poly, &ctx, m).unwrap();
        assert!((sums.s_hat.iter().sum::<f64>() - sums.s_check).abs() < 1e-12);
        let mut acc = Complex64::ZERO;
        for i in 0..1u64 << m {
            acc += poly.eval(&gen.net_point(i).unwrap()).unwrap();
        }
        let mean = acc / (1u64 << m) as f64;
        let error = (mean - poly.integral()).norm();
        assert!(
            error <= sums.s_hat[0] + 1e-12,
            "m={m}: error {error} above fold {}",
            sums.s_hat[0]
        );
    }
}

fn powers_of_two_slots(m_cap: u32, rho: f64, scale: f64) -> Vec<(u64, Complex64)> {
    let mut slots = vec![(0u64, Complex64::new(scale, 0.0))];
    for i in 0..m_cap {
        let window = i + 1;
        slots.push((
            1u64 << i,
            Complex64::new(scale * rho.powi(window as i32), 0.0),
        ));
    }
    slots
}

#[test]
fn cone_check_accepts_matched_decay() {
    let gen = apply_scramble(&sobol_generator_with(2, 14).unwrap(), 3);
    let m_cap = 12u32;
    let rho = 0.4;
    let slots = powers_of_two_slots(m_cap, rho, 1.0);
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let poly = WalshPolynomial::from_slot_spectrum(&gen, m_cap, &slots, false, &mut rng).unwrap();
    let ctx = SlotContext::new(&gen, m_cap).unwrap();

    let hat: OmegaFn = Arc::new(|_| 1.0);
    let ring: OmegaFn = Arc::new(move |g| 1.25 * rho.powi(g as i32 + 1) / (1.0 - rho));
    let cone = ConeSpec::from_omegas(2, 2, 2, hat, ring).unwrap();
    assert!(cone_check(&poly, &cone, &ctx, 4..=m_cap).unwrap());
}

#[test]
fn cone_check_rejects_a_spectral_gap() {
    // Kill the window-5 coefficient while keeping tail mass: the
    // observed sum at l = 5 can no longer dominate the tail, which is
    // exactly what the membership test must detect.
    let gen = apply_scramble(&sobol_generator_with(2, 14).unwrap(), 3);
    let m_cap = 12u32;
    let rho = 0.4;
    let mut slots = powers_of_two_slots(m_cap, rho, 1.0);
    slots.retain(|&(slot, _)| slot != 1 << 4);
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let poly = WalshPolynomial::from_slot_spectrum(&gen, m_cap, &slots, false, &mut rng).unwrap();
    let ctx = SlotContext::new(&gen, m_cap).unwrap();

    let hat: OmegaFn = Arc::new(|_| 1.0);
    let ring: OmegaFn = Arc::new(move |g| 1.25 * rho.powi(g as i32 + 1) / (1.0 - rho));
    let cone = ConeSpec::from_omegas(2, 2, 2, hat, ring).unwrap();
    assert!(!cone_check(&poly, &cone, &ctx, 5..=5).unwrap());
}

#[test]
fn cone_check_requires_explicit_omegas() {
    let gen = sobol_generator_with(2, 12).unwrap();
    let ctx = SlotContext::new(&gen, 8).unwrap();
    let poly = WalshPolynomial::new(
        vec![(Wavenumber::zero(2), Complex64::new(1.0, 0.0))],
        2,
        2,
    )
    .unwrap();
    let cone = ConeSpec::default_for_base(2);
    assert!(matches!(
        cone_check(&poly, &cone, &ctx, 4..=6),
        Err(Error::ExplicitOmegasRequired)
    ));
}

#[test]
fn cone_check_accepts_constant() {
    let gen = sobol_generator_with(2, 12).unwrap();
    let ctx = SlotContext::new(&gen, 8).unwrap();
    let poly = WalshPolynomial::new(
        vec![(Wavenumber::zero(2), Complex64::new(2.5, 0.0))],
        2,
        2,
    )
    .unwrap();
    let hat: OmegaFn = Arc::new(|_| 1.0);
    let ring: OmegaFn = Arc::new(|g| 0.5f64.powi(g as i32));
    let cone = ConeSpec::from_omegas(2, 2, 2, hat, ring).unwrap();
    assert!(cone_check(&poly, &cone, &ctx, 4..=8).unwrap());
}
