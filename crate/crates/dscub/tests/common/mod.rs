//! Shared oracles: independent reference implementations used to verify
//! the library. Everything here is deliberately written from definitions
//! (double sums, series, recursions, dense quadrature) without touching
//! the library's own fast paths.
#![allow(dead_code)]

use num_complex::Complex64;

/// The discrete Walsh transform straight from its double-sum definition,
/// O(b^{2m}).
pub fn oracle_transform(y: &[Complex64], base: u32) -> Vec<Complex64> {
    let n = y.len();
    let b = base as u64;
    let mut m = 0u32;
    let mut cap = 1usize;
    while cap < n {
        cap *= base as usize;
        m += 1;
    }
    assert_eq!(cap, n, "oracle needs a power-of-base sample count");
    (0..n)
        .map(|nu| {
            let mut acc = Complex64::ZERO;
            for (i, &yi) in y.iter().enumerate() {
                let mut dots = 0u64;
                let (mut nu_rem, mut i_rem) = (nu as u64, i as u64);
                for _ in 0..m {
                    dots += (nu_rem % b) * (i_rem % b);
                    nu_rem /= b;
                    i_rem /= b;
                }
                let angle = -2.0 * std::f64::consts::PI * (dots % b) as f64 / b as f64;
                acc += yi * Complex64::from_polar(1.0, angle);
            }
            acc / n as f64
        })
        .collect()
}

/// erf by Maclaurin series, good to ~1e-11 absolute for |x| <= 4.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= -x * x / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1e-300) || n > 200 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// erfc by Lentz continued fraction, for x >= 4.
fn erfc_fraction(x: f64) -> f64 {
    // erfc(x) = e^{-x^2}/(x sqrt(pi)) * 1/(1 + a1/(1 + a2/(1 + ...))),
    // a_n = n / (2 x^2).
    let tiny = 1e-300;
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    let half_inv = 0.5 / (x * x);
    for n in 0..200 {
        let a = if n == 0 { 1.0 } else { n as f64 * half_inv };
        let b = 1.0;
        d = b + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (x * std::f64::consts::PI.sqrt()) * f
}

/// The standard normal CDF from series/continued-fraction erf, written
/// independently of the library's erfc-based version.
pub fn oracle_normal_cdf(x: f64) -> f64 {
    let arg = -x / std::f64::consts::SQRT_2;
    // Phi(x) = 0.5 * erfc(arg)
    if arg >= 4.0 {
        0.5 * erfc_fraction(arg)
    } else if arg <= -4.0 {
        1.0 - 0.5 * erfc_fraction(-arg)
    } else {
        0.5 * (1.0 - erf_series(arg))
    }
}

/// Dawson's function by Maclaurin series; used only at small arguments.
fn dawson_series(x: f64) -> f64 {
    // D(x) = sum_k (-1)^k 2^k x^{2k+1} / (2k+1)!!
    let mut term = x;
    let mut sum = x;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= -2.0 * x * x / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 {
            return sum;
        }
    }
}

/// The radial Gaussian-cosine moments K_d = ∫_0^∞ e^{-r²} e^{ir} r^{d-1} dr
/// by the integration-by-parts recursion
/// K_d = (d-2)/2 · K_{d-2} + (i/2) · K_{d-1}, seeded by
/// K_1 = (√π/2)e^{-1/4} + i·D(1/2) and K_2 = 1/2 + (i/2)·K_1.
///
/// The Keister integral is I(d) = (2 π^{d/2} / Γ(d/2)) · Re K_d.
pub fn oracle_keister_by_recursion(d: usize) -> f64 {
    assert!(d >= 1);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let k1 = Complex64::new(0.5 * sqrt_pi * (-0.25f64).exp(), dawson_series(0.5));
    let k2 = Complex64::new(0.5, 0.0) + Complex64::new(0.0, 0.5) * k1;
    let mut moments = vec![k1, k2];
    for n in 3..=d {
        let prev2 = moments[n - 3];
        let prev1 = moments[n - 2];
        moments.push(prev2 * ((n as f64 - 2.0) / 2.0) + Complex64::new(0.0, 0.5) * prev1);
    }
    let mut gamma = if d % 2 == 1 { sqrt_pi } else { 1.0 };
    let mut arg = if d % 2 == 1 { 0.5 } else { 1.0 };
    while arg < 0.5 * d as f64 {
        gamma *= arg;
        arg += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(0.5 * d as f64) / gamma * moments[d - 1].re
}

/// Gauss-Hermite nodes/weights for weight e^{-t²}, found by scanning for
/// sign changes of H_n on a grid and polishing with Newton.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let hermite = |t: f64| -> (f64, f64) {
        // returns (H_n(t), H_{n-1}(t))
        let mut h0 = 1.0f64;
        let mut h1 = 2.0 * t;
        if n == 0 {
            return (h0, 0.0);
        }
        for k in 1..n {
            let h2 = 2.0 * t * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        (h1, h0)
    };
    let hi = (2.0 * n as f64 + 1.0).sqrt() + 2.0;
    let steps = 20_000;
    let mut roots = Vec::with_capacity(n);
    let mut prev_t = -hi;
    let mut prev_v = hermite(prev_t).0;
    for s in 1..=steps {
        let t = -hi + 2.0 * hi * s as f64 / steps as f64;
        let v = hermite(t).0;
        if prev_v == 0.0 || (prev_v < 0.0) != (v < 0.0) {
            let mut x = 0.5 * (prev_t + t);
            for _ in 0..60 {
                let (h, hm1) = hermite(x);
                let dh = 2.0 * n as f64 * hm1;
                let dx = h / dh;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            roots.push(x);
        }
        prev_t = t;
        prev_v = v;
    }
    assert_eq!(roots.len(), n, "missed Hermite roots");
    let mut log_coeff = (n as f64 - 1.0) * 2.0f64.ln() + std::f64::consts::PI.sqrt().ln();
    for k in 1..=n {
        log_coeff += (k as f64).ln();
    }
    roots
        .into_iter()
        .map(|x| {
            let (_, hm1) = hermite(x);
            let w = (log_coeff - 2.0 * hm1.abs().ln()).exp() / (n as f64 * n as f64);
            (x, w)
        })
        .collect()
}

/// The d=2 Keister value by tensor Gauss-Hermite:
/// I(2) = ∫∫ e^{-s²-t²} cos(√(s²+t²)) ds dt.
pub fn oracle_keister_2d_hermite() -> f64 {
    let rule = gauss_hermite(40);
    let mut total = 0.0;
    for &(s, ws) in &rule {
        for &(t, wt) in &rule {
            total += ws * wt * (s * s + t * t).sqrt().cos();
        }
    }
    total
}

/// Plain Monte Carlo for the Keister integral with seeded Box-Muller
/// normals (independent of any inverse-CDF code). Returns (estimate,
/// standard_error).
pub fn oracle_keister_monte_carlo(d: usize, samples: usize, seed: u64) -> (f64, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut normals = Vec::with_capacity(d + 1);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let prefactor = std::f64::consts::PI.powf(0.5 * d as f64);
    for _ in 0..samples {
        normals.clear();
        while normals.len() < d {
            let u1: f64 = rng.random::<f64>().max(1e-300);
            let u2: f64 = rng.random();
            let radius = (-2.0 * u1.ln()).sqrt();
            let angle = 2.0 * std::f64::consts::PI * u2;
            normals.push(radius * angle.cos());
            normals.push(radius * angle.sin());
        }
        let norm_sq: f64 = normals[..d].iter().map(|z| z * z).sum();
        let value = prefactor * (0.5 * norm_sq).sqrt().cos();
        sum += value;
        sum_sq += value * value;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0) / (samples as f64 - 1.0);
    (mean, var.sqrt())
}

/// Mean of a Walsh polynomial over the full tensor grid with g digits per
/// coordinate: b^{gd} points. Equals the true integral exactly whenever
/// every wavenumber digit sits below position g (finite character sums).
pub fn oracle_grid_mean(
    poly: &dscub::WalshPolynomial,
    g: u32,
    precision: u32,
) -> dscub::Result<Complex64> {
    let b = poly.base() as u64;
    let d = poly.dimension();
    let per_coord = b.pow(g);
    let total = per_coord.pow(d as u32);
    let mut acc = Complex64::ZERO;
    let scale_num = b.pow(precision - g);
    for flat in 0..total {
        let mut rem = flat;
        let mut coords = Vec::with_capacity(d);
        for _ in 0..d {
            coords.push((rem % per_coord) * scale_num);
            rem /= per_coord;
        }
        let point = dscub::DigitalPoint::from_encodings(coords, poly.base(), precision)?;
        acc += poly.eval(&point)?;
    }
    Ok(acc / total as f64)
}
