//! Benchmark and test integrands: the Keister function with its Gaussian
//! change of variables, an independent reference oracle for its true
//! value, and synthetic Walsh polynomials whose spectra (hence integrals
//! and error behavior) are known exactly.

mod normal;
mod reference;
mod walsh;

pub use normal::{inverse_normal_cdf, normal_cdf};
pub use reference::{
    keister_reference, keister_reference_with_error, write_reference_csv, KEISTER_MAX_DIMENSION,
};
pub use walsh::{
    cone_check, eval_walsh_poly, spectrum_sums, SlotContext, SpectrumSums, WalshPolynomial,
};

/// Smallest probability fed to the inverse normal CDF; cube coordinates
/// are clamped into `[2^-53, 1 - 2^-53]` so the transform never sees an
/// exact 0 or 1.
pub const KEISTER_CLAMP: f64 = 0.5 * f64::EPSILON;

/// The Keister test integrand on the unit cube:
/// `π^{d/2} · cos(‖Φ⁻¹(x)‖ / √2)`, where Φ⁻¹ acts coordinatewise.
///
/// Its integral over `[0,1)^d` equals the Gaussian integral
/// `π^{d/2} E[cos(‖Z‖/√2)]`, available independently through
/// [`keister_reference`].
pub fn keister(x: &[f64]) -> f64 {
    let mut sum_sq = 0.0;
    for &xj in x {
        let p = xj.clamp(KEISTER_CLAMP, 1.0 - KEISTER_CLAMP);
        let z = inverse_normal_cdf(p).expect("clamped probability is interior");
        sum_sq += z * z;
    }
    let radius = (0.5 * sum_sq).sqrt();
    std::f64::consts::PI.powf(0.5 * x.len() as f64) * radius.cos()
}
