//! Adaptive quasi-Monte Carlo cubature on digital sequences.
//!
//! This crate integrates functions over the unit cube `[0,1)^d` by
//! averaging them along a scrambled, digitally shifted Sobol' sequence,
//! doubling the sample size until a data-driven error bound meets the
//! requested tolerance. The bound comes from the discrete Walsh transform
//! of the samples: for integrands whose Walsh spectrum decays in a
//! controlled way (a "cone" of integrands, not a linear space), a window
//! of observed coefficient magnitudes bounds the unobserved spectral
//! tail, and with it the cubature error.
//!
//! The pieces are usable on their own:
//!
//! - [`digital`] — fixed-precision digitwise arithmetic, Sobol'-style
//!   generating matrices, random linear scrambling and digital shifts,
//!   and the wavenumber pairing behind all aliasing arguments.
//! - [`transform`] — the O(n log n) discrete Walsh transform, a
//!   sample-doubling extension that reuses prior work, and the pointer
//!   that tracks coefficient magnitudes across levels.
//! - [`cubature`] — the cone specification, the conservative error
//!   bound, the adaptive loop, and its analytic termination level.
//! - [`integrands`] — the Keister benchmark with an independent
//!   reference oracle, and synthetic Walsh polynomials with exactly
//!   known spectra for end-to-end verification.
//!
//! # Example
//!
//! ```
//! use dscub::{apply_scramble, integrate, sobol_generator, ConeSpec};
//!
//! let gen = apply_scramble(&sobol_generator(2)?, 7);
//! let cone = ConeSpec::default_for_base(2);
//! // ∫ x0·x1 over the unit square = 1/4.
//! let result = integrate(|x| x[0] * x[1], 2, 1e-4, &cone, &gen, 20)?;
//! assert!(result.met_tolerance);
//! assert!((result.estimate - 0.25).abs() < 1e-4);
//! # Ok::<(), dscub::Error>(())
//! ```

pub mod cubature;
pub mod digital;
pub mod error;
pub mod integrands;
pub mod transform;

pub use cubature::{
    error_bound, integrate, sample_mean, guaranteed_stop_level, write_history_csv, ConeSpec,
    CubatureResult, LevelRecord, OmegaFn,
};
pub use digital::{
    apply_scramble, apply_scramble_from_rng, apply_scramble_parts, bilinear, digit_add,
    digit_negate, digit_scale, in_dual_net, load_direction_numbers, load_direction_numbers_with,
    sobol_generator, sobol_generator_with, wavenumber_add, wavenumber_scale, wavenumber_sub,
    DigitalPoint, GeneratorSet, ScrambleMatrix, Wavenumber,
};
pub use error::{Error, Result};
pub use integrands::{
    cone_check, eval_walsh_poly, inverse_normal_cdf, keister, keister_reference, spectrum_sums,
    SlotContext, SpectrumSums, WalshPolynomial,
};
pub use transform::{
    extend_transform, fast_transform, nu_map, tilde_s, update_pointer, TransformState,
};
