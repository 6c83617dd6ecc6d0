//! The cone of trackable integrands, the conservative data-driven error
//! bound, and the adaptive cubature loop.
//!
//! Write `S_l(f)` for the sum of true Walsh coefficient magnitudes with
//! wavenumber rank in `[⌊b^{l-1}⌋, b^l)` and `Š_m(f)` for the whole tail
//! beyond rank `b^m`. The cone consists of integrands whose tail sums are
//! controlled by earlier window sums:
//!
//! ```text
//! Ŝ_{l,m}(f) ≤ ω̂(m-l) Š_m(f)          l ≤ m
//! Š_m(f)    ≤ ω̊(m-l) S_l(f)           l* ≤ l ≤ m
//! ```
//!
//! For such integrands the observable band sum S̃_{m-r,m} (computed from
//! the discrete transform) bounds the unobservable tail, giving the
//! cubature error bound `𝔠(m)·S̃_{m-r,m}` with
//! `𝔠(m) = ω̂(m)ω̊(r)/[1 - ω̂(r)ω̊(r)]`. The adaptive loop doubles the
//! sample size until the bound meets the tolerance.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use crate::digital::GeneratorSet;
use crate::error::{Error, Result};
use crate::transform::{tilde_s, TransformState};

/// Default minimum reliable level l*.
pub const DEFAULT_ELL_STAR: u32 = 6;

/// Default window width r.
pub const DEFAULT_WINDOW: u32 = 4;

/// Default inflation coefficient: 𝔠(m) = 5·b^{-m}.
pub const DEFAULT_INFLATION_COEFF: f64 = 5.0;

/// Shared decay function g ↦ ω(g) used by [`ConeSpec::from_omegas`].
pub type OmegaFn = Arc<dyn Fn(u32) -> f64 + Send + Sync>;

#[derive(Clone)]
enum ConeKind {
    /// 𝔠(m) = coeff·b^{-m}, the recommended production default.
    DefaultInflation { coeff: f64 },
    /// Explicit decay functions, used when a synthetic integrand is
    /// constructed to lie in a known cone.
    ExplicitOmegas {
        omega_hat: OmegaFn,
        omega_ring: OmegaFn,
    },
}

/// Parameters of the cone: minimum reliable level, window width, and the
/// inflation function turning an observed band sum into an error bound.
#[derive(Clone)]
pub struct ConeSpec {
    base: u32,
    ell_star: u32,
    r: u32,
    kind: ConeKind,
}

impl std::fmt::Debug for ConeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut d = f.debug_struct("ConeSpec");
        d.field("base", &self.base)
            .field("ell_star", &self.ell_star)
            .field("r", &self.r);
        match &self.kind {
            ConeKind::DefaultInflation { coeff } => d.field("inflation_coeff", coeff),
            ConeKind::ExplicitOmegas { .. } => d.field("omegas", &"explicit"),
        };
        d.finish()
    }
}

impl ConeSpec {
    /// The recommended defaults: l* = 6, r = 4, 𝔠(m) = 5·b^{-m}.
    pub fn default_for_base(base: u32) -> Self {
        ConeSpec {
            base,
            ell_star: DEFAULT_ELL_STAR,
            r: DEFAULT_WINDOW,
            kind: ConeKind::DefaultInflation {
                coeff: DEFAULT_INFLATION_COEFF,
            },
        }
    }

    /// A default-shaped cone with custom parameters,
    /// 𝔠(m) = coeff·b^{-m}.
    pub fn with_parameters(base: u32, ell_star: u32, r: u32, coeff: f64) -> Result<Self> {
        if ell_star < 1 || r < 1 {
            return Err(Error::InvalidConeParameters {
                reason: format!("need ell_star >= 1 and r >= 1, got {ell_star} and {r}"),
            });
        }
        if !coeff.is_finite() || coeff <= 0.0 {
            return Err(Error::InvalidConeParameters {
                reason: format!("inflation coefficient must be positive, got {coeff}"),
            });
        }
        Ok(ConeSpec {
            base,
            ell_star,
            r,
            kind: ConeKind::DefaultInflation { coeff },
        })
    }

    /// A cone with explicit decay functions ω̂ and ω̊.
    ///
    /// Requires ω̂(r)·ω̊(r) < 1 so that the inflation function is
    /// positive and finite; the inflation is checked non-increasing over
    /// the operating range of levels.
    pub fn from_omegas(
        base: u32,
        ell_star: u32,
        r: u32,
        omega_hat: OmegaFn,
        omega_ring: OmegaFn,
    ) -> Result<Self> {
        if ell_star < 1 || r < 1 {
            return Err(Error::InvalidConeParameters {
                reason: format!("need ell_star >= 1 and r >= 1, got {ell_star} and {r}"),
            });
        }
        let product = omega_hat(r) * omega_ring(r);
        if !(0.0..1.0).contains(&product) {
            return Err(Error::InvalidConeParameters {
                reason: format!("omega_hat(r)*omega_ring(r) = {product} must lie in [0, 1)"),
            });
        }
        let cone = ConeSpec {
            base,
            ell_star,
            r,
            kind: ConeKind::ExplicitOmegas {
                omega_hat,
                omega_ring,
            },
        };
        let mut prev = f64::INFINITY;
        for m in cone.first_check_level()..=cone.first_check_level() + 40 {
            let c = cone.inflation(m);
            if !c.is_finite() || c <= 0.0 || c > prev * (1.0 + 1e-12) {
                return Err(Error::InvalidConeParameters {
                    reason: format!("inflation must stay positive and non-increasing, broken at level {m}"),
                });
            }
            prev = c;
        }
        Ok(cone)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Minimum level below which observed sums are not trusted.
    pub fn ell_star(&self) -> u32 {
        self.ell_star
    }

    /// Window width r: the observed band is `[b^{m-r-1}, b^{m-r})`.
    pub fn window(&self) -> u32 {
        self.r
    }

    /// The first level at which the error bound applies, l* + r.
    pub fn first_check_level(&self) -> u32 {
        self.ell_star + self.r
    }

    /// The inflation factor 𝔠(m) multiplying the observed band sum.
    pub fn inflation(&self, m: u32) -> f64 {
        match &self.kind {
            ConeKind::DefaultInflation { coeff } => coeff * (self.base as f64).powi(-(m as i32)),
            ConeKind::ExplicitOmegas {
                omega_hat,
                omega_ring,
            } => {
                let product = omega_hat(self.r) * omega_ring(self.r);
                omega_hat(m) * omega_ring(self.r) / (1.0 - product)
            }
        }
    }

    /// The product ω̂(r)·ω̊(r) entering the termination bound.
    ///
    /// For the default inflation this is recovered from
    /// 𝔠(r) = ω̂(r)ω̊(r)/[1 - ω̂(r)ω̊(r)].
    pub fn omega_product_r(&self) -> f64 {
        match &self.kind {
            ConeKind::DefaultInflation { .. } => {
                let c_r = self.inflation(self.r);
                c_r / (1.0 + c_r)
            }
            ConeKind::ExplicitOmegas {
                omega_hat,
                omega_ring,
            } => omega_hat(self.r) * omega_ring(self.r),
        }
    }

    /// The explicit decay functions, if this cone carries them.
    pub fn explicit_omegas(&self) -> Option<(&OmegaFn, &OmegaFn)> {
        match &self.kind {
            ConeKind::DefaultInflation { .. } => None,
            ConeKind::ExplicitOmegas {
                omega_hat,
                omega_ring,
            } => Some((omega_hat, omega_ring)),
        }
    }
}

/// One row of the adaptive loop's progress.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub m: u32,
    pub n: u64,
    pub s_tilde: f64,
    pub bound: f64,
    pub elapsed_seconds: f64,
}

/// The outcome of an adaptive cubature run.
#[derive(Debug, Clone)]
pub struct CubatureResult {
    /// The final sample mean.
    pub estimate: f64,
    /// The last error bound 𝔠(m)·S̃_{m-r,m}.
    pub error_bound: f64,
    /// The level at which the loop stopped.
    pub m_final: u32,
    /// Number of integrand evaluations, b^{m_final}.
    pub n: u64,
    /// Whether the bound met the tolerance (false means the budget ran
    /// out).
    pub met_tolerance: bool,
    /// One record per level checked.
    pub history: Vec<LevelRecord>,
}

/// Arithmetic mean of a power-of-b-length sample vector.
pub fn sample_mean(y: &[f64], base: u32) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut cap = 1usize;
    while cap < y.len() {
        cap = cap
            .checked_mul(base as usize)
            .ok_or(Error::NotPowerOfBase {
                count: y.len(),
                base,
            })?;
    }
    if cap != y.len() {
        return Err(Error::NotPowerOfBase {
            count: y.len(),
            base,
        });
    }
    Ok(y.iter().sum::<f64>() / y.len() as f64)
}

/// The conservative error bound 𝔠(m)·S̃ for an observed band sum S̃ at
/// level m.
pub fn error_bound(s_tilde: f64, m: u32, cone: &ConeSpec) -> Result<f64> {
    if m < cone.first_check_level() {
        return Err(Error::LevelOutOfRange {
            level: m,
            limit: cone.first_check_level(),
        });
    }
    Ok(cone.inflation(m) * s_tilde)
}

/// Adaptive cubature of `f` over `[0,1)^d` along the generator's digital
/// sequence.
///
/// Starting from `n = b^{l*+r}` points, each iteration computes the
/// discrete transform of the samples, reads off the observed band sum
/// S̃_{m-r,m} through the magnitude pointer, and stops as soon as
/// `𝔠(m)·S̃_{m-r,m} ≤ ε`. Otherwise the sample size is multiplied by b,
/// reusing all previous evaluations and transform work. On budget
/// exhaustion the last estimate is returned with `met_tolerance` unset
/// rather than as an error.
pub fn integrate<F>(
    mut f: F,
    dimension: usize,
    tolerance: f64,
    cone: &ConeSpec,
    gen: &GeneratorSet,
    m_max: u32,
) -> Result<CubatureResult>
where
    F: FnMut(&[f64]) -> f64,
{
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(Error::InvalidTolerance { value: tolerance });
    }
    if dimension != gen.dimension() {
        return Err(Error::DimensionMismatch {
            left: dimension,
            right: gen.dimension(),
        });
    }
    if cone.base() != gen.base() {
        return Err(Error::BaseMismatch {
            left: cone.base(),
            right: gen.base(),
        });
    }
    let m_start = cone.first_check_level();
    if m_max < m_start || m_max > gen.max_log_n() {
        return Err(Error::LevelOutOfRange {
            level: m_max,
            limit: gen.max_log_n(),
        });
    }

    let clock = Instant::now();
    let b = gen.base() as u64;
    let mut samples = Vec::with_capacity(b.pow(m_start) as usize);
    let mut bad_index: Option<u64> = None;
    gen.stream_points(m_start, true, |i, x| {
        if bad_index.is_some() {
            samples.push(0.0);
            return;
        }
        let v = f(x);
        if !v.is_finite() {
            bad_index = Some(i);
        }
        samples.push(v);
    })?;
    if let Some(index) = bad_index {
        return Err(Error::NonFiniteSample { index });
    }
    let mut state = TransformState::from_real(&samples, gen.base(), cone.window())?;
    drop(samples);

    let mut history = Vec::new();
    loop {
        let m = state.level();
        let s_tilde = tilde_s(&state, m - cone.window(), m)?;
        let bound = error_bound(s_tilde, m, cone)?;
        let n = b.pow(m);
        history.push(LevelRecord {
            m,
            n,
            s_tilde,
            bound,
            elapsed_seconds: clock.elapsed().as_secs_f64(),
        });
        let met = bound <= tolerance;
        if met || m == m_max {
            return Ok(CubatureResult {
                estimate: state.mean().re,
                error_bound: bound,
                m_final: m,
                n,
                met_tolerance: met,
                history,
            });
        }
        let mut block = Vec::with_capacity((n * (b - 1)) as usize);
        gen.stream_point_range(n, n * b, true, |i, x| {
            if bad_index.is_some() {
                block.push(0.0);
                return;
            }
            let v = f(x);
            if !v.is_finite() {
                bad_index = Some(i);
            }
            block.push(v);
        })?;
        if let Some(index) = bad_index {
            return Err(Error::NonFiniteSample { index });
        }
        state.extend_real(&block)?;
    }
}

/// The termination level promised for a cone member with window sums
/// `s_values[l] = S_l(f)`: the smallest `m' ≥ l* + r` with
/// `𝔠(m')·[1 + ω̂(r)ω̊(r)]·S_{m'-r} ≤ ε`, or `None` when no level in the
/// covered range qualifies.
pub fn guaranteed_stop_level(s_values: &[f64], tolerance: f64, cone: &ConeSpec) -> Result<Option<u32>> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(Error::InvalidTolerance { value: tolerance });
    }
    let factor = 1.0 + cone.omega_product_r();
    for m_prime in cone.first_check_level().. {
        let Some(&s) = s_values.get((m_prime - cone.window()) as usize) else {
            return Ok(None);
        };
        if cone.inflation(m_prime) * factor * s <= tolerance {
            return Ok(Some(m_prime));
        }
    }
    Ok(None)
}

/// Writes the per-level history as CSV with header
/// `m,n,S_tilde,bound,elapsed_seconds`. With `include_timing` unset the
/// elapsed column is written as zero so runs are byte-reproducible.
pub fn write_history_csv<W: Write>(
    result: &CubatureResult,
    mut out: W,
    include_timing: bool,
) -> std::io::Result<()> {
    writeln!(out, "m,n,S_tilde,bound,elapsed_seconds")?;
    for rec in &result.history {
        let elapsed = if include_timing {
            rec.elapsed_seconds
        } else {
            0.0
        };
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.6}",
            rec.m, rec.n, rec.s_tilde, rec.bound, elapsed
        )?;
    }
    Ok(())
}
