//! The fast discrete Walsh transform over base-b digit strings, its
//! sample-doubling extension, and the data-driven pointer that orders
//! transform slots by observed coefficient size.
//!
//! For `n = b^m` samples the transform computes
//!
//! ```text
//! Y_ν = (1/b^m) Σ_i exp(-2πi Σ_l ν_l i_l / b) · y_i
//! ```
//!
//! where `ν_l`, `i_l` are the base-b digits of the slot and sample indices.
//! The kernel couples digit `l` of `ν` with digit `l` of `i`, so the
//! transform is an m-fold tensor power of the b-point DFT and is computed
//! in natural order with no index reversal, one digit position per stage.
//!
//! When the samples are taken along a digital sequence, slot `ν` carries
//! the aliased Walsh coefficient of every wavenumber `k` with
//! `nu_map(k, gen, m) = ν`, up to a unimodular factor coming from the
//! digital shift. The pointer reorders slots so that band sums over the
//! pointer approximate sums of true coefficients ordered by magnitude.

use std::io::Write;

use num_complex::Complex64;

use crate::digital::{bilinear, GeneratorSet, Wavenumber};
use crate::error::{Error, Result};

/// Number of base-b digits of `n`, erroring unless `n` is a power of b.
fn exact_log(n: usize, base: u32) -> Result<u32> {
    let mut m = 0u32;
    let mut cap = 1usize;
    while cap < n {
        cap = cap
            .checked_mul(base as usize)
            .ok_or(Error::NotPowerOfBase { count: n, base })?;
        m += 1;
    }
    if cap != n {
        return Err(Error::NotPowerOfBase { count: n, base });
    }
    Ok(m)
}

/// In-place unnormalized stages: one b-point DFT across each digit
/// position. `data.len()` must be a power of b.
fn butterfly_stages(data: &mut [Complex64], base: u32, m: u32) {
    if base == 2 {
        for stage in 0..m {
            let stride = 1usize << stage;
            let step = stride << 1;
            for block in (0..data.len()).step_by(step) {
                for off in block..block + stride {
                    let u = data[off];
                    let v = data[off + stride];
                    data[off] = u + v;
                    data[off + stride] = u - v;
                }
            }
        }
        return;
    }
    let b = base as usize;
    let omega: Vec<Complex64> = (0..b)
        .map(|j| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / b as f64))
        .collect();
    let mut scratch = vec![Complex64::ZERO; b];
    for stage in 0..m {
        let stride = b.pow(stage);
        let step = stride * b;
        for block in (0..data.len()).step_by(step) {
            for off in block..block + stride {
                for (c, s) in scratch.iter_mut().enumerate() {
                    *s = data[off + c * stride];
                }
                for c_out in 0..b {
                    let mut acc = Complex64::ZERO;
                    for (c, s) in scratch.iter().enumerate() {
                        acc += omega[c_out * c % b] * s;
                    }
                    data[off + c_out * stride] = acc;
                }
            }
        }
    }
}

/// The normalized discrete Walsh transform of `b^m` samples, O(m b^m).
pub fn fast_transform(y: &[Complex64], base: u32) -> Result<Vec<Complex64>> {
    let m = exact_log(y.len(), base)?;
    let mut data = y.to_vec();
    butterfly_stages(&mut data, base, m);
    let scale = 1.0 / y.len() as f64;
    for v in &mut data {
        *v *= scale;
    }
    Ok(data)
}

/// The same transform evaluated from the double-sum definition, O(b^{2m}).
///
/// Kept as a readable reference for benchmarks and cross-checks; do not
/// call it above a few thousand samples.
pub fn direct_transform(y: &[Complex64], base: u32) -> Result<Vec<Complex64>> {
    let m = exact_log(y.len(), base)?;
    let n = y.len();
    let b = base as u64;
    let omega: Vec<Complex64> = (0..base)
        .map(|j| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / base as f64))
        .collect();
    let mut out = vec![Complex64::ZERO; n];
    for (nu, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::ZERO;
        for (i, &yi) in y.iter().enumerate() {
            let mut phase = 0u64;
            let (mut nu_rem, mut i_rem) = (nu as u64, i as u64);
            for _ in 0..m {
                phase += (nu_rem % b) * (i_rem % b);
                nu_rem /= b;
                i_rem /= b;
            }
            acc += omega[(phase % b) as usize] * yi;
        }
        *slot = acc / n as f64;
    }
    Ok(out)
}

/// Transform coefficients, magnitude-ordering pointer, and retained
/// samples for one adaptive run at its current level.
#[derive(Debug, Clone)]
pub struct TransformState {
    base: u32,
    level: u32,
    window: u32,
    coeffs: Vec<Complex64>,
    pointer: Vec<u32>,
    samples: Vec<Complex64>,
}

impl TransformState {
    /// Builds the state from `b^m` samples by folding the one-level
    /// extension, so the pointer is the same as if the samples had
    /// arrived incrementally.
    pub fn new(samples: &[Complex64], base: u32, window: u32) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidConeParameters {
                reason: "pointer window width must be at least 1".into(),
            });
        }
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let m = exact_log(samples.len(), base)?;
        let mut state = TransformState {
            base,
            level: 0,
            window,
            coeffs: vec![samples[0]],
            pointer: vec![0],
            samples: vec![samples[0]],
        };
        let b = base as usize;
        for l in 0..m {
            let lo = b.pow(l);
            let hi = b.pow(l + 1);
            state.extend(&samples[lo..hi])?;
        }
        Ok(state)
    }

    /// [`TransformState::new`] over real-valued samples.
    pub fn from_real(samples: &[f64], base: u32, window: u32) -> Result<Self> {
        let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(&complex, base, window)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Current level m; the state holds `b^m` samples.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Pointer window width r.
    pub fn window(&self) -> u32 {
        self.window
    }

    /// Transform coefficients Y, indexed by slot.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Magnitude-ordering pointer; entry κ names the slot holding the
    /// κ-th largest-by-heuristic coefficient.
    pub fn pointer(&self) -> &[u32] {
        &self.pointer
    }

    /// Retained samples in index order.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// The sample mean, slot 0 of the transform.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Advances the state one level with `b^m (b-1)` new samples.
    ///
    /// Only the new samples are transformed (reusing the old coefficients
    /// for the completed prefix), then one combining stage couples the new
    /// top digit, costing O((m+1) b^m (b-1) + b^{m+1}) rather than a full
    /// recompute.
    pub fn extend(&mut self, new_samples: &[Complex64]) -> Result<()> {
        let b = self.base as usize;
        let block = self.coeffs.len();
        let expected = block * (b - 1);
        if new_samples.len() != expected {
            return Err(Error::ExtensionSizeMismatch {
                level: self.level,
                expected,
                got: new_samples.len(),
            });
        }
        if block * b > u32::MAX as usize {
            return Err(Error::LevelOutOfRange {
                level: self.level + 1,
                limit: 32,
            });
        }
        let mut next = vec![Complex64::ZERO; block * b];
        if self.base == 2 {
            let mut t = new_samples.to_vec();
            butterfly_stages(&mut t, 2, self.level);
            let scale = 1.0 / block as f64;
            for nu in 0..block {
                let half_t = t[nu] * scale;
                let y = self.coeffs[nu];
                next[nu] = (y + half_t) * 0.5;
                next[nu + block] = (y - half_t) * 0.5;
            }
        } else {
            let sub: Vec<Vec<Complex64>> = (0..b - 1)
                .map(|c| {
                    let mut t = new_samples[c * block..(c + 1) * block].to_vec();
                    butterfly_stages(&mut t, self.base, self.level);
                    let scale = 1.0 / block as f64;
                    for v in &mut t {
                        *v *= scale;
                    }
                    t
                })
                .collect();
            let omega: Vec<Complex64> = (0..self.base as usize)
                .map(|j| {
                    Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * j as f64 / self.base as f64,
                    )
                })
                .collect();
            for nu in 0..block {
                for c_top in 0..b {
                    let mut acc = self.coeffs[nu];
                    for (c, t) in sub.iter().enumerate() {
                        acc += omega[c_top * (c + 1) % b] * t[nu];
                    }
                    next[nu + c_top * block] = acc / b as f64;
                }
            }
        }
        let pointer = compute_pointer(&next, self.base, self.window, &self.pointer);
        self.samples.extend_from_slice(new_samples);
        self.coeffs = next;
        self.pointer = pointer;
        self.level += 1;
        Ok(())
    }

    /// [`TransformState::extend`] over real-valued samples.
    pub fn extend_real(&mut self, new_samples: &[f64]) -> Result<()> {
        let complex: Vec<Complex64> = new_samples
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.extend(&complex)
    }
}

/// Consuming form of [`TransformState::extend`], returning the advanced
/// state.
pub fn extend_transform(
    mut state: TransformState,
    new_samples: &[Complex64],
) -> Result<TransformState> {
    state.extend(new_samples)?;
    Ok(state)
}

/// The slot index that carries wavenumber `k` at level `m`:
/// `Σ_{l<m} ⟨k, z_{b^l}⟩ b^l`, pairing `k` with each basis point.
pub fn nu_map(k: &Wavenumber, gen: &GeneratorSet, m: u32) -> Result<u64> {
    if m > gen.max_log_n() {
        return Err(Error::LevelOutOfRange {
            level: m,
            limit: gen.max_log_n(),
        });
    }
    let mut nu = 0u64;
    let mut place = 1u64;
    for level in 0..m {
        let pairing = bilinear(k, &gen.basis_point(level)?)?;
        nu += pairing as u64 * place;
        place *= gen.base() as u64;
    }
    Ok(nu)
}

/// Recomputes the pointer for `state`'s level from the prior-level
/// pointer.
///
/// Initializes from `prior` extended by the identity on the new upper
/// half, then for each digit position from `m-1` down to `max(1, m-r)`
/// and each κ in `[1, b^l)` swaps slot κ with whichever of the candidates
/// `κ + a b^l` currently shows the largest coefficient magnitude (ties
/// keep the smallest `a`, so `a* = 0` is a no-op).
pub fn update_pointer(state: &TransformState, prior: &[u32]) -> Result<Vec<u32>> {
    let n = state.coefficients().len();
    if state.level() == 0 {
        return Ok(vec![0]);
    }
    if prior.len() * state.base() as usize != n {
        return Err(Error::ExtensionSizeMismatch {
            level: state.level(),
            expected: n / state.base() as usize,
            got: prior.len(),
        });
    }
    Ok(compute_pointer(
        state.coefficients(),
        state.base(),
        state.window(),
        prior,
    ))
}

fn compute_pointer(coeffs: &[Complex64], base: u32, window: u32, prior: &[u32]) -> Vec<u32> {
    let n = coeffs.len();
    let b = base as usize;
    let m = {
        let mut m = 0u32;
        let mut cap = 1usize;
        while cap < n {
            cap *= b;
            m += 1;
        }
        m
    };
    let mut pointer = Vec::with_capacity(n);
    pointer.extend_from_slice(prior);
    pointer.extend(prior.len() as u32..n as u32);
    if m < 2 {
        return pointer;
    }
    let low = if m > window { m - window } else { 1 };
    for l in (low..=m - 1).rev() {
        let stride = b.pow(l);
        for kappa in 1..stride {
            let mut best_a = 0usize;
            let mut best = coeffs[pointer[kappa] as usize].norm_sqr();
            for a in 1..b {
                let cand = coeffs[pointer[kappa + a * stride] as usize].norm_sqr();
                if cand > best {
                    best = cand;
                    best_a = a;
                }
            }
            if best_a != 0 {
                pointer.swap(kappa, kappa + best_a * stride);
            }
        }
    }
    pointer
}

/// Sum of coefficient magnitudes over the pointer band
/// `κ ∈ [⌊b^{l-1}⌋, b^l)` at level `m`.
///
/// Magnitudes are invariant under the digital shift, so no phase
/// correction is needed.
pub fn tilde_s(state: &TransformState, ell: u32, m: u32) -> Result<f64> {
    if m != state.level() || ell > m {
        return Err(Error::LevelOutOfRange {
            level: ell.max(m),
            limit: state.level(),
        });
    }
    let b = state.base() as usize;
    let lo = if ell == 0 { 0 } else { b.pow(ell - 1) };
    let hi = b.pow(ell);
    Ok(state.pointer()[lo..hi]
        .iter()
        .map(|&nu| state.coefficients()[nu as usize].norm())
        .sum())
}

/// Writes the coefficients as CSV with header `nu,re,im,abs`.
pub fn write_coefficients_csv<W: Write>(state: &TransformState, mut out: W) -> std::io::Result<()> {
    writeln!(out, "nu,re,im,abs")?;
    for (nu, c) in state.coefficients().iter().enumerate() {
        writeln!(out, "{nu},{:.16e},{:.16e},{:.16e}", c.re, c.im, c.norm())?;
    }
    Ok(())
}

/// Writes the pointer as CSV with header `kappa,nu`.
pub fn write_pointer_csv<W: Write>(state: &TransformState, mut out: W) -> std::io::Result<()> {
    writeln!(out, "kappa,nu")?;
    for (kappa, nu) in state.pointer().iter().enumerate() {
        writeln!(out, "{kappa},{nu}")?;
    }
    Ok(())
}
