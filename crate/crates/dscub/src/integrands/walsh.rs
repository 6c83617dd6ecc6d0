//! Finite Walsh polynomials with exactly known spectra.
//!
//! A Walsh polynomial is a finite sum `f(x) = Σ c_k e^{2πi⟨k,x⟩/b}` over
//! wavenumbers `k`. Its integral over the cube is the `k = 0` coefficient,
//! every aliasing relation can be enumerated term by term, and the window
//! sums entering the cone conditions are finite sums of `|c_k|`. That
//! makes these polynomials the ground truth for testing the transform,
//! the error identity, and the adaptive loop's guarantee.
//!
//! Spectra are specified per slot: a term is placed by prescribing the
//! level-`m_cap` transform slot its wavenumber must occupy, and a concrete
//! wavenumber is then solved for from the generator's own matrices. Slot
//! indices double as the magnitude ranks in the window sums, which is
//! exact as long as the prescribed magnitudes are non-increasing in slot
//! index.

use num_complex::Complex64;
use rand::Rng;

use crate::cubature::ConeSpec;
use crate::digital::{bilinear, DigitalPoint, GeneratorSet, Wavenumber};
use crate::error::{Error, Result};
use crate::transform::nu_map;

/// A finite Walsh polynomial: terms `(k, c_k)` in dimension `d`, base `b`.
#[derive(Debug, Clone)]
pub struct WalshPolynomial {
    terms: Vec<(Wavenumber, Complex64)>,
    dimension: usize,
    base: u32,
}

impl WalshPolynomial {
    pub fn new(terms: Vec<(Wavenumber, Complex64)>, dimension: usize, base: u32) -> Result<Self> {
        for (k, c) in &terms {
            if k.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    left: k.dimension(),
                    right: dimension,
                });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteSample { index: 0 });
            }
        }
        Ok(Self {
            terms,
            dimension,
            base,
        })
    }

    pub fn terms(&self) -> &[(Wavenumber, Complex64)] {
        &self.terms
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// The exact integral over the cube: the coefficient at `k = 0`.
    pub fn integral(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.is_zero())
            .map(|&(_, c)| c)
            .sum()
    }

    /// Evaluates the polynomial at a digital point.
    pub fn eval(&self, x: &DigitalPoint) -> Result<Complex64> {
        let mut acc = Complex64::ZERO;
        for (k, c) in &self.terms {
            let pairing = bilinear(k, x)?;
            if self.base == 2 {
                acc += if pairing == 0 { *c } else { -*c };
            } else {
                let angle = 2.0 * std::f64::consts::PI * pairing as f64 / self.base as f64;
                acc += c * Complex64::from_polar(1.0, angle);
            }
        }
        Ok(acc)
    }

    /// Evaluates at raw coordinates by snapping them to the nearest
    /// point of the given digit precision.
    pub fn eval_values(&self, x: &[f64], precision: u32) -> Result<Complex64> {
        let point = DigitalPoint::from_values(x, self.base, precision)?;
        self.eval(&point)
    }

    /// Builds a polynomial whose wavenumbers land on prescribed
    /// level-`m_cap` slots of `gen`, one term per slot.
    ///
    /// Digit `l` of a term's slot equals the pairing of its wavenumber
    /// with basis point `z_{b^l}`. Restricted to coordinate 1, whose
    /// generating matrix is unit lower-triangular (van der Corput, times
    /// a unit lower-triangular scramble), those pairings form a unit
    /// upper-triangular system in the wavenumber digits, solved here by
    /// back-substitution. With `mix_coords` set, coordinates 2..d first
    /// receive random digits from `rng` and coordinate 1 compensates, so
    /// the polynomial depends on every coordinate while still hitting the
    /// prescribed slots. Slot 0 always gets the zero wavenumber, keeping
    /// the slot-0 coefficient equal to the integral.
    pub fn from_slot_spectrum<R: Rng>(
        gen: &GeneratorSet,
        m_cap: u32,
        slots: &[(u64, Complex64)],
        mix_coords: bool,
        rng: &mut R,
    ) -> Result<Self> {
        if m_cap > gen.max_log_n() || m_cap > gen.precision() {
            return Err(Error::LevelOutOfRange {
                level: m_cap,
                limit: gen.max_log_n().min(gen.precision()),
            });
        }
        let b = gen.base() as u64;
        let cap = b.pow(m_cap);
        let d = gen.dimension();

        // Pairing digits of coordinate 1: matrix[l][q] multiplies
        // wavenumber digit q in slot digit l.
        let matrix: Vec<Vec<u64>> = (0..m_cap)
            .map(|l| {
                let col = gen.basis_point(l)?;
                Ok((0..m_cap).map(|q| col.digit(0, q + 1)).collect())
            })
            .collect::<Result<_>>()?;
        for (l, row) in matrix.iter().enumerate() {
            if row[l] != 1 || row[..l].iter().any(|&v| v != 0) {
                return Err(Error::InvalidConeParameters {
                    reason: "coordinate 1 generating matrix is not unit lower-triangular".into(),
                });
            }
        }

        let mut seen = std::collections::HashSet::new();
        let mut terms = Vec::with_capacity(slots.len());
        for &(slot, coeff) in slots {
            if slot >= cap {
                return Err(Error::IndexOutOfRange {
                    index: slot,
                    m_max: m_cap,
                });
            }
            if !seen.insert(slot) {
                return Err(Error::InvalidConeParameters {
                    reason: format!("slot {slot} prescribed twice"),
                });
            }
            if slot == 0 {
                terms.push((Wavenumber::zero(d), coeff));
                continue;
            }
            let mut digits = vec![0u64; d];
            let mut target: Vec<u64> = (0..m_cap).map(|l| slot / b.pow(l) % b).collect();
            if mix_coords && d > 1 {
                for coord_digits in digits.iter_mut().skip(1) {
                    *coord_digits = rng.random_range(0..cap);
                }
                let partial = Wavenumber::new(digits.clone());
                for (l, t) in target.iter_mut().enumerate() {
                    let pairing = bilinear(&partial, &gen.basis_point(l as u32)?)? as u64;
                    *t = (*t + b - pairing) % b;
                }
            }
            let mut a = vec![0u64; m_cap as usize];
            for l in (0..m_cap as usize).rev() {
                let mut acc = 0u64;
                for q in l + 1..m_cap as usize {
                    acc += matrix[l][q] * a[q];
                }
                a[l] = (target[l] + b - acc % b) % b;
            }
            digits[0] = a
                .iter()
                .enumerate()
                .map(|(q, &aq)| aq * b.pow(q as u32))
                .sum();
            let k = Wavenumber::new(digits);
            debug_assert_eq!(nu_map(&k, gen, m_cap)?, slot);
            terms.push((k, coeff));
        }
        WalshPolynomial::new(terms, d, gen.base())
    }
}

/// Evaluates a Walsh polynomial at a digital point.
pub fn eval_walsh_poly(p: &WalshPolynomial, x: &DigitalPoint) -> Result<Complex64> {
    p.eval(x)
}

/// Resolves wavenumbers to slot/rank indices at a fixed reference level.
///
/// Working at level `m_cap` fixes each wavenumber's rank once; the slot
/// it occupies at any lower level `m` is the rank reduced mod `b^m`,
/// because the slot digits at level `m` are a prefix of those at `m_cap`.
#[derive(Debug, Clone, Copy)]
pub struct SlotContext<'a> {
    gen: &'a GeneratorSet,
    m_cap: u32,
}

impl<'a> SlotContext<'a> {
    pub fn new(gen: &'a GeneratorSet, m_cap: u32) -> Result<Self> {
        if m_cap > gen.max_log_n() {
            return Err(Error::LevelOutOfRange {
                level: m_cap,
                limit: gen.max_log_n(),
            });
        }
        Ok(Self { gen, m_cap })
    }

    pub fn generator(&self) -> &GeneratorSet {
        self.gen
    }

    pub fn level_cap(&self) -> u32 {
        self.m_cap
    }

    /// The rank of a wavenumber: its slot at the reference level.
    pub fn rank(&self, k: &Wavenumber) -> Result<u64> {
        nu_map(k, self.gen, self.m_cap)
    }
}

/// The window containing a rank: 0 for rank 0, else the digit count of
/// the rank, so window `l ≥ 1` covers ranks `[b^{l-1}, b^l)`.
fn window_of(rank: u64, base: u32) -> u32 {
    let mut window = 0;
    let mut r = rank;
    while r > 0 {
        r /= base as u64;
        window += 1;
    }
    window
}

/// Exact spectral window sums of a Walsh polynomial at level `m`.
#[derive(Debug, Clone)]
pub struct SpectrumSums {
    /// The level these sums refer to.
    pub m: u32,
    /// `s[l]`: sum of |c| over ranks in window `l` (the true window sums,
    /// independent of `m`).
    pub s: Vec<f64>,
    /// `s_hat[l]`: sum of |c| over ranks at or beyond `b^m` whose residue
    /// mod `b^m` lies in window `l` — the aliasing mass folded onto that
    /// window.
    pub s_hat: Vec<f64>,
    /// Total tail mass beyond rank `b^m`; identically the sum of `s_hat`.
    pub s_check: f64,
}

/// Computes the window sums of `p` at level `m ≤ m_cap` by direct
/// enumeration of the finite spectrum.
///
/// Each term's rank is its slot at the context's reference level; with
/// spectra built by [`WalshPolynomial::from_slot_spectrum`] these ranks
/// are exactly the prescribed slots.
pub fn spectrum_sums(p: &WalshPolynomial, ctx: &SlotContext, m: u32) -> Result<SpectrumSums> {
    if m > ctx.level_cap() {
        return Err(Error::LevelOutOfRange {
            level: m,
            limit: ctx.level_cap(),
        });
    }
    let base = p.base();
    let ranked: Vec<(u64, f64)> = p
        .terms()
        .iter()
        .map(|(k, c)| Ok((ctx.rank(k)?, c.norm())))
        .collect::<Result<_>>()?;
    let top_window = ranked
        .iter()
        .map(|&(rank, _)| window_of(rank, base))
        .max()
        .unwrap_or(0)
        .max(m);
    let mut s = vec![0.0; top_window as usize + 1];
    let mut s_hat = vec![0.0; m as usize + 1];
    let mut s_check = 0.0;
    let cap = (base as u64).pow(m);
    for &(rank, mag) in &ranked {
        s[window_of(rank, base) as usize] += mag;
        if rank >= cap {
            s_hat[window_of(rank % cap, base) as usize] += mag;
            s_check += mag;
        }
    }
    Ok(SpectrumSums {
        m,
        s,
        s_hat,
        s_check,
    })
}

/// Tolerance factor absorbing floating-point reassociation when comparing
/// sums that are mathematically equal.
const CONE_SLACK: f64 = 1.0 + 1e-12;

/// Whether `p` satisfies both cone inequalities at every level in
/// `m_range`:
///
/// ```text
/// s_hat[l] ≤ ω̂(m-l)·s_check        for 0 ≤ l ≤ m
/// s_check  ≤ ω̊(m-l)·s[l]           for l* ≤ l ≤ m
/// ```
///
/// Requires a cone built from explicit decay functions.
pub fn cone_check(
    p: &WalshPolynomial,
    cone: &ConeSpec,
    ctx: &SlotContext,
    m_range: std::ops::RangeInclusive<u32>,
) -> Result<bool> {
    let (omega_hat, omega_ring) = cone.explicit_omegas().ok_or(Error::ExplicitOmegasRequired)?;
    for m in m_range {
        let sums = spectrum_sums(p, ctx, m)?;
        for l in 0..=m {
            if sums.s_hat[l as usize] > omega_hat(m - l) * sums.s_check * CONE_SLACK {
                return Ok(false);
            }
        }
        for l in cone.ell_star()..=m {
            let s_l = sums.s.get(l as usize).copied().unwrap_or(0.0);
            if sums.s_check > omega_ring(m - l) * s_l * CONE_SLACK {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
