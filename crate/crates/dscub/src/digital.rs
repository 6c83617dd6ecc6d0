//! Base-b digitwise arithmetic, digital net generation, scrambling, and the
//! wavenumber pairing.
//!
//! Points in `[0,1)^d` are stored as fixed-precision digit strings: each
//! coordinate is an unsigned integer whose base-b digits, read from the most
//! significant position, are the first `t` digits of the coordinate's base-b
//! expansion. For the default base 2 the precision is 53 digits, so the
//! encoding is exactly the value times 2^53 and every coordinate converts to
//! an `f64` without rounding.
//!
//! A digital sequence is generated by basis points `z_1, z_b, z_{b^2}, ...`
//! held as per-coordinate column encodings. The point with index
//! `i = i_0 + i_1 b + ...` is the digitwise sum of `i_l` copies of the l-th
//! basis point. The first `b^m` points form a group under digitwise addition
//! and are a (t, m, d)-net in the usual sense when the columns come from
//! Sobol'-style direction numbers.
//!
//! Because the precision is fixed, digitwise sums never produce infinite
//! digit trails; the associativity caveat that arises for infinite
//! expansions (e.g. 1/3 and 1/6 in base 2) cannot occur here, and no
//! validity check is needed before adding.

use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Digit count used for base-2 points, matching `f64` resolution.
pub const BASE2_PRECISION: u32 = 53;

/// Number of basis columns a generator keeps by default.
pub const DEFAULT_MAX_LOG_N: u32 = 32;

/// Largest digit count so that `base^t` stays below 2^53.
pub fn default_precision(base: u32) -> u32 {
    if base == 2 {
        return BASE2_PRECISION;
    }
    let mut t = 0u32;
    let mut cap: u64 = 1;
    while cap <= (1u64 << 53) / base as u64 {
        cap *= base as u64;
        t += 1;
    }
    t
}

fn pow_u64(base: u32, exp: u32) -> u64 {
    (base as u64).pow(exp)
}

/// Digit of `enc` at fractional position `pos` (1-based, most significant
/// first) under precision `t`.
fn digit_at(enc: u64, pos: u32, base: u32, t: u32) -> u64 {
    (enc / pow_u64(base, t - pos)) % base as u64
}

/// Digitwise mod-b sum of two coordinate encodings.
fn add_enc(a: u64, b: u64, base: u32, t: u32) -> u64 {
    if base == 2 {
        return a ^ b;
    }
    let mut out = 0u64;
    let mut place = 1u64;
    let (mut a, mut b) = (a, b);
    for _ in 0..t {
        out += ((a + b) % base as u64) * place;
        a /= base as u64;
        b /= base as u64;
        place *= base as u64;
    }
    out
}

/// Digitwise scalar multiple of a coordinate encoding.
fn scale_enc(c: u64, enc: u64, base: u32, t: u32) -> u64 {
    if base == 2 {
        return if c & 1 == 1 { enc } else { 0 };
    }
    let mut out = 0u64;
    let mut place = 1u64;
    let mut e = enc;
    for _ in 0..t {
        out += ((e % base as u64) * c % base as u64) * place;
        e /= base as u64;
        place *= base as u64;
    }
    out
}

/// Reverse the low `t` bits of `enc` (base-2 fast path for the pairing).
fn bit_reverse(enc: u64, t: u32) -> u64 {
    enc.reverse_bits() >> (64 - t)
}

/// A point of `[0,1)^d` held as fixed-precision base-b digit strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitalPoint {
    coords: Vec<u64>,
    base: u32,
    precision: u32,
}

impl DigitalPoint {
    /// The origin.
    pub fn zero(dimension: usize, base: u32, precision: u32) -> Self {
        Self {
            coords: vec![0; dimension],
            base,
            precision,
        }
    }

    /// Builds a point from raw digit-string encodings.
    ///
    /// Each encoding must be below `base^precision`.
    pub fn from_encodings(coords: Vec<u64>, base: u32, precision: u32) -> Result<Self> {
        let cap = pow_u64(base, precision);
        for (j, &c) in coords.iter().enumerate() {
            if c >= cap {
                return Err(Error::WavenumberBeyondPrecision {
                    coord: j,
                    value: c,
                    precision,
                });
            }
        }
        Ok(Self {
            coords,
            base,
            precision,
        })
    }

    /// The nearest t-digit point to arbitrary coordinates in `[0,1)`.
    ///
    /// Exact for coordinates that came from a digital point of the same
    /// base and precision.
    pub fn from_values(values: &[f64], base: u32, precision: u32) -> Result<Self> {
        let cap = pow_u64(base, precision);
        let mut coords = Vec::with_capacity(values.len());
        for &v in values {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidProbability { value: v });
            }
            coords.push(((v * cap as f64).round() as u64).min(cap - 1));
        }
        Ok(Self {
            coords,
            base,
            precision,
        })
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Raw digit-string encodings.
    pub fn encodings(&self) -> &[u64] {
        &self.coords
    }

    /// Fractional digit of one coordinate at 1-based position `pos`.
    pub fn digit(&self, coord: usize, pos: u32) -> u64 {
        digit_at(self.coords[coord], pos, self.base, self.precision)
    }

    /// Coordinate values as floating point, `enc / base^t`.
    pub fn values(&self) -> Vec<f64> {
        let scale = 1.0 / pow_u64(self.base, self.precision) as f64;
        self.coords.iter().map(|&c| c as f64 * scale).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch {
                left: self.coords.len(),
                right: other.coords.len(),
            });
        }
        if self.base != other.base {
            return Err(Error::BaseMismatch {
                left: self.base,
                right: other.base,
            });
        }
        if self.precision != other.precision {
            return Err(Error::PrecisionMismatch {
                left: self.precision,
                right: other.precision,
            });
        }
        Ok(())
    }
}

/// Digitwise mod-b sum of two points. XOR of the encodings when b = 2.
pub fn digit_add(x: &DigitalPoint, y: &DigitalPoint) -> Result<DigitalPoint> {
    x.check_compatible(y)?;
    let coords = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(&a, &b)| add_enc(a, b, x.base, x.precision))
        .collect();
    Ok(DigitalPoint {
        coords,
        base: x.base,
        precision: x.precision,
    })
}

/// Digitwise negation: `digit_add(x, digit_negate(x))` is the origin.
pub fn digit_negate(x: &DigitalPoint) -> DigitalPoint {
    let coords = x
        .coords
        .iter()
        .map(|&c| scale_enc(x.base as u64 - 1, c, x.base, x.precision))
        .collect();
    DigitalPoint {
        coords,
        base: x.base,
        precision: x.precision,
    }
}

/// Digitwise scalar multiple `a · x` with `a` reduced mod b.
pub fn digit_scale(a: u32, x: &DigitalPoint) -> DigitalPoint {
    let coords = x
        .coords
        .iter()
        .map(|&c| scale_enc(a as u64 % x.base as u64, c, x.base, x.precision))
        .collect();
    DigitalPoint {
        coords,
        base: x.base,
        precision: x.precision,
    }
}

/// A d-vector of non-negative integers indexing a Walsh basis function.
///
/// The base-b digits of each entry pair with the digits of a point
/// coordinate under [`bilinear`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Wavenumber {
    pub digits: Vec<u64>,
}

impl Wavenumber {
    pub fn new(digits: Vec<u64>) -> Self {
        Self { digits }
    }

    pub fn zero(dimension: usize) -> Self {
        Self {
            digits: vec![0; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.digits.len()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&k| k == 0)
    }
}

fn wavenumber_digit_op(k: &Wavenumber, l: &Wavenumber, base: u32, negate_l: bool) -> Wavenumber {
    let digits = k
        .digits
        .iter()
        .zip(&l.digits)
        .map(|(&a, &b)| {
            if base == 2 {
                return a ^ b;
            }
            let mut out = 0u64;
            let mut place = 1u64;
            let (mut a, mut b) = (a, b);
            while a > 0 || b > 0 {
                let db = if negate_l {
                    (base as u64 - b % base as u64) % base as u64
                } else {
                    b % base as u64
                };
                out += ((a + db) % base as u64) * place;
                a /= base as u64;
                b /= base as u64;
                place *= base as u64;
            }
            out
        })
        .collect();
    Wavenumber { digits }
}

/// Digitwise mod-b sum of two wavenumbers.
pub fn wavenumber_add(k: &Wavenumber, l: &Wavenumber, base: u32) -> Wavenumber {
    wavenumber_digit_op(k, l, base, false)
}

/// Digitwise mod-b difference `k ⊖ l`.
pub fn wavenumber_sub(k: &Wavenumber, l: &Wavenumber, base: u32) -> Wavenumber {
    wavenumber_digit_op(k, l, base, true)
}

/// Digitwise scalar multiple of a wavenumber.
pub fn wavenumber_scale(a: u32, k: &Wavenumber, base: u32) -> Wavenumber {
    let a = a as u64 % base as u64;
    let digits = k
        .digits
        .iter()
        .map(|&v| {
            if base == 2 {
                return if a == 1 { v } else { 0 };
            }
            let mut out = 0u64;
            let mut place = 1u64;
            let mut v = v;
            while v > 0 {
                out += ((v % base as u64) * a % base as u64) * place;
                v /= base as u64;
                place *= base as u64;
            }
            out
        })
        .collect();
    Wavenumber { digits }
}

/// The mod-b pairing of a wavenumber with a point: digit `l` of each `k_j`
/// multiplies fractional digit `l+1` of the matching coordinate, summed
/// mod b.
///
/// Errors if any `k_j` has digits at or beyond the precision floor, where
/// the point carries no information to pair with.
pub fn bilinear(k: &Wavenumber, x: &DigitalPoint) -> Result<u32> {
    if k.digits.len() != x.coords.len() {
        return Err(Error::DimensionMismatch {
            left: k.digits.len(),
            right: x.coords.len(),
        });
    }
    let cap = pow_u64(x.base, x.precision);
    let mut total = 0u64;
    for (j, (&kj, &xj)) in k.digits.iter().zip(&x.coords).enumerate() {
        if kj >= cap {
            return Err(Error::WavenumberBeyondPrecision {
                coord: j,
                value: kj,
                precision: x.precision,
            });
        }
        if x.base == 2 {
            total += (bit_reverse(xj, x.precision) & kj).count_ones() as u64;
        } else {
            let mut k_rem = kj;
            let mut pos = 1;
            while k_rem > 0 {
                total += (k_rem % x.base as u64) * digit_at(xj, pos, x.base, x.precision);
                k_rem /= x.base as u64;
                pos += 1;
            }
        }
    }
    Ok((total % x.base as u64) as u32)
}

/// A nonsingular lower-triangular digit matrix used for linear scrambling.
///
/// Rows are stored in the same digit-string encoding as point coordinates;
/// the diagonal is fixed to one, so the matrix is invertible over F_b by
/// construction.
#[derive(Debug, Clone)]
pub struct ScrambleMatrix {
    rows: Vec<u64>,
    base: u32,
    size: u32,
}

impl ScrambleMatrix {
    /// The identity matrix.
    pub fn identity(base: u32, size: u32) -> Self {
        let rows = (1..=size).map(|p| pow_u64(base, size - p)).collect();
        Self { rows, base, size }
    }

    /// A uniformly random unit-diagonal lower-triangular matrix.
    pub fn random<R: Rng>(rng: &mut R, base: u32, size: u32) -> Self {
        let mut rows = Vec::with_capacity(size as usize);
        for p in 1..=size {
            let mut row = pow_u64(base, size - p);
            if base == 2 {
                let mask = if p > 1 {
                    ((1u64 << (p - 1)) - 1) << (size - p + 1)
                } else {
                    0
                };
                row |= rng.random::<u64>() & mask;
            } else {
                for q in 1..p {
                    let digit = rng.random_range(0..base as u64);
                    row += digit * pow_u64(base, size - q);
                }
            }
            rows.push(row);
        }
        Self { rows, base, size }
    }

    /// Builds a matrix from digit-string rows, validating triangular shape
    /// and the unit diagonal.
    pub fn from_rows(rows: Vec<u64>, base: u32, size: u32) -> Result<Self> {
        if rows.len() != size as usize {
            return Err(Error::InvalidConeParameters {
                reason: format!("scramble matrix needs {size} rows, got {}", rows.len()),
            });
        }
        for (idx, &row) in rows.iter().enumerate() {
            let p = idx as u32 + 1;
            if digit_at(row, p, base, size) != 1 {
                return Err(Error::InvalidConeParameters {
                    reason: format!("scramble matrix row {p} has a non-unit diagonal"),
                });
            }
            for q in p + 1..=size {
                if digit_at(row, q, base, size) != 0 {
                    return Err(Error::InvalidConeParameters {
                        reason: format!("scramble matrix row {p} is not lower-triangular"),
                    });
                }
            }
        }
        Ok(Self { rows, base, size })
    }

    /// Applies the matrix to a digit-string encoding.
    pub fn apply(&self, enc: u64) -> u64 {
        if self.base == 2 {
            let mut out = 0u64;
            for (idx, &row) in self.rows.iter().enumerate() {
                let p = idx as u32 + 1;
                out |= (((row & enc).count_ones() & 1) as u64) << (self.size - p);
            }
            out
        } else {
            let mut out = 0u64;
            for (idx, &row) in self.rows.iter().enumerate() {
                let p = idx as u32 + 1;
                let mut acc = 0u64;
                for q in 1..=p {
                    acc += digit_at(row, q, self.base, self.size)
                        * digit_at(enc, q, self.base, self.size);
                }
                out += (acc % self.base as u64) * pow_u64(self.base, self.size - p);
            }
            out
        }
    }
}

/// Generating matrices, scramble state, and digital shift for one digital
/// sequence.
///
/// `columns[j][l]` encodes coordinate `j` of the basis point `z_{b^l}`,
/// with any linear scramble already folded in. The shift is applied per
/// point on top of the scrambled columns.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    base: u32,
    dimension: usize,
    precision: u32,
    m_max: u32,
    columns: Vec<Vec<u64>>,
    scramble: Option<Vec<ScrambleMatrix>>,
    shift: DigitalPoint,
}

impl GeneratorSet {
    /// Builds a generator directly from per-coordinate column encodings.
    pub fn from_columns(
        columns: Vec<Vec<u64>>,
        base: u32,
        precision: u32,
    ) -> Result<GeneratorSet> {
        if columns.is_empty() {
            return Err(Error::InsufficientDimensions {
                available: 0,
                requested: 1,
            });
        }
        let m_max = columns[0].len() as u32;
        let cap = pow_u64(base, precision);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != m_max as usize {
                return Err(Error::LevelOutOfRange {
                    level: col.len() as u32,
                    limit: m_max,
                });
            }
            if let Some(&bad) = col.iter().find(|&&c| c >= cap) {
                return Err(Error::WavenumberBeyondPrecision {
                    coord: j,
                    value: bad,
                    precision,
                });
            }
        }
        let dimension = columns.len();
        Ok(GeneratorSet {
            base,
            dimension,
            precision,
            m_max,
            columns,
            scramble: None,
            shift: DigitalPoint::zero(dimension, base, precision),
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Capacity exponent: indices run over `[0, base^m_max)`.
    pub fn max_log_n(&self) -> u32 {
        self.m_max
    }

    /// The digital shift, zero when no shift is active.
    pub fn shift(&self) -> &DigitalPoint {
        &self.shift
    }

    /// The scramble matrices, if a scramble has been applied.
    pub fn scramble(&self) -> Option<&[ScrambleMatrix]> {
        self.scramble.as_deref()
    }

    /// The basis point `z_{b^l}` (scrambled when a scramble is active,
    /// never shifted).
    pub fn basis_point(&self, level: u32) -> Result<DigitalPoint> {
        if level >= self.m_max {
            return Err(Error::LevelOutOfRange {
                level,
                limit: self.m_max,
            });
        }
        let coords = self
            .columns
            .iter()
            .map(|col| col[level as usize])
            .collect();
        Ok(DigitalPoint {
            coords,
            base: self.base,
            precision: self.precision,
        })
    }

    /// Checks that the first `m` basis points are linearly independent
    /// over F_b, digit precision included.
    pub fn basis_independent(&self, m: u32) -> Result<bool> {
        if m > self.m_max {
            return Err(Error::LevelOutOfRange {
                level: m,
                limit: self.m_max,
            });
        }
        // Gaussian elimination over stacked digit vectors, one word per
        // coordinate in base 2, digit vectors otherwise.
        let mut vectors: Vec<Vec<u64>> = (0..m)
            .map(|l| {
                let mut digits = Vec::new();
                for col in &self.columns {
                    let enc = col[l as usize];
                    if self.base == 2 {
                        digits.push(enc);
                    } else {
                        for pos in 1..=self.precision {
                            digits.push(digit_at(enc, pos, self.base, self.precision));
                        }
                    }
                }
                digits
            })
            .collect();
        if self.base == 2 {
            let mut rank = 0usize;
            let width = self.dimension;
            for word in 0..width {
                for bit in (0..64).rev() {
                    let mut pivot = None;
                    for (i, v) in vectors.iter().enumerate().skip(rank) {
                        if (v[word] >> bit) & 1 == 1 {
                            pivot = Some(i);
                            break;
                        }
                    }
                    let Some(p) = pivot else { continue };
                    vectors.swap(rank, p);
                    let pivot_row = vectors[rank].clone();
                    for (i, v) in vectors.iter_mut().enumerate() {
                        if i != rank && (v[word] >> bit) & 1 == 1 {
                            for (a, b) in v.iter_mut().zip(&pivot_row) {
                                *a ^= b;
                            }
                        }
                    }
                    rank += 1;
                }
            }
            return Ok(rank == m as usize);
        }
        let b = self.base as u64;
        let width = vectors.first().map_or(0, Vec::len);
        let mut rank = 0usize;
        for colidx in 0..width {
            let Some(p) = (rank..vectors.len()).find(|&i| vectors[i][colidx] % b != 0) else {
                continue;
            };
            vectors.swap(rank, p);
            let inv = mod_inverse(vectors[rank][colidx] % b, b);
            let pivot_row: Vec<u64> = vectors[rank].iter().map(|&v| v * inv % b).collect();
            for (i, v) in vectors.iter_mut().enumerate() {
                if i != rank && v[colidx] % b != 0 {
                    let factor = v[colidx] % b;
                    for (a, pv) in v.iter_mut().zip(&pivot_row) {
                        *a = (*a + (b - factor) * pv) % b;
                    }
                }
            }
            rank += 1;
        }
        Ok(rank == m as usize)
    }

    /// The net point with index `i`, shifted by the digital shift.
    pub fn net_point(&self, i: u64) -> Result<DigitalPoint> {
        let raw = self.net_point_unshifted(i)?;
        digit_add(&raw, &self.shift)
    }

    /// The net point with index `i` before shifting.
    pub fn net_point_unshifted(&self, i: u64) -> Result<DigitalPoint> {
        if i >= pow_u64(self.base, self.m_max) {
            return Err(Error::IndexOutOfRange {
                index: i,
                m_max: self.m_max,
            });
        }
        let mut coords = vec![0u64; self.dimension];
        let mut rem = i;
        let mut level = 0usize;
        while rem > 0 {
            let digit = rem % self.base as u64;
            if digit != 0 {
                for (j, coord) in coords.iter_mut().enumerate() {
                    let term = scale_enc(digit, self.columns[j][level], self.base, self.precision);
                    *coord = add_enc(*coord, term, self.base, self.precision);
                }
            }
            rem /= self.base as u64;
            level += 1;
        }
        Ok(DigitalPoint {
            coords,
            base: self.base,
            precision: self.precision,
        })
    }

    /// Streams the first `base^m` net points in index order as floating
    /// point coordinates, reusing one buffer.
    pub fn stream_points<F>(&self, m: u32, shifted: bool, f: F) -> Result<()>
    where
        F: FnMut(u64, &[f64]),
    {
        if m > self.m_max {
            return Err(Error::LevelOutOfRange {
                level: m,
                limit: self.m_max,
            });
        }
        self.stream_point_range(0, pow_u64(self.base, m), shifted, f)
    }

    /// Streams net points with indices in `[lo, hi)` in order, reusing one
    /// buffer.
    ///
    /// Consecutive indices differ in a short trailing run of digits, so
    /// each step costs a couple of column additions instead of a fresh
    /// point construction. The adaptive loop uses this to evaluate only
    /// the new points when doubling the sample size.
    pub fn stream_point_range<F>(&self, lo: u64, hi: u64, shifted: bool, mut f: F) -> Result<()>
    where
        F: FnMut(u64, &[f64]),
    {
        if hi > pow_u64(self.base, self.m_max) {
            return Err(Error::IndexOutOfRange {
                index: hi,
                m_max: self.m_max,
            });
        }
        if lo >= hi {
            return Ok(());
        }
        let scale = 1.0 / pow_u64(self.base, self.precision) as f64;
        let mut raw = self.net_point_unshifted(lo)?.coords;
        let mut buf = vec![0f64; self.dimension];
        let emit = |raw: &[u64], buf: &mut [f64], f: &mut F, i: u64, this: &Self| {
            if shifted {
                for (j, b) in buf.iter_mut().enumerate() {
                    let enc = add_enc(raw[j], this.shift.coords[j], this.base, this.precision);
                    *b = enc as f64 * scale;
                }
            } else {
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = raw[j] as f64 * scale;
                }
            }
            f(i, buf);
        };
        emit(&raw, &mut buf, &mut f, lo, self);
        for i in lo + 1..hi {
            // Digits 0..=c change when stepping to i, where c is the count
            // of trailing zero digits of i in base b; each changed digit
            // contributes its column exactly once mod b.
            let mut rem = i;
            let mut level = 0usize;
            loop {
                for (j, r) in raw.iter_mut().enumerate() {
                    *r = add_enc(*r, self.columns[j][level], self.base, self.precision);
                }
                if rem % self.base as u64 != 0 {
                    break;
                }
                rem /= self.base as u64;
                level += 1;
            }
            emit(&raw, &mut buf, &mut f, i, self);
        }
        Ok(())
    }
}

fn mod_inverse(a: u64, b: u64) -> u64 {
    // b is a small prime here.
    let mut result = 1u64;
    let mut basepow = a % b;
    let mut exp = b - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * basepow % b;
        }
        basepow = basepow * basepow % b;
        exp >>= 1;
    }
    result
}

/// Parses direction numbers in the standard published text format and
/// expands them into generating-matrix columns.
///
/// The format is one header line followed by one line per dimension:
/// `d s a m_1 ... m_s`, where `s` is the degree of the primitive
/// polynomial, `a` encodes its inner coefficients, and the `m_i` are the
/// initial direction integers. Coordinate 1 is the van der Corput sequence
/// and is implicit. The expansion follows the usual recurrence
/// `v_l = v_{l-s} ^ (v_{l-s} >> s) ^ a_1 v_{l-1} ^ ... ^ a_{s-1} v_{l-s+1}`.
pub fn load_direction_numbers<S: BufRead>(source: S, dimension: usize) -> Result<GeneratorSet> {
    load_direction_numbers_with(source, dimension, DEFAULT_MAX_LOG_N)
}

/// [`load_direction_numbers`] with an explicit column count.
pub fn load_direction_numbers_with<S: BufRead>(
    source: S,
    dimension: usize,
    m_max: u32,
) -> Result<GeneratorSet> {
    if dimension == 0 {
        return Err(Error::InsufficientDimensions {
            available: 0,
            requested: 0,
        });
    }
    let t = BASE2_PRECISION;
    if m_max == 0 || m_max > t {
        return Err(Error::LevelOutOfRange {
            level: m_max,
            limit: t,
        });
    }
    let mut columns = Vec::with_capacity(dimension);
    columns.push((0..m_max).map(|l| 1u64 << (t - 1 - l)).collect::<Vec<_>>());

    let mut lines = source.lines().enumerate();
    let _header = lines.next();
    while columns.len() < dimension {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::InsufficientDimensions {
                available: columns.len(),
                requested: dimension,
            });
        };
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let parse = |field: Option<&str>, what: &str, lineno: usize| -> Result<u64> {
            field
                .ok_or_else(|| Error::MalformedDirectionData {
                    line: lineno,
                    reason: format!("missing {what}"),
                })?
                .parse::<u64>()
                .map_err(|e| Error::MalformedDirectionData {
                    line: lineno,
                    reason: format!("bad {what}: {e}"),
                })
        };
        let d_index = parse(fields.next(), "dimension index", lineno)?;
        if d_index != columns.len() as u64 + 1 {
            return Err(Error::MalformedDirectionData {
                line: lineno,
                reason: format!(
                    "dimension index {d_index} out of order, expected {}",
                    columns.len() + 1
                ),
            });
        }
        let s = parse(fields.next(), "polynomial degree", lineno)? as usize;
        if s == 0 || s > 64 {
            return Err(Error::MalformedDirectionData {
                line: lineno,
                reason: format!("polynomial degree {s} out of range"),
            });
        }
        let a = parse(fields.next(), "polynomial coefficient", lineno)?;
        let mut m = Vec::with_capacity(s);
        for i in 0..s {
            let mi = parse(fields.next(), &format!("direction integer m_{}", i + 1), lineno)?;
            if mi == 0 || mi % 2 == 0 || mi >= 1u64 << (i + 1) {
                return Err(Error::MalformedDirectionData {
                    line: lineno,
                    reason: format!("direction integer m_{} = {mi} invalid", i + 1),
                });
            }
            m.push(mi);
        }
        if fields.next().is_some() {
            return Err(Error::MalformedDirectionData {
                line: lineno,
                reason: "trailing fields".into(),
            });
        }

        let mut v = vec![0u64; m_max as usize];
        for l in 0..m_max as usize {
            if l < s {
                v[l] = m[l] << (t - 1 - l as u32);
            } else {
                let mut next = v[l - s] ^ (v[l - s] >> s);
                for k in 1..s {
                    if (a >> (s - 1 - k)) & 1 == 1 {
                        next ^= v[l - k];
                    }
                }
                v[l] = next;
            }
        }
        columns.push(v);
    }
    GeneratorSet::from_columns(columns, 2, t)
}

/// Loads the bundled Sobol' direction numbers, or the file named by the
/// `DSCUB_DIRECTION_NUMBERS` environment variable when set.
pub fn sobol_generator(dimension: usize) -> Result<GeneratorSet> {
    sobol_generator_with(dimension, DEFAULT_MAX_LOG_N)
}

/// [`sobol_generator`] with an explicit column count.
pub fn sobol_generator_with(dimension: usize, m_max: u32) -> Result<GeneratorSet> {
    match std::env::var_os(DIRECTION_NUMBERS_ENV) {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            load_direction_numbers_with(std::io::BufReader::new(file), dimension, m_max)
        }
        None => load_direction_numbers_with(BUNDLED_DIRECTION_NUMBERS.as_bytes(), dimension, m_max),
    }
}

/// Environment variable naming an alternate direction-number file.
pub const DIRECTION_NUMBERS_ENV: &str = "DSCUB_DIRECTION_NUMBERS";

/// The Joe-Kuo `new-joe-kuo-6` direction numbers, dimensions 2..=21201.
pub const BUNDLED_DIRECTION_NUMBERS: &str = include_str!("../data/new-joe-kuo-6.21201");

/// Applies a fresh random linear scramble and digital shift, deterministic
/// in the seed.
///
/// Every generating matrix is left-multiplied by a random unit-diagonal
/// lower-triangular matrix over F_b, and the shift is drawn uniformly over
/// t-digit points. The scrambled columns still generate a digital net; the
/// shift translates it without destroying the group structure.
pub fn apply_scramble(gen: &GeneratorSet, seed: u64) -> GeneratorSet {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    apply_scramble_from_rng(gen, &mut rng)
}

/// [`apply_scramble`] driven by a caller-owned random source, for splitting
/// one seed across many replications.
pub fn apply_scramble_from_rng<R: Rng>(gen: &GeneratorSet, rng: &mut R) -> GeneratorSet {
    let matrices: Vec<ScrambleMatrix> = (0..gen.dimension)
        .map(|_| ScrambleMatrix::random(rng, gen.base, gen.precision))
        .collect();
    let cap = pow_u64(gen.base, gen.precision);
    let shift_coords: Vec<u64> = (0..gen.dimension)
        .map(|_| {
            if gen.base == 2 {
                rng.random::<u64>() & (cap - 1)
            } else {
                rng.random_range(0..cap)
            }
        })
        .collect();
    let shift = DigitalPoint {
        coords: shift_coords,
        base: gen.base,
        precision: gen.precision,
    };
    apply_scramble_parts(gen, matrices, shift).expect("generated scramble state is always valid")
}

/// Applies explicit scramble matrices and shift, validating shapes.
///
/// `apply_scramble` routes through this; tests can inject identity
/// matrices or a zero shift to pin down individual effects.
pub fn apply_scramble_parts(
    gen: &GeneratorSet,
    matrices: Vec<ScrambleMatrix>,
    shift: DigitalPoint,
) -> Result<GeneratorSet> {
    if matrices.len() != gen.dimension {
        return Err(Error::DimensionMismatch {
            left: matrices.len(),
            right: gen.dimension,
        });
    }
    if shift.dimension() != gen.dimension {
        return Err(Error::DimensionMismatch {
            left: shift.dimension(),
            right: gen.dimension,
        });
    }
    if shift.base() != gen.base {
        return Err(Error::BaseMismatch {
            left: shift.base(),
            right: gen.base,
        });
    }
    if shift.precision() != gen.precision {
        return Err(Error::PrecisionMismatch {
            left: shift.precision(),
            right: gen.precision,
        });
    }
    let columns = gen
        .columns
        .iter()
        .zip(&matrices)
        .map(|(col, mat)| col.iter().map(|&c| mat.apply(c)).collect())
        .collect();
    Ok(GeneratorSet {
        base: gen.base,
        dimension: gen.dimension,
        precision: gen.precision,
        m_max: gen.m_max,
        columns,
        scramble: Some(matrices),
        shift,
    })
}

/// Whether `k` pairs to zero with every point of the level-`m` net, i.e.
/// whether `k` lies in the dual net of `P_m`.
///
/// By linearity it is enough to test the basis points of the (possibly
/// scrambled) generator; the shift plays no role.
pub fn in_dual_net(k: &Wavenumber, gen: &GeneratorSet, m: u32) -> Result<bool> {
    if m > gen.m_max {
        return Err(Error::LevelOutOfRange {
            level: m,
            limit: gen.m_max,
        });
    }
    for level in 0..m {
        if bilinear(k, &gen.basis_point(level)?)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}
