//! Error type shared across the crate.

/// Errors reported by generator construction, transforms, and cubature.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two values that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Two values that must share a base do not.
    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: u32, right: u32 },

    /// Two values that must share a digit precision do not.
    #[error("precision mismatch: {left} vs {right}")]
    PrecisionMismatch { left: u32, right: u32 },

    /// A point index outside the generator's capacity.
    #[error("point index {index} out of range: generator holds base^{m_max} points")]
    IndexOutOfRange { index: u64, m_max: u32 },

    /// A net or transform level above what the value supports.
    #[error("level {level} out of range (limit {limit})")]
    LevelOutOfRange { level: u32, limit: u32 },

    /// A wavenumber coordinate with digits below the precision floor of the
    /// points it is paired with.
    #[error("wavenumber {value} in coordinate {coord} has digits beyond precision {precision}")]
    WavenumberBeyondPrecision {
        coord: usize,
        value: u64,
        precision: u32,
    },

    /// A direction-number line that does not parse.
    #[error("direction-number data, line {line}: {reason}")]
    MalformedDirectionData { line: usize, reason: String },

    /// A direction-number source with fewer dimensions than requested.
    #[error("direction-number data provides {available} dimensions, {requested} requested")]
    InsufficientDimensions {
        available: usize,
        requested: usize,
    },

    /// A sample vector whose length is not a power of the base.
    #[error("sample count {count} is not a power of base {base}")]
    NotPowerOfBase { count: usize, base: u32 },

    /// An empty sample vector where at least one sample is required.
    #[error("empty sample vector")]
    EmptySamples,

    /// An extension fed the wrong number of new samples.
    #[error("extension from level {level} needs {expected} new samples, got {got}")]
    ExtensionSizeMismatch {
        level: u32,
        expected: usize,
        got: usize,
    },

    /// Cone parameters that violate their constraints.
    #[error("invalid cone parameters: {reason}")]
    InvalidConeParameters { reason: String },

    /// An operation that needs explicit omega functions on the cone.
    #[error("cone specification carries no explicit omega functions")]
    ExplicitOmegasRequired,

    /// A nonpositive or non-finite tolerance.
    #[error("tolerance must be positive and finite, got {value}")]
    InvalidTolerance { value: f64 },

    /// An integrand that returned NaN or infinity.
    #[error("integrand returned a non-finite value at point index {index}")]
    NonFiniteSample { index: u64 },

    /// A probability outside (0, 1).
    #[error("probability must lie strictly inside (0, 1), got {value}")]
    InvalidProbability { value: f64 },

    /// A dimension outside the supported range of an operation.
    #[error("dimension {dimension} outside supported range {min}..={max}")]
    DimensionOutOfRange {
        dimension: usize,
        min: usize,
        max: usize,
    },

    /// An I/O failure while reading or writing an external format.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
