use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{p} is not a prime greater than 3")]
    InvalidPrime { p: u64 },

    #[error("precision exponent must be at least 1")]
    InvalidPrecision,

    #[error("{p}^{prec} does not fit the 62-bit residue word")]
    PrecisionOverflow { p: u64, prec: u32 },

    #[error("element of valuation {valuation} is not a unit")]
    NotAUnit { valuation: u32 },

    #[error("p = {p} is supersingular for this curve (p | a_p), no unit root exists")]
    SupersingularPrime { p: u64 },

    #[error("curve has bad reduction at p = {p}")]
    BadReduction { p: u64 },

    #[error("curve coefficient does not fit in 64 bits")]
    CoefficientOverflow,

    #[error("curve is singular (discriminant 0)")]
    SingularCurve,

    #[error("coefficient a_{index} requested but the series is only known below q^{trunc}")]
    InsufficientTruncation { index: i64, trunc: i64 },

    #[error("check needs precision p^{needed} but only p^{available} is carried")]
    InsufficientPrecision { needed: u32, available: u32 },

    #[error("coefficient rings do not match ({left} vs {right})")]
    RingMismatch { left: String, right: String },

    #[error("operation requires a series holomorphic at infinity (offset {offset} < 0)")]
    NegativeOffset { offset: i64 },

    #[error("Eisenstein series of weight {k} is not supported (only 4 and 6)")]
    UnsupportedWeight { k: u32 },

    #[error("pole at j0 = {j0} lies on an elliptic point")]
    EllipticPole { j0: i64 },

    #[error("term weight {numerator} - 12*{pole_order} does not equal k + 2 = {target}")]
    WeightMismatch {
        numerator: u32,
        pole_order: u32,
        target: u32,
    },

    #[error("trace {a_p} violates the Hasse/Ramanujan bound at p = {p}")]
    HasseViolation { p: u64, a_p: i64 },

    #[error("coefficient is not divisible by {divisor} in this ring")]
    NotDivisible { divisor: i64 },

    #[error("series leading coefficient is not a unit")]
    NonUnitLeadingCoefficient,

    #[error("no normalization convention reproduces the eigen-congruences")]
    NoConventionPasses,

    #[error("malformed series text: {0}")]
    Parse(String),
}
