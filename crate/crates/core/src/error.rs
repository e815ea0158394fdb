use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}]")]
    QuadratureNonconvergence { a: f64, b: f64, tol: f64 },

    #[error("negative radius {0}")]
    NegativeRadius(f64),

    #[error("degenerate chart point: {0}")]
    DegeneratePoint(String),

    #[error("degenerate tangent plane (gram determinant {0:e})")]
    DegeneratePlane(f64),

    #[error("trajectory left the valid region of the {chart} chart at t = {t}")]
    ChartExit { chart: &'static str, t: f64 },

    #[error("riccati solution blew up at t = {t} (spectral radius {radius:e})")]
    RiccatiBlowUp { t: f64, radius: f64 },

    #[error("translation length must be positive, got {0}")]
    NonpositiveLength(f64),

    #[error("start radius {radius} is outside the flat tube of radius {tube}")]
    RadiusOutsideTube { radius: f64, tube: f64 },

    #[error("modulus {0} is not an odd prime")]
    NonPrimeModulus(u64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("degenerate convex body: {0}")]
    DegenerateBody(String),

    #[error("strips are parallel; the thickening construction needs distinct directions")]
    ParallelStrips,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
