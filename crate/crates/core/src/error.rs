use core::fmt;

/// Errors raised by the reconstruction core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its documented invariant.
    InvalidParameter(&'static str),
    /// Two grids (or a grid and a table) do not share a geometry.
    GeometryMismatch,
    /// A Doppler spectrum does not live on the expected frequency domain.
    DomainMismatch,
    /// A norm used as a denominator vanished.
    ZeroNorm,
    /// A spectrum with negative entries was passed where feasibility is required.
    Infeasible,
    /// A query fell inside one of the singular exclusion disks.
    ExcludedPoint,
    /// A wavevector of zero length reached the coupling coefficient.
    DegenerateWavevector,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::GeometryMismatch => f.write_str("grid geometries differ"),
            Error::DomainMismatch => f.write_str("frequency domains differ"),
            Error::ZeroNorm => f.write_str("reference norm is zero"),
            Error::Infeasible => f.write_str("spectrum has negative entries"),
            Error::ExcludedPoint => f.write_str("point lies inside a singular exclusion disk"),
            Error::DegenerateWavevector => f.write_str("zero-length scattering wavevector"),
        }
    }
}

impl core::error::Error for Error {}
