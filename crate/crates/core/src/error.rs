use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Altitude outside the validity interval of the atmosphere model.
    AltitudeOutOfRange {
        altitude: f64,
        min: f64,
        max: f64,
    },
    /// Averaging interval with end altitude not above start altitude.
    DegenerateSegment {
        start: f64,
        end: f64,
    },
    NonPositiveSpeed(f64),
    NonPositiveDensity(f64),
    NegativeTime(f64),
    /// A named parameter failed its domain check.
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    /// The cost gradient has no minus-to-plus sign change on the search interval.
    NoInteriorOptimum {
        gradient_low: f64,
        gradient_high: f64,
    },
    /// The curvature of the cost is not positive at the stationary point.
    SufficientConditionViolated {
        speed: f64,
        curvature: f64,
    },
    NoConvergence {
        iterations: usize,
    },
    /// A calibrated CI ceiling came out non-positive.
    EnvelopeInconsistency {
        ci_max: f64,
    },
    /// An ATC event could not be placed on the climb timeline.
    InvalidEvent {
        index: usize,
        reason: &'static str,
    },
    /// Failure while planning a specific climb segment.
    Segment {
        index: usize,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_segment(self, index: usize) -> Self {
        Error::Segment {
            index,
            source: Box::new(self),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AltitudeOutOfRange { altitude, min, max } => write!(
                f,
                "altitude {altitude} m outside the valid interval [{min}, {max}] m"
            ),
            Error::DegenerateSegment { start, end } => write!(
                f,
                "degenerate altitude interval: end {end} m must be above start {start} m"
            ),
            Error::NonPositiveSpeed(v) => write!(f, "airspeed must be positive, got {v} m/s"),
            Error::NonPositiveDensity(rho) => {
                write!(f, "air density must be positive, got {rho} kg/m^3")
            }
            Error::NegativeTime(t) => write!(f, "time must be non-negative, got {t} s"),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value for {name}: {value}")
            }
            Error::NoInteriorOptimum {
                gradient_low,
                gradient_high,
            } => write!(
                f,
                "no interior optimum: cost gradient is {gradient_low:e} at the lower bound and {gradient_high:e} at the upper bound"
            ),
            Error::SufficientConditionViolated { speed, curvature } => write!(
                f,
                "stationary point at {speed} m/s is not a minimum (curvature {curvature:e})"
            ),
            Error::NoConvergence { iterations } => {
                write!(f, "root finder did not converge in {iterations} iterations")
            }
            Error::EnvelopeInconsistency { ci_max } => {
                write!(f, "calibrated CI ceiling is not positive: {ci_max}")
            }
            Error::InvalidEvent { index, reason } => write!(f, "ATC event {index}: {reason}"),
            Error::Segment { index, source } => write!(f, "segment {index}: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Segment { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

pub(crate) fn require_speed(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSpeed(v))
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
