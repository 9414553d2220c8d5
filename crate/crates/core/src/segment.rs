use crate::atmosphere::{DensityAverages, DensityModel};
use crate::error::{require_positive, Error, Result};

/// Position in the vertical plane of the climb, metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Waypoint {
    pub x: f64,
    pub h: f64,
}

impl Waypoint {
    pub const fn new(x: f64, h: f64) -> Self {
        Self { x, h }
    }

    pub fn from_km(x_km: f64, h_km: f64) -> Self {
        Self::new(x_km * 1000.0, h_km * 1000.0)
    }

    pub fn distance_to(&self, other: &Waypoint) -> f64 {
        libm::hypot(other.x - self.x, other.h - self.h)
    }
}

/// One constant-airspeed climb leg together with the averaged quantities the
/// closed-form charge model needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimbSegment {
    pub start: Waypoint,
    pub end: Waypoint,
    /// Slant distance between `start` and `end`, metres.
    pub distance: f64,
    /// Mean climb rate, m/s.
    pub climb_rate: f64,
    pub densities: DensityAverages,
}

impl ClimbSegment {
    /// Segment with explicitly supplied density averages.
    pub fn new(
        start: Waypoint,
        end: Waypoint,
        climb_rate: f64,
        densities: DensityAverages,
    ) -> Result<Self> {
        let distance = start.distance_to(&end);
        require_positive("segment distance", distance)?;
        if end.h < start.h {
            return Err(Error::InvalidParameter {
                name: "segment end altitude",
                value: end.h,
            });
        }
        if !(climb_rate >= 0.0 && climb_rate.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mean climb rate",
                value: climb_rate,
            });
        }
        require_positive("mean density", densities.mean)?;
        require_positive("mean inverse density", densities.mean_inverse)?;
        Ok(Self {
            start,
            end,
            distance,
            climb_rate,
            densities,
        })
    }

    /// Segment whose density averages are taken from `model` over its own
    /// altitude span, or at the fixed altitude for level segments.
    pub fn from_model<M: DensityModel + ?Sized>(
        model: &M,
        start: Waypoint,
        end: Waypoint,
        climb_rate: f64,
        altitude_step: f64,
    ) -> Result<Self> {
        let densities = if end.h > start.h {
            DensityAverages::over(model, start.h, end.h, altitude_step)?
        } else {
            DensityAverages::at_altitude(model, start.h)?
        };
        Self::new(start, end, climb_rate, densities)
    }

    pub fn mean_density(&self) -> f64 {
        self.densities.mean
    }

    pub fn mean_inverse_density(&self) -> f64 {
        self.densities.mean_inverse
    }

    /// Point at arc length `s` from `start` along the straight path,
    /// clamped to the segment.
    pub fn point_at(&self, s: f64) -> Waypoint {
        if s >= self.distance {
            return self.end;
        }
        let f = s.max(0.0) / self.distance;
        Waypoint::new(
            self.start.x + f * (self.end.x - self.start.x),
            self.start.h + f * (self.end.h - self.start.h),
        )
    }
}
