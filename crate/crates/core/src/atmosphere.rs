//! Troposphere density and altitude-averaged density quantities.
//!
//! The drag polar needs both the density and its reciprocal, and the
//! closed-form end-of-climb charge replaces their time integrals by averages
//! taken over a uniform altitude grid between the segment end points.

use crate::error::{Error, Result};

/// Anything that maps altitude to air density.
pub trait DensityModel {
    /// Air density in kg/m^3 at altitude `h` in metres.
    fn density(&self, h: f64) -> Result<f64>;
}

/// Power-law density model of the troposphere:
/// `rho = coefficient * (base_temperature - lapse_rate * h) ^ exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Troposphere {
    pub coefficient: f64,
    pub base_temperature: f64,
    pub lapse_rate: f64,
    pub exponent: f64,
    /// Upper validity limit in metres.
    pub ceiling: f64,
}

impl Troposphere {
    pub const CEILING_M: f64 = 11_000.0;

    pub const fn standard() -> Self {
        Self {
            coefficient: 4.1748e-11,
            base_temperature: 288.14,
            lapse_rate: 0.00649,
            exponent: 4.256,
            ceiling: Self::CEILING_M,
        }
    }
}

impl Default for Troposphere {
    fn default() -> Self {
        Self::standard()
    }
}

impl DensityModel for Troposphere {
    fn density(&self, h: f64) -> Result<f64> {
        if !(0.0..=self.ceiling).contains(&h) {
            return Err(Error::AltitudeOutOfRange {
                altitude: h,
                min: 0.0,
                max: self.ceiling,
            });
        }
        Ok(
            self.coefficient
                * libm::pow(self.base_temperature - self.lapse_rate * h, self.exponent),
        )
    }
}

/// Altitude-independent density, mainly useful for checking exactness of
/// the averaged formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDensity(pub f64);

impl DensityModel for ConstantDensity {
    fn density(&self, _h: f64) -> Result<f64> {
        Ok(self.0)
    }
}

/// Mean density and mean reciprocal density over an altitude interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityAverages {
    /// kg/m^3
    pub mean: f64,
    /// m^3/kg
    pub mean_inverse: f64,
}

impl DensityAverages {
    /// Averages for flight at a single altitude.
    pub fn at_altitude<M: DensityModel + ?Sized>(model: &M, h: f64) -> Result<Self> {
        let rho = model.density(h)?;
        Ok(Self {
            mean: rho,
            mean_inverse: 1.0 / rho,
        })
    }

    /// Both averages over the inclusive grid `h0, h0 + step, ..., hc`.
    pub fn over<M: DensityModel + ?Sized>(model: &M, h0: f64, hc: f64, step: f64) -> Result<Self> {
        let (mut sum, mut sum_inv, mut n) = (0.0, 0.0, 0usize);
        for h in AltitudeGrid::new(h0, hc, step)? {
            let rho = model.density(h)?;
            sum += rho;
            sum_inv += 1.0 / rho;
            n += 1;
        }
        Ok(Self {
            mean: sum / n as f64,
            mean_inverse: sum_inv / n as f64,
        })
    }
}

/// Arithmetic mean of the density over the inclusive altitude grid
/// `h0, h0 + step, ..., hc`. The last point is `hc` itself even when the
/// interval is not a whole number of steps.
pub fn mean_density<M: DensityModel + ?Sized>(
    model: &M,
    h0: f64,
    hc: f64,
    step: f64,
) -> Result<f64> {
    Ok(DensityAverages::over(model, h0, hc, step)?.mean)
}

/// Arithmetic mean of `1 / density` over the same grid as [`mean_density`].
pub fn mean_inverse_density<M: DensityModel + ?Sized>(
    model: &M,
    h0: f64,
    hc: f64,
    step: f64,
) -> Result<f64> {
    Ok(DensityAverages::over(model, h0, hc, step)?.mean_inverse)
}

/// Inclusive uniform altitude grid.
#[derive(Debug, Clone)]
pub(crate) struct AltitudeGrid {
    h0: f64,
    hc: f64,
    step: f64,
    interior: usize,
    next: usize,
}

impl AltitudeGrid {
    pub(crate) fn new(h0: f64, hc: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "atmosphere step",
                value: step,
            });
        }
        if !(hc > h0) {
            return Err(Error::DegenerateSegment { start: h0, end: hc });
        }
        let ratio = (hc - h0) / step;
        let nearest = libm::round(ratio);
        // Points h0 + i*step for i < interior, then hc.
        let interior = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest as usize
        } else {
            libm::ceil(ratio) as usize
        };
        Ok(Self {
            h0,
            hc,
            step,
            interior: interior.max(1),
            next: 0,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.interior + 1
    }
}

impl Iterator for AltitudeGrid {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let i = self.next;
        if i > self.interior {
            return None;
        }
        self.next += 1;
        Some(if i == self.interior {
            self.hc
        } else {
            self.h0 + i as f64 * self.step
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.len() - self.next.min(self.len());
        (left, Some(left))
    }
}
