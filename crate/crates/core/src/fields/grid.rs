use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary treatment of the spatial axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Torus of side `period`; sample `i` sits at `origin + i * period / N`.
    Periodic,
    /// Closed square of side `period`; sample `i` sits at `origin + i * period / (N - 1)`.
    Clamped,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeAxis {
    pub samples: usize,
    pub start: f64,
    pub step: f64,
}

impl TimeAxis {
    pub fn time(&self, it: usize) -> f64 {
        self.start + it as f64 * self.step
    }
}

/// Uniform sampling of T^n or [0, L]^n, optionally extended by a time axis.
///
/// Samples are stored x-fastest: `i1 + N * i2`, then time-major for space-time fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dims: usize,
    pub resolution: usize,
    pub period: f64,
    pub origin: f64,
    pub boundary: Boundary,
    pub time: Option<TimeAxis>,
}

impl Grid {
    pub fn periodic(dims: usize, resolution: usize, period: f64) -> Result<Self> {
        let g = Grid {
            dims,
            resolution,
            period,
            origin: 0.0,
            boundary: Boundary::Periodic,
            time: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn clamped(dims: usize, resolution: usize, side: f64) -> Result<Self> {
        let g = Grid {
            dims,
            resolution,
            period: side,
            origin: 0.0,
            boundary: Boundary::Clamped,
            time: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_time(mut self, samples: usize, start: f64, step: f64) -> Result<Self> {
        if samples == 0 || !(step > 0.0) || !start.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "time axis needs samples >= 1 and step > 0 (got {samples}, {step})"
            )));
        }
        self.time = Some(TimeAxis {
            samples,
            start,
            step,
        });
        Ok(self)
    }

    /// Spatial part only.
    pub fn spatial(&self) -> Grid {
        Grid { time: None, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 || self.dims > 2 {
            return Err(Error::InvalidGrid(format!(
                "dims must be 1 or 2, got {}",
                self.dims
            )));
        }
        if self.resolution < 8 {
            return Err(Error::InvalidGrid(format!(
                "resolution must be >= 8, got {}",
                self.resolution
            )));
        }
        if !self.resolution.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "resolution must be a power of two, got {}",
                self.resolution
            )));
        }
        if !(self.period > 0.0) || !self.period.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.period / self.resolution as f64,
            Boundary::Clamped => self.period / (self.resolution - 1) as f64,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing()
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn len_space(&self) -> usize {
        self.resolution.pow(self.dims as u32)
    }

    pub fn time_samples(&self) -> usize {
        self.time.map_or(1, |t| t.samples)
    }

    pub fn len(&self) -> usize {
        self.len_space() * self.time_samples()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 + self.resolution * i2
    }

    /// Spatial coordinates of flat spatial index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let n = self.resolution;
        if self.dims == 1 {
            [self.coord(idx), 0.0]
        } else {
            [self.coord(idx % n), self.coord(idx / n)]
        }
    }

    /// Quadrature weight of each sample (trapezoid rule, exact periodic sum).
    pub fn weight_1d(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.boundary {
            Boundary::Periodic => h,
            Boundary::Clamped => {
                if i == 0 || i + 1 == self.resolution {
                    0.5 * h
                } else {
                    h
                }
            }
        }
    }

    pub fn weight(&self, idx: usize) -> f64 {
        let n = self.resolution;
        if self.dims == 1 {
            self.weight_1d(idx)
        } else {
            self.weight_1d(idx % n) * self.weight_1d(idx / n)
        }
    }

    pub fn measure(&self) -> f64 {
        self.period.powi(self.dims as i32)
    }

    pub fn same_space(&self, other: &Grid) -> bool {
        self.dims == other.dims
            && self.resolution == other.resolution
            && self.period == other.period
            && self.origin == other.origin
            && self.boundary == other.boundary
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_odd_resolution() {
        assert!(Grid::periodic(2, 4, 1.0).is_err());
        assert!(Grid::periodic(2, 12, 1.0).is_err());
        assert!(Grid::periodic(2, 16, 0.0).is_err());
        assert!(Grid::periodic(3, 16, 1.0).is_err());
    }

    #[test]
    fn spacing_and_weights() {
        let g = Grid::periodic(2, 16, 2.0).unwrap();
        assert_eq!(g.spacing(), 0.125);
        let total: f64 = (0..g.len_space()).map(|i| g.weight(i)).sum();
        assert!((total - 4.0).abs() < 1e-12);
        let c = Grid::clamped(1, 8, 1.0).unwrap();
        let total: f64 = (0..8).map(|i| c.weight(i)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(c.coord(7), 1.0);
    }
}
