use std::sync::Arc;

use super::field::{ScalarField, VectorField};
use super::grid::{Boundary, Grid};
use crate::error::{Error, Result};

/// Symmetric nonnegative profile on [-1, 1]; applied as a tensor product over axes.
#[derive(Clone)]
pub struct Kernel {
    pub name: String,
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Kernel({})", self.name)
    }
}

impl Kernel {
    /// (1 - s²)² on |s| < 1.
    pub fn quartic() -> Self {
        Self::custom("quartic", |s| {
            let a = 1.0 - s * s;
            if a > 0.0 {
                a * a
            } else {
                0.0
            }
        })
    }

    pub fn custom(name: &str, profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.to_string(),
            profile: Arc::new(profile),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.profile)(s)
    }

    pub fn validate(&self) -> Result<()> {
        let samples = 257;
        let mut peak: f64 = 0.0;
        let mut mass = 0.0;
        for i in 0..samples {
            let s = i as f64 / (samples - 1) as f64;
            let (a, b) = (self.eval(s), self.eval(-s));
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Kernel(format!("profile not finite at {s}")));
            }
            if a < 0.0 || b < 0.0 {
                return Err(Error::Kernel(format!("profile negative at ±{s}")));
            }
            peak = peak.max(a.abs()).max(b.abs());
            mass += a + b;
        }
        if !(mass > 0.0) {
            return Err(Error::Kernel("profile has zero mass".into()));
        }
        for i in 0..samples {
            let s = i as f64 / (samples - 1) as f64;
            if (self.eval(s) - self.eval(-s)).abs() > 1e-12 * peak {
                return Err(Error::Kernel(format!("profile not even at s = {s}")));
            }
        }
        Ok(())
    }

    /// Mass-normalized discrete weights for offsets -r..=r, r = floor(ell / h).
    pub fn weights(&self, ell: f64, h: f64) -> Vec<f64> {
        let r = (ell / h).floor() as usize;
        let mut w: Vec<f64> = (0..=2 * r)
            .map(|j| self.eval((j as f64 - r as f64) * h / ell))
            .collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    }
}

#[derive(Clone, Debug)]
pub struct Mollified<F> {
    pub field: F,
    /// Set when ℓ is below one grid cell and the field was returned unchanged.
    pub below_grid: bool,
}

fn check_scale(grid: &Grid, ell: f64) -> Result<()> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(Error::Range(format!("mollification scale must be positive, got {ell}")));
    }
    if ell >= grid.period / 4.0 {
        return Err(Error::Range(format!(
            "mollification scale {ell} must be below period/4 = {}",
            grid.period / 4.0
        )));
    }
    Ok(())
}

pub fn mollify(f: &ScalarField, ell: f64, kernel: &Kernel) -> Result<Mollified<ScalarField>> {
    kernel.validate()?;
    check_scale(&f.grid, ell)?;
    let h = f.grid.spacing();
    if ell < h {
        return Ok(Mollified {
            field: f.clone(),
            below_grid: true,
        });
    }
    let w = kernel.weights(ell, h);
    let ns = f.grid.len_space();
    let mut values = Vec::with_capacity(f.values.len());
    for it in 0..f.grid.time_samples() {
        values.extend(convolve_slice(&f.values[it * ns..(it + 1) * ns], &f.grid, &w));
    }
    Ok(Mollified {
        field: ScalarField {
            grid: f.grid,
            values,
        },
        below_grid: false,
    })
}

pub fn mollify_vector(f: &VectorField, ell: f64, kernel: &Kernel) -> Result<Mollified<VectorField>> {
    let mut below = false;
    let mut comps = Vec::with_capacity(f.ncomp());
    for c in 0..f.ncomp() {
        let m = mollify(&f.component(c), ell, kernel)?;
        below = m.below_grid;
        comps.push(m.field.values);
    }
    Ok(Mollified {
        field: VectorField {
            grid: f.grid,
            comps,
        },
        below_grid: below,
    })
}

/// Separable convolution of one spatial slice with odd reflection at clamped edges.
pub(crate) fn convolve_slice(f: &[f64], grid: &Grid, w: &[f64]) -> Vec<f64> {
    let mut out = f.to_vec();
    for axis in 0..grid.dims {
        out = convolve_axis(&out, grid, w, axis);
    }
    out
}

fn convolve_axis(f: &[f64], grid: &Grid, w: &[f64], axis: usize) -> Vec<f64> {
    let n = grid.resolution as isize;
    let r = (w.len() / 2) as isize;
    let stride = if axis == 0 { 1 } else { grid.resolution };
    let lines = f.len() / grid.resolution;
    let mut out = vec![0.0; f.len()];
    let mut line = vec![0.0; grid.resolution];
    for l in 0..lines {
        let base = if axis == 0 {
            l * grid.resolution
        } else {
            (l / grid.resolution) * grid.resolution * grid.resolution + l % grid.resolution
        };
        for (i, slot) in line.iter_mut().enumerate() {
            *slot = f[base + i * stride];
        }
        let get = |i: isize| -> f64 {
            match grid.boundary {
                Boundary::Periodic => line[i.rem_euclid(n) as usize],
                Boundary::Clamped => {
                    if i < 0 {
                        2.0 * line[0] - line[(-i).min(n - 1) as usize]
                    } else if i >= n {
                        let m = (2 * (n - 1) - i).max(0);
                        2.0 * line[(n - 1) as usize] - line[m as usize]
                    } else {
                        line[i as usize]
                    }
                }
            }
        };
        for i in 0..n {
            let mut s = 0.0;
            for (j, wj) in w.iter().enumerate() {
                s += wj * get(i + j as isize - r);
            }
            out[base + i as usize * stride] = s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants_preserved() {
        let g = Grid::periodic(2, 32, 1.0).unwrap();
        let f = ScalarField::constant(g, 3.25);
        let m = mollify(&f, 0.1, &Kernel::quartic()).unwrap();
        assert!(!m.below_grid);
        assert!(m.field.values.iter().all(|v| (v - 3.25).abs() < 1e-14));
        let c = Grid::clamped(2, 32, 1.0).unwrap();
        let f = ScalarField::from_fn(c, |x, y, _| 2.0 * x - y + 1.0);
        let m = mollify(&f, 0.1, &Kernel::quartic()).unwrap();
        for (a, b) in m.field.values.iter().zip(&f.values) {
            assert!((a - b).abs() < 1e-13, "affine maps survive odd reflection");
        }
    }

    #[test]
    fn scale_errors_and_warning() {
        let g = Grid::periodic(2, 32, 1.0).unwrap();
        let f = ScalarField::constant(g, 1.0);
        assert!(mollify(&f, 0.25, &Kernel::quartic()).is_err());
        assert!(mollify(&f, 0.0, &Kernel::quartic()).is_err());
        let m = mollify(&f, 0.01, &Kernel::quartic()).unwrap();
        assert!(m.below_grid);
    }

    #[test]
    fn asymmetric_kernel_rejected() {
        let k = Kernel::custom("lopsided", |s| if s.abs() < 1.0 { 1.0 + 0.5 * s } else { 0.0 });
        assert!(matches!(k.validate(), Err(Error::Kernel(_))));
        let g = Grid::periodic(1, 64, 1.0).unwrap();
        let f = ScalarField::constant(g, 1.0);
        assert!(mollify(&f, 0.1, &k).is_err());
    }

    #[test]
    fn sine_error_is_second_order() {
        let err = |n: usize, ell: f64| {
            let g = Grid::periodic(1, n, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
            let k = Kernel::quartic();
            let m = mollify(&f, ell, &k).unwrap().field;
            // discrete convolution of a sine is the sine times the discrete kernel symbol
            let h = g.spacing();
            let w = k.weights(ell, h);
            let r = (w.len() / 2) as f64;
            let sym: f64 = w
                .iter()
                .enumerate()
                .map(|(j, wj)| wj * (2.0 * PI * (j as f64 - r) * h).cos())
                .sum();
            let exact_gap = (1.0 - sym).abs();
            let sup = m
                .values
                .iter()
                .zip(&f.values)
                .fold(0.0f64, |s, (a, b)| s.max((a - b).abs()));
            assert!((sup - exact_gap).abs() < 1e-12);
            sup
        };
        let e1 = err(1024, 0.04);
        let e2 = err(2048, 0.02);
        let slope = (e1 / e2).log2();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }
}
