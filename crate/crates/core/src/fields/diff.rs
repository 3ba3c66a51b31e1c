//! Finite differences on one spatial slice, plus spectral derivatives on the torus.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::fft::{wavenumber, Fft1, Fft2};
use super::grid::{Boundary, Grid};

#[inline]
fn stride(grid: &Grid, axis: usize) -> usize {
    if axis == 0 {
        1
    } else {
        grid.resolution
    }
}

#[inline]
fn pos(grid: &Grid, idx: usize, axis: usize) -> usize {
    if axis == 0 {
        idx % grid.resolution
    } else {
        (idx / grid.resolution) % grid.resolution
    }
}

/// Centered first difference along `axis`; second-order one-sided at clamped edges.
pub fn d1(f: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    let n = grid.resolution;
    let s = stride(grid, axis);
    let h = grid.spacing();
    let inv = 1.0 / (2.0 * h);
    (0..f.len())
        .map(|idx| {
            let i = pos(grid, idx, axis);
            let base = idx - i * s;
            match grid.boundary {
                Boundary::Periodic => {
                    let ip = base + ((i + 1) % n) * s;
                    let im = base + ((i + n - 1) % n) * s;
                    (f[ip] - f[im]) * inv
                }
                Boundary::Clamped => {
                    if i == 0 {
                        (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) * inv
                    } else if i == n - 1 {
                        (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) * inv
                    } else {
                        (f[idx + s] - f[idx - s]) * inv
                    }
                }
            }
        })
        .collect()
}

/// Centered second difference along `axis`; second-order one-sided at clamped edges.
pub fn d2(f: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    let n = grid.resolution;
    let s = stride(grid, axis);
    let h = grid.spacing();
    let inv = 1.0 / (h * h);
    (0..f.len())
        .map(|idx| {
            let i = pos(grid, idx, axis);
            let base = idx - i * s;
            match grid.boundary {
                Boundary::Periodic => {
                    let ip = base + ((i + 1) % n) * s;
                    let im = base + ((i + n - 1) % n) * s;
                    (f[ip] - 2.0 * f[idx] + f[im]) * inv
                }
                Boundary::Clamped => {
                    if i == 0 {
                        (2.0 * f[idx] - 5.0 * f[idx + s] + 4.0 * f[idx + 2 * s] - f[idx + 3 * s])
                            * inv
                    } else if i == n - 1 {
                        (2.0 * f[idx] - 5.0 * f[idx - s] + 4.0 * f[idx - 2 * s] - f[idx - 3 * s])
                            * inv
                    } else {
                        (f[idx + s] - 2.0 * f[idx] + f[idx - s]) * inv
                    }
                }
            }
        })
        .collect()
}

/// Fourth-order first difference along `axis`; fourth-order one-sided stencils at clamped edges.
pub fn d1_fourth(f: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    let n = grid.resolution;
    let s = stride(grid, axis);
    let inv = 1.0 / (12.0 * grid.spacing());
    (0..f.len())
        .map(|idx| {
            let i = pos(grid, idx, axis);
            let base = idx - i * s;
            let at = |k: isize| -> f64 {
                let j = match grid.boundary {
                    Boundary::Periodic => (i as isize + k).rem_euclid(n as isize) as usize,
                    Boundary::Clamped => (i as isize + k) as usize,
                };
                f[base + j * s]
            };
            let centered = |at: &dyn Fn(isize) -> f64| -(at(2)) + 8.0 * at(1) - 8.0 * at(-1) + at(-2);
            let d = match grid.boundary {
                Boundary::Periodic => centered(&at),
                Boundary::Clamped => {
                    if i == 0 {
                        -25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)
                    } else if i == 1 {
                        -3.0 * at(-1) - 10.0 * at(0) + 18.0 * at(1) - 6.0 * at(2) + at(3)
                    } else if i == n - 2 {
                        3.0 * at(1) + 10.0 * at(0) - 18.0 * at(-1) + 6.0 * at(-2) - at(-3)
                    } else if i == n - 1 {
                        25.0 * at(0) - 48.0 * at(-1) + 36.0 * at(-2) - 16.0 * at(-3) + 3.0 * at(-4)
                    } else {
                        centered(&at)
                    }
                }
            };
            d * inv
        })
        .collect()
}

/// Mixed second difference ∂1∂2.
pub fn d12(f: &[f64], grid: &Grid) -> Vec<f64> {
    d1(&d1(f, grid, 0), grid, 1)
}

/// Spectral partial derivative on a periodic 1-D or 2-D slice.
pub fn spectral_partial(f: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    let n = grid.resolution;
    let scale = 2.0 * PI / grid.period;
    if grid.dims == 1 {
        let fft = Fft1::new(n);
        let mut hat = fft.forward_real(f);
        for (i, z) in hat.iter_mut().enumerate() {
            let k = if 2 * i == n { 0 } else { wavenumber(i, n) };
            *z *= Complex64::new(0.0, scale * k as f64);
        }
        fft.inverse(&mut hat);
        return hat.into_iter().map(|z| z.re).collect();
    }
    let fft = Fft2::new(n);
    let mut hat = fft.forward_real(f);
    for (idx, z) in hat.iter_mut().enumerate() {
        let i = if axis == 0 { idx % n } else { idx / n };
        let k = if 2 * i == n { 0 } else { wavenumber(i, n) };
        *z *= Complex64::new(0.0, scale * k as f64);
    }
    fft.inverse_real(hat)
}

/// Spectral divergence of a 2-D periodic vector slice.
pub fn spectral_divergence(c1: &[f64], c2: &[f64], grid: &Grid) -> Vec<f64> {
    let a = spectral_partial(c1, grid, 0);
    let b = spectral_partial(c2, grid, 1);
    a.iter().zip(&b).map(|(x, y)| x + y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..grid.len_space())
            .map(|i| {
                let [x, y] = grid.point(i);
                f(x, y)
            })
            .collect()
    }

    #[test]
    fn clamped_differences_exact_on_quadratics() {
        let g = Grid::clamped(2, 16, 1.0).unwrap();
        let f = sample(&g, |x, y| 3.0 * x * x - 2.0 * x * y + y);
        let fx = d1(&f, &g, 0);
        let fyy = d2(&f, &g, 1);
        let fxx = d2(&f, &g, 0);
        let fxy = d12(&f, &g);
        for i in 0..g.len_space() {
            let [x, y] = g.point(i);
            assert!((fx[i] - (6.0 * x - 2.0 * y)).abs() < 1e-10);
            assert!(fyy[i].abs() < 1e-8);
            assert!((fxx[i] - 6.0).abs() < 1e-8);
            assert!((fxy[i] + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fourth_order_exact_on_quartics() {
        let g = Grid::clamped(2, 16, 1.0).unwrap();
        let f = sample(&g, |x, y| x.powi(4) - 2.0 * x * x * y + y.powi(3));
        let fx = d1_fourth(&f, &g, 0);
        let fy = d1_fourth(&f, &g, 1);
        for i in 0..g.len_space() {
            let [x, y] = g.point(i);
            assert!((fx[i] - (4.0 * x.powi(3) - 4.0 * x * y)).abs() < 1e-10);
            assert!((fy[i] - (-2.0 * x * x + 3.0 * y * y)).abs() < 1e-10);
        }
        let err = |n: usize| {
            let g = Grid::periodic(1, n, 1.0).unwrap();
            let f: Vec<f64> = (0..n).map(|i| (2.0 * PI * g.coord(i)).sin()).collect();
            let d = d1_fourth(&f, &g, 0);
            (0..n).fold(0.0f64, |m, i| m.max((d[i] - 2.0 * PI * (2.0 * PI * g.coord(i)).cos()).abs()))
        };
        assert!((err(32) / err(64)).log2() > 3.9);
    }

    #[test]
    fn spectral_derivative_of_trig_is_exact() {
        let g = Grid::periodic(2, 32, 1.0).unwrap();
        let f = sample(&g, |x, y| (2.0 * PI * (2.0 * x + 3.0 * y)).sin());
        let fy = spectral_partial(&f, &g, 1);
        for i in 0..g.len_space() {
            let [x, y] = g.point(i);
            let exact = 6.0 * PI * (2.0 * PI * (2.0 * x + 3.0 * y)).cos();
            assert!((fy[i] - exact).abs() < 1e-10);
        }
    }
}
