use rustfft::num_complex::Complex64;

use super::diff::spectral_divergence;
use super::fft::{wavenumber, Fft2};
use super::field::VectorField;
use crate::error::{Error, Result};

/// Leray projection ŵ(ξ) ↦ (I − ξξᵀ/|ξ|²) ŵ(ξ), zero mode untouched, per time slice.
pub fn solenoidal_project(w: &VectorField) -> Result<VectorField> {
    let g = w.grid;
    g.validate()?;
    if !g.is_periodic() || g.dims != 2 || w.ncomp() != 2 {
        return Err(Error::InvalidGrid(
            "solenoidal projection needs a 2-D periodic vector field".into(),
        ));
    }
    let n = g.resolution;
    let ns = g.len_space();
    let fft = Fft2::new(n);
    let mut out = VectorField::zeros(g, 2);
    for it in 0..g.time_samples() {
        let mut a = fft.forward_real(&w.comps[0][it * ns..(it + 1) * ns]);
        let mut b = fft.forward_real(&w.comps[1][it * ns..(it + 1) * ns]);
        for idx in 0..ns {
            let k1 = wavenumber(idx % n, n) as f64;
            let k2 = wavenumber(idx / n, n) as f64;
            let kk = k1 * k1 + k2 * k2;
            if kk == 0.0 {
                continue;
            }
            let dot: Complex64 = (a[idx] * k1 + b[idx] * k2) / kk;
            a[idx] -= dot * k1;
            b[idx] -= dot * k2;
        }
        let a = fft.inverse_real(a);
        let b = fft.inverse_real(b);
        out.comps[0][it * ns..(it + 1) * ns].copy_from_slice(&a);
        out.comps[1][it * ns..(it + 1) * ns].copy_from_slice(&b);
    }
    Ok(out)
}

/// Sup norm of the spectral divergence over all time slices.
pub fn max_spectral_divergence(w: &VectorField) -> f64 {
    let g = w.grid.spatial();
    let ns = g.len_space();
    let mut m: f64 = 0.0;
    for it in 0..w.grid.time_samples() {
        let d = spectral_divergence(
            &w.comps[0][it * ns..(it + 1) * ns],
            &w.comps[1][it * ns..(it + 1) * ns],
            &g,
        );
        m = d.iter().fold(m, |acc, x| acc.max(x.abs()));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::grid::Grid;
    use std::f64::consts::PI;

    fn parts(g: Grid) -> (VectorField, VectorField) {
        // ψ = sin(2πx) cos(4πy), φ = cos(2π(x + 2y))
        let perp = VectorField::from_fn(g, |x, y, _| {
            let tau = 2.0 * PI;
            [
                tau * 2.0 * (tau * x).sin() * (2.0 * tau * y).sin(),
                tau * (tau * x).cos() * (2.0 * tau * y).cos(),
            ]
        });
        let grad = VectorField::from_fn(g, |x, y, _| {
            let tau = 2.0 * PI;
            let s = -(tau * (x + 2.0 * y)).sin() * tau;
            [s, 2.0 * s]
        });
        (perp, grad)
    }

    #[test]
    fn keeps_curl_part_and_kills_gradient() {
        let g = Grid::periodic(2, 32, 1.0).unwrap();
        let (perp, grad) = parts(g);
        let sum = VectorField::new(
            g,
            (0..2)
                .map(|c| perp.comps[c].iter().zip(&grad.comps[c]).map(|(a, b)| a + b).collect())
                .collect(),
        )
        .unwrap();
        let p = solenoidal_project(&sum).unwrap();
        for c in 0..2 {
            for (a, b) in p.comps[c].iter().zip(&perp.comps[c]) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        let pg = solenoidal_project(&grad).unwrap();
        assert!(pg.max_abs() < 1e-10);
        let pp = solenoidal_project(&perp).unwrap();
        for c in 0..2 {
            for (a, b) in pp.comps[c].iter().zip(&perp.comps[c]) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        assert!(max_spectral_divergence(&p) < 1e-9);
    }
}
