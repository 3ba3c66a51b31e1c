//! Scaling of the quadratic commutator (v∗φ_ℓ)♯e − (v♯e)∗φ_ℓ in C¹.
//!
//! The synthetic map is a unit-speed periodic curve whose tangent angle is a lacunary
//! series, so v′ ∈ C^α exactly and v♯e = |v′|² ≡ 1 is smooth. The measured quantity
//! is then ‖ |v′∗φ_ℓ|² − 1 ‖_{C¹} on the whole circle.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::{wavenumber, Fft1};
use super::mollify::Kernel;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    /// θ(x) = amplitude · Σ_j 2^{−jα} sin(2π 2^j x + φ_j), phases drawn from the seed.
    Lacunary { alpha: f64, amplitude: f64, seed: u64 },
    /// θ(x) = amplitude · sin(2π x): a smooth curve.
    Smooth { amplitude: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorFit {
    pub slope: f64,
    pub scales: Vec<f64>,
    pub errors: Vec<f64>,
    pub samples: usize,
}

pub const DEFAULT_SAMPLES: usize = 1 << 20;

/// Default scale ladder 2^-15 .. 2^-10.
pub fn default_scales() -> Vec<f64> {
    (10..=15).map(|j| 2f64.powi(-j)).collect()
}

pub fn commutator_exponent(alpha: f64, scales: &[f64], seed: u64) -> Result<CommutatorFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    commutator_fit(
        &Generator::Lacunary {
            alpha,
            amplitude: 1.0,
            seed,
        },
        scales,
        DEFAULT_SAMPLES,
    )
}

fn angle(gen: &Generator, samples: usize) -> Vec<f64> {
    let xs = (0..samples).map(|i| i as f64 / samples as f64);
    match gen {
        Generator::Lacunary {
            alpha,
            amplitude,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut modes = Vec::new();
            let mut j = 0;
            while (1usize << j) * 4 <= samples {
                let phase: f64 = rng.gen::<f64>() * 2.0 * PI;
                modes.push((2f64.powi(j), 2f64.powf(-(j as f64) * alpha), phase));
                j += 1;
            }
            xs.map(|x| {
                amplitude
                    * modes
                        .iter()
                        .map(|(f, a, p)| a * (2.0 * PI * f * x + p).sin())
                        .sum::<f64>()
            })
            .collect()
        }
        Generator::Smooth { amplitude } => xs.map(|x| amplitude * (2.0 * PI * x).sin()).collect(),
    }
}

pub fn commutator_fit(gen: &Generator, scales: &[f64], samples: usize) -> Result<CommutatorFit> {
    if scales.len() < 4 {
        return Err(Error::Config(format!(
            "need at least 4 scales, got {}",
            scales.len()
        )));
    }
    let lo = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scales.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 10.0 {
        return Err(Error::Config("scales must be positive and span at least one decade".into()));
    }
    if !samples.is_power_of_two() || samples < 1024 {
        return Err(Error::Config("samples must be a power of two >= 1024".into()));
    }
    let h = 1.0 / samples as f64;
    if lo < 4.0 * h || hi >= 0.25 {
        return Err(Error::Config(format!(
            "scales must lie in [4h, 1/4) with h = {h}"
        )));
    }
    let theta = angle(gen, samples);
    let fft = Fft1::new(samples);
    let c_hat = fft.forward_real(&theta.iter().map(|t| t.cos()).collect::<Vec<_>>());
    let s_hat = fft.forward_real(&theta.iter().map(|t| t.sin()).collect::<Vec<_>>());
    let kernel = Kernel::quartic();
    let errors: Vec<f64> = scales
        .par_iter()
        .map(|&ell| {
            let w = kernel.weights(ell, h);
            let r = w.len() / 2;
            let mut k = vec![Complex64::new(0.0, 0.0); samples];
            for (j, wj) in w.iter().enumerate() {
                let idx = (j + samples - r) % samples;
                k[idx] += Complex64::new(*wj, 0.0);
            }
            fft.forward(&mut k);
            let mut a: Vec<Complex64> = c_hat.iter().zip(&k).map(|(x, y)| x * y).collect();
            let mut b: Vec<Complex64> = s_hat.iter().zip(&k).map(|(x, y)| x * y).collect();
            fft.inverse(&mut a);
            fft.inverse(&mut b);
            let e: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| x.re * x.re + y.re * y.re - 1.0)
                .collect();
            let mut de = fft.forward_real(&e);
            for (i, z) in de.iter_mut().enumerate() {
                let kk = if 2 * i == samples { 0 } else { wavenumber(i, samples) };
                *z *= Complex64::new(0.0, 2.0 * PI * kk as f64);
            }
            fft.inverse(&mut de);
            let c0 = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let c1 = de.iter().fold(0.0f64, |m, x| m.max(x.re.abs()));
            c0 + c1
        })
        .collect();
    let slope = fit_slope(
        &scales.iter().map(|s| s.ln()).collect::<Vec<_>>(),
        &errors.iter().map(|e| e.ln()).collect::<Vec<_>>(),
    );
    Ok(CommutatorFit {
        slope,
        scales: scales.to_vec(),
        errors,
        samples,
    })
}

/// Least-squares slope of y against x.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Coefficient of determination of the least-squares line.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let s = fit_slope(x, y);
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - my - s * (a - mx)).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if ss_tot == 0.0 {
        return 1.0;
    }
    1.0 - ss_res / ss_tot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_errors() {
        assert!(commutator_exponent(0.5, &[1e-3, 2e-3, 4e-3], 1).is_err());
        assert!(commutator_exponent(1.5, &default_scales(), 1).is_err());
        assert!(commutator_fit(
            &Generator::Smooth { amplitude: 1.0 },
            &[1e-3, 1.2e-3, 1.4e-3, 1.6e-3],
            1 << 14
        )
        .is_err());
    }

    #[test]
    fn smooth_curve_commutes_fast() {
        let scales: Vec<f64> = (4..=8).map(|j| 2f64.powi(-j)).collect();
        let fit = commutator_fit(&Generator::Smooth { amplitude: 1.0 }, &scales, 1 << 14).unwrap();
        assert!(fit.slope >= 1.0, "slope {}", fit.slope);
    }

    #[test]
    fn fit_slope_of_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((fit_slope(&x, &y) - 2.0).abs() < 1e-14);
    }
}
