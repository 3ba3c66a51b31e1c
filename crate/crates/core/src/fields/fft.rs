use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Signed integer wavenumber of FFT bin `i` on `n` points; bin n/2 maps to -n/2.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub struct Fft1 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft1 {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            n,
            fwd: p.plan_fft_forward(n),
            inv: p.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.fwd.process(data);
    }

    /// Inverse transform including the 1/n normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inv.process(data);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut d);
        d
    }
}

/// Square 2-D transform on an n x n array stored x-fastest.
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            n,
            fwd: p.plan_fft_forward(n),
            inv: p.plan_fft_inverse(n),
        }
    }

    fn pass(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        data.par_chunks_mut(n).for_each(|row| plan.process(row));
        transpose(data, n);
        data.par_chunks_mut(n).for_each(|row| plan.process(row));
        transpose(data, n);
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        let plan = self.fwd.clone();
        self.pass(data, &plan);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        let plan = self.inv.clone();
        self.pass(data, &plan);
        let s = 1.0 / (self.n * self.n) as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut d);
        d
    }

    /// Inverse transform returning the real part.
    pub fn inverse_real(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.inverse(&mut data);
        data.into_iter().map(|z| z.re).collect()
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_2d() {
        let n = 16;
        let vals: Vec<f64> = (0..n * n).map(|i| ((i * 7919) % 31) as f64 - 15.0).collect();
        let f = Fft2::new(n);
        let back = f.inverse_real(f.forward_real(&vals));
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_lands_in_its_bin() {
        let n = 16;
        let vals: Vec<f64> = (0..n * n)
            .map(|idx| {
                let (i1, i2) = (idx % n, idx / n);
                (2.0 * std::f64::consts::PI * (3.0 * i1 as f64 + i2 as f64) / n as f64).cos()
            })
            .collect();
        let hat = Fft2::new(n).forward_real(&vals);
        let peak = hat[3 + n].norm();
        assert!((peak - (n * n) as f64 / 2.0).abs() < 1e-9);
        assert_eq!(wavenumber(8, 16), -8);
        assert_eq!(wavenumber(9, 16), -7);
    }
}
