use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::expr::{parse_symbol_file, Expr};
use crate::error::{Error, Result};
use crate::fields::fft::{wavenumber, Fft2};
use crate::fields::{ScalarField, VectorField};

type Symbol = Arc<dyn Fn([f64; 2]) -> [Complex64; 2] + Send + Sync>;

/// 0-homogeneous symbol m: Z² \ {0} → C² with v̂(ξ) = m(ξ) θ̂(ξ).
#[derive(Clone)]
pub struct Multiplier {
    pub name: String,
    symbol: Symbol,
}

impl std::fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Multiplier({})", self.name)
    }
}

impl Multiplier {
    pub fn new(name: &str, symbol: impl Fn([f64; 2]) -> [Complex64; 2] + Send + Sync + 'static) -> Self {
        Self {
            name: name.to_string(),
            symbol: Arc::new(symbol),
        }
    }

    /// i(−ξ₂, ξ₁)/|ξ|, the velocity ∇⊥(−Δ)^{−1/2}θ.
    pub fn sqg() -> Self {
        Self::new("sqg", |xi| {
            let n = xi[0].hypot(xi[1]);
            [Complex64::new(0.0, -xi[1] / n), Complex64::new(0.0, xi[0] / n)]
        })
    }

    /// (ξ₁ξ₂, −ξ₁²)/|ξ|².
    pub fn ipm() -> Self {
        Self::new("ipm", |xi| {
            let n2 = xi[0] * xi[0] + xi[1] * xi[1];
            [
                Complex64::new(xi[0] * xi[1] / n2, 0.0),
                Complex64::new(-xi[0] * xi[0] / n2, 0.0),
            ]
        })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "sqg" => Ok(Self::sqg()),
            "ipm" => Ok(Self::ipm()),
            _ => Err(Error::Config(format!("unknown multiplier '{name}' (expected sqg or ipm)"))),
        }
    }

    pub fn from_exprs(name: &str, exprs: [Expr; 2]) -> Self {
        let [a, b] = exprs;
        Self::new(name, move |xi| [a.eval(xi), b.eval(xi)])
    }

    pub fn from_symbol_file(name: &str, text: &str) -> Result<Self> {
        Ok(Self::from_exprs(name, parse_symbol_file(text)?))
    }

    pub fn eval(&self, xi: [f64; 2]) -> [Complex64; 2] {
        (self.symbol)(xi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub homogeneous: bool,
    pub incompressible: bool,
    pub parity: Parity,
    /// m(−ξ) = conj m(ξ), the condition for real output.
    pub real: bool,
    pub modes_tested: usize,
    pub max_homogeneity_error: f64,
    pub max_divergence: f64,
}

const CHECK_TOL: f64 = 1e-12;

fn close(a: [Complex64; 2], b: [Complex64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

/// Modes with |ξ|∞ ≤ 16, ξ ≠ 0.
fn test_modes() -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for k2 in -16i32..=16 {
        for k1 in -16i32..=16 {
            if k1 != 0 || k2 != 0 {
                out.push([k1 as f64, k2 as f64]);
            }
        }
    }
    out
}

pub fn multiplier_check(mult: &Multiplier) -> MultiplierReport {
    let modes = test_modes();
    let mut hom: f64 = 0.0;
    let mut div: f64 = 0.0;
    let mut even = true;
    let mut odd = true;
    let mut real = true;
    let mut tested = 0;
    for xi in &modes {
        let m = mult.eval(*xi);
        for j in 1..=4 {
            let s = (1 << j) as f64;
            let e = close(mult.eval([s * xi[0], s * xi[1]]), m);
            hom = if e.is_nan() { f64::INFINITY } else { hom.max(e) };
            tested += 1;
        }
        let n = xi[0].hypot(xi[1]);
        let d = (m[0] * xi[0] + m[1] * xi[1]).norm() / n;
        div = if d.is_nan() { f64::INFINITY } else { div.max(d) };
        let mm = mult.eval([-xi[0], -xi[1]]);
        even &= close(mm, m) <= CHECK_TOL;
        odd &= close(mm, [-m[0], -m[1]]) <= CHECK_TOL;
        real &= close(mm, [m[0].conj(), m[1].conj()]) <= CHECK_TOL;
        tested += 1;
    }
    MultiplierReport {
        homogeneous: hom <= CHECK_TOL,
        incompressible: div <= CHECK_TOL,
        parity: match (even, odd) {
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            // m ≡ 0 is both; report it as even
            (true, true) => Parity::Even,
            _ => Parity::Neither,
        },
        real,
        modes_tested: tested,
        max_homogeneity_error: hom,
        max_divergence: div,
    }
}

/// v̂(ξ) = m(ξ)θ̂(ξ) per time slice. The zero mode and the unpaired Nyquist modes of the
/// output are set to zero; the symbol must satisfy m(−ξ) = conj m(ξ) on the grid modes.
pub fn multiplier_apply(mult: &Multiplier, theta: &ScalarField) -> Result<VectorField> {
    let g = theta.grid;
    g.validate()?;
    if !g.is_periodic() || g.dims != 2 {
        return Err(Error::InvalidGrid("multipliers act on 2-D periodic fields".into()));
    }
    let n = g.resolution;
    let ns = g.len_space();
    let half = (n / 2) as i64;
    let mut sym = vec![[Complex64::new(0.0, 0.0); 2]; ns];
    for (idx, s) in sym.iter_mut().enumerate() {
        let k1 = wavenumber(idx % n, n);
        let k2 = wavenumber(idx / n, n);
        if (k1 == 0 && k2 == 0) || k1 == -half || k2 == -half {
            continue;
        }
        let m = mult.eval([k1 as f64, k2 as f64]);
        let mm = mult.eval([-k1 as f64, -k2 as f64]);
        let scale = 1.0 + m[0].norm().max(m[1].norm());
        if !(close(mm, [m[0].conj(), m[1].conj()]) <= 1e-12 * scale) {
            return Err(Error::Symbol(format!(
                "{}: m(-xi) != conj m(xi) at xi = ({k1}, {k2}); output would not be real",
                mult.name
            )));
        }
        *s = m;
    }
    let fft = Fft2::new(n);
    let slices: Vec<(Vec<f64>, Vec<f64>)> = (0..g.time_samples())
        .into_par_iter()
        .map(|it| {
            let th = fft.forward_real(theta.slice(it));
            let a: Vec<Complex64> = th.iter().zip(&sym).map(|(t, m)| m[0] * t).collect();
            let b: Vec<Complex64> = th.iter().zip(&sym).map(|(t, m)| m[1] * t).collect();
            (fft.inverse_real(a), fft.inverse_real(b))
        })
        .collect();
    let mut out = VectorField::zeros(g, 2);
    for (it, (a, b)) in slices.into_iter().enumerate() {
        out.comps[0][it * ns..(it + 1) * ns].copy_from_slice(&a);
        out.comps[1][it * ns..(it + 1) * ns].copy_from_slice(&b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;
    use std::f64::consts::PI;

    #[test]
    fn builtin_reports() {
        let r = multiplier_check(&Multiplier::sqg());
        assert!(r.homogeneous && r.incompressible && r.real);
        assert_eq!(r.parity, Parity::Odd);
        let r = multiplier_check(&Multiplier::ipm());
        assert!(r.homogeneous && r.incompressible && r.real);
        assert_eq!(r.parity, Parity::Even);
        let c = Multiplier::new("const", |_| [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let r = multiplier_check(&c);
        assert!(r.homogeneous && !r.incompressible);
    }

    #[test]
    fn sqg_single_mode() {
        let g = Grid::periodic(2, 128, 1.0).unwrap();
        let th = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
        let v = multiplier_apply(&Multiplier::sqg(), &th).unwrap();
        for i in 0..g.len() {
            let x = g.point(i)[0];
            assert!(v.comps[0][i].abs() < 1e-12);
            assert!((v.comps[1][i] - (2.0 * PI * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn ipm_kills_horizontal_layers_and_constants_vanish() {
        let g = Grid::periodic(2, 32, 1.0).unwrap();
        let th = ScalarField::from_fn(g, |_, y, _| (2.0 * PI * y).sin() + 0.3 * (6.0 * PI * y).cos());
        assert!(multiplier_apply(&Multiplier::ipm(), &th).unwrap().max_abs() < 1e-14);
        let c = ScalarField::constant(g, 4.0);
        assert!(multiplier_apply(&Multiplier::sqg(), &c).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn non_real_symbol_rejected() {
        let g = Grid::periodic(2, 16, 1.0).unwrap();
        let bad = Multiplier::new("bad", |_| [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
        let th = ScalarField::constant(g, 1.0);
        assert!(matches!(multiplier_apply(&bad, &th), Err(Error::Symbol(_))));
    }

    #[test]
    fn file_symbol_matches_builtin() {
        let m = Multiplier::from_symbol_file("file-ipm", "m1 = xi1*xi2/norm^2\nm2 = -xi1^2/norm^2").unwrap();
        for xi in [[1.0, 2.0], [-3.0, 5.0], [7.0, -1.0]] {
            assert!(close(m.eval(xi), Multiplier::ipm().eval(xi)) < 1e-15);
        }
    }
}
