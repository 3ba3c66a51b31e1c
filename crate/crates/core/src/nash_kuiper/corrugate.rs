//! One corrugation step adding a primitive metric a²ν⊗ν, and the frequency rule.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bessel::Corrugation;
use super::geometry::{check_map, dot, frame, induced_metric};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField};

/// Minimum samples per oscillation accepted by [`corrugation_step`].
pub const MIN_SAMPLES_PER_WAVE: f64 = 8.0;

/// Largest frequency with at least `samples_per_wave` samples per oscillation along direction ν.
pub fn max_resolvable(h: f64, nu: [f64; 2], samples_per_wave: f64) -> f64 {
    2.0 * PI / (samples_per_wave * h * nu[0].abs().max(nu[1].abs()))
}

/// ũ = u + (Γ₁(λx·ν) τ + Γ₂(λx·ν) n)/λ with τ = du·G⁻¹ν/|du·G⁻¹ν| the tangent direction dual to ν
/// under G = u♯e, r = 1/√(νᵀG⁻¹ν), and n the unit normal.
pub fn corrugation_step(u: &VectorField, a: &ScalarField, nu: [f64; 2], lambda: f64) -> Result<VectorField> {
    check_map(u)?;
    if !a.grid.same_space(&u.grid) || a.grid.time.is_some() {
        return Err(Error::Shape("amplitude and map grids differ".into()));
    }
    if ((nu[0] * nu[0] + nu[1] * nu[1]) - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!("direction {nu:?} is not a unit vector")));
    }
    let h = u.grid.spacing();
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Frequency(format!("frequency must be positive, got {lambda}")));
    }
    let lmax = max_resolvable(h, nu, MIN_SAMPLES_PER_WAVE);
    if lambda > lmax * (1.0 + 1e-12) {
        return Err(Error::Frequency(format!(
            "lambda = {lambda} exceeds the resolvable {lmax} ({MIN_SAMPLES_PER_WAVE} samples per wave)"
        )));
    }
    if u.grid.is_periodic() {
        for c in nu {
            let m = lambda * c * u.grid.period / (2.0 * PI);
            if c != 0.0 && (m - m.round()).abs() > 1e-9 * m.abs().max(1.0) {
                return Err(Error::Frequency(format!(
                    "lambda = {lambda} along {nu:?} is not commensurate with the period"
                )));
            }
        }
    }
    if let Some(bad) = a.values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::Amplitude(format!("amplitude must be finite and nonnegative, got {bad}")));
    }
    let fr = frame(u)?;
    let n = u.grid.len();
    let shifts: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<[f64; 3]> {
            if a.values[i] == 0.0 {
                return Ok([0.0; 3]);
            }
            let [g11, g12, g22] = fr.metric(i);
            let det = g11 * g22 - g12 * g12;
            if !(det > 0.0) {
                let [x, y] = u.grid.point(i);
                return Err(Error::Immersion(format!("singular metric at ({x}, {y})")));
            }
            let w = [(g22 * nu[0] - g12 * nu[1]) / det, (g11 * nu[1] - g12 * nu[0]) / det];
            let r = 1.0 / (nu[0] * w[0] + nu[1] * w[1]).sqrt();
            let (d1, d2) = (&fr.d1[i], &fr.d2[i]);
            let tau = [
                r * (d1[0] * w[0] + d2[0] * w[1]),
                r * (d1[1] * w[0] + d2[1] * w[1]),
                r * (d1[2] * w[0] + d2[2] * w[1]),
            ];
            let nrm = fr.normal(i)?;
            let c = Corrugation::new(r, a.values[i])?;
            let [x, y] = u.grid.point(i);
            let (g1, g2) = c.gamma(lambda * (x * nu[0] + y * nu[1]));
            Ok([
                (g1 * tau[0] + g2 * nrm[0]) / lambda,
                (g1 * tau[1] + g2 * nrm[1]) / lambda,
                (g1 * tau[2] + g2 * nrm[2]) / lambda,
            ])
        })
        .collect::<Result<_>>()?;
    let mut out = u.clone();
    for (i, s) in shifts.iter().enumerate() {
        for c in 0..3 {
            out.comps[c][i] += s[c];
        }
    }
    Ok(out)
}

/// Largest |τ·n| over samples for the frame used by a step on `u` along ν.
pub fn frame_orthogonality(u: &VectorField, nu: [f64; 2]) -> Result<f64> {
    let fr = frame(u)?;
    let mut worst: f64 = 0.0;
    for i in 0..u.grid.len() {
        let [g11, g12, g22] = fr.metric(i);
        let det = g11 * g22 - g12 * g12;
        let w = [(g22 * nu[0] - g12 * nu[1]) / det, (g11 * nu[1] - g12 * nu[0]) / det];
        let t = [
            fr.d1[i][0] * w[0] + fr.d2[i][0] * w[1],
            fr.d1[i][1] * w[0] + fr.d2[i][1] * w[1],
            fr.d1[i][2] * w[0] + fr.d2[i][2] * w[1],
        ];
        let m = dot(&t, &t).sqrt();
        worst = worst.max((dot(&t, &fr.normal(i)?) / m).abs());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clamp {
    None,
    /// Raised to the floor (a flat map has vanishing C² seminorm).
    Floor,
    /// Lowered to the resolvable ceiling.
    Ceiling,
}

/// K·c2 / √deficit.
pub fn frequency_formula(c2: f64, deficit_sup: f64, k_const: f64) -> Result<f64> {
    if !(deficit_sup > 0.0) || !deficit_sup.is_finite() {
        return Err(Error::Degenerate(format!(
            "frequency rule needs a positive deficit, got {deficit_sup}"
        )));
    }
    Ok(k_const * c2 / deficit_sup.sqrt())
}

/// The formula clamped into [floor, ceiling].
pub fn choose_frequency(c2: f64, deficit_sup: f64, k_const: f64, floor: f64, ceiling: f64) -> Result<(f64, Clamp)> {
    let l = frequency_formula(c2, deficit_sup, k_const)?;
    Ok(if l > ceiling {
        (ceiling, Clamp::Ceiling)
    } else if l < floor {
        (floor, Clamp::Floor)
    } else {
        (l, Clamp::None)
    })
}

/// sup |v♯e − (u♯e + a²ν⊗ν)| over samples at least `rim` cells from a clamped edge, v the
/// corrugated map.
pub fn metric_gain_error(u: &VectorField, a: &ScalarField, nu: [f64; 2], lambda: f64, rim: usize) -> Result<f64> {
    let base = induced_metric(u)?;
    let v = corrugation_step(u, a, nu, lambda)?;
    let m = induced_metric(&v)?;
    let g = u.grid;
    let n = g.resolution;
    let rim = if g.is_periodic() { 0 } else { rim.min(n / 2) };
    let mut e: f64 = 0.0;
    for j in rim..n - rim {
        for i in rim..n - rim {
            let k = g.index(i, j);
            let a2 = a.values[k] * a.values[k];
            let want = [nu[0] * nu[0], nu[0] * nu[1], nu[1] * nu[1]];
            for c in 0..3 {
                e = e.max((m.entries[c][k] - base.entries[c][k] - a2 * want[c]).abs());
            }
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    #[test]
    fn frequency_rule() {
        assert_eq!(frequency_formula(1.0, 1.0, 4.0).unwrap(), 4.0);
        let a = frequency_formula(3.0, 0.8, 4.0).unwrap();
        let b = frequency_formula(3.0, 0.2, 4.0).unwrap();
        assert!((b / a - 2.0).abs() < 1e-14);
        assert!(frequency_formula(1.0, 0.0, 4.0).is_err());
        assert_eq!(choose_frequency(100.0, 1.0, 4.0, 1.0, 50.0).unwrap(), (50.0, Clamp::Ceiling));
        assert_eq!(choose_frequency(0.0, 1.0, 4.0, 10.0, 50.0).unwrap(), (10.0, Clamp::Floor));
    }

    #[test]
    fn zero_amplitude_is_identity_and_underresolved_rejected() {
        let g = Grid::clamped(2, 64, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x, y, _| [x, y + 0.1 * x * x, 0.2 * y * y]);
        let a = ScalarField::zeros(g);
        let v = corrugation_step(&u, &a, [1.0, 0.0], 20.0).unwrap();
        assert_eq!(u.comps, v.comps);
        assert!(matches!(
            corrugation_step(&u, &a, [1.0, 0.0], 60.0),
            Err(Error::Frequency(_))
        ));
        let neg = ScalarField::constant(g, -0.1);
        assert!(matches!(
            corrugation_step(&u, &neg, [1.0, 0.0], 20.0),
            Err(Error::Amplitude(_))
        ));
    }
}
