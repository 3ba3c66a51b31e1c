use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::euler_subsol::residual::{gauss_rule, panel_nodes};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossTermPairing {
    pub lambda: f64,
    pub at_lambda: f64,
    pub at_double: f64,
    /// at_double / at_lambda; ½ for O(1/λ) decay.
    pub ratio: f64,
}

/// Pairing of tr(v⊗V + V⊗v) with the ramp test Φ = y·I on [0, 1], for the 1-D shear
/// fields v = (0.3 + 0.2 sin 2πy, 0.4 cos 2πy), V = a(y) e1 sin(2πλy + 0.3),
/// a = ½(1 + ½ cos 2πy). The test does not vanish at y = 1, so the pairing decays like 1/λ.
pub fn cross_term_pairing(lambda: f64) -> Result<CrossTermPairing> {
    if !(lambda >= 1.0) || lambda.fract() != 0.0 {
        return Err(Error::Range(format!("lambda must be a positive integer, got {lambda}")));
    }
    let pair = |lam: f64| {
        let rule = gauss_rule(10);
        panel_nodes(0.0, 1.0, &[], 1.0 / (8.0 * lam), &rule)
            .iter()
            .map(|&(y, w)| {
                let v1 = 0.3 + 0.2 * (2.0 * PI * y).sin();
                let a = 0.5 * (1.0 + 0.5 * (2.0 * PI * y).cos());
                let big = a * (2.0 * PI * lam * y + 0.3).sin();
                w * y * 2.0 * v1 * big
            })
            .sum::<f64>()
    };
    let (p1, p2) = (pair(lambda), pair(2.0 * lambda));
    Ok(CrossTermPairing {
        lambda,
        at_lambda: p1,
        at_double: p2,
        ratio: p2 / p1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves() {
        for lam in [8.0, 16.0, 64.0] {
            let c = cross_term_pairing(lam).unwrap();
            assert!((c.ratio - 0.5).abs() < 0.05, "{c:?}");
            // leading term −2 v1(1) a(1) cos(0.3) / (2πλ)
            let lead = -2.0 * 0.3 * 0.75 * 0.3f64.cos() / (2.0 * PI * lam);
            assert!((c.at_lambda - lead).abs() < 0.2 * lead.abs());
        }
        assert!(cross_term_pairing(2.5).is_err());
    }
}
