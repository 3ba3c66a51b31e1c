//! Bessel functions of integer order on [0, j₀₁] and the corrugation profiles built from them.

use crate::error::{Error, Result};

/// First positive zero of J₀.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// Highest order kept in the profile series; J₂₅(j₀₁) is below 1e-22.
pub const MAX_ORDER: usize = 24;

/// J_n(x) for n = 0..=nmax by the power series, for 0 ≤ x ≤ 3.
pub fn bessel_j_all(x: f64, nmax: usize) -> Vec<f64> {
    let h = 0.5 * x;
    let q = -h * h;
    let mut lead = 1.0;
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if n > 0 {
            lead *= h / n as f64;
        }
        if lead < 1e-24 {
            // below any profile tolerance; also keeps the loop out of subnormals
            out.resize(nmax + 1, 0.0);
            break;
        }
        let mut term = lead;
        let mut sum = term;
        let mut m = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            m += 1.0;
            term *= q / (m * (m + n as f64));
            sum += term;
        }
        out.push(sum);
    }
    out
}

pub fn j0(x: f64) -> f64 {
    bessel_j_all(x, 0)[0]
}

/// β in [0, j₀₁) with J₀(β) = y; y must lie in (0, 1].
pub fn invert_j0(y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0 + 1e-15) {
        return Err(Error::Amplitude(format!(
            "J0 inversion needs a ratio in (0, 1], got {y}"
        )));
    }
    invert_one_minus_j0((1.0 - y).max(0.0))
}

/// (1 − J₀(x), J₁(x)) by their power series, free of cancellation for small x.
fn one_minus_j0_and_j1(x: f64) -> (f64, f64) {
    let q = -0.25 * x * x;
    let mut t0 = 1.0;
    let mut s0 = 0.0;
    let mut t1 = 0.5 * x;
    let mut s1 = t1;
    let mut m = 0.0;
    loop {
        m += 1.0;
        t0 *= q / (m * m);
        t1 *= q / (m * (m + 1.0));
        s0 -= t0;
        s1 += t1;
        if t0.abs() <= 1e-18 * s0.abs() && t1.abs() <= 1e-18 * s1.abs() {
            break;
        }
    }
    (s0, s1)
}

/// β in [0, j₀₁) with 1 − J₀(β) = eps, eps in [0, 1): safeguarded Newton on the bracket.
pub fn invert_one_minus_j0(eps: f64) -> Result<f64> {
    if !(eps >= 0.0 && eps < 1.0) {
        return Err(Error::Amplitude(format!(
            "J0 inversion needs 1 - J0 in [0, 1), got {eps}"
        )));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, J0_FIRST_ZERO);
    let mut b = (2.0 * eps.sqrt()).min(0.5 * J0_FIRST_ZERO);
    for _ in 0..100 {
        let (f, d) = one_minus_j0_and_j1(b);
        let r = f - eps;
        if r < 0.0 {
            lo = b;
        } else {
            hi = b;
        }
        let mut next = b - r / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - b).abs() <= 1e-15 * b;
        b = next;
        if done || hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(b)
}

/// One-dimensional corrugation for tangent length r and amplitude a:
/// ∂sΓ₁ = A cos(β cos s) − r, ∂sΓ₂ = A sin(β cos s), A = √(r² + a²), J₀(β) = r/A.
#[derive(Clone, Debug)]
pub struct Corrugation {
    pub r: f64,
    pub amp: f64,
    pub beta: f64,
    coef: Vec<f64>,
}

impl Corrugation {
    pub fn new(r: f64, a: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Amplitude(format!("tangent length must be positive, got {r}")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Amplitude(format!("amplitude must be nonnegative, got {a}")));
        }
        let amp = (r * r + a * a).sqrt();
        // 1 − r/A without cancellation
        let beta = invert_one_minus_j0(a * a / (amp * (amp + r)))?;
        let coef = if a == 0.0 {
            vec![0.0; MAX_ORDER + 1]
        } else {
            bessel_j_all(beta, MAX_ORDER)
        };
        Ok(Self { r, amp, beta, coef })
    }

    /// (Γ₁(s), Γ₂(s)) from the Jacobi–Anger expansion; both are odd and 2π-periodic.
    pub fn gamma(&self, s: f64) -> (f64, f64) {
        let (s1, c1) = s.sin_cos();
        let (mut sk, mut ck) = (s1, c1);
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        for k in 1..=MAX_ORDER {
            // sk = sin(ks), ck = cos(ks)
            let j = self.coef[k];
            let kf = k as f64;
            if k % 2 == 0 {
                let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                g1 += sign * 2.0 * j * sk / kf;
            } else {
                let sign = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                g2 += sign * 2.0 * j * sk / kf;
            }
            let next_s = sk * c1 + ck * s1;
            ck = ck * c1 - sk * s1;
            sk = next_s;
        }
        (self.amp * g1, self.amp * g2)
    }

    pub fn dgamma(&self, s: f64) -> (f64, f64) {
        let (sn, cs) = (self.beta * s.cos()).sin_cos();
        (self.amp * cs - self.r, self.amp * sn)
    }
}
