use nalgebra::{DMatrix, DVector};
use crate::error::{Error, Result};

/// Σ_i A_i ∂_i z = 0 with constant m×N matrices over d independent variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub d: usize,
    pub n_state: usize,
    pub m: usize,
    pub a: Vec<DMatrix<f64>>,
}

impl LinearSystem {
    pub fn new(a: Vec<DMatrix<f64>>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::Shape(format!("need d >= 2 matrices, got {}", a.len())));
        }
        let (m, n) = a[0].shape();
        if a.iter().any(|x| x.shape() != (m, n)) {
            return Err(Error::Shape("all A_i must share one shape".into()));
        }
        Ok(Self {
            d: a.len(),
            n_state: n,
            m,
            a,
        })
    }

    /// Σ ξ_i A_i a.
    pub fn apply(&self, xi: &[f64], state: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (x, a) in xi.iter().zip(&self.a) {
            if *x != 0.0 {
                out += a * state * *x;
            }
        }
        out
    }

    /// Largest spectral norm among the A_i.
    pub fn max_norm(&self) -> f64 {
        self.a
            .iter()
            .map(|a| {
                if a.iter().all(|x| *x == 0.0) {
                    0.0
                } else {
                    a.clone().svd(false, false).singular_values.max()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Index of the traceless entry u_ij (i ≤ j, not the last diagonal) inside the Euler state.
fn u_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    if i == j {
        n + i
    } else {
        // off-diagonals after the n−1 free diagonals, ordered (0,1), (0,2), ..., (1,2), ...
        let mut k = 0;
        for a in 0..n {
            for b in a + 1..n {
                if (a, b) == (i, j) {
                    return n + (n - 1) + k;
                }
                k += 1;
            }
        }
        unreachable!()
    }
}

/// ∂_t v + div u + ∇q = 0, div v = 0 over (x_1, ..., x_n, t).
///
/// State layout: v (n), the n−1 free diagonal entries of traceless u, its off-diagonal
/// entries i < j, then q.
pub fn euler_linear_system(n: usize) -> Result<LinearSystem> {
    if n < 2 {
        return Err(Error::Config(format!("dimension must be >= 2, got {n}")));
    }
    let nu = n * (n + 1) / 2 - 1;
    let big_n = n + nu + 1;
    let m = n + 1;
    let q = big_n - 1;
    let mut a = vec![DMatrix::zeros(m, big_n); n + 1];
    for j in 0..n {
        for i in 0..n {
            // row i gains ∂_j u_ij
            if i != j {
                a[j][(i, u_index(n, i, j))] += 1.0;
            } else if i < n - 1 {
                a[j][(i, u_index(n, i, i))] += 1.0;
            } else {
                for k in 0..n - 1 {
                    a[j][(i, u_index(n, k, k))] -= 1.0;
                }
            }
        }
        a[j][(j, q)] += 1.0;
        a[j][(n, j)] += 1.0;
    }
    for i in 0..n {
        a[n][(i, i)] = 1.0;
    }
    LinearSystem::new(a)
}

/// Packs (v, traceless u, q) into the Euler state vector; `u` is row-major n×n.
pub fn euler_state(v: &[f64], u: &[f64], q: f64) -> Result<DVector<f64>> {
    let n = v.len();
    if u.len() != n * n {
        return Err(Error::Shape(format!("u must be {n}x{n}")));
    }
    let tr: f64 = (0..n).map(|i| u[i * n + i]).sum();
    let scale = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if tr.abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::Type(format!("u has trace {tr}")));
    }
    let nu = n * (n + 1) / 2 - 1;
    let mut z = DVector::zeros(n + nu + 1);
    z.rows_mut(0, n).copy_from_slice(v);
    for i in 0..n {
        for j in i..n {
            if i == j && i == n - 1 {
                continue;
            }
            z[u_index(n, i, j)] = u[i * n + j];
        }
    }
    z[n + nu] = q;
    Ok(z)
}

/// Curl-free 2×2 matrix fields M: ∂_1 M_{r2} − ∂_2 M_{r1} = 0 for each row r.
/// State layout (M11, M12, M21, M22); the wave cone is the rank-one matrices.
pub fn gradient_system() -> LinearSystem {
    let mut a1 = DMatrix::zeros(2, 4);
    let mut a2 = DMatrix::zeros(2, 4);
    a1[(0, 1)] = 1.0;
    a2[(0, 0)] = -1.0;
    a1[(1, 3)] = 1.0;
    a2[(1, 2)] = -1.0;
    LinearSystem::new(vec![a1, a2]).expect("two 2x4 matrices")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_counts() {
        let s = euler_linear_system(2).unwrap();
        assert_eq!((s.d, s.n_state, s.m), (3, 5, 3));
        let s = euler_linear_system(3).unwrap();
        assert_eq!((s.d, s.n_state, s.m), (4, 9, 4));
        assert!(euler_linear_system(1).is_err());
    }

    #[test]
    fn symbol_reproduces_the_equations() {
        for n in [2usize, 3] {
            let s = euler_linear_system(n).unwrap();
            let v: Vec<f64> = (0..n).map(|i| 0.3 + i as f64).collect();
            let mut u = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    u[i * n + j] = if i == j { 0.0 } else { 0.1 * (i + j + 1) as f64 };
                }
            }
            u[0] = 0.7;
            u[n * n - 1] = -0.7;
            let q = -1.3;
            let z = euler_state(&v, &u, q).unwrap();
            let xi: Vec<f64> = (0..=n).map(|i| 0.5 - 0.37 * i as f64).collect();
            let r = s.apply(&xi, &z);
            let xt = xi[n];
            for i in 0..n {
                let mut e = xt * v[i] + q * xi[i];
                for j in 0..n {
                    e += u[i * n + j] * xi[j];
                }
                assert!((r[i] - e).abs() < 1e-14);
            }
            let div: f64 = (0..n).map(|i| xi[i] * v[i]).sum();
            assert!((r[n] - div).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_is_checked() {
        assert!(matches!(euler_state(&[0.0, 0.0], &[1.0, 0.0, 0.0, 0.0], 0.0), Err(Error::Type(_))));
    }
}
