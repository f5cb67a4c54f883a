//! Small dense and tridiagonal eigensolvers, plus Gauss–Legendre nodes.
//!
//! The tridiagonal solver is the implicit-shift QL iteration (EISPACK
//! `tql2`). Hermitian tridiagonal input is first brought to real form by a
//! diagonal unitary gauge; dense Hermitian input is Householder-reduced to
//! tridiagonal form and then goes through the same path.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenpairs of a real symmetric or complex Hermitian matrix, eigenvalues
/// ascending. `vectors[j]` belongs to `values[j]`.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<T>>,
}

/// Symmetric tridiagonal eigenproblem. `off[i]` couples rows `i` and `i + 1`.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<Eigen<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: vec![] });
    }
    if off.len() + 1 != n {
        return Err(Error::domain("off-diagonal length must be one less than the diagonal"));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z is row-major, column j holds eigenvector j
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence {
                        what: "tridiagonal QL iteration",
                        iterations: sweeps,
                        partial: e[l],
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zi1 = z[k * n + i + 1];
                        let zi = z[k * n + i];
                        z[k * n + i + 1] = s * zi + c * zi1;
                        z[k * n + i] = c * zi - s * zi1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = order.iter().map(|&j| (0..n).map(|i| z[i * n + j]).collect()).collect();
    Ok(Eigen { values, vectors })
}

/// Hermitian tridiagonal eigenproblem. `sub[i]` is the `(i+1, i)` element.
///
/// With `D = diag(u_0, u_1, …)`, `u_{i+1} = u_i · sub[i]/|sub[i]|`, the matrix
/// `D† H D` is real symmetric with off-diagonals `|sub[i]|`.
pub fn hermitian_tridiagonal_eigen(diag: &[f64], sub: &[Complex64]) -> Result<Eigen<Complex64>> {
    let n = diag.len();
    let mut gauge = Vec::with_capacity(n);
    if n > 0 {
        gauge.push(Complex64::new(1.0, 0.0));
    }
    for (i, s) in sub.iter().enumerate() {
        let r = s.norm();
        let u = if r > 0.0 { s / r } else { Complex64::new(1.0, 0.0) };
        gauge.push(gauge[i] * u);
    }
    let off: Vec<f64> = sub.iter().map(|s| s.norm()).collect();
    let real = symmetric_tridiagonal_eigen(diag, &off)?;
    let vectors = real
        .vectors
        .iter()
        .map(|v| v.iter().zip(&gauge).map(|(x, u)| u * *x).collect())
        .collect();
    Ok(Eigen { values: real.values, vectors })
}

/// Dense Hermitian eigenproblem (row-major input, only needs to be Hermitian
/// up to rounding).
pub fn hermitian_eigen(matrix: &[Vec<Complex64>]) -> Result<Eigen<Complex64>> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return Err(Error::domain("matrix must be square"));
    }
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    // q accumulates the Householder reflections, A = Q T Q†
    let mut q: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::zero() }).collect())
        .collect();

    for col in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (col + 1..n).map(|i| a[i][col]).collect();
        let xnorm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= vnorm);

        // A ← P A P with P = I − 2 v v† acting on rows/cols col+1..n
        let off = col + 1;
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * a[off + i][j]).sum();
            for (i, vi) in v.iter().enumerate() {
                a[off + i][j] -= 2.0 * vi * dot;
            }
        }
        for row in a.iter_mut() {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| row[off + i] * vi).sum();
            for (i, vi) in v.iter().enumerate() {
                row[off + i] -= 2.0 * dot * vi.conj();
            }
        }
        for row in q.iter_mut() {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| row[off + i] * vi).sum();
            for (i, vi) in v.iter().enumerate() {
                row[off + i] -= 2.0 * dot * vi.conj();
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    let sub: Vec<Complex64> = (0..n.saturating_sub(1)).map(|i| a[i + 1][i]).collect();
    let tri = hermitian_tridiagonal_eigen(&diag, &sub)?;
    let vectors = tri
        .vectors
        .iter()
        .map(|w| (0..n).map(|i| (0..n).map(|j| q[i][j] * w[j]).sum()).collect())
        .collect();
    Ok(Eigen { values: tri.values, vectors })
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n`, weights from `P_n'`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// `∫_a^b f` with the rule mapped affinely.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_real(diag: &[f64], off: &[f64], e: &Eigen<f64>) -> f64 {
        let n = diag.len();
        let mut worst: f64 = 0.0;
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            for i in 0..n {
                let mut hv = diag[i] * v[i];
                if i > 0 {
                    hv += off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    hv += off[i] * v[i + 1];
                }
                worst = worst.max((hv - lam * v[i]).abs());
            }
        }
        worst
    }

    #[test]
    fn two_by_two() {
        let e = symmetric_tridiagonal_eigen(&[0.0, 0.0], &[2.0]).unwrap();
        assert!((e.values[0] + 2.0).abs() < 1e-15 && (e.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn second_difference_matrix() {
        // eigenvalues 2 − 2cos(jπ/(n+1))
        let n = 40;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let e = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
        for (j, v) in e.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
        assert!(residual_real(&diag, &off, &e) < 1e-13);
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = e.vectors[a].iter().zip(&e.vectors[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn hermitian_tridiagonal_with_phases() {
        let diag = [0.5, -1.0, 2.0];
        let sub = [Complex64::new(0.0, 1.0), Complex64::new(-0.6, 0.8)];
        let e = hermitian_tridiagonal_eigen(&diag, &sub).unwrap();
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            let hv = [
                diag[0] * v[0] + sub[0].conj() * v[1],
                sub[0] * v[0] + diag[1] * v[1] + sub[1].conj() * v[2],
                sub[1] * v[1] + diag[2] * v[2],
            ];
            for i in 0..3 {
                assert!((hv[i] - lam * v[i]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dense_hermitian_matches_characteristic_values() {
        let m = vec![
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.5)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.5, -0.5), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
        ];
        let e = hermitian_eigen(&m).unwrap();
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 2.0).abs() < 1e-13);
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            for i in 0..3 {
                let hv: Complex64 = (0..3).map(|j| m[i][j] * v[j]).sum();
                assert!((hv - lam * v[i]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(12);
        let weight_sum: f64 = gl.weights.iter().sum();
        assert!((weight_sum - 2.0).abs() < 1e-14);
        // ∫_0^2 x^23 dx = 2^24/24
        let v = gl.integrate(0.0, 2.0, |x| x.powi(23));
        assert!((v / (2f64.powi(24) / 24.0) - 1.0).abs() < 1e-13);
    }
}
