//! Hermitian eigendecomposition.
//!
//! The matrix is reduced to Hermitian tridiagonal form with Householder
//! reflections, the sub-diagonal phases are rotated away with a diagonal
//! unitary, and the resulting real symmetric tridiagonal matrix is
//! diagonalized with the implicit QL algorithm (EISPACK `tql2`). Every step
//! is deterministic for a fixed input.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Inputs with `max |a_ij − conj(a_ji)|` above this are rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// Reassembles `V · diag(f(λ)) · V†`.
    pub fn map_spectrum<F>(&self, f: F) -> ComplexMatrix
    where
        F: Fn(f64) -> Complex64,
    {
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reassemble(&weights)
    }

    /// `V · diag(weights) · V†`, one weight per eigenvalue.
    pub fn reassemble(&self, weights: &[Complex64]) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        assert_eq!(weights.len(), n, "one weight per eigenvalue");
        let v = self.eigenvectors.as_slice();
        let vw: Vec<Complex64> = (0..n * n).map(|idx| v[idx] * weights[idx % n]).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let left = &vw[i * n..(i + 1) * n];
            for j in 0..n {
                let right = &v[j * n..(j + 1) * n];
                out[(i, j)] = left.iter().zip(right).map(|(a, b)| a * b.conj()).sum();
            }
        }
        out
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    let deviation = a.hermiticity_deviation();
    if deviation > HERMITIAN_TOL || deviation.is_nan() {
        return Err(Error::NonHermitianInput { deviation });
    }
    Ok(())
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(a)?;
    let n = a.dim();
    let tri = tridiagonalize(a, true);
    let (phases, mut off) = real_offdiagonal(&tri.sub);
    let mut d = tri.diag;
    let mut z = identity_col_major(n);
    tql2(&mut d, &mut off, Some(&mut z))?;

    let q = tri.q.expect("requested accumulation");
    // V = Q · diag(phases) · Z
    let mut qd = q;
    for r in 0..n {
        for (c, ph) in phases.iter().enumerate() {
            qd[r * n + c] *= ph;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));

    let mut vecs = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, &src) in order.iter().enumerate() {
        let zc = &z[src * n..(src + 1) * n];
        for r in 0..n {
            let row = &qd[r * n..(r + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (q_ri, &z_i) in row.iter().zip(zc) {
                acc += q_ri * z_i;
            }
            vecs[r * n + col] = acc;
        }
    }
    Ok(HermitianEig {
        eigenvalues: order.iter().map(|&i| d[i]).collect(),
        eigenvectors: ComplexMatrix::from_vec(n, vecs)?,
    })
}

/// Eigenvalues only (ascending); skips all eigenvector accumulation.
pub fn hermitian_eigvals(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let tri = tridiagonalize(a, false);
    let (_, mut off) = real_offdiagonal(&tri.sub);
    let mut d = tri.diag;
    tql2(&mut d, &mut off, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// `V · diag(exp(s·λ)) · V†` for Hermitian `a`.
pub fn expm_hermitian_scaled(a: &ComplexMatrix, s: Complex64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(eig.map_spectrum(|l| (s * l).exp()))
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `sub[i]` couples rows `i+1` and `i`.
    sub: Vec<Complex64>,
    /// Accumulated reflections, row-major.
    q: Option<Vec<Complex64>>,
}

fn tridiagonalize(a: &ComplexMatrix, accumulate: bool) -> Tridiagonal {
    let n = a.dim();
    let mut w = a.as_slice().to_vec();
    let mut q = accumulate.then(|| identity_row_major(n));
    let zero = Complex64::new(0.0, 0.0);

    let mut hv = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x0 = w[(k + 1) * n + k];
        let xnorm = (k + 1..n)
            .map(|r| w[r * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        let tail = xnorm * xnorm - x0.norm_sqr();
        if tail <= f64::MIN_POSITIVE * xnorm.max(1.0) {
            // column already reduced
            continue;
        }
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;

        let v = &mut hv[..m];
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = w[(k + 1 + j) * n + k];
        }
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vj in v.iter_mut() {
            *vj /= vnorm;
        }

        // p = B v over the trailing block
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &w[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            let mut acc = zero;
            for (b, vj) in row.iter().zip(v.iter()) {
                acc += b * vj;
            }
            *pi = acc;
        }
        let kappa: f64 = v.iter().zip(p.iter()).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * kappa;
        }
        // B ← B − 2 v p† − 2 p v†
        for i in 0..m {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut w[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (j, b) in row.iter_mut().enumerate() {
                *b -= 2.0 * (vi * p[j].conj() + pi * v[j].conj());
            }
        }
        w[(k + 1) * n + k] = alpha;
        w[k * n + k + 1] = alpha.conj();
        for r in k + 2..n {
            w[r * n + k] = zero;
            w[k * n + r] = zero;
        }

        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let row = &mut q[r * n + k + 1..(r + 1) * n];
                let mut s = zero;
                for (qv, vj) in row.iter().zip(v.iter()) {
                    s += qv * vj;
                }
                let s2 = 2.0 * s;
                for (qv, vj) in row.iter_mut().zip(v.iter()) {
                    *qv -= s2 * vj.conj();
                }
            }
        }
    }

    Tridiagonal {
        diag: (0..n).map(|i| w[i * n + i].re).collect(),
        sub: (0..n.saturating_sub(1)).map(|i| w[(i + 1) * n + i]).collect(),
        q,
    }
}

/// Diagonal phases `φ` with `conj(φ_{i+1})·sub_i·φ_i = |sub_i|`; returns the
/// phases and the real off-diagonal padded with a trailing zero.
fn real_offdiagonal(sub: &[Complex64]) -> (Vec<Complex64>, Vec<f64>) {
    let mut phases = Vec::with_capacity(sub.len() + 1);
    let mut off = Vec::with_capacity(sub.len() + 1);
    let mut phi = Complex64::new(1.0, 0.0);
    phases.push(phi);
    for &e in sub {
        let r = e.norm();
        if r > 0.0 {
            phi *= e / r;
        }
        phases.push(phi);
        off.push(r);
    }
    off.push(0.0);
    (phases, off)
}

fn identity_row_major(n: usize) -> Vec<Complex64> {
    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }
    q
}

fn identity_col_major(n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    z
}

/// Implicit QL on a symmetric tridiagonal matrix. `e[i]` couples `i` and
/// `i+1`; `z`, when present, is column-major and receives the rotations.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<f64>>) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::EigenNoConvergence { index: l });
                }
                let mut g = d[l];
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
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let col_i = &mut lo[i * n..];
                        let col_i1 = &mut hi[..n];
                        for (zi, zi1) in col_i.iter_mut().zip(col_i1.iter_mut()) {
                            let t = *zi1;
                            *zi1 = s * *zi + c * t;
                            *zi = c * *zi - s * t;
                        }
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
    Ok(())
}
