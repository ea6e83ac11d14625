//! Compressed-row operators used on the hot path of the Lindblad integrator.
//! Chain Hamiltonians and Pauli jump operators have O(N) non-zeros per row,
//! so sparse-times-dense products are much cheaper than dense ones.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

#[derive(Debug, Clone)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z.re != 0.0 || z.im != 0.0 {
                    cols.push(j);
                    vals.push(z);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim: n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut dense = ComplexMatrix::zeros(n);
        for i in 0..n {
            for (j, v) in self.row(i) {
                dense[(j, i)] = v.conj();
            }
        }
        Self::from_dense(&dense)
    }

    /// `out += coef · (self · rho)` with `rho`, `out` dense row-major.
    pub fn mul_dense_acc(&self, rho: &[Complex64], coef: Complex64, out: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, v) in self.row(i) {
                axpy(coef * v, &rho[k * n..(k + 1) * n], out_row);
            }
        }
    }

    /// `out += coef · (rho · self)`.
    pub fn dense_mul_acc(&self, rho: &[Complex64], coef: Complex64, out: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            let rho_row = &rho[i * n..(i + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, &r) in rho_row.iter().enumerate() {
                let a = coef * r;
                for (j, v) in self.row(k) {
                    out_row[j] += a * v;
                }
            }
        }
    }

    /// `out = self · rho · other`, with `scratch` holding the intermediate.
    pub fn sandwich(
        &self,
        rho: &[Complex64],
        other: &SparseMatrix,
        scratch: &mut [Complex64],
        out: &mut [Complex64],
    ) {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        scratch.fill(zero);
        self.mul_dense_acc(rho, one, scratch);
        out.fill(zero);
        other.dense_mul_acc(scratch, one, out);
    }
}

/// `y += a · x`, with cheaper loops for purely real or imaginary `a`.
#[inline]
fn axpy(a: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    if a.im == 0.0 {
        let s = a.re;
        for (o, r) in y.iter_mut().zip(x) {
            o.re += s * r.re;
            o.im += s * r.im;
        }
    } else if a.re == 0.0 {
        let s = a.im;
        for (o, r) in y.iter_mut().zip(x) {
            o.re -= s * r.im;
            o.im += s * r.re;
        }
    } else {
        for (o, r) in y.iter_mut().zip(x) {
            *o += a * r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    fn sample() -> ComplexMatrix {
        let x = ComplexMatrix::sigma_x();
        let y = ComplexMatrix::sigma_y();
        &(&kron(&x, &y) + &kron(&ComplexMatrix::sigma_z(), &ComplexMatrix::identity(2)))
            + &kron(&y, &x).scale(Complex64::new(0.3, 0.0))
    }

    #[test]
    fn products_match_dense() {
        let h = sample();
        let s = SparseMatrix::from_dense(&h);
        let rho = ComplexMatrix::from_vec(
            4,
            (0..16)
                .map(|k| Complex64::new(k as f64 * 0.1, (k % 3) as f64 - 1.0))
                .collect(),
        )
        .unwrap();
        let one = Complex64::new(1.0, 0.0);

        let mut left = vec![Complex64::new(0.0, 0.0); 16];
        s.mul_dense_acc(rho.as_slice(), one, &mut left);
        assert!(ComplexMatrix::from_vec(4, left).unwrap().approx_eq(&(&h * &rho), 1e-14));

        let mut right = vec![Complex64::new(0.0, 0.0); 16];
        s.dense_mul_acc(rho.as_slice(), one, &mut right);
        assert!(ComplexMatrix::from_vec(4, right).unwrap().approx_eq(&(&rho * &h), 1e-14));

        let mut scratch = vec![Complex64::new(0.0, 0.0); 16];
        let mut out = vec![Complex64::new(0.0, 0.0); 16];
        s.sandwich(rho.as_slice(), &s.adjoint(), &mut scratch, &mut out);
        let expected = &(&h * &rho) * &h.adjoint();
        assert!(ComplexMatrix::from_vec(4, out).unwrap().approx_eq(&expected, 1e-14));
    }

    #[test]
    fn drops_exact_zeros() {
        let s = SparseMatrix::from_dense(&kron(&ComplexMatrix::sigma_x(), &ComplexMatrix::sigma_x()));
        assert_eq!(s.nnz(), 4);
        assert_eq!(s.dim(), 4);
    }
}
