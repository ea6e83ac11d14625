//! Gibbs states, the passive starting point of every charging protocol.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigvals, ComplexMatrix};
use crate::spin::{mode_coefficients, ModeSpec};

pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Temperature in energy units (k_B = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperature {
    t: f64,
}

impl Temperature {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonPositiveTemperature(t));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.t
    }
}

/// A validated density matrix: unit trace, Hermitian, positive up to noise.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let herm = mat.hermiticity_deviation();
        if herm > HERMITICITY_TOL || herm.is_nan() {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity deviation {herm:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min_eig = hermitian_eigvals(&mat.hermitian_part())?[0];
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "minimum eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Skips validation; for states produced by trace- and
    /// positivity-preserving maps of an already valid state.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `Tr[ρ O]`, real part only; `O` is expected to be Hermitian.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        expectation(&self.mat, op)
    }
}

/// `Re Tr[ρ O]` without forming the product.
pub fn expectation(rho: &ComplexMatrix, op: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: op.dim(),
        });
    }
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let r = rho.row(i);
        for j in 0..n {
            acc += r[j] * op[(j, i)];
        }
    }
    Ok(acc.re)
}

/// Boltzmann populations of a spectrum, shifted by its minimum so that no
/// weight overflows.
pub fn boltzmann_populations(eigenvalues: &[f64], temp: Temperature) -> Vec<f64> {
    let beta = temp.beta();
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eigenvalues
        .iter()
        .map(|&l| (-beta * (l - min)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

pub fn gibbs_state(h: &ComplexMatrix, temp: Temperature) -> Result<DensityMatrix> {
    let eig = hermitian_eig(h)?;
    let pops = boltzmann_populations(&eig.eigenvalues, temp);
    let weights: Vec<Complex64> = pops.into_iter().map(|p| Complex64::new(p, 0.0)).collect();
    let mat = eig.reassemble(&weights).hermitian_part();
    Ok(DensityMatrix { mat })
}

/// Closed-form Gibbs state of the two-mode Hamiltonian, in the same basis as
/// [`crate::spin::build_h_mode`].
///
/// Every hyperbolic function is multiplied by `exp(−m)` with
/// `m = β·max(Λ, |P|)`; the common factor cancels in the normalisation.
pub fn gibbs_mode_analytic(spec: &ModeSpec, temp: Temperature) -> Result<DensityMatrix> {
    let c = mode_coefficients(spec)?;
    let beta = temp.beta();
    let bl = beta * c.lambda_k;
    let bp = beta * c.p_k;
    let m = bl.max(bp.abs());

    let e = |x: f64| (x - m).exp();
    let cosh_l = 0.5 * (e(bl) + e(-bl));
    let sinh_l = 0.5 * (e(bl) - e(-bl));
    let cosh_p = 0.5 * (e(bp) + e(-bp));
    let z = 2.0 * (cosh_l + cosh_p);

    let (sin2phi, cos2phi) = (2.0 * c.phi_k).sin_cos();
    let mut mat = ComplexMatrix::from_real_diag(&[
        (cosh_l + cos2phi * sinh_l) / z,
        (cosh_l - cos2phi * sinh_l) / z,
        e(-bp) / z,
        e(bp) / z,
    ]);
    let off = -sin2phi * sinh_l / z;
    mat[(0, 1)] = Complex64::from_polar(off, -c.theta_k);
    mat[(1, 0)] = Complex64::from_polar(off, c.theta_k);
    Ok(DensityMatrix { mat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_dist;
    use crate::spin::{build_h_mode, build_h_qb, ChainSpec};
    use std::f64::consts::PI;

    fn temp(t: f64) -> Temperature {
        Temperature::new(t).unwrap()
    }

    #[test]
    fn temperature_rejects_non_positive() {
        for t in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                Temperature::new(t),
                Err(Error::NonPositiveTemperature(_))
            ));
        }
        assert_eq!(temp(0.5).beta(), 2.0);
    }

    #[test]
    fn zero_hamiltonian_is_maximally_mixed() {
        let rho = gibbs_state(&ComplexMatrix::zeros(4), temp(0.3)).unwrap();
        assert!(rho.matrix().approx_eq(DensityMatrix::maximally_mixed(4).matrix(), 1e-15));
    }

    #[test]
    fn sigma_z_populations() {
        let rho = gibbs_state(&ComplexMatrix::sigma_z(), temp(1.0)).unwrap();
        let z = 2.0 * 1f64.cosh();
        let (up, down) = ((-1f64).exp() / z, 1f64.exp() / z);
        assert!((rho.matrix()[(0, 0)].re - up).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - down).abs() < 1e-15);
        assert!((up - 0.11920).abs() < 1e-5 && (down - 0.88080).abs() < 1e-5);
    }

    #[test]
    fn high_temperature_limit() {
        let spec = ChainSpec {
            n_sites: 3,
            j_coupling: 1.0,
            delta: 0.3,
            gamma_cap: 0.5,
            gamma: -1.0,
            b_field: 0.4,
        };
        let h = build_h_qb(&spec).unwrap();
        let rho = gibbs_state(&h, temp(1e6)).unwrap();
        assert!(rho.matrix().approx_eq(DensityMatrix::maximally_mixed(8).matrix(), 1e-5));
    }

    #[test]
    fn low_temperature_does_not_overflow() {
        let h = ComplexMatrix::from_real_diag(&[-500.0, 0.0, 500.0]);
        let rho = gibbs_state(&h, temp(1e-3)).unwrap();
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        assert_eq!(rho.matrix()[(2, 2)].re, 0.0);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.5, -0.5])).is_err());
        let mut skew = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        skew[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(skew).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn analytic_zero_couplings() {
        let spec = ModeSpec {
            k: 1.0,
            j_coupling: 0.0,
            delta: 0.0,
            gamma_cap: 0.0,
            gamma: 0.0,
            b_field: 0.0,
        };
        let rho = gibbs_mode_analytic(&spec, temp(0.1)).unwrap();
        assert!(rho.matrix().approx_eq(DensityMatrix::maximally_mixed(4).matrix(), 1e-15));
    }

    #[test]
    fn analytic_matches_numeric() {
        let spec = ModeSpec {
            k: 7.0 * PI / 8.0,
            j_coupling: 1.0,
            delta: 0.6,
            gamma_cap: 0.8,
            gamma: 0.3,
            b_field: -0.4,
        };
        for t in [0.01, 0.1, 1.0, 10.0] {
            let analytic = gibbs_mode_analytic(&spec, temp(t)).unwrap();
            let numeric = gibbs_state(&build_h_mode(&spec).unwrap(), temp(t)).unwrap();
            let d = frob_dist(analytic.matrix(), numeric.matrix()).unwrap();
            assert!(d <= 1e-10, "T = {t}: distance {d:e}");
            DensityMatrix::new(analytic.into_matrix()).unwrap();
        }
    }

    #[test]
    fn analytic_high_temperature_limit() {
        let spec = ModeSpec {
            k: 2.0,
            j_coupling: 1.0,
            delta: 0.5,
            gamma_cap: 2.0,
            gamma: -1.0,
            b_field: 0.2,
        };
        let rho = gibbs_mode_analytic(&spec, temp(1e6)).unwrap();
        assert!(rho.matrix().approx_eq(DensityMatrix::maximally_mixed(4).matrix(), 1e-5));
    }

    #[test]
    fn expectation_matches_trace_of_product() {
        let h = build_h_mode(&ModeSpec {
            k: 0.7,
            j_coupling: 1.0,
            delta: 0.2,
            gamma_cap: 0.4,
            gamma: 0.5,
            b_field: 0.1,
        })
        .unwrap();
        let rho = gibbs_state(&h, temp(0.5)).unwrap();
        let direct = (rho.matrix() * &h).trace().re;
        assert!((rho.expectation(&h).unwrap() - direct).abs() < 1e-14);
    }
}
