//! Hamiltonians of the open XY–Γ(γ) chain and of the (k, −k) momentum-mode
//! pair obtained after fermionization.
//!
//! Chain operators act on `n_sites` spins with site 1 as the left-most
//! (slowest varying) tensor factor. Bond sums run over the open chain,
//! `n = 1..N−1`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix};

/// Largest chain handled by the dense code paths (dimension 4096).
pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> ComplexMatrix {
        match self {
            Axis::X => ComplexMatrix::sigma_x(),
            Axis::Y => ComplexMatrix::sigma_y(),
            Axis::Z => ComplexMatrix::sigma_z(),
        }
    }
}

/// Direction of the local charging field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ChargeAxis {
    #[default]
    X,
    Y,
}

impl From<ChargeAxis> for Axis {
    fn from(a: ChargeAxis) -> Axis {
        match a {
            ChargeAxis::X => Axis::X,
            ChargeAxis::Y => Axis::Y,
        }
    }
}

impl FromStr for ChargeAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" | "X" => Ok(ChargeAxis::X),
            "y" | "Y" => Ok(ChargeAxis::Y),
            other => Err(Error::InvalidSpec(format!(
                "charge axis must be x or y, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for ChargeAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChargeAxis::X => "x",
            ChargeAxis::Y => "y",
        })
    }
}

/// Couplings of the N-site chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    /// J
    pub j_coupling: f64,
    /// δ, XY anisotropy
    pub delta: f64,
    /// Γ, strength of the off-diagonal exchange
    pub gamma_cap: f64,
    /// γ; −1 gives the DM form, +1 the KSEA form
    pub gamma: f64,
    /// B, Zeeman field along z
    pub b_field: f64,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites > MAX_SITES {
            return Err(Error::InvalidSpec(format!(
                "n_sites must be in 2..={MAX_SITES}, got {}",
                self.n_sites
            )));
        }
        check_finite(&[
            ("J", self.j_coupling),
            ("delta", self.delta),
            ("Gamma", self.gamma_cap),
            ("gamma", self.gamma),
            ("B", self.b_field),
        ])
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }
}

/// Couplings of a single (k, −k) mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub k: f64,
    pub j_coupling: f64,
    pub delta: f64,
    pub gamma_cap: f64,
    pub gamma: f64,
    pub b_field: f64,
}

impl ModeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k < PI) {
            return Err(Error::InvalidSpec(format!(
                "momentum k must lie in (0, pi), got {}",
                self.k
            )));
        }
        check_finite(&[
            ("J", self.j_coupling),
            ("delta", self.delta),
            ("Gamma", self.gamma_cap),
            ("gamma", self.gamma),
            ("B", self.b_field),
        ])
    }
}

fn check_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::InvalidSpec(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

/// Coefficients of the two-mode Hamiltonian and its Bogoliubov angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub a_k: f64,
    pub b_k: f64,
    pub p_k: f64,
    pub q_k: f64,
    pub lambda_k: f64,
    pub phi_k: f64,
    pub theta_k: f64,
}

/// Places `local` (acting on `local_sites` consecutive spins starting at the
/// 1-based `first_site`) inside the full chain.
fn embed(n_sites: usize, first_site: usize, local_sites: usize, local: &ComplexMatrix) -> ComplexMatrix {
    let left = ComplexMatrix::identity(1 << (first_site - 1));
    let right = ComplexMatrix::identity(1 << (n_sites + 1 - first_site - local_sites));
    kron(&kron(&left, local), &right)
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::InvalidSpec(format!(
            "n_sites must be in 1..={MAX_SITES}, got {n_sites}"
        )));
    }
    Ok(())
}

/// `I ⊗ … ⊗ σ_axis ⊗ … ⊗ I` with σ at the 1-based `site`.
pub fn site_operator(n_sites: usize, site: usize, axis: Axis) -> Result<ComplexMatrix> {
    check_sites(n_sites)?;
    if site == 0 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    Ok(embed(n_sites, site, 1, &axis.pauli()))
}

/// Σ_bonds of a fixed two-site operator.
fn bond_sum(n_sites: usize, bond: &ComplexMatrix) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(1 << n_sites);
    for n in 1..n_sites {
        h += &embed(n_sites, n, 2, bond);
    }
    h
}

fn single_site_sum(n_sites: usize, axis: Axis, coef: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(1 << n_sites);
    if coef == 0.0 {
        return h;
    }
    let op = axis.pauli().scale_real(coef);
    for n in 1..=n_sites {
        h += &embed(n_sites, n, 1, &op);
    }
    h
}

/// `J Σ [(1+δ)/2 σˣσˣ + (1−δ)/2 σʸσʸ]`
pub fn build_h_xy(spec: &ChainSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let (x, y) = (Axis::X.pauli(), Axis::Y.pauli());
    let bond = &kron(&x, &x).scale_real(spec.j_coupling * (1.0 + spec.delta) / 2.0)
        + &kron(&y, &y).scale_real(spec.j_coupling * (1.0 - spec.delta) / 2.0);
    Ok(bond_sum(spec.n_sites, &bond))
}

/// `Γ Σ (σˣσʸ + γ σʸσˣ)`
pub fn build_h_gamma(spec: &ChainSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let (x, y) = (Axis::X.pauli(), Axis::Y.pauli());
    let bond = &kron(&x, &y).scale_real(spec.gamma_cap)
        + &kron(&y, &x).scale_real(spec.gamma_cap * spec.gamma);
    Ok(bond_sum(spec.n_sites, &bond))
}

/// `B Σ σᶻ`
pub fn build_h_field(spec: &ChainSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    Ok(single_site_sum(spec.n_sites, Axis::Z, spec.b_field))
}

/// Full battery Hamiltonian `H_XY + H_Γ + H_F`.
pub fn build_h_qb(spec: &ChainSpec) -> Result<ComplexMatrix> {
    let mut h = build_h_xy(spec)?;
    h += &build_h_gamma(spec)?;
    h += &build_h_field(spec)?;
    Ok(h)
}

/// Local charging Hamiltonian `Ω Σ σ^axis`.
pub fn build_h_charge(n_sites: usize, omega: f64, axis: ChargeAxis) -> Result<ComplexMatrix> {
    check_sites(n_sites)?;
    if !omega.is_finite() {
        return Err(Error::InvalidSpec(format!("omega must be finite, got {omega}")));
    }
    Ok(single_site_sum(n_sites, axis.into(), omega))
}

pub fn mode_coefficients(spec: &ModeSpec) -> Result<ModeCoefficients> {
    spec.validate()?;
    let (sin_k, cos_k) = spec.k.sin_cos();
    let a_k = 2.0 * (spec.j_coupling * cos_k + spec.b_field);
    let b_k = 2.0 * spec.j_coupling * spec.delta * sin_k;
    let p_k = 2.0 * spec.gamma_cap * (spec.gamma - 1.0) * sin_k;
    let q_k = 2.0 * spec.gamma_cap * (spec.gamma + 1.0) * sin_k;
    let lambda_k = (a_k * a_k + b_k * b_k + q_k * q_k).sqrt();

    let sgn_k = if spec.k >= 0.0 { 1.0 } else { -1.0 };
    let pairing = b_k.hypot(q_k);
    let phi_k = if a_k == 0.0 {
        sgn_k * FRAC_PI_4
    } else {
        0.5 * (sgn_k * pairing).atan2(a_k)
    };
    let theta_k = b_k.atan2(q_k);

    Ok(ModeCoefficients {
        a_k,
        b_k,
        p_k,
        q_k,
        lambda_k,
        phi_k,
        theta_k,
    })
}

/// Basis order of the two-mode Hamiltonian:
/// `{|0_k 0_−k⟩, |1_k 1_−k⟩, |1_k 0_−k⟩, |0_k 1_−k⟩}`.
///
/// `MODE_TO_PRODUCT[m]` is the index of mode-basis state `m` in the
/// product ordering `{|00⟩, |01⟩, |10⟩, |11⟩}` with mode k on the left.
pub const MODE_TO_PRODUCT: [usize; 4] = [0, 3, 2, 1];

/// Two-mode Hamiltonian in the basis documented on [`MODE_TO_PRODUCT`],
/// with the convention `c_k† c_−k† |00⟩ = +|11⟩`.
pub fn build_h_mode(spec: &ModeSpec) -> Result<ComplexMatrix> {
    let c = mode_coefficients(spec)?;
    let two_b = 2.0 * spec.b_field;
    let mut h = ComplexMatrix::from_real_diag(&[
        -two_b,
        2.0 * c.a_k - two_b,
        c.a_k + c.p_k - two_b,
        c.a_k - c.p_k - two_b,
    ]);
    h[(0, 1)] = Complex64::new(c.q_k, -c.b_k);
    h[(1, 0)] = Complex64::new(c.q_k, c.b_k);
    Ok(h)
}

/// Charging Hamiltonian of the two modes, `Ω(σˣ⊗I + I⊗σˣ)`, expressed in the
/// mode basis of [`build_h_mode`].
pub fn build_h_charge_mode(omega: f64, axis: ChargeAxis) -> Result<ComplexMatrix> {
    Ok(build_h_charge(2, omega, axis)?.permuted(&MODE_TO_PRODUCT))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigvals;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn chain(n: usize) -> ChainSpec {
        ChainSpec {
            n_sites: n,
            j_coupling: 0.0,
            delta: 0.0,
            gamma_cap: 0.0,
            gamma: 0.0,
            b_field: 0.0,
        }
    }

    fn mode(k: f64) -> ModeSpec {
        ModeSpec {
            k,
            j_coupling: 0.0,
            delta: 0.0,
            gamma_cap: 0.0,
            gamma: 0.0,
            b_field: 0.0,
        }
    }

    #[test]
    fn site_operator_examples() {
        assert_eq!(
            site_operator(2, 1, Axis::Z).unwrap(),
            ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0])
        );
        assert_eq!(
            site_operator(2, 2, Axis::Z).unwrap(),
            ComplexMatrix::from_real_diag(&[1.0, -1.0, 1.0, -1.0])
        );
        let i2 = ComplexMatrix::identity(2);
        let oracle = kron(&i2, &kron(&ComplexMatrix::sigma_x(), &i2));
        assert_eq!(site_operator(3, 2, Axis::X).unwrap(), oracle);
    }

    #[test]
    fn site_operator_out_of_range() {
        assert_eq!(
            site_operator(3, 4, Axis::X),
            Err(Error::SiteOutOfRange { site: 4, n_sites: 3 })
        );
        assert!(matches!(
            site_operator(3, 0, Axis::X),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn xy_two_sites() {
        let spec = ChainSpec {
            j_coupling: 1.0,
            ..chain(2)
        };
        let mut expected = ComplexMatrix::zeros(4);
        expected[(1, 2)] = c(1.0, 0.0);
        expected[(2, 1)] = c(1.0, 0.0);
        assert!(build_h_xy(&spec).unwrap().approx_eq(&expected, 1e-15));

        let ising = ChainSpec { delta: 1.0, ..spec };
        let xx = kron(&ComplexMatrix::sigma_x(), &ComplexMatrix::sigma_x());
        assert!(build_h_xy(&ising).unwrap().approx_eq(&xx, 1e-15));

        let zero = ChainSpec { j_coupling: 0.0, delta: 0.3, ..chain(3) };
        assert_eq!(build_h_xy(&zero).unwrap(), ComplexMatrix::zeros(8));
    }

    #[test]
    fn gamma_term_limits() {
        let (x, y) = (ComplexMatrix::sigma_x(), ComplexMatrix::sigma_y());
        let dm = ChainSpec {
            gamma_cap: 1.0,
            gamma: -1.0,
            ..chain(2)
        };
        let expected = &kron(&x, &y) - &kron(&y, &x);
        assert!(build_h_gamma(&dm).unwrap().approx_eq(&expected, 1e-15));

        let ksea = ChainSpec { gamma: 1.0, ..dm };
        let expected = &kron(&x, &y) + &kron(&y, &x);
        assert!(build_h_gamma(&ksea).unwrap().approx_eq(&expected, 1e-15));
        assert!(build_h_gamma(&ksea).unwrap().is_hermitian(1e-15));

        assert_eq!(build_h_gamma(&chain(3)).unwrap(), ComplexMatrix::zeros(8));
    }

    #[test]
    fn field_term() {
        let spec = ChainSpec { b_field: 1.0, ..chain(2) };
        assert_eq!(
            build_h_field(&spec).unwrap(),
            ComplexMatrix::from_real_diag(&[2.0, 0.0, 0.0, -2.0])
        );
        let spec = ChainSpec { b_field: 0.5, ..chain(3) };
        assert_eq!(
            build_h_field(&spec).unwrap(),
            ComplexMatrix::from_real_diag(&[1.5, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, -1.5])
        );
        assert_eq!(build_h_field(&chain(2)).unwrap(), ComplexMatrix::zeros(4));
    }

    #[test]
    fn qb_hamiltonian() {
        assert_eq!(build_h_qb(&chain(2)).unwrap(), ComplexMatrix::zeros(4));

        let spec = ChainSpec {
            j_coupling: 1.0,
            b_field: 1.0,
            ..chain(2)
        };
        let mut expected = ComplexMatrix::from_real_diag(&[2.0, 0.0, 0.0, -2.0]);
        expected[(1, 2)] = c(1.0, 0.0);
        expected[(2, 1)] = c(1.0, 0.0);
        assert!(build_h_qb(&spec).unwrap().approx_eq(&expected, 1e-15));

        let big = ChainSpec {
            n_sites: 8,
            j_coupling: 0.7,
            delta: 0.5,
            gamma_cap: 2.5,
            gamma: -1.0,
            b_field: 0.2,
        };
        let h = build_h_qb(&big).unwrap();
        assert_eq!(h.dim(), 256);
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn chain_spec_rejects_single_site() {
        assert!(build_h_qb(&chain(1)).is_err());
        assert!(build_h_qb(&chain(MAX_SITES + 1)).is_err());
    }

    #[test]
    fn charge_hamiltonian() {
        let h = build_h_charge(2, 1.0, ChargeAxis::X).unwrap();
        let ones = [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)];
        for i in 0..4 {
            for j in 0..4 {
                let expected = if ones.contains(&(i, j)) { 1.0 } else { 0.0 };
                assert_eq!(h[(i, j)], c(expected, 0.0));
            }
        }
        assert_eq!(
            build_h_charge(3, 0.0, ChargeAxis::X).unwrap(),
            ComplexMatrix::zeros(8)
        );

        let h3 = build_h_charge(3, 0.25, ChargeAxis::X).unwrap();
        let mut oracle = ComplexMatrix::zeros(8);
        for s in 1..=3 {
            oracle += &site_operator(3, s, Axis::X).unwrap().scale_real(0.25);
        }
        assert!(h3.approx_eq(&oracle, 1e-15));
    }

    #[test]
    fn mode_charge_couples_single_flips() {
        let h = build_h_charge_mode(1.0, ChargeAxis::X).unwrap();
        // |00⟩ and |11⟩ each couple to |10⟩ and |01⟩ only
        assert_eq!(h[(0, 1)], c(0.0, 0.0));
        assert_eq!(h[(2, 3)], c(0.0, 0.0));
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(h[(i, j)], c(1.0, 0.0));
        }
    }

    #[test]
    fn mode_coefficients_free_hopping() {
        let spec = ModeSpec {
            j_coupling: 1.0,
            ..mode(7.0 * PI / 8.0)
        };
        let m = mode_coefficients(&spec).unwrap();
        let a = 2.0 * (7.0 * PI / 8.0).cos();
        assert!((m.a_k - a).abs() < 1e-15);
        assert!((m.a_k + 1.847_759).abs() < 1e-6);
        assert_eq!((m.b_k, m.p_k, m.q_k), (0.0, 0.0, 0.0));
        assert!((m.lambda_k - 1.847_759).abs() < 1e-6);
    }

    #[test]
    fn mode_coefficients_gamma_limits() {
        for &k in &[0.3, 1.2, 2.9] {
            for &g in &[0.5, 3.0] {
                let ksea = ModeSpec {
                    gamma_cap: g,
                    gamma: 1.0,
                    ..mode(k)
                };
                assert_eq!(mode_coefficients(&ksea).unwrap().p_k, 0.0);
                let dm = ModeSpec { gamma: -1.0, ..ksea };
                assert_eq!(mode_coefficients(&dm).unwrap().q_k, 0.0);
            }
        }
    }

    #[test]
    fn phi_branch_at_zero_a() {
        // J = 0, B = 0 gives a_k = 0
        let spec = ModeSpec {
            gamma_cap: 1.0,
            gamma: 1.0,
            ..mode(1.0)
        };
        let m = mode_coefficients(&spec).unwrap();
        assert_eq!(m.a_k, 0.0);
        assert!((m.phi_k - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn mode_spec_rejects_bad_k() {
        assert!(mode_coefficients(&mode(0.0)).is_err());
        assert!(mode_coefficients(&mode(PI)).is_err());
        assert!(build_h_mode(&mode(-1.0)).is_err());
    }

    #[test]
    fn mode_hamiltonian_examples() {
        assert_eq!(build_h_mode(&mode(1.0)).unwrap(), ComplexMatrix::zeros(4));

        let spec = ModeSpec {
            gamma_cap: 1.0,
            gamma: 1.0,
            ..mode(PI / 2.0)
        };
        let h = build_h_mode(&spec).unwrap();
        let mut expected = ComplexMatrix::zeros(4);
        expected[(0, 1)] = c(4.0, 0.0);
        expected[(1, 0)] = c(4.0, 0.0);
        assert!(h.approx_eq(&expected, 1e-14));
        let eig = hermitian_eigvals(&h).unwrap();
        for (l, e) in eig.iter().zip([-4.0, 0.0, 0.0, 4.0]) {
            assert!((l - e).abs() < 1e-13);
        }
    }

    #[test]
    fn mode_hamiltonian_pair_block() {
        // {|00⟩,|11⟩} block eigenvalues are A_k − 2B ± Λ_k
        let spec = ModeSpec {
            k: 7.0 * PI / 8.0,
            j_coupling: 1.3,
            delta: 0.4,
            gamma_cap: 0.6,
            gamma: 0.2,
            b_field: 0.35,
        };
        let m = mode_coefficients(&spec).unwrap();
        let h = build_h_mode(&spec).unwrap();
        let block = ComplexMatrix::from_rows(&[[h[(0, 0)], h[(0, 1)]], [h[(1, 0)], h[(1, 1)]]])
            .unwrap();
        // closed-form 2×2 eigenvalues: mean ± sqrt(half-gap² + |offdiag|²)
        let mean = 0.5 * (block[(0, 0)].re + block[(1, 1)].re);
        let half_gap = 0.5 * (block[(1, 1)].re - block[(0, 0)].re);
        let radius = (half_gap * half_gap + block[(0, 1)].norm_sqr()).sqrt();
        let vals = hermitian_eigvals(&block).unwrap();
        assert!((vals[0] - (mean - radius)).abs() < 1e-13);
        assert!((vals[1] - (mean + radius)).abs() < 1e-13);
        let shift = m.a_k - 2.0 * spec.b_field;
        assert!((vals[0] - (shift - m.lambda_k)).abs() < 1e-13);
        assert!((vals[1] - (shift + m.lambda_k)).abs() < 1e-13);
    }

    #[test]
    fn mode_hamiltonian_free_spectrum() {
        // k = 7π/8, J = 1, B = δ = Γ = 0: shifted spectrum {A−Λ, A−P, A+P, A+Λ} − 2B
        let spec = ModeSpec {
            j_coupling: 1.0,
            ..mode(7.0 * PI / 8.0)
        };
        let a = 2.0 * (7.0 * PI / 8.0).cos();
        let lambda = a.abs();
        let mut expected = vec![a - lambda, a, a, a + lambda];
        expected.sort_by(f64::total_cmp);
        let vals = hermitian_eigvals(&build_h_mode(&spec).unwrap()).unwrap();
        for (l, e) in vals.iter().zip(&expected) {
            assert!((l - e).abs() < 1e-13, "{vals:?} vs {expected:?}");
        }
    }
}
