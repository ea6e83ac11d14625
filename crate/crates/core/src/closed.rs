//! Closed (unitary) charging of a single momentum-mode pair.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::spin::{build_h_charge_mode, build_h_mode, ChargeAxis, ModeSpec};
use crate::thermal::{gibbs_state, DensityMatrix, Temperature};

pub const DEFAULT_GRID_POINTS: usize = 2001;
pub const DEFAULT_JUMP_THRESHOLD: f64 = 0.05;
pub const UNITARITY_TOL: f64 = 1e-8;
const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Constant-field charging protocol sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeProtocol {
    omega: f64,
    axis: ChargeAxis,
    t_grid: Vec<f64>,
}

impl ChargeProtocol {
    pub fn new(omega: f64, axis: ChargeAxis, t_grid: Vec<f64>) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidSpec(format!("omega must be > 0, got {omega}")));
        }
        if t_grid.len() < 2 {
            return Err(Error::InvalidSpec("time grid needs at least 2 points".into()));
        }
        if t_grid[0] != 0.0 {
            return Err(Error::InvalidSpec(format!(
                "time grid must start at 0, got {}",
                t_grid[0]
            )));
        }
        if t_grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidSpec("time grid must be strictly increasing".into()));
        }
        Ok(Self {
            omega,
            axis,
            t_grid,
        })
    }

    /// `n_points` uniform times spanning one period `[0, π/Ω]`.
    pub fn one_period(omega: f64, axis: ChargeAxis, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidSpec("time grid needs at least 2 points".into()));
        }
        let period = PI / omega;
        let step = period / (n_points - 1) as f64;
        let grid = (0..n_points)
            .map(|i| if i + 1 == n_points { period } else { i as f64 * step })
            .collect();
        Self::new(omega, axis, grid)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn axis(&self) -> ChargeAxis {
        self.axis
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    /// `U(t)` for every grid time, in the mode basis.
    fn mode_propagators(&self) -> Result<Vec<ComplexMatrix>> {
        let eig = hermitian_eig(&build_h_charge_mode(self.omega, self.axis)?)?;
        Ok(self
            .t_grid
            .iter()
            .map(|&t| eig.map_spectrum(|l| Complex64::from_polar(1.0, -l * t)))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgotropyTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param_name: String,
    pub param_values: Vec<f64>,
    pub xi_max: Vec<f64>,
    pub t_star: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub before: f64,
    pub after: f64,
    pub delta_xi: f64,
}

/// Parameter that a 1-D sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    J,
    Delta,
    GammaCap,
    Gamma,
    B,
    T,
    K,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] = [
        SweepParam::J,
        SweepParam::Delta,
        SweepParam::GammaCap,
        SweepParam::Gamma,
        SweepParam::B,
        SweepParam::T,
        SweepParam::K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::J => "J",
            SweepParam::Delta => "delta",
            SweepParam::GammaCap => "Gamma",
            SweepParam::Gamma => "gamma",
            SweepParam::B => "B",
            SweepParam::T => "T",
            SweepParam::K => "k",
        }
    }

    fn apply(self, base: &ModeSpec, temp: Temperature, value: f64) -> Result<(ModeSpec, Temperature)> {
        let mut spec = *base;
        let mut temp = temp;
        match self {
            SweepParam::J => spec.j_coupling = value,
            SweepParam::Delta => spec.delta = value,
            SweepParam::GammaCap => spec.gamma_cap = value,
            SweepParam::Gamma => spec.gamma = value,
            SweepParam::B => spec.b_field = value,
            SweepParam::T => temp = Temperature::new(value)?,
            SweepParam::K => spec.k = value,
        }
        Ok((spec, temp))
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    /// Case matters: `Gamma` is Γ and `gamma` is γ.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "J" => Ok(SweepParam::J),
            "delta" | "δ" => Ok(SweepParam::Delta),
            "Gamma" | "Γ" => Ok(SweepParam::GammaCap),
            "gamma" | "γ" => Ok(SweepParam::Gamma),
            "B" => Ok(SweepParam::B),
            "T" => Ok(SweepParam::T),
            "k" => Ok(SweepParam::K),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

fn energy_difference_raw(rho_t: &ComplexMatrix, rho_ref: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    check_same_dim(rho_t, rho_ref)?;
    check_same_dim(rho_t, h)?;
    let n = h.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let (rt, rr) = (rho_t.row(i), rho_ref.row(i));
        for j in 0..n {
            acc += (rt[j] - rr[j]) * h[(j, i)];
        }
    }
    debug_assert!(
        acc.im.abs() <= IMAG_RESIDUE_TOL * (1.0 + h.max_abs()),
        "energy difference has imaginary residue {}",
        acc.im
    );
    Ok(acc.re)
}

/// `Tr[(ρ_t − ρ_ref) H]`, the work stored relative to `ρ_ref`.
pub fn energy_difference(rho_t: &DensityMatrix, rho_ref: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    energy_difference_raw(rho_t.matrix(), rho_ref.matrix(), h)
}

/// `exp(−i H_C t)`.
pub fn charging_unitary(h_charge: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    crate::linalg::expm_hermitian_scaled(h_charge, Complex64::new(0.0, -t))
}

/// `exp(−iΩt(σˣ⊗I + I⊗σˣ))` written out entry by entry.
pub fn charging_unitary_closed_form_two_site(omega: f64, t: f64) -> ComplexMatrix {
    let (s, c) = (omega * t).sin_cos();
    let a = Complex64::new(c * c, 0.0);
    let b = Complex64::new(-s * s, 0.0);
    let c = Complex64::new(0.0, -0.5 * (2.0 * omega * t).sin());
    ComplexMatrix::from_rows(&[[a, c, c, b], [c, a, b, c], [c, b, a, c], [b, c, c, a]])
        .expect("4x4 rows")
}

fn conjugate(u: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    (&(u * rho) * &u.adjoint()).hermitian_part()
}

/// `U ζ U†`.
pub fn evolve_closed(zeta: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    check_same_dim(zeta.matrix(), u)?;
    let deviation = u.unitarity_deviation();
    if deviation > UNITARITY_TOL || deviation.is_nan() {
        return Err(Error::NonUnitaryOperator { deviation });
    }
    Ok(DensityMatrix::from_trusted(conjugate(u, zeta.matrix())))
}

fn trace_with_propagators(
    spec: &ModeSpec,
    temp: Temperature,
    times: &[f64],
    propagators: &[ComplexMatrix],
) -> Result<ErgotropyTrace> {
    let h = build_h_mode(spec)?;
    let zeta = gibbs_state(&h, temp)?;
    let values = propagators
        .iter()
        .map(|u| energy_difference_raw(&conjugate(u, zeta.matrix()), zeta.matrix(), &h))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErgotropyTrace {
        times: times.to_vec(),
        values,
    })
}

/// ξ(t) of the two-mode battery started from its Gibbs state and driven by
/// the local field of `protocol`.
pub fn ergotropy_trace_mode(
    spec: &ModeSpec,
    temp: Temperature,
    protocol: &ChargeProtocol,
) -> Result<ErgotropyTrace> {
    let props = protocol.mode_propagators()?;
    trace_with_propagators(spec, temp, protocol.t_grid(), &props)
}

/// Largest value and its time; the earliest time wins a tie.
///
/// # Panics
/// If the trace is empty.
pub fn max_ergotropy(trace: &ErgotropyTrace) -> (f64, f64) {
    assert!(!trace.values.is_empty(), "empty ergotropy trace");
    let mut best = 0;
    for (i, &v) in trace.values.iter().enumerate() {
        if v > trace.values[best] {
            best = i;
        }
    }
    (trace.values[best], trace.times[best])
}

/// ξ_max and t* across `grid`, with `param` given by name.
pub fn sweep_1d(
    base: &ModeSpec,
    temp: Temperature,
    protocol: &ChargeProtocol,
    param: &str,
    grid: &[f64],
) -> Result<SweepResult> {
    sweep_1d_param(base, temp, protocol, param.parse()?, grid)
}

/// Grid points run in parallel on the current rayon pool; results keep grid
/// order.
pub fn sweep_1d_param(
    base: &ModeSpec,
    temp: Temperature,
    protocol: &ChargeProtocol,
    param: SweepParam,
    grid: &[f64],
) -> Result<SweepResult> {
    let props = protocol.mode_propagators()?;
    let points = grid
        .par_iter()
        .map(|&value| {
            let (spec, temp) = param.apply(base, temp, value)?;
            let trace = trace_with_propagators(&spec, temp, protocol.t_grid(), &props)?;
            Ok(max_ergotropy(&trace))
        })
        .collect::<Result<Vec<_>>>()?;
    let (xi_max, t_star) = points.into_iter().unzip();
    Ok(SweepResult {
        param_name: param.name().to_string(),
        param_values: grid.to_vec(),
        xi_max,
        t_star,
    })
}

/// Consecutive grid pairs whose ξ_max jump exceeds
/// `jump_threshold · max|ξ_max|`.
///
/// # Panics
/// If `jump_threshold` is not positive.
pub fn detect_transitions(result: &SweepResult, jump_threshold: f64) -> Vec<Transition> {
    assert!(jump_threshold > 0.0, "jump threshold must be positive");
    let scale = result.xi_max.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cutoff = jump_threshold * scale;
    result
        .xi_max
        .windows(2)
        .zip(result.param_values.windows(2))
        .filter_map(|(xi, p)| {
            let delta_xi = xi[1] - xi[0];
            (delta_xi.abs() > cutoff).then_some(Transition {
                before: p[0],
                after: p[1],
                delta_xi,
            })
        })
        .collect()
}
