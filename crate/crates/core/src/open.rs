//! Open-system charging of the full chain under a Lindblad master equation
//! with per-site σˣ dephasing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, ComplexMatrix, SparseMatrix};
use crate::spin::{build_h_charge, build_h_qb, site_operator, Axis, ChainSpec, ChargeAxis};
use crate::thermal::{expectation, gibbs_state, DensityMatrix, Temperature};

pub const DEFAULT_DEPHASING: f64 = 0.2;
pub const DEFAULT_DT: f64 = 0.005;
pub const DEFAULT_T_MAX: f64 = 60.0;
pub const DEFAULT_RECORD_STRIDE: usize = 20;
pub const DEFAULT_TRACE_TOL: f64 = 1e-7;
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-8;
pub const DEFAULT_STEADY_WINDOW: usize = 200;
pub const DEFAULT_STEADY_REL_TOL: f64 = 1e-5;

const RENORMALIZE_ABOVE: f64 = 1e-12;
const BLOWUP_ENTRY: f64 = 1e6;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    h_total: ComplexMatrix,
    jump_ops: Vec<ComplexMatrix>,
    g: f64,
}

impl LindbladSpec {
    /// `jump_ops` are used as given; `g` is the rate already folded into them.
    pub fn new(h_total: ComplexMatrix, jump_ops: Vec<ComplexMatrix>, g: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidSpec(format!("dephasing rate must be >= 0, got {g}")));
        }
        for l in &jump_ops {
            if l.dim() != h_total.dim() {
                return Err(Error::DimensionMismatch {
                    left: h_total.dim(),
                    right: l.dim(),
                });
            }
        }
        Ok(Self { h_total, jump_ops, g })
    }

    /// `L_i = √g σˣ_i` on every site of an `n_sites` chain.
    pub fn sigma_x_dephasing(h_total: ComplexMatrix, n_sites: usize, g: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidSpec(format!("dephasing rate must be >= 0, got {g}")));
        }
        let jumps = (1..=n_sites)
            .map(|site| Ok(site_operator(n_sites, site, Axis::X)?.scale_real(g.sqrt())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(h_total, jumps, g)
    }

    pub fn h_total(&self) -> &ComplexMatrix {
        &self.h_total
    }

    pub fn jump_ops(&self) -> &[ComplexMatrix] {
        &self.jump_ops
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn dim(&self) -> usize {
        self.h_total.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStop {
    pub window: usize,
    pub rel_tol: f64,
}

impl Default for SteadyStop {
    fn default() -> Self {
        Self {
            window: DEFAULT_STEADY_WINDOW,
            rel_tol: DEFAULT_STEADY_REL_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Steps between recorded points.
    pub record_stride: usize,
    pub trace_tol: f64,
    /// Largest `max|ρ − ρ†|` accepted before the per-step symmetrisation.
    pub hermiticity_tol: f64,
    /// Stop once the recorded ξ has settled; checked at every recorded point.
    pub steady_stop: Option<SteadyStop>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_max: DEFAULT_T_MAX,
            record_stride: DEFAULT_RECORD_STRIDE,
            trace_tol: DEFAULT_TRACE_TOL,
            hermiticity_tol: DEFAULT_HERMITICITY_TOL,
            steady_stop: Some(SteadyStop::default()),
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_max > self.dt && self.t_max.is_finite()) {
            return bad(format!("t_max must exceed dt, got {}", self.t_max));
        }
        if self.record_stride == 0 {
            return bad("record_stride must be >= 1".into());
        }
        if !(self.trace_tol > 0.0) || !(self.hermiticity_tol > 0.0) {
            return bad("tolerances must be > 0".into());
        }
        if let Some(stop) = self.steady_stop {
            if stop.window < 2 || !(stop.rel_tol > 0.0) {
                return bad("steady-state window must be >= 2 with rel_tol > 0".into());
            }
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub xi: Vec<f64>,
    /// `|Tr ρ − 1|` before any renormalisation at that step.
    pub trace_err: Vec<f64>,
    pub min_eig: Vec<f64>,
    /// `max|ρ − ρ†|` of the RK4 update before symmetrisation.
    pub herm_dev: Vec<f64>,
    pub stopped_early: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `−i[H, ρ] + Σ (L ρ L† − ½{L†L, ρ})`, evaluated densely.
pub fn lindblad_rhs(rho: &ComplexMatrix, spec: &LindbladSpec) -> Result<ComplexMatrix> {
    check_dims(rho, &spec.h_total)?;
    let mut out = spec.h_total.commutator(rho)?.scale(Complex64::new(0.0, -1.0));
    for l in &spec.jump_ops {
        let l_dag = l.adjoint();
        let ldl = &l_dag * l;
        out += &(&(l * rho) * &l_dag);
        out.add_scaled(Complex64::new(-0.5, 0.0), &(&ldl * rho));
        out.add_scaled(Complex64::new(-0.5, 0.0), &(rho * &ldl));
    }
    Ok(out)
}

/// A jump operator with one non-zero per row and per column:
/// `L[a][perm[a]] = vals[a]`.
struct Monomial {
    perm: Vec<usize>,
    vals: Vec<Complex64>,
    /// `|v|²` when every non-zero equals the same `v`.
    uniform: Option<f64>,
}

impl Monomial {
    fn detect(l: &ComplexMatrix) -> Option<Self> {
        let n = l.dim();
        let mut perm = Vec::with_capacity(n);
        let mut vals = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for a in 0..n {
            let mut nz = l.row(a).iter().enumerate().filter(|(_, z)| **z != ZERO);
            let (col, &val) = nz.next()?;
            if nz.next().is_some() || seen[col] {
                return None;
            }
            seen[col] = true;
            perm.push(col);
            vals.push(val);
        }
        let uniform = vals.iter().all(|v| *v == vals[0]).then(|| vals[0].norm_sqr());
        Some(Self { perm, vals, uniform })
    }

    /// `out += L ρ L†`.
    fn sandwich_acc(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.perm.len();
        if let Some(w) = self.uniform {
            for a in 0..n {
                let row = &rho[self.perm[a] * n..(self.perm[a] + 1) * n];
                let out_row = &mut out[a * n..(a + 1) * n];
                for (o, &p) in out_row.iter_mut().zip(&self.perm) {
                    let r = row[p];
                    o.re += w * r.re;
                    o.im += w * r.im;
                }
            }
            return;
        }
        for a in 0..n {
            let row = &rho[self.perm[a] * n..(self.perm[a] + 1) * n];
            let va = self.vals[a];
            let out_row = &mut out[a * n..(a + 1) * n];
            for b in 0..n {
                out_row[b] += va * self.vals[b].conj() * row[self.perm[b]];
            }
        }
    }
}

enum Jump {
    Monomial(Monomial),
    Sparse { l: SparseMatrix, l_dag: SparseMatrix },
}

/// The Lindblad generator rewritten as `−i(H_eff ρ − ρ H_eff†) + Σ LρL†`
/// with `H_eff = H − (i/2) Σ L†L`. Only valid for Hermitian `ρ`, where
/// `ρ H_eff† = (H_eff ρ)†`.
struct Generator {
    dim: usize,
    h_eff: SparseMatrix,
    jumps: Vec<Jump>,
    product: Vec<Complex64>,
    scratch: Vec<Complex64>,
    sandwich: Vec<Complex64>,
}

impl Generator {
    fn new(spec: &LindbladSpec) -> Self {
        let dim = spec.dim();
        let mut h_eff = spec.h_total.clone();
        let mut jumps = Vec::with_capacity(spec.jump_ops.len());
        for l in &spec.jump_ops {
            let sparse_dag = SparseMatrix::from_dense(&l.adjoint());
            let mut ldl = vec![ZERO; dim * dim];
            sparse_dag.mul_dense_acc(l.as_slice(), Complex64::new(0.0, -0.5), &mut ldl);
            for (h, d) in h_eff.as_mut_slice().iter_mut().zip(&ldl) {
                *h += d;
            }
            jumps.push(match Monomial::detect(l) {
                Some(m) => Jump::Monomial(m),
                None => Jump::Sparse {
                    l: SparseMatrix::from_dense(l),
                    l_dag: sparse_dag,
                },
            });
        }
        Self {
            dim,
            h_eff: SparseMatrix::from_dense(&h_eff),
            jumps,
            product: vec![ZERO; dim * dim],
            scratch: vec![ZERO; dim * dim],
            sandwich: vec![ZERO; dim * dim],
        }
    }

    fn apply(&mut self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        self.product.fill(ZERO);
        self.h_eff.mul_dense_acc(rho, ONE, &mut self.product);
        let x = &self.product;
        for i in 0..n {
            for j in 0..n {
                let a = x[i * n + j];
                let b = x[j * n + i].conj();
                // −i a + i b
                out[i * n + j] = Complex64::new(a.im - b.im, b.re - a.re);
            }
        }
        for jump in &self.jumps {
            match jump {
                Jump::Monomial(m) => m.sandwich_acc(rho, out),
                Jump::Sparse { l, l_dag } => {
                    l.sandwich(rho, l_dag, &mut self.scratch, &mut self.sandwich);
                    for (o, s) in out.iter_mut().zip(&self.sandwich) {
                        *o += s;
                    }
                }
            }
        }
    }
}

fn symmetrize(rho: &mut [Complex64], n: usize) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..n {
        dev = dev.max(2.0 * rho[i * n + i].im.abs());
        rho[i * n + i].im = 0.0;
        for j in i + 1..n {
            let (a, b) = (rho[i * n + j], rho[j * n + i]);
            dev = dev.max((a - b.conj()).norm());
            let avg = 0.5 * (a + b.conj());
            rho[i * n + j] = avg;
            rho[j * n + i] = avg.conj();
        }
    }
    dev
}

fn trace_of(rho: &[Complex64], n: usize) -> f64 {
    (0..n).map(|i| rho[i * n + i].re).sum()
}

/// Fixed-step RK4 integration of the master equation from `zeta`, recording
/// ξ(t) = Tr[(ρ(t) − ζ) H_ref] every `record_stride` steps and at the end.
pub fn integrate(
    zeta: &DensityMatrix,
    spec: &LindbladSpec,
    h_reference: &ComplexMatrix,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    check_dims(zeta.matrix(), &spec.h_total)?;
    check_dims(zeta.matrix(), h_reference)?;

    let n = zeta.dim();
    let e0 = expectation(zeta.matrix(), h_reference)?;
    let initial_herm_dev = zeta.matrix().hermiticity_deviation();
    let mut rho = zeta.matrix().hermitian_part();
    let mut gen = Generator::new(spec);
    let mut stage = vec![ZERO; n * n];
    let mut acc = vec![ZERO; n * n];
    let mut tmp = vec![ZERO; n * n];
    let dt = config.dt;
    let n_steps = config.n_steps();

    let mut traj = Trajectory::default();
    let record = |traj: &mut Trajectory, rho: &ComplexMatrix, step: usize, trace_err: f64, herm_dev: f64| -> Result<()> {
        traj.times.push(step as f64 * dt);
        traj.xi.push(expectation(rho, h_reference)? - e0);
        traj.trace_err.push(trace_err);
        traj.herm_dev.push(herm_dev);
        traj.min_eig.push(hermitian_eigvals(rho)?[0]);
        Ok(())
    };
    record(&mut traj, &rho, 0, (trace_of(rho.as_slice(), n) - 1.0).abs(), initial_herm_dev)?;

    for step in 1..=n_steps {
        let r = rho.as_mut_slice();
        gen.apply(r, &mut stage);
        for i in 0..n * n {
            acc[i] = stage[i];
            tmp[i] = r[i] + stage[i] * (0.5 * dt);
        }
        gen.apply(&tmp, &mut stage);
        for i in 0..n * n {
            acc[i] += stage[i] * 2.0;
            tmp[i] = r[i] + stage[i] * (0.5 * dt);
        }
        gen.apply(&tmp, &mut stage);
        for i in 0..n * n {
            acc[i] += stage[i] * 2.0;
            tmp[i] = r[i] + stage[i] * dt;
        }
        gen.apply(&tmp, &mut stage);
        for i in 0..n * n {
            r[i] += (acc[i] + stage[i]) * (dt / 6.0);
        }

        let time = step as f64 * dt;
        let herm_dev = symmetrize(r, n);
        let trace = trace_of(r, n);
        let trace_err = (trace - 1.0).abs();
        let max_entry = r.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if !(max_entry <= BLOWUP_ENTRY) {
            return Err(Error::NumericalBlowup {
                time,
                reason: format!("density-matrix entry of modulus {max_entry:e}"),
            });
        }
        if !(trace_err <= config.trace_tol) {
            return Err(Error::NumericalBlowup {
                time,
                reason: format!("trace drift {trace_err:e} exceeds {:e}", config.trace_tol),
            });
        }
        if herm_dev > config.hermiticity_tol {
            return Err(Error::NumericalBlowup {
                time,
                reason: format!("hermiticity drift {herm_dev:e} exceeds {:e}", config.hermiticity_tol),
            });
        }
        if trace_err > RENORMALIZE_ABOVE {
            let inv = 1.0 / trace;
            r.iter_mut().for_each(|z| *z *= inv);
        }

        if step % config.record_stride == 0 || step == n_steps {
            record(&mut traj, &rho, step, trace_err, herm_dev)?;
            if let Some(stop) = config.steady_stop {
                if step < n_steps && steady_state_reached(&traj, stop.window, stop.rel_tol) {
                    traj.stopped_early = true;
                    break;
                }
            }
        }
    }
    Ok(traj)
}

/// Largest ξ and its time; the earliest time wins a tie.
///
/// # Panics
/// If the trajectory is empty.
pub fn peak_ergotropy(traj: &Trajectory) -> (f64, f64) {
    assert!(!traj.xi.is_empty(), "empty trajectory");
    let mut best = 0;
    for (i, &v) in traj.xi.iter().enumerate() {
        if v > traj.xi[best] {
            best = i;
        }
    }
    (traj.xi[best], traj.times[best])
}

/// True when the spread of the last `window` recorded ξ values is at most
/// `rel_tol` times their largest magnitude.
///
/// # Panics
/// If `window < 2`.
pub fn steady_state_reached(traj: &Trajectory, window: usize, rel_tol: f64) -> bool {
    assert!(window >= 2, "steady-state window must be at least 2");
    if traj.xi.len() < window {
        return false;
    }
    let tail = &traj.xi[traj.xi.len() - window..];
    let (lo, hi, mag) = tail.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64),
        |(lo, hi, mag), &v| (lo.min(v), hi.max(v), mag.max(v.abs())),
    );
    hi - lo <= rel_tol * mag
}

/// Everything needed to charge a chain from its Gibbs state.
#[derive(Debug, Clone)]
pub struct OpenSetup {
    pub zeta: DensityMatrix,
    pub lindblad: LindbladSpec,
    pub h_qb: ComplexMatrix,
}

/// Gibbs state of `H_QB`, Lindbladian with `H_QB + Ω Σσ^axis` and σˣ
/// dephasing at rate `g`.
pub fn chain_setup(
    chain: &ChainSpec,
    temp: Temperature,
    omega: f64,
    axis: ChargeAxis,
    g: f64,
) -> Result<OpenSetup> {
    let h_qb = build_h_qb(chain)?;
    let zeta = gibbs_state(&h_qb, temp)?;
    let h_total = &h_qb + &build_h_charge(chain.n_sites, omega, axis)?;
    let lindblad = LindbladSpec::sigma_x_dephasing(h_total, chain.n_sites, g)?;
    Ok(OpenSetup { zeta, lindblad, h_qb })
}

pub fn charge_chain(
    chain: &ChainSpec,
    temp: Temperature,
    omega: f64,
    axis: ChargeAxis,
    g: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let setup = chain_setup(chain, temp, omega, axis, g)?;
    integrate(&setup.zeta, &setup.lindblad, &setup.h_qb, config)
}
