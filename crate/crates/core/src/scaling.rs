//! Power-law fits `E(N) = A·N^α` of peak ergotropy against chain length.

use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_MARGIN: f64 = 0.02;
pub const MAX_ITERATIONS: usize = 200;
const REL_STEP_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 60;
const RSS_SLACK: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct PeakSeries {
    sizes: Vec<u32>,
    peaks: Vec<f64>,
}

impl PeakSeries {
    pub fn new(sizes: Vec<u32>, peaks: Vec<f64>) -> Result<Self> {
        if sizes.len() != peaks.len() {
            return Err(Error::DimensionMismatch {
                left: sizes.len(),
                right: peaks.len(),
            });
        }
        if sizes.len() < 3 {
            return Err(Error::InvalidSpec(format!(
                "a power-law fit needs at least 3 sizes, got {}",
                sizes.len()
            )));
        }
        if sizes[0] == 0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("sizes must be positive and strictly ascending".into()));
        }
        Ok(Self { sizes, peaks })
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn peaks(&self) -> &[f64] {
        &self.peaks
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub a: f64,
    pub alpha: f64,
    pub sigma_a: f64,
    pub sigma_alpha: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingClass {
    SubExtensive,
    Extensive,
    SuperExtensive,
}

impl fmt::Display for ScalingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingClass::SubExtensive => "sub_extensive",
            ScalingClass::Extensive => "extensive",
            ScalingClass::SuperExtensive => "super_extensive",
        })
    }
}

fn rss_at(x: &[f64], y: &[f64], a: f64, alpha: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&n, &e)| {
            let r = e - a * n.powf(alpha);
            r * r
        })
        .sum()
}

/// `JᵀJ` of the model with respect to `(A, α)`, as `[s11, s12, s22]`.
fn normal_matrix(x: &[f64], a: f64, alpha: f64) -> [f64; 3] {
    let mut m = [0.0; 3];
    for &n in x {
        let d_a = n.powf(alpha);
        let d_alpha = a * d_a * n.ln();
        m[0] += d_a * d_a;
        m[1] += d_a * d_alpha;
        m[2] += d_alpha * d_alpha;
    }
    m
}

fn invert_2x2(m: [f64; 3]) -> Result<[f64; 3]> {
    let det = m[0] * m[2] - m[1] * m[1];
    let scale = m[0] * m[2];
    if !(det > 1e-14 * scale) || !det.is_finite() {
        return Err(Error::SingularJacobian);
    }
    Ok([m[2] / det, -m[1] / det, m[0] / det])
}

/// Least-squares line through `(ln N, ln E)`; returns `(A, α)`.
fn log_log_start(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let m = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(u, v)| (u - mx) * (v - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::SingularJacobian);
    }
    let alpha = sxy / sxx;
    Ok(((my - alpha * mx).exp(), alpha))
}

/// Gauss–Newton least squares in linear space, started from the log–log
/// regression, with step halving whenever a step raises the residual.
///
/// Internally the model is written `A'·(N/N₀)^α` with `N₀` the geometric
/// mean size and the peaks scaled to a unit maximum; this decorrelates the
/// two Jacobian columns. Results and the `s²(JᵀJ)⁻¹` covariance are mapped
/// back to `(A, α)`.
pub fn fit_power_law(series: &PeakSeries) -> Result<PowerLawFit> {
    for (&size, &value) in series.sizes.iter().zip(&series.peaks) {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositivePeak { size, value });
        }
    }
    let m = series.sizes.len();
    let ln_n0 = series.sizes.iter().map(|&n| (n as f64).ln()).sum::<f64>() / m as f64;
    let n0 = ln_n0.exp();
    let x: Vec<f64> = series.sizes.iter().map(|&n| n as f64 / n0).collect();
    let scale = series.peaks.iter().fold(0.0_f64, |acc, &p| acc.max(p));
    let y: Vec<f64> = series.peaks.iter().map(|p| p / scale).collect();

    let (mut a, mut alpha) = log_log_start(&x, &y)?;
    let mut rss = rss_at(&x, &y, a, alpha);
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let inv = invert_2x2(normal_matrix(&x, a, alpha))?;
        let (mut g_a, mut g_alpha) = (0.0, 0.0);
        for (&n, &e) in x.iter().zip(&y) {
            let d_a = n.powf(alpha);
            let r = e - a * d_a;
            g_a += d_a * r;
            g_alpha += a * d_a * n.ln() * r;
        }
        let mut step_a = inv[0] * g_a + inv[1] * g_alpha;
        let mut step_alpha = inv[1] * g_a + inv[2] * g_alpha;
        if step_a.abs() <= REL_STEP_TOL * a.abs() && step_alpha.abs() <= REL_STEP_TOL * alpha.abs().max(1.0) {
            a += step_a;
            alpha += step_alpha;
            rss = rss_at(&x, &y, a, alpha);
            converged = true;
            break;
        }

        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = rss_at(&x, &y, a + step_a, alpha + step_alpha);
            // changes below the rounding level of the residual sum are
            // not treated as increases
            if trial <= rss * (1.0 + RSS_SLACK) {
                accepted = Some(trial);
                break;
            }
            step_a *= 0.5;
            step_alpha *= 0.5;
        }
        let Some(trial) = accepted else {
            // no step keeps the residual from rising
            converged = true;
            break;
        };
        a += step_a;
        alpha += step_alpha;
        rss = trial;
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_ITERATIONS));
    }

    let cov = invert_2x2(normal_matrix(&x, a, alpha))?;
    let s2 = rss / (m - 2) as f64;
    let (var_a, cov_a_alpha, var_alpha) = (s2 * cov[0], s2 * cov[1], s2 * cov[2]);
    // A = A'·N₀^(−α): propagate through dA = N₀^(−α) dA' − A ln N₀ dα
    let shift = (-alpha * ln_n0).exp();
    let a_full = a * shift;
    let var_a_full = shift * shift * var_a - 2.0 * shift * a_full * ln_n0 * cov_a_alpha
        + a_full * a_full * ln_n0 * ln_n0 * var_alpha;
    Ok(PowerLawFit {
        a: a_full * scale,
        alpha,
        sigma_a: var_a_full.max(0.0).sqrt() * scale,
        sigma_alpha: var_alpha.max(0.0).sqrt(),
        rss: rss * scale * scale,
    })
}

/// # Panics
/// If `margin` is not positive.
pub fn classify_scaling(fit: &PowerLawFit, margin: f64) -> ScalingClass {
    assert!(margin > 0.0, "margin must be positive");
    if fit.alpha > 1.0 + margin {
        ScalingClass::SuperExtensive
    } else if fit.alpha < 1.0 - margin {
        ScalingClass::SubExtensive
    } else {
        ScalingClass::Extensive
    }
}
