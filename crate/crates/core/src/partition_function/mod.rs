//! Yang–Mills partition functions on closed surfaces.
//!
//! For a surface of genus g and total area t,
//!
//! ```text
//! Z_{U(N)}(g, t) = Σ_λ e^{−(t/2) c₂(λ)} d_λ^{2−2g}
//! ```
//!
//! summed over U(N) highest weights. This module evaluates the sum shell by
//! shell in the Casimir, compares it with its large-N limits θ(q_t) (g ≥ 2)
//! and θ(q_t)/φ(q_t)² (g = 1), and hosts the Gaussian measure on highest
//! weights, the torus 1/N² expansion and the sphere free energy.

use std::f64::consts::LN_10;

use crate::almost_flat::{Accumulate, AlmostFlatEnumerator};
use crate::error::{domain, Error, Result};
use crate::special::{euler_phi, q_of_t, theta};
use crate::summation::CompensatedSum;

mod gaussian;
mod sphere;
mod torus;

pub use gaussian::{
    coupling_rhs, gaussian_expectation, z_via_coupling, CouplingResult, Expectation, GaussianHWMeasure,
};
pub use sphere::{
    dk_free_energy, dk_scan, jt_functional, sphere_log_partition_function, sphere_rewrite_check, SphereRewrite,
};
pub use torus::{richardson_extrapolate, torus_expansion, TorusExpansion, TorusOptions};

/// Below this t every series converges slowly and results carry a warning.
pub const SLOW_T: f64 = 0.2;

/// Stopping rule for shell-by-shell summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Stop once a whole shell adds less than `tol` relative to the total.
    pub tol: f64,
    /// Give up with [`Error::NonConvergence`] beyond this Casimir.
    pub max_cap: f64,
}

impl Truncation {
    pub fn new(tol: f64) -> Self {
        Self { tol, max_cap: 10_000.0 }
    }

    /// 1e-10 for g ≥ 1 and 1e-8 for g = 0.
    pub fn for_genus(genus: u32) -> Self {
        Self::new(if genus == 0 { 1e-8 } else { 1e-10 })
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return domain(format!("tolerance {} must be positive", self.tol));
        }
        if !(self.max_cap > 0.0) {
            return domain("Casimir ceiling must be positive");
        }
        Ok(())
    }
}

/// Width of each Casimir shell: e^{−(t/2)·width} = 1/10.
pub(crate) fn shell_width(t: f64) -> f64 {
    2.0 * LN_10 / t
}

pub(crate) fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t = {t} must be positive"));
    }
    Ok(())
}

pub(crate) fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 {
        return domain("N must be positive");
    }
    Ok(())
}

pub(crate) fn slow_warning(t: f64) -> Vec<String> {
    if t < SLOW_T {
        vec![format!("t = {t} is below {SLOW_T}; series converge slowly")]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MigdalResult {
    pub value: f64,
    /// Sum of the last shell, a heuristic estimate of the omitted tail.
    pub tail_estimate: f64,
    pub weights_summed: u64,
    pub rank: usize,
    pub genus: u32,
    pub t: f64,
    /// Largest Casimir included.
    pub cap: f64,
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct Shell {
    sum: CompensatedSum,
    max_term: f64,
    count: u64,
}

impl Accumulate for Shell {
    fn merge(&mut self, other: Self) {
        self.sum.merge(&other.sum);
        self.max_term = self.max_term.max(other.max_term);
        self.count += other.count;
    }
}

/// Z_{U(N)}(g, t) = Σ_λ e^{−(t/2)c₂(λ)} d_λ^{2−2g}.
///
/// Shells of width 2 ln 10 / t in the Casimir are added until one contributes
/// less than `tol` relative to the total; for g = 0 the largest term of the
/// shell must also have started to decrease.
pub fn migdal_z(rank: usize, genus: u32, t: f64, trunc: &Truncation) -> Result<MigdalResult> {
    check_rank(rank)?;
    check_t(t)?;
    trunc.validate()?;
    let step = shell_width(t);
    let mut e = AlmostFlatEnumerator::new(rank);
    let mut total = CompensatedSum::new();
    let mut count = 0u64;
    let mut prev_max = f64::INFINITY;
    let mut lo: Option<f64> = None;
    let mut hi = step;
    let half_t = t / 2.0;
    let power = 2 - 2 * genus as i32;
    for shell_index in 0.. {
        let shell: Shell = if genus == 1 {
            e.fold_shell_grouped(lo, hi, |acc: &mut Shell, g| {
                let w = (-half_t * g.casimir()).exp();
                acc.sum += g.multiplicity as f64 * w;
                acc.max_term = acc.max_term.max(w);
                acc.count += g.multiplicity;
            })
        } else {
            e.fold_shell(lo, hi, true, |acc: &mut Shell, term| {
                let w = (-half_t * term.casimir()).exp() * term.dimension.powi(power);
                acc.sum += w;
                acc.max_term = acc.max_term.max(w);
                acc.count += 1;
            })
        };
        total.merge(&shell.sum);
        count += shell.count;
        let s = shell.sum.value();
        let decaying = genus > 0 || shell.max_term <= prev_max;
        // an empty shell says nothing about the tail
        if shell.count > 0 && shell_index >= 1 && s <= trunc.tol * total.value() && decaying {
            return Ok(MigdalResult {
                value: total.value(),
                tail_estimate: s,
                weights_summed: count,
                rank,
                genus,
                t,
                cap: hi,
                warnings: slow_warning(t),
            });
        }
        if shell.count > 0 {
            prev_max = shell.max_term;
        }
        lo = Some(hi);
        hi += step;
        if hi > trunc.max_cap {
            return Err(Error::NonConvergence {
                cap: hi - step,
                increment: s / total.value(),
            });
        }
    }
    unreachable!()
}

/// lim_{N→∞} Z_{U(N)}(g, t) = θ(q_t) for g ≥ 2.
pub fn limit_g_ge_2(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(theta(q_of_t(t), 1e-16)?.value)
}

/// lim_{N→∞} Z_{U(N)}(1, t) = θ(q_t)/φ(q_t)².
pub fn limit_g_1(t: f64) -> Result<f64> {
    check_t(t)?;
    let q = q_of_t(t);
    let phi = euler_phi(q, 1e-17)?.value;
    Ok(theta(q, 1e-16)?.value / (phi * phi))
}
