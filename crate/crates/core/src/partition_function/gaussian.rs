//! The Gaussian measure G_{N,t}(λ) = e^{−(t/2)c₂(λ)}/Z_{U(N)}(1, t) on U(N)
//! highest weights, and its description through two q-uniform partitions
//! and an integer: with λ = λ_N(α, β, n) and X = K(α) + K(β) + n(|α| − |β|),
//!
//! ```text
//! E_{N,t}[F] = θ/(Z φ²) · Σ_{(α,β,n)∈Λ_N} F(λ) U_q(α) U_q(β) G_{1,t}(n) q^{2X/N}
//! ```
//!
//! where U_q(α) = φ(q) q^{|α|} and G_{1,t}(n) = q^{n²}/θ(q).

use rayon::prelude::*;

use super::{check_rank, check_t, migdal_z, shell_width, Truncation};
use crate::almost_flat::{Accumulate, AlmostFlatEnumerator};
use crate::error::{Error, Result};
use crate::partitions::enumerate_partitions;
use crate::special::{euler_phi, q_of_t, theta};
use crate::summation::CompensatedSum;
use crate::unitary_reps::{alpha_cutoff, beta_cutoff, glue, HighestWeight};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianHWMeasure {
    pub rank: usize,
    pub t: f64,
    /// Z_{U(N)}(1, t).
    pub normalization: f64,
}

impl GaussianHWMeasure {
    pub fn new(rank: usize, t: f64, trunc: &Truncation) -> Result<Self> {
        let z = migdal_z(rank, 1, t, trunc)?;
        Ok(Self {
            rank,
            t,
            normalization: z.value,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectation {
    pub value: f64,
    /// Last shell's contribution to Σ |F| e^{−(t/2)c₂}, divided by Z.
    pub tail_estimate: f64,
    pub weights_summed: u64,
    pub cap: f64,
}

#[derive(Default)]
struct Moments {
    num: CompensatedSum,
    abs: CompensatedSum,
    weight: CompensatedSum,
    count: u64,
}

impl Accumulate for Moments {
    fn merge(&mut self, other: Self) {
        self.num.merge(&other.num);
        self.abs.merge(&other.abs);
        self.weight.merge(&other.weight);
        self.count += other.count;
    }
}

/// Σ_λ F(λ) e^{−(t/2)c₂(λ)} / Z_{U(N)}(1, t), by Casimir shells.
pub fn gaussian_expectation<F>(m: &GaussianHWMeasure, f: F, trunc: &Truncation) -> Result<Expectation>
where
    F: Fn(&HighestWeight) -> f64 + Sync,
{
    check_rank(m.rank)?;
    check_t(m.t)?;
    let step = shell_width(m.t);
    let half_t = m.t / 2.0;
    let mut e = AlmostFlatEnumerator::new(m.rank);
    let mut total = Moments::default();
    let mut lo = None;
    let mut hi = step;
    for shell_index in 0.. {
        let shell: Moments = e.fold_shell(lo, hi, false, |acc: &mut Moments, term| {
            let w = (-half_t * term.casimir()).exp();
            let v = f(&term.highest_weight()) * w;
            acc.num += v;
            acc.abs += v.abs();
            acc.weight += w;
            acc.count += 1;
        });
        let (s_abs, s_w) = (shell.abs.value(), shell.weight.value());
        let empty = shell.count == 0;
        total.merge(shell);
        if !empty && shell_index >= 1 && s_abs <= trunc.tol * total.abs.value() && s_w <= trunc.tol * total.weight.value() {
            return Ok(Expectation {
                value: total.num.value() / m.normalization,
                tail_estimate: s_abs / m.normalization,
                weights_summed: total.count,
                cap: hi,
            });
        }
        lo = Some(hi);
        hi += step;
        if hi > trunc.max_cap {
            return Err(Error::NonConvergence {
                cap: hi - step,
                increment: s_abs / total.abs.value(),
            });
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingResult {
    /// θ/(Zφ²) · sum, or (θ/φ²) · sum for [`z_via_coupling`].
    pub value: f64,
    /// Σ F(λ) U_q(α) U_q(β) G_{1,t}(n) q^{2X/N} over the truncated Λ_N.
    pub sum: f64,
    pub normalization: f64,
    pub theta: f64,
    pub phi: f64,
    /// Number of levels |α| + |β| summed.
    pub levels: u32,
    pub tail_estimate: f64,
}

struct Entry {
    parts: Vec<u32>,
    content: i64,
}

fn table(max_size: usize, max_len: usize) -> Vec<Vec<Entry>> {
    (0..=max_size as u32)
        .map(|s| {
            if s > 0 && max_len == 0 {
                return Vec::new();
            }
            enumerate_partitions(s, Some(max_len))
                .into_iter()
                .map(|p| Entry {
                    content: p.total_content(),
                    parts: p.parts().to_vec(),
                })
                .collect()
        })
        .collect()
}

// the n-sum keeps terms within e^{-92} of its largest one
const N_WINDOW_LOG: f64 = 92.0;

fn coupling_sum<F>(rank: usize, t: f64, f: &F, trunc: &Truncation) -> Result<(f64, u32, f64, f64, f64)>
where
    F: Fn(&HighestWeight) -> f64 + Sync,
{
    check_rank(rank)?;
    check_t(t)?;
    let q = q_of_t(t);
    let lq = q.ln();
    let th = theta(q, 1e-16)?.value;
    let phi = euler_phi(q, 1e-17)?.value;
    let log_prefactor = 2.0 * phi.ln() - th.ln();
    let r = rank as f64;
    let (amax, bmax) = (alpha_cutoff(rank), beta_cutoff(rank));
    let max_levels = (2.0 * trunc.max_cap).ceil() as usize;
    let mut alphas: Vec<Vec<Entry>> = Vec::new();
    let mut betas: Vec<Vec<Entry>> = Vec::new();
    let mut total = CompensatedSum::new();
    let mut total_abs = CompensatedSum::new();
    let mut quiet = 0;
    for s in 0..=max_levels {
        if alphas.len() <= s {
            let grow = (2 * s).max(8);
            alphas = table(grow, amax);
            betas = table(grow, bmax);
        }
        let parts: Vec<(CompensatedSum, CompensatedSum)> = (0..=s)
            .into_par_iter()
            .map(|a| {
                let b = s - a;
                let mut acc = CompensatedSum::new();
                let mut acc_abs = CompensatedSum::new();
                let d = a as f64 - b as f64;
                for x in &alphas[a] {
                    for y in &betas[b] {
                        let x0 = (x.content + y.content) as f64;
                        // exponent of q: |α| + |β| + n² + 2X/N, minimal near n = −D/N
                        let expo = |n: f64| s as f64 + n * n + 2.0 * (x0 + n * d) / r;
                        let n0 = (-d / r).round() as i64;
                        let e0 = expo(n0 as f64);
                        let mut visit = |n: i64| -> bool {
                            let e = expo(n as f64);
                            if -lq * (e - e0) > N_WINDOW_LOG {
                                return false;
                            }
                            let w = (log_prefactor + lq * e).exp();
                            let lambda = HighestWeight::from_coeffs_unchecked(glue(&x.parts, &y.parts, n, rank));
                            let v = w * f(&lambda);
                            acc += v;
                            acc_abs += v.abs();
                            true
                        };
                        visit(n0);
                        let mut n = n0 + 1;
                        while visit(n) {
                            n += 1;
                        }
                        let mut n = n0 - 1;
                        while visit(n) {
                            n -= 1;
                        }
                    }
                }
                (acc, acc_abs)
            })
            .collect();
        let mut level = CompensatedSum::new();
        let mut level_abs = CompensatedSum::new();
        for (v, a) in &parts {
            level.merge(v);
            level_abs.merge(a);
        }
        total.merge(&level);
        total_abs.merge(&level_abs);
        if s >= 3 && level_abs.value() <= trunc.tol * total_abs.value() {
            quiet += 1;
            if quiet >= 2 {
                return Ok((total.value(), s as u32 + 1, level_abs.value(), th, phi));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        cap: max_levels as f64,
        increment: f64::NAN,
    })
}

/// θ/(Z φ²) · Σ_{Λ_N} F(λ_N(α,β,n)) U_q(α) U_q(β) G_{1,t}(n) q^{2X/N}, summed
/// level by level in |α| + |β|, with Z = Z_{U(N)}(1, t) from the Casimir sum.
pub fn coupling_rhs<F>(rank: usize, t: f64, f: F, trunc: &Truncation) -> Result<CouplingResult>
where
    F: Fn(&HighestWeight) -> f64 + Sync,
{
    let z = migdal_z(rank, 1, t, trunc)?.value;
    let (sum, levels, tail, th, phi) = coupling_sum(rank, t, &f, trunc)?;
    let scale = th / (z * phi * phi);
    Ok(CouplingResult {
        value: scale * sum,
        sum,
        normalization: z,
        theta: th,
        phi,
        levels,
        tail_estimate: scale * tail,
    })
}

/// Z_{U(N)}(1, t) = (θ/φ²) · Σ_{Λ_N} U_q(α) U_q(β) G_{1,t}(n) q^{2X/N}.
pub fn z_via_coupling(rank: usize, t: f64, trunc: &Truncation) -> Result<CouplingResult> {
    let (sum, levels, tail, th, phi) = coupling_sum(rank, t, &|_: &HighestWeight| 1.0, trunc)?;
    let scale = th / (phi * phi);
    Ok(CouplingResult {
        value: scale * sum,
        sum,
        normalization: scale * sum,
        theta: th,
        phi,
        levels,
        tail_estimate: scale * tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::theta_qdq;

    fn tight() -> Truncation {
        Truncation::new(1e-13)
    }

    #[test]
    fn expectation_of_one() {
        for rank in 1..=4 {
            let m = GaussianHWMeasure::new(rank, 2.0, &tight()).unwrap();
            let e = gaussian_expectation(&m, |_| 1.0, &tight()).unwrap();
            assert!((e.value - 1.0).abs() < 1e-10, "rank {rank}");
        }
    }

    #[test]
    fn u1_moments() {
        let m = GaussianHWMeasure::new(1, 2.0, &tight()).unwrap();
        let q = q_of_t(2.0);
        let e2 = gaussian_expectation(&m, |w| (w.coeffs()[0] as f64).powi(2), &tight()).unwrap();
        let expected = theta_qdq(q, 1, 1e-16).unwrap().value / theta(q, 1e-16).unwrap().value;
        assert!((e2.value - expected).abs() < 1e-10);
        for power in [1, 3, 5] {
            let odd = gaussian_expectation(&m, |w| (w.coeffs()[0] as f64).powi(power), &tight()).unwrap();
            assert!(odd.value.abs() < 1e-12);
        }
        let e4 = gaussian_expectation(&m, |w| (w.coeffs()[0] as f64).powi(4), &tight()).unwrap();
        let expected = theta_qdq(q, 2, 1e-16).unwrap().value / theta(q, 1e-16).unwrap().value;
        assert!((e4.value - expected).abs() < 1e-10);
    }

    #[test]
    fn coupling_matches_expectation() {
        let casimir = |w: &HighestWeight| w.casimir_numerator() as f64 / w.rank() as f64;
        let top = |w: &HighestWeight| w.coeffs()[0] as f64;
        for rank in [3, 4, 5] {
            for t in [1.0, 2.0, 4.0] {
                let m = GaussianHWMeasure::new(rank, t, &tight()).unwrap();
                for (name, f) in [("one", &(|_: &HighestWeight| 1.0) as &(dyn Fn(&HighestWeight) -> f64 + Sync)), ("c2", &casimir), ("l1", &top)] {
                    let lhs = gaussian_expectation(&m, f, &tight()).unwrap().value;
                    let rhs = coupling_rhs(rank, t, f, &tight()).unwrap().value;
                    assert!((lhs - rhs).abs() < 1e-6, "{name} N={rank} t={t}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn partition_function_from_coupling() {
        let z = migdal_z(3, 1, 2.0, &tight()).unwrap().value;
        let c = z_via_coupling(3, 2.0, &tight()).unwrap();
        assert!((c.value - z).abs() < 1e-8 * z);
    }
}
