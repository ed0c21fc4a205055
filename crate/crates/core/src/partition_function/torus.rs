//! The 1/N² expansion of the torus partition function,
//!
//! ```text
//! Z_{U(N)}(1, t) ≈ Σ_k a_k(t) N^{−2k},   a_k = (θ/φ²) t^{2k}/(2k)! · E[X^{2k}],
//! ```
//!
//! where X = K(α) + K(β) + n(|α| − |β|) under two independent q-uniform
//! partitions and the discrete Gaussian on n. Odd moments vanish.

use num_traits::ToPrimitive;

use super::{check_t, migdal_z, Truncation};
use crate::error::{domain, Error, Result};
use crate::hurwitz::content_power_sums;
use crate::special::{euler_phi, q_of_t, theta, theta_qdq};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusOptions {
    /// Ranks whose exact Z feeds the Richardson oracle.
    pub oracle_ranks: Vec<usize>,
    pub truncation: Truncation,
    /// Largest partition size summed in the moments.
    pub max_partition_size: u32,
}

impl Default for TorusOptions {
    fn default() -> Self {
        Self {
            oracle_ranks: vec![6, 8, 10, 12],
            truncation: Truncation::new(1e-14),
            max_partition_size: 70,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusExpansion {
    pub t: f64,
    /// a_0, …, a_p.
    pub coefficients: Vec<f64>,
    /// Richardson extrapolation of each coefficient from exact Z over `oracle_ranks`.
    pub oracle: Vec<f64>,
    pub relative_disagreement: Vec<f64>,
    /// Coefficients disagreeing with the oracle by more than 5%.
    pub flagged: Vec<bool>,
    pub oracle_ranks: Vec<usize>,
    /// Partition size at which the moment sums stopped.
    pub moment_size_cutoff: u32,
    /// Relative size of the last partition level in the highest moment.
    pub tail_estimate: f64,
}

/// Neville extrapolation of v(h) to h = 0 through all given points.
pub fn richardson_extrapolate(points: &[(f64, f64)]) -> f64 {
    let h: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut p: Vec<f64> = points.iter().map(|p| p.1).collect();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i]);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Σ_{|α|=a} φ q^a K(α)^r for r ≤ r_max, stopping once a whole level is
/// negligible in every moment.
struct SizeMoments {
    // weighted[a][r] = φ q^a Σ_{|α|=a} K^r
    weighted: Vec<Vec<f64>>,
    tail: f64,
}

fn size_moments(q: f64, phi: f64, r_max: usize, max_size: u32, tol: f64) -> Result<SizeMoments> {
    let mut weighted: Vec<Vec<f64>> = Vec::new();
    let mut totals = vec![0.0f64; r_max + 1];
    let mut quiet = 0;
    let mut tail = f64::INFINITY;
    for a in 0..=max_size {
        let sums = content_power_sums(a, r_max as u32)?;
        let w = phi * q.powi(a as i32);
        let row: Vec<f64> = sums.iter().map(|s| w * s.to_f64().unwrap_or(f64::INFINITY)).collect();
        let mut rel = 0.0f64;
        for (r, v) in row.iter().enumerate() {
            totals[r] += v.abs();
            if totals[r] > 0.0 {
                rel = rel.max(v.abs() / totals[r]);
            }
        }
        weighted.push(row);
        if a >= 4 && rel <= tol {
            quiet += 1;
            if quiet >= 2 {
                tail = rel;
                break;
            }
        } else {
            quiet = 0;
        }
        tail = rel;
    }
    Ok(SizeMoments { weighted, tail })
}

/// E[X^m] for even m ≤ 2·p, returned for m = 0..=2p.
fn x_moments(q: f64, p: usize, max_size: u32, tol: f64) -> Result<(Vec<f64>, u32, f64)> {
    let m_max = 2 * p;
    let th = theta(q, 1e-16)?.value;
    let phi = euler_phi(q, 1e-17)?.value;
    let sm = size_moments(q, phi, m_max, max_size, tol)?;
    // μ_l = E[n^l] for the discrete Gaussian, zero for odd l
    let mu: Vec<f64> = (0..=m_max)
        .map(|l| {
            if l % 2 == 1 {
                Ok(0.0)
            } else {
                Ok(theta_qdq(q, (l / 2) as u32, 1e-16)?.value / th)
            }
        })
        .collect::<Result<_>>()?;
    let levels = sm.weighted.len();
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut acc = CompensatedSum::new();
        for a in 0..levels {
            for b in 0..levels {
                let d = a as f64 - b as f64;
                for r in 0..=m {
                    for s in 0..=m - r {
                        let l = m - r - s;
                        if l % 2 == 1 {
                            continue;
                        }
                        let coef = binomial(m, r) * binomial(m - r, s);
                        acc += coef * sm.weighted[a][r] * sm.weighted[b][s] * d.powi(l as i32) * mu[l];
                    }
                }
            }
        }
        out.push(acc.value());
    }
    Ok((out, levels as u32 - 1, sm.tail))
}

/// The coefficients a_0..a_p (p ≤ 2) with a Richardson oracle from exact Z.
pub fn torus_expansion(t: f64, p: usize, opts: &TorusOptions) -> Result<TorusExpansion> {
    check_t(t)?;
    if p > 2 {
        return domain(format!("order p = {p} not supported (at most 2)"));
    }
    if opts.oracle_ranks.len() < 2 {
        return domain("the oracle needs at least two ranks");
    }
    let q = q_of_t(t);
    let th = theta(q, 1e-16)?.value;
    let phi = euler_phi(q, 1e-17)?.value;
    let a0 = th / (phi * phi);
    let (moments, cutoff, tail) = x_moments(q, p, opts.max_partition_size, 1e-16)?;
    let coefficients: Vec<f64> = (0..=p)
        .map(|k| a0 * t.powi(2 * k as i32) / factorial(2 * k) * moments[2 * k])
        .collect();

    let zs: Vec<(usize, f64)> = opts
        .oracle_ranks
        .iter()
        .map(|&n| Ok((n, migdal_z(n, 1, t, &opts.truncation)?.value)))
        .collect::<Result<_>>()?;
    let mut oracle = Vec::with_capacity(p + 1);
    for k in 0..=p {
        let pts: Vec<(f64, f64)> = zs
            .iter()
            .map(|&(n, z)| {
                let nf = n as f64;
                let known: f64 = oracle.iter().enumerate().map(|(j, a): (usize, &f64)| a * nf.powi(-2 * j as i32)).sum();
                (1.0 / (nf * nf), nf.powi(2 * k as i32) * (z - known))
            })
            .collect();
        oracle.push(richardson_extrapolate(&pts));
    }
    if oracle.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence { cap: f64::NAN, increment: f64::NAN });
    }
    let relative_disagreement: Vec<f64> = coefficients
        .iter()
        .zip(&oracle)
        .map(|(c, o)| (c - o).abs() / o.abs())
        .collect();
    let flagged = relative_disagreement.iter().map(|r| *r > 0.05).collect();
    Ok(TorusExpansion {
        t,
        coefficients,
        oracle,
        relative_disagreement,
        flagged,
        oracle_ranks: opts.oracle_ranks.clone(),
        moment_size_cutoff: cutoff,
        tail_estimate: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::f_series;
    use crate::special::q_uniform_size_variance;

    #[test]
    fn neville_recovers_polynomials() {
        let f = |h: f64| 3.0 - 2.0 * h + 0.5 * h * h;
        let pts: Vec<(f64, f64)> = [0.1, 0.2, 0.4].iter().map(|&h| (h, f(h))).collect();
        assert!((richardson_extrapolate(&pts) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn second_moment_matches_closed_form() {
        let t = 2.0;
        let q = q_of_t(t);
        let (m, _, _) = x_moments(q, 1, 70, 1e-16).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-13);
        let phi = euler_phi(q, 1e-17).unwrap().value;
        let th = theta(q, 1e-16).unwrap().value;
        let f1 = f_series(1, q, 60).unwrap().value().value;
        let mu2 = theta_qdq(q, 1, 1e-16).unwrap().value / th;
        let var = q_uniform_size_variance(q, 1e-16).unwrap().value;
        let expected = 2.0 * phi * f1 + 2.0 * mu2 * var;
        assert!((m[2] - expected).abs() < 1e-10 * expected, "{} vs {expected}", m[2]);
    }

    #[test]
    fn leading_coefficient_is_the_limit() {
        let opts = TorusOptions { oracle_ranks: vec![6, 8], ..Default::default() };
        let e = torus_expansion(2.0, 0, &opts).unwrap();
        assert!((e.coefficients[0] - super::super::limit_g_1(2.0).unwrap()).abs() < 1e-13);
        assert_eq!(e.flagged[0], e.relative_disagreement[0] > 0.05);
    }

    #[test]
    fn first_correction_against_large_rank() {
        // N²(Z_N − a₀) approaches a₁ to O(1/N²)
        let t = 3.0;
        let e = torus_expansion(t, 1, &TorusOptions::default()).unwrap();
        let n = 40.0;
        let z = migdal_z(40, 1, t, &Truncation::new(1e-14)).unwrap().value;
        let est = n * n * (z - e.coefficients[0]);
        assert!((est - e.coefficients[1]).abs() < 0.1 * e.coefficients[1].abs(), "{est} vs {}", e.coefficients[1]);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(torus_expansion(2.0, 3, &TorusOptions::default()).is_err());
        assert!(torus_expansion(-1.0, 1, &TorusOptions::default()).is_err());
    }
}
