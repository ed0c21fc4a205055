//! Truncated q-series: θ(q) = Σ_{n∈ℤ} q^{n²}, its moments Σ n^{2k} q^{n²},
//! the Euler function φ(q) = ∏ (1 − q^m), size moments of the q-uniform
//! measure, and the Witten zeta function of SU(N).

use crate::error::{domain, Error, Result};
use crate::partitions::enumerate_partitions;
use crate::summation::CompensatedSum;
use crate::unitary_reps::phi_bijection;

/// A partial sum together with an estimate of what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedValue {
    pub value: f64,
    /// Bound on the omitted tail; a heuristic estimate when `rigorous` is false.
    pub tail_bound: f64,
    pub terms_used: usize,
    pub rigorous: bool,
}

/// q_t = e^{−t/2}.
pub fn q_of_t(t: f64) -> f64 {
    (-t / 2.0).exp()
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("q = {q} must lie in [0, 1)"));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    Ok(())
}

/// θ(q) = 1 + 2 Σ_{n≥1} q^{n²}.
pub fn theta(q: f64, tol: f64) -> Result<TruncatedValue> {
    theta_qdq(q, 0, tol)
}

/// (q d/dq)^k θ(q) = Σ_{n∈ℤ} n^{2k} q^{n²}.
pub fn theta_qdq(q: f64, k: u32, tol: f64) -> Result<TruncatedValue> {
    check_q(q)?;
    check_tol(tol)?;
    let mut sum = CompensatedSum::new();
    if k == 0 {
        sum += 1.0;
    }
    if q == 0.0 {
        return Ok(TruncatedValue {
            value: sum.value(),
            tail_bound: 0.0,
            terms_used: 1,
            rigorous: true,
        });
    }
    let lq = q.ln();
    let term = |n: f64| 2.0 * (2.0 * k as f64 * n.ln() + n * n * lq).exp();
    let mut n = 1u64;
    loop {
        sum += term(n as f64);
        // successive ratios ((m+1)/m)^{2k} q^{2m+1} decrease in m
        let m = (n + 1) as f64;
        let ratio = ((m + 1.0) / m).powi(2 * k as i32) * q.powf(2.0 * m + 1.0);
        if ratio < 1.0 {
            let tail = term(m) / (1.0 - ratio);
            if tail <= tol {
                return Ok(TruncatedValue {
                    value: sum.value(),
                    tail_bound: tail,
                    terms_used: 2 * n as usize + 1,
                    rigorous: true,
                });
            }
        }
        n += 1;
        if n > 1_000_000_000 {
            return Err(Error::NonConvergence {
                cap: n as f64,
                increment: term(n as f64),
            });
        }
    }
}

/// φ(q) = ∏_{m≥1} (1 − q^m).
pub fn euler_phi(q: f64, tol: f64) -> Result<TruncatedValue> {
    check_q(q)?;
    check_tol(tol)?;
    if q == 0.0 {
        return Ok(TruncatedValue {
            value: 1.0,
            tail_bound: 0.0,
            terms_used: 0,
            rigorous: true,
        });
    }
    let mut log = CompensatedSum::new();
    let mut m = 0u64;
    loop {
        m += 1;
        log += (-q.powf(m as f64)).ln_1p();
        let qm = q.powf((m + 1) as f64);
        let log_tail = qm / ((1.0 - q) * (1.0 - qm));
        let value = log.value().exp();
        // |φ − φ_M| ≤ φ_M (e^{tail} − 1)
        let bound = value * log_tail.exp_m1();
        if bound <= tol {
            return Ok(TruncatedValue {
                value,
                tail_bound: bound,
                terms_used: m as usize,
                rigorous: true,
            });
        }
        if m > 1_000_000_000 {
            return Err(Error::NonConvergence {
                cap: m as f64,
                increment: bound,
            });
        }
    }
}

// Σ_j f(j) q^j/(1−q^j)^p with a geometric tail bound.
fn q_uniform_series(q: f64, tol: f64, power: i32, weight: impl Fn(f64) -> f64) -> Result<TruncatedValue> {
    check_q(q)?;
    check_tol(tol)?;
    let mut sum = CompensatedSum::new();
    if q == 0.0 {
        return Ok(TruncatedValue {
            value: 0.0,
            tail_bound: 0.0,
            terms_used: 0,
            rigorous: true,
        });
    }
    let term = |j: f64| weight(j) * q.powf(j) / (1.0 - q.powf(j)).powi(power);
    let mut j = 0u64;
    loop {
        j += 1;
        sum += term(j as f64);
        let m = (j + 1) as f64;
        let ratio = weight(m + 1.0) / weight(m) * q;
        if ratio < 1.0 {
            let tail = term(m) / (1.0 - ratio);
            if tail <= tol {
                return Ok(TruncatedValue {
                    value: sum.value(),
                    tail_bound: tail,
                    terms_used: j as usize,
                    rigorous: true,
                });
            }
        }
    }
}

/// Mean of |α| under the q-uniform measure: Σ_j j q^j/(1 − q^j).
pub fn q_uniform_size_mean(q: f64, tol: f64) -> Result<TruncatedValue> {
    q_uniform_series(q, tol, 1, |j| j)
}

/// Variance of |α| under the q-uniform measure: Σ_j j² q^j/(1 − q^j)².
pub fn q_uniform_size_variance(q: f64, tol: f64) -> Result<TruncatedValue> {
    q_uniform_series(q, tol, 2, |j| j * j)
}

/// ζ_{SU(N)}(s) = Σ d_λ^{−s} over SU(N) weights, i.e. partitions with at most
/// N − 1 parts, summed by increasing size.
///
/// The tail is estimated by fitting a power law m^{−p} to the last two size
/// blocks, giving tail ≈ B(m)·m/(p − 1). Summation stops once that estimate
/// falls below `tol` times the partial sum.
pub fn witten_zeta_su(rank: usize, s: f64, tol: f64, max_size: u32) -> Result<TruncatedValue> {
    if rank == 0 {
        return domain("rank must be positive");
    }
    if !(s > 1.0) {
        return domain(format!("Witten zeta needs s > 1, got {s}"));
    }
    check_tol(tol)?;
    let mut total = CompensatedSum::new();
    let mut terms = 0usize;
    let mut prev_block = f64::NAN;
    let mut last_tail = f64::INFINITY;
    for m in 0..=max_size {
        let mut block = CompensatedSum::new();
        if m == 0 || rank > 1 {
            for alpha in enumerate_partitions(m, Some(rank - 1)) {
                let w = phi_bijection(&alpha, 0, rank)?;
                block += w.weyl_dimension_f64().powf(-s);
                terms += 1;
            }
        }
        let b = block.value();
        total.merge(&block);
        if rank == 1 {
            // U(1)/SU(1) is trivial: only the empty weight.
            return Ok(TruncatedValue {
                value: total.value(),
                tail_bound: 0.0,
                terms_used: terms,
                rigorous: true,
            });
        }
        if m >= 4 && prev_block > 0.0 && b > 0.0 {
            let mf = m as f64;
            let p = (prev_block / b).ln() / (mf / (mf - 1.0)).ln();
            if p > 1.0 {
                last_tail = b * mf / (p - 1.0);
                if last_tail <= tol * total.value() {
                    return Ok(TruncatedValue {
                        value: total.value(),
                        tail_bound: last_tail,
                        terms_used: terms,
                        rigorous: false,
                    });
                }
            }
        }
        prev_block = b;
    }
    Err(Error::NonConvergence {
        cap: max_size as f64,
        increment: last_tail / total.value(),
    })
}
