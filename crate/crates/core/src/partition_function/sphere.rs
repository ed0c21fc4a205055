//! The sphere partition function as a discrete Coulomb gas.
//!
//! With shifted coordinates ℓ_i = λ_i + (N+1)/2 − i one has
//! c₂(λ) = Σℓ²/N − (N²−1)/12 and d_λ = Δ(ℓ)/∏_{k<N} k!, so Z_{U(N)}(0, t) is a
//! sum of e^{−N² J_t(x)} over configurations x = ℓ/N, with
//! J_t(x) = −(1/N²) Σ_{i≠j} log|x_i − x_j| + (t/2N) Σ x_i².

use super::{check_rank, check_t, migdal_z, Truncation};
use crate::error::{domain, Result};
use crate::summation::CompensatedSum;
use crate::unitary_reps::enumerate_highest_weights;

/// J_t(x) for an N-point configuration. Coinciding points are a domain error.
pub fn jt_functional(points: &[f64], t: f64) -> Result<f64> {
    let n = points.len();
    if n == 0 {
        return domain("empty configuration");
    }
    let nf = n as f64;
    let mut log_sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = (points[i] - points[j]).abs();
            if d == 0.0 {
                return domain(format!("points {i} and {j} coincide"));
            }
            log_sum += 2.0 * d.ln();
        }
    }
    let sq: f64 = points.iter().map(|x| x * x).sum();
    Ok(-log_sum / (nf * nf) + t / (2.0 * nf) * sq)
}

fn log_superfactorial(n: usize) -> f64 {
    // Σ_{k=1}^{n−1} ln k!
    let mut lf = 0.0;
    let mut s = 0.0;
    for k in 1..n {
        lf += (k as f64).ln();
        s += lf;
    }
    s
}

/// Z_{U(N)}(0, t) three ways: the Casimir sum, and the Coulomb-gas sum with
/// atoms at ℓ_i ("literal") or at ℓ_i/N ("rescaled").
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereRewrite {
    pub migdal: f64,
    pub literal: f64,
    pub rescaled: f64,
    pub literal_relative_error: f64,
    pub rescaled_relative_error: f64,
}

pub fn sphere_rewrite_check(rank: usize, t: f64, trunc: &Truncation) -> Result<SphereRewrite> {
    let z = migdal_z(rank, 0, t, trunc)?;
    let weights = enumerate_highest_weights(rank, z.cap)?;
    let nf = rank as f64;
    let prefactor = t * (nf * nf - 1.0) / 24.0 + nf * (nf - 1.0) * nf.ln() - 2.0 * log_superfactorial(rank);
    let mut literal = CompensatedSum::new();
    let mut rescaled = CompensatedSum::new();
    let mut x = vec![0.0; rank];
    for w in &weights {
        for (i, (xi, &l)) in x.iter_mut().zip(w.coeffs()).enumerate() {
            *xi = l as f64 + (nf + 1.0) / 2.0 - (i + 1) as f64;
        }
        literal += (prefactor - nf * nf * jt_functional(&x, t)?).exp();
        let y: Vec<f64> = x.iter().map(|v| v / nf).collect();
        rescaled += (prefactor - nf * nf * jt_functional(&y, t)?).exp();
    }
    let (literal, rescaled) = (literal.value(), rescaled.value());
    Ok(SphereRewrite {
        migdal: z.value,
        literal,
        rescaled,
        literal_relative_error: (literal - z.value).abs() / z.value,
        rescaled_relative_error: (rescaled - z.value).abs() / z.value,
    })
}

// weights e^{−t x²/(2N)} are dropped below e^{−WEIGHT_CUT}
const WEIGHT_CUT: f64 = 700.0;

/// log Z_{U(N)}(0, t) from the orthogonal polynomials of the discrete
/// Gaussian weight on the shifted lattice:
///
/// ```text
/// log Z = t(N²−1)/24 − 2 Σ_{k<N} ln k! + Σ_{k<N} log h_k
/// ```
///
/// h_k being the squared norms of the monic orthogonal polynomials, obtained
/// by Lanczos with full reorthogonalisation.
pub fn sphere_log_partition_function(rank: usize, t: f64) -> Result<f64> {
    check_rank(rank)?;
    check_t(t)?;
    let nf = rank as f64;
    let offset = if rank % 2 == 0 { 0.5 } else { 0.0 };
    let xmax = (2.0 * WEIGHT_CUT * nf / t).sqrt();
    let m = (xmax - offset).floor() as i64;
    let nodes: Vec<f64> = (-m - 1..=m).map(|j| j as f64 + offset).filter(|x| x.abs() <= xmax).collect();
    if nodes.len() < rank {
        return domain(format!("t = {t} too large for N = {rank}: fewer lattice points than N"));
    }
    let log_w: Vec<f64> = nodes.iter().map(|x| -t * x * x / (2.0 * nf)).collect();
    let h0: f64 = log_w.iter().map(|l| l.exp()).sum::<CompensatedSum>().value();
    let mut v: Vec<f64> = log_w.iter().map(|l| (l.exp() / h0).sqrt()).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(rank);
    let mut log_h = h0.ln();
    let mut total = log_h;
    for _ in 1..rank {
        let mut w: Vec<f64> = v.iter().zip(&nodes).map(|(a, x)| a * x).collect();
        basis.push(v.clone());
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = b.iter().zip(&w).map(|(p, q)| p * q).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(beta > 0.0) {
            return domain("Lanczos breakdown");
        }
        v = w.into_iter().map(|x| x / beta).collect();
        log_h += 2.0 * beta.ln();
        total += log_h;
    }
    Ok(t * (nf * nf - 1.0) / 24.0 - 2.0 * log_superfactorial(rank) + total)
}

/// F_N(t) = log Z_{U(N)}(0, t) / N².
pub fn dk_free_energy(rank: usize, t: f64) -> Result<f64> {
    Ok(sphere_log_partition_function(rank, t)? / (rank * rank) as f64)
}

/// (t, F_N(t)) for each t.
pub fn dk_scan(rank: usize, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    ts.iter().map(|&t| Ok((t, dk_free_energy(rank, t)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{q_of_t, theta};

    #[test]
    fn functional_examples() {
        // two points at ±1: −2 ln 2 / 4 + (t/4)·2
        let j = jt_functional(&[1.0, -1.0], 2.0).unwrap();
        assert!((j - (-(2.0f64).ln() / 2.0 + 1.0)).abs() < 1e-15);
        assert!(jt_functional(&[0.5, 0.5], 1.0).is_err());
        assert!(jt_functional(&[], 1.0).is_err());
    }

    #[test]
    fn rescaled_rewrite_is_exact() {
        for rank in 1..=4 {
            for t in [1.0, 3.0] {
                let r = sphere_rewrite_check(rank, t, &Truncation::new(1e-12)).unwrap();
                assert!(r.rescaled_relative_error < 1e-10, "N={rank} t={t}: {r:?}");
                if rank >= 2 {
                    assert!(r.literal_relative_error > 1e-3);
                }
            }
        }
    }

    #[test]
    fn hankel_route_matches_casimir_sum() {
        for rank in [2, 3, 4] {
            for t in [1.0, 2.0, 5.0] {
                let z = migdal_z(rank, 0, t, &Truncation::new(1e-13)).unwrap().value;
                let lz = sphere_log_partition_function(rank, t).unwrap();
                assert!((lz - z.ln()).abs() < 1e-9, "N={rank} t={t}: {lz} vs {}", z.ln());
            }
        }
        let th = theta(q_of_t(2.0), 1e-16).unwrap().value;
        assert!((sphere_log_partition_function(1, 2.0).unwrap() - th.ln()).abs() < 1e-12);
    }

    #[test]
    fn free_energy_settles_with_rank() {
        let f: Vec<f64> = [2, 4, 6, 8].iter().map(|&n| dk_free_energy(n, 5.0).unwrap()).collect();
        let gaps: Vec<f64> = f.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{f:?}");
    }

    #[test]
    fn scan_shape() {
        let s = dk_scan(6, &[1.0, 2.0]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].0, 1.0);
        assert!(dk_scan(0, &[1.0]).is_err());
    }
}
