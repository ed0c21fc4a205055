//! Highest weights of U(N) and SU(N).
//!
//! Dimensions and Casimirs are exact (big integers and rationals). The
//! Casimir uses the inner product ⟨X, Y⟩ = N Tr(X*Y) on u(N):
//!
//! ```text
//! c₂(λ) = (1/N) (Σ λ_i² + Σ_{i<j} (λ_i − λ_j))
//! ```
//!
//! Besides the raw coordinates, a weight can be written as λ_N(α, β, n):
//! two partitions glued to the top and bottom of the constant weight
//! (n, …, n), with ℓ(α) ≤ A_N = ⌊(N+1)/2⌋ − 1 and ℓ(β) ≤ B_N = N − ⌊(N+1)/2⌋.

use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use crate::almost_flat::AlmostFlatEnumerator;
use crate::error::{domain, Result};
use crate::partitions::Partition;

/// A nonincreasing integer N-tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HighestWeight {
    coeffs: Vec<i64>,
}

impl HighestWeight {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("a highest weight needs N ≥ 1 coordinates");
        }
        if coeffs.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("highest weight must be nonincreasing: {coeffs:?}"));
        }
        Ok(Self { coeffs })
    }

    /// The constant weight (n, …, n).
    pub fn constant(rank: usize, n: i64) -> Self {
        assert!(rank >= 1);
        Self { coeffs: vec![n; rank] }
    }

    pub(crate) fn from_coeffs_unchecked(coeffs: Vec<i64>) -> Self {
        debug_assert!(!coeffs.is_empty() && coeffs.windows(2).all(|w| w[0] >= w[1]));
        Self { coeffs }
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn total(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// λ + n(1, …, 1).
    pub fn shifted(&self, n: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c + n).collect(),
        }
    }

    /// Weyl dimension ∏_{i<j} (λ_i − λ_j + j − i)/(j − i), exact.
    pub fn weyl_dimension(&self) -> BigUint {
        match dimension_u128(&self.coeffs) {
            Some(d) => BigUint::from(d),
            None => dimension_big(&self.coeffs),
        }
    }

    /// Weyl dimension as a float, computed exactly and rounded once.
    pub fn weyl_dimension_f64(&self) -> f64 {
        match dimension_u128(&self.coeffs) {
            Some(d) => d as f64,
            None => dimension_big(&self.coeffs).to_f64().unwrap_or(f64::INFINITY),
        }
    }

    /// N·c₂(λ) as an exact integer.
    pub fn casimir_numerator(&self) -> i64 {
        let n = self.rank() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &l)| l * l + l * (n + 1 - 2 * (i as i64 + 1)))
            .sum()
    }

    /// U(N) Casimir for the inner product N Tr(X*Y).
    pub fn casimir_u(&self) -> Rational64 {
        Rational64::new(self.casimir_numerator(), self.rank() as i64)
    }

    /// SU(N) Casimir: c₂^U(λ) − (Σ λ_i)²/N².
    pub fn casimir_su(&self) -> Rational64 {
        let n = self.rank() as i64;
        let s = self.total();
        self.casimir_u() - Rational64::new(s * s, n * n)
    }
}

impl fmt::Display for HighestWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

// After processing column j the running product is the dimension of the
// U(j+1) weight (λ_0, …, λ_j), so each division by j! is exact.
fn dimension_u128(l: &[i64]) -> Option<u128> {
    let mut d: u128 = 1;
    for j in 1..l.len() {
        for i in 0..j {
            let factor = (l[i] - l[j] + (j - i) as i64) as u128;
            d = d.checked_mul(factor)?;
        }
        d /= factorial_u128(j)?;
    }
    Some(d)
}

fn dimension_big(l: &[i64]) -> BigUint {
    let mut d = BigUint::one();
    for j in 1..l.len() {
        for i in 0..j {
            d *= BigUint::from((l[i] - l[j] + (j - i) as i64) as u64);
        }
        let mut fact = BigUint::one();
        for k in 2..=j as u64 {
            fact *= k;
        }
        d /= fact;
    }
    d
}

fn factorial_u128(n: usize) -> Option<u128> {
    (2..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// A_N = ⌊(N+1)/2⌋ − 1, the largest admissible ℓ(α).
pub fn alpha_cutoff(rank: usize) -> usize {
    (rank + 1) / 2 - 1
}

/// B_N = N − ⌊(N+1)/2⌋, the largest admissible ℓ(β).
pub fn beta_cutoff(rank: usize) -> usize {
    rank - (rank + 1) / 2
}

/// Shift-to-partition parametrisation λ = Φ_N(α, n): λ_i = α_i + n.
pub fn phi_bijection(alpha: &Partition, n: i64, rank: usize) -> Result<HighestWeight> {
    if rank == 0 {
        return domain("rank must be positive");
    }
    if alpha.len() >= rank {
        return domain(format!("ℓ(α) = {} must be at most N − 1 = {}", alpha.len(), rank - 1));
    }
    let mut coeffs = vec![n; rank];
    for (c, &a) in coeffs.iter_mut().zip(alpha.parts()) {
        *c += a as i64;
    }
    Ok(HighestWeight::from_coeffs_unchecked(coeffs))
}

/// Inverse of [`phi_bijection`]: n = λ_N and α_i = λ_i − λ_N.
pub fn phi_inverse(w: &HighestWeight) -> (Partition, i64) {
    let n = *w.coeffs.last().expect("nonempty");
    let parts = w
        .coeffs
        .iter()
        .map(|&c| (c - n) as u32)
        .take_while(|&p| p > 0)
        .collect();
    (Partition::from_parts_unchecked(parts), n)
}

/// A point (α, β, n) of Λ_N.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TripleABN {
    alpha: Partition,
    beta: Partition,
    n: i64,
    rank: usize,
}

impl TripleABN {
    pub fn new(alpha: Partition, beta: Partition, n: i64, rank: usize) -> Result<Self> {
        if rank == 0 {
            return domain("rank must be positive");
        }
        if alpha.len() > alpha_cutoff(rank) {
            return domain(format!("ℓ(α) = {} exceeds A_N = {}", alpha.len(), alpha_cutoff(rank)));
        }
        if beta.len() > beta_cutoff(rank) {
            return domain(format!("ℓ(β) = {} exceeds B_N = {}", beta.len(), beta_cutoff(rank)));
        }
        Ok(Self { alpha, beta, n, rank })
    }

    pub fn alpha(&self) -> &Partition {
        &self.alpha
    }

    pub fn beta(&self) -> &Partition {
        &self.beta
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

pub(crate) fn glue(alpha: &[u32], beta: &[u32], n: i64, rank: usize) -> Vec<i64> {
    let mut coeffs = vec![n; rank];
    for (c, &a) in coeffs.iter_mut().zip(alpha) {
        *c += a as i64;
    }
    for (c, &b) in coeffs.iter_mut().rev().zip(beta) {
        *c -= b as i64;
    }
    coeffs
}

/// λ_N(α, β, n) = (α_1+n, …, α_ℓ+n, n, …, n, n−β_ℓ', …, n−β_1).
pub fn lambda_bijection(t: &TripleABN) -> HighestWeight {
    HighestWeight::from_coeffs_unchecked(glue(t.alpha.parts(), t.beta.parts(), t.n, t.rank))
}

/// Inverse of [`lambda_bijection`]: n = λ_{⌊(N+1)/2⌋}.
pub fn lambda_inverse(w: &HighestWeight) -> TripleABN {
    let rank = w.rank();
    let middle = (rank + 1) / 2 - 1;
    let n = w.coeffs[middle];
    let alpha = w.coeffs[..middle]
        .iter()
        .map(|&c| (c - n) as u32)
        .take_while(|&p| p > 0)
        .collect();
    let beta = w.coeffs[middle + 1..]
        .iter()
        .rev()
        .map(|&c| (n - c) as u32)
        .take_while(|&p| p > 0)
        .collect();
    TripleABN {
        alpha: Partition::from_parts_unchecked(alpha),
        beta: Partition::from_parts_unchecked(beta),
        n,
        rank,
    }
}

/// N·c₂ from the almost-flat coordinates:
/// N(|α|+|β|+n²) + 2(K(α)+K(β)+n(|α|−|β|)).
pub(crate) fn casimir_numerator_from_parts(a: i64, ka: i64, b: i64, kb: i64, n: i64, rank: usize) -> i64 {
    let rank = rank as i64;
    rank * (a + b + n * n) + 2 * (ka + kb + n * (a - b))
}

/// c₂(λ_N(α, β, n)) = |α| + |β| + n² + (2/N)(K(α) + K(β) + n(|α| − |β|)).
pub fn casimir_via_triple(t: &TripleABN) -> Rational64 {
    let num = casimir_numerator_from_parts(
        t.alpha.size() as i64,
        t.alpha.total_content(),
        t.beta.size() as i64,
        t.beta.total_content(),
        t.n,
        t.rank,
    );
    Rational64::new(num, t.rank as i64)
}

/// Every U(N) highest weight with c₂ ≤ `casimir_cap`, in a deterministic order.
pub fn enumerate_highest_weights(rank: usize, casimir_cap: f64) -> Result<Vec<HighestWeight>> {
    if rank == 0 {
        return domain("rank must be positive");
    }
    if !(casimir_cap >= 0.0) {
        return domain("Casimir cap must be nonnegative");
    }
    let mut e = AlmostFlatEnumerator::new(rank);
    let mut out: Vec<HighestWeight> = e.fold_shell(
        None,
        casimir_cap,
        false,
        |acc: &mut Vec<HighestWeight>, term| acc.push(term.highest_weight()),
    );
    out.sort_by(|x, y| {
        x.casimir_numerator()
            .cmp(&y.casimir_numerator())
            .then_with(|| y.coeffs.cmp(&x.coeffs))
    });
    Ok(out)
}

/// Value of a Schur function on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurValue {
    pub value: Complex64,
    /// Eigenvalue angles were closer than the conditioning threshold, so the
    /// bialternant was replaced by the Jacobi–Trudi determinant.
    pub ill_conditioned: bool,
}

/// Minimum circular gap between eigenvalue angles below which the
/// bialternant quotient is not used.
pub const SCHUR_GAP_THRESHOLD: f64 = 1e-6;

/// χ_λ(U) = s_λ(e^{iθ_1}, …, e^{iθ_N}).
pub fn schur_eval(w: &HighestWeight, angles: &[f64]) -> Result<SchurValue> {
    let rank = w.rank();
    if angles.len() != rank {
        return domain(format!("expected {rank} eigenvalue angles, got {}", angles.len()));
    }
    let xs: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    match rank {
        1 => Ok(SchurValue {
            value: complex_pow(xs[0], w.coeffs[0]),
            ill_conditioned: false,
        }),
        2 => {
            // (x₁x₂)^{λ₂} h_{λ₁−λ₂}(x₁, x₂)
            let m = (w.coeffs[0] - w.coeffs[1]) as usize;
            let mut h = Complex64::zero();
            for k in 0..=m {
                h += complex_pow(xs[0], k as i64) * complex_pow(xs[1], (m - k) as i64);
            }
            Ok(SchurValue {
                value: complex_pow(xs[0] * xs[1], w.coeffs[1]) * h,
                ill_conditioned: false,
            })
        }
        _ => {
            if min_circular_gap(angles) < SCHUR_GAP_THRESHOLD {
                Ok(SchurValue {
                    value: schur_jacobi_trudi(w, &xs),
                    ill_conditioned: true,
                })
            } else {
                Ok(SchurValue {
                    value: schur_bialternant(w, &xs),
                    ill_conditioned: false,
                })
            }
        }
    }
}

fn min_circular_gap(angles: &[f64]) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut gap = f64::INFINITY;
    for i in 0..angles.len() {
        for j in i + 1..angles.len() {
            let d = (angles[i] - angles[j]).rem_euclid(tau);
            gap = gap.min(d.min(tau - d));
        }
    }
    gap
}

fn complex_pow(x: Complex64, k: i64) -> Complex64 {
    if k >= 0 {
        x.powu(k as u32)
    } else {
        x.inv().powu((-k) as u32)
    }
}

/// det[x_i^{λ_j+N−j}] / det[x_i^{N−j}].
pub(crate) fn schur_bialternant(w: &HighestWeight, xs: &[Complex64]) -> Complex64 {
    let rank = xs.len();
    let num: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|&x| (0..rank).map(|j| complex_pow(x, w.coeffs[j] + (rank - 1 - j) as i64)).collect())
        .collect();
    let den: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|&x| (0..rank).map(|j| complex_pow(x, (rank - 1 - j) as i64)).collect())
        .collect();
    complex_det(num) / complex_det(den)
}

/// (x₁⋯x_N)^{λ_N} det[h_{μ_i − i + j}] with μ = λ − λ_N.
pub(crate) fn schur_jacobi_trudi(w: &HighestWeight, xs: &[Complex64]) -> Complex64 {
    let (mu, shift) = phi_inverse(w);
    let prod: Complex64 = xs.iter().product();
    let len = mu.len();
    if len == 0 {
        return complex_pow(prod, shift);
    }
    let max_k = mu.parts()[0] as usize + len;
    let h = complete_homogeneous(xs, max_k);
    let m: Vec<Vec<Complex64>> = (0..len)
        .map(|i| {
            (0..len)
                .map(|j| {
                    let k = mu.parts()[i] as i64 - i as i64 + j as i64;
                    if k < 0 {
                        Complex64::zero()
                    } else {
                        h[k as usize]
                    }
                })
                .collect()
        })
        .collect();
    complex_pow(prod, shift) * complex_det(m)
}

fn complete_homogeneous(xs: &[Complex64], max_k: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::zero(); max_k + 1];
    h[0] = Complex64::one();
    for &x in xs {
        for k in 1..=max_k {
            let prev = h[k - 1];
            h[k] += x * prev;
        }
    }
    h
}

fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..n {
            let f = m[row][col] / p;
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
        }
    }
    det
}
