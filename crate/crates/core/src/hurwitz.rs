//! Hurwitz numbers of degree-n torus coverings with 2k simple branch points.
//!
//! By the Frobenius formula H₁(n, 2k) = Σ_{α⊢n} K(α)^{2k}. The generating
//! series is F_k(q) = Σ_{n≥1} H₁(n, 2k) qⁿ. For k = 0 the count is p(n), the
//! number of unbranched coverings, so F₀ = 1/φ − 1.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::partitions::for_each_partition;
use crate::special::TruncatedValue;
use crate::summation::CompensatedSum;

/// Σ_{α⊢n} K(α)^r for r = 0..=r_max, exactly.
///
/// Fails with [`Error::TooLarge`] if a sum leaves the i128 range.
pub fn content_power_sums(n: u32, r_max: u32) -> Result<Vec<i128>> {
    if n == 0 {
        let mut v = vec![0i128; r_max as usize + 1];
        v[0] = 1;
        return Ok(v);
    }
    // split by the largest part; the remaining rows sit one row lower
    let parts: Vec<Option<Vec<i128>>> = (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut acc = vec![0i128; r_max as usize + 1];
            let mut ok = true;
            let head = (first as i64) * (first as i64 - 1) / 2;
            let rest_size = (n - first) as i64;
            for_each_partition(n - first, None, Some(first), |_, k_rest| {
                let k = (head + k_rest - rest_size) as i128;
                let mut pow = Some(1i128);
                for slot in acc.iter_mut() {
                    match pow.and_then(|p| slot.checked_add(p)) {
                        Some(v) => *slot = v,
                        None => ok = false,
                    }
                    pow = pow.and_then(|p| p.checked_mul(k));
                }
            });
            ok.then_some(acc)
        })
        .collect();
    let mut total = vec![0i128; r_max as usize + 1];
    for p in parts {
        let p = p.ok_or_else(|| Error::TooLarge(format!("content power sums overflow at n = {n}")))?;
        for (t, v) in total.iter_mut().zip(p) {
            *t = t
                .checked_add(v)
                .ok_or_else(|| Error::TooLarge(format!("content power sums overflow at n = {n}")))?;
        }
    }
    Ok(total)
}

/// H₁(n, 2k) = Σ_{α⊢n} K(α)^{2k}.
pub fn hurwitz_count(n: u32, k: u32) -> Result<BigUint> {
    if n == 0 {
        return domain("covering degree n must be at least 1");
    }
    match content_power_sums(n, 2 * k) {
        Ok(v) => Ok(BigUint::from(v[2 * k as usize] as u128)),
        Err(_) => {
            let mut total = BigUint::zero();
            for_each_partition(n, None, None, |_, c| {
                total += BigUint::from(c.unsigned_abs()).pow(2 * k);
            });
            Ok(total)
        }
    }
}

/// χ of a surface in ℋ₁(n, 2k): by Riemann–Hurwitz it has genus k + 1.
pub fn euler_characteristic_of_covering(n: u32, k: u32) -> Result<i64> {
    if n == 0 || (k > 0 && n < 2) {
        return domain(format!("no degree-{n} covering with {} branch points", 2 * k));
    }
    Ok(-2 * k as i64)
}

/// Largest degree accepted by [`monodromy_oracle`].
pub const ORACLE_MAX_DEGREE: u32 = 6;
/// Largest k accepted by [`monodromy_oracle`].
pub const ORACLE_MAX_K: u32 = 4;

/// #{(x, y, τ₁, …, τ_{2k}) ∈ S_n^{2+2k} : τ_i transpositions,
/// [x, y] τ₁⋯τ_{2k} = 1} / n!, counted exhaustively over S_n.
pub fn monodromy_oracle(n: u32, k: u32) -> Result<BigRational> {
    if n == 0 {
        return domain("covering degree n must be at least 1");
    }
    if n > ORACLE_MAX_DEGREE || k > ORACLE_MAX_K {
        return Err(Error::TooLarge(format!(
            "monodromy enumeration limited to n ≤ {ORACLE_MAX_DEGREE}, k ≤ {ORACLE_MAX_K} (got n = {n}, k = {k})"
        )));
    }
    let group = SymmetricGroup::new(n as usize);
    let size = group.elements.len();

    let mut commutators = vec![0u128; size];
    for x in 0..size {
        for y in 0..size {
            let c = group.mul(group.mul(x, y), group.mul(group.inverse[x], group.inverse[y]));
            commutators[c] += 1;
        }
    }

    // products of 2k transpositions
    let mut products = vec![0u128; size];
    products[group.identity] = 1;
    for _ in 0..2 * k {
        let mut next = vec![0u128; size];
        for (s, &c) in products.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &t in &group.transpositions {
                next[group.mul(s, t)] += c;
            }
        }
        products = next;
    }

    let tuples: u128 = (0..size).map(|s| commutators[s] * products[group.inverse[s]]).sum();
    Ok(BigRational::new(BigInt::from(tuples), BigInt::from(size as u128)))
}

struct SymmetricGroup {
    elements: Vec<Vec<u8>>,
    table: Vec<u16>,
    inverse: Vec<usize>,
    identity: usize,
    transpositions: Vec<usize>,
}

impl SymmetricGroup {
    fn new(n: usize) -> Self {
        let mut elements = Vec::new();
        permutations(&mut (0..n as u8).collect::<Vec<_>>(), 0, &mut elements);
        elements.sort();
        let index: HashMap<Vec<u8>, usize> = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let size = elements.len();
        let mut table = vec![0u16; size * size];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                // (a∘b)(x) = a(b(x))
                let c: Vec<u8> = b.iter().map(|&x| a[x as usize]).collect();
                table[i * size + j] = index[&c] as u16;
            }
        }
        let identity = index[&(0..n as u8).collect::<Vec<_>>()];
        let inverse = (0..size)
            .map(|i| (0..size).find(|&j| table[i * size + j] as usize == identity).unwrap())
            .collect();
        let transpositions = elements
            .iter()
            .enumerate()
            .filter(|(_, p)| p.iter().enumerate().filter(|&(i, &x)| i as u8 != x).count() == 2)
            .map(|(i, _)| i)
            .collect();
        Self {
            elements,
            table,
            inverse,
            identity,
            transpositions,
        }
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.elements.len() + b] as usize
    }
}

fn permutations(items: &mut Vec<u8>, start: usize, out: &mut Vec<Vec<u8>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

/// Truncated F_k(q) with stored exact coefficients H₁(n, 2k), n = 1..=n_max.
#[derive(Debug, Clone)]
pub struct FSeries {
    pub k: u32,
    pub q: f64,
    coefficients: Vec<BigUint>,
}

/// Builds F_k(q) = Σ_{n=1}^{n_max} H₁(n, 2k) qⁿ.
pub fn f_series(k: u32, q: f64, n_max: u32) -> Result<FSeries> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q = {q} must lie in (0, 1)"));
    }
    if n_max == 0 {
        return domain("n_max must be positive");
    }
    let coefficients = (1..=n_max).map(|n| hurwitz_count(n, k)).collect::<Result<Vec<_>>>()?;
    Ok(FSeries { k, q, coefficients })
}

impl FSeries {
    pub fn n_max(&self) -> u32 {
        self.coefficients.len() as u32
    }

    /// H₁(n, 2k), for 1 ≤ n ≤ n_max.
    pub fn coefficient(&self, n: u32) -> &BigUint {
        &self.coefficients[n as usize - 1]
    }

    pub fn value(&self) -> TruncatedValue {
        self.qdq(0)
    }

    /// (q d/dq)^ℓ F_k(q) = Σ_n n^ℓ H₁(n, 2k) qⁿ, truncated. The tail is the
    /// geometric extrapolation of the last two terms.
    pub fn qdq(&self, l: u32) -> TruncatedValue {
        let terms: Vec<f64> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let n = (i + 1) as f64;
                h.to_f64().unwrap_or(f64::INFINITY) * n.powi(l as i32) * self.q.powf(n)
            })
            .collect();
        let value = terms.iter().copied().sum::<CompensatedSum>().value();
        let tail = match terms.as_slice() {
            [.., a, b] if *a > 0.0 && b < a => b * (b / a) / (1.0 - b / a),
            [.., b] if *b == 0.0 => 0.0,
            _ => f64::INFINITY,
        };
        TruncatedValue {
            value,
            tail_bound: tail,
            terms_used: terms.len(),
            rigorous: false,
        }
    }
}

/// Σ_{n=1}^{n_max} e^{−tn/2} Σ_{k=0}^{k_max} t^{2k}/(2k)! · H₁(n, 2k).
///
/// The unrestricted measure has infinite mass, so only these restricted
/// masses are meaningful.
pub fn rho_mass(t: f64, n_max: u32, k_max: u32) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let mut total = CompensatedSum::new();
    for n in 1..=n_max {
        let damp = (-t * n as f64 / 2.0).exp();
        for_each_partition(n, None, None, |_, k| {
            let x = t * k as f64;
            let mut term = 1.0;
            let mut s = CompensatedSum::new();
            s += term;
            for j in 1..=k_max {
                let m = 2.0 * j as f64;
                term *= x * x / (m * (m - 1.0));
                s += term;
            }
            total += damp * s.value();
        });
    }
    Ok(total.value())
}

/// The k_max → ∞ limit of [`rho_mass`]: Σ_n e^{−tn/2} Σ_{α⊢n} cosh(t K(α)).
pub fn rho_mass_all_branchings(t: f64, n_max: u32) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let mut total = CompensatedSum::new();
    for n in 1..=n_max {
        let damp = (-t * n as f64 / 2.0).exp();
        for_each_partition(n, None, None, |_, k| total += damp * (t * k as f64).cosh());
    }
    Ok(total.value())
}
