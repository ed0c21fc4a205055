//! Integer partitions, Young-diagram functionals and q-uniform sampling.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{domain, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// The empty partition.
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Builds a partition, rejecting zero parts and increasing sequences.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return domain("partition parts must be positive");
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("partition parts must be nonincreasing: {parts:?}"));
        }
        Ok(Partition(parts))
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(parts.iter().all(|&p| p > 0));
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of cells, |α|.
    pub fn size(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    /// Number of parts, ℓ(α).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum over cells of (column − row), exact.
    ///
    /// Row i (1-based) contributes Σ_{j=1}^{α_i} (j − i) = α_i(α_i + 1)/2 − iα_i.
    pub fn total_content(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let p = p as i64;
                p * (p + 1) / 2 - (i as i64 + 1) * p
            })
            .sum()
    }

    /// The transposed Young diagram.
    pub fn conjugate(&self) -> Partition {
        let Some(&first) = self.0.first() else {
            return Partition::empty();
        };
        let conj = (1..=first)
            .map(|j| self.0.iter().take_while(|&&p| p >= j).count() as u32)
            .collect();
        Partition(conj)
    }

    /// Multiplicity m_j of part j, for j = 1..=max part (index j-1).
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.0.first().copied().unwrap_or(0) as usize];
        for &p in &self.0 {
            m[p as usize - 1] += 1;
        }
        m
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n`, optionally with at most `max_length` parts, in
/// decreasing lexicographic order.
pub fn enumerate_partitions(n: u32, max_length: Option<usize>) -> Vec<Partition> {
    let max_len = max_length.unwrap_or(n as usize);
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(max_len.min(n as usize));
    fill(n, n, max_len, &mut current, &mut out);
    out
}

fn fill(remaining: u32, max_part: u32, max_len: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    let slots = max_len - current.len();
    if slots == 0 || (max_part as u64) * (slots as u64) < remaining as u64 {
        return;
    }
    for p in (1..=max_part.min(remaining)).rev() {
        current.push(p);
        fill(remaining - p, p, max_len, current, out);
        current.pop();
    }
}

/// Calls `visit(parts, content)` for every partition of `n` with at most
/// `max_length` parts and largest part at most `max_part`, in decreasing
/// lexicographic order, without allocating per partition.
pub fn for_each_partition(n: u32, max_length: Option<usize>, max_part: Option<u32>, mut visit: impl FnMut(&[u32], i64)) {
    let max_len = max_length.unwrap_or(n as usize);
    let mut current = Vec::with_capacity(max_len.min(n as usize));
    walk(n, max_part.unwrap_or(n), max_len, 0, &mut current, &mut visit);
}

fn walk(remaining: u32, max_part: u32, max_len: usize, content: i64, current: &mut Vec<u32>, visit: &mut impl FnMut(&[u32], i64)) {
    if remaining == 0 {
        visit(current, content);
        return;
    }
    let slots = max_len - current.len();
    if slots == 0 || (max_part as u64) * (slots as u64) < remaining as u64 {
        return;
    }
    let row = current.len() as i64;
    for p in (1..=max_part.min(remaining)).rev() {
        let pi = p as i64;
        current.push(p);
        walk(remaining - p, p, max_len, content + pi * (pi - 1) / 2 - row * pi, current, visit);
        current.pop();
    }
}

/// Partition numbers p(0..=n_max) via Euler's pentagonal recurrence.
pub fn partition_counts(n_max: usize) -> Vec<u128> {
    let mut p = vec![0u128; n_max + 1];
    p[0] = 1;
    for n in 1..=n_max {
        let mut acc: i128 = 0;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let sign: i128 = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[n - g1] as i128;
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                acc += sign * p[n - g2] as i128;
            }
        }
        p[n] = acc as u128;
    }
    p
}

/// Sampler for the q-uniform measure U_q(α) = φ(q) q^{|α|}, restricted to
/// parts ≤ `cutoff`.
///
/// The multiplicity m_j of each part j is independent with
/// P(m_j = m) = (1 − q^j) q^{jm}.
#[derive(Debug, Clone)]
pub struct QUniformSampler {
    q: f64,
    cutoff: u32,
    seed: u64,
    rng: ChaCha8Rng,
    geometrics: Vec<Geometric>,
}

impl QUniformSampler {
    /// Chooses the smallest cutoff J whose ignored-part tail
    /// Σ_{j>J} q^j/(1−q^j) is bounded by `tail_tol`.
    pub fn new(q: f64, seed: u64, tail_tol: f64) -> Result<Self> {
        check_q(q)?;
        if !(tail_tol > 0.0) {
            return domain("tail tolerance must be positive");
        }
        let mut cutoff = 1u32;
        while tail_bound(q, cutoff) > tail_tol {
            cutoff += 1;
        }
        Self::with_cutoff(q, cutoff, seed)
    }

    pub fn with_cutoff(q: f64, cutoff: u32, seed: u64) -> Result<Self> {
        check_q(q)?;
        if cutoff == 0 {
            return domain("part cutoff must be positive");
        }
        let geometrics = (1..=cutoff)
            .map(|j| {
                let p = 1.0 - q.powi(j as i32);
                Geometric::new(p).map_err(|e| crate::Error::Domain(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            q,
            cutoff,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            geometrics,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Upper bound on the expected number of parts exceeding the cutoff,
    /// hence on the probability that the restriction changes a sample.
    pub fn tail_bound(&self) -> f64 {
        tail_bound(self.q, self.cutoff)
    }

    pub fn sample(&mut self) -> Partition {
        let mut parts = Vec::new();
        for j in (1..=self.cutoff).rev() {
            let m = self.geometrics[j as usize - 1].sample(&mut self.rng);
            parts.extend(std::iter::repeat_n(j, m as usize));
        }
        Partition(parts)
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q must lie in (0,1), got {q}"));
    }
    Ok(())
}

// Σ_{j>J} q^j/(1−q^j) ≤ q^{J+1} / ((1−q)(1−q^{J+1}))
fn tail_bound(q: f64, cutoff: u32) -> f64 {
    let qj = q.powi(cutoff as i32 + 1);
    qj / ((1.0 - q) * (1.0 - qj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    // brute-force content: walk every cell.
    fn content_by_cells(a: &Partition) -> i64 {
        let mut k = 0;
        for (row, &len) in a.parts().iter().enumerate() {
            for col in 0..len as i64 {
                k += col - row as i64;
            }
        }
        k
    }

    #[test]
    fn sizes() {
        assert_eq!(Partition::empty().size(), 0);
        assert_eq!(p(&[2, 1]).size(), 3);
        assert_eq!(p(&[7, 7, 6, 3, 1]).size(), 7 + 7 + 6 + 3 + 1);
    }

    #[test]
    fn contents() {
        assert_eq!(Partition::empty().total_content(), 0);
        assert_eq!(p(&[3]).total_content(), 3);
        assert_eq!(p(&[2, 1]).total_content(), 0);
        for n in 0..=9 {
            for a in enumerate_partitions(n, None) {
                assert_eq!(a.total_content(), content_by_cells(&a), "{a}");
            }
        }
    }

    #[test]
    fn conjugates() {
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(p(&[2, 1]).conjugate(), p(&[2, 1]));
        assert_eq!(p(&[3]).conjugate(), p(&[1, 1, 1]));
        assert_eq!(p(&[7, 7, 6, 3, 1]).conjugate(), p(&[5, 4, 4, 3, 3, 3, 2]));
    }

    #[test]
    fn rejects_invalid_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_partitions(0, None), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(5, None).len(), 7);
        assert_eq!(enumerate_partitions(4, Some(2)), vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]);
        assert_eq!(enumerate_partitions(3, Some(0)), vec![]);
    }

    #[test]
    fn enumeration_is_decreasing_lex_and_distinct() {
        for n in 1..=12 {
            let all = enumerate_partitions(n, None);
            for w in all.windows(2) {
                assert!(w[0].parts() > w[1].parts());
            }
        }
    }

    #[test]
    fn streaming_visitor_matches_enumeration() {
        for n in 0..=14 {
            for len in [None, Some(3)] {
                let mut seen = Vec::new();
                for_each_partition(n, len, None, |parts, k| {
                    let p = Partition::new(parts.to_vec()).unwrap();
                    assert_eq!(p.total_content(), k);
                    seen.push(p);
                });
                assert_eq!(seen, enumerate_partitions(n, len));
            }
        }
        let mut count = 0;
        for_each_partition(10, None, Some(3), |parts, _| {
            assert!(parts[0] <= 3);
            count += 1;
        });
        assert_eq!(count, enumerate_partitions(10, None).iter().filter(|p| p.parts()[0] <= 3).count());
    }

    #[test]
    fn counts_match_pentagonal_recurrence() {
        let counts = partition_counts(12);
        for n in 0..=12u32 {
            assert_eq!(enumerate_partitions(n, None).len() as u128, counts[n as usize]);
        }
        assert_eq!(partition_counts(100)[100], 190_569_292);
    }

    #[test]
    fn length_bound_is_a_filter() {
        for n in 0..=12 {
            for l in 1..=5 {
                let filtered: Vec<_> = enumerate_partitions(n, None).into_iter().filter(|a| a.len() <= l).collect();
                assert_eq!(enumerate_partitions(n, Some(l)), filtered);
            }
        }
    }

    #[test]
    fn content_antisymmetric_under_conjugation() {
        for n in 0..=12 {
            let all = enumerate_partitions(n, None);
            let mut total = 0;
            for a in &all {
                assert_eq!(a.conjugate().total_content(), -a.total_content());
                assert_eq!(a.conjugate().conjugate(), *a);
                total += a.total_content();
            }
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn sampler_rejects_bad_q() {
        assert!(QUniformSampler::new(0.0, 1, 1e-9).is_err());
        assert!(QUniformSampler::new(1.0, 1, 1e-9).is_err());
        assert!(QUniformSampler::new(-0.2, 1, 1e-9).is_err());
    }

    #[test]
    fn sampler_cutoff_meets_tail_tolerance() {
        let s = QUniformSampler::new(0.3, 7, 1e-12).unwrap();
        assert!(s.tail_bound() <= 1e-12);
        let direct: f64 = ((s.cutoff() + 1)..200).map(|j| 0.3f64.powi(j as i32) / (1.0 - 0.3f64.powi(j as i32))).sum();
        assert!(direct <= s.tail_bound());
    }

    #[test]
    fn sampler_is_deterministic() {
        let mut a = QUniformSampler::new(0.5, 42, 1e-10).unwrap();
        let mut b = QUniformSampler::new(0.5, 42, 1e-10).unwrap();
        for _ in 0..1000 {
            assert_eq!(a.sample(), b.sample());
        }
    }

    #[test]
    fn tiny_q_gives_empty_partitions() {
        let mut s = QUniformSampler::new(1e-12, 3, 1e-10).unwrap();
        assert!((0..10_000).all(|_| s.sample().is_empty()));
    }

    #[test]
    fn sampler_moments_match_series() {
        let q: f64 = 0.3;
        let samples = 100_000;
        let mut s = QUniformSampler::new(q, 2024, 1e-14).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut empty = 0usize;
        for _ in 0..samples {
            let a = s.sample();
            let k = a.size() as f64;
            sum += k;
            sum_sq += k * k;
            if a.is_empty() {
                empty += 1;
            }
        }
        let n = samples as f64;
        let mean = sum / n;
        let sd = (sum_sq / n - mean * mean).sqrt();
        // oracle: E|α| = Σ_j j q^j / (1 − q^j)
        let expected: f64 = (1..200).map(|j| j as f64 * q.powi(j) / (1.0 - q.powi(j))).sum();
        assert!((mean - expected).abs() < 3.0 * sd / n.sqrt(), "{mean} vs {expected}");

        // oracle: P(∅) = φ(q) by direct product
        let phi: f64 = (1..200).map(|m| 1.0 - q.powi(m)).product();
        let p_hat = empty as f64 / n;
        let se = (phi * (1.0 - phi) / n).sqrt();
        assert!((p_hat - phi).abs() < 3.0 * se, "{p_hat} vs {phi}");
    }
}
