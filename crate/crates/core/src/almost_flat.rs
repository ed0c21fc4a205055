//! Enumeration of U(N) highest weights by Casimir shells.
//!
//! Weights are visited as λ_N(α, β, n). Partitions of each size are kept in
//! tables sorted by content, so for a fixed pair of sizes (a, b) the scan over
//! (α, β) can stop as soon as the smallest reachable Casimir exceeds the cap.
//!
//! Pruning uses, for ℓ(α) ≤ A and |α| = a,
//!
//! ```text
//! a + 2K(α)/N ≥ a(1 − A/N) + a²/(AN)
//! ```
//!
//! (Cauchy–Schwarz on Σα_i² and Chebyshev's sum inequality on Σ iα_i), and
//! min_n N·c₂ = N(u_α + u_β) − (a − b)²/N with u_α = a + 2K(α)/N.

use rayon::prelude::*;

use crate::partitions::{enumerate_partitions, Partition};
use crate::summation::CompensatedSum;
use crate::unitary_reps::{alpha_cutoff, beta_cutoff, casimir_numerator_from_parts, glue, HighestWeight};

/// Partial results that can be combined in a fixed order.
pub(crate) trait Accumulate: Default + Send {
    fn merge(&mut self, other: Self);
}

impl<T: Send> Accumulate for Vec<T> {
    fn merge(&mut self, other: Self) {
        self.extend(other);
    }
}

impl Accumulate for CompensatedSum {
    fn merge(&mut self, other: Self) {
        CompensatedSum::merge(self, &other);
    }
}

impl<const K: usize> Accumulate for [CompensatedSum; K]
where
    [CompensatedSum; K]: Default,
{
    fn merge(&mut self, other: Self) {
        for (s, o) in self.iter_mut().zip(other.iter()) {
            s.merge(o);
        }
    }
}

trait Item: Sync + Send {
    fn content(&self) -> i64;
}

pub(crate) struct FullEntry {
    partition: Partition,
    content: i64,
}

impl Item for FullEntry {
    fn content(&self) -> i64 {
        self.content
    }
}

struct GroupEntry {
    content: i64,
    count: u64,
}

impl Item for GroupEntry {
    fn content(&self) -> i64 {
        self.content
    }
}

/// Partitions of each size with at most `max_len` parts, sorted by content.
struct Table {
    max_len: usize,
    full: Vec<Vec<FullEntry>>,
    grouped: Vec<Vec<GroupEntry>>,
}

impl Table {
    fn new(max_len: usize) -> Self {
        Self {
            max_len,
            full: Vec::new(),
            grouped: Vec::new(),
        }
    }

    fn ensure(&mut self, max_size: usize) {
        while self.full.len() <= max_size {
            let size = self.full.len() as u32;
            let mut level: Vec<FullEntry> = if size > 0 && self.max_len == 0 {
                Vec::new()
            } else {
                enumerate_partitions(size, Some(self.max_len))
                    .into_iter()
                    .map(|p| FullEntry {
                        content: p.total_content(),
                        partition: p,
                    })
                    .collect()
            };
            level.sort_by_key(|e| e.content);
            let mut grouped: Vec<GroupEntry> = Vec::new();
            for e in &level {
                match grouped.last_mut() {
                    Some(g) if g.content == e.content => g.count += 1,
                    _ => grouped.push(GroupEntry {
                        content: e.content,
                        count: 1,
                    }),
                }
            }
            self.full.push(level);
            self.grouped.push(grouped);
        }
    }
}

/// A weight visited during a shell scan.
pub(crate) struct Term<'a> {
    pub alpha: &'a Partition,
    pub beta: &'a Partition,
    pub n: i64,
    /// N·c₂(λ).
    pub casimir_numerator: i64,
    /// Weyl dimension, or NaN when not requested.
    pub dimension: f64,
    pub rank: usize,
}

impl Term<'_> {
    pub fn casimir(&self) -> f64 {
        self.casimir_numerator as f64 / self.rank as f64
    }

    pub fn highest_weight(&self) -> HighestWeight {
        HighestWeight::from_coeffs_unchecked(glue(self.alpha.parts(), self.beta.parts(), self.n, self.rank))
    }
}

/// All weights sharing (|α|, K(α), |β|, K(β), n), which have the same Casimir.
pub(crate) struct GroupedTerm {
    pub casimir_numerator: i64,
    pub multiplicity: u64,
    pub rank: usize,
}

impl GroupedTerm {
    pub fn casimir(&self) -> f64 {
        self.casimir_numerator as f64 / self.rank as f64
    }
}

pub(crate) struct AlmostFlatEnumerator {
    rank: usize,
    alphas: Table,
    betas: Table,
}

impl AlmostFlatEnumerator {
    pub fn new(rank: usize) -> Self {
        assert!(rank >= 1);
        Self {
            rank,
            alphas: Table::new(alpha_cutoff(rank)),
            betas: Table::new(beta_cutoff(rank)),
        }
    }

    fn size_bound(&self, size: f64, len: usize) -> f64 {
        if len == 0 {
            if size > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            let n = self.rank as f64;
            size * (1.0 - len as f64 / n) + size * size / (len as f64 * n)
        }
    }

    /// Lower bound on c₂ over all weights with |α| = a, |β| = b.
    fn pair_bound(&self, a: usize, b: usize) -> f64 {
        let n = self.rank as f64;
        let d = a as f64 - b as f64;
        self.size_bound(a as f64, self.alphas.max_len) + self.size_bound(b as f64, self.betas.max_len) - d * d / (n * n)
    }

    /// Size pairs (a, b) that can hold a weight with c₂ ≤ cap.
    fn size_pairs(&self, cap: f64) -> Vec<(usize, usize)> {
        let slack = 1e-9 * (1.0 + cap);
        // the bound is at least (a + b)/2
        let max_total = (2.0 * cap + 1.0).floor() as usize;
        let mut out = Vec::new();
        for a in 0..=max_total {
            for b in 0..=max_total - a {
                if self.pair_bound(a, b) <= cap + slack {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn thresholds(&self, lo: Option<f64>, hi: f64) -> (Option<i64>, i64) {
        let n = self.rank as f64;
        let x = |c: f64| (c * n + 1e-9 * (1.0 + c.abs() * n)).floor() as i64;
        (lo.map(x), x(hi))
    }

    /// Folds `visit` over every weight with lo < c₂ ≤ hi (c₂ ≤ hi when `lo` is
    /// `None`). Partial results are merged in a fixed order, so the outcome
    /// does not depend on the thread count.
    pub fn fold_shell<A, F>(&mut self, lo: Option<f64>, hi: f64, with_dimension: bool, visit: F) -> A
    where
        A: Accumulate,
        F: Fn(&mut A, &Term) + Sync,
    {
        let pairs = self.size_pairs(hi);
        self.ensure_tables(&pairs);
        let (lo_x, hi_x) = self.thresholds(lo, hi);
        let rank = self.rank;
        let parts: Vec<A> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let mut acc = A::default();
                scan_pair(
                    rank,
                    &self.alphas.full[a],
                    &self.betas.full[b],
                    a as i64,
                    b as i64,
                    lo_x,
                    hi_x,
                    |x, y| {
                        if with_dimension {
                            HighestWeight::from_coeffs_unchecked(glue(x.partition.parts(), y.partition.parts(), 0, rank))
                                .weyl_dimension_f64()
                        } else {
                            f64::NAN
                        }
                    },
                    |x, y, &dimension, n, num| {
                        visit(
                            &mut acc,
                            &Term {
                                alpha: &x.partition,
                                beta: &y.partition,
                                n,
                                casimir_numerator: num,
                                dimension,
                                rank,
                            },
                        )
                    },
                );
                acc
            })
            .collect();
        let mut total = A::default();
        for p in parts {
            total.merge(p);
        }
        total
    }

    /// Like [`fold_shell`](Self::fold_shell) but visits classes of weights with
    /// equal (|α|, K(α), |β|, K(β), n), weighted by their multiplicity.
    pub fn fold_shell_grouped<A, F>(&mut self, lo: Option<f64>, hi: f64, visit: F) -> A
    where
        A: Accumulate,
        F: Fn(&mut A, &GroupedTerm) + Sync,
    {
        let pairs = self.size_pairs(hi);
        self.ensure_tables(&pairs);
        let (lo_x, hi_x) = self.thresholds(lo, hi);
        let rank = self.rank;
        let parts: Vec<A> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let mut acc = A::default();
                scan_pair(
                    rank,
                    &self.alphas.grouped[a],
                    &self.betas.grouped[b],
                    a as i64,
                    b as i64,
                    lo_x,
                    hi_x,
                    |x, y| x.count * y.count,
                    |_, _, &multiplicity, _, num| {
                        visit(
                            &mut acc,
                            &GroupedTerm {
                                casimir_numerator: num,
                                multiplicity,
                                rank,
                            },
                        )
                    },
                );
                acc
            })
            .collect();
        let mut total = A::default();
        for p in parts {
            total.merge(p);
        }
        total
    }

    fn ensure_tables(&mut self, pairs: &[(usize, usize)]) {
        let max_a = pairs.iter().map(|p| p.0).max().unwrap_or(0);
        let max_b = pairs.iter().map(|p| p.1).max().unwrap_or(0);
        self.alphas.ensure(max_a);
        self.betas.ensure(max_b);
    }
}

/// Integer interval {n : N n² + 2 D n + C ≤ x}, if nonempty.
fn quadratic_range(rank: i64, d: i64, c: i64, x: i64) -> Option<(i64, i64)> {
    let f = |n: i64| rank as i128 * (n as i128) * (n as i128) + 2 * d as i128 * n as i128 + c as i128;
    let disc = (d as f64) * (d as f64) - rank as f64 * (c as f64 - x as f64);
    if disc < -1.0 {
        return None;
    }
    let s = disc.max(0.0).sqrt();
    let center = -(d as f64) / rank as f64;
    let mut lo = ((-(d as f64) - s) / rank as f64).ceil() as i64;
    let mut hi = ((-(d as f64) + s) / rank as f64).floor() as i64;
    let x = x as i128;
    while f(lo - 1) <= x {
        lo -= 1;
    }
    while lo <= hi && f(lo) > x {
        lo += 1;
    }
    while f(hi + 1) <= x {
        hi += 1;
    }
    while hi >= lo && f(hi) > x {
        hi -= 1;
    }
    if lo > hi {
        // the float roots may straddle an integer minimiser
        let m = center.round() as i64;
        return if f(m) <= x { Some((m, m)) } else { None };
    }
    Some((lo, hi))
}

#[allow(clippy::too_many_arguments)]
fn scan_pair<I: Item, P>(
    rank: usize,
    alphas: &[I],
    betas: &[I],
    a: i64,
    b: i64,
    lo_x: Option<i64>,
    hi_x: i64,
    pair: impl Fn(&I, &I) -> P,
    mut visit: impl FnMut(&I, &I, &P, i64, i64),
) {
    if alphas.is_empty() || betas.is_empty() {
        return;
    }
    let r = rank as i64;
    let d = a - b;
    // in units of N: N(u_α + u_β) − D²/N ≤ hi_x ⇔ N²(u_α + u_β) ≤ N hi_x + D²
    let budget = r as i128 * hi_x as i128 + (d as i128) * (d as i128);
    let scaled = |size: i64, content: i64| r as i128 * (r as i128 * size as i128 + 2 * content as i128);
    let beta_min = scaled(b, betas[0].content());
    for x in alphas {
        let ux = scaled(a, x.content());
        if ux + beta_min > budget {
            break;
        }
        for y in betas {
            let uy = scaled(b, y.content());
            if ux + uy > budget {
                break;
            }
            let c = r * (a + b) + 2 * (x.content() + y.content());
            let Some((n1, n2)) = quadratic_range(r, d, c, hi_x) else {
                continue;
            };
            let inner = lo_x.and_then(|lx| quadratic_range(r, d, c, lx));
            let mut cached: Option<P> = None;
            let mut emit = |n: i64| {
                let num = casimir_numerator_from_parts(a, x.content(), b, y.content(), n, rank);
                let p = cached.get_or_insert_with(|| pair(x, y));
                visit(x, y, p, n, num);
            };
            match inner {
                None => (n1..=n2).for_each(&mut emit),
                Some((m1, m2)) => {
                    (n1..m1.min(n2 + 1)).for_each(&mut emit);
                    ((m2 + 1).max(n1)..=n2).for_each(&mut emit);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_range_matches_scan() {
        for rank in 1..=7i64 {
            for d in -6..=6 {
                for c in -3..=20 {
                    for x in -5..=40 {
                        let f = |n: i64| rank * n * n + 2 * d * n + c;
                        let hits: Vec<i64> = (-30..=30).filter(|&n| f(n) <= x).collect();
                        let expected = hits.first().map(|&lo| (lo, *hits.last().unwrap()));
                        assert_eq!(quadratic_range(rank, d, c, x), expected, "{rank} {d} {c} {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn shells_partition_the_ball() {
        for rank in 1..=7 {
            let mut e = AlmostFlatEnumerator::new(rank);
            let mut ball: Vec<HighestWeight> = e.fold_shell(None, 9.0, false, |acc: &mut Vec<_>, t| acc.push(t.highest_weight()));
            let mut pieces: Vec<HighestWeight> = Vec::new();
            let caps = [0.0, 1.5, 2.0, 4.25, 7.0, 9.0];
            pieces.extend(e.fold_shell(None, caps[0], false, |acc: &mut Vec<_>, t| acc.push(t.highest_weight())));
            for w in caps.windows(2) {
                pieces.extend(e.fold_shell(Some(w[0]), w[1], false, |acc: &mut Vec<_>, t| acc.push(t.highest_weight())));
            }
            ball.sort();
            pieces.sort();
            assert_eq!(ball, pieces, "rank {rank}");
            let mut dedup = ball.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), ball.len());
        }
    }

    #[test]
    fn grouped_scan_counts_match_full_scan() {
        for rank in 1..=8 {
            let mut e = AlmostFlatEnumerator::new(rank);
            let full: Vec<i64> = e.fold_shell(Some(2.0), 8.0, false, |acc: &mut Vec<_>, t| acc.push(t.casimir_numerator));
            let grouped: Vec<(i64, u64)> =
                e.fold_shell_grouped(Some(2.0), 8.0, |acc: &mut Vec<_>, g| acc.push((g.casimir_numerator, g.multiplicity)));
            let mut a = full.clone();
            a.sort();
            let mut b: Vec<i64> = grouped
                .iter()
                .flat_map(|&(c, m)| std::iter::repeat(c).take(m as usize))
                .collect();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn visited_casimirs_match_direct_formula() {
        let mut e = AlmostFlatEnumerator::new(6);
        let ok: Vec<bool> = e.fold_shell(None, 6.0, true, |acc: &mut Vec<_>, t| {
            let w = t.highest_weight();
            acc.push(w.casimir_numerator() == t.casimir_numerator && w.weyl_dimension_f64() == t.dimension);
        });
        assert!(!ok.is_empty() && ok.iter().all(|&b| b));
    }
}
