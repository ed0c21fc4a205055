//! Heat kernels on U(1) and SU(2) and Monte Carlo estimates of the discrete
//! Yang–Mills measure on a map.
//!
//! Each sample draws i.i.d. Haar elements on the edges and is weighted by
//! ∏_f p_{|f|}(holonomy of ∂f). Sample i uses its own ChaCha8 stream, and
//! partial sums are merged in a fixed order, so estimates do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::groups::{commutator, su2_character, GroupElement, Su2, U1};
use crate::maps::{holonomy, CombinatorialMap, LoopWord};
use crate::quadrature::integrate;
use crate::summation::CompensatedSum;

/// Heat-kernel times below this are rejected: the character series converges
/// too slowly.
pub const DEFAULT_T_MIN: f64 = 0.2;

/// Default relative truncation tolerance for heat-kernel series.
pub const DEFAULT_HEAT_TOL: f64 = 1e-14;

const CHUNK: usize = 4096;

/// Groups with a closed-form character series for the heat kernel.
pub trait HeatKernel: GroupElement {
    /// p_t(x) = Σ_λ e^{−t c₂(λ)/2} d_λ χ_λ(x), truncated once the next
    /// term bound e^{−t c₂/2} d² drops below `tol` times the partial sum.
    fn heat_kernel(t: f64, x: &Self, tol: f64) -> f64;
}

impl HeatKernel for U1 {
    fn heat_kernel(t: f64, x: &Self, tol: f64) -> f64 {
        let mut sum = CompensatedSum::new();
        sum += 1.0;
        for n in 1.. {
            let w = (-t * (n * n) as f64 / 2.0).exp();
            sum += 2.0 * w * (n as f64 * x.angle()).cos();
            let next = (-t * ((n + 1) * (n + 1)) as f64 / 2.0).exp();
            if 2.0 * next <= tol * sum.value().abs() || next == 0.0 {
                break;
            }
        }
        sum.value()
    }
}

/// The SU(2) Casimir of the weight (m, 0): c₂^U = (m² + m)/2 and
/// (Σλ)²/N² = m²/4, so c₂ = (m² + 2m)/4.
pub fn su2_casimir(m: u32) -> f64 {
    let m = m as f64;
    (m * m + 2.0 * m) / 4.0
}

impl HeatKernel for Su2 {
    fn heat_kernel(t: f64, x: &Self, tol: f64) -> f64 {
        let c = x.quaternion()[0];
        let mut sum = CompensatedSum::new();
        let (mut u0, mut u1) = (1.0, 2.0 * c);
        for m in 0u32.. {
            let chi = if m == 0 { 1.0 } else { u1 };
            let d = (m + 1) as f64;
            sum += (-t * su2_casimir(m) / 2.0).exp() * d * chi;
            if m >= 1 {
                let u2 = 2.0 * c * u1 - u0;
                u0 = u1;
                u1 = u2;
            }
            let dn = (m + 2) as f64;
            let bound = (-t * su2_casimir(m + 1) / 2.0).exp() * dn * dn;
            if bound <= tol * sum.value().abs() || bound == 0.0 {
                break;
            }
        }
        sum.value()
    }
}

/// Heat kernel p_t(x) with the t_min guard.
pub fn heat_kernel_eval<G: HeatKernel>(t: f64, x: &G, tol: f64, t_min: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("heat kernel time t = {t} must be positive"));
    }
    if t < t_min {
        return Err(Error::SlowConvergence { t, t_min });
    }
    Ok(G::heat_kernel(t, x, tol))
}

/// Σ_{m≥0} e^{−t c₂(m)/2} (m+1)^{2−2g}, the SU(2) partition function.
pub fn su2_partition_function(genus: u32, t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let mut sum = CompensatedSum::new();
    for m in 0u32.. {
        let d = (m + 1) as f64;
        let term = (-t * su2_casimir(m) / 2.0).exp() * d.powi(2 - 2 * genus as i32);
        sum += term;
        if m > 0 && term <= tol * sum.value() {
            break;
        }
    }
    Ok(sum.value())
}

/// Sample mean with standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by √samples.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Self-normalised estimate Σ wᵢ yᵢ / Σ wᵢ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonEstimate {
    pub mean: f64,
    /// Delta-method standard error of the ratio.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    /// (Σ w)² / Σ w².
    pub effective_sample_size: f64,
    /// Set when the effective sample size is below 1% of the samples.
    pub degenerate: bool,
}

/// Settings shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
    pub heat_tol: f64,
    pub t_min: f64,
}

impl McOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            heat_tol: DEFAULT_HEAT_TOL,
            t_min: DEFAULT_T_MIN,
        }
    }
}

/// The generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

// Sums of f(sample) components over all samples, in a fixed chunk order.
fn sample_sums<const K: usize>(samples: usize, f: impl Fn(usize) -> [f64; K] + Sync) -> [CompensatedSum; K]
where
    [CompensatedSum; K]: Default,
{
    let chunks: Vec<[CompensatedSum; K]> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc: [CompensatedSum; K] = Default::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                for (a, v) in acc.iter_mut().zip(f(i)) {
                    *a += v;
                }
            }
            acc
        })
        .collect();
    let mut total: [CompensatedSum; K] = Default::default();
    for c in &chunks {
        for (t, v) in total.iter_mut().zip(c) {
            t.merge(v);
        }
    }
    total
}

fn mean_estimate(samples: usize, seed: u64, f: impl Fn(usize) -> f64 + Sync) -> McEstimate {
    // shifted by the first sample so a constant integrand has zero spread
    let shift = f(0);
    let [s, s2] = sample_sums(samples, |i| {
        let y = f(i) - shift;
        [y, y * y]
    });
    let n = samples as f64;
    let centred = s.value() / n;
    let mean = shift + centred;
    let var = if samples > 1 {
        ((s2.value() - n * centred * centred) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_error: (var / n).sqrt(),
        samples,
        seed,
    }
}

fn check_areas(map: &CombinatorialMap, t_total: f64, areas: &[f64], t_min: f64) -> Result<()> {
    if areas.len() != map.face_count() {
        return domain(format!("{} face areas given for {} faces", areas.len(), map.face_count()));
    }
    if areas.iter().any(|&a| !(a > 0.0)) {
        return domain("face areas must be positive");
    }
    let total: f64 = areas.iter().sum();
    if (total - t_total).abs() > 1e-9 * t_total.abs().max(1.0) {
        return domain(format!("face areas sum to {total}, expected {t_total}"));
    }
    if let Some(&a) = areas.iter().find(|&&a| a < t_min) {
        return Err(Error::SlowConvergence { t: a, t_min });
    }
    Ok(())
}

/// Haar-distributed edge variables for one sample.
pub fn sample_connection<G: GroupElement>(map: &CombinatorialMap, seed: u64, index: u64) -> Vec<G> {
    let mut rng = sample_rng(seed, index);
    (0..map.edge_count()).map(|_| G::haar(&mut rng)).collect()
}

fn face_weight<G: HeatKernel>(map: &CombinatorialMap, areas: &[f64], omega: &[G], tol: f64) -> f64 {
    map.faces()
        .iter()
        .zip(areas)
        .map(|(face, &a)| {
            let h = holonomy(face, omega).expect("assignment covers every edge");
            G::heat_kernel(a, &h, tol)
        })
        .product()
}

/// Estimates Z = ∫ ∏_f p_{|f|}(holonomy of ∂f) dω.
pub fn estimate_z<G: HeatKernel>(map: &CombinatorialMap, t_total: f64, areas: &[f64], opts: &McOptions) -> Result<McEstimate> {
    check_areas(map, t_total, areas, opts.t_min)?;
    if opts.samples == 0 {
        return domain("need at least one sample");
    }
    Ok(mean_estimate(opts.samples, opts.seed, |i| {
        let omega: Vec<G> = sample_connection(map, opts.seed, i as u64);
        face_weight(map, areas, &omega, opts.heat_tol)
    }))
}

/// Estimates the Wilson loop expectation E[Re tr h_ℓ] with tr = Tr/N.
pub fn estimate_wilson<G: HeatKernel>(
    map: &CombinatorialMap,
    t_total: f64,
    areas: &[f64],
    loop_word: &LoopWord,
    opts: &McOptions,
) -> Result<WilsonEstimate> {
    wilson_impl::<G>(map, t_total, areas, loop_word, opts, false)
}

/// As [`estimate_wilson`], with every sample acted on by an independent
/// Haar-random gauge transformation before evaluation.
pub fn estimate_wilson_gauged<G: HeatKernel>(
    map: &CombinatorialMap,
    t_total: f64,
    areas: &[f64],
    loop_word: &LoopWord,
    opts: &McOptions,
) -> Result<WilsonEstimate> {
    wilson_impl::<G>(map, t_total, areas, loop_word, opts, true)
}

fn wilson_impl<G: HeatKernel>(
    map: &CombinatorialMap,
    t_total: f64,
    areas: &[f64],
    loop_word: &LoopWord,
    opts: &McOptions,
    gauged: bool,
) -> Result<WilsonEstimate> {
    check_areas(map, t_total, areas, opts.t_min)?;
    if opts.samples == 0 {
        return domain("need at least one sample");
    }
    LoopWord::new(map, loop_word.base(), loop_word.steps().to_vec())?;
    let gauge_seed = opts.seed ^ 0x9e37_79b9_7f4a_7c15;
    let sample = |i: usize| {
        let mut omega: Vec<G> = sample_connection(map, opts.seed, i as u64);
        if gauged {
            let mut rng = sample_rng(gauge_seed, i as u64);
            let j: Vec<G> = (0..map.vertex_count()).map(|_| G::haar(&mut rng)).collect();
            omega = crate::maps::gauge_transform(map, &omega, &j).expect("sizes match");
        }
        let w = face_weight(map, areas, &omega, opts.heat_tol);
        let y = holonomy(loop_word.steps(), &omega).expect("loop lies in the map").normalized_trace().re;
        (w, y)
    };
    let shift = sample(0).1;
    let [sw, swy, sw2, sw2y, sw2y2] = sample_sums(opts.samples, |i| {
        let (w, y) = sample(i);
        let y = y - shift;
        [w, w * y, w * w, w * w * y, w * w * y * y]
    });
    let (sw, swy, sw2, sw2y, sw2y2) = (sw.value(), swy.value(), sw2.value(), sw2y.value(), sw2y2.value());
    let centred = swy / sw;
    let mean = shift + centred;
    let spread = (sw2y2 - 2.0 * centred * sw2y + centred * centred * sw2).max(0.0);
    let ess = sw * sw / sw2;
    Ok(WilsonEstimate {
        mean,
        std_error: spread.sqrt() / sw,
        samples: opts.samples,
        seed: opts.seed,
        effective_sample_size: ess,
        degenerate: ess < 0.01 * opts.samples as f64,
    })
}

/// One line of [`verify_character_identities`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub expected: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn mc_check(name: String, est: McEstimate, expected: f64) -> IdentityCheck {
    IdentityCheck {
        passed: (est.mean - expected).abs() <= 3.0 * est.std_error + 1e-12,
        name,
        estimate: est.mean,
        std_error: est.std_error,
        expected,
    }
}

/// ∫_0^π χ_m χ_n (2/π) sin²θ dθ by Gauss–Legendre quadrature.
pub fn su2_character_pairing(m: u32, n: u32) -> f64 {
    integrate(
        |th| su2_character(m, th.cos()) * su2_character(n, th.cos()) * 2.0 / std::f64::consts::PI * th.sin().powi(2),
        0.0,
        std::f64::consts::PI,
        64,
    )
}

/// Monte Carlo checks on SU(2), for χ_m with m ≤ 3:
/// ∫ χ(x g y g⁻¹) dg = χ(x)χ(y)/d and ∫ χ([x₁,y₁]⋯[x_g,y_g]) = d^{1−2g}
/// for g ≤ 2, each within 3 standard errors, plus orthonormality of the
/// characters by quadrature to 1e-8.
pub fn verify_character_identities(samples: usize, seed: u64) -> Result<IdentityReport> {
    if samples < 2 {
        return domain("need at least two samples");
    }
    let mut checks = Vec::new();
    let mut fixed = sample_rng(seed, u64::MAX);
    let x = Su2::haar(&mut fixed);
    let y = Su2::haar(&mut fixed);
    let cos = |g: &Su2| g.quaternion()[0];
    for m in 0..=3u32 {
        let stream = (1u64 << 40) * (m as u64 + 1);
        let est = mean_estimate(samples, seed, |i| {
            let mut rng = sample_rng(seed, stream + i as u64);
            let g = Su2::haar(&mut rng);
            su2_character(m, cos(&x.mul(&g).mul(&y).mul(&g.inverse())))
        });
        let expected = su2_character(m, cos(&x)) * su2_character(m, cos(&y)) / (m + 1) as f64;
        checks.push(mc_check(format!("adjoint orbit integral, m = {m}"), est, expected));
    }
    for genus in 1..=2u32 {
        for m in 0..=3u32 {
            let stream = (1u64 << 44) * genus as u64 + (1u64 << 40) * (m as u64 + 1);
            let est = mean_estimate(samples, seed, |i| {
                let mut rng = sample_rng(seed, stream + i as u64);
                let mut h = Su2::identity();
                for _ in 0..genus {
                    let a = Su2::haar(&mut rng);
                    let b = Su2::haar(&mut rng);
                    h = h.mul(&commutator(&a, &b));
                }
                su2_character(m, cos(&h))
            });
            let expected = ((m + 1) as f64).powi(1 - 2 * genus as i32);
            checks.push(mc_check(format!("commutator integral, genus {genus}, m = {m}"), est, expected));
        }
    }
    for m in 0..=3u32 {
        for n in 0..=3u32 {
            let v = su2_character_pairing(m, n);
            let expected = if m == n { 1.0 } else { 0.0 };
            checks.push(IdentityCheck {
                name: format!("character orthogonality, m = {m}, n = {n}"),
                estimate: v,
                std_error: 0.0,
                expected,
                passed: (v - expected).abs() < 1e-8,
            });
        }
    }
    Ok(IdentityReport { checks })
}
