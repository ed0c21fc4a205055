//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::Instant;

use ym2_core::groups::Su2;
use ym2_core::hurwitz::{hurwitz_count, monodromy_oracle};
use ym2_core::maps::{fundamental_map, two_face_torus};
use ym2_core::monte_carlo::{estimate_z, su2_partition_function, verify_character_identities, McOptions};
use ym2_core::partition_function::{
    coupling_rhs, gaussian_expectation, limit_g_1, limit_g_ge_2, migdal_z, torus_expansion, GaussianHWMeasure,
    TorusOptions, Truncation,
};
use ym2_core::partitions::enumerate_partitions;
use ym2_core::special::{q_of_t, theta, theta_qdq, witten_zeta_su};
use ym2_core::unitary_reps::{
    alpha_cutoff, beta_cutoff, casimir_via_triple, lambda_bijection, HighestWeight, TripleABN,
};

const SEED: u64 = 20_240_611;

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn u1_exactness() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut worst = 0.0f64;
    for g in 0..=3u32 {
        for t in [1.0, 2.0, 4.0] {
            let out = dir.path().join(format!("z_{g}_{t}.json"));
            let code = ym2_cli::run([
                "ym2",
                "z",
                "--N",
                "1",
                "--g",
                &g.to_string(),
                "--t",
                &t.to_string(),
                "--out",
                out.to_str().unwrap(),
            ]);
            if code != 0 {
                return ok(false, format!("exit code {code} at g={g} t={t}"));
            }
            let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
            let v = doc["value"].as_f64().unwrap();
            let th = theta(q_of_t(t), 1e-16).unwrap().value;
            worst = worst.max((v - th).abs());
        }
    }
    ok(worst < 1e-10, format!("max |Z - theta| = {worst:.3e}"))
}

fn casimir_identity() -> Outcome {
    let mut checked = 0u64;
    for rank in 1..=7usize {
        for size in 0..=6u32 {
            for a in 0..=size {
                let alphas = enumerate_partitions(a, Some(alpha_cutoff(rank)));
                let betas = enumerate_partitions(size - a, Some(beta_cutoff(rank)));
                for alpha in &alphas {
                    for beta in &betas {
                        for n in -3..=3 {
                            let t = TripleABN::new(alpha.clone(), beta.clone(), n, rank).unwrap();
                            if casimir_via_triple(&t) != lambda_bijection(&t).casimir_u() {
                                return ok(false, format!("mismatch at N={rank} alpha={alpha} beta={beta} n={n}"));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    ok(true, format!("{checked} triples"))
}

fn higher_genus_limit() -> Outcome {
    let th = limit_g_ge_2(2.0).unwrap();
    let tr = Truncation::new(1e-12);
    let res: Vec<f64> = [2, 3, 4, 6, 8]
        .iter()
        .map(|&n| (migdal_z(n, 2, 2.0, &tr).unwrap().value - th).abs())
        .collect();
    let decreasing = res.windows(2).all(|w| w[1] < w[0]);
    let last = *res.last().unwrap();
    ok(
        decreasing && last < 1e-3,
        format!("residuals {res:.4?}; decreasing={decreasing}, N=8 residual {last:.4e} (< 1e-3 required)"),
    )
}

fn torus_limit_and_expansion() -> Outcome {
    let a0 = limit_g_1(2.0).unwrap();
    let tr = Truncation::new(1e-13);
    let r4 = migdal_z(4, 1, 2.0, &tr).unwrap().value - a0;
    let r8 = migdal_z(8, 1, 2.0, &tr).unwrap().value - a0;
    let ratio = r4 / r8;
    let ratio_ok = (3.0..=5.0).contains(&ratio);
    let mut detail = format!("residual ratio N=4/N=8 = {ratio:.3}");
    let mut expansion_ok = true;
    for t in [2.0, 3.0] {
        let e = torus_expansion(t, 1, &TorusOptions::default()).unwrap();
        let rel = e.relative_disagreement[1];
        expansion_ok &= rel <= 0.05;
        detail += &format!("; t={t}: a1={:.4} richardson={:.4} rel={rel:.3}", e.coefficients[1], e.oracle[1]);
    }
    ok(ratio_ok && expansion_ok, detail)
}

fn coupling_identity() -> Outcome {
    let tr = Truncation::new(1e-13);
    let casimir = |w: &HighestWeight| w.casimir_numerator() as f64 / w.rank() as f64;
    let mut worst = 0.0f64;
    for rank in [3, 4] {
        let m = GaussianHWMeasure::new(rank, 2.0, &tr).unwrap();
        let one = |_: &HighestWeight| 1.0;
        let l1 = gaussian_expectation(&m, one, &tr).unwrap().value;
        let r1 = coupling_rhs(rank, 2.0, one, &tr).unwrap().value;
        let l2 = gaussian_expectation(&m, casimir, &tr).unwrap().value;
        let r2 = coupling_rhs(rank, 2.0, casimir, &tr).unwrap().value;
        worst = worst.max((l1 - r1).abs()).max((l2 - r2).abs());
    }
    ok(worst < 1e-6, format!("max difference {worst:.3e}"))
}

fn hurwitz_oracle() -> Outcome {
    for n in 1..=4u32 {
        for k in 0..=2u32 {
            let count = hurwitz_count(n, k).unwrap();
            let oracle = monodromy_oracle(n, k).unwrap();
            if !oracle.is_integer() || oracle.numer().to_string() != count.to_string() {
                return ok(false, format!("n={n} k={k}: {count} vs {oracle}"));
            }
        }
    }
    ok(true, "12 pairs agree")
}

fn monte_carlo_vs_character_sum() -> Outcome {
    let opts = McOptions::new(100_000, SEED);
    let mut detail = Vec::new();
    let mut passed = true;
    for g in [1u32, 2] {
        let map = fundamental_map(g).unwrap();
        for t in [2.0, 4.0] {
            let est = estimate_z::<Su2>(&map, t, &[t], &opts).unwrap();
            let reference = su2_partition_function(g, t, 1e-15).unwrap();
            let z = (est.mean - reference) / est.std_error;
            passed &= z.abs() <= 3.0;
            detail.push(format!("g={g} t={t}: z={z:.2}"));
        }
    }
    let one = estimate_z::<Su2>(&fundamental_map(1).unwrap(), 2.0, &[2.0], &opts).unwrap();
    let two = estimate_z::<Su2>(&two_face_torus(), 2.0, &[1.25, 0.75], &opts).unwrap();
    let combined = (one.std_error.powi(2) + two.std_error.powi(2)).sqrt();
    let z = (one.mean - two.mean) / combined;
    passed &= z.abs() <= 3.0;
    detail.push(format!("subdivision pair z={z:.2}"));
    ok(passed, detail.join("; "))
}

fn character_identities() -> Outcome {
    let r = verify_character_identities(100_000, SEED).unwrap();
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    ok(failed.is_empty(), format!("{} checks, failed: {failed:?}", r.checks.len()))
}

fn gaussian_moments() -> Outcome {
    let tr = Truncation::new(1e-14);
    let mut worst_even = 0.0f64;
    let mut worst_odd = 0.0f64;
    for t in [1.0, 2.0, 4.0] {
        let q = q_of_t(t);
        let m = GaussianHWMeasure::new(1, t, &tr).unwrap();
        let e2 = gaussian_expectation(&m, |w| (w.coeffs()[0] as f64).powi(2), &tr).unwrap().value;
        let expected = theta_qdq(q, 1, 1e-16).unwrap().value / theta(q, 1e-16).unwrap().value;
        worst_even = worst_even.max((e2 - expected).abs());
        for p in [1, 3, 5] {
            let odd = gaussian_expectation(&m, |w| (w.coeffs()[0] as f64).powi(p), &tr).unwrap().value;
            worst_odd = worst_odd.max(odd.abs());
        }
    }
    ok(
        worst_even < 1e-8 && worst_odd < 1e-10,
        format!("second moment error {worst_even:.3e}, largest odd moment {worst_odd:.3e}"),
    )
}

fn witten_zeta() -> Outcome {
    let z2 = witten_zeta_su(2, 2.0, 1e-4, 100_000).unwrap();
    let riemann: f64 = (1..=z2.terms_used).map(|n| 1.0 / (n as f64).powi(2)).sum();
    let first = (z2.value - riemann).abs() < 1e-3;
    let tails: Vec<f64> = [2, 4, 6, 8]
        .iter()
        .map(|&n| witten_zeta_su(n, 3.0, 1e-6, 2000).unwrap().value - 1.0)
        .collect();
    let decreasing = tails.windows(2).all(|w| w[1] < w[0]);
    ok(
        first && decreasing,
        format!("zeta_SU(2)(2) = {:.6}; zeta_SU(N)(3) - 1 = {tails:.4?}", z2.value),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("U(1) exactness", u1_exactness),
        ("Casimir identity", casimir_identity),
        ("g >= 2 limit", higher_genus_limit),
        ("g = 1 limit and expansion", torus_limit_and_expansion),
        ("coupling identity", coupling_identity),
        ("Hurwitz oracle equivalence", hurwitz_oracle),
        ("Monte Carlo vs character sum", monte_carlo_vs_character_sum),
        ("character identities", character_identities),
        ("Gaussian moments", gaussian_moments),
        ("Witten zeta", witten_zeta),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = check();
        let secs = start.elapsed().as_secs_f64();
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {tag} {name} ({secs:.2}s): {}", i + 1, r.detail);
        if !r.passed {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
