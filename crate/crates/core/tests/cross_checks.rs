use ym2_core::groups::{Su2, U1};
use ym2_core::maps::{fundamental_map, CombinatorialMap, LoopWord};
use ym2_core::monte_carlo::{estimate_wilson, estimate_z, su2_partition_function, McOptions};
use ym2_core::partition_function::{
    coupling_rhs, dk_scan, gaussian_expectation, migdal_z, sphere_log_partition_function, z_via_coupling,
    GaussianHWMeasure, Truncation,
};
use ym2_core::special::{q_of_t, theta};
use ym2_core::unitary_reps::HighestWeight;

const GENUS_TWO_SPLIT: &str = "a1 b1 a1^-1 b1^-1 d\nd^-1 a2 b2 a2^-1 b2^-1\n";

#[test]
fn subdivided_genus_two_surface() {
    let map = CombinatorialMap::parse(GENUS_TWO_SPLIT).unwrap();
    assert_eq!(map.genus(), 2);
    let opts = McOptions::new(40_000, 11);
    let split = estimate_z::<Su2>(&map, 3.0, &[1.0, 2.0], &opts).unwrap();
    let whole = estimate_z::<Su2>(&fundamental_map(2).unwrap(), 3.0, &[3.0], &opts).unwrap();
    let reference = su2_partition_function(2, 3.0, 1e-15).unwrap();
    assert!((split.mean - reference).abs() < 4.0 * split.std_error);
    assert!((whole.mean - reference).abs() < 4.0 * whole.std_error);
}

#[test]
fn removing_edges_keeps_the_estimate() {
    let map = CombinatorialMap::parse(GENUS_TWO_SPLIT).unwrap();
    let d = map.edge_by_label("d").unwrap();
    let merged = map.remove_edge(d).unwrap();
    assert_eq!(merged.face_count(), 1);
    assert_eq!(merged.genus(), 2);
    let opts = McOptions::new(40_000, 5);
    let a = estimate_z::<Su2>(&merged, 2.0, &[2.0], &opts).unwrap();
    let reference = su2_partition_function(2, 2.0, 1e-15).unwrap();
    assert!((a.mean - reference).abs() < 4.0 * a.std_error);
}

#[test]
fn u1_wilson_loop_of_a_generator_vanishes() {
    // a non-contractible loop on the torus carries no charge in the U(1) theory
    let map = fundamental_map(1).unwrap();
    let w = LoopWord::parse(&map, "a1").unwrap();
    let est = estimate_wilson::<U1>(&map, 2.0, &[2.0], &w, &McOptions::new(20_000, 3)).unwrap();
    assert!(est.mean.abs() < 4.0 * est.std_error + 1e-12);
    let th = theta(q_of_t(2.0), 1e-16).unwrap().value;
    let z = estimate_z::<U1>(&map, 2.0, &[2.0], &McOptions::new(100, 3)).unwrap();
    assert!((z.mean - th).abs() < 1e-12);
}

#[test]
fn coupling_at_larger_rank() {
    let tr = Truncation::new(1e-13);
    let m = GaussianHWMeasure::new(6, 2.5, &tr).unwrap();
    let f = |w: &HighestWeight| (w.coeffs()[0] - w.coeffs()[5]) as f64;
    let lhs = gaussian_expectation(&m, f, &tr).unwrap().value;
    let rhs = coupling_rhs(6, 2.5, f, &tr).unwrap().value;
    assert!((lhs - rhs).abs() < 1e-8);
    let z = z_via_coupling(6, 2.5, &tr).unwrap().value;
    assert!((z - m.normalization).abs() < 1e-10 * z);
}

#[test]
fn sphere_routes_agree_at_rank_five() {
    let z = migdal_z(5, 0, 3.0, &Truncation::new(1e-13)).unwrap().value;
    assert!((sphere_log_partition_function(5, 3.0).unwrap() - z.ln()).abs() < 1e-9);
    let scan = dk_scan(5, &[3.0]).unwrap();
    assert!((scan[0].1 - z.ln() / 25.0).abs() < 1e-10);
}
