use std::f64::consts::PI;

use proptest::prelude::*;
use waf_core::mesh::{build_polygon_mesh, integrate, laplacian, refine, thick_part};
use waf_core::{ScalarField, SurfaceMesh};

fn defect_sum(mesh: &SurfaceMesh) -> f64 {
    mesh.angle_defects().iter().sum()
}

#[test]
fn gauss_bonnet_on_constructed_meshes() {
    for (g, r) in [(2, 0), (2, 1), (2, 3), (3, 0), (3, 1), (4, 0)] {
        let mesh = build_polygon_mesh(g, r).unwrap();
        let chi = 2 - 2 * g as i64;
        assert_eq!(mesh.euler_characteristic(), chi);
        let err = (defect_sum(&mesh) - 2.0 * PI * chi as f64).abs();
        assert!(err <= 1e-9 * mesh.num_vertices() as f64, "g={g} r={r}: {err}");
    }
}

#[test]
fn refine_preserves_invariants() {
    let mesh = build_polygon_mesh(3, 0).unwrap();
    let fine = refine(&mesh).unwrap();
    assert_eq!(fine.euler_characteristic(), -4);
    assert!((defect_sum(&fine) + 8.0 * PI).abs() < 1e-9 * fine.num_vertices() as f64);
    assert!((fine.total_area() - mesh.total_area()).abs() < 1e-12 * mesh.total_area());
}

#[test]
fn polygon_area_converges_to_hyperbolic_area() {
    let mut prev = f64::INFINITY;
    for r in 0..=3 {
        let mesh = build_polygon_mesh(2, r).unwrap();
        let err = (mesh.total_area() - 4.0 * PI).abs();
        assert!(err < prev, "level {r}: {err} >= {prev}");
        prev = err;
    }
    let mesh = build_polygon_mesh(2, 3).unwrap();
    let one = ScalarField::constant(&mesh, 1.0).unwrap();
    let area = integrate(&mesh, &one, None).unwrap();
    assert!((area - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
}

#[test]
fn laplacian_kills_constants_and_integrates_to_zero() {
    let mesh = build_polygon_mesh(2, 2).unwrap();
    let lap = laplacian(&mesh).unwrap();
    assert!(lap.stiffness().max_asymmetry() == 0.0);
    let ones = ScalarField::constant(&mesh, 3.5).unwrap();
    assert!(lap.apply(&ones).unwrap().max_abs() < 1e-12);
    let f = ScalarField::from_fn(&mesh, |v| ((v * 37) % 11) as f64 - 5.0).unwrap();
    let lf = lap.apply(&f).unwrap();
    assert!(integrate(&mesh, &lf, None).unwrap().abs() < 1e-10);
    let mass_sum: f64 = lap.mass().iter().sum();
    assert!((mass_sum - mesh.total_area()).abs() < 1e-12 * mass_sum);
}

#[test]
fn zero_eigenvalue_is_simple() {
    // Only constants make the stiffness form vanish: a vector orthogonal to
    // constants must have strictly positive energy.
    let mesh = build_polygon_mesh(2, 1).unwrap();
    let lap = laplacian(&mesh).unwrap();
    for seed in 0..5usize {
        let mut f: Vec<f64> = (0..mesh.num_vertices()).map(|v| (((v + seed) * 2654435761) % 1000) as f64 / 1000.0).collect();
        let mean = f.iter().sum::<f64>() / f.len() as f64;
        f.iter_mut().for_each(|x| *x -= mean);
        let energy = -lap.stiffness().mul_vec(&f).iter().zip(&f).map(|(a, b)| a * b).sum::<f64>();
        assert!(energy > 1e-6, "{energy}");
    }
}

#[test]
fn thick_part_extremes() {
    let mesh = build_polygon_mesh(2, 1).unwrap();
    let zero = ScalarField::constant(&mesh, 0.0).unwrap();
    assert_eq!(thick_part(&mesh, &zero, 1e-6).unwrap().len(), mesh.num_vertices());
    assert!(thick_part(&mesh, &zero, 100.0).unwrap().is_empty());
    assert!(thick_part(&mesh, &zero, 0.0).unwrap_err().is_validation());
    assert!(thick_part(&mesh, &zero, -1.0).unwrap_err().is_validation());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integrate_is_linear(a in -5.0..5.0f64, b in -5.0..5.0f64, seed in 0usize..1000) {
        let mesh = build_polygon_mesh(2, 0).unwrap();
        let f = ScalarField::from_fn(&mesh, |v| ((v * 31 + seed) % 17) as f64).unwrap();
        let g = ScalarField::from_fn(&mesh, |v| ((v * 7 + seed) % 5) as f64 - 2.0).unwrap();
        let w = ScalarField::from_fn(&mesh, |v| 1.0 + (v % 3) as f64).unwrap();
        let combo = ScalarField::from_fn(&mesh, |v| a * f.values()[v] + b * g.values()[v]).unwrap();
        let lhs = integrate(&mesh, &combo, Some(&w)).unwrap();
        let rhs = a * integrate(&mesh, &f, Some(&w)).unwrap() + b * integrate(&mesh, &g, Some(&w)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn thick_parts_are_nested(e1 in 0.05..2.0f64, e2 in 0.05..2.0f64, shift in -0.3..0.0f64) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let mesh = build_polygon_mesh(2, 1).unwrap();
        let u = ScalarField::from_fn(&mesh, |v| shift * ((v % 5) as f64 / 4.0)).unwrap();
        let big = thick_part(&mesh, &u, lo).unwrap();
        let small = thick_part(&mesh, &u, hi).unwrap();
        prop_assert!(small.iter().all(|v| big.binary_search(v).is_ok()));
    }
}
