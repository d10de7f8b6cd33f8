use waf_core::explorer::{compact_distance, find_threshold, identity_correspondence, pinch_family, DEFAULT_TERMS, PINCHED_CURVE};
use waf_core::gauss::SolveOptions;
use waf_core::mesh::{build_polygon_mesh, thick_part};
use waf_core::qdiff::{constant_field, synth_with_zeros, Zero};
use waf_core::{Error, MinimalTriple, ScalarField, SurfaceMesh};

fn solved(mesh: &SurfaceMesh, amp: f64, zs: [usize; 4]) -> MinimalTriple {
    let zeros: Vec<Zero> = zs.iter().map(|&v| Zero { vertex: v, multiplicity: 1 }).collect();
    let q = synth_with_zeros(mesh, &zeros, amp).unwrap();
    MinimalTriple::solve(mesh.clone(), q, &SolveOptions::default()).unwrap()
}

#[test]
fn threshold_of_constant_rays() {
    let mesh = build_polygon_mesh(2, 2).unwrap();
    let base = find_threshold(&mesh, &constant_field(&mesh, 1.0).unwrap(), 1e-3).unwrap();
    assert!((base.t_star - 0.5).abs() <= 1e-3);
    assert!(base.bracket.1 - base.bracket.0 <= 1e-3);
    assert!(base.bracket.0 <= base.t_star && base.t_star <= base.bracket.1);
    for s in [2.0, 4.0] {
        let r = find_threshold(&mesh, &constant_field(&mesh, s * s).unwrap(), 1e-3).unwrap();
        assert!((r.t_star - base.t_star / s).abs() <= 2e-3, "s={s}: {}", r.t_star);
    }
    for &(t, l0) in &base.lambda0_curve {
        if t <= base.bracket.0 {
            assert!(l0.is_some_and(|l| l <= 1.0));
        }
    }
}

#[test]
fn threshold_errors() {
    let mesh = build_polygon_mesh(2, 0).unwrap();
    let zero = constant_field(&mesh, 0.0).unwrap();
    assert!(find_threshold(&mesh, &zero, 1e-3).unwrap_err().is_validation());
    let huge = constant_field(&mesh, 1e6).unwrap();
    assert!(matches!(find_threshold(&mesh, &huge, 1e-3), Err(Error::ThresholdOutOfRange(_))));
}

#[test]
fn pinching_thins_the_collar() {
    let base_len = pinch_family(2, 1.0, 2).unwrap().marked_curve_length(PINCHED_CURVE).unwrap();
    let mut prev: Option<Vec<usize>> = None;
    for p in [1.0, 0.5, 0.25, 0.1, 0.05] {
        let mesh = pinch_family(2, p, 2).unwrap();
        assert!((mesh.marked_curve_length(PINCHED_CURVE).unwrap() - p * base_len).abs() < 1e-12);
        let zero = ScalarField::constant(&mesh, 0.0).unwrap();
        let thick = thick_part(&mesh, &zero, 0.2).unwrap();
        if let Some(prev) = &prev {
            assert!(thick.len() <= prev.len());
            assert!(thick.iter().all(|v| prev.binary_search(v).is_ok()));
        }
        prev = Some(thick);
    }
    let last = prev.unwrap();
    let curve = &pinch_family(2, 0.05, 2).unwrap().marked_curves()[PINCHED_CURVE].clone();
    assert!(curve.iter().all(|v| last.binary_search(v).is_err()));
}

#[test]
fn distance_axioms() {
    let mesh = build_polygon_mesh(2, 1).unwrap();
    let a = solved(&mesh, 0.2, [0, 30, 60, 90]);
    let b = solved(&mesh, 0.35, [5, 6, 70, 100]);
    let c = solved(&mesh, 0.45, [1, 2, 3, 4]);
    let id = identity_correspondence(mesh.num_vertices());
    let d = |x: &MinimalTriple, y: &MinimalTriple| compact_distance(x, y, &id, DEFAULT_TERMS).unwrap();
    let self_d = d(&a, &a);
    assert_eq!((self_d.d_total, self_d.d_phi, self_d.d_dm_proxy), (0.0, 0.0, 0.0));
    for (x, y) in [(&a, &b), (&b, &c), (&a, &c)] {
        assert!((d(x, y).d_total - d(y, x).d_total).abs() <= 1e-12);
    }
    for (x, y, z) in [(&a, &b, &c), (&b, &a, &c), (&a, &c, &b)] {
        assert!(d(x, z).d_total <= d(x, y).d_total + d(y, z).d_total + 1e-12);
    }
    let short = compact_distance(&a, &c, &id, 4).unwrap();
    let long = compact_distance(&a, &c, &id, 20).unwrap();
    assert!(long.d_total - short.d_total <= short.tail_bound + 1e-15);
}

#[test]
fn distance_of_a_constant_shift() {
    let mesh = build_polygon_mesh(2, 1).unwrap();
    let a = solved(&mesh, 0.3, [0, 30, 60, 90]);
    let delta = 0.01;
    let shifted_u = a.u().map(|u| u + delta).unwrap();
    let mut sol = a.solution().clone();
    sol.u = shifted_u;
    let b = MinimalTriple::new(mesh.clone(), a.q().clone(), sol).unwrap();
    let r = compact_distance(&a, &b, &identity_correspondence(mesh.num_vertices()), 3).unwrap();
    let expected = a.u().values().iter().map(|u| ((2.0 * (u + delta)).exp() - (2.0 * u).exp()).abs()).fold(0.0, f64::max);
    assert!((r.d_phi - expected).abs() < 1e-15);
    assert_eq!(r.d_dm_proxy, 0.0);
}

#[test]
fn correspondence_must_cover_thick_part() {
    let mesh = build_polygon_mesh(2, 0).unwrap();
    let a = solved(&mesh, 0.2, [0, 1, 2, 3]);
    let mut map = identity_correspondence(mesh.num_vertices());
    map[5] = None;
    assert!(compact_distance(&a, &a, &map, 2).unwrap_err().is_validation());
    assert!(compact_distance(&a, &a, &map[..3], 2).unwrap_err().is_validation());
}
