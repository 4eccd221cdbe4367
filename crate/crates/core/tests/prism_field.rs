mod support;

use maglat_core::magnetostatics::{
    build_hole_array, prism_field, FiniteLattice, FiniteLatticeSpec, PrismSpec,
};
use maglat_core::{BiasField, FieldModel, Point};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{box_field_quadrature, dipole_field, jacobian, UM};

fn cube(side: f64, m: Vector3<f64>) -> PrismSpec {
    PrismSpec::new(Point::zeros(), Vector3::repeat(0.5 * side), m)
}

fn rel_vec(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

fn unit_directions(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vector3<f64>> {
    (0..n)
        .map(|_| {
            let v = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            v.normalize()
        })
        .collect()
}

#[test]
fn far_field_matches_point_dipole() {
    let side = UM;
    let m = Vector3::new(2e4, -3e4, 1.4e5);
    let prism = cube(side, m);
    let moment = m * prism.volume();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for dir in unit_directions(&mut rng, 50) {
        let p = dir * (50.0 * side);
        let got = prism_field(&prism, &p).unwrap();
        let want = dipole_field(moment, p);
        assert!(
            rel_vec(&got, &want) < 5e-3,
            "{dir:?}: {:e}",
            rel_vec(&got, &want)
        );
    }
}

#[test]
fn far_field_falls_off_as_inverse_cube() {
    let prism = cube(UM, Vector3::new(0.0, 0.0, 1e5));
    let dir = Vector3::new(0.3, -0.5, 0.8).normalize();
    let b1 = prism_field(&prism, &(dir * 200.0 * UM)).unwrap().norm();
    let b2 = prism_field(&prism, &(dir * 400.0 * UM)).unwrap().norm();
    assert!((b1 / b2 - 8.0).abs() < 8.0 * 1e-4);
}

#[test]
fn near_field_matches_surface_charge_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let half = Vector3::new(
            rng.gen_range(0.3..1.5),
            rng.gen_range(0.3..1.5),
            rng.gen_range(0.3..1.5),
        ) * UM;
        let centre = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0) * UM;
        let m = Vector3::new(
            rng.gen_range(-1e5..1e5),
            rng.gen_range(-1e5..1e5),
            rng.gen_range(-2e5..2e5),
        );
        let prism = PrismSpec::new(centre, half, m);
        // between 0.2 and 1 box size away from the nearest face
        let dir: Vector3<f64> = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let mut p = centre + half.component_mul(&dir.map(|c: f64| c.signum()));
        p += dir.normalize() * rng.gen_range(0.2..1.0) * half.max();
        let got = prism_field(&prism, &p).unwrap();
        let want = box_field_quadrature(centre, half, m, p, 1e-11);
        assert!(rel_vec(&got, &want) < 1e-6, "{:e}", rel_vec(&got, &want));
    }
}

#[test]
fn hole_array_sum_matches_quadrature() {
    let spec = FiniteLatticeSpec::new(1, 4, UM, UM, 2.0 * UM, 1.4e5);
    let lattice = FiniteLattice::new(&spec, BiasField::default()).unwrap();
    for p in [
        Point::new(0.3 * UM, -0.2 * UM, spec.film_top_z + 0.5 * UM),
        Point::new(3.0 * UM, 3.0 * UM, spec.film_top_z + 0.4 * UM),
        Point::new(-5.0 * UM, 1.0 * UM, spec.film_top_z + 2.0 * UM),
    ] {
        let want: Vector3<f64> = build_hole_array(&spec)
            .iter()
            .map(|q| box_field_quadrature(q.center, q.half_extents, q.magnetization, p, 1e-11))
            .sum();
        let got = lattice.prism_sum(&p).unwrap();
        assert!(rel_vec(&got, &want) < 1e-6, "{:e}", rel_vec(&got, &want));
    }
}

#[test]
fn field_is_divergence_and_curl_free_outside_magnets() {
    let spec = FiniteLatticeSpec::new(1, 4, UM, UM, 2.0 * UM, 1.4e5);
    let lattice = FiniteLattice::new(&spec, BiasField::new(1e-3, 0.0, -5e-3)).unwrap();
    let alpha = spec.alpha();
    let h = 1e-4 * alpha;
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut worst_div: f64 = 0.0;
    let mut worst_curl: f64 = 0.0;
    for _ in 0..120 {
        let p = Point::new(
            rng.gen_range(-6.0..6.0) * UM,
            rng.gen_range(-6.0..6.0) * UM,
            spec.film_top_z + rng.gen_range(0.1..4.0) * UM,
        );
        let j = jacobian(|q| lattice.evaluate(&q).unwrap().b, p, h);
        let scale = j.norm();
        let div = j.trace();
        let curl = Vector3::new(
            j[(2, 1)] - j[(1, 2)],
            j[(0, 2)] - j[(2, 0)],
            j[(1, 0)] - j[(0, 1)],
        );
        worst_div = worst_div.max(div.abs() / scale);
        worst_curl = worst_curl.max(curl.norm() / scale);
    }
    assert!(worst_div < 1e-5, "div {worst_div:e}");
    assert!(worst_curl < 1e-5, "curl {worst_curl:e}");
}

#[test]
fn superposition_is_linear() {
    let a = PrismSpec::new(
        Point::new(0.0, 0.0, -UM),
        Vector3::repeat(0.5 * UM),
        Vector3::new(0.0, 0.0, 1e5),
    );
    let b = PrismSpec::new(
        Point::new(2.0 * UM, 0.0, -UM),
        Vector3::repeat(0.5 * UM),
        Vector3::new(3e4, 0.0, -1e5),
    );
    let both = FiniteLattice::from_prisms(vec![a, b], BiasField::default(), UM, 0.05);
    let p = Point::new(0.7 * UM, 0.4 * UM, 0.6 * UM);
    let sum = prism_field(&a, &p).unwrap() + prism_field(&b, &p).unwrap();
    assert!(rel_vec(&both.prism_sum(&p).unwrap(), &sum) < 1e-14);

    let doubled = PrismSpec::new(a.center, a.half_extents, a.magnetization * 2.0);
    let single = prism_field(&a, &p).unwrap();
    assert!(rel_vec(&prism_field(&doubled, &p).unwrap(), &(single * 2.0)) < 1e-14);
}

#[test]
fn symmetric_array_gives_point_symmetric_magnitude() {
    let spec = FiniteLatticeSpec::new(2, 4, UM, UM, 2.0 * UM, 1.4e5);
    let lattice = FiniteLattice::new(&spec, BiasField::z(-5e-3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let (x, y) = (
            rng.gen_range(-10.0..10.0) * UM,
            rng.gen_range(-10.0..10.0) * UM,
        );
        let z = spec.film_top_z + rng.gen_range(0.1..3.0) * UM;
        let a = lattice.magnitude(&Point::new(x, y, z)).unwrap().magnitude;
        let b = lattice.magnitude(&Point::new(-x, -y, z)).unwrap().magnitude;
        assert!((a - b).abs() <= 1e-10 * a, "{a:e} vs {b:e}");
    }
}

#[test]
fn edge_rows_differ_from_centre_rows() {
    let spec = FiniteLatticeSpec::new(1, 10, UM, UM, 2.0 * UM, 1.4e5);
    let lattice = FiniteLattice::new(&spec, BiasField::z(2.5e-2)).unwrap();
    let coords = spec.hole_coordinates();
    let centre_y = coords[coords.len() / 2];
    let edge_y = *coords.last().unwrap();
    let z = spec.film_top_z + 0.4 * UM;
    let mut worst: f64 = 0.0;
    for i in 0..201 {
        let x = coords[0] + (coords[coords.len() - 1] - coords[0]) * i as f64 / 200.0;
        let c = lattice
            .magnitude(&Point::new(x, centre_y, z))
            .unwrap()
            .magnitude;
        let e = lattice
            .magnitude(&Point::new(x, edge_y, z))
            .unwrap()
            .magnitude;
        worst = worst.max((e - c).abs() / c.max(e));
    }
    assert!(worst > 1e-2, "max relative difference {worst:e}");
}
