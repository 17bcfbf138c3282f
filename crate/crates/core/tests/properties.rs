use kobayashi_core::detectors::{ball_bergman_curvature, default_r_grid, spc_exponent, squeezing_lower_bound};
use kobayashi_core::dynamics::{model_distance, GeodesicRay};
use kobayashi_core::geometry::delta;
use kobayashi_core::linalg::{basis, c, cvec, AffineMap};
use kobayashi_core::metrics::{cayley, dist_ball, dist_disk, dist_halfplane, dist_siegel};
use kobayashi_core::rescaling::local_hausdorff;
use kobayashi_core::{CMatrix, CVector, ConvexDomain, Tolerances, VerdictConfig};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ball_point(rng: &mut ChaCha8Rng, d: usize, r: f64) -> CVector {
    loop {
        let z = CVector::from_fn(d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        if z.norm() < 1.0 {
            return z.scale(r);
        }
    }
}

fn siegel_point(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let mut z = CVector::from_fn(d, |_, _| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
    let tail = z.rows(1, d - 1).norm_squared();
    z[0].im = tail + rng.random_range(0.01..3.0f64).powi(2);
    z
}

/// A random unitary matrix from the QR factorization of a complex matrix.
fn unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let m = CMatrix::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}

fn check_axioms<F: Fn(&CVector, &CVector) -> f64>(name: &str, dist: F, points: &[CVector]) {
    for tri in points.chunks(3) {
        let (x, y, z) = (&tri[0], &tri[1], &tri[2]);
        let (dxy, dyx) = (dist(x, y), dist(y, x));
        assert_eq!(dxy.to_bits(), dyx.to_bits(), "{name}: symmetry");
        let (dyz, dxz) = (dist(y, z), dist(x, z));
        assert!(dxz <= dxy + dyz + 1e-9, "{name}: triangle {dxz} > {dxy} + {dyz}");
        assert_eq!(dist(x, x), 0.0, "{name}: identity");
    }
}

#[test]
fn exact_distances_are_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let disk: Vec<CVector> = (0..3000).map(|_| ball_point(&mut rng, 1, 0.999)).collect();
    check_axioms("disk", |a, b| dist_disk(a[0], b[0]).unwrap(), &disk);
    let half: Vec<CVector> = disk.iter().map(|p| cvec(&[(p[0].re * 3.0, (p[0].im + 1.0) * 2.0 + 1e-3)])).collect();
    check_axioms("halfplane", |a, b| dist_halfplane(a[0], b[0]).unwrap(), &half);
    for d in [2, 3] {
        let pts: Vec<CVector> = (0..3000).map(|_| ball_point(&mut rng, d, 0.999)).collect();
        check_axioms("ball", |a, b| dist_ball(d, a, b).unwrap(), &pts);
    }
    let pts: Vec<CVector> = (0..3000).map(|_| siegel_point(&mut rng, 2)).collect();
    check_axioms("siegel", |a, b| dist_siegel(2, a, b).unwrap(), &pts);
}

#[test]
fn ball_distance_is_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let u = unitary(&mut rng, 3);
        let z = ball_point(&mut rng, 3, 0.99);
        let w = ball_point(&mut rng, 3, 0.99);
        let a = dist_ball(3, &z, &w).unwrap();
        let b = dist_ball(3, &(&u * &z), &(&u * &w)).unwrap();
        assert!((a - b).abs() <= 1e-10 * (1.0 + a), "{a} {b}");
    }
}

#[test]
fn siegel_distance_is_the_pulled_back_ball_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let z = siegel_point(&mut rng, 3);
        let w = siegel_point(&mut rng, 3);
        let a = dist_siegel(3, &z, &w).unwrap();
        let b = dist_ball(3, &cayley(&z), &cayley(&w)).unwrap();
        assert!((a - b).abs() <= 1e-8 * (1.0 + a), "{a} {b}");
    }
}

#[test]
fn delta_commutes_with_unitary_motions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = Tolerances::default();
    let base = ConvexDomain::ellipsoid(&[1.0, 0.5]).unwrap();
    for _ in 0..5 {
        let u = unitary(&mut rng, 2);
        let shift = CVector::from_fn(2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let map = AffineMap::new(u, shift).unwrap();
        let image = base.image(&map).unwrap();
        let z = ball_point(&mut rng, 2, 0.4);
        let a = delta(&base, &z, &tol).unwrap();
        let b = delta(&image, &map.apply(&z), &tol).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} {b}");
    }
}

#[test]
fn spc_exponent_is_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let tol = Tolerances::default();
    let cfg = VerdictConfig::default();
    let base = ConvexDomain::ellipsoid(&[1.0, 2.0]).unwrap();
    let xi = basis(2, 0);
    let v = basis(2, 1);
    let reference = spc_exponent(&base, &xi, &v, &default_r_grid(), &tol, &cfg).unwrap();
    for _ in 0..3 {
        let u = unitary(&mut rng, 2);
        let map = AffineMap::linear(u).unwrap();
        let image = base.image(&map).unwrap();
        let got = spc_exponent(&image, &map.apply(&xi), &map.apply_linear(&v), &default_r_grid(), &tol, &cfg).unwrap();
        let gap = (got.exponent_fit.exponent - reference.exponent_fit.exponent).abs();
        assert!(gap <= 1e-6, "{gap}");
    }
}

#[test]
fn geodesic_rays_have_unit_speed_in_every_model() {
    let rays = [
        GeodesicRay::siegel_vertical(3, cvec(&[(0.0, 0.0), (0.5, 0.1), (-0.2, 0.3)]), -0.7).unwrap(),
        GeodesicRay::ball_radial(cvec(&[(0.3, 0.1), (0.0, -1.0), (0.2, 0.2)])).unwrap(),
    ];
    for ray in &rays {
        for k in 0..20 {
            let t = -2.0 + 0.5 * k as f64;
            let (d, _) = model_distance(ray.model(), &ray.point(t), &ray.point(t + 0.75)).unwrap();
            assert!((d - 0.75).abs() < 1e-8, "{ray:?} {t} {d}");
        }
    }
}

#[test]
fn hausdorff_is_symmetric_and_satisfies_the_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let tol = Tolerances::default();
    let n = 1024;
    // sample spacing on the sphere S^3 at this density, scaled by the radii in play
    let sampling = 3.0 * (2.0 * std::f64::consts::PI.powi(2) / n as f64).cbrt();
    for _ in 0..4 {
        let balls: Vec<ConvexDomain> = (0..3)
            .map(|_| {
                let r = rng.random_range(0.5..1.5);
                let center = ball_point(&mut rng, 2, 0.3);
                ConvexDomain::ball(2, r, center).unwrap()
            })
            .collect();
        let h = |a: &ConvexDomain, b: &ConvexDomain| local_hausdorff(a, b, 10.0, n, &tol).unwrap();
        let (ab, ba) = (h(&balls[0], &balls[1]), h(&balls[1], &balls[0]));
        assert!((ab - ba).abs() <= 2.0 * sampling * 1e-2 + 1e-9, "{ab} {ba}");
        let (bc, ac) = (h(&balls[1], &balls[2]), h(&balls[0], &balls[2]));
        assert!(ac <= ab + bc + 2.0 * sampling * 1e-2 + 1e-9);
        // closed form for balls: |c_1 − c_2| + |r_1 − r_2|
        let closed = |a: &ConvexDomain, b: &ConvexDomain| match (a.shape(), b.shape()) {
            (kobayashi_core::Shape::Ball { radius: r1, center: c1 }, kobayashi_core::Shape::Ball { radius: r2, center: c2 }) => (c1 - c2).norm() + (r1 - r2).abs(),
            _ => unreachable!(),
        };
        assert!((ab - closed(&balls[0], &balls[1])).abs() < 1e-6, "{ab} vs {}", closed(&balls[0], &balls[1]));
    }
}

#[test]
fn bergman_curvature_is_constant_on_the_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let values: Vec<f64> = (0..100)
        .map(|_| {
            let z = ball_point(&mut rng, 2, 0.5);
            let v = ball_point(&mut rng, 2, 1.0);
            ball_bergman_curvature(2, &z, &v).unwrap()
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    assert!(var.sqrt() <= 1e-3, "sd {}", var.sqrt());
    assert!((mean + 4.0 / 3.0).abs() < 1e-3);
}

#[test]
fn squeezing_bound_is_a_fraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let tol = Tolerances { hausdorff_directions: 512, ..Tolerances::default() };
    let e = ConvexDomain::ellipsoid(&[1.0, 0.7]).unwrap();
    for _ in 0..5 {
        let p = ball_point(&mut rng, 2, 0.5);
        let s = squeezing_lower_bound(&e, &p, &tol).unwrap();
        assert!(s > 0.0 && s < 1.0, "{s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    #[test]
    fn halfplane_distance_is_invariant_under_real_affine_maps(
        x in -5.0..5.0f64, y in 0.01..5.0f64, u in -5.0..5.0f64, v in 0.01..5.0f64,
        a in 0.1..10.0f64, b in -10.0..10.0f64,
    ) {
        let z = Complex64::new(x, y);
        let w = Complex64::new(u, v);
        let d0 = dist_halfplane(z, w).unwrap();
        let d1 = dist_halfplane(z * a + b, w * a + b).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0));
    }

    #[test]
    fn disk_distance_is_invariant_under_rotations(
        r1 in 0.0..0.99f64, t1 in 0.0..6.3f64, r2 in 0.0..0.99f64, t2 in 0.0..6.3f64, phi in 0.0..6.3f64,
    ) {
        let z = Complex64::from_polar(r1, t1);
        let w = Complex64::from_polar(r2, t2);
        let rot = Complex64::from_polar(1.0, phi);
        let d0 = dist_disk(z, w).unwrap();
        let d1 = dist_disk(z * rot, w * rot).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0));
    }

    #[test]
    fn ball_distance_from_the_center_is_artanh(r in 0.0..0.999f64, t in 0.0..6.3f64) {
        let z = cvec(&[(r * t.cos(), 0.0), (0.0, r * t.sin())]);
        let d = dist_ball(2, &CVector::zeros(2), &z).unwrap();
        prop_assert!((d - r.atanh()).abs() <= 1e-12 * (1.0 + d));
    }
}
