use kobayashi_core::linalg::{basis, c};
use kobayashi_core::rescaling::blowup_sequence;
use kobayashi_core::{CVector, ConvexDomain, Tolerances};

/// Points of `A(r; η) = {|z| < r, |Im z| < η Re z}` on a polar grid.
fn sector(r: f64, eta: f64) -> Vec<num_complex::Complex64> {
    let half_angle = eta.atan();
    let mut pts = Vec::new();
    for i in 1..=24 {
        let rho = r * 0.99 * (i as f64 / 24.0).powi(3);
        for j in 0..=10 {
            let phi = 0.99 * half_angle * (2.0 * j as f64 / 10.0 - 1.0);
            pts.push(num_complex::Complex64::from_polar(rho, phi));
        }
    }
    pts
}

// Before rescaling, ξ + A(r_η; η) n(ξ) ⊂ Ω with r_η = 1 for these domains
// (|1 − z|² < 1 on the sector when η ≤ 1). After F_n the sector sits at
// (1 − z) e_1 with z ∈ A(r_η / r_n; η).
#[test]
fn rescaled_domains_contain_the_normal_sectors() {
    let tol = Tolerances::default();
    let domains = [
        ("ball", ConvexDomain::unit_ball(2), 3),
        ("ellipsoid", ConvexDomain::ellipsoid(&[1.0, 2.0]).unwrap(), 3),
        ("ball3", ConvexDomain::unit_ball(3), 2),
    ];
    for (name, dom, n_steps) in &domains {
        let d = dom.dim();
        let steps = blowup_sequence(dom, &basis(d, 0), *n_steps, &basis(d, 1), &tol).unwrap();
        for step in &steps {
            for eta in [0.5, 1.0] {
                for z in sector(1.0 / step.r, eta) {
                    let mut p = CVector::zeros(d);
                    p[0] = c(1.0, 0.0) - z;
                    assert!(step.domain.contains(&p), "{name} n={} η={eta}: {z} not inside", step.n);
                }
            }
        }
    }
}

#[test]
fn rescaled_balls_approach_the_siegel_normal_form() {
    // F_n(B_2) at e_1 tends to {1 − Re s_1 > |s_2|²}
    let tol = Tolerances::default();
    let steps = blowup_sequence(&ConvexDomain::unit_ball(2), &basis(2, 0), 4, &basis(2, 1), &tol).unwrap();
    let last = &steps.last().unwrap().domain;
    for (re, im, s2) in [(0.5, 0.0, 0.6), (0.0, 1.0, 0.9), (-3.0, 2.0, 1.9), (0.9, -0.5, 0.2)] {
        let limit_margin: f64 = 1.0 - re - s2 * s2;
        let p = CVector::from_vec(vec![c(re, im), c(s2, 0.0)]);
        assert_eq!(last.contains(&p), limit_margin > 0.0, "({re}, {im}, {s2})");
    }
}
