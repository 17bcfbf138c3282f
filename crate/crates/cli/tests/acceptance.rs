//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kobayashi_core::detectors::{ball_bergman_curvature, default_r_grid, spc_exponent};
use kobayashi_core::dynamics::{boundary_growth_exponent, lyapunov_exponent, GeodesicRay};
use kobayashi_core::geometry::delta_dir;
use kobayashi_core::linalg::{basis, c, AffineMap};
use kobayashi_core::metrics::{dist_ball, dist_bounds, dist_disk, dist_halfplane, dist_siegel};
use kobayashi_core::rescaling::{blowup_sequence, frankel_normalize};
use kobayashi_core::{CMatrix, CVector, ConvexDomain, Tolerances, VerdictConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ball_point(rng: &mut ChaCha8Rng, d: usize, r: f64) -> CVector {
    loop {
        let z = CVector::from_fn(d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        if z.norm() < 1.0 {
            return z.scale(r);
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `½ arcosh(1 + x)` written to stay accurate for small `x`.
fn half_arcosh_1p(x: f64) -> f64 {
    0.5 * (x + (x * (2.0 + x)).sqrt()).ln_1p()
}

fn closed_form_geodesics() -> Outcome {
    let got = dist_halfplane(Complex64::i(), Complex64::new(2f64.sqrt(), 1.0)).map_err(err)?;
    let want = 0.5 * 2f64.acosh();
    check((got - want).abs() <= 1e-12, || format!("dist(i, √2 + i) = {got}, want {want}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let t: f64 = rng.random_range(-1.0..3.0);
        let alpha: f64 = rng.random_range(-3.0..3.0);
        let h = (2.0 * t).exp();
        let got = dist_halfplane(Complex64::new(0.0, h), Complex64::new(alpha, h)).map_err(err)?;
        let want = half_arcosh_1p(alpha * alpha / (2.0 * (4.0 * t).exp()));
        worst = worst.max((got - want).abs());
    }
    check(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:e}"))
}

fn lyapunov_exponents() -> Outcome {
    let d = 2;
    let axis = GeodesicRay::siegel_axis(d);
    let same = GeodesicRay::siegel_vertical(d, CVector::zeros(d), 1.0).map_err(err)?;
    let transverse = GeodesicRay::siegel_vertical(d, basis(d, 1), 0.0).map_err(err)?;
    let a = lyapunov_exponent(&axis, &same, 2.0, 8.0, 64, 0.0).map_err(err)?;
    let b = lyapunov_exponent(&axis, &transverse, 2.0, 8.0, 64, 0.0).map_err(err)?;
    check((a.exponent + 2.0).abs() <= 0.05, || format!("same geodesic {}", a.exponent))?;
    check((b.exponent + 1.0).abs() <= 0.05, || format!("transverse {}", b.exponent))?;
    Ok(format!("same geodesic {:.6}, transverse {:.6}", a.exponent, b.exponent))
}

fn boundary_growth() -> Outcome {
    let tol = Tolerances::default();
    let p = ConvexDomain::siegel(2);
    let e2 = basis(2, 1);
    let mut worst: f64 = 0.0;
    for r in 1..=10 {
        let r = r as f64;
        let z = basis(2, 0).map(|a| a * Complex64::new(0.0, r.exp()));
        let got = delta_dir(&p, &z, &e2, &tol).map_err(err)?;
        worst = worst.max((got / (r / 2.0).exp() - 1.0).abs());
    }
    check(worst <= 1e-6, || format!("relative error {worst:e}"))?;
    let fit = boundary_growth_exponent(&p, &e2, &tol).map_err(err)?;
    check((fit.exponent - 0.5).abs() <= 0.01, || format!("exponent {}", fit.exponent))?;
    Ok(format!("relative error {worst:e}, exponent {:.6}", fit.exponent))
}

fn spc_family() -> Outcome {
    let tol = Tolerances::default();
    let cfg = VerdictConfig::default();
    let grid = default_r_grid();
    let mut found = Vec::new();
    for m in 1..=3u32 {
        let p = ConvexDomain::power_epigraph(&[m]).map_err(err)?;
        let v = spc_exponent(&p, &CVector::zeros(2), &basis(2, 1), &grid, &tol, &cfg).map_err(err)?;
        let want = 1.0 / (2.0 * m as f64);
        let e = v.exponent_fit.exponent;
        check((e - want).abs() <= 0.02, || format!("m={m}: {e}, want {want}"))?;
        found.push(format!("m={m} {e:.4}"));
    }
    let models = [("ball", ConvexDomain::unit_ball(2)), ("ellipsoid", ConvexDomain::ellipsoid(&[1.0, 2.0]).map_err(err)?)];
    for (name, dom) in &models {
        let v = spc_exponent(dom, &basis(2, 0), &basis(2, 1), &grid, &tol, &cfg).map_err(err)?;
        let e = v.exponent_fit.exponent;
        check((e - 0.5).abs() <= 0.02, || format!("{name}: {e}"))?;
        found.push(format!("{name} {e:.4}"));
    }
    Ok(found.join(", "))
}

fn normalization() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let linear = CMatrix::from_fn(2, 2, |i, j| {
        let diag = if i == j { 2.0 } else { 0.0 };
        c(diag + rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
    });
    let shift = CVector::from_fn(2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let map = AffineMap::new(linear, shift).map_err(err)?;
    let ellipsoid = ConvexDomain::unit_ball(2).image(&map).map_err(err)?;
    let inside = map.apply(&ball_point(&mut rng, 2, 0.6));
    let cases = [
        ("ball", ConvexDomain::unit_ball(2), basis(2, 0).scale(0.9)),
        ("siegel", ConvexDomain::siegel(2), basis(2, 0).map(|a| a * Complex64::i())),
        ("ellipsoid", ellipsoid, inside),
    ];
    let mut lowest = f64::INFINITY;
    for (name, dom, x) in &cases {
        let n = frankel_normalize(dom, x, &tol).map_err(|e| format!("{name}: {e}"))?;
        let r = &n.report;
        check(r.passes, || format!("{name}: not in K_d: {r:?}"))?;
        for t in r.disk_inclusions.iter().chain(&r.plane_exclusions) {
            check(t.margin >= -1e-6, || format!("{name}: margin {}", t.margin))?;
            lowest = lowest.min(t.margin);
        }
        let image = n.map.apply(x);
        check(image.iter().all(|a| a.re == 0.0 && a.im == 0.0), || format!("{name}: basepoint goes to {image:?}"))?;
    }
    Ok(format!("smallest margin {lowest:e}"))
}

fn blowup() -> Outcome {
    let tol = Tolerances::default();
    let steps = blowup_sequence(&ConvexDomain::unit_ball(2), &basis(2, 0), 8, &basis(2, 1), &tol).map_err(err)?;
    let deltas: Vec<f64> = steps.iter().filter_map(|s| s.hausdorff.map(|h| h[1])).collect();
    check(deltas.len() == 7, || format!("{} deltas", deltas.len()))?;
    check(deltas.windows(2).all(|w| w[1] < w[0]), || format!("not monotone: {deltas:?}"))?;
    // deltas[k] compares step k + 2 with step k + 1
    check(deltas[4..].iter().all(|&x| x < 0.05), || format!("above 0.05 at step 6 or later: {deltas:?}"))?;
    check(steps.iter().all(|s| s.kd.passes), || "a rescaled domain left K_d".into())?;
    let shown: Vec<String> = deltas.iter().map(|x| format!("{x:.2e}")).collect();
    Ok(format!("d_H^(4) deltas [{}]", shown.join(", ")))
}

fn sandwich() -> Outcome {
    let tol = Tolerances::default();
    let ball = ConvexDomain::unit_ball(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gap: f64 = 0.0;
    for _ in 0..100 {
        let z = ball_point(&mut rng, 2, 0.95);
        let w = ball_point(&mut rng, 2, 0.95);
        let exact = dist_ball(2, &z, &w).map_err(err)?;
        let b = dist_bounds(&ball, &z, &w, &tol).map_err(err)?;
        check(b.lower <= exact && exact <= b.upper, || format!("[{}, {}] misses {exact}", b.lower, b.upper))?;
        gap = gap.max(b.upper - exact);
    }
    check(gap <= 1e-3, || format!("upper − exact up to {gap:e}"))?;
    Ok(format!("max upper − exact {gap:e}"))
}

fn bergman() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        let want = -4.0 / (d as f64 + 1.0);
        for _ in 0..10 {
            let z = ball_point(&mut rng, d, 0.5);
            let v = ball_point(&mut rng, d, 1.0);
            let k = ball_bergman_curvature(d, &z, &v).map_err(err)?;
            worst = worst.max((k - want).abs());
        }
    }
    check(worst <= 1e-3, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:e}"))
}

fn metric_axioms() -> Outcome {
    fn run<F: Fn(&CVector, &CVector) -> f64>(name: &str, dist: F, points: &[CVector]) -> Result<(), String> {
        for tri in points.chunks(3) {
            let (x, y, z) = (&tri[0], &tri[1], &tri[2]);
            let (dxy, dyx) = (dist(x, y), dist(y, x));
            check(dxy.to_bits() == dyx.to_bits(), || format!("{name}: {dxy} != {dyx}"))?;
            let (dyz, dxz) = (dist(y, z), dist(x, z));
            check(dxz <= dxy + dyz + 1e-9, || format!("{name}: {dxz} > {dxy} + {dyz}"))?;
            check(dist(x, x) == 0.0, || format!("{name}: d(x, x) != 0"))?;
        }
        Ok(())
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 3000;
    let disk: Vec<CVector> = (0..n).map(|_| ball_point(&mut rng, 1, 0.999)).collect();
    run("disk", |a, b| dist_disk(a[0], b[0]).unwrap(), &disk)?;
    let half: Vec<CVector> = (0..n).map(|_| CVector::from_element(1, c(rng.random_range(-5.0..5.0), rng.random_range(1e-3..5.0)))).collect();
    run("halfplane", |a, b| dist_halfplane(a[0], b[0]).unwrap(), &half)?;
    for d in [2, 3] {
        let pts: Vec<CVector> = (0..n).map(|_| ball_point(&mut rng, d, 0.999)).collect();
        run("ball", |a, b| dist_ball(d, a, b).unwrap(), &pts)?;
        let pts: Vec<CVector> = (0..n)
            .map(|_| {
                let mut z = CVector::from_fn(d, |_, _| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
                z[0].im = z.rows(1, d - 1).norm_squared() + rng.random_range(0.01..3.0f64).powi(2);
                z
            })
            .collect();
        run("siegel", |a, b| dist_siegel(d, a, b).unwrap(), &pts)?;
    }
    Ok("1000 triples each for disk, halfplane, ball and siegel".into())
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn cli(args: &[String], threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kobayashi"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("KOBAYASHI_THREADS", t),
        None => cmd.env_remove("KOBAYASHI_THREADS"),
    };
    let out = cmd.output().map_err(err)?;
    check(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let config: PathBuf = dir.path().join("config.json");
    std::fs::write(&config, r#"{"seed": 42, "verdict": {"max_half_width": 0.05}}"#).map_err(err)?;
    let cfg = config.display().to_string();
    let runs: Vec<Vec<String>> = [
        vec!["delta", "--domain", &data("siegel2.json"), "--point", "i*e1@r=2", "--dir", "e2"],
        vec!["dist", "--domain", &data("ball.json"), "--z1", "0.1,0.2:0.1", "--z2", "-0.3:0.2,0.4"],
        vec!["lyapunov", "--model", "siegel", "--d", "2", "--v", "e2", "--trange", "2:8"],
        vec!["--format", "csv", "lyapunov", "--model", "siegel", "--d", "2", "--alpha", "1"],
        vec!["spc", "--domain", &data("ball.json"), "--samples", "16"],
        vec!["--format", "csv", "spc", "--domain", &data("power2.json"), "--xi", "0,0", "--v", "e2"],
        vec!["rescale", "--domain", &data("ball.json"), "--xi", "e1", "--v", "e2", "--steps", "3"],
        vec!["normalize", "--domain", &data("ball.json"), "--point", "0.9*e1"],
        vec!["hausdorff", "--a", &data("ball.json"), "--b", &data("ball2.json"), "--R", "10"],
        vec!["bergman", "--d", "2", "--z", "0.1,0.2", "--v", "e1"],
        vec!["squeeze", "--domain", &data("ball.json"), "--point", "0.5*e1"],
    ]
    .iter()
    .map(|r| {
        let mut v = vec!["--config".to_string(), cfg.clone()];
        v.extend(r.iter().map(|s| s.to_string()));
        v
    })
    .collect();
    for args in &runs {
        let first = cli(args, None)?;
        let again = cli(args, None)?;
        let single = cli(args, Some("1"))?;
        check(first == again, || format!("{:?} differs between runs", &args[2..]))?;
        check(first == single, || format!("{:?} depends on the thread count", &args[2..]))?;
    }
    // --output writes the same bytes as stdout
    let out = dir.path().join("out.json");
    let mut args = runs[0].clone();
    args.splice(0..0, ["--output".to_string(), out.display().to_string()]);
    cli(&args, None)?;
    check(std::fs::read(&out).map_err(err)? == cli(&runs[0], None)?, || "--output differs from stdout".into())?;
    Ok(format!("{} commands, 3 runs each", runs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("closed-form half-plane distances", closed_form_geodesics, Some(Duration::from_secs(1))),
        ("Lyapunov exponents of Siegel geodesics", lyapunov_exponents, Some(Duration::from_secs(10))),
        ("boundary growth along the Siegel axis", boundary_growth, None),
        ("SPC exponent family", spc_family, Some(Duration::from_secs(30))),
        ("normalization into K_d", normalization, None),
        ("blow-up convergence of the ball", blowup, Some(Duration::from_secs(60))),
        ("distance bounds bracket the ball distance", sandwich, None),
        ("Bergman curvature of the ball", bergman, Some(Duration::from_secs(10))),
        ("metric axioms", metric_axioms, None),
        ("byte-identical CLI output", determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(msg), Some(limit)) if took > *limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} ({took:.2?})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg} ({took:.2?})", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
