//! Kobayashi distances on model domains and two-sided bounds on general
//! convex domains.
//!
//! Distances use the curvature −4 normalisation, in which the half-plane
//! carries `½ arcosh(1 + |z − w|² / (2 Im z Im w))` and the disk
//! `K_D(0, r) = arctanh r`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::geometry::{closest_boundary_point, delta_dir, hit_distance, supporting_functional};
use crate::linalg::{basis, c, herm, norm, sphere_directions, CVector, I};

/// Certified interval for a Kobayashi distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub lower: f64,
    pub upper: f64,
    pub witness: String,
}

/// Distance from the invariants `N = tanh²(d) |S|²` and `|S|²`, where
/// `|S|² − N = ρ(z) ρ(w)`.
///
/// Short distances go through `arctanh`; long ones use
/// `d = log(|S| + √N) − ½ log(ρ(z) ρ(w))`, which stays accurate when
/// `tanh d` rounds to 1.
fn dist_from_invariants(n: f64, s2: f64, rho_z: f64, rho_w: f64) -> f64 {
    let s = s2.sqrt();
    let rn = n.max(0.0).sqrt();
    let t = rn / s;
    if t < 0.5 {
        t.atanh()
    } else {
        (s + rn).ln() - 0.5 * (rho_z.ln() + rho_w.ln())
    }
}

/// Whether `(z, w)` is out of lexicographic order. The invariants single out
/// their first argument, so evaluating pairs in a fixed order makes the
/// distances exactly symmetric.
fn out_of_order(z: &[Complex64], w: &[Complex64]) -> bool {
    for (a, b) in z.iter().zip(w) {
        let ord = a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
        if ord != std::cmp::Ordering::Equal {
            return ord == std::cmp::Ordering::Greater;
        }
    }
    false
}

/// Kobayashi distance of the unit disk.
pub fn dist_disk(z: Complex64, w: Complex64) -> Result<f64> {
    for p in [z, w] {
        if !(p.norm() < 1.0) {
            return Err(Error::OutOfDomain(format!("|{p}| >= 1 is outside the unit disk")));
        }
    }
    let (z, w) = if out_of_order(&[z], &[w]) { (w, z) } else { (z, w) };
    let delta = w - z;
    let s = Complex64::new(1.0, 0.0) - z.conj() * w;
    let n = (1.0 - z.norm_sqr()) * delta.norm_sqr() + (z.conj() * delta).norm_sqr();
    Ok(dist_from_invariants(n, s.norm_sqr(), 1.0 - z.norm_sqr(), 1.0 - w.norm_sqr()))
}

/// Kobayashi distance of the upper half-plane.
pub fn dist_halfplane(z: Complex64, w: Complex64) -> Result<f64> {
    for p in [z, w] {
        if !(p.im > 0.0) {
            return Err(Error::OutOfDomain(format!("{p} is not in the upper half-plane")));
        }
    }
    let u = (z - w).norm_sqr() / (2.0 * z.im * w.im);
    Ok(0.5 * (u + (u * (u + 2.0)).sqrt()).ln_1p())
}

fn check_pair(d: usize, z: &CVector, w: &CVector) -> Result<()> {
    for p in [z, w] {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
    }
    Ok(())
}

/// Kobayashi distance of the unit ball `B_d`.
pub fn dist_ball(d: usize, z: &CVector, w: &CVector) -> Result<f64> {
    check_pair(d, z, w)?;
    let (z, w) = if out_of_order(z.as_slice(), w.as_slice()) { (w, z) } else { (z, w) };
    let rz = 1.0 - z.norm_squared();
    let rw = 1.0 - w.norm_squared();
    if !(rz > 0.0 && rw > 0.0) {
        return Err(Error::OutOfDomain("point outside the unit ball".into()));
    }
    let delta = w - z;
    let s = Complex64::new(1.0, 0.0) - herm(z, w);
    let n = rz * delta.norm_squared() + herm(&delta, z).norm_sqr();
    Ok(dist_from_invariants(n, s.norm_sqr(), rz, rw))
}

/// The Cayley map `P_d → B_d`,
/// `z ↦ ((z_1 − i)/(z_1 + i), 2 z' / (z_1 + i))`.
pub fn cayley(z: &CVector) -> CVector {
    let den = z[0] + I;
    let mut out = z.map(|a| 2.0 * a / den);
    out[0] = (z[0] - I) / den;
    out
}

/// Inverse of [`cayley`].
pub fn cayley_inverse(b: &CVector) -> CVector {
    let one = c(1.0, 0.0);
    let den = one - b[0];
    let mut out = b.map(|a| I * a / den);
    out[0] = I * (one + b[0]) / den;
    out
}

/// Defining function `Im z_1 − |z'|²` of the Siegel domain.
pub fn siegel_rho(z: &CVector) -> f64 {
    z[0].im - z.rows(1, z.len() - 1).norm_squared()
}

/// Kobayashi distance of the Siegel domain `P_d`.
///
/// Equal to `dist_ball(cayley(z), cayley(w))`, evaluated from invariants
/// pulled back to `P_d` so that points far up the paraboloid (which the
/// Cayley map sends within rounding of the sphere) keep full accuracy.
pub fn dist_siegel(d: usize, z: &CVector, w: &CVector) -> Result<f64> {
    check_pair(d, z, w)?;
    let (z, w) = if out_of_order(z.as_slice(), w.as_slice()) { (w, z) } else { (z, w) };
    let rz = siegel_rho(z);
    let rw = siegel_rho(w);
    if !(rz > 0.0 && rw > 0.0) {
        return Err(Error::OutOfDomain("point outside the Siegel domain".into()));
    }
    let delta = w - z;
    let (zp, wp, dp) = (z.rows(1, d - 1), w.rows(1, d - 1), delta.rows(1, d - 1));
    let inner = |a: &nalgebra::DVectorView<Complex64>, b: &nalgebra::DVectorView<Complex64>| {
        a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>()
    };
    let s = (z[0] - w[0].conj()) / (2.0 * I) - inner(&zp, &wp);
    let b = I * delta[0].conj() / 2.0 - inner(&zp, &dp);
    let n = b.norm_sqr() + rz * dp.norm_squared();
    Ok(dist_from_invariants(n, s.norm_sqr(), rz, rw))
}

// ---------------------------------------------------------------------------
// bounds on general domains

fn require_interior(domain: &ConvexDomain, z: &CVector) -> Result<()> {
    domain.check_dim(z)?;
    let m = domain.margin(z);
    if m > 0.0 {
        Ok(())
    } else {
        Err(Error::NotInterior { margin: m })
    }
}

/// Lower bound with a description of the best separating functional.
#[derive(Debug, Clone)]
pub struct LowerBound {
    pub value: f64,
    pub witness: String,
    /// `false` when no candidate hyperplane separated the points.
    pub separated: bool,
}

/// Lower bound from supporting hyperplanes: for each candidate boundary
/// point `ξ` with supporting functional `P: Ω → H`, `K_Ω(z_1, z_2)` is at
/// least `K_H(P z_1, P z_2) ≥ ½ |log |P z_1 / P z_2||`; for `ξ` on the
/// complex line through the points, the line bound
/// `½ |log(|z_1 − ξ| / |z_2 − ξ|)|` also applies.
pub fn lower_bound_hyperplane(domain: &ConvexDomain, z1: &CVector, z2: &CVector, tol: &Tolerances) -> Result<LowerBound> {
    require_interior(domain, z1)?;
    require_interior(domain, z2)?;
    let diff = z2 - z1;
    let len = norm(&diff);
    if len == 0.0 {
        return Ok(LowerBound { value: 0.0, witness: "identical points".into(), separated: false });
    }
    let u = diff.unscale(len);

    let mut candidates: Vec<(CVector, &'static str)> = Vec::new();
    if let Some(t) = hit_distance(domain, z1, &(-&u), tol) {
        candidates.push((z1 - u.scale(t), "line"));
    }
    if let Some(t) = hit_distance(domain, z2, &u, tol) {
        candidates.push((z2 + u.scale(t), "line"));
    }
    let frame: Vec<CVector> = (0..domain.dim()).map(|k| basis(domain.dim(), k)).collect();
    for z in [z1, z2] {
        if let Ok(cp) = closest_boundary_point(domain, z, &frame, tol) {
            candidates.push((cp.point, "closest"));
        }
    }
    let mid = (z1 + z2).unscale(2.0);
    for a in sphere_directions(2 * domain.dim(), 32) {
        let dir = crate::linalg::from_real_coords(&a, &frame);
        if let Some(t) = hit_distance(domain, &mid, &dir, tol) {
            candidates.push((&mid + dir.scale(t), "sample"));
        }
    }

    let scores: Vec<(f64, String)> = candidates
        .par_iter()
        .map(|(xi, kind)| score_candidate(domain, z1, z2, xi, kind, tol))
        .collect();
    let mut best = LowerBound { value: 0.0, witness: "no separating hyperplane".into(), separated: false };
    for (v, w) in scores {
        if v > best.value {
            best = LowerBound { value: v, witness: w, separated: true };
        }
    }
    Ok(best)
}

fn score_candidate(domain: &ConvexDomain, z1: &CVector, z2: &CVector, xi: &CVector, kind: &str, tol: &Tolerances) -> (f64, String) {
    let Ok(p) = supporting_functional(domain, xi, tol) else {
        return (0.0, String::new());
    };
    let (p1, p2) = (p.eval(z1), p.eval(z2));
    let mut best = 0.0;
    let mut how = "";
    if p1.im > 0.0 && p2.im > 0.0 {
        if let Ok(v) = dist_halfplane(p1, p2) {
            best = v;
            how = "half-plane image";
        }
        let v = 0.5 * (p1.norm() / p2.norm()).ln().abs();
        if v > best {
            best = v;
            how = "modulus ratio";
        }
    }
    if kind == "line" {
        let v = 0.5 * (norm(&(z1 - xi)) / norm(&(z2 - xi))).ln().abs();
        if v > best {
            best = v;
            how = "line projection";
        }
    }
    let xs: Vec<String> = xi.iter().map(|a| format!("{:.6}{:+.6}i", a.re, a.im)).collect();
    (best, format!("{how} at {kind} boundary point ({})", xs.join(", ")))
}

/// Upper bound with a description of how it was obtained.
#[derive(Debug, Clone)]
pub struct UpperBound {
    pub value: f64,
    pub witness: String,
}

/// Shape of the intersection of the domain with a complex line.
enum Slice {
    /// Disk with center and radius in the line coordinate `λ`.
    Disk { center: Complex64, radius: f64 },
    /// `{λ : Im(rot (λ − anchor)) > 0}`.
    HalfPlane { anchor: Complex64, rot: Complex64 },
    Other,
}

fn classify_slice(domain: &ConvexDomain, base: &CVector, u: &CVector, tol: &Tolerances) -> Slice {
    let n = tol.slice_samples.max(8);
    let hits: Vec<Option<Complex64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
            hit_distance(domain, base, &u.map(|a| a * e), tol).map(|t| e * t)
        })
        .collect();
    let finite: Vec<Complex64> = hits.iter().flatten().copied().collect();
    if finite.len() < 3 {
        return Slice::Other;
    }
    let scale = finite.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if finite.len() == n {
        // algebraic circle fit |p|² + D x + E y + F = 0
        let m = nalgebra::DMatrix::from_fn(n, 3, |i, j| match j {
            0 => finite[i].re,
            1 => finite[i].im,
            _ => 1.0,
        });
        let rhs = nalgebra::DVector::from_fn(n, |i, _| -finite[i].norm_sqr());
        let Ok(sol) = m.svd(true, true).solve(&rhs, 1e-14) else {
            return Slice::Other;
        };
        let center = c(-sol[0] / 2.0, -sol[1] / 2.0);
        let r2 = center.norm_sqr() - sol[2];
        if !(r2 > 0.0) {
            return Slice::Other;
        }
        let radius = r2.sqrt();
        let resid = finite.iter().map(|p| ((p - center).norm() - radius).abs()).fold(0.0, f64::max);
        if resid <= tol.slice_fit_tol * radius {
            // shrink so the disk stays inside the slice despite fit error
            let inner = radius - resid - tol.slice_fit_tol * radius;
            return Slice::Disk { center, radius: inner };
        }
        return Slice::Other;
    }
    // half-plane: the finite hits are collinear and the origin lies on one side
    let mean = finite.iter().sum::<Complex64>() / finite.len() as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &finite {
        let q = p - mean;
        sxx += q.re * q.re;
        sxy += q.re * q.im;
        syy += q.im * q.im;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = Complex64::from_polar(1.0, angle);
    let rot0 = dir.conj();
    let resid = finite.iter().map(|p| (rot0 * (p - mean)).im.abs()).fold(0.0, f64::max);
    if resid > tol.slice_fit_tol * scale.max(1.0) {
        return Slice::Other;
    }
    // orient so the base point (λ = 0) is on the positive side
    let side = (rot0 * (Complex64::new(0.0, 0.0) - mean)).im;
    let rot = if side > 0.0 { rot0 } else { -rot0 };
    // push the line inward to absorb fit error
    let anchor = mean + I * rot.conj() * (resid + tol.slice_fit_tol * scale.max(1.0));
    Slice::HalfPlane { anchor, rot }
}

/// Upper bound on `K_Ω(z_1, z_2)`.
///
/// When the complex line through the points cuts the domain in a disk or a
/// half-plane the slice distance is used; it is an upper bound by the
/// distance-decreasing property of the inclusion and equals the distance on
/// models where the slice is a complex geodesic. Otherwise the segment is
/// split into pieces, each inside a disk of the slice centered at its
/// midpoint, and the disk distances are summed.
pub fn upper_bound_chain(domain: &ConvexDomain, z1: &CVector, z2: &CVector, tol: &Tolerances) -> Result<UpperBound> {
    require_interior(domain, z1)?;
    require_interior(domain, z2)?;
    let diff = z2 - z1;
    let len = norm(&diff);
    if len == 0.0 {
        return Ok(UpperBound { value: 0.0, witness: "identical points".into() });
    }
    let u = diff.unscale(len);
    let l1 = Complex64::new(0.0, 0.0);
    let l2 = Complex64::new(len, 0.0);
    match classify_slice(domain, z1, &u, tol) {
        Slice::Disk { center, radius } => {
            let a = (l1 - center) / radius;
            let b = (l2 - center) / radius;
            if a.norm() < 1.0 && b.norm() < 1.0 {
                return Ok(UpperBound { value: dist_disk(a, b)?, witness: format!("disk slice of radius {radius:.9}") });
            }
        }
        Slice::HalfPlane { anchor, rot } => {
            let a = rot * (l1 - anchor);
            let b = rot * (l2 - anchor);
            if a.im > 0.0 && b.im > 0.0 {
                return Ok(UpperBound { value: dist_halfplane(a, b)?, witness: "half-plane slice".into() });
            }
        }
        Slice::Other => {}
    }
    chain(domain, z1, &u, len, tol)
}

fn chain(domain: &ConvexDomain, z1: &CVector, u: &CVector, len: f64, tol: &Tolerances) -> Result<UpperBound> {
    let eval = |n: usize| -> f64 {
        let h = len / n as f64;
        let pieces: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|j| {
                let m = z1 + u.scale((j as f64 + 0.5) * h);
                match delta_dir(domain, &m, u, tol) {
                    Ok(r) if 0.5 * h < r => {
                        let x = 0.5 * h / r;
                        dist_disk(c(-x, 0.0), c(x, 0.0)).unwrap_or(f64::INFINITY)
                    }
                    _ => f64::INFINITY,
                }
            })
            .collect();
        pieces.iter().sum()
    };
    let mut n = 1;
    let mut value = eval(n);
    while !value.is_finite() && n < tol.chain_max_pieces {
        n *= 2;
        value = eval(n);
    }
    while n < tol.chain_max_pieces {
        let next = eval(2 * n);
        n *= 2;
        let improvement = value - next;
        if next < value {
            value = next;
        }
        if improvement < tol.chain_improvement {
            break;
        }
    }
    Ok(UpperBound { value, witness: format!("chain of {n} centered slice disks") })
}

/// Both bounds; fails with `Internal` if they cross beyond rounding.
pub fn dist_bounds(domain: &ConvexDomain, z1: &CVector, z2: &CVector, tol: &Tolerances) -> Result<DistanceBounds> {
    let lo = lower_bound_hyperplane(domain, z1, z2, tol)?;
    let up = upper_bound_chain(domain, z1, z2, tol)?;
    let mut lower = lo.value;
    if lower > up.value {
        if lower - up.value <= 1e-12 * (1.0 + up.value) {
            lower = up.value;
        } else {
            return Err(Error::Internal(format!("lower bound {lower} exceeds upper bound {}", up.value)));
        }
    }
    Ok(DistanceBounds { lower, upper: up.value, witness: format!("lower: {}; upper: {}", lo.witness, up.witness) })
}

/// Bounds on the infinitesimal metric `k_Ω(z; v)`.
///
/// The upper bound comes from the affine disk `λ ↦ z + λ δ(z; v) v/|v|`;
/// the lower bound extrapolates `lower(z, z + h v/|v|)/h` linearly to
/// `h = 0` from `h ∈ {1e-3, 1e-4, 1e-5}`.
pub fn infinitesimal_estimate(domain: &ConvexDomain, z: &CVector, v: &CVector, tol: &Tolerances) -> Result<DistanceBounds> {
    require_interior(domain, z)?;
    domain.check_dim(v)?;
    let vn = norm(v);
    if vn == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let u = v.unscale(vn);
    let r = delta_dir(domain, z, &u, tol)?;
    let upper = vn / r;
    let hs = [1e-3, 1e-4, 1e-5];
    let mut qs = Vec::with_capacity(3);
    for &h in &hs {
        let w = z + u.scale(h);
        qs.push(lower_bound_hyperplane(domain, z, &w, tol)?.value / h);
    }
    let mh = hs.iter().sum::<f64>() / 3.0;
    let mq = qs.iter().sum::<f64>() / 3.0;
    let sxy: f64 = hs.iter().zip(&qs).map(|(h, q)| (h - mh) * (q - mq)).sum();
    let sxx: f64 = hs.iter().map(|h| (h - mh).powi(2)).sum();
    let slope = sxy / sxx;
    let lower = ((mq - slope * mh) * vn).clamp(0.0, upper);
    Ok(DistanceBounds { lower, upper, witness: format!("upper: affine disk of radius {r:.9}; lower: hyperplane difference quotients") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cvec;

    #[test]
    fn closed_forms() {
        assert_eq!(dist_disk(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 0.0);
        assert!((dist_disk(c(0.0, 0.0), c(0.5, 0.0)).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        assert!((dist_halfplane(I, c(0.0, 4.0)).unwrap() - 0.5 * 4f64.ln()).abs() < 1e-15);
        assert!((dist_halfplane(I, c(2f64.sqrt(), 1.0)).unwrap() - 0.5 * 2f64.acosh()).abs() < 1e-15);
        let z = cvec(&[(0.0, 1.0), (0.0, 0.0)]);
        let w = cvec(&[(0.0, 2f64.exp()), (0.0, 0.0)]);
        assert!((dist_siegel(2, &z, &w).unwrap() - 1.0).abs() < 1e-15);
        assert!((dist_siegel(1, &cvec(&[(0.0, 1.0)]), &cvec(&[(0.0, 4.0)])).unwrap() - 0.5 * 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(dist_disk(c(1.0, 0.0), c(0.0, 0.0)), Err(Error::OutOfDomain(_))));
        assert!(matches!(dist_halfplane(c(0.0, -1.0), I), Err(Error::OutOfDomain(_))));
        let z = cvec(&[(0.0, 1.0), (2.0, 0.0)]);
        assert!(dist_siegel(2, &z, &z).is_err());
    }

    #[test]
    fn cayley_round_trip() {
        let z = cvec(&[(0.3, 2.0), (0.5, -0.7)]);
        let b = cayley(&z);
        assert!(b.norm() < 1.0);
        assert!((cayley_inverse(&b) - &z).norm() < 1e-14);
        assert!(cayley(&cvec(&[(0.0, 1.0), (0.0, 0.0)])).norm() < 1e-16);
    }

    #[test]
    fn siegel_matches_ball_after_cayley() {
        let pts = [
            cvec(&[(0.3, 2.0), (0.5, -0.7)]),
            cvec(&[(-1.0, 0.8), (0.1, 0.2)]),
            cvec(&[(2.0, 5.0), (-1.0, 1.5)]),
        ];
        for z in &pts {
            for w in &pts {
                let a = dist_siegel(2, z, w).unwrap();
                let b = dist_ball(2, &cayley(z), &cayley(w)).unwrap();
                assert!((a - b).abs() < 1e-12 * (1.0 + a), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn bounds_on_models() {
        let tol = Tolerances::default();
        let s = ConvexDomain::siegel(2);
        let z = cvec(&[(0.0, 1.0), (0.0, 0.0)]);
        let w = cvec(&[(0.0, 2f64.exp()), (0.0, 0.0)]);
        let b = dist_bounds(&s, &z, &w, &tol).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-9, "{b:?}");
        assert!((b.upper - 1.0).abs() < 1e-6, "{b:?}");
        let ball = ConvexDomain::unit_ball(2);
        let p = cvec(&[(0.3, 0.0), (0.0, 0.0)]);
        let same = dist_bounds(&ball, &p, &p, &tol).unwrap();
        assert_eq!((same.lower, same.upper), (0.0, 0.0));
        let q = cvec(&[(0.5, 0.0), (0.0, 0.0)]);
        let b = dist_bounds(&ball, &CVector::zeros(2), &q, &tol).unwrap();
        assert!((b.upper - 0.5f64.atanh()).abs() < 1e-3);
        assert!(b.lower <= 0.5f64.atanh());
    }

    #[test]
    fn chain_handles_non_model_slices() {
        let tol = Tolerances::default();
        let cube = ConvexDomain::unit_cube(1);
        let z1 = cvec(&[(-0.5, 0.0)]);
        let z2 = cvec(&[(0.5, 0.0)]);
        let b = dist_bounds(&cube, &z1, &z2, &tol).unwrap();
        // the square sits between the unit disk and the disk of radius √2
        let inner = dist_disk(c(-0.5 / 2f64.sqrt(), 0.0), c(0.5 / 2f64.sqrt(), 0.0)).unwrap();
        assert!(b.upper >= inner - 1e-9);
        assert!(b.upper <= dist_disk(c(-0.5, 0.0), c(0.5, 0.0)).unwrap() + 1e-9);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn infinitesimal_examples() {
        let tol = Tolerances::default();
        let s = ConvexDomain::siegel(2);
        let z = cvec(&[(0.0, 1.0), (0.0, 0.0)]);
        let est = infinitesimal_estimate(&s, &z, &basis(2, 1), &tol).unwrap();
        assert!((est.upper - 1.0).abs() < 1e-9);
        let disk = ConvexDomain::unit_ball(1);
        let one = cvec(&[(1.0, 0.0)]);
        let a = infinitesimal_estimate(&disk, &CVector::zeros(1), &one, &tol).unwrap();
        assert!((a.upper - 1.0).abs() < 1e-12);
        assert!(a.lower > 0.0 && a.lower <= a.upper);
        let b = infinitesimal_estimate(&disk, &CVector::zeros(1), &one.scale(2.0), &tol).unwrap();
        assert!((b.upper - 2.0 * a.upper).abs() < 1e-12);
        assert!((b.lower - 2.0 * a.lower).abs() < 1e-12);
    }
}
