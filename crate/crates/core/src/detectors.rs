//! Boundary-exponent test for strong pseudoconvexity, an affine lower bound
//! for the squeezing function, and the Bergman curvature of the ball.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::config::{Tolerances, VerdictConfig};
use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::fit::{fit_slope, geomspace, ExponentFit};
use crate::geometry::{closest_boundary_point, delta_dir, hit_distance, normal_component, supporting_functional};
use crate::linalg::{basis, complete_orthonormal, from_real_coords, norm, sphere_directions, sphere_directions_with_axes, CMatrix, CVector, I};

/// Default radii for [`spc_exponent`].
pub fn default_r_grid() -> Vec<f64> {
    geomspace(1e-6, 1e-2, 24)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    ConsistentWithSpc,
    Inconsistent(f64),
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::ConsistentWithSpc => "ConsistentWithSPC",
            Verdict::Inconsistent(_) => "Inconsistent",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpcVerdict {
    pub exponent_fit: ExponentFit,
    pub target: f64,
    pub verdict: Verdict,
}

impl Serialize for SpcVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            exponent: f64,
            half_width: f64,
            target: f64,
            verdict: &'a str,
        }
        Doc { exponent: self.exponent_fit.exponent, half_width: self.exponent_fit.half_width, target: self.target, verdict: self.verdict.label() }
            .serialize(s)
    }
}

/// Consistent when the fit is sharp enough and lands within
/// `max(band_sigmas · half_width, exponent_floor)` of the target.
pub fn classify(fit: &ExponentFit, cfg: &VerdictConfig) -> Verdict {
    if !(fit.half_width <= cfg.max_half_width) {
        return Verdict::Inconclusive;
    }
    let band = (cfg.band_sigmas * fit.half_width).max(cfg.exponent_floor);
    if (fit.exponent - cfg.target).abs() <= band {
        Verdict::ConsistentWithSpc
    } else {
        Verdict::Inconsistent(fit.exponent)
    }
}

/// Slope of `log δ(ξ + r n(ξ); v)` against `log r`.
pub fn spc_exponent(domain: &ConvexDomain, xi: &CVector, v: &CVector, r_grid: &[f64], tol: &Tolerances, cfg: &VerdictConfig) -> Result<SpcVerdict> {
    domain.check_dim(xi)?;
    domain.check_dim(v)?;
    let sf = supporting_functional(domain, xi, tol)?;
    if sf.nonsmooth {
        return Err(Error::NormalUndefined);
    }
    let vn = norm(v);
    if vn == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let v = v.unscale(vn);
    let inner = normal_component(&v, &sf.normal);
    if inner > 1e-10 {
        return Err(Error::NotTangential { inner });
    }
    if r_grid.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::GridError);
    }
    let deltas: Vec<Result<f64>> = r_grid.par_iter().map(|&r| delta_dir(domain, &(xi + sf.normal.scale(r)), &v, tol)).collect();
    let ys = deltas.into_iter().map(|d| d.map(f64::ln)).collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = r_grid.iter().map(|r| r.ln()).collect();
    let lo = r_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = r_grid.iter().copied().fold(0.0, f64::max);
    let fit = fit_slope(&xs, &ys, (lo, hi))?;
    let verdict = classify(&fit, cfg);
    Ok(SpcVerdict { exponent_fit: fit, target: cfg.target, verdict })
}

/// Where [`spc_global_scan`] looks: rays from `origin` (an interior point,
/// found automatically when absent), keeping boundary points within
/// `radius` of `anchor` when both are given.
#[derive(Debug, Clone, Default)]
pub struct ScanRegion {
    pub origin: Option<CVector>,
    pub anchor: Option<CVector>,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub xi_index: usize,
    pub dir_index: usize,
    pub xi: CVector,
    pub v: CVector,
    pub verdict: SpcVerdict,
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    /// Index into `rows` of the verdict farthest from the target exponent.
    pub worst: usize,
    /// Boundary samples skipped because the normal is undefined there or
    /// the tangential exponent could not be measured.
    pub skipped: usize,
}

impl ScanResult {
    pub fn worst_row(&self) -> &ScanRow {
        &self.rows[self.worst]
    }
}

/// Runs [`spc_exponent`] at `n_samples` boundary points over a unitary
/// frame of each complex tangent space.
pub fn spc_global_scan(domain: &ConvexDomain, n_samples: usize, region: &ScanRegion, tol: &Tolerances, cfg: &VerdictConfig) -> Result<ScanResult> {
    let d = domain.dim();
    if d < 2 {
        return Err(Error::DomainError("tangential exponents need d >= 2".into()));
    }
    let origin = match &region.origin {
        Some(o) => {
            domain.check_dim(o)?;
            o.clone()
        }
        None => domain.interior_point()?,
    };
    let m = domain.margin(&origin);
    if !(m > 0.0) {
        return Err(Error::NotInterior { margin: m });
    }
    let frame: Vec<CVector> = (0..d).map(|k| basis(d, k)).collect();
    let dirs: Vec<Vec<f64>> = sphere_directions_with_axes(2 * d, n_samples).into_iter().take(n_samples).collect();
    let mut points = Vec::with_capacity(dirs.len());
    for a in &dirs {
        let u = from_real_coords(a, &frame);
        let t = hit_distance(domain, &origin, &u, tol).ok_or(Error::UnboundedDomain)?;
        let xi = &origin + u.scale(t);
        if let (Some(anchor), Some(r)) = (&region.anchor, region.radius) {
            if norm(&(&xi - anchor)) > r {
                continue;
            }
        }
        points.push(xi);
    }
    let grid = default_r_grid();
    let per_point: Vec<Result<Option<Vec<ScanRow>>>> = points
        .par_iter()
        .enumerate()
        .map(|(i, xi)| {
            let sf = match supporting_functional(domain, xi, tol) {
                Ok(sf) if !sf.nonsmooth => sf,
                Ok(_) | Err(Error::NormalUndefined) => return Ok(None),
                Err(e) => return Err(e),
            };
            let tangents = complete_orthonormal(std::slice::from_ref(&sf.normal), d).split_off(1);
            let mut rows = Vec::with_capacity(tangents.len());
            for (j, v) in tangents.into_iter().enumerate() {
                match spc_exponent(domain, xi, &v, &grid, tol, cfg) {
                    Ok(verdict) => rows.push(ScanRow { xi_index: i, dir_index: j, xi: xi.clone(), v, verdict }),
                    Err(e) if e.is_input_error() => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(Some(rows))
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for r in per_point {
        match r? {
            Some(mut v) => rows.append(&mut v),
            None => skipped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::DomainError("no boundary sample admitted a tangential exponent".into()));
    }
    let gap = |r: &ScanRow| (r.verdict.exponent_fit.exponent - cfg.target).abs();
    let mut worst = 0;
    for (k, r) in rows.iter().enumerate() {
        if gap(r) > gap(&rows[worst]) {
            worst = k;
        }
    }
    Ok(ScanResult { rows, worst, skipped })
}

/// `r / R` for the largest ball about `p` inside the domain and the
/// smallest ball about `p` containing it; `z ↦ (z − p)/R` witnesses
/// `s_Ω(p) ≥ r/R`.
pub fn squeezing_lower_bound(domain: &ConvexDomain, p: &CVector, tol: &Tolerances) -> Result<f64> {
    domain.check_dim(p)?;
    let m = domain.margin(p);
    if !(m > 0.0) {
        return Err(Error::NotInterior { margin: m });
    }
    let d = domain.dim();
    let frame: Vec<CVector> = (0..d).map(|k| basis(d, k)).collect();
    let dirs = sphere_directions_with_axes(2 * d, tol.hausdorff_directions);
    let reach = |a: &[f64]| -> Option<f64> {
        let an = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u = from_real_coords(a, &frame).unscale(an);
        hit_distance(domain, p, &u, tol)
    };
    let hits: Vec<Option<f64>> = dirs.par_iter().map(|a| reach(a)).collect();
    let mut best = (0.0, 0);
    for (k, h) in hits.iter().enumerate() {
        let h = h.ok_or(Error::UnboundedDomain)?;
        if h > best.0 {
            best = (h, k);
        }
    }
    // local ascent on the sphere from the farthest sample
    let mut a = dirs[best.1].clone();
    let mut outer = best.0;
    let mut step = 0.1;
    while step > tol.refine_min_step {
        let mut improved = false;
        for j in 0..a.len() {
            for s in [1.0, -1.0] {
                let mut b = a.clone();
                b[j] += s * step;
                if let Some(h) = reach(&b) {
                    if h > outer {
                        outer = h;
                        let bn = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                        a = b.into_iter().map(|x| x / bn).collect();
                        improved = true;
                    }
                } else {
                    return Err(Error::UnboundedDomain);
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let inner = match domain.closed_form_delta(p) {
        Some(r) => r,
        None => closest_boundary_point(domain, p, &frame, tol)?.distance,
    };
    Ok((inner / outer).clamp(f64::MIN_POSITIVE, 1.0))
}

// ---------------------------------------------------------------------------
// Bergman curvature of the ball

const BERGMAN_INNER_STEP: f64 = 1e-4;
const BERGMAN_OUTER_STEP: f64 = 1e-2;

fn richardson2<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (4.0 * f(0.5 * h) - f(h)) / 3.0
}

fn richardson2_vec<F: Fn(f64) -> CVector>(f: F, h: f64) -> CVector {
    (f(0.5 * h).scale(4.0) - f(h)).unscale(3.0)
}

/// `D_u D_w φ` by central differences.
fn mixed_second<F: Fn(&CVector) -> f64>(phi: &F, z: &CVector, u: &CVector, w: &CVector, h: f64) -> f64 {
    richardson2(
        |h| {
            let pp = phi(&(z + u.scale(h) + w.scale(h)));
            let pm = phi(&(z + u.scale(h) - w.scale(h)));
            let mp = phi(&(z - u.scale(h) + w.scale(h)));
            let mm = phi(&(z - u.scale(h) - w.scale(h)));
            (pp - pm - mp + mm) / (4.0 * h * h)
        },
        h,
    )
}

/// Levi matrix `g_{ij̄} = ∂_i ∂_{j̄} φ` from real second differences.
fn levi_matrix<F: Fn(&CVector) -> f64>(phi: &F, z: &CVector, h: f64) -> CMatrix {
    let d = z.len();
    CMatrix::from_fn(d, d, |i, j| {
        let (a, b) = (basis(d, i), basis(d, j));
        let (ia, ib) = (a.map(|x| I * x), b.map(|x| I * x));
        let re = mixed_second(phi, z, &a, &b, h) + mixed_second(phi, z, &ia, &ib, h);
        let im = mixed_second(phi, z, &a, &ib, h) - mixed_second(phi, z, &ia, &b, h);
        Complex64::new(re, im) * 0.25
    })
}

/// Holomorphic sectional curvature `2 R(v, v̄, v, v̄) / g(v, v̄)²` of the
/// Bergman metric `∂∂̄ log K` of the unit ball, by finite differences.
pub fn ball_bergman_curvature(d: usize, z: &CVector, v: &CVector) -> Result<f64> {
    if z.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: z.len() });
    }
    if v.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.len() });
    }
    if !(norm(z) < 0.9) {
        return Err(Error::OutOfDomain(format!("|z| = {} is not below 0.9", norm(z))));
    }
    let vn = norm(v);
    if vn == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let v = v.unscale(vn);
    let iv = v.map(|x| I * x);
    let k = (d + 1) as f64;
    let phi = |w: &CVector| -k * (-w.norm_squared()).ln_1p();
    let g = |w: &CVector| levi_matrix(&phi, w, BERGMAN_INNER_STEP);
    let gv = |w: &CVector| -> CVector { g(w).transpose() * &v };
    let gvv = |w: &CVector| -> f64 {
        let m = g(w);
        (v.transpose() * m * v.conjugate())[(0, 0)].re
    };
    let h = BERGMAN_OUTER_STEP;
    // a_q = ∂_v g_{vq̄} = ½ (D_v − i D_{iv}) g_{vq̄}
    let dv = richardson2_vec(|h| (gv(&(z + v.scale(h))) - gv(&(z - v.scale(h)))).unscale(2.0 * h), h);
    let div = richardson2_vec(|h| (gv(&(z + iv.scale(h))) - gv(&(z - iv.scale(h)))).unscale(2.0 * h), h);
    let a: CVector = (dv - div.map(|x| I * x)).unscale(2.0);
    // ∂_v ∂_{v̄} g_{vv̄} = ¼ (D_v² + D_{iv}²) g_{vv̄}
    let g0 = gvv(z);
    let second = |u: &CVector| richardson2(|h| (gvv(&(z + u.scale(h))) - 2.0 * g0 + gvv(&(z - u.scale(h)))) / (h * h), h);
    let lap = 0.25 * (second(&v) + second(&iv));
    let gm = g(z);
    let ginv = gm.try_inverse().ok_or(Error::SingularMatrix { rcond: 0.0 })?;
    let quad = (a.transpose() * ginv * a.conjugate())[(0, 0)].re;
    let r = -lap + quad;
    Ok(2.0 * r / (g0 * g0))
}

/// Directions used by the curvature consistency check.
pub fn sample_unit_directions(d: usize, n: usize) -> Vec<CVector> {
    let frame: Vec<CVector> = (0..d).map(|k| basis(d, k)).collect();
    sphere_directions(2 * d, n).iter().map(|a| from_real_coords(a, &frame)).collect()
}
