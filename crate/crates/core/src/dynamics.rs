//! Geodesic rays in the model domains, shifted-ray distance curves and
//! Lyapunov exponents of geodesic pairs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::fit::{fit_slope, linspace, ExponentFit};
use crate::geometry::{delta_dir, golden_min};
use crate::linalg::{basis, c, norm, CVector, I};
use crate::metrics::{dist_ball, dist_halfplane, dist_siegel};

/// Model domain in which a ray lives and distances are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Siegel,
    Ball,
}

#[derive(Clone)]
pub enum RayKind {
    /// `t ↦ v + (α + i(e^{2t} + |v|²)) e_1` with `v ∈ span{e_2, ..., e_d}`.
    SiegelVertical { v: CVector, alpha: f64 },
    /// `t ↦ tanh(t) u` for a unit vector `u`.
    BallRadial { direction: CVector },
    /// Any curve, measured in the given model.
    Custom { curve: Arc<dyn Fn(f64) -> CVector + Send + Sync>, model: Model },
}

impl fmt::Debug for RayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayKind::SiegelVertical { v, alpha } => write!(f, "SiegelVertical(v={:?}, alpha={alpha})", v.as_slice()),
            RayKind::BallRadial { direction } => write!(f, "BallRadial({:?})", direction.as_slice()),
            RayKind::Custom { model, .. } => write!(f, "Custom({model:?})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicRay {
    dim: usize,
    kind: RayKind,
}

impl GeodesicRay {
    /// Vertical geodesic of the Siegel domain `P_d` over `v`, shifted by `α`
    /// along `Re z_1`.
    pub fn siegel_vertical(dim: usize, v: CVector, alpha: f64) -> Result<Self> {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        if v[0] != c(0.0, 0.0) {
            return Err(Error::DomainError("the base vector must lie in span{e_2, ..., e_d}".into()));
        }
        if !alpha.is_finite() {
            return Err(Error::DomainError("height offset must be finite".into()));
        }
        Ok(Self { dim, kind: RayKind::SiegelVertical { v, alpha } })
    }

    /// The ray `i e^{2t} e_1`.
    pub fn siegel_axis(dim: usize) -> Self {
        Self { dim, kind: RayKind::SiegelVertical { v: CVector::zeros(dim), alpha: 0.0 } }
    }

    pub fn ball_radial(direction: CVector) -> Result<Self> {
        let n = norm(&direction);
        if n == 0.0 {
            return Err(Error::ZeroDirection);
        }
        Ok(Self { dim: direction.len(), kind: RayKind::BallRadial { direction: direction.unscale(n) } })
    }

    pub fn custom(dim: usize, model: Model, curve: Arc<dyn Fn(f64) -> CVector + Send + Sync>) -> Self {
        Self { dim, kind: RayKind::Custom { curve, model } }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RayKind {
        &self.kind
    }

    pub fn model(&self) -> Model {
        match &self.kind {
            RayKind::SiegelVertical { .. } => Model::Siegel,
            RayKind::BallRadial { .. } => Model::Ball,
            RayKind::Custom { model, .. } => *model,
        }
    }

    pub fn point(&self, t: f64) -> CVector {
        match &self.kind {
            RayKind::SiegelVertical { v, alpha } => {
                let mut z = v.clone();
                z[0] = c(*alpha, (2.0 * t).exp() + v.norm_squared());
                z
            }
            RayKind::BallRadial { direction } => direction.scale(t.tanh()),
            RayKind::Custom { curve, .. } => curve(t),
        }
    }
}

/// Boundary height of the slice `C·e_1 + v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceProfile {
    /// `+∞` when the slice misses the domain inside the clip ball.
    pub alpha_v: f64,
}

/// Finds `α_v` with `{z e_1 + v : Im z > α_v} = Ω ∩ (C·e_1 + v)` by
/// bisection on the height `h` of `h i e_1 + v`.
pub fn slice_alpha(domain: &ConvexDomain, v: &CVector, tol: &Tolerances) -> Result<SliceProfile> {
    domain.check_dim(v)?;
    let e1 = basis(domain.dim(), 0);
    let member = |h: f64| domain.contains(&(v + e1.map(|a| a * I * h)));
    let clip = domain.clip_radius();
    let mut hi = 1.0;
    while !member(hi) {
        if hi > clip {
            return Ok(SliceProfile { alpha_v: f64::INFINITY });
        }
        hi *= 2.0;
    }
    let mut lo = hi - 1.0;
    let mut step = 1.0;
    while member(lo) {
        if -lo > clip {
            return Ok(SliceProfile { alpha_v: f64::NEG_INFINITY });
        }
        hi = lo;
        step *= 2.0;
        lo -= step;
    }
    for _ in 0..tol.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if member(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SliceProfile { alpha_v: 0.5 * (lo + hi) })
}

/// `s_{t,v} = t + ½ log(1 − α_v e^{−2t})`.
pub fn time_shift(t: f64, alpha_v: f64) -> Result<f64> {
    let x = alpha_v * (-2.0 * t).exp();
    if !(x < 1.0) {
        return Err(Error::DomainError(format!("e^(2t) must exceed alpha_v (t = {t}, alpha_v = {alpha_v})")));
    }
    Ok(t + 0.5 * (-x).ln_1p())
}

/// One sample of a distance curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub distance: f64,
    /// Formula used: `halfplane-slice`, `siegel` or `ball`.
    pub path: String,
}

fn trailing_zero(z: &CVector) -> bool {
    z.iter().skip(1).all(|a| *a == c(0.0, 0.0))
}

/// Kobayashi distance between two points of a model domain, with the name
/// of the formula used.
pub fn model_distance(model: Model, z: &CVector, w: &CVector) -> Result<(f64, &'static str)> {
    let d = z.len();
    match model {
        Model::Siegel if trailing_zero(z) && trailing_zero(w) => Ok((dist_halfplane(z[0], w[0])?, "halfplane-slice")),
        Model::Siegel => Ok((dist_siegel(d, z, w)?, "siegel")),
        Model::Ball => Ok((dist_ball(d, z, w)?, "ball")),
    }
}

fn check_rays(ray1: &GeodesicRay, ray2: &GeodesicRay) -> Result<Model> {
    if ray1.dim != ray2.dim {
        return Err(Error::DimensionMismatch { expected: ray1.dim, got: ray2.dim });
    }
    if ray1.model() != ray2.model() {
        return Err(Error::DomainError("rays live in different model domains".into()));
    }
    Ok(ray1.model())
}

/// `K(γ_1(t), γ_2(t + T))` on a strictly increasing grid.
pub fn pair_distance_curve(ray1: &GeodesicRay, ray2: &GeodesicRay, t_grid: &[f64], shift: f64) -> Result<Vec<CurvePoint>> {
    let model = check_rays(ray1, ray2)?;
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::GridError);
    }
    t_grid
        .iter()
        .map(|&t| {
            let (distance, path) = model_distance(model, &ray1.point(t), &ray2.point(t + shift))?;
            Ok(CurvePoint { t, distance, path: path.to_string() })
        })
        .collect()
}

/// Least-squares slope of `log K(γ_1(t), γ_2(t + T))` against `t`.
pub fn lyapunov_exponent(
    ray1: &GeodesicRay,
    ray2: &GeodesicRay,
    t_min: f64,
    t_max: f64,
    n: usize,
    shift: f64,
) -> Result<ExponentFit> {
    if !(t_max > t_min) {
        return Err(Error::GridError);
    }
    let grid = linspace(t_min, t_max, n);
    let curve = pair_distance_curve(ray1, ray2, &grid, shift)?;
    if let Some(p) = curve.iter().find(|p| !(p.distance >= 1e-300)) {
        return Err(Error::DegenerateRays { distance: p.distance });
    }
    let ys: Vec<f64> = curve.iter().map(|p| p.distance.ln()).collect();
    fit_slope(&grid, &ys, (t_min, t_max))
}

/// Shift `T ∈ [lo, hi]` minimising `K(γ_1(t_end), γ_2(t_end + T))`: a
/// 201-point grid followed by golden-section refinement.
pub fn optimal_shift(ray1: &GeodesicRay, ray2: &GeodesicRay, t_end: f64, lo: f64, hi: f64) -> Result<f64> {
    let model = check_rays(ray1, ray2)?;
    let p = ray1.point(t_end);
    let f = |s: f64| model_distance(model, &p, &ray2.point(t_end + s)).map(|d| d.0).unwrap_or(f64::INFINITY);
    let n = 201;
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f(lo));
    for k in 1..n {
        let s = lo + k as f64 * h;
        let v = f(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    let a = (best.0 - h).max(lo);
    let b = (best.0 + h).min(hi);
    Ok(golden_min(&f, a, b, 1e-12, best).0)
}

/// Checks `Ω ∩ span{e_2, ..., e_d} = ∅` and `Ω ∩ C·e_1 = {z e_1 : Im z > 0}`
/// at 16 probe points.
fn check_normalization(domain: &ConvexDomain) -> Result<()> {
    let d = domain.dim();
    let e1 = basis(d, 0);
    let fail = |msg: String| Err(Error::NormalizationError(msg));
    // transverse span: origin and points along each trailing axis
    let mut transverse = vec![CVector::zeros(d)];
    for k in 1..d {
        for s in [c(0.5, 0.0), c(0.0, -2.0), c(-3.0, 1.0)] {
            transverse.push(basis(d, k).map(|a| a * s));
        }
    }
    for p in transverse.iter().take(4) {
        if domain.contains(p) {
            return fail(format!("domain meets span(e_2..e_d) at {:?}", p.as_slice()));
        }
    }
    let inside = [c(0.0, 1e-3), c(0.0, 1.0), c(2.0, 0.5), c(-5.0, 3.0), c(0.0, 100.0), c(10.0, 1e-2)];
    let outside = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1e-3), c(-2.0, -1.0), c(0.0, -100.0), c(7.0, -0.5)];
    for l in inside {
        if !domain.contains(&e1.map(|a| a * l)) {
            return fail(format!("{l} e_1 should be inside"));
        }
    }
    for l in outside {
        if domain.contains(&e1.map(|a| a * l)) {
            return fail(format!("{l} e_1 should be outside"));
        }
    }
    Ok(())
}

/// Slope of `log δ(i e^r e_1; v)` against `r` over `r ∈ [2, 10]`, 32 samples.
pub fn boundary_growth_exponent(domain: &ConvexDomain, v: &CVector, tol: &Tolerances) -> Result<ExponentFit> {
    domain.check_dim(v)?;
    let vn = norm(v);
    if vn == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let transverse = v.iter().skip(1).map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if transverse <= 1e-10 * vn {
        return Err(Error::NormalizationError("direction must be transverse to C·e_1".into()));
    }
    check_normalization(domain)?;
    let rs = linspace(2.0, 10.0, 32);
    let e1 = basis(domain.dim(), 0);
    let mut ys = Vec::with_capacity(rs.len());
    for &r in &rs {
        let z = e1.map(|a| a * I * r.exp());
        ys.push(delta_dir(domain, &z, v, tol)?.ln());
    }
    fit_slope(&rs, &ys, (2.0, 10.0))
}
