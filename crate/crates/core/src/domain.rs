//! Declarative convex domains with membership, defining-margin and normal
//! oracles.
//!
//! Every domain is described by a concave *defining margin* `m` with
//! `Ω = {m > 0}`; the margin is positive inside, zero on the boundary and
//! negative outside.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linalg::{basis, c, AffineDoc, AffineMap, CMatrix, CVector, I};

type Buf = SmallVec<[Complex64; 8]>;

/// A convex function `f(Re z_1, z_2, ..., z_d)` bounding an epigraph
/// `{Im z_1 > f}`.
pub type ConvexFn = Arc<dyn Fn(f64, &[Complex64]) -> f64 + Send + Sync>;

/// The real half-space `{z : Re <z, normal> < offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: CVector,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: CVector, offset: f64) -> Self {
        Self { normal, offset }
    }

    fn margin(&self, z: &[Complex64]) -> f64 {
        let mut dot = 0.0;
        let mut nn = 0.0;
        for (a, n) in z.iter().zip(self.normal.iter()) {
            dot += (a * n.conj()).re;
            nn += n.norm_sqr();
        }
        (self.offset - dot) / nn.sqrt()
    }
}

#[derive(Clone)]
pub enum Shape {
    /// Euclidean ball.
    Ball { radius: f64, center: CVector },
    /// `{Im z_i > 0 for all i}`.
    HalfPlaneProduct,
    /// `{Im z_1 > sum_{i>=2} |z_i|^2}`.
    Siegel,
    /// `{Im z_1 > sum_{i>=2} |z_i|^{2 m_i}}`.
    PowerEpigraph { exponents: Vec<u32> },
    /// Intersection of real half-spaces.
    Polytope { faces: Vec<HalfSpace> },
    /// `{|z_i| < r_i}`.
    Polydisk { radii: Vec<f64> },
    /// `{Im z_1 > f(Re z_1, z_2, ..., z_d)}` for a user supplied convex `f`.
    Epigraph { f: ConvexFn, label: String },
    /// The image `A(Ω)`.
    AffineImage { map: AffineMap, base: Box<Shape> },
    Intersection(Vec<Shape>),
}

impl fmt::Debug for Shape {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Ball { radius, center } => fm
                .debug_struct("Ball")
                .field("radius", radius)
                .field("center", &center.as_slice())
                .finish(),
            Shape::HalfPlaneProduct => write!(fm, "HalfPlaneProduct"),
            Shape::Siegel => write!(fm, "Siegel"),
            Shape::PowerEpigraph { exponents } => write!(fm, "PowerEpigraph({exponents:?})"),
            Shape::Polytope { faces } => write!(fm, "Polytope({} faces)", faces.len()),
            Shape::Polydisk { radii } => write!(fm, "Polydisk({radii:?})"),
            Shape::Epigraph { label, .. } => write!(fm, "Epigraph({label})"),
            Shape::AffineImage { base, .. } => write!(fm, "AffineImage({base:?})"),
            Shape::Intersection(m) => write!(fm, "Intersection({m:?})"),
        }
    }
}

/// Outward data of the defining margin at a point.
#[derive(Debug, Clone)]
pub struct MarginGradient {
    /// Real gradient packed as `dm/dx_k + i dm/dy_k`; points into the domain.
    pub gradient: CVector,
    /// More than one constraint is active (vertex, edge or corner).
    pub nonsmooth: bool,
}

impl Shape {
    fn margin(&self, z: &[Complex64]) -> f64 {
        match self {
            Shape::Ball { radius, center } => {
                let r2: f64 = z.iter().zip(center.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
                radius - r2.sqrt()
            }
            Shape::HalfPlaneProduct => z.iter().map(|a| a.im).fold(f64::INFINITY, f64::min),
            Shape::Siegel => z[0].im - z[1..].iter().map(|a| a.norm_sqr()).sum::<f64>(),
            Shape::PowerEpigraph { exponents } => {
                z[0].im
                    - z[1..]
                        .iter()
                        .zip(exponents)
                        .map(|(a, &m)| a.norm_sqr().powi(m as i32))
                        .sum::<f64>()
            }
            Shape::Polytope { faces } => {
                faces.iter().map(|h| h.margin(z)).fold(f64::INFINITY, f64::min)
            }
            Shape::Polydisk { radii } => {
                z.iter().zip(radii).map(|(a, r)| r - a.norm()).fold(f64::INFINITY, f64::min)
            }
            Shape::Epigraph { f, .. } => z[0].im - f(z[0].re, &z[1..]),
            Shape::AffineImage { map, base } => {
                let w = inverse_apply(map, z);
                base.margin(&w)
            }
            Shape::Intersection(members) => {
                members.iter().map(|m| m.margin(z)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    fn gradient(&self, z: &[Complex64], active_tol: f64) -> MarginGradient {
        let d = z.len();
        match self {
            Shape::Ball { center, .. } => {
                let diff = CVector::from_iterator(d, z.iter().zip(center.iter()).map(|(a, b)| a - b));
                let n = crate::linalg::norm(&diff);
                let g = if n > 0.0 { -diff.unscale(n) } else { CVector::zeros(d) };
                MarginGradient { gradient: g, nonsmooth: n == 0.0 }
            }
            Shape::HalfPlaneProduct => {
                let vals: Vec<f64> = z.iter().map(|a| a.im).collect();
                let (k, count) = argmin_active(&vals, active_tol);
                let mut g = CVector::zeros(d);
                g[k] = I;
                MarginGradient { gradient: g, nonsmooth: count > 1 }
            }
            Shape::Siegel => {
                let mut g = CVector::zeros(d);
                g[0] = I;
                for k in 1..d {
                    g[k] = -2.0 * z[k];
                }
                MarginGradient { gradient: g, nonsmooth: false }
            }
            Shape::PowerEpigraph { exponents } => {
                let mut g = CVector::zeros(d);
                g[0] = I;
                for k in 1..d {
                    let m = exponents[k - 1] as i32;
                    g[k] = -2.0 * m as f64 * z[k].norm_sqr().powi(m - 1) * z[k];
                }
                MarginGradient { gradient: g, nonsmooth: false }
            }
            Shape::Polytope { faces } => {
                let vals: Vec<f64> = faces.iter().map(|h| h.margin(z)).collect();
                let (k, count) = argmin_active(&vals, active_tol);
                let n = crate::linalg::norm(&faces[k].normal);
                MarginGradient { gradient: -faces[k].normal.unscale(n), nonsmooth: count > 1 }
            }
            Shape::Polydisk { radii } => {
                let vals: Vec<f64> = z.iter().zip(radii).map(|(a, r)| r - a.norm()).collect();
                let (k, count) = argmin_active(&vals, active_tol);
                let mut g = CVector::zeros(d);
                let n = z[k].norm();
                if n > 0.0 {
                    g[k] = -z[k] / n;
                }
                MarginGradient { gradient: g, nonsmooth: count > 1 || n == 0.0 }
            }
            Shape::Epigraph { f, .. } => {
                let mut g = CVector::zeros(d);
                let x0 = z[0].re;
                let rest: Vec<Complex64> = z[1..].to_vec();
                let h = 1e-6 * (1.0 + x0.abs());
                let dfx = (f(x0 + h, &rest) - f(x0 - h, &rest)) / (2.0 * h);
                g[0] = c(-dfx, 1.0);
                for k in 1..d {
                    let mut p = rest.clone();
                    let hk = 1e-6 * (1.0 + z[k].norm());
                    let mut q = rest.clone();
                    p[k - 1] += c(hk, 0.0);
                    q[k - 1] -= c(hk, 0.0);
                    let dx = (f(x0, &p) - f(x0, &q)) / (2.0 * hk);
                    let mut p = rest.clone();
                    let mut q = rest.clone();
                    p[k - 1] += c(0.0, hk);
                    q[k - 1] -= c(0.0, hk);
                    let dy = (f(x0, &p) - f(x0, &q)) / (2.0 * hk);
                    g[k] = c(-dx, -dy);
                }
                MarginGradient { gradient: g, nonsmooth: false }
            }
            Shape::AffineImage { map, base } => {
                let w = inverse_apply(map, z);
                let inner = base.gradient(&w, active_tol);
                // m(z) = m_base(M (z - b)) with M = L^{-1}: grad = M^H grad_base
                let g = map.inverse_linear_part().adjoint() * inner.gradient;
                MarginGradient { gradient: g, nonsmooth: inner.nonsmooth }
            }
            Shape::Intersection(members) => {
                let vals: Vec<f64> = members.iter().map(|m| m.margin(z)).collect();
                let (k, count) = argmin_active(&vals, active_tol);
                let inner = members[k].gradient(z, active_tol);
                MarginGradient { gradient: inner.gradient, nonsmooth: inner.nonsmooth || count > 1 }
            }
        }
    }

    fn contains_complex_line(&self, dim: usize, declared_free: bool) -> bool {
        match self {
            Shape::Ball { .. }
            | Shape::HalfPlaneProduct
            | Shape::Siegel
            | Shape::PowerEpigraph { .. }
            | Shape::Polydisk { .. } => false,
            Shape::Polytope { faces } => {
                // a complex line C·v lies in the recession cone iff v is
                // Hermitian-orthogonal to every face normal
                if faces.is_empty() {
                    return true;
                }
                let m = CMatrix::from_fn(faces.len(), dim, |i, j| faces[i].normal[j]);
                let sv = m.singular_values();
                let max = sv.iter().cloned().fold(0.0, f64::max);
                let rank = sv.iter().filter(|&&s| s > 1e-10 * max).count();
                rank < dim
            }
            Shape::Epigraph { .. } => !declared_free,
            Shape::AffineImage { base, .. } => base.contains_complex_line(dim, declared_free),
            Shape::Intersection(ms) => ms.iter().all(|m| m.contains_complex_line(dim, declared_free)),
        }
    }

    fn closed_form_delta(&self, z: &[Complex64]) -> Option<f64> {
        match self {
            Shape::Ball { .. } | Shape::HalfPlaneProduct | Shape::Polytope { .. } | Shape::Polydisk { .. } => {
                Some(self.margin(z))
            }
            Shape::Siegel => Some(siegel_boundary_distance(z)),
            _ => None,
        }
    }

    fn known_interior_point(&self, dim: usize) -> Option<CVector> {
        match self {
            Shape::Ball { center, .. } => Some(center.clone()),
            Shape::HalfPlaneProduct => Some(CVector::from_element(dim, I)),
            Shape::Siegel | Shape::PowerEpigraph { .. } | Shape::Epigraph { .. } => {
                let mut z = CVector::zeros(dim);
                z[0] = I;
                Some(z)
            }
            Shape::Polydisk { .. } => Some(CVector::zeros(dim)),
            Shape::AffineImage { map, base } => base.known_interior_point(dim).map(|p| map.apply(&p)),
            Shape::Intersection(members) => members.iter().filter_map(|m| m.known_interior_point(dim)).find(|p| self.margin(p.as_slice()) > 0.0),
            Shape::Polytope { .. } => None,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self {
            Shape::Ball { radius, center } => {
                if !(*radius > 0.0) {
                    return bad(format!("ball radius must be positive, got {radius}"));
                }
                if center.len() != dim {
                    return bad(format!("ball center has dimension {}, expected {dim}", center.len()));
                }
            }
            Shape::Siegel => {}
            Shape::HalfPlaneProduct => {}
            Shape::PowerEpigraph { exponents } => {
                if exponents.len() + 1 != dim {
                    return bad(format!("power epigraph needs {} exponents, got {}", dim - 1, exponents.len()));
                }
                if exponents.iter().any(|&m| m < 1) {
                    return bad("power epigraph exponents must be >= 1".into());
                }
            }
            Shape::Polytope { faces } => {
                for h in faces {
                    if h.normal.len() != dim || crate::linalg::norm(&h.normal) == 0.0 {
                        return bad("polytope face normal has wrong dimension or is zero".into());
                    }
                }
            }
            Shape::Polydisk { radii } => {
                if radii.len() != dim || radii.iter().any(|r| !(*r > 0.0)) {
                    return bad("polydisk radii must be positive, one per coordinate".into());
                }
            }
            Shape::Epigraph { .. } => {}
            Shape::AffineImage { map, base } => {
                if map.dim() != dim {
                    return bad(format!("affine map acts on C^{}, expected C^{dim}", map.dim()));
                }
                base.validate(dim)?;
            }
            Shape::Intersection(ms) => {
                if ms.is_empty() {
                    return bad("intersection needs at least one member".into());
                }
                for m in ms {
                    m.validate(dim)?;
                }
            }
        }
        Ok(())
    }
}

fn inverse_apply(map: &AffineMap, z: &[Complex64]) -> Buf {
    let m = map.inverse_linear_part();
    let b = map.translation_part();
    let d = z.len();
    let mut shifted: Buf = SmallVec::with_capacity(d);
    for k in 0..d {
        shifted.push(z[k] - b[k]);
    }
    let mut out: Buf = SmallVec::with_capacity(d);
    for i in 0..d {
        let mut acc = c(0.0, 0.0);
        for j in 0..d {
            acc += m[(i, j)] * shifted[j];
        }
        out.push(acc);
    }
    out
}

fn argmin_active(vals: &[f64], tol: f64) -> (usize, usize) {
    let mut k = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v < vals[k] {
            k = i;
        }
    }
    let count = vals.iter().filter(|v| **v <= vals[k] + tol).count();
    (k, count)
}

/// Euclidean distance from `z` to the paraboloid `Im z_1 = |z'|^2`.
///
/// The closest point shares `Re z_1` and has `z'` parallel to the input, so
/// the problem reduces to the largest nonnegative root of
/// `2 s^3 + (1 - 2y) s - a = 0` with `y = Im z_1`, `a = |z'|`.
pub fn siegel_boundary_distance(z: &[Complex64]) -> f64 {
    let y = z[0].im;
    if z.len() == 1 {
        return y.abs();
    }
    let a = z[1..].iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
    let f = |s: f64| 2.0 * s * s * s + (1.0 - 2.0 * y) * s - a;
    let mut hi = a.max(y.max(0.0).sqrt()) + 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    // largest root: f > 0 beyond it, f <= 0 at the previous sign change
    let mut lo = if a == 0.0 {
        if y > 0.5 {
            0.5 * (y - 0.5).sqrt()
        } else {
            return y.abs();
        }
    } else {
        0.0
    };
    if f(lo) > 0.0 {
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    ((y - s * s).powi(2) + (s - a).powi(2)).sqrt()
}

/// A convex domain of C^d with its sampling bound.
#[derive(Clone, Debug)]
pub struct ConvexDomain {
    dim: usize,
    shape: Shape,
    clip_radius: f64,
    declared_line_free: bool,
}

pub const DEFAULT_CLIP_RADIUS: f64 = 1e6;

impl ConvexDomain {
    /// Builds a domain in the class of convex domains without complex
    /// affine lines; rejects shapes that contain one.
    pub fn new(dim: usize, shape: Shape) -> Result<Self> {
        Self::build(dim, shape, DEFAULT_CLIP_RADIUS, false, true)
    }

    /// Builds a domain without the complex-line check.
    pub fn new_unchecked(dim: usize, shape: Shape) -> Result<Self> {
        Self::build(dim, shape, DEFAULT_CLIP_RADIUS, false, false)
    }

    fn build(dim: usize, shape: Shape, clip_radius: f64, declared: bool, check_lines: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if !(clip_radius > 0.0) {
            return Err(Error::InvalidSpec("clip_radius must be positive".into()));
        }
        shape.validate(dim)?;
        if check_lines && shape.contains_complex_line(dim, declared) {
            return Err(Error::InvalidSpec("domain contains a complex affine line".into()));
        }
        Ok(Self { dim, shape, clip_radius, declared_line_free: declared })
    }

    pub fn with_clip_radius(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidSpec("clip_radius must be positive".into()));
        }
        self.clip_radius = r;
        Ok(self)
    }

    pub fn ball(dim: usize, radius: f64, center: CVector) -> Result<Self> {
        Self::new(dim, Shape::Ball { radius, center })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self::ball(dim, 1.0, CVector::zeros(dim)).expect("unit ball is valid")
    }

    pub fn siegel(dim: usize) -> Self {
        Self::new(dim, Shape::Siegel).expect("Siegel domain is valid")
    }

    pub fn half_plane_product(dim: usize) -> Self {
        Self::new(dim, Shape::HalfPlaneProduct).expect("half-plane product is valid")
    }

    pub fn power_epigraph(exponents: &[u32]) -> Result<Self> {
        Self::new(exponents.len() + 1, Shape::PowerEpigraph { exponents: exponents.to_vec() })
    }

    pub fn polytope(dim: usize, faces: Vec<HalfSpace>) -> Result<Self> {
        Self::new(dim, Shape::Polytope { faces })
    }

    /// The cube `{|Re z_k| < 1, |Im z_k| < 1}`.
    pub fn unit_cube(dim: usize) -> Self {
        let mut faces = Vec::new();
        for k in 0..dim {
            for dir in [c(1.0, 0.0), c(-1.0, 0.0), I, -I] {
                faces.push(HalfSpace::new(basis(dim, k) * dir, 1.0));
            }
        }
        Self::polytope(dim, faces).expect("cube is valid")
    }

    pub fn polydisk(radii: &[f64]) -> Result<Self> {
        Self::new(radii.len(), Shape::Polydisk { radii: radii.to_vec() })
    }

    /// `{sum |z_k|^2 / a_k^2 < 1}`.
    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        let d = semi_axes.len();
        let diag: Vec<Complex64> = semi_axes.iter().map(|&a| c(a, 0.0)).collect();
        let map = AffineMap::diagonal(&diag)?;
        Self::new(d, Shape::AffineImage { map, base: Box::new(Shape::Ball { radius: 1.0, center: CVector::zeros(d) }) })
    }

    /// `{Im z_1 > f(Re z_1, z_2, ...)}`; the caller declares whether the
    /// epigraph is free of complex lines.
    pub fn epigraph(dim: usize, f: ConvexFn, label: &str, line_free: bool) -> Result<Self> {
        Self::build(dim, Shape::Epigraph { f, label: label.to_string() }, DEFAULT_CLIP_RADIUS, line_free, true)
    }

    /// The image `map(self)`.
    pub fn image(&self, map: &AffineMap) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: map.dim() });
        }
        let shape = match &self.shape {
            Shape::AffineImage { map: inner, base } => {
                Shape::AffineImage { map: map.compose(inner), base: base.clone() }
            }
            other => Shape::AffineImage { map: map.clone(), base: Box::new(other.clone()) },
        };
        Ok(Self { dim: self.dim, shape, clip_radius: self.clip_radius, declared_line_free: self.declared_line_free })
    }

    pub fn intersect(&self, other: &ConvexDomain) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut members = Vec::new();
        for s in [&self.shape, &other.shape] {
            match s {
                Shape::Intersection(ms) => members.extend(ms.iter().cloned()),
                s => members.push(s.clone()),
            }
        }
        Self::build(
            self.dim,
            Shape::Intersection(members),
            self.clip_radius.min(other.clip_radius),
            self.declared_line_free || other.declared_line_free,
            true,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn clip_radius(&self) -> f64 {
        self.clip_radius
    }

    pub fn check_dim(&self, z: &CVector) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.len() });
        }
        Ok(())
    }

    /// Defining margin: positive inside, zero on the boundary.
    pub fn margin(&self, z: &CVector) -> f64 {
        self.shape.margin(z.as_slice())
    }

    pub fn margin_slice(&self, z: &[Complex64]) -> f64 {
        self.shape.margin(z)
    }

    /// Margin at `z + t u` without allocating.
    pub fn margin_on_ray(&self, z: &CVector, u: &CVector, t: f64) -> f64 {
        let p: Buf = z.iter().zip(u.iter()).map(|(a, b)| a + b * t).collect();
        self.shape.margin(&p)
    }

    pub fn contains(&self, z: &CVector) -> bool {
        self.margin(z) > 0.0
    }

    pub fn gradient(&self, z: &CVector, active_tol: f64) -> MarginGradient {
        self.shape.gradient(z.as_slice(), active_tol)
    }

    /// Distance to the boundary in closed form where one exists.
    pub fn closed_form_delta(&self, z: &CVector) -> Option<f64> {
        self.shape.closed_form_delta(z.as_slice())
    }

    /// A point of the domain: a canonical one for model shapes, otherwise
    /// the result of maximising the margin inside the clip ball.
    pub fn interior_point(&self) -> Result<CVector> {
        if let Some(p) = self.shape.known_interior_point(self.dim) {
            if self.contains(&p) {
                return Ok(p);
            }
        }
        let start = CVector::zeros(self.dim);
        let clip = self.clip_radius;
        let objective = |z: &CVector| self.margin(z).min(clip - crate::linalg::norm(z));
        let best = maximize_compass(&objective, start, 1.0, 1e-10, 20_000);
        if objective(&best) > 0.0 {
            Ok(best)
        } else {
            Err(Error::EmptyClip { radius: clip })
        }
    }

    /// Serializable description; fails for epigraphs of closures.
    pub fn to_doc(&self) -> Result<DomainDoc> {
        Ok(DomainDoc { dim: self.dim, variant: VariantDoc::from_shape(&self.shape)?, clip_radius: Some(self.clip_radius) })
    }
}

/// Compass search maximising `f` over C^d (viewed as R^{2d}).
pub fn maximize_compass<F: Fn(&CVector) -> f64>(f: &F, start: CVector, step0: f64, min_step: f64, max_evals: usize) -> CVector {
    let d = start.len();
    let mut x = start;
    let mut fx = f(&x);
    let mut step = step0;
    let mut evals = 1;
    while step > min_step && evals < max_evals {
        let mut improved = false;
        for k in 0..d {
            for dir in [c(1.0, 0.0), c(-1.0, 0.0), I, -I] {
                let mut y = x.clone();
                y[k] += dir * step;
                let fy = f(&y);
                evals += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// JSON documents

/// `{"dim": d, "variant": {...}, "clip_radius": r}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    pub dim: usize,
    pub variant: VariantDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceDoc {
    pub normal: Vec<[f64; 2]>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum VariantDoc {
    Ball {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<[f64; 2]>>,
    },
    HalfPlaneProduct {},
    Siegel {},
    PowerEpigraph {
        exponents: Vec<u32>,
    },
    Polytope {
        faces: Vec<FaceDoc>,
    },
    Polydisk {
        radii: Vec<f64>,
    },
    AffineImage {
        matrix: Vec<[f64; 2]>,
        translation: Vec<[f64; 2]>,
        base: Box<VariantDoc>,
    },
    Intersection {
        members: Vec<VariantDoc>,
    },
}

fn pairs_to_vec(p: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(p.len(), p.iter().map(|x| c(x[0], x[1])))
}

fn vec_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|x| [x.re, x.im]).collect()
}

impl VariantDoc {
    fn to_shape(&self, dim: usize) -> Result<Shape> {
        Ok(match self {
            VariantDoc::Ball { radius, center } => Shape::Ball {
                radius: *radius,
                center: center.as_ref().map(|c| pairs_to_vec(c)).unwrap_or_else(|| CVector::zeros(dim)),
            },
            VariantDoc::HalfPlaneProduct {} => Shape::HalfPlaneProduct,
            VariantDoc::Siegel {} => Shape::Siegel,
            VariantDoc::PowerEpigraph { exponents } => Shape::PowerEpigraph { exponents: exponents.clone() },
            VariantDoc::Polytope { faces } => Shape::Polytope {
                faces: faces.iter().map(|f| HalfSpace::new(pairs_to_vec(&f.normal), f.offset)).collect(),
            },
            VariantDoc::Polydisk { radii } => Shape::Polydisk { radii: radii.clone() },
            VariantDoc::AffineImage { matrix, translation, base } => {
                let map = AffineDoc { matrix: matrix.clone(), translation: translation.clone() }.to_map()?;
                Shape::AffineImage { map, base: Box::new(base.to_shape(dim)?) }
            }
            VariantDoc::Intersection { members } => {
                Shape::Intersection(members.iter().map(|m| m.to_shape(dim)).collect::<Result<_>>()?)
            }
        })
    }

    fn from_shape(s: &Shape) -> Result<Self> {
        Ok(match s {
            Shape::Ball { radius, center } => VariantDoc::Ball { radius: *radius, center: Some(vec_to_pairs(center)) },
            Shape::HalfPlaneProduct => VariantDoc::HalfPlaneProduct {},
            Shape::Siegel => VariantDoc::Siegel {},
            Shape::PowerEpigraph { exponents } => VariantDoc::PowerEpigraph { exponents: exponents.clone() },
            Shape::Polytope { faces } => VariantDoc::Polytope {
                faces: faces.iter().map(|f| FaceDoc { normal: vec_to_pairs(&f.normal), offset: f.offset }).collect(),
            },
            Shape::Polydisk { radii } => VariantDoc::Polydisk { radii: radii.clone() },
            Shape::Epigraph { label, .. } => {
                return Err(Error::InvalidSpec(format!("epigraph '{label}' wraps a closure and has no JSON form")))
            }
            Shape::AffineImage { map, base } => {
                let doc = AffineDoc::from(map);
                VariantDoc::AffineImage {
                    matrix: doc.matrix,
                    translation: doc.translation,
                    base: Box::new(VariantDoc::from_shape(base)?),
                }
            }
            Shape::Intersection(ms) => VariantDoc::Intersection {
                members: ms.iter().map(VariantDoc::from_shape).collect::<Result<_>>()?,
            },
        })
    }
}

impl DomainDoc {
    pub fn to_domain(&self) -> Result<ConvexDomain> {
        let shape = self.variant.to_shape(self.dim)?;
        ConvexDomain::build(self.dim, shape, self.clip_radius.unwrap_or(DEFAULT_CLIP_RADIUS), false, true)
    }

    pub fn from_json(text: &str) -> Result<ConvexDomain> {
        let doc: DomainDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("malformed domain document: {e}")))?;
        doc.to_domain()
    }
}
