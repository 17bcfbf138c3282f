//! Local Hausdorff distances, the normal family `K_d`, the normalization
//! `A = ΛUT`, two-dimensional slice extension and blow-up sequences.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::domain::{maximize_compass, ConvexDomain};
use crate::error::{Error, Result};
use crate::geometry::{closest_boundary_point, delta_dir_detail, hit_distance, inward_normal, normal_component};
use crate::linalg::{basis, c, complete_orthonormal, herm, norm, orthogonal_complement, project, sphere_directions, AffineMap, CMatrix, CVector, I};

/// Radius of the clip balls used by the blow-up convergence diagnostic.
pub const BLOWUP_RADII: [f64; 3] = [1.0, 4.0, 16.0];

// ---------------------------------------------------------------------------
// local Hausdorff distance

/// Closure of `Ω ∩ B_R(0)` described radially from an interior center.
struct ClippedBody<'a> {
    domain: &'a ConvexDomain,
    radius: f64,
    center: CVector,
    frame: Vec<CVector>,
    dirs: Vec<Vec<f64>>,
    boundary: Vec<CVector>,
    samples: Vec<CVector>,
    tol: &'a Tolerances,
}

impl<'a> ClippedBody<'a> {
    fn new(domain: &'a ConvexDomain, radius: f64, center: CVector, n: usize, tol: &'a Tolerances) -> Self {
        let d = domain.dim();
        let frame: Vec<CVector> = (0..d).map(|k| basis(d, k)).collect();
        let dirs = sphere_directions(2 * d, n);
        let mut body = Self { domain, radius, center, frame, dirs, boundary: Vec::new(), samples: Vec::new(), tol };
        body.boundary = body.dirs.par_iter().map(|a| body.boundary_point(a)).collect();
        let mut samples = body.boundary.clone();
        samples.push(body.center.clone());
        for p in body.boundary.iter().step_by(8) {
            samples.push((p + &body.center).unscale(2.0));
        }
        body.samples = samples;
        body
    }

    fn radial(&self, u: &CVector) -> f64 {
        // |c + t u| = R for unit u
        let b = herm(&self.center, u).re;
        let cc = self.center.norm_squared();
        let t_sphere = -b + (b * b - cc + self.radius * self.radius).max(0.0).sqrt();
        let t_dom = hit_distance(self.domain, &self.center, u, self.tol).unwrap_or(f64::INFINITY);
        t_sphere.min(t_dom)
    }

    fn boundary_point(&self, a: &[f64]) -> CVector {
        let u = crate::linalg::from_real_coords(a, &self.frame);
        let t = self.radial(&u);
        &self.center + u.scale(t)
    }

    fn contains_closure(&self, p: &CVector) -> bool {
        let scale = 1.0 + norm(p);
        self.domain.margin(p) >= -1e-12 * scale && norm(p) <= self.radius * (1.0 + 1e-12)
    }

    fn spacing(&self) -> f64 {
        let dim = self.dirs[0].len() as f64;
        (self.dirs.len() as f64).powf(-1.0 / (dim - 1.0).max(1.0))
    }

    /// Distance from a point to this body with the direction of its nearest
    /// boundary point, by compass search from `start`.
    fn distance_from(&self, p: &CVector, start: &[f64], step0: f64) -> (f64, Vec<f64>) {
        if self.contains_closure(p) {
            return (0.0, start.to_vec());
        }
        let f = |a: &[f64]| -norm(&(self.boundary_point(a) - p));
        // distances are quadratic in the direction error near a minimiser
        let (a, v) = compass_on_sphere(&f, start.to_vec(), step0, 1e-6);
        (-v, a)
    }

    /// `sup_{p ∈ samples} dist(p, other)`, refining only candidates whose
    /// sample-to-sample distance can still beat the running maximum.
    fn directed(&self, other: &ClippedBody) -> f64 {
        let coarse: Vec<(f64, usize)> = self
            .samples
            .par_iter()
            .map(|p| {
                if other.contains_closure(p) {
                    return (0.0, 0);
                }
                let mut best = (f64::INFINITY, 0);
                for (k, q) in other.boundary.iter().enumerate() {
                    let d2: f64 = p.iter().zip(q.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
                    if d2 < best.0 {
                        best = (d2, k);
                    }
                }
                // the boundary point of `other` on the ray through `p`
                let w = p - &other.center;
                let wn = norm(&w);
                let radial = if wn > 0.0 { wn - other.radial(&w.unscale(wn)) } else { f64::INFINITY };
                (best.0.sqrt().min(radial.max(0.0)), best.1)
            })
            .collect();
        let mut order: Vec<usize> = (0..coarse.len()).collect();
        order.sort_by(|&i, &j| coarse[j].0.total_cmp(&coarse[i].0).then(i.cmp(&j)));
        let mut sup: f64 = 0.0;
        let mut refined: Vec<(f64, usize)> = Vec::new();
        for i in order {
            if coarse[i].0 <= sup {
                break;
            }
            let (v, _) = other.distance_from(&self.samples[i], &other.dirs[coarse[i].1], 2.0 * other.spacing());
            refined.push((v, i));
            sup = sup.max(v);
        }
        // the extremal point of this body usually falls between samples
        refined.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(v, i) in refined.iter().take(2) {
            if v > 0.0 && i < self.boundary.len() {
                sup = sup.max(self.ascend(other, i));
            }
        }
        sup
    }

    fn nearest_index(&self, p: &CVector) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (k, q) in self.boundary.iter().enumerate() {
            let d2: f64 = p.iter().zip(q.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
            if d2 < best.0 {
                best = (d2, k);
            }
        }
        best.1
    }

    /// Compass ascent of `dist(·, other)` over this body's boundary, with
    /// the inner search warm-started from the previous nearest point.
    fn ascend(&self, other: &ClippedBody, start: usize) -> f64 {
        let p0 = &self.boundary[start];
        let (mut best, mut inner) = other.distance_from(p0, &other.dirs[other.nearest_index(p0)], 2.0 * other.spacing());
        let mut a = self.dirs[start].clone();
        let mut step = self.spacing();
        while step > 1e-4 {
            let mut improved = false;
            for j in 0..a.len() {
                for s in [1.0, -1.0] {
                    let b = perturb(&a, j, s * step);
                    let (v, dir) = other.distance_from(&self.boundary_point(&b), &inner, 2.0 * step);
                    if v > best {
                        best = v;
                        a = b;
                        inner = dir;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }
}

/// `a` moved by `h` along coordinate `j`, renormalised onto the sphere.
fn perturb(a: &[f64], j: usize, h: f64) -> Vec<f64> {
    let mut b = a.to_vec();
    b[j] += h;
    let nb = b.iter().map(|t| t * t).sum::<f64>().sqrt();
    b.iter_mut().for_each(|t| *t /= nb);
    b
}

/// Compass search maximising `f` over the unit sphere.
fn compass_on_sphere<F: Fn(&[f64]) -> f64>(f: &F, mut a: Vec<f64>, step0: f64, min_step: f64) -> (Vec<f64>, f64) {
    let mut best = f(&a);
    let mut step = step0;
    while step > min_step {
        let mut improved = false;
        for j in 0..a.len() {
            for s in [1.0, -1.0] {
                let b = perturb(&a, j, s * step);
                let v = f(&b);
                if v > best {
                    best = v;
                    a = b;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (a, best)
}

fn clipped_center(domain: &ConvexDomain, radius: f64, preferred: &CVector) -> Result<CVector> {
    if domain.contains(preferred) && norm(preferred) < radius {
        return Ok(preferred.clone());
    }
    let f = |z: &CVector| domain.margin(z).min(radius - norm(z));
    let start = domain.interior_point().unwrap_or_else(|_| CVector::zeros(domain.dim()));
    let start = if norm(&start) < radius { start } else { CVector::zeros(domain.dim()) };
    let best = maximize_compass(&f, start, 0.25 * radius, 1e-10 * radius, 100_000);
    if f(&best) > 0.0 {
        Ok(best)
    } else {
        Err(Error::EmptyClip { radius })
    }
}

/// `d_H(Ā ∩ B̄_R(0), B̄ ∩ B̄_R(0))` from `n` radial boundary samples per body
/// plus interior samples, with local refinement of the extremal distances.
pub fn local_hausdorff(a: &ConvexDomain, b: &ConvexDomain, radius: f64, n: usize, tol: &Tolerances) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    if !(radius > 0.0) {
        return Err(Error::DomainError("clip radius must be positive".into()));
    }
    let origin = CVector::zeros(a.dim());
    let ca = clipped_center(a, radius, &origin)?;
    let cb = clipped_center(b, radius, &origin)?;
    let ba = ClippedBody::new(a, radius, ca, n, tol);
    let bb = ClippedBody::new(b, radius, cb, n, tol);
    Ok(ba.directed(&bb).max(bb.directed(&ba)))
}

// ---------------------------------------------------------------------------
// the normal family K_d

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdTest {
    pub passes: bool,
    pub margin: f64,
}

/// Membership report for `K_d`: `𝔻 e_i ⊂ Ω` and `Z_i ∩ Ω = ∅` with
/// `Z_i = e_i + span{e_{i+1}, ..., e_d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdReport {
    pub disk_inclusions: Vec<KdTest>,
    pub plane_exclusions: Vec<KdTest>,
    pub passes: bool,
}

/// Margin of `𝔻 e_i ⊂ Ω`: smallest boundary hit from 0 along `e^{iθ} e_i`
/// minus one; −1 when 0 is not interior.
fn disk_margin(domain: &ConvexDomain, i: usize, tol: &Tolerances) -> f64 {
    let d = domain.dim();
    let origin = CVector::zeros(d);
    if !domain.contains(&origin) {
        return -1.0;
    }
    let n = tol.kd_disk_samples.max(1);
    let hits: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let u = basis(d, i).map(|a| a * Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64));
            hit_distance(domain, &origin, &u, tol).unwrap_or(domain.clip_radius())
        })
        .collect();
    hits.into_iter().fold(f64::INFINITY, f64::min) - 1.0
}

/// Margin of `Z ∩ Ω = ∅` for `Z = p + span(frame)`: minus the largest
/// defining margin on `Z` within the clip ball.
fn plane_margin(domain: &ConvexDomain, p: &CVector, frame: &[CVector], tol: &Tolerances) -> f64 {
    if frame.is_empty() {
        return -domain.margin(p);
    }
    let k = frame.len();
    let clip = domain.clip_radius();
    let to_point = |w: &CVector| -> CVector {
        let mut z = p.clone();
        for j in 0..k {
            z += &frame[j] * w[j];
        }
        z
    };
    let f = |w: &CVector| {
        let z = to_point(w);
        if norm(&z) > clip {
            f64::NEG_INFINITY
        } else {
            domain.margin(&z)
        }
    };
    let best = maximize_compass(&f, CVector::zeros(k), 1.0, tol.kd_plane_tol, 200_000);
    -f(&best)
}

pub fn kd_membership(domain: &ConvexDomain, tol: &Tolerances) -> KdReport {
    let d = domain.dim();
    let mut disks = Vec::with_capacity(d);
    let mut planes = Vec::with_capacity(d);
    for i in 0..d {
        let m = disk_margin(domain, i, tol);
        disks.push(KdTest { passes: m >= -tol.kd_margin, margin: m });
        let frame: Vec<CVector> = (i + 1..d).map(|k| basis(d, k)).collect();
        let m = plane_margin(domain, &basis(d, i), &frame, tol);
        planes.push(KdTest { passes: m >= -tol.kd_margin, margin: m });
    }
    let passes = disks.iter().chain(&planes).all(|t| t.passes);
    KdReport { disk_inclusions: disks, plane_exclusions: planes, passes }
}

// ---------------------------------------------------------------------------
// the normalization A = ΛUT

#[derive(Debug, Clone)]
pub struct Normalization {
    pub map: AffineMap,
    pub report: KdReport,
    /// The boundary points `ξ_1, ..., ξ_d`.
    pub boundary_points: Vec<CVector>,
    /// `|ξ_i − x| = δ(x; ξ_i − x)`, the inverse diagonal of `Λ`.
    pub deltas: Vec<f64>,
}

/// Normalizes `(Ω, x)` into `K_d`.
///
/// `ξ_1` is a closest boundary point to `x`; `ξ_{k+1}` is a closest
/// boundary point in the complex plane through `x` orthogonal to every
/// `ξ_i − x`. Then `T(z) = z − x`, `U` is unitary with
/// `U T(ξ_i) ∈ R_{>0} e_i`, and `Λ = diag(1/|ξ_i − x|)`.
pub fn frankel_normalize(domain: &ConvexDomain, x: &CVector, tol: &Tolerances) -> Result<Normalization> {
    domain.check_dim(x)?;
    let m = domain.margin(x);
    if !(m > 1e-12) {
        return Err(Error::NotInterior { margin: m });
    }
    let d = domain.dim();
    let mut dirs: Vec<CVector> = Vec::with_capacity(d);
    let mut points = Vec::with_capacity(d);
    let mut deltas = Vec::with_capacity(d);
    for k in 0..d {
        let frame = if k == 0 {
            (0..d).map(|j| basis(d, j)).collect()
        } else {
            complete_orthonormal(&dirs, d).split_off(k)
        };
        let cp = closest_boundary_point(domain, x, &frame, tol)?;
        // re-orthogonalise against earlier directions to absorb rounding
        let mut u = cp.direction.clone();
        u -= project(&u, &dirs);
        let un = norm(&u);
        if !(un > 0.5) {
            return Err(Error::Internal("closest-point direction left the orthogonal plane".into()));
        }
        dirs.push(u.unscale(un));
        points.push(cp.point);
        deltas.push(cp.distance);
    }
    let u = CMatrix::from_fn(d, d, |i, j| dirs[i][j].conj());
    let lambda: Vec<Complex64> = deltas.iter().map(|&r| c(1.0 / r, 0.0)).collect();
    let linear = CMatrix::from_diagonal(&CVector::from_vec(lambda)) * u;
    let map = AffineMap::with_rcond(linear, CVector::zeros(d), 0.0)?.compose(&AffineMap::translation(-x));
    let report = kd_membership(&domain.image(&map)?, tol);
    Ok(Normalization { map, report, boundary_points: points, deltas })
}

// ---------------------------------------------------------------------------
// slice extension

/// Result of [`slice_extend_normalization`].
#[derive(Debug, Clone)]
pub struct SliceExtension {
    /// Linear map with `A(ξ_i) = e_i`; identity on `span{e_1, e_2}`.
    pub map: AffineMap,
    pub boundary_points: Vec<CVector>,
}

fn slice_hypotheses(domain: &ConvexDomain, tol: &Tolerances) -> Result<()> {
    let d = domain.dim();
    let fail = |msg: String| Err(Error::HypothesisError(msg));
    let frame: Vec<CVector> = (1..d).map(|k| basis(d, k)).collect();
    let m = plane_margin(domain, &basis(d, 0), &frame, tol);
    if m < -tol.kd_margin {
        return fail(format!("domain meets e_1 + span(e_2..e_d) (margin {m:e})"));
    }
    let checks = [disk_margin(domain, 0, tol), disk_margin(domain, 1.min(d - 1), tol)];
    if checks.iter().any(|m| *m < -tol.kd_margin) {
        return fail(format!("unit disks along e_1, e_2 are not inside (margins {checks:?})"));
    }
    if d >= 2 {
        let m = -domain.margin(&basis(d, 1));
        if m < -tol.kd_margin {
            return fail(format!("e_2 lies inside the domain (margin {m:e})"));
        }
    }
    Ok(())
}

/// The linear map of the two-dimensional slice proposition: for a domain
/// whose slice `span{e_1, e_2}` is in `K_2` and which misses
/// `e_1 + span{e_2, ..., e_d}`, returns `A` fixing `span{e_1, e_2}` with
/// `AΩ ∈ K_d`.
pub fn slice_extend_normalization(domain: &ConvexDomain, tol: &Tolerances) -> Result<SliceExtension> {
    slice_hypotheses(domain, tol)?;
    let d = domain.dim();
    let mut points = vec![basis(d, 0)];
    if d == 1 {
        return Ok(SliceExtension { map: AffineMap::identity(1), boundary_points: points });
    }
    points.push(basis(d, 1));
    // H_1 = span{e_2, ..., e_d}; H_k is the complement, inside H_{k-1}, of the
    // supporting direction at ξ_k
    let mut h: Vec<CVector> = (1..d).map(|k| basis(d, k)).collect();
    for k in 1..d {
        let xi = points[k].clone();
        let g = domain.gradient(&xi, tol.boundary_tol).gradient;
        let gp = project(&g, &h);
        if !(norm(&gp) > 1e-12) {
            return Err(Error::HypothesisError(format!("no supporting direction inside H_{k} at ξ_{}", k + 1)));
        }
        h = orthogonal_complement(&h, &[gp]);
        if k + 1 == d {
            break;
        }
        let origin = CVector::zeros(d);
        let cp = closest_boundary_point(domain, &origin, &h, tol)?;
        points.push(cp.point);
    }
    let m = CMatrix::from_fn(d, d, |i, j| points[j][i]);
    let inv = m.clone().try_inverse().ok_or(Error::SingularMatrix { rcond: 0.0 })?;
    let map = AffineMap::with_rcond(inv, CVector::zeros(d), tol.singular_rcond)?;
    Ok(SliceExtension { map, boundary_points: points })
}

// ---------------------------------------------------------------------------
// blow-up sequences

#[derive(Debug, Clone)]
pub struct BlowupStep {
    pub n: usize,
    pub r: f64,
    /// `F_n = B_n ∘ R ∘ A_n ∘ T_n`.
    pub map: AffineMap,
    pub domain: ConvexDomain,
    pub kd: KdReport,
    /// `d_H^{(R)}(F_n Ω, F_{n−1} Ω)` for `R ∈ {1, 4, 16}`; absent at the first step.
    pub hausdorff: Option<[f64; 3]>,
}

/// Affine isometry `T` with `T(ξ) = 0`, `T(n) = i e_1`, `T(v) = e_2` on
/// directions.
fn boundary_isometry(xi: &CVector, n: &CVector, v: &CVector) -> Result<AffineMap> {
    let d = xi.len();
    let mut cols = vec![n.map(|a| -I * a)];
    if d >= 2 {
        cols.push(v.clone());
    }
    let frame = complete_orthonormal(&cols, d);
    if frame.len() != d {
        return Err(Error::Internal("could not complete the boundary frame".into()));
    }
    // U^{-1} has the frame as columns; U is its adjoint
    let uinv = CMatrix::from_fn(d, d, |i, j| frame[j][i]);
    let u = uinv.adjoint();
    Ok(AffineMap::with_rcond(u, CVector::zeros(d), 0.0)?.compose(&AffineMap::translation(-xi)))
}

/// Rescalings of `Ω` at `ξ` along the complex-tangential direction `v` for
/// `r_n = 4^{-n}`, `n = 1, ..., n_steps`.
///
/// Each step maps `ξ` to 0 and the inward normal to `i e_1` by an isometry
/// `T`, applies `A_n = diag(1/r_n, 1/z_n, 1, ..., 1)` where `r_n i e_1 + z_n e_2`
/// is the closest boundary point on that complex line, sends `i e_1` to 0 by
/// `R(z) = (i z_1 + 1, z_2, ..., z_d)` so the slice `span{e_1, e_2}` lands in
/// `K_2`, and finishes with the slice extension `B_n`.
pub fn blowup_sequence(domain: &ConvexDomain, xi: &CVector, n_steps: usize, v: &CVector, tol: &Tolerances) -> Result<Vec<BlowupStep>> {
    domain.check_dim(xi)?;
    domain.check_dim(v)?;
    let d = domain.dim();
    if d < 2 {
        return Err(Error::DomainError("blow-up sequences need d >= 2".into()));
    }
    let n = inward_normal(domain, xi, tol)?;
    let vn = norm(v);
    if vn == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let v = v.unscale(vn);
    let inner = normal_component(&v, &n);
    if inner > 1e-10 {
        return Err(Error::NotTangential { inner });
    }
    let t = boundary_isometry(xi, &n, &v)?;
    let mut rdiag = AffineMap::identity(d).linear_part().clone();
    rdiag[(0, 0)] = I;
    let rmap = AffineMap::new(rdiag, basis(d, 0))?;
    let mut steps: Vec<BlowupStep> = Vec::with_capacity(n_steps);
    for step in 1..=n_steps {
        let r = 0.25f64.powi(step as i32);
        let x = xi + n.scale(r);
        let hit = delta_dir_detail(domain, &x, &v, tol)?;
        let zn = Complex64::from_polar(hit.distance, hit.theta);
        let mut diag = vec![c(1.0, 0.0); d];
        diag[0] = c(1.0 / r, 0.0);
        diag[1] = 1.0 / zn;
        let an = AffineMap::diagonal(&diag)?;
        let pre = rmap.compose(&an).compose(&t);
        let partial = domain.image(&pre)?;
        let b = slice_extend_normalization(&partial, tol)?;
        let map = b.map.compose(&pre);
        let image = domain.image(&map)?;
        let kd = kd_membership(&image, tol);
        let hausdorff = match steps.last() {
            Some(prev) => {
                let mut out = [0.0; 3];
                for (o, &radius) in out.iter_mut().zip(BLOWUP_RADII.iter()) {
                    *o = local_hausdorff(&image, &prev.domain, radius, tol.hausdorff_directions, tol)?;
                }
                Some(out)
            }
            None => None,
        };
        steps.push(BlowupStep { n: step, r, map, domain: image, kd, hausdorff });
    }
    Ok(steps)
}
