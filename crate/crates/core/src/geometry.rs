//! Ray shooting, boundary distances `δ(z)` and `δ(z; v)`, closest boundary
//! points in complex subspaces and supporting functionals.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::Tolerances;
use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::linalg::{basis, from_real_coords, herm, norm, sphere_directions_with_axes, CVector, I};

/// First crossing of a ray with the boundary.
#[derive(Debug, Clone)]
pub struct BoundaryHit {
    pub parameter: f64,
    pub point: CVector,
    /// Defining margin at `point`.
    pub residual: f64,
}

/// Closest boundary point found by a directional search.
#[derive(Debug, Clone)]
pub struct ClosestPoint {
    pub point: CVector,
    pub distance: f64,
    /// Unit vector from the base point towards `point`.
    pub direction: CVector,
}

/// Result of the phase search along a complex line.
#[derive(Debug, Clone)]
pub struct DirectionalHit {
    pub distance: f64,
    /// Phase `θ` of the minimising ray `z + t e^{iθ} v/|v|`.
    pub theta: f64,
    pub point: CVector,
}

/// `P(z) = <coeffs, z> + constant` (bilinear pairing, no conjugation), with
/// `P(ξ) = 0` and `Im P > 0` on the domain.
#[derive(Debug, Clone)]
pub struct SupportingFunctional {
    pub coeffs: CVector,
    pub constant: Complex64,
    /// Unit inward normal of the supporting hyperplane.
    pub normal: CVector,
    /// Several constraints are active at the boundary point.
    pub nonsmooth: bool,
}

impl SupportingFunctional {
    pub fn eval(&self, z: &CVector) -> Complex64 {
        self.coeffs.iter().zip(z.iter()).map(|(a, b)| a * b).sum::<Complex64>() + self.constant
    }
}

fn require_interior(domain: &ConvexDomain, z: &CVector) -> Result<()> {
    domain.check_dim(z)?;
    let m = domain.margin(z);
    if m > 0.0 {
        Ok(())
    } else {
        Err(Error::NotInterior { margin: m })
    }
}

/// Distance to the boundary along the unit direction `u`, or `None` when the
/// ray leaves the clip ball first. `z` must be interior.
pub(crate) fn hit_distance(domain: &ConvexDomain, z: &CVector, u: &CVector, tol: &Tolerances) -> Option<f64> {
    let clip = domain.clip_radius();
    let mut lo = 0.0;
    let mut hi = 1.0;
    loop {
        if !(domain.margin_on_ray(z, u, hi) > 0.0) {
            break;
        }
        lo = hi;
        let far: f64 = z.iter().zip(u.iter()).map(|(a, b)| (a + b * hi).norm_sqr()).sum::<f64>().sqrt();
        if far > clip {
            return None;
        }
        hi *= 2.0;
    }
    for _ in 0..tol.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if domain.margin_on_ray(z, u, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Smallest `t > 0` with `z + t u` on the boundary.
pub fn ray_boundary_hit(domain: &ConvexDomain, z: &CVector, u: &CVector, tol: &Tolerances) -> Result<BoundaryHit> {
    require_interior(domain, z)?;
    domain.check_dim(u)?;
    let un = norm(u);
    if un == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let dir = u.unscale(un);
    let dist = hit_distance(domain, z, &dir, tol).ok_or(Error::Unbounded)?;
    let point = z + dir.scale(dist);
    let residual = domain.margin(&point);
    Ok(BoundaryHit { parameter: dist / un, point, residual })
}

/// Euclidean distance to the boundary; closed form for model families.
pub fn delta(domain: &ConvexDomain, z: &CVector, tol: &Tolerances) -> Result<f64> {
    require_interior(domain, z)?;
    if let Some(d) = domain.closed_form_delta(z) {
        return Ok(d);
    }
    delta_sampled(domain, z, tol)
}

/// Sampled distance to the boundary, ignoring any closed form.
pub fn delta_sampled(domain: &ConvexDomain, z: &CVector, tol: &Tolerances) -> Result<f64> {
    require_interior(domain, z)?;
    let frame: Vec<CVector> = (0..domain.dim()).map(|k| basis(domain.dim(), k)).collect();
    let search = DirectionSearch::new(domain, z, &frame, tol);
    let (a, v) = search.best()?;
    Ok(search.refine(a, v).1)
}

/// Closest boundary point to `x` inside the affine subspace `x + span(frame)`
/// (`frame` orthonormal).
///
/// Ties between separated, strictly isolated minimisers raise
/// `DegenerateClosestPoint`; a continuum of minimisers (a circle of closest
/// points, as on balls) is accepted and the first minimiser is returned.
pub fn closest_boundary_point(
    domain: &ConvexDomain,
    x: &CVector,
    frame: &[CVector],
    tol: &Tolerances,
) -> Result<ClosestPoint> {
    require_interior(domain, x)?;
    if frame.is_empty() {
        return Err(Error::ZeroDirection);
    }
    let search = DirectionSearch::new(domain, x, frame, tol);
    let (a0, v0) = search.best()?;
    let (a, v) = search.refine(a0, v0);

    // second candidate: best sample pointing well away from the minimiser
    let u_best = search.unit(&a);
    let mut second: Option<(usize, f64)> = None;
    for (k, val) in search.values.iter().enumerate() {
        if !val.is_finite() {
            continue;
        }
        let u = search.unit(&search.dirs[k]);
        if norm(&(&u - &u_best)) > 0.5 && second.is_none_or(|(_, b)| *val < b) {
            second = Some((k, *val));
        }
    }
    if let Some((k, val)) = second {
        if val <= v * (1.0 + 1e-2) {
            let (a2, v2) = search.refine(search.dirs[k].clone(), val);
            let p1 = x + search.unit(&a).scale(v);
            let p2 = x + search.unit(&a2).scale(v2);
            let gap = (v2 - v).abs() / v;
            if norm(&(&p2 - &p1)) > 1e-3 * v && gap <= tol.degeneracy_gap && search.is_strict(&a, v) && search.is_strict(&a2, v2) {
                return Err(Error::DegenerateClosestPoint { gap });
            }
        }
    }
    let direction = search.unit(&a);
    Ok(ClosestPoint { point: x + direction.scale(v), distance: v, direction })
}

/// Orthonormal basis of the tangent space of the unit sphere at `a`.
fn sphere_tangent_basis(a: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out: Vec<Vec<f64>> = vec![a.to_vec()];
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        for q in &out {
            let dot: f64 = e.iter().zip(q).map(|(x, y)| x * y).sum();
            e.iter_mut().zip(q).for_each(|(x, y)| *x -= dot * y);
        }
        let en = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if en > 1e-6 {
            out.push(e.into_iter().map(|x| x / en).collect());
        }
        if out.len() == n {
            break;
        }
    }
    out.split_off(1)
}

/// Minimisation of the ray-hit distance over unit directions in the real
/// span of a complex frame.
struct DirectionSearch<'a> {
    domain: &'a ConvexDomain,
    x: &'a CVector,
    frame: &'a [CVector],
    tol: &'a Tolerances,
    dirs: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl<'a> DirectionSearch<'a> {
    fn new(domain: &'a ConvexDomain, x: &'a CVector, frame: &'a [CVector], tol: &'a Tolerances) -> Self {
        let dirs = sphere_directions_with_axes(2 * frame.len(), tol.delta_directions);
        let mut s = Self { domain, x, frame, tol, dirs, values: Vec::new() };
        s.values = s.dirs.par_iter().map(|a| s.eval(a)).collect();
        s
    }

    fn unit(&self, a: &[f64]) -> CVector {
        from_real_coords(a, self.frame)
    }

    fn eval(&self, a: &[f64]) -> f64 {
        hit_distance(self.domain, self.x, &self.unit(a), self.tol).unwrap_or(f64::INFINITY)
    }

    fn best(&self) -> Result<(Vec<f64>, f64)> {
        let mut k = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v < self.values[k] {
                k = i;
            }
        }
        if !self.values[k].is_finite() {
            return Err(Error::Unbounded);
        }
        Ok((self.dirs[k].clone(), self.values[k]))
    }

    /// Compass search on the sphere down to `refine_min_step`.
    fn refine(&self, mut a: Vec<f64>, mut best: f64) -> (Vec<f64>, f64) {
        let n = a.len();
        let mut step = if n == 2 { std::f64::consts::TAU / self.dirs.len() as f64 } else { 0.1 };
        while step > self.tol.refine_min_step {
            let mut improved = false;
            for j in 0..n {
                for s in [1.0, -1.0] {
                    let mut b = a.clone();
                    b[j] += s * step;
                    let nb = b.iter().map(|t| t * t).sum::<f64>().sqrt();
                    b.iter_mut().for_each(|t| *t /= nb);
                    let v = self.eval(&b);
                    if v < best {
                        a = b;
                        best = v;
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

    /// The hit distance has positive curvature in every direction tangent
    /// to the sphere at `a`; a flat direction means a continuum of minimisers.
    fn is_strict(&self, a: &[f64], v: f64) -> bool {
        let n = a.len();
        if n < 2 {
            return true;
        }
        let h = 1e-3;
        let tangents = sphere_tangent_basis(a);
        let m = tangents.len();
        let at = |coef: &[(usize, f64)]| -> f64 {
            let mut b = a.to_vec();
            for &(k, c) in coef {
                for (bi, ti) in b.iter_mut().zip(&tangents[k]) {
                    *bi += c * ti;
                }
            }
            let nb = b.iter().map(|t| t * t).sum::<f64>().sqrt();
            b.iter_mut().for_each(|t| *t /= nb);
            self.eval(&b)
        };
        let mut hess = nalgebra::DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            hess[(i, i)] = (at(&[(i, h)]) - 2.0 * v + at(&[(i, -h)])) / (h * h);
            for j in 0..i {
                let val = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)])) / (4.0 * h * h);
                hess[(i, j)] = val;
                hess[(j, i)] = val;
            }
        }
        let lowest = hess.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        lowest > 1e-6 * v
    }
}

/// Distance to the boundary inside the complex line `z + C v`, with the
/// minimising phase.
pub fn delta_dir_detail(domain: &ConvexDomain, z: &CVector, v: &CVector, tol: &Tolerances) -> Result<DirectionalHit> {
    require_interior(domain, z)?;
    domain.check_dim(v)?;
    let vn = norm(v);
    if vn == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let v = v.unscale(vn);
    let n = tol.theta_grid.max(3);
    let h = std::f64::consts::TAU / n as f64;
    let ray = |theta: f64| -> f64 {
        let u = &v * Complex64::from_polar(1.0, theta);
        hit_distance(domain, z, &u, tol).unwrap_or(f64::INFINITY)
    };
    let grid: Vec<f64> = (0..n).into_par_iter().map(|k| ray(k as f64 * h)).collect();
    let mut k = 0;
    for (i, g) in grid.iter().enumerate() {
        if *g < grid[k] {
            k = i;
        }
    }
    if !grid[k].is_finite() {
        return Err(Error::Unbounded);
    }
    let (theta, distance) = golden_min(&ray, (k as f64 - 1.0) * h, (k as f64 + 1.0) * h, tol.golden_width, (k as f64 * h, grid[k]));
    let theta = theta.rem_euclid(std::f64::consts::TAU);
    let point = z + &v * Complex64::from_polar(distance, theta);
    Ok(DirectionalHit { distance, theta, point })
}

/// `δ(z; v)`.
pub fn delta_dir(domain: &ConvexDomain, z: &CVector, v: &CVector, tol: &Tolerances) -> Result<f64> {
    Ok(delta_dir_detail(domain, z, v, tol)?.distance)
}

/// Golden-section minimisation on `[a, b]`; never returns worse than `seed`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, width: f64, seed: (f64, f64)) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = seed;
    while (b - a).abs() > width {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        for (x, fx) in [(c, fc), (d, fd)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
    }
    best
}

/// Supporting functional `P(z) = i <z − ξ, n>` at a boundary point, with `n`
/// the unit inward normal (gradient of the defining margin).
pub fn supporting_functional(domain: &ConvexDomain, xi: &CVector, tol: &Tolerances) -> Result<SupportingFunctional> {
    domain.check_dim(xi)?;
    let g = domain.gradient(xi, tol.boundary_tol);
    let gn = norm(&g.gradient);
    let m = domain.margin(xi);
    if gn == 0.0 {
        return Err(Error::NormalUndefined);
    }
    let dist = m.abs() / gn;
    if !(dist <= tol.boundary_tol) {
        return Err(Error::NotBoundary { distance: dist });
    }
    let normal = g.gradient.unscale(gn);
    let coeffs = normal.map(|nk| I * nk.conj());
    let constant = -coeffs.iter().zip(xi.iter()).map(|(a, b)| a * b).sum::<Complex64>();
    Ok(SupportingFunctional { coeffs, constant, normal, nonsmooth: g.nonsmooth })
}

/// Unit inward normal at a smooth boundary point.
pub fn inward_normal(domain: &ConvexDomain, xi: &CVector, tol: &Tolerances) -> Result<CVector> {
    let p = supporting_functional(domain, xi, tol)?;
    if p.nonsmooth {
        return Err(Error::NormalUndefined);
    }
    Ok(p.normal)
}

/// `|<v, n>|` for unit `n`: zero iff `v` is complex-tangential.
pub fn normal_component(v: &CVector, n: &CVector) -> f64 {
    herm(v, n).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cvec};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn ray_hits_match_defining_equations() {
        let b = ConvexDomain::unit_ball(2);
        let h = ray_boundary_hit(&b, &CVector::zeros(2), &basis(2, 0), &tol()).unwrap();
        assert!((h.parameter - 1.0).abs() < 1e-14);
        let s = ConvexDomain::siegel(2);
        let z = cvec(&[(0.0, 1.0), (0.0, 0.0)]);
        let h = ray_boundary_hit(&s, &z, &basis(2, 1), &tol()).unwrap();
        assert!((h.parameter - 1.0).abs() < 1e-14);
        assert!(h.residual.abs() <= 1e-10 * (1.0 + norm(&h.point)));
        let h = ray_boundary_hit(&s, &z, &(basis(2, 0) * -I), &tol()).unwrap();
        assert!((h.parameter - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ray_errors() {
        let b = ConvexDomain::unit_ball(1);
        assert!(matches!(ray_boundary_hit(&b, &cvec(&[(2.0, 0.0)]), &basis(1, 0), &tol()), Err(Error::NotInterior { .. })));
        assert_eq!(ray_boundary_hit(&b, &CVector::zeros(1), &CVector::zeros(1), &tol()).unwrap_err(), Error::ZeroDirection);
        let s = ConvexDomain::siegel(2);
        let z = cvec(&[(0.0, 1.0), (0.0, 0.0)]);
        assert_eq!(ray_boundary_hit(&s, &z, &(basis(2, 0) * I), &tol()).unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn sampled_delta_agrees_with_closed_forms() {
        let s = ConvexDomain::siegel(2);
        let z = cvec(&[(0.0, 1.0), (0.0, 0.0)]);
        let exact = delta(&s, &z, &tol()).unwrap();
        assert!((exact - 0.75f64.sqrt()).abs() < 1e-14);
        let sampled = delta_sampled(&s, &z, &tol()).unwrap();
        assert!((sampled - exact).abs() <= 1e-6 * exact);
        let b = ConvexDomain::unit_ball(2);
        let z = cvec(&[(0.75, 0.0), (0.0, 0.0)]);
        assert!((delta(&b, &z, &tol()).unwrap() - 0.25).abs() < 1e-15);
        assert!((delta_sampled(&b, &z, &tol()).unwrap() - 0.25).abs() < 1e-6 * 0.25);
    }

    #[test]
    fn directional_delta_examples() {
        let s = ConvexDomain::siegel(2);
        let z = cvec(&[(0.0, 2f64.exp()), (0.0, 0.0)]);
        let d = delta_dir(&s, &z, &basis(2, 1), &tol()).unwrap();
        assert!((d - 1f64.exp()).abs() < 1e-9);
        let p = ConvexDomain::power_epigraph(&[2]).unwrap();
        let z = cvec(&[(0.0, 1e-4), (0.0, 0.0)]);
        let d = delta_dir(&p, &z, &basis(2, 1), &tol()).unwrap();
        assert!((d - 0.1).abs() < 1e-10);
        let b = ConvexDomain::unit_ball(2);
        let v = cvec(&[(0.6, 0.0), (0.0, 0.8)]);
        assert!((delta_dir(&b, &CVector::zeros(2), &v, &tol()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn supporting_functionals() {
        let b = ConvexDomain::unit_ball(2);
        let p = supporting_functional(&b, &basis(2, 0), &tol()).unwrap();
        let z = cvec(&[(0.2, 0.3), (0.1, -0.4)]);
        assert!((p.eval(&z) - I * (c(1.0, 0.0) - z[0])).norm() < 1e-15);
        let s = ConvexDomain::siegel(2);
        let p = supporting_functional(&s, &CVector::zeros(2), &tol()).unwrap();
        assert!((p.eval(&z) - z[0]).norm() < 1e-15);
        let cube = ConvexDomain::unit_cube(1);
        let p = supporting_functional(&cube, &cvec(&[(1.0, 0.0)]), &tol()).unwrap();
        assert!(!p.nonsmooth);
        assert!((p.normal[0] - c(-1.0, 0.0)).norm() < 1e-15);
        let corner = supporting_functional(&cube, &cvec(&[(1.0, 1.0)]), &tol()).unwrap();
        assert!(corner.nonsmooth);
        assert!(matches!(supporting_functional(&b, &CVector::zeros(2), &tol()), Err(Error::NotBoundary { .. }) | Err(Error::NormalUndefined)));
    }

    #[test]
    fn isolated_ties_are_degenerate() {
        let cube = ConvexDomain::unit_cube(1);
        let frame = vec![basis(1, 0)];
        let r = closest_boundary_point(&cube, &CVector::zeros(1), &frame, &tol());
        assert!(matches!(r, Err(Error::DegenerateClosestPoint { .. })));
        // a circle of closest points is fine
        let b = ConvexDomain::unit_ball(2);
        let frame = vec![basis(2, 0), basis(2, 1)];
        let cp = closest_boundary_point(&b, &CVector::zeros(2), &frame, &tol()).unwrap();
        assert!((cp.distance - 1.0).abs() < 1e-12);
    }
}
