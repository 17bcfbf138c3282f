//! Complex linear algebra on C^d: vectors, affine maps, orthonormal frames
//! and deterministic direction sets.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a vector from `(re, im)` pairs.
pub fn cvec(entries: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| c(re, im)))
}

/// The standard basis vector `e_k` (zero based) of C^d.
pub fn basis(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = c(1.0, 0.0);
    v
}

/// Hermitian product `<z, w> = sum z_k conj(w_k)`, linear in the first slot.
pub fn herm(z: &CVector, w: &CVector) -> Complex64 {
    z.iter().zip(w.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(z: &CVector) -> f64 {
    z.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Real Euclidean inner product of C^d viewed as R^{2d}.
pub fn real_dot(z: &CVector, w: &CVector) -> f64 {
    herm(z, w).re
}

pub fn normalized(z: &CVector) -> Result<CVector> {
    let n = norm(z);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroDirection);
    }
    Ok(z.unscale(n))
}

/// Orthogonal projection onto the complex span of an orthonormal family.
pub fn project(z: &CVector, onto: &[CVector]) -> CVector {
    let mut out = CVector::zeros(z.len());
    for b in onto {
        out += b * herm(z, b);
    }
    out
}

/// Completes an orthonormal family to an orthonormal basis of C^dim using
/// Gram-Schmidt against the standard basis.
pub fn complete_orthonormal(family: &[CVector], dim: usize) -> Vec<CVector> {
    let mut out: Vec<CVector> = family.to_vec();
    for k in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut v = basis(dim, k);
        // two passes keep the frame orthonormal to machine precision
        for _ in 0..2 {
            let p = project(&v, &out);
            v -= p;
        }
        let n = norm(&v);
        if n > 1e-8 {
            out.push(v.unscale(n));
        }
    }
    out
}

/// Orthonormal basis of the Hermitian orthogonal complement of `span` inside
/// the subspace spanned by the orthonormal family `within`.
pub fn orthogonal_complement(within: &[CVector], span: &[CVector]) -> Vec<CVector> {
    let mut ortho: Vec<CVector> = Vec::new();
    for s in span {
        let mut v = s.clone();
        for _ in 0..2 {
            let p = project(&v, &ortho);
            v -= p;
        }
        let n = norm(&v);
        if n > 1e-12 {
            ortho.push(v.unscale(n));
        }
    }
    let mut out: Vec<CVector> = Vec::new();
    for w in within {
        let mut v = w.clone();
        for _ in 0..2 {
            let p = project(&v, &ortho);
            v -= p;
            let q = project(&v, &out);
            v -= q;
        }
        let n = norm(&v);
        if n > 1e-8 {
            out.push(v.unscale(n));
        }
    }
    out
}

/// Maps real coordinates `a` in R^{2k} to the complex vector
/// `sum_j (a_{2j} + i a_{2j+1}) b_j`.
pub fn from_real_coords(a: &[f64], frame: &[CVector]) -> CVector {
    let dim = frame[0].len();
    let mut out = CVector::zeros(dim);
    for (j, b) in frame.iter().enumerate() {
        out += b * c(a[2 * j], a[2 * j + 1]);
    }
    out
}

/// Reciprocal condition number `sigma_min / sigma_max`.
pub fn rcond(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// An invertible complex affine map `z -> L z + b` of C^d.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: CMatrix,
    translation: CVector,
    inverse_linear: CMatrix,
}

impl AffineMap {
    pub fn new(linear: CMatrix, translation: CVector) -> Result<Self> {
        Self::with_rcond(linear, translation, 1e-12)
    }

    pub fn with_rcond(linear: CMatrix, translation: CVector, min_rcond: f64) -> Result<Self> {
        if !linear.is_square() || linear.nrows() != translation.len() {
            return Err(Error::DimensionMismatch { expected: linear.nrows(), got: translation.len() });
        }
        let r = rcond(&linear);
        if !(r >= min_rcond) {
            return Err(Error::SingularMatrix { rcond: r });
        }
        let inverse_linear = linear.clone().try_inverse().ok_or(Error::SingularMatrix { rcond: r })?;
        Ok(Self { linear, translation, inverse_linear })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            linear: CMatrix::identity(dim, dim),
            translation: CVector::zeros(dim),
            inverse_linear: CMatrix::identity(dim, dim),
        }
    }

    pub fn linear(linear: CMatrix) -> Result<Self> {
        let d = linear.nrows();
        Self::new(linear, CVector::zeros(d))
    }

    pub fn translation(shift: CVector) -> Self {
        let d = shift.len();
        let mut m = Self::identity(d);
        m.translation = shift;
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        Self::linear(CMatrix::from_diagonal(&CVector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear_part(&self) -> &CMatrix {
        &self.linear
    }

    pub fn translation_part(&self) -> &CVector {
        &self.translation
    }

    pub fn inverse_linear_part(&self) -> &CMatrix {
        &self.inverse_linear
    }

    pub fn apply(&self, z: &CVector) -> CVector {
        &self.linear * z + &self.translation
    }

    pub fn apply_linear(&self, v: &CVector) -> CVector {
        &self.linear * v
    }

    pub fn apply_inverse(&self, w: &CVector) -> CVector {
        &self.inverse_linear * (w - &self.translation)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
            inverse_linear: &other.inverse_linear * &self.inverse_linear,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        AffineMap {
            linear: self.inverse_linear.clone(),
            translation: -(&self.inverse_linear * &self.translation),
            inverse_linear: self.linear.clone(),
        }
    }

    pub fn condition_number(&self) -> f64 {
        1.0 / rcond(&self.linear)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim();
        let g = self.linear.adjoint() * &self.linear;
        (g - CMatrix::identity(d, d)).iter().all(|e| e.norm() <= tol)
    }
}

/// JSON form of an affine map: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineDoc {
    pub matrix: Vec<[f64; 2]>,
    pub translation: Vec<[f64; 2]>,
}

impl From<&AffineMap> for AffineDoc {
    fn from(m: &AffineMap) -> Self {
        let d = m.dim();
        let mut matrix = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let e = m.linear[(i, j)];
                matrix.push([e.re, e.im]);
            }
        }
        let translation = m.translation.iter().map(|e| [e.re, e.im]).collect();
        AffineDoc { matrix, translation }
    }
}

impl AffineDoc {
    pub fn to_map(&self) -> Result<AffineMap> {
        let d = self.translation.len();
        if self.matrix.len() != d * d {
            return Err(Error::InvalidSpec(format!(
                "affine matrix has {} entries, expected {}",
                self.matrix.len(),
                d * d
            )));
        }
        let linear = CMatrix::from_row_iterator(d, d, self.matrix.iter().map(|p| c(p[0], p[1])));
        let translation = CVector::from_iterator(d, self.translation.iter().map(|p| c(p[0], p[1])));
        AffineMap::new(linear, translation)
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

/// Deterministic, roughly uniform unit vectors of R^{real_dim}.
///
/// The circle uses equally spaced angles; higher spheres push a Halton
/// sequence through Box-Muller and normalise.
pub fn sphere_directions(real_dim: usize, n: usize) -> Vec<Vec<f64>> {
    assert!(real_dim >= 1);
    match real_dim {
        1 => (0..n).map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let pairs = real_dim.div_ceil(2);
            assert!(2 * pairs <= PRIMES.len(), "dimension too large for the Halton table");
            let mut out = Vec::with_capacity(n);
            let mut idx = 1u64;
            while out.len() < n {
                let mut g = Vec::with_capacity(2 * pairs);
                for p in 0..pairs {
                    let u1 = radical_inverse(idx, PRIMES[2 * p]).max(1e-300);
                    let u2 = radical_inverse(idx, PRIMES[2 * p + 1]);
                    let r = (-2.0 * u1.ln()).sqrt();
                    let a = std::f64::consts::TAU * u2;
                    g.push(r * a.cos());
                    g.push(r * a.sin());
                }
                g.truncate(real_dim);
                idx += 1;
                let n2 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n2 > 1e-12 {
                    out.push(g.into_iter().map(|x| x / n2).collect());
                }
            }
            out
        }
    }
}

/// Axis directions `±e_k` followed by `n` low-discrepancy directions.
pub fn sphere_directions_with_axes(real_dim: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * real_dim + n);
    for k in 0..real_dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; real_dim];
            e[k] = s;
            out.push(e);
        }
    }
    out.extend(sphere_directions(real_dim, n));
    out
}
