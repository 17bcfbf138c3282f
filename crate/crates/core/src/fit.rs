//! Ordinary least-squares slopes with Student-t confidence half-widths.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Minimum number of samples accepted by a fit.
pub const MIN_SAMPLES: usize = 8;

/// Slope of a log-log (or log-linear) regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub half_width: f64,
    pub intercept: f64,
    /// Range of the abscissa actually used, in its natural units.
    pub range: (f64, f64),
    pub n_samples: usize,
}

/// Fits `y = a + b x` and reports `b` with its 95% half-width.
pub fn fit_slope(xs: &[f64], ys: &[f64], range: (f64, f64)) -> Result<ExponentFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::DimensionMismatch { expected: n, got: ys.len() });
    }
    if n < MIN_SAMPLES {
        return Err(Error::DomainError(format!("a fit needs at least {MIN_SAMPLES} samples, got {n}")));
    }
    if ys.iter().chain(xs).any(|v| !v.is_finite()) {
        return Err(Error::DomainError("non-finite sample in regression".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DomainError("regression abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0).expect("positive degrees of freedom").inverse_cdf(0.975);
    Ok(ExponentFit { exponent: slope, half_width: t * se, intercept, range, n_samples: n })
}

/// `n` points spaced uniformly on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// `n` points spaced geometrically on `[a, b]`, both positive.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}
