//! Command-line syntax for complex vectors.
//!
//! A vector is either a comma-separated list of entries (`re:im`, `re`,
//! `i` or `-i`) or a basis shorthand `[coef*]e<k>[@r=<r>]`, where `k` is
//! 1-based, `coef` is an entry and `@r=<r>` multiplies by `exp(r)`.
//! `i*e1@r=2` is the point `i e^2 e_1`.

use kobayashi_core::linalg::basis;
use kobayashi_core::CVector;
use num_complex::Complex64;

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    match s {
        "i" | "+i" => return Ok(Complex64::i()),
        "-i" => return Ok(-Complex64::i()),
        _ => {}
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    let value = match s.split_once(':') {
        Some((re, im)) => Complex64::new(num(re)?, num(im)?),
        None => Complex64::new(num(s)?, 0.0),
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(format!("entry {s:?} is not finite"))
    }
}

fn parse_shorthand(s: &str, dim: usize) -> Option<Result<CVector, String>> {
    let (body, scale) = match s.split_once('@') {
        Some((b, suffix)) => {
            let r = match suffix.trim().strip_prefix("r=").map(|r| r.trim().parse::<f64>()) {
                Some(Ok(r)) => r,
                _ => return Some(Err(format!("bad scale suffix {suffix:?}, expected r=<number>"))),
            };
            (b.trim(), r.exp())
        }
        None => (s, 1.0),
    };
    let pos = body.rfind('e')?;
    let digits = &body[pos + 1..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let prefix = &body[..pos];
    let coef = match prefix {
        "" | "+" => Complex64::new(1.0, 0.0),
        "-" => Complex64::new(-1.0, 0.0),
        p => match parse_complex(p.strip_suffix('*')?) {
            Ok(c) => c,
            Err(e) => return Some(Err(e)),
        },
    };
    let k: usize = match digits.parse() {
        Ok(k) => k,
        Err(_) => return Some(Err(format!("bad basis index in {s:?}"))),
    };
    if k == 0 || k > dim {
        return Some(Err(format!("basis index e{k} out of range for dimension {dim}")));
    }
    Some(Ok(basis(dim, k - 1).map(|a| a * coef * scale)))
}

/// Parses a vector of `C^dim`.
pub fn parse_vector(s: &str, dim: usize) -> Result<CVector, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty vector".into());
    }
    if !s.contains(',') {
        if let Some(v) = parse_shorthand(s, dim) {
            return v;
        }
    }
    let entries = s.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
    if entries.len() != dim {
        return Err(format!("expected {dim} entries, got {}", entries.len()));
    }
    Ok(CVector::from_vec(entries))
}

/// `a:b` with `a < b`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    if a < b {
        Ok((a, b))
    } else {
        Err(format!("range {s:?} is empty"))
    }
}

pub fn to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|a| [a.re, a.im]).collect()
}
