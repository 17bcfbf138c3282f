//! Subcommand definitions and their execution.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use kobayashi_core::detectors::{ball_bergman_curvature, default_r_grid, spc_exponent, spc_global_scan, squeezing_lower_bound, ScanRegion};
use kobayashi_core::domain::Shape;
use kobayashi_core::dynamics::{lyapunov_exponent, optimal_shift, pair_distance_curve, GeodesicRay};
use kobayashi_core::fit::linspace;
use kobayashi_core::geometry::{closest_boundary_point, delta, delta_dir_detail};
use kobayashi_core::linalg::{basis, AffineDoc};
use kobayashi_core::metrics::{dist_ball, dist_bounds, dist_siegel};
use kobayashi_core::rescaling::{blowup_sequence, frankel_normalize, local_hausdorff};
use kobayashi_core::{ConvexDomain, CVector, DomainDoc, Error};

use crate::report::*;
use crate::vectors::{parse_range, parse_vector, to_pairs};

#[derive(Debug, Parser)]
#[command(name = "kobayashi", version, about = "Kobayashi geometry of convex domains")]
pub struct Cli {
    /// JSON run configuration (tolerances, verdict thresholds, seed).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Siegel,
    Ball,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance to the boundary, or along a complex line with --dir.
    Delta {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
    },
    /// Kobayashi distance: exact on model domains, certified bounds otherwise.
    Dist {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
        #[arg(long, allow_hyphen_values = true)]
        z2: String,
    },
    /// Decay exponent of the distance between two asymptotic geodesic rays.
    Lyapunov {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        d: usize,
        /// Siegel: base vector of the second vertical ray (in span{e_2..e_d}).
        /// Ball: direction of the second radial ray.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        /// Siegel: real offset of the second ray.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        /// Ball: direction of the first radial ray (default e1).
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, default_value = "2:8")]
        trange: String,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Time shift of the second ray, or `auto` to minimise the final distance over [-5, 5].
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        shift: String,
    },
    /// Blow-up sequence at a boundary point.
    Rescale {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Affine normalization of a pointed domain into the normal family.
    Normalize {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Tangential boundary exponent at one point, or a scan of the boundary.
    Spc {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true, requires = "v")]
        xi: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "xi")]
        v: Option<String>,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// Interior point the scan shoots rays from.
        #[arg(long, allow_hyphen_values = true)]
        origin: Option<String>,
        /// Keep only boundary samples within --radius of this point.
        #[arg(long, allow_hyphen_values = true, requires = "radius")]
        anchor: Option<String>,
        #[arg(long, requires = "anchor")]
        radius: Option<f64>,
    },
    /// Local Hausdorff distance of two domains clipped to a ball.
    Hausdorff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long = "R")]
        r: f64,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Holomorphic sectional curvature of the Bergman metric of the ball.
    Bergman {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Affine lower bound for the squeezing function.
    Squeeze {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad input: exit code 2.
    Input { kind: String, message: String },
    /// Numerical failure: exit code 3.
    Numeric { kind: String, message: String },
}

impl Failure {
    pub fn input(kind: &str, message: impl Into<String>) -> Self {
        Failure::Input { kind: kind.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input { .. } => 2,
            Failure::Numeric { .. } => 3,
        }
    }

    pub fn to_doc(&self) -> ErrorDoc {
        let (kind, message) = match self {
            Failure::Input { kind, message } | Failure::Numeric { kind, message } => (kind.clone(), message.clone()),
        };
        ErrorDoc { error: kind, message, exit_code: self.exit_code() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = e.kind().to_string();
        let message = e.to_string();
        if e.is_input_error() {
            Failure::Input { kind, message }
        } else {
            Failure::Numeric { kind, message }
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn vector(s: &str, dim: usize, what: &str) -> Run<CVector> {
    parse_vector(s, dim).map_err(|e| Failure::input("ParseError", format!("--{what}: {e}")))
}

fn load_domain(path: &Path) -> Run<ConvexDomain> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input("IoError", format!("cannot read {}: {e}", path.display())))?;
    Ok(DomainDoc::from_json(&text)?)
}

fn csv_unsupported(command: &str) -> Failure {
    Failure::input("UnsupportedFormat", format!("{command} has no CSV output; use --format json"))
}

/// Exact distance for model shapes (after undoing the ball's scaling).
fn model_exact(domain: &ConvexDomain, z1: &CVector, z2: &CVector) -> Run<Option<f64>> {
    let d = domain.dim();
    Ok(match domain.shape() {
        Shape::Ball { radius, center } => Some(dist_ball(d, &(z1 - center).unscale(*radius), &(z2 - center).unscale(*radius))?),
        Shape::Siegel => Some(dist_siegel(d, z1, z2)?),
        _ => None,
    })
}

/// Executes a parsed command line and returns the text to write.
pub fn execute(cli: &Cli) -> Run<String> {
    let cfg = RunConfig::load(cli.config.as_deref()).map_err(|e| Failure::input("ConfigError", e))?;
    let tol = &cfg.tolerances;
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Delta { domain, point, dir } => {
            let header = Header::new("delta", &cfg);
            let dom = load_domain(domain)?;
            let z = vector(point, dom.dim(), "point")?;
            let result = match dir {
                Some(v) => {
                    let v = vector(v, dom.dim(), "dir")?;
                    let hit = delta_dir_detail(&dom, &z, &v, tol)?;
                    DeltaResult { point: to_pairs(&z), dir: Some(to_pairs(&v)), delta: hit.distance, theta: Some(hit.theta), boundary_point: Some(to_pairs(&hit.point)) }
                }
                None => {
                    let value = delta(&dom, &z, tol)?;
                    let frame: Vec<CVector> = (0..dom.dim()).map(|k| basis(dom.dim(), k)).collect();
                    let bp = match dom.shape() {
                        Shape::Ball { .. } | Shape::Siegel | Shape::Polytope { .. } | Shape::Polydisk { .. } | Shape::HalfPlaneProduct => None,
                        _ => closest_boundary_point(&dom, &z, &frame, tol).ok().map(|c| to_pairs(&c.point)),
                    };
                    DeltaResult { point: to_pairs(&z), dir: None, delta: value, theta: None, boundary_point: bp }
                }
            };
            if csv {
                let mut t = Table::new("delta,theta");
                t.push(&[Cell::Float(result.delta), Cell::Opt(result.theta)]);
                return Ok(t.render(&header));
            }
            Ok(json_document(header, result))
        }
        Command::Dist { domain, z1, z2 } => {
            let header = Header::new("dist", &cfg);
            let dom = load_domain(domain)?;
            let a = vector(z1, dom.dim(), "z1")?;
            let b = vector(z2, dom.dim(), "z2")?;
            let exact = model_exact(&dom, &a, &b)?;
            let result = match exact {
                Some(x) => DistResult { z1: to_pairs(&a), z2: to_pairs(&b), exact: Some(x), lower: x, upper: x, witness: "closed form".into() },
                None => {
                    let bounds = dist_bounds(&dom, &a, &b, tol)?;
                    DistResult { z1: to_pairs(&a), z2: to_pairs(&b), exact: None, lower: bounds.lower, upper: bounds.upper, witness: bounds.witness }
                }
            };
            if csv {
                let mut t = Table::new("lower,upper,exact");
                t.push(&[Cell::Float(result.lower), Cell::Float(result.upper), Cell::Opt(result.exact)]);
                return Ok(t.render(&header));
            }
            Ok(json_document(header, result))
        }
        Command::Lyapunov { model, d, v, alpha, u, trange, samples, shift } => {
            let header = Header::new("lyapunov", &cfg);
            let (t_min, t_max) = parse_range(trange).map_err(|e| Failure::input("ParseError", format!("--trange: {e}")))?;
            if *d == 0 {
                return Err(Failure::input("ParseError", "--d must be positive"));
            }
            let (r1, r2, name) = match model {
                ModelArg::Siegel => {
                    let base = match v {
                        Some(s) => vector(s, *d, "v")?,
                        None => CVector::zeros(*d),
                    };
                    (GeodesicRay::siegel_axis(*d), GeodesicRay::siegel_vertical(*d, base, *alpha)?, "siegel")
                }
                ModelArg::Ball => {
                    let u1 = match u {
                        Some(s) => vector(s, *d, "u")?,
                        None => basis(*d, 0),
                    };
                    let v = v.as_deref().ok_or_else(|| Failure::input("ParseError", "--v is required for the ball model"))?;
                    (GeodesicRay::ball_radial(u1)?, GeodesicRay::ball_radial(vector(v, *d, "v")?)?, "ball")
                }
            };
            let shift = match shift.as_str() {
                "auto" => optimal_shift(&r1, &r2, t_max, -5.0, 5.0)?,
                s => s.parse::<f64>().map_err(|_| Failure::input("ParseError", format!("--shift: bad value {s:?}")))?,
            };
            if csv {
                let grid = linspace(t_min, t_max, *samples);
                let curve = pair_distance_curve(&r1, &r2, &grid, shift)?;
                let mut t = Table::new("t,distance,path");
                for p in &curve {
                    t.push(&[Cell::Float(p.t), Cell::Float(p.distance), Cell::Text(p.path.clone())]);
                }
                return Ok(t.render(&header));
            }
            let fit = lyapunov_exponent(&r1, &r2, t_min, t_max, *samples, shift)?;
            let result = LyapunovResult {
                model: name.into(),
                exponent: fit.exponent,
                half_width: fit.half_width,
                intercept: fit.intercept,
                t_min,
                t_max,
                n_samples: fit.n_samples,
                shift,
            };
            Ok(json_document(header, result))
        }
        Command::Rescale { domain, xi, v, steps } => {
            let header = Header::new("rescale", &cfg);
            let dom = load_domain(domain)?;
            let p = vector(xi, dom.dim(), "xi")?;
            let dir = vector(v, dom.dim(), "v")?;
            let seq = blowup_sequence(&dom, &p, *steps, &dir, tol)?;
            let docs: Vec<RescaleStep> = seq
                .iter()
                .map(|s| RescaleStep {
                    n: s.n,
                    r: s.r,
                    affine: AffineDoc::from(&s.map),
                    kd: s.kd.clone(),
                    dh: HausdorffDeltas { r1: s.hausdorff.map(|h| h[0]), r4: s.hausdorff.map(|h| h[1]), r16: s.hausdorff.map(|h| h[2]) },
                })
                .collect();
            if csv {
                let mut t = Table::new("n,r,kd_passes,dH1,dH4,dH16");
                for s in &docs {
                    t.push(&[Cell::Int(s.n), Cell::Float(s.r), Cell::Bool(s.kd.passes), Cell::Opt(s.dh.r1), Cell::Opt(s.dh.r4), Cell::Opt(s.dh.r16)]);
                }
                return Ok(t.render(&header));
            }
            Ok(json_document(header, docs))
        }
        Command::Normalize { domain, point } => {
            let header = Header::new("normalize", &cfg);
            if csv {
                return Err(csv_unsupported("normalize"));
            }
            let dom = load_domain(domain)?;
            let x = vector(point, dom.dim(), "point")?;
            let nm = frankel_normalize(&dom, &x, tol)?;
            let result = NormalizeResult {
                point: to_pairs(&x),
                affine: AffineDoc::from(&nm.map),
                kd: nm.report,
                boundary_points: nm.boundary_points.iter().map(to_pairs).collect(),
                deltas: nm.deltas,
            };
            Ok(json_document(header, result))
        }
        Command::Spc { domain, xi, v, samples, origin, anchor, radius } => {
            let header = Header::new("spc", &cfg);
            let dom = load_domain(domain)?;
            let d = dom.dim();
            if let (Some(xi), Some(v)) = (xi, v) {
                let p = vector(xi, d, "xi")?;
                let dir = vector(v, d, "v")?;
                let verdict = spc_exponent(&dom, &p, &dir, &default_r_grid(), tol, &cfg.verdict)?;
                if csv {
                    let mut t = Table::new("xi_index,dir_index,exponent,half_width");
                    t.push(&[Cell::Int(0), Cell::Int(0), Cell::Float(verdict.exponent_fit.exponent), Cell::Float(verdict.exponent_fit.half_width)]);
                    return Ok(t.render(&header));
                }
                return Ok(json_document(header, VerdictDoc::from(&verdict)));
            }
            let region = ScanRegion {
                origin: origin.as_deref().map(|s| vector(s, d, "origin")).transpose()?,
                anchor: anchor.as_deref().map(|s| vector(s, d, "anchor")).transpose()?,
                radius: *radius,
            };
            let scan = spc_global_scan(&dom, *samples, &region, tol, &cfg.verdict)?;
            if csv {
                let mut t = Table::new("xi_index,dir_index,exponent,half_width");
                for r in &scan.rows {
                    t.push(&[Cell::Int(r.xi_index), Cell::Int(r.dir_index), Cell::Float(r.verdict.exponent_fit.exponent), Cell::Float(r.verdict.exponent_fit.half_width)]);
                }
                return Ok(t.render(&header));
            }
            let row_doc = |r: &kobayashi_core::detectors::ScanRow| {
                let v = VerdictDoc::from(&r.verdict);
                ScanRowDoc {
                    xi_index: r.xi_index,
                    dir_index: r.dir_index,
                    xi: to_pairs(&r.xi),
                    v: to_pairs(&r.v),
                    exponent: v.exponent,
                    half_width: v.half_width,
                    target: v.target,
                    verdict: v.verdict,
                }
            };
            let doc = ScanDoc { worst: row_doc(scan.worst_row()), rows: scan.rows.iter().map(row_doc).collect(), skipped: scan.skipped };
            Ok(json_document(header, doc))
        }
        Command::Hausdorff { a, b, r, samples } => {
            let header = Header::new("hausdorff", &cfg);
            let da = load_domain(a)?;
            let db = load_domain(b)?;
            let n = samples.unwrap_or(tol.hausdorff_directions);
            let distance = local_hausdorff(&da, &db, *r, n, tol)?;
            let result = HausdorffResult { radius: *r, samples: n, distance };
            if csv {
                let mut t = Table::new("R,samples,distance");
                t.push(&[Cell::Float(*r), Cell::Int(n), Cell::Float(distance)]);
                return Ok(t.render(&header));
            }
            Ok(json_document(header, result))
        }
        Command::Bergman { d, z, v } => {
            let header = Header::new("bergman", &cfg);
            if *d == 0 {
                return Err(Failure::input("ParseError", "--d must be positive"));
            }
            let zz = vector(z, *d, "z")?;
            let vv = vector(v, *d, "v")?;
            let k = ball_bergman_curvature(*d, &zz, &vv)?;
            let result = BergmanResult { d: *d, z: to_pairs(&zz), v: to_pairs(&vv), curvature: k, klembeck_constant: -4.0 / (*d as f64 + 1.0) };
            if csv {
                let mut t = Table::new("d,curvature,klembeck_constant");
                t.push(&[Cell::Int(*d), Cell::Float(k), Cell::Float(result.klembeck_constant)]);
                return Ok(t.render(&header));
            }
            Ok(json_document(header, result))
        }
        Command::Squeeze { domain, point } => {
            let header = Header::new("squeeze", &cfg);
            let dom = load_domain(domain)?;
            let p = vector(point, dom.dim(), "point")?;
            let s = squeezing_lower_bound(&dom, &p, tol)?;
            if csv {
                let mut t = Table::new("lower_bound");
                t.push(&[Cell::Float(s)]);
                return Ok(t.render(&header));
            }
            Ok(json_document(header, SqueezeResult { point: to_pairs(&p), lower_bound: s }))
        }
    }
}
