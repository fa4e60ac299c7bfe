//! Numerical checks of predicted vanishing orders.
//!
//! [`collocation_nullspace`] imposes the corner's boundary conditions on a
//! truncated expansion at collocation points and reads off which degrees the
//! numerical nullspace reaches. [`integral_order`] measures the decay of
//! `ρ ↦ ∫_{B_ρ} |u|` directly.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::expansion::{Expansion, ModeBasis, SphericalPoint};
use crate::geometry::{EdgeCorner, VertexCorner};
use crate::linalg::{normalize_columns, normalize_rows, nullspace, rank, right_svd, spectral_norm, CMatrix};
use crate::quadrature::{chebyshev_points, BallRule};
use crate::specfun::ModeIndex;
use crate::vanish::{Order, VanishingVerdict};

/// Corner handed to the oracle.
#[derive(Debug, Clone, Copy)]
pub enum Corner<'a> {
    Edge(&'a EdgeCorner),
    Vertex(&'a VertexCorner),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular value below which a direction is in the nullspace.
    pub sigma_cut: f64,
    /// Required separation of the spectrum across the cut.
    pub gap: f64,
    /// Share of a nullspace vector's norm that counts as "carrying mass".
    pub tau_mass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { sigma_cut: 1e-9, gap: 1e3, tau_mass: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub lambda: f64,
    pub n_max: u32,
    /// Chebyshev radii on `(0, π/√λ)`.
    pub n_radii: usize,
    /// Angular points per face; raised automatically so that there are at
    /// least three rows per unknown.
    pub n_angles: usize,
    /// For vertices: the adjacent face pair `(i, i+1)` whose shared edge is
    /// put on the `x₃`-axis.
    pub vertex_pair: usize,
    pub tolerances: Tolerances,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { lambda: 1.0, n_max: 10, n_radii: 20, n_angles: 0, vertex_pair: 0, tolerances: Tolerances::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LeadingDegree {
    Degree { n: u32 },
    AllVanish { n_max: u32 },
    /// The singular values show no clean split; no order is claimed.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub leading_degree: LeadingDegree,
    pub nullspace_dim: usize,
    /// `(n, count)`: independent nullspace vectors whose lowest degree is `n`.
    pub nullspace_dim_per_degree: Vec<(u32, usize)>,
    /// Relative singular values, largest first.
    pub singular_values: Vec<f64>,
    pub gap: f64,
    /// Largest share of a nullspace vector on modes with `m ≠ 0`.
    pub off_axis_mass: f64,
    /// Largest share of a nullspace vector on `a_n^0` at the leading degree.
    pub axial_mass_at_leading: f64,
    /// Boundary residual of the nullspace on a finer grid, relative.
    pub survivor_residual: Option<f64>,
    pub rows: usize,
    pub unknowns: usize,
    pub lambda: f64,
    pub n_max: u32,
    pub tolerances: Tolerances,
    /// Nullspace vectors as expansion coefficients (flat order, unit norm in
    /// the column-scaled coordinates).
    #[serde(skip)]
    pub survivors: Vec<Expansion>,
}

struct Assembly {
    rows: Vec<Vec<Complex64>>,
}

fn face_samples(count: usize) -> Vec<f64> {
    chebyshev_points(count, 0.0, 1.0)
}

fn assemble_edge(c: &EdgeCorner, basis: &ModeBasis, radii: &[f64], n_theta: usize) -> Result<Assembly> {
    let thetas = chebyshev_points(n_theta, 0.0, PI);
    let mut jobs = Vec::new();
    for (phi, side, bc) in [(0.0, -1.0, c.bc1), (c.opening(), 1.0, c.bc2)] {
        for &r in radii {
            for &t in &thetas {
                jobs.push((SphericalPoint::new(r, t, phi), side, bc));
            }
        }
    }
    let mut rows: Vec<Vec<Complex64>> = jobs
        .par_iter()
        .map(|(p, side, bc)| match bc.eta() {
            None => Ok(basis.value(p)),
            Some(eta) => basis.impedance(p, *side, eta),
        })
        .collect::<Result<_>>()?;
    if c.aux_line_zero {
        for &r in radii {
            rows.push(basis.edge_line(r, true));
            rows.push(basis.edge_line(r, false));
        }
    }
    Ok(Assembly { rows })
}

/// Unit vector a fraction `t` of the way from `a` to `b` along the great circle.
fn slerp(a: &Vector3<f64>, b: &Vector3<f64>, t: f64) -> Vector3<f64> {
    let omega = a.dot(b).clamp(-1.0, 1.0).acos();
    let s = omega.sin();
    ((a * ((1.0 - t) * omega).sin() + b * (t * omega).sin()) / s).normalize()
}

fn assemble_vertex(v: &VertexCorner, pair: usize, basis: &ModeBasis, radii: &[f64], n_ang: usize) -> Result<Assembly> {
    let frame = v.pair_frame(pair % v.len());
    let nf = v.len();
    let fractions = face_samples(n_ang);
    let mut jobs = Vec::new();
    for j in 0..nf {
        let a = frame.to_local(&v.rays[j].unit());
        let b = frame.to_local(&v.rays[(j + 1) % nf].unit());
        let normal = frame.to_local(&v.face_normal(j));
        for &r in radii {
            for &t in &fractions {
                let d = slerp(&a, &b, t);
                jobs.push((SphericalPoint::from_cartesian(&(d * r)), normal, v.bcs[j]));
            }
        }
    }
    let mut rows: Vec<Vec<Complex64>> = jobs
        .par_iter()
        .map(|(p, normal, bc)| match bc.eta() {
            None => Ok(basis.value(p)),
            Some(eta) => {
                // Remove the roundoff-level radial part of the in-plane normal.
                let [r_hat, _, _] = crate::geometry::spherical_frame(p.theta, p.phi);
                let nu = (normal - r_hat * r_hat.dot(normal)).normalize();
                basis.directional(p, &nu, eta)
            }
        })
        .collect::<Result<_>>()?;
    if v.aux_vertex_zero {
        rows.push(basis.value(&SphericalPoint::new(0.0, 0.0, 0.0)));
    }
    Ok(Assembly { rows })
}

fn faces_of(corner: &Corner) -> usize {
    match corner {
        Corner::Edge(_) => 2,
        Corner::Vertex(v) => v.len(),
    }
}

fn validate(corner: &Corner, s: &OracleSettings) -> Result<()> {
    match corner {
        Corner::Edge(c) => c.validate()?,
        Corner::Vertex(v) => v.validate()?,
    }
    if !(s.lambda > 0.0) || !s.lambda.is_finite() {
        return Err(domain("λ must be positive"));
    }
    if s.n_radii < 2 {
        return Err(domain("need at least two collocation radii"));
    }
    Ok(())
}

fn angular_count(corner: &Corner, s: &OracleSettings, unknowns: usize) -> usize {
    let per_face_needed = (3 * unknowns).div_ceil(faces_of(corner) * s.n_radii);
    s.n_angles.max(per_face_needed).max(2 * s.n_max as usize + 2)
}

fn assemble(corner: &Corner, s: &OracleSettings, n_radii: usize, n_ang: usize) -> Result<Assembly> {
    let basis = ModeBasis::new(s.n_max, s.lambda.sqrt());
    let radii = chebyshev_points(n_radii, 0.0, PI / s.lambda.sqrt());
    match corner {
        Corner::Edge(c) => assemble_edge(c, &basis, &radii, n_ang),
        Corner::Vertex(v) => assemble_vertex(v, s.vertex_pair, &basis, &radii, n_ang),
    }
}

fn to_matrix(a: &Assembly, cols: usize) -> CMatrix {
    CMatrix::from_fn(a.rows.len(), cols, |i, j| a.rows[i][j])
}

fn rows_where(basis: &CMatrix, keep: impl Fn(ModeIndex) -> bool) -> CMatrix {
    let idx: Vec<usize> = (0..basis.nrows()).filter(|&k| keep(ModeIndex::from_flat(k))).collect();
    CMatrix::from_fn(idx.len(), basis.ncols(), |i, j| basis[(idx[i], j)])
}

/// Collocation nullspace of the corner's boundary conditions.
pub fn collocation_nullspace(corner: Corner, settings: &OracleSettings) -> Result<OracleReport> {
    validate(&corner, settings)?;
    let unknowns = ModeIndex::count(settings.n_max);
    let n_ang = angular_count(&corner, settings, unknowns);
    let asm = assemble(&corner, settings, settings.n_radii, n_ang)?;
    let mut a = to_matrix(&asm, unknowns);
    let rows = a.nrows();
    let scales = normalize_columns(&mut a);
    normalize_rows(&mut a);
    let tol = settings.tolerances;
    let ns = nullspace(&a, tol.sigma_cut, tol.gap);
    let smax = ns.singular_values.first().copied().unwrap_or(1.0);
    let singular_values: Vec<f64> = ns.singular_values.iter().map(|s| s / smax).collect();
    let basis = ns.basis;
    let dim = basis.ncols();

    let mut per_degree = Vec::new();
    let mut leading = None;
    let mut prev_rank = 0;
    if dim > 0 {
        for n in 0..=settings.n_max {
            let r = rank(&rows_where(&basis, |i| i.n <= n), tol.tau_mass);
            if r > prev_rank {
                per_degree.push((n, r - prev_rank));
                leading.get_or_insert(n);
            }
            prev_rank = r;
        }
    }
    let leading_degree = if !ns.clear {
        LeadingDegree::Inconclusive
    } else {
        match leading {
            Some(n) => LeadingDegree::Degree { n },
            None => LeadingDegree::AllVanish { n_max: settings.n_max },
        }
    };
    let off_axis_mass = spectral_norm(&rows_where(&basis, |i| i.m != 0));
    let axial_mass_at_leading = match leading {
        Some(n) => spectral_norm(&rows_where(&basis, |i| i.n == n && i.m == 0)),
        None => 0.0,
    };

    let survivors: Vec<Expansion> = (0..dim)
        .map(|c| {
            let coeffs = (0..unknowns).map(|k| basis[(k, c)] / scales[k]).collect();
            Expansion::from_flat(settings.lambda, settings.n_max, coeffs)
        })
        .collect::<Result<_>>()?;

    let survivor_residual = if dim > 0 && ns.clear {
        let fine = assemble(&corner, settings, settings.n_radii * 3 / 2 + 1, n_ang * 3 / 2 + 1)?;
        let mut af = to_matrix(&fine, unknowns);
        for (j, s) in scales.iter().enumerate() {
            let mut col = af.column_mut(j);
            col /= Complex64::new(*s, 0.0);
        }
        normalize_rows(&mut af);
        let top = right_svd(&af).0.first().copied().unwrap_or(1.0);
        Some(spectral_norm(&(&af * &basis)) / top)
    } else {
        None
    };

    Ok(OracleReport {
        leading_degree,
        nullspace_dim: dim,
        nullspace_dim_per_degree: per_degree,
        singular_values,
        gap: ns.gap,
        off_axis_mass,
        axial_mass_at_leading,
        survivor_residual,
        rows,
        unknowns,
        lambda: settings.lambda,
        n_max: settings.n_max,
        tolerances: tol,
        survivors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Agree,
    Disagree,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub outcome: Outcome,
    /// Observed order equals the guaranteed one.
    pub sharp: bool,
    pub guaranteed: Order,
    pub observed: LeadingDegree,
    pub note: String,
}

/// The prediction is a lower bound: the oracle agrees when it finds no
/// survivor below the guaranteed order.
pub fn cross_check(verdict: &VanishingVerdict, report: &OracleReport) -> Agreement {
    let observed = report.leading_degree;
    let guaranteed = verdict.order;
    let (outcome, sharp, note) = match (guaranteed, observed) {
        (_, LeadingDegree::Inconclusive) => {
            (Outcome::Inconclusive, false, "singular values show no clear gap; no comparison made".to_string())
        }
        (Order::Infinite, LeadingDegree::AllVanish { n_max }) => {
            (Outcome::Agree, false, format!("infinite order predicted, no survivor up to degree {n_max}"))
        }
        (Order::Infinite, LeadingDegree::Degree { n }) => {
            (Outcome::Disagree, false, format!("infinite order predicted but a survivor starts at degree {n}"))
        }
        (Order::Finite { n: g }, LeadingDegree::AllVanish { n_max }) => {
            if n_max >= g {
                (Outcome::Agree, false, format!("no survivor up to degree {n_max} ≥ {g} (strict)"))
            } else {
                (Outcome::Inconclusive, false, format!("truncation {n_max} is below the guaranteed order {g}"))
            }
        }
        (Order::Finite { n: g }, LeadingDegree::Degree { n }) => {
            if n > g {
                (Outcome::Agree, false, format!("survivor at degree {n} > {g} (strict)"))
            } else if n == g {
                (Outcome::Agree, true, format!("survivor at degree {n} = {g} (sharp)"))
            } else {
                (Outcome::Disagree, false, format!("survivor at degree {n} below the guaranteed order {g}"))
            }
        }
    };
    Agreement { outcome, sharp, guaranteed, observed, note }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralOrderEstimate {
    /// Least-squares slope of `log I(ρ)` against `log ρ`.
    pub slope: f64,
    /// `slope - 3`.
    pub order_estimate: f64,
    /// Nearest integer when within 0.2 of `order_estimate`.
    pub rounded: Option<u32>,
    pub rho_range: (f64, f64),
    /// RMS deviation of `log I` from the fitted line.
    pub fit_residual: f64,
    pub samples: Vec<(f64, f64)>,
    pub flag: Option<String>,
}

/// Points per dimension of the product rule.
pub const BALL_POINTS: usize = 48;

/// Decay rate of `I(ρ) = ∫_{B_ρ(center)} |u| dx` over the given radii.
pub fn integral_order(
    u: &(dyn Fn(&Vector3<f64>) -> Complex64 + Sync),
    center: &Vector3<f64>,
    rho_list: &[f64],
    points: usize,
) -> Result<IntegralOrderEstimate> {
    if rho_list.len() < 2 {
        return Err(domain("need at least two radii"));
    }
    let lo = rho_list.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rho_list.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(domain("radii must be positive and span at least one decade"));
    }
    let rule = BallRule::new(points, points, points);
    let samples: Vec<(f64, f64)> = rho_list
        .par_iter()
        .map(|&rho| {
            let i = rule.integrate(rho, |r, t, p| {
                let x = SphericalPoint::new(r, t, p).to_cartesian() + center;
                u(&x).norm()
            });
            (rho, i)
        })
        .collect();
    if samples.iter().any(|&(_, i)| !i.is_finite()) {
        return Err(Error::Convergence("quadrature produced non-finite values".into()));
    }
    if samples.iter().all(|&(_, i)| i == 0.0) {
        return Ok(IntegralOrderEstimate {
            slope: f64::INFINITY,
            order_estimate: f64::INFINITY,
            rounded: None,
            rho_range: (lo, hi),
            fit_residual: 0.0,
            samples,
            flag: Some("field vanishes identically on every ball".into()),
        });
    }
    if samples.iter().any(|&(_, i)| i <= 0.0) {
        return Err(Error::Convergence("integral vanishes on some but not all balls".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fit_residual =
        (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    let order_estimate = slope - 3.0;
    let nearest = order_estimate.round();
    let mut flag = None;
    let rounded = if order_estimate < -0.2 {
        flag = Some(format!("integral decays slower than ρ³ (slope {slope:.3}); reported as order 0"));
        Some(0)
    } else if (order_estimate - nearest).abs() <= 0.2 {
        Some(nearest.max(0.0) as u32)
    } else {
        flag = Some(format!("order estimate {order_estimate:.3} is not within 0.2 of an integer"));
        None
    };
    Ok(IntegralOrderEstimate { slope, order_estimate, rounded, rho_range: (lo, hi), fit_residual, samples, flag })
}

/// Radii `ρ_max · 10^{-decades · i/(count-1)}`, largest first.
pub fn log_radii(rho_max: f64, decades: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| rho_max * 10f64.powf(-decades * i as f64 / (count - 1).max(1) as f64)).collect()
}
