//! Method of fundamental solutions for exterior scattering.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{Obstacle, SurfacePoint};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCondition;
use crate::linalg::{truncated_least_squares, CMatrix, CVector};

pub type CVector3 = Vector3<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Plane wave `e^{ik x·d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentWave {
    pub k: f64,
    pub d: Vector3<f64>,
}

impl IncidentWave {
    pub fn new(k: f64, d: Vector3<f64>) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain("wavenumber must be positive".into()));
        }
        if ((d.norm() - 1.0).abs()) > 1e-12 {
            return Err(Error::Domain("incident direction must be a unit vector".into()));
        }
        Ok(Self { k, d })
    }

    pub fn value(&self, x: &Vector3<f64>) -> Complex64 {
        (I * self.k * x.dot(&self.d)).exp()
    }

    pub fn gradient(&self, x: &Vector3<f64>) -> CVector3 {
        let u = self.value(x);
        self.d.map(|c| I * self.k * c * u)
    }
}

/// `Φ(x, y) = e^{ik|x-y|} / (4π|x-y|)` and its gradient in `x`.
pub fn fundamental_solution(k: f64, x: &Vector3<f64>, y: &Vector3<f64>) -> (Complex64, CVector3) {
    let d = x - y;
    let r = d.norm();
    let phi = (I * k * r).exp() / (4.0 * PI * r);
    let g = phi * (I * k - 1.0 / r) / r;
    (phi, d.map(|c| g * c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfsConfig {
    /// Approximate number of sources.
    pub sources: usize,
    /// Collocation points per source.
    pub oversampling: f64,
    /// Sources sit on the surface scaled by this factor about the centroid.
    pub shrink: f64,
    /// Relative singular-value cutoff of the truncated solve.
    pub rcond: f64,
    /// Largest acceptable relative boundary residual on the check grid.
    pub tolerance: f64,
}

impl Default for MfsConfig {
    fn default() -> Self {
        Self { sources: 600, oversampling: 2.0, shrink: 0.7, rcond: 1e-13, tolerance: 1e-3 }
    }
}

/// Sampled far-field pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    pub directions: Vec<Vector3<f64>>,
    pub values: Vec<Complex64>,
}

impl FarField {
    /// CSV with columns `theta,phi,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,phi,re,im\n");
        for (d, v) in self.directions.iter().zip(&self.values) {
            let theta = d.z.clamp(-1.0, 1.0).acos();
            let phi = d.y.atan2(d.x).rem_euclid(2.0 * PI);
            s.push_str(&format!("{theta:.17e},{phi:.17e},{:.17e},{:.17e}\n", v.re, v.im));
        }
        s
    }
}

/// Scattered field `u^s(x) = Σ c_j Φ(x, y_j)` for one incident wave.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MfsSolution {
    pub incident: IncidentWave,
    pub sources: Vec<Vector3<f64>>,
    pub coeffs: Vec<Complex64>,
    /// Relative boundary residual on the out-of-sample check grid.
    pub residual: f64,
    /// Relative residual of the least-squares system itself.
    pub fit_residual: f64,
    pub condition: f64,
    pub collocation_points: usize,
}

/// Boundary operator row: value, normal derivative or impedance.
fn boundary_apply(bc: &BoundaryCondition, normal: &Vector3<f64>, u: Complex64, grad: &CVector3) -> Complex64 {
    match bc.eta() {
        None => u,
        Some(eta) => {
            let dn: Complex64 = (0..3).map(|i| grad[i] * normal[i]).sum();
            dn + eta * u
        }
    }
}

impl MfsSolution {
    pub fn k(&self) -> f64 {
        self.incident.k
    }

    pub fn scattered(&self, x: &Vector3<f64>) -> Complex64 {
        self.sources.iter().zip(&self.coeffs).map(|(y, c)| c * fundamental_solution(self.k(), x, y).0).sum()
    }

    pub fn scattered_gradient(&self, x: &Vector3<f64>) -> CVector3 {
        let mut g = CVector3::zeros();
        for (y, c) in self.sources.iter().zip(&self.coeffs) {
            g += fundamental_solution(self.k(), x, y).1 * *c;
        }
        g
    }

    pub fn total(&self, x: &Vector3<f64>) -> Complex64 {
        self.incident.value(x) + self.scattered(x)
    }

    pub fn total_gradient(&self, x: &Vector3<f64>) -> CVector3 {
        self.incident.gradient(x) + self.scattered_gradient(x)
    }

    /// `u_∞(x̂) = (1/4π) Σ c_j e^{-ik x̂·y_j}`, so that
    /// `u^s(r x̂) = e^{ikr}/r · (u_∞(x̂) + O(1/r))`.
    pub fn far_field(&self, directions: &[Vector3<f64>]) -> FarField {
        let k = self.k();
        let values = directions
            .par_iter()
            .map(|xh| {
                self.sources
                    .iter()
                    .zip(&self.coeffs)
                    .map(|(y, c)| c * (-I * k * xh.dot(y)).exp())
                    .sum::<Complex64>()
                    / (4.0 * PI)
            })
            .collect();
        FarField { directions: directions.to_vec(), values }
    }

    /// Relative boundary residual `‖ℬu‖ / ‖ℬu^i‖` over the given points.
    pub fn boundary_residual(&self, obs: &Obstacle, points: &[SurfacePoint]) -> f64 {
        let parts: Vec<(f64, f64)> = points
            .par_iter()
            .map(|p| {
                let bc = &obs.bcs[p.face];
                let total = boundary_apply(bc, &p.normal, self.total(&p.x), &self.total_gradient(&p.x));
                let inc = boundary_apply(bc, &p.normal, self.incident.value(&p.x), &self.incident.gradient(&p.x));
                (total.norm_sqr(), inc.norm_sqr())
            })
            .collect();
        let num: f64 = parts.iter().map(|p| p.0).sum();
        let den: f64 = parts.iter().map(|p| p.1).sum();
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    }
}

/// Solves for the scattered field of `obs` under `inc`. Fails with a
/// convergence error when the out-of-sample residual exceeds the tolerance.
pub fn solve_forward(obs: &Obstacle, inc: &IncidentWave, cfg: &MfsConfig) -> Result<MfsSolution> {
    if !(cfg.shrink > 0.0 && cfg.shrink < 1.0) {
        return Err(Error::Domain("source shrink factor must lie in (0, 1)".into()));
    }
    if cfg.sources < 4 || !(cfg.oversampling >= 1.0) {
        return Err(Error::Domain("need at least 4 sources and oversampling ≥ 1".into()));
    }
    let k = inc.k;
    let center = obs.mesh.centroid();
    let sources: Vec<Vector3<f64>> =
        obs.mesh.scaled(&center, cfg.shrink).surface_points(cfg.sources, 0).iter().map(|p| p.x).collect();
    let colloc = obs.mesh.surface_points((cfg.sources as f64 * cfg.oversampling).ceil() as usize, 0);
    if colloc.len() < sources.len() {
        return Err(Error::Invalid("fewer collocation points than sources".into()));
    }
    let rows: Vec<(Vec<Complex64>, Complex64)> = colloc
        .par_iter()
        .map(|p| {
            let bc = &obs.bcs[p.face];
            let row = sources
                .iter()
                .map(|y| {
                    let (v, g) = fundamental_solution(k, &p.x, y);
                    boundary_apply(bc, &p.normal, v, &g)
                })
                .collect();
            let rhs = -boundary_apply(bc, &p.normal, inc.value(&p.x), &inc.gradient(&p.x));
            (row, rhs)
        })
        .collect();
    let a = CMatrix::from_fn(rows.len(), sources.len(), |i, j| rows[i].0[j]);
    let b = CVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let ls = truncated_least_squares(&a, &b, cfg.rcond)?;
    let mut sol = MfsSolution {
        incident: *inc,
        sources,
        coeffs: ls.x.iter().copied().collect(),
        residual: f64::NAN,
        fit_residual: ls.relative_residual,
        condition: ls.condition,
        collocation_points: colloc.len(),
    };
    let check = obs.mesh.surface_points((cfg.sources as f64 * cfg.oversampling).ceil() as usize, 1);
    sol.residual = sol.boundary_residual(obs, &check);
    if !(sol.residual <= cfg.tolerance) {
        let worst = worst_faces(&sol, obs, &check);
        return Err(Error::Convergence(format!(
            "boundary residual {:.3e} exceeds {:.1e} (condition {:.3e}, {} sources, {} collocation points; worst faces {})",
            sol.residual,
            cfg.tolerance,
            sol.condition,
            sol.sources.len(),
            sol.collocation_points,
            worst
        )));
    }
    Ok(sol)
}

fn worst_faces(sol: &MfsSolution, obs: &Obstacle, check: &[SurfacePoint]) -> String {
    let mut per_face = vec![0.0f64; obs.mesh.faces().len()];
    for p in check {
        let bc = &obs.bcs[p.face];
        let r = boundary_apply(bc, &p.normal, sol.total(&p.x), &sol.total_gradient(&p.x)).norm();
        per_face[p.face] = per_face[p.face].max(r);
    }
    let mut idx: Vec<usize> = (0..per_face.len()).collect();
    idx.sort_by(|&a, &b| per_face[b].total_cmp(&per_face[a]));
    idx.iter().take(3).map(|&i| format!("{i}: {:.2e}", per_face[i])).collect::<Vec<_>>().join(", ")
}

/// Gauss–Legendre in `cos θ` times uniform `φ`: directions and weights
/// summing to `4π`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub directions: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let gl = crate::quadrature::GaussLegendre::new(n_theta);
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            let s = (1.0 - x * x).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                directions.push(Vector3::new(s * phi.cos(), s * phi.sin(), x));
                weights.push(w * 2.0 * PI / n_phi as f64);
            }
        }
        Self { directions, weights }
    }

    pub fn l2_norm(&self, values: &[Complex64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖a - b‖ / ‖a‖` in `L²(S²)`.
    pub fn relative_distance(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.l2_norm(&diff) / self.l2_norm(a)
    }
}
