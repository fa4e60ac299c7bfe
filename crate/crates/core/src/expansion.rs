//! Truncated spherical-wave expansions
//! `u = 4π Σ_n Σ_m iⁿ a_n^m j_n(√λ r) Y_n^m(θ, φ)` and their traces on planes
//! and rays through the origin.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::geometry::{spherical_frame, Ray};
use crate::linalg::{least_squares, CMatrix, CVector};
use crate::specfun::{harmonic_norm, i_pow, sph_bessel_j, sph_bessel_j_all, LegendreTable, ModeIndex, SphericalDirection};

/// Default truncation degree.
pub const DEFAULT_N_MAX: u32 = 20;

/// Singular-value ratio below which a fit is declared rank deficient.
pub const FIT_RCOND: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Point `(r, θ, φ)` in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Self { r, theta, phi }
    }

    pub fn from_cartesian(x: &Vector3<f64>) -> Self {
        let r = x.norm();
        if r == 0.0 {
            return Self { r: 0.0, theta: 0.0, phi: 0.0 };
        }
        Self { r, theta: (x.z / r).clamp(-1.0, 1.0).acos(), phi: x.y.atan2(x.x) }
    }

    pub fn to_cartesian(&self) -> Vector3<f64> {
        let d = SphericalDirection { theta: self.theta, phi: self.phi }.to_cartesian();
        Vector3::new(d[0], d[1], d[2]) * self.r
    }
}

/// One sampled value of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub value: Complex64,
}

/// Mode-by-mode evaluation of the expansion basis
/// `b_n^m = 4π iⁿ j_n(k r) Y_n^m` and of its boundary operators. Each method
/// returns one entry per mode in flat `n² + n + m` order.
#[derive(Debug, Clone, Copy)]
pub struct ModeBasis {
    pub n_max: u32,
    pub k: f64,
}

struct PointData {
    radial: Vec<f64>,
    legendre: LegendreTable,
    phases: Vec<Complex64>,
    norms: Vec<f64>,
}

impl ModeBasis {
    pub fn new(n_max: u32, k: f64) -> Self {
        Self { n_max, k }
    }

    pub fn len(&self) -> usize {
        ModeIndex::count(self.n_max)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn point_data(&self, p: &SphericalPoint) -> PointData {
        let radial = sph_bessel_j_all(self.n_max, self.k * p.r).expect("radius is non-negative");
        let legendre = LegendreTable::new(self.n_max, p.theta.cos());
        let n = self.n_max as i32;
        let phases = (-n..=n).map(|m| Complex64::from_polar(1.0, m as f64 * p.phi)).collect();
        let norms = ModeIndex::all(self.n_max).map(|i| harmonic_norm(i.n, i.m)).collect();
        PointData { radial, legendre, phases, norms }
    }

    fn fill(&self, p: &SphericalPoint, angular: impl Fn(&PointData, ModeIndex) -> f64, phi_factor: impl Fn(i32) -> Complex64) -> Vec<Complex64> {
        let d = self.point_data(p);
        let n = self.n_max as i32;
        ModeIndex::all(self.n_max)
            .enumerate()
            .map(|(k, idx)| {
                let ang = angular(&d, idx);
                if ang == 0.0 {
                    return ZERO;
                }
                let scale = 4.0 * PI * d.radial[idx.n as usize] * d.norms[k] * ang;
                i_pow(idx.n) * d.phases[(idx.m + n) as usize] * phi_factor(idx.m) * scale
            })
            .collect()
    }

    /// `b_n^m(p)`.
    pub fn value(&self, p: &SphericalPoint) -> Vec<Complex64> {
        self.fill(p, |d, i| d.legendre.get(i.n, i.m.unsigned_abs()), |_| Complex64::new(1.0, 0.0))
    }

    /// `∂_φ b_n^m(p)`.
    pub fn dphi(&self, p: &SphericalPoint) -> Vec<Complex64> {
        self.fill(p, |d, i| d.legendre.get(i.n, i.m.unsigned_abs()), |m| Complex64::new(0.0, m as f64))
    }

    /// `∂_θ b_n^m(p)`; requires `θ ∈ (0, π)`.
    pub fn dtheta(&self, p: &SphericalPoint) -> Vec<Complex64> {
        self.fill(p, |d, i| d.legendre.dtheta(i.n, i.m.unsigned_abs()), |_| Complex64::new(1.0, 0.0))
    }

    /// Trace on the edge line: the limits at `θ = 0` (north) or `θ = π`, where
    /// `P_n^m(±1) = 0` for `m ≥ 1` and `P_n^0(±1) = (±1)ⁿ`.
    pub fn edge_line(&self, r: f64, north: bool) -> Vec<Complex64> {
        let radial = sph_bessel_j_all(self.n_max, self.k * r).expect("radius is non-negative");
        ModeIndex::all(self.n_max)
            .map(|i| {
                if i.m != 0 {
                    return ZERO;
                }
                let sign = if north || i.n % 2 == 0 { 1.0 } else { -1.0 };
                i_pow(i.n) * (4.0 * PI * radial[i.n as usize] * harmonic_norm(i.n, 0) * sign)
            })
            .collect()
    }

    /// `side/(r sin θ) · ∂_φ b + η b` on the half-plane through `p`.
    pub fn impedance(&self, p: &SphericalPoint, side: f64, eta: Complex64) -> Result<Vec<Complex64>> {
        check_off_axis(p)?;
        let v = self.value(p);
        let dphi = self.dphi(p);
        let f = side / (p.r * p.theta.sin());
        Ok(v.iter().zip(&dphi).map(|(b, d)| d * f + b * eta).collect())
    }

    /// `(1/r) ∂_θ b (ν·θ̂) + (1/(r sin θ)) ∂_φ b (ν·φ̂) + η b` at `p`.
    pub fn directional(&self, p: &SphericalPoint, nu: &Vector3<f64>, eta: Complex64) -> Result<Vec<Complex64>> {
        check_off_axis(p)?;
        let [r_hat, t_hat, p_hat] = spherical_frame(p.theta, p.phi);
        if (nu.norm() - 1.0).abs() > 1e-10 {
            return Err(domain("normal vector must have unit length"));
        }
        if nu.dot(&r_hat).abs() > 1e-10 {
            return Err(domain(format!(
                "normal has radial component {:.3e}; a plane through the origin contains its rays",
                nu.dot(&r_hat)
            )));
        }
        let ct = nu.dot(&t_hat) / p.r;
        let cp = nu.dot(&p_hat) / (p.r * p.theta.sin());
        let v = self.value(p);
        let dt = self.dtheta(p);
        let dp = self.dphi(p);
        Ok((0..v.len()).map(|i| dt[i] * ct + dp[i] * cp + v[i] * eta).collect())
    }
}

fn check_off_axis(p: &SphericalPoint) -> Result<()> {
    if !(p.theta > 0.0 && p.theta < PI) {
        return Err(domain(format!("trace needs θ in (0, π), got {}", p.theta)));
    }
    if !(p.r > 0.0) {
        return Err(domain("trace needs r > 0"));
    }
    Ok(())
}

fn dot(row: &[Complex64], coeffs: &[Complex64]) -> Complex64 {
    row.iter().zip(coeffs).fold(ZERO, |acc, (a, b)| acc + a * b)
}

/// Truncated expansion with wavenumber `k = √λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    lambda: f64,
    n_max: u32,
    coeffs: Vec<Complex64>,
}

impl Expansion {
    pub fn zeros(lambda: f64, n_max: u32) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain(format!("eigenvalue λ must be positive and finite, got {lambda}")));
        }
        Ok(Self { lambda, n_max, coeffs: vec![ZERO; ModeIndex::count(n_max)] })
    }

    /// Coefficients in flat `n² + n + m` order.
    pub fn from_flat(lambda: f64, n_max: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut e = Self::zeros(lambda, n_max)?;
        if coeffs.len() != e.coeffs.len() {
            return Err(domain(format!("expected {} coefficients, got {}", e.coeffs.len(), coeffs.len())));
        }
        e.coeffs = coeffs;
        Ok(e)
    }

    /// `e^{i k x·d}` truncated at `n_max`: `a_n^m = conj(Y_n^m(d))`.
    pub fn plane_wave(k: f64, d: &Vector3<f64>, n_max: u32) -> Result<Self> {
        let dir = SphericalDirection::from_cartesian([d.x, d.y, d.z])?;
        let mut e = Self::zeros(k * k, n_max)?;
        for idx in ModeIndex::all(n_max) {
            e.coeffs[idx.flat()] = crate::specfun::sph_harmonic(idx, dir).conj();
        }
        Ok(e)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> f64 {
        self.lambda.sqrt()
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, idx: ModeIndex) -> Complex64 {
        if idx.n > self.n_max {
            ZERO
        } else {
            self.coeffs[idx.flat()]
        }
    }

    pub fn set(&mut self, idx: ModeIndex, value: Complex64) -> Result<()> {
        if idx.n > self.n_max || idx.m.unsigned_abs() > idx.n {
            return Err(domain(format!("mode ({}, {}) outside truncation {}", idx.n, idx.m, self.n_max)));
        }
        self.coeffs[idx.flat()] = value;
        Ok(())
    }

    pub fn basis(&self) -> ModeBasis {
        ModeBasis::new(self.n_max, self.k())
    }

    /// `a·self + b·other`; both must share `λ` and `n_max`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.n_max != other.n_max || self.lambda != other.lambda {
            return Err(domain("expansions differ in λ or truncation"));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { lambda: self.lambda, n_max: self.n_max, coeffs })
    }

    pub fn eval(&self, p: &SphericalPoint) -> Complex64 {
        if p.r == 0.0 {
            return self.coeffs[0] * (4.0 * PI).sqrt();
        }
        dot(&self.basis().value(p), &self.coeffs)
    }

    pub fn eval_cartesian(&self, x: &Vector3<f64>) -> Complex64 {
        self.eval(&SphericalPoint::from_cartesian(x))
    }

    /// `u` on the half-plane `φ = φ₀` at the `(r, θ)` samples.
    pub fn phi_trace(&self, phi0: f64, samples: &[(f64, f64)]) -> Vec<TraceSample> {
        samples
            .iter()
            .map(|&(r, theta)| {
                let p = SphericalPoint::new(r, theta, phi0);
                TraceSample { r, theta, phi: phi0, value: self.eval(&p) }
            })
            .collect()
    }

    /// `side/(r sin θ) · ∂_φ u + η u` on the half-plane `φ = φ₀`.
    pub fn impedance_trace(&self, phi0: f64, side: f64, eta: Complex64, samples: &[(f64, f64)]) -> Result<Vec<TraceSample>> {
        let basis = self.basis();
        samples
            .iter()
            .map(|&(r, theta)| {
                let p = SphericalPoint::new(r, theta, phi0);
                let row = basis.impedance(&p, side, eta)?;
                Ok(TraceSample { r, theta, phi: phi0, value: dot(&row, &self.coeffs) })
            })
            .collect()
    }

    /// Directional-derivative-plus-`η` trace along a ray at the given radii.
    pub fn ray_impedance_trace(&self, ray: &Ray, nu: &Vector3<f64>, eta: Complex64, radii: &[f64]) -> Result<Vec<TraceSample>> {
        let basis = self.basis();
        radii
            .iter()
            .map(|&r| {
                let p = SphericalPoint::new(r, ray.theta, ray.phi);
                let row = basis.directional(&p, nu, eta)?;
                Ok(TraceSample { r, theta: ray.theta, phi: ray.phi, value: dot(&row, &self.coeffs) })
            })
            .collect()
    }

    /// `u` on the edge line (`θ = 0` when `north`, else `θ = π`).
    pub fn edge_line_trace(&self, r: f64, north: bool) -> Complex64 {
        dot(&self.basis().edge_line(r, north), &self.coeffs)
    }

    /// `max_m |a_{n_max}^m| · |j_{n_max}(k r_max)|`.
    pub fn tail_indicator(&self, r_max: f64) -> f64 {
        let n = self.n_max;
        let j = sph_bessel_j(n, self.k() * r_max).unwrap_or(f64::NAN).abs();
        (-(n as i32)..=n as i32)
            .map(|m| self.get(ModeIndex { n, m }).norm())
            .fold(0.0, f64::max)
            * j
    }

    /// Smallest degree with a coefficient of modulus above `tol`.
    pub fn leading_degree(&self, tol: f64) -> Option<u32> {
        ModeIndex::all(self.n_max).find(|i| self.coeffs[i.flat()].norm() > tol).map(|i| i.n)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ExpansionDoc {
    lambda: f64,
    n_max: u32,
    coeffs: Vec<(u32, i32, f64, f64)>,
}

impl Serialize for Expansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExpansionDoc {
            lambda: self.lambda,
            n_max: self.n_max,
            coeffs: ModeIndex::all(self.n_max)
                .map(|i| {
                    let c = self.coeffs[i.flat()];
                    (i.n, i.m, c.re, c.im)
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Expansion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = ExpansionDoc::deserialize(d)?;
        let mut e = Expansion::zeros(doc.lambda, doc.n_max).map_err(D::Error::custom)?;
        for (n, m, re, im) in doc.coeffs {
            let idx = ModeIndex::new(n, m).map_err(D::Error::custom)?;
            e.set(idx, Complex64::new(re, im)).map_err(D::Error::custom)?;
        }
        Ok(e)
    }
}

/// Least-squares fit result.
#[derive(Debug, Clone)]
pub struct Fit {
    pub expansion: Expansion,
    /// `‖Ac - u‖ / ‖u‖` over the samples.
    pub relative_residual: f64,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
}

/// Fits coefficients to sampled values by column-scaled SVD least squares.
pub fn fit_from_samples(samples: &[(SphericalPoint, Complex64)], lambda: f64, n_max: u32) -> Result<Fit> {
    let unknowns = ModeIndex::count(n_max);
    if samples.len() < 2 * unknowns {
        return Err(Error::Invalid(format!(
            "{} samples are too few for {} unknowns (need at least {})",
            samples.len(),
            unknowns,
            2 * unknowns
        )));
    }
    let template = Expansion::zeros(lambda, n_max)?;
    let basis = template.basis();
    let rows: Vec<Vec<Complex64>> = samples.par_iter().map(|(p, _)| basis.value(p)).collect();
    let a = CMatrix::from_fn(samples.len(), unknowns, |i, j| rows[i][j]);
    let b = CVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let ls = least_squares(&a, &b, FIT_RCOND)?;
    let expansion = Expansion::from_flat(lambda, n_max, ls.x.iter().copied().collect())?;
    Ok(Fit { expansion, relative_residual: ls.relative_residual, condition: ls.condition })
}

/// Roughly uniform points on a sphere of radius `r` (Fibonacci lattice).
pub fn fibonacci_sphere(count: usize, r: f64) -> Vec<SphericalPoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            SphericalPoint::new(r, z.clamp(-1.0, 1.0).acos(), (golden * i as f64).rem_euclid(2.0 * PI))
        })
        .collect()
}
