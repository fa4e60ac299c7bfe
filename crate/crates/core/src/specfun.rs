//! Spherical Bessel functions, associated Legendre functions and spherical
//! harmonics.
//!
//! Conventions used throughout the crate:
//!
//! * `P_n^m` carries the Condon–Shortley phase, so `P_1^1(cos θ) = -sin θ`.
//! * Harmonics are only ever built from `P_n^{|m|}`:
//!   ```text
//!   Y_n^m(θ, φ) = sqrt((2n+1)/(4π) · (n-|m|)!/(n+|m|)!) · P_n^{|m|}(cos θ) · e^{imφ}
//!   ```
//!   Negative orders are *not* obtained from the `(-1)^m` reflection formula.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{normalize_columns, right_svd, truncated_least_squares, CMatrix, CVector};
use crate::quadrature::GaussLegendre;

/// Degree/order pair `(n, m)` of a spherical wave, `|m| <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n: u32,
    pub m: i32,
}

impl ModeIndex {
    pub fn new(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(domain(format!("mode order |m| = {} exceeds degree n = {n}", m.abs())));
        }
        Ok(Self { n, m })
    }

    /// Position in the flat `n² + n + m` layout.
    pub fn flat(self) -> usize {
        let n = self.n as i64;
        (n * n + n + self.m as i64) as usize
    }

    pub fn from_flat(k: usize) -> Self {
        let n = (k as f64).sqrt().floor() as usize;
        let n = if (n + 1) * (n + 1) <= k { n + 1 } else { n };
        let m = k as i64 - (n * n + n) as i64;
        Self { n: n as u32, m: m as i32 }
    }

    /// All indices with degree `<= n_max`, in flat order.
    pub fn all(n_max: u32) -> impl Iterator<Item = ModeIndex> {
        (0..=n_max).flat_map(|n| (-(n as i32)..=n as i32).map(move |m| ModeIndex { n, m }))
    }

    pub fn count(n_max: u32) -> usize {
        let k = n_max as usize + 1;
        k * k
    }
}

/// Unit direction given by polar angle `theta ∈ [0, π]` and azimuth `phi ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalDirection {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalDirection {
    /// Validates `theta` and wraps `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(domain(format!("polar angle {theta} outside [0, π]")));
        }
        Ok(Self { theta, phi: wrap_azimuth(phi) })
    }

    pub fn from_cartesian(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(domain("zero or non-finite direction vector"));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        Self::new(theta, v[1].atan2(v[0]))
    }

    pub fn to_cartesian(self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

pub(crate) fn wrap_azimuth(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

// ---------------------------------------------------------------------------
// Spherical Bessel functions of the first kind
// ---------------------------------------------------------------------------

/// `j_n(t)`.
///
/// Uses the power series below `t = max(1, n/2)`, upward recurrence when
/// `t > n`, and Miller's normalised downward recurrence in between.
pub fn sph_bessel_j(n: u32, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("spherical Bessel argument must be finite and >= 0, got {t}")));
    }
    if t < series_threshold(n) {
        Ok(sph_bessel_j_series(n, t))
    } else {
        Ok(sph_bessel_j_recurrence(n, t))
    }
}

fn series_threshold(n: u32) -> f64 {
    (0.5 * n as f64).max(1.0)
}

/// Power series `Σ_p (-1)^p t^{n+2p} / (2^p p! (2n+2p+1)!!)`.
///
/// Converges for every `t` but cancels badly once `t` is large.
pub fn sph_bessel_j_series(n: u32, t: f64) -> f64 {
    if t == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // Leading factor t^n / (2n+1)!! accumulated as a product to stay in range.
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= t / (2 * k + 1) as f64;
    }
    let nf = n as f64;
    let half_t2 = 0.5 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for p in 1..500 {
        let pf = p as f64;
        term *= -half_t2 / (pf * (2.0 * nf + 2.0 * pf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Recurrence evaluation of `j_n(t)` for `t > 0`.
pub fn sph_bessel_j_recurrence(n: u32, t: f64) -> f64 {
    assert!(t > 0.0, "recurrence evaluation needs t > 0");
    let (s, c) = t.sin_cos();
    let j0 = s / t;
    if n == 0 {
        return j0;
    }
    let j1 = s / (t * t) - c / t;
    // The closed form for j_1 cancels for small t; Miller's method is used there.
    if n == 1 && t >= 1.0 {
        return j1;
    }
    if t > n as f64 && t >= 1.0 {
        let (mut prev, mut cur) = (j0, j1);
        for k in 1..n {
            let next = (2 * k + 1) as f64 / t * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    miller_downward(n, t, j0, j1)
}

fn miller_downward(n: u32, t: f64, j0: f64, j1: f64) -> f64 {
    let start = n.max(t.ceil() as u32) + 50;
    let mut above = 0.0_f64;
    let mut cur = 1e-300_f64;
    let mut at_n = 0.0;
    let mut f1 = 0.0;
    for k in (1..=start).rev() {
        // cur = f_k, above = f_{k+1}; produce f_{k-1}.
        let below = (2 * k + 1) as f64 / t * cur - above;
        above = cur;
        cur = below;
        if k - 1 == n {
            at_n = cur;
        }
        if k - 1 == 1 {
            f1 = cur;
        }
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            above *= 1e-200;
            at_n *= 1e-200;
            f1 *= 1e-200;
        }
    }
    let f0 = cur;
    let scale = if j0.abs() >= j1.abs() { j0 / f0 } else { j1 / f1 };
    at_n * scale
}

/// `j_0 .. j_{n_max}` at a single argument.
pub fn sph_bessel_j_all(n_max: u32, t: f64) -> Result<Vec<f64>> {
    (0..=n_max).map(|n| sph_bessel_j(n, t)).collect()
}

/// `j_n'(t)`, via `j_n' = j_{n-1} - (n+1)/t · j_n` (and `j_0' = -j_1`).
pub fn sph_bessel_j_derivative(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Ok(-sph_bessel_j(1, t)?);
    }
    if t == 0.0 {
        return Ok(if n == 1 { 1.0 / 3.0 } else { 0.0 });
    }
    Ok(sph_bessel_j(n - 1, t)? - (n + 1) as f64 / t * sph_bessel_j(n, t)?)
}

// ---------------------------------------------------------------------------
// Associated Legendre functions
// ---------------------------------------------------------------------------

/// `P_n^m(x)` with Condon–Shortley phase, for `0 <= m <= n`, `|x| <= 1`.
pub fn assoc_legendre(n: u32, m: u32, x: f64) -> Result<f64> {
    if m > n {
        return Err(domain(format!("Legendre order m = {m} exceeds degree n = {n}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(legendre_column(n, m, x))
}

/// Upward recurrence in degree at fixed order.
fn legendre_column(n: u32, m: u32, x: f64) -> f64 {
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    if n == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if n == m + 1 {
        return pm1;
    }
    let mut pm0 = pmm;
    for l in (m + 2)..=n {
        let pl = (x * (2 * l - 1) as f64 * pm1 - (l + m - 1) as f64 * pm0) / (l - m) as f64;
        pm0 = pm1;
        pm1 = pl;
    }
    pm1
}

/// All `P_n^m(x)` for `0 <= m <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    n_max: u32,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(n_max: u32, x: f64) -> Self {
        let x = x.clamp(-1.0, 1.0);
        let size = (n_max as usize + 1) * (n_max as usize + 2) / 2;
        let mut values = vec![0.0; size];
        let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
        let mut pmm = 1.0;
        for m in 0..=n_max {
            if m > 0 {
                pmm *= -((2 * m - 1) as f64) * s;
            }
            values[Self::slot(m, m)] = pmm;
            if m == n_max {
                break;
            }
            let mut p0 = pmm;
            let mut p1 = x * (2 * m + 1) as f64 * pmm;
            values[Self::slot(m + 1, m)] = p1;
            for l in (m + 2)..=n_max {
                let pl = (x * (2 * l - 1) as f64 * p1 - (l + m - 1) as f64 * p0) / (l - m) as f64;
                values[Self::slot(l, m)] = pl;
                p0 = p1;
                p1 = pl;
            }
        }
        Self { n_max, values }
    }

    fn slot(n: u32, m: u32) -> usize {
        let n = n as usize;
        n * (n + 1) / 2 + m as usize
    }

    /// `P_n^m`; zero when `m > n`.
    pub fn get(&self, n: u32, m: u32) -> f64 {
        debug_assert!(n <= self.n_max);
        if m > n {
            0.0
        } else {
            self.values[Self::slot(n, m)]
        }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `d/dθ P_n^m(cos θ)` from the table (valid for `θ` off the poles).
    pub fn dtheta(&self, n: u32, m: u32) -> f64 {
        legendre_dtheta_from(n, m, |mm| self.get(n, mm))
    }
}

fn legendre_dtheta_from(n: u32, m: u32, p: impl Fn(u32) -> f64) -> f64 {
    let up = if m < n { p(m + 1) } else { 0.0 };
    if m == 0 {
        return up;
    }
    let nf = n as f64;
    let mf = m as f64;
    0.5 * (up - (nf + mf) * (nf - mf + 1.0) * p(m - 1))
}

/// `d/dθ [P_n^m(cos θ)]` for `θ ∈ (0, π)`:
/// `½ (P_n^{m+1} - (n+m)(n-m+1) P_n^{m-1})`, and `P_n^1` when `m = 0`.
pub fn assoc_legendre_dtheta(n: u32, m: u32, theta: f64) -> Result<f64> {
    if m > n {
        return Err(domain(format!("Legendre order m = {m} exceeds degree n = {n}")));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(domain(format!(
            "θ-derivative of P_n^m(cos θ) requires θ in (0, π), got {theta}"
        )));
    }
    let x = theta.cos();
    Ok(legendre_dtheta_from(n, m, |mm| legendre_column(n, mm, x)))
}

/// `∫_{-1}^{1} P_n^m(x) P_n^l(x) / (1 - x²) dx` for `1 <= m, l <= n`.
///
/// Integrated over `θ`, where the integrand `P_n^m P_n^l / sin θ` is smooth.
pub fn legendre_order_overlap(n: u32, m: u32, l: u32) -> Result<f64> {
    if m == 0 || l == 0 || m > n || l > n {
        return Err(domain(format!("orders must satisfy 1 <= m, l <= n, got n = {n}, m = {m}, l = {l}")));
    }
    let rule = GaussLegendre::new(2 * n as usize + 40);
    Ok(rule.integrate(0.0, PI, |theta| {
        let x = theta.cos();
        legendre_column(n, m, x) * legendre_column(n, l, x) / theta.sin()
    }))
}

/// `(n+m)! / (m (n-m)!)`, the diagonal value of [`legendre_order_overlap`].
pub fn legendre_order_norm(n: u32, m: u32) -> f64 {
    ((n - m + 1)..=(n + m)).map(|k| k as f64).product::<f64>() / m as f64
}

/// Numerical evidence that `j_0, …, j_{n_max}` are independent on `(0, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselIndependence {
    /// Smallest singular value of the Gram matrix `∫_0^h j_n j_k dt` after
    /// scaling each `j_n` to unit norm.
    pub gram_min_singular: f64,
    /// Smallest singular value of the column-normalised sample matrix.
    pub sample_min_singular: f64,
    /// `‖α‖` for the least-squares solution of `Σ α_n j_n(t_i) = 0`.
    pub alpha_norm: f64,
}

/// Gram matrix by Gauss–Legendre on `(0, h)`, and a least-squares solve of
/// the homogeneous system on `samples` midpoints of `(0, h)`.
pub fn bessel_independence(n_max: u32, h: f64, samples: usize) -> Result<BesselIndependence> {
    if !(h > 0.0) || samples <= n_max as usize {
        return Err(domain("need h > 0 and more samples than functions"));
    }
    let cols = n_max as usize + 1;
    // Gram = BᵀB with B = W^{1/2} A, so its singular values are those of B squared.
    let rule = GaussLegendre::new(cols + 40);
    let nodes: Vec<(f64, f64)> = rule.mapped(0.0, h).collect();
    let mut b = CMatrix::zeros(nodes.len(), cols);
    for (i, &(t, w)) in nodes.iter().enumerate() {
        for (n, j) in sph_bessel_j_all(n_max, t)?.into_iter().enumerate() {
            b[(i, n)] = Complex64::new(w.sqrt() * j, 0.0);
        }
    }
    normalize_columns(&mut b);
    let gram_min_singular = right_svd(&b).0.last().copied().unwrap_or(0.0).powi(2);

    let mut a = CMatrix::zeros(samples, cols);
    for i in 0..samples {
        let t = h * (i as f64 + 0.5) / samples as f64;
        for (n, j) in sph_bessel_j_all(n_max, t)?.into_iter().enumerate() {
            a[(i, n)] = Complex64::new(j, 0.0);
        }
    }
    let ls = truncated_least_squares(&a, &CVector::zeros(samples), 0.0)?;
    normalize_columns(&mut a);
    let sample_min_singular = right_svd(&a).0.last().copied().unwrap_or(0.0);
    Ok(BesselIndependence { gram_min_singular, sample_min_singular, alpha_norm: ls.x.norm() })
}

// ---------------------------------------------------------------------------
// Spherical harmonics
// ---------------------------------------------------------------------------

/// `sqrt((2n+1)/(4π) · (n-|m|)!/(n+|m|)!)`.
pub fn harmonic_norm(n: u32, m: i32) -> f64 {
    let am = m.unsigned_abs();
    let mut ratio = 1.0;
    for k in (n - am + 1)..=(n + am) {
        ratio /= k as f64;
    }
    ((2 * n + 1) as f64 / (4.0 * PI) * ratio).sqrt()
}

/// `Y_n^m(θ, φ)`.
pub fn sph_harmonic(idx: ModeIndex, dir: SphericalDirection) -> Complex64 {
    let am = idx.m.unsigned_abs();
    let p = legendre_column(idx.n, am, dir.theta.cos());
    let phase = Complex64::from_polar(1.0, idx.m as f64 * dir.phi);
    phase * (harmonic_norm(idx.n, idx.m) * p)
}

/// `i^n`.
pub fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
