//! Separation-of-variables solution for a sound-soft ball.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::specfun::{assoc_legendre, sph_bessel_j};

/// Spherical Bessel function of the second kind by upward recurrence,
/// which is stable for `y_n`.
pub fn sph_bessel_y(n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("y_n needs a positive finite argument"));
    }
    let (s, c) = t.sin_cos();
    let mut y0 = -c / t;
    if n == 0 {
        return Ok(y0);
    }
    let mut y1 = -c / (t * t) - s / t;
    for l in 1..n {
        let y2 = (2 * l + 1) as f64 / t * y1 - y0;
        y0 = y1;
        y1 = y2;
    }
    Ok(y1)
}

/// `h_n^{(1)}(t) = j_n(t) + i y_n(t)`.
pub fn sph_hankel1(n: u32, t: f64) -> Result<Complex64> {
    Ok(Complex64::new(sph_bessel_j(n, t)?, sph_bessel_y(n, t)?))
}

/// Far field of the ball of radius `a` centred at the origin with `u = 0` on
/// its surface: `u_∞(x̂) = (i/k) Σ (2n+1) j_n(ka)/h_n(ka) P_n(x̂·d)`.
pub fn sound_soft_ball_far_field(k: f64, a: f64, d: &Vector3<f64>, xh: &Vector3<f64>, terms: u32) -> Result<Complex64> {
    if !(k > 0.0) || !(a > 0.0) {
        return Err(domain("wavenumber and radius must be positive"));
    }
    let x = xh.dot(d).clamp(-1.0, 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..=terms {
        let ratio = sph_bessel_j(n, k * a)? / sph_hankel1(n, k * a)?;
        sum += ratio * ((2 * n + 1) as f64 * assoc_legendre(n, 0, x)?);
    }
    Ok(Complex64::new(0.0, 1.0 / k) * sum)
}

/// Number of series terms that resolves `ka` to roundoff.
pub fn series_terms(ka: f64) -> u32 {
    (ka + 4.0 * ka.cbrt() + 20.0).ceil() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_of_y() {
        let t = 1.7_f64;
        let (s, c) = t.sin_cos();
        assert!((sph_bessel_y(0, t).unwrap() + c / t).abs() < 1e-15);
        let y2 = (-3.0 / t.powi(3) + 1.0 / t) * c - 3.0 / (t * t) * s;
        assert!((sph_bessel_y(2, t).unwrap() - y2).abs() < 1e-14);
    }

    #[test]
    fn wronskian() {
        // j_n y_{n-1} - j_{n-1} y_n = 1/t².
        for n in 1..15 {
            for &t in &[0.3, 1.0, 4.5, 12.0] {
                let w = sph_bessel_j(n, t).unwrap() * sph_bessel_y(n - 1, t).unwrap()
                    - sph_bessel_j(n - 1, t).unwrap() * sph_bessel_y(n, t).unwrap();
                assert!((w * t * t - 1.0).abs() < 1e-10, "n={n} t={t}: {w}");
            }
        }
    }

    #[test]
    fn small_ball_is_a_monopole() {
        // ka → 0: u_∞ ≈ -a, the capacity term.
        let a = 1e-3;
        let v = sound_soft_ball_far_field(1.0, a, &Vector3::z(), &Vector3::x(), 10).unwrap();
        // Exact monopole term: -sin(ka) e^{-ika} / k.
        assert!((v + a).norm() < 2.0 * a * a, "{v}");
    }
}
