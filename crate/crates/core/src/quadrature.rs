//! Gauss–Legendre rules and product rules over balls.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        // Ascending order.
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule over the ball `B_rho(0)` in spherical coordinates:
/// Gauss–Legendre in `r` (with the `r²` Jacobian), in `cos θ`, and in `φ`.
#[derive(Debug, Clone)]
pub struct BallRule {
    radial: GaussLegendre,
    polar: GaussLegendre,
    azimuthal: GaussLegendre,
}

impl BallRule {
    pub fn new(n_r: usize, n_theta: usize, n_phi: usize) -> Self {
        Self {
            radial: GaussLegendre::new(n_r),
            polar: GaussLegendre::new(n_theta),
            azimuthal: GaussLegendre::new(n_phi),
        }
    }

    /// `∫_{B_rho} f(r, θ, φ) dx`, summed in a fixed order.
    pub fn integrate(&self, rho: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (r, wr) in self.radial.mapped(0.0, rho) {
            let mut shell = 0.0;
            for (c, wc) in self.polar.mapped(-1.0, 1.0) {
                let theta = c.clamp(-1.0, 1.0).acos();
                let mut ring = 0.0;
                for (phi, wp) in self.azimuthal.mapped(0.0, 2.0 * PI) {
                    ring += wp * f(r, theta, phi);
                }
                shell += wc * ring;
            }
            total += wr * r * r * shell;
        }
        total
    }
}

/// Chebyshev points of the first kind mapped onto the open interval `(a, b)`.
pub fn chebyshev_points(count: usize, a: f64, b: f64) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let x = ((2 * k + 1) as f64 * PI / (2 * count) as f64).cos();
            0.5 * (a + b) - 0.5 * (b - a) * x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(6);
        // Exact for degree <= 11.
        let got = rule.integrate(-1.0, 1.0, |x| x.powi(10));
        assert!((got - 2.0 / 11.0).abs() < 1e-14);
        let got = rule.integrate(0.0, 2.0, |x| x * x);
        assert!((got - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 7, 48, 512] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n = {n}: {s}");
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn ball_volume() {
        let rule = BallRule::new(8, 8, 8);
        let v = rule.integrate(2.0, |_, _, _| 1.0);
        assert!((v - 4.0 / 3.0 * PI * 8.0).abs() < 1e-10);
    }

    #[test]
    fn chebyshev_points_are_interior() {
        let pts = chebyshev_points(20, 0.0, 3.0);
        assert_eq!(pts.len(), 20);
        assert!(pts.iter().all(|&r| r > 0.0 && r < 3.0));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }
}
