//! Dense complex least squares and nullspaces via the SVD.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Divides every column by its Euclidean norm; zero columns are left alone
/// and get scale 1. Returns the scales.
pub fn normalize_columns(a: &mut CMatrix) -> Vec<f64> {
    let mut scales = Vec::with_capacity(a.ncols());
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        let s = if n > 0.0 { n } else { 1.0 };
        col /= Complex64::new(s, 0.0);
        scales.push(s);
    }
    scales
}

/// Divides every row by its Euclidean norm (zero rows untouched).
pub fn normalize_rows(a: &mut CMatrix) {
    for mut row in a.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= Complex64::new(n, 0.0);
        }
    }
}

/// Singular values (descending) and right singular vectors as columns of `V`.
///
/// Tall matrices are first reduced by a QR factorisation, which leaves both
/// unchanged and keeps the SVD square.
pub fn right_svd(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let reduced = if a.nrows() > a.ncols() {
        a.clone().qr().r()
    } else {
        a.clone()
    };
    let svd = reduced.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let n = a.ncols();
    let mut v = CMatrix::zeros(n, order.len());
    for (c, &i) in order.iter().enumerate() {
        for r in 0..n {
            v[(r, c)] = v_t[(i, r)].conj();
        }
    }
    (sigma, v)
}

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub x: CVector,
    /// `‖Ax - b‖ / ‖b‖` (absolute when `b = 0`).
    pub relative_residual: f64,
    /// `σ_max / σ_min` after column scaling.
    pub condition: f64,
}

/// Column-scaled SVD least squares. Fails with a conditioning error when
/// `σ_min / σ_max < rcond`.
pub fn least_squares(a: &CMatrix, b: &CVector, rcond: f64) -> Result<LeastSquares> {
    assert_eq!(a.nrows(), b.len());
    if a.nrows() < a.ncols() {
        return Err(Error::Invalid(format!(
            "underdetermined system: {} equations for {} unknowns",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut scaled = a.clone();
    let scales = normalize_columns(&mut scaled);
    let svd = scaled.clone().svd(true, true);
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let smin = sigma.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(smax > 0.0) || smin / smax < rcond {
        return Err(Error::Conditioning {
            condition,
            context: "least-squares design matrix is rank deficient".into(),
        });
    }
    let y = svd.solve(b, 0.0).map_err(|e| Error::Convergence(e.to_string()))?;
    let x = CVector::from_iterator(y.len(), y.iter().zip(&scales).map(|(v, s)| v / s));
    let r = a * &x - b;
    let bn = b.norm();
    let relative_residual = if bn > 0.0 { r.norm() / bn } else { r.norm() };
    Ok(LeastSquares { x, relative_residual, condition })
}

/// Least squares with singular values below `rcond · σ_max` discarded
/// (truncated SVD). For the severely ill-conditioned but consistent systems of
/// fundamental-solution methods. `condition` is the full `σ_max / σ_min`.
pub fn truncated_least_squares(a: &CMatrix, b: &CVector, rcond: f64) -> Result<LeastSquares> {
    assert_eq!(a.nrows(), b.len());
    let mut scaled = a.clone();
    let scales = normalize_columns(&mut scaled);
    let (r, rhs) = if scaled.nrows() > scaled.ncols() {
        let qr = scaled.qr();
        let rhs = qr.q().adjoint() * b;
        (qr.r(), rhs)
    } else {
        (scaled, b.clone())
    };
    let svd = r.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V"));
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    let smin = sigma.min();
    if !(smax > 0.0) {
        return Err(Error::Conditioning { condition: f64::INFINITY, context: "design matrix is zero".into() });
    }
    let proj = u.adjoint() * &rhs;
    let mut y = CVector::zeros(v_t.nrows());
    for (i, &s) in sigma.iter().enumerate() {
        if s > rcond * smax {
            y[i] = proj[i] / s;
        }
    }
    let z = v_t.adjoint() * y;
    let x = CVector::from_iterator(z.len(), z.iter().zip(&scales).map(|(v, s)| v / s));
    let res = a * &x - b;
    let bn = b.norm();
    let relative_residual = if bn > 0.0 { res.norm() / bn } else { res.norm() };
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(LeastSquares { x, relative_residual, condition })
}

/// Outcome of a gap-based nullspace search.
#[derive(Debug, Clone)]
pub struct Nullspace {
    /// Orthonormal basis of the numerical nullspace (columns).
    pub basis: CMatrix,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Ratio between the smallest retained and largest discarded singular
    /// value across the cut; with nothing below the cut, `σ_min / cut`.
    pub gap: f64,
    /// The spectrum separates cleanly at the cut.
    pub clear: bool,
}

/// Nullspace = right singular vectors with `σ/σ_max < cut`. The split is
/// clear when the singular values on either side differ by at least `gap`,
/// or when one side is empty.
pub fn nullspace(a: &CMatrix, cut: f64, gap: f64) -> Nullspace {
    let (sigma, v) = right_svd(a);
    let n = a.ncols();
    let smax = sigma.first().copied().unwrap_or(0.0);
    // Missing singular values (wide matrices) count as exact zeros.
    let mut rel: Vec<f64> = sigma.iter().map(|s| if smax > 0.0 { s / smax } else { 0.0 }).collect();
    rel.resize(n, 0.0);
    let kept = rel.iter().take_while(|&&s| s >= cut).count();
    let (observed_gap, clear) = if kept == n {
        (rel[n - 1] / cut, true)
    } else if kept == 0 {
        (f64::INFINITY, true)
    } else {
        let above = rel[kept - 1];
        let below = rel[kept];
        let g = if below > 0.0 { above / below } else { f64::INFINITY };
        (g, g >= gap)
    };
    let mut basis = CMatrix::zeros(n, n - kept);
    for c in kept..n {
        if c < v.ncols() {
            basis.set_column(c - kept, &v.column(c));
        }
    }
    Nullspace { basis, singular_values: sigma, gap: observed_gap, clear }
}

/// Numerical rank: count of singular values above `tol` (absolute).
pub fn rank(a: &CMatrix, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s = a.clone().singular_values();
    s.iter().filter(|&&x| x > tol).count()
}

/// Spectral norm.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone().singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_consistent_system() {
        let a = CMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(1.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let x = CVector::from_vec(vec![c(0.5, -2.0), c(1.0, 0.25)]);
        let b = &a * &x;
        let ls = least_squares(&a, &b, 1e-12).unwrap();
        assert!((ls.x - x).norm() < 1e-13);
        assert!(ls.relative_residual < 1e-14);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = CMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0), c(3.0, 0.0), c(6.0, 0.0)]);
        let b = CVector::from_element(3, c(1.0, 0.0));
        match least_squares(&a, &b, 1e-12) {
            Err(Error::Conditioning { condition, .. }) => assert!(condition > 1e12),
            other => panic!("expected conditioning error, got {other:?}"),
        }
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = CMatrix::from_row_slice(4, 3, &[
            c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0),
            c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0),
            c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
        ]);
        let ns = nullspace(&a, 1e-9, 1e3);
        assert!(ns.clear);
        assert_eq!(ns.basis.ncols(), 2);
        assert!((&a * &ns.basis).norm() < 1e-13);
        let full = nullspace(&CMatrix::identity(3, 3), 1e-9, 1e3);
        assert_eq!(full.basis.ncols(), 0);
        assert!(full.clear);
    }

    #[test]
    fn truncated_solve_ignores_null_direction() {
        let a = CMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0)]);
        let b = CVector::from_row_slice(&[c(2.0, 0.0), c(2.0, 0.0), c(0.0, 2.0)]);
        assert!(least_squares(&a, &b, 1e-12).is_err());
        let ls = truncated_least_squares(&a, &b, 1e-12).unwrap();
        assert!(ls.relative_residual < 1e-14);
        assert!((ls.x[0] - ls.x[1]).norm() < 1e-14);
        assert!(ls.condition > 1e12);
    }

    #[test]
    fn ambiguous_spectrum_is_not_clear() {
        let mut a = CMatrix::identity(3, 3);
        a[(1, 1)] = c(1e-8, 0.0);
        a[(2, 2)] = c(1e-10, 0.0);
        assert!(!nullspace(&a, 1e-9, 1e3).clear);
        a[(2, 2)] = c(5e-11, 0.0);
        a[(1, 1)] = c(1e-7, 0.0);
        let ns = nullspace(&a, 1e-9, 1e3);
        assert!(ns.clear);
        assert_eq!(ns.basis.ncols(), 1);
    }
}
