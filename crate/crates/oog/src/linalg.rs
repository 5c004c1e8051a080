//! Internal dense linear-algebra kernels.
//!
//! Factorizations are delegated to `faer`; this module adds the pieces it
//! does not provide at the needed granularity: eigenvalue balancing, a real
//! Hessenberg reduction for repeated resolvent solves, and small wrappers
//! that map numerical failures onto the crate error type.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side, c64};

use crate::error::{Error, Result};

/// Relative pivot threshold below which a triangular factor is treated as
/// rank deficient.
const RANK_TOL: f64 = 1e-13;

pub(crate) fn to_complex(a: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| c64::new(a[(i, j)], 0.0))
}

/// Parlett-Reinsch balancing: an exact (power-of-two) diagonal similarity
/// that equalizes row and column norms. Eigenvalues are preserved bitwise in
/// the scaling factors; accuracy of the subsequent QR iteration improves by
/// orders of magnitude on badly scaled matrices.
pub(crate) fn balance(a: &mut Mat<f64>) {
    let n = a.nrows();
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 || !c.is_finite() || !r.is_finite() {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Full complex spectrum of a real square matrix (balanced first).
pub(crate) fn eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<c64>> {
    let mut b = a.to_owned();
    balance(&mut b);
    b.eigenvalues().map_err(|_| Error::EigenFailure)
}

/// Eigenvalues of a Hermitian complex matrix, ascending.
pub(crate) fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    let mut ev = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

/// Eigenvalues of a symmetric real matrix, ascending.
pub(crate) fn symmetric_eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let mut ev = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub(crate) fn cholesky_lower(a: MatRef<'_, c64>) -> Result<Mat<c64>> {
    match a.llt(Side::Lower) {
        Ok(llt) => Ok(llt.L().to_owned()),
        Err(_) => Err(Error::NotPositiveDefinite),
    }
}

/// Solves L X = B in place for lower-triangular L.
pub(crate) fn solve_lower_triangular_in_place(l: MatRef<'_, c64>, rhs: &mut Mat<c64>) {
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l,
        rhs.as_mut(),
        faer::get_global_parallelism(),
    );
}

/// Solves (iωI - A) X = B by complex LU with partial pivoting.
pub(crate) fn resolvent_solve(
    a: MatRef<'_, f64>,
    b: MatRef<'_, f64>,
    omega: f64,
) -> Result<Mat<c64>> {
    let n = a.nrows();
    let m = Mat::from_fn(n, n, |i, j| {
        c64::new(-a[(i, j)], if i == j { omega } else { 0.0 })
    });
    let lu = m.partial_piv_lu();
    let u = lu.U();
    let mut umin = f64::INFINITY;
    let mut umax = 0.0f64;
    for i in 0..n {
        let d = u[(i, i)].norm();
        umin = umin.min(d);
        umax = umax.max(d);
    }
    if !umin.is_finite() || umin <= RANK_TOL * umax {
        return Err(Error::SingularResolvent { omega });
    }
    Ok(lu.solve(to_complex(b)))
}

/// Determinant of a complex square matrix via LU with partial pivoting.
pub(crate) fn determinant(m: MatRef<'_, c64>) -> c64 {
    let n = m.nrows();
    if n == 0 {
        return c64::new(1.0, 0.0);
    }
    let lu = m.partial_piv_lu();
    let u = lu.U();
    let mut det = c64::new(permutation_sign(lu.P().arrays().0), 0.0);
    for i in 0..n {
        det *= u[(i, i)];
    }
    det
}

/// Sign of a permutation given its forward index array.
fn permutation_sign(fwd: &[usize]) -> f64 {
    let n = fwd.len();
    let mut seen = vec![false; n];
    let mut transpositions = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = fwd[i];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Householder reduction to upper Hessenberg form: A = Q H Qᵀ.
pub(crate) fn hessenberg(a: MatRef<'_, f64>) -> (Mat<f64>, Mat<f64>) {
    let n = a.nrows();
    let mut h = a.to_owned();
    let mut q = Mat::<f64>::identity(n, n);
    let mut v = vec![0.0f64; n];
    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            v[i] = h[(i, k)];
            norm2 += v[i] * v[i];
        }
        let mut alpha = norm2.sqrt();
        if alpha == 0.0 {
            continue;
        }
        if v[k + 1] > 0.0 {
            alpha = -alpha;
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H ← (I - βvvᵀ) H
        for j in k..n {
            let mut dot = 0.0;
            for i in k + 1..n {
                dot += v[i] * h[(i, j)];
            }
            dot *= beta;
            for i in k + 1..n {
                h[(i, j)] -= dot * v[i];
            }
        }
        // H ← H (I - βvvᵀ)
        for i in 0..n {
            let mut dot = 0.0;
            for j in k + 1..n {
                dot += h[(i, j)] * v[j];
            }
            dot *= beta;
            for j in k + 1..n {
                h[(i, j)] -= dot * v[j];
            }
        }
        // Q ← Q (I - βvvᵀ)
        for i in 0..n {
            let mut dot = 0.0;
            for j in k + 1..n {
                dot += q[(i, j)] * v[j];
            }
            dot *= beta;
            for j in k + 1..n {
                q[(i, j)] -= dot * v[j];
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    (h, q)
}

/// Solves (iωI - H) X = B for upper-Hessenberg H in O(n²(1 + m)) using
/// Gaussian elimination restricted to the single subdiagonal.
///
/// Row-major scratch buffers keep the row operations contiguous.
pub(crate) fn hessenberg_resolvent_solve(
    h: MatRef<'_, f64>,
    b: MatRef<'_, f64>,
    omega: f64,
) -> Result<Mat<c64>> {
    let n = h.nrows();
    let m = b.ncols();
    let mut a: Vec<c64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(c64::new(-h[(i, j)], if i == j { omega } else { 0.0 }));
        }
    }
    let mut x: Vec<c64> = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            x.push(c64::new(b[(i, j)], 0.0));
        }
    }
    // forward elimination of the subdiagonal, pivoting between rows k, k+1
    for k in 0..n.saturating_sub(1) {
        if a[(k + 1) * n + k].norm_sqr() > a[k * n + k].norm_sqr() {
            for j in k..n {
                a.swap(k * n + j, (k + 1) * n + j);
            }
            for j in 0..m {
                x.swap(k * m + j, (k + 1) * m + j);
            }
        }
        let piv = a[k * n + k];
        if piv == c64::new(0.0, 0.0) {
            continue; // caught by the back-substitution rank check
        }
        let f = a[(k + 1) * n + k] / piv;
        a[(k + 1) * n + k] = c64::new(0.0, 0.0);
        if f != c64::new(0.0, 0.0) {
            for j in k + 1..n {
                let t = a[k * n + j];
                a[(k + 1) * n + j] -= f * t;
            }
            for j in 0..m {
                let t = x[k * m + j];
                x[(k + 1) * m + j] -= f * t;
            }
        }
    }
    let mut dmax = 0.0f64;
    for i in 0..n {
        dmax = dmax.max(a[i * n + i].norm());
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let coeff = a[i * n + j];
            if coeff != c64::new(0.0, 0.0) {
                let (xi, xj) = x.split_at_mut(j * m);
                let xi = &mut xi[i * m..i * m + m];
                let xj = &xj[..m];
                for l in 0..m {
                    xi[l] -= coeff * xj[l];
                }
            }
        }
        let d = a[i * n + i];
        let dn = d.norm();
        if !dn.is_finite() || dn <= RANK_TOL * dmax {
            return Err(Error::SingularResolvent { omega });
        }
        let dinv = c64::new(1.0, 0.0) / d;
        for l in 0..m {
            x[i * m + l] *= dinv;
        }
    }
    Ok(Mat::from_fn(n, m, |i, j| x[i * m + j]))
}
