//! Generalized singular values of a complex matrix pair, and the
//! frequency-wise level objective σ̄_ε(iω) built on them.

use faer::{Mat, MatRef, c64};

use crate::error::{Error, Result};
use crate::linalg;
use crate::ss::TwoOutputPlant;

/// Generalized singular values, sorted descending.
#[derive(Debug, Clone)]
pub struct GsvResult {
    pub values: Vec<f64>,
    pub count: usize,
}

impl GsvResult {
    /// Largest value, or 0 for an empty set.
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// All σ ≥ 0 with MᴴM v = σ² NᴴN v for some v ≠ 0.
///
/// NᴴN must be positive definite (every call site in this crate stacks a
/// √ε·I block into N, which enforces this). The reduction is Cholesky
/// NᴴN = LLᴴ followed by a Hermitian eigendecomposition of L⁻¹(MᴴM)L⁻ᴴ;
/// roundoff-negative eigenvalues are clamped to zero before the square root.
pub fn generalized_singular_values(m: MatRef<'_, c64>, n: MatRef<'_, c64>) -> Result<GsvResult> {
    if m.ncols() != n.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "M has {} columns, N has {}",
            m.ncols(),
            n.ncols()
        )));
    }
    let gram_n = n.adjoint() * n;
    let l = linalg::cholesky_lower(gram_n.as_ref())?;
    let mut w = m.adjoint() * m;
    // W ← L⁻¹ (MᴴM) L⁻ᴴ
    linalg::solve_lower_triangular_in_place(l.as_ref(), &mut w);
    let mut w = w.adjoint().to_owned();
    linalg::solve_lower_triangular_in_place(l.as_ref(), &mut w);
    let eigs = linalg::hermitian_eigenvalues(w.as_ref())?;
    let mut values: Vec<f64> = eigs.iter().map(|&lambda| lambda.max(0.0).sqrt()).collect();
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let count = values.len();
    Ok(GsvResult { values, count })
}

/// N = [G_r; √ε·I_m] stacked for the regularized objective.
pub(crate) fn stack_regularized(gr: MatRef<'_, c64>, epsilon: f64) -> Mat<c64> {
    let p = gr.nrows();
    let m = gr.ncols();
    let sqrt_eps = epsilon.sqrt();
    Mat::from_fn(p + m, m, |i, j| {
        if i < p {
            gr[(i, j)]
        } else if i - p == j {
            c64::new(sqrt_eps, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// σ̄ of (G_p, [G_r; √ε·I]) for already-evaluated responses.
pub fn max_gsv_from_responses(
    gp: MatRef<'_, c64>,
    gr: MatRef<'_, c64>,
    epsilon: f64,
) -> Result<f64> {
    let mut all_zero = true;
    'outer: for j in 0..gp.ncols() {
        for i in 0..gp.nrows() {
            if gp[(i, j)] != c64::new(0.0, 0.0) {
                all_zero = false;
                break 'outer;
            }
        }
    }
    if all_zero {
        return Ok(0.0);
    }
    let n = stack_regularized(gr, epsilon);
    Ok(generalized_singular_values(gp, n.as_ref())?.max())
}

/// σ̄_ε(iω) = σ̄(G_p(iω), [G_r(iω); √ε·I]); 0 when G_p(iω) vanishes.
pub fn max_gsv_at_frequency(plant: &TwoOutputPlant, epsilon: f64, omega: f64) -> Result<f64> {
    let (gp, gr) = plant.freq_responses(omega)?;
    max_gsv_from_responses(gp.as_ref(), gr.as_ref(), epsilon)
}
