//! Construction of the level-set Hamiltonian matrix and extraction of its
//! imaginary-axis eigenvalue frequencies.
//!
//! For a plant with responses G_p, G_r and regularization ε, the matrix
//! built here with parameter γ has an imaginary eigenvalue iω exactly when
//! det(γ·(G_rᴴG_r + εI) - G_pᴴG_p) vanishes at iω, i.e. when γ equals a
//! *squared* generalized singular value of (G_p(iω), [G_r(iω); √ε I]).
//! Callers that search for a level in σ̄ units therefore pass γ = level².

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::linalg;
use crate::ss::TwoOutputPlant;

/// Multiplicative step between regularization retries.
const RETRY_STEP: f64 = 0.01;

/// The pieces of the level-set Hamiltonian: the coefficient matrix
/// 𝒟 = γD_rᵀD_r + γεI - D_pᵀD_p, the gain K = 𝒟⁻¹(D_pᵀC_p - γD_rᵀC_r),
/// and the assembled 2n×2n matrix.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    pub dcal: Mat<f64>,
    pub gain: Mat<f64>,
    pub m_gamma: Mat<f64>,
    pub gamma: f64,
    pub epsilon: f64,
}

/// Imaginary-axis eigenvalue frequencies of a Hamiltonian matrix:
/// ascending, deduplicated, with the |Re λ| certificate of each survivor.
#[derive(Debug, Clone)]
pub struct ImagEigs {
    pub frequencies: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl ImagEigs {
    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Builds 𝒟, K and
///
/// ```text
///         [ A + BK              -B 𝒟⁻¹ Bᵀ   ]
/// M_γ  =  [                                  ]
///         [ C_pᵀ(C_p + D_pK)    -(A + BK)ᵀ  ]
///         [   - γC_rᵀ(C_r + D_rK)            ]
/// ```
///
/// Requires ε > 0, γ > 0, and A Hurwitz (the caller checks stability; this
/// function does not recompute eigenvalues of A).
pub fn build_hamiltonian(
    plant: &TwoOutputPlant,
    epsilon: f64,
    gamma: f64,
    tau_sing: f64,
) -> Result<HamiltonianParts> {
    assert!(epsilon > 0.0, "regularization must be positive");
    assert!(gamma > 0.0, "gamma must be positive");
    let n = plant.nstates();
    let m = plant.ninputs();
    let (a, b) = (plant.a(), plant.b());
    let (cp, dp) = (plant.cp(), plant.dp());
    let (cr, dr) = (plant.cr(), plant.dr());

    let gram_r = dr.transpose() * dr;
    let gram_p = dp.transpose() * dp;
    let mut dcal = &gram_r * faer::Scale(gamma) - &gram_p;
    for i in 0..m {
        dcal[(i, i)] += gamma * epsilon;
    }
    symmetrize(&mut dcal);

    // rank test relative to the scale of the terms before cancellation, so
    // that an exact cancellation of γ(D_rᵀD_r + εI) against D_pᵀD_p is
    // caught even when 𝒟 itself is a well-scaled tiny matrix
    let spectrum = linalg::symmetric_eigenvalues(dcal.as_ref())?;
    let smin = spectrum
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x.abs()));
    let term_r = linalg::symmetric_eigenvalues(gram_r.as_ref())?
        .last()
        .copied()
        .unwrap_or(0.0);
    let term_p = linalg::symmetric_eigenvalues(gram_p.as_ref())?
        .last()
        .copied()
        .unwrap_or(0.0);
    let scale = gamma * (term_r + epsilon) + term_p;
    // NaN-safe: a non-finite spectrum must land in the error path
    if !smin.is_finite() || smin <= tau_sing * scale {
        return Err(Error::SingularDcal {
            gamma,
            ratio: if scale > 0.0 { smin / scale } else { 0.0 },
        });
    }

    // 𝒟⁻¹ applied through Cholesky when 𝒟 ≻ 0, LU otherwise
    let rhs_gain = dp.transpose() * cp - dr.transpose() * cr * faer::Scale(gamma);
    let rhs_x = b.transpose().to_owned();
    let (gain, dinv_bt) = match dcal.llt(Side::Lower) {
        Ok(llt) => (llt.solve(&rhs_gain), llt.solve(&rhs_x)),
        Err(_) => {
            let lu = dcal.partial_piv_lu();
            (lu.solve(&rhs_gain), lu.solve(&rhs_x))
        }
    };

    let m11 = a + b * &gain;
    let mut m12 = b * &dinv_bt * faer::Scale(-1.0);
    symmetrize(&mut m12);
    let cp_cl = cp + dp * &gain;
    let cr_cl = cr + dr * &gain;
    let mut m21 = cp.transpose() * &cp_cl - cr.transpose() * &cr_cl * faer::Scale(gamma);
    symmetrize(&mut m21);

    let m_gamma = Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => m11[(i, j)],
        (true, false) => m12[(i, j - n)],
        (false, true) => m21[(i - n, j)],
        (false, false) => -m11[(j - n, i - n)],
    });

    Ok(HamiltonianParts {
        dcal,
        gain,
        m_gamma,
        gamma,
        epsilon,
    })
}

/// Walks ε through ε₀(1+δ)^k, k = 0..=max_tries, until the Hamiltonian
/// construction succeeds, returning the accepted ε and its parts.
pub fn retry_regularization(
    plant: &TwoOutputPlant,
    epsilon0: f64,
    gamma: f64,
    max_tries: usize,
    tau_sing: f64,
) -> Result<(f64, HamiltonianParts)> {
    assert!(epsilon0 > 0.0, "regularization must be positive");
    let mut history = Vec::new();
    let mut eps = epsilon0;
    for _ in 0..=max_tries {
        match build_hamiltonian(plant, eps, gamma, tau_sing) {
            Ok(parts) => return Ok((eps, parts)),
            Err(Error::SingularDcal { ratio, .. }) => history.push(ratio),
            Err(other) => return Err(other),
        }
        eps *= 1.0 + RETRY_STEP;
    }
    Err(Error::RegularizationFailed {
        tries: max_tries,
        history,
    })
}

/// Classifies the spectrum of M_γ: eigenvalues with
/// |Re λ| ≤ τ_im·(1 + |λ|) count as imaginary; their nonnegative parts
/// yield the ascending frequency set, with frequencies closer than
/// τ_merge·(1 + ω) merged into one.
pub fn imaginary_eigenvalues(
    parts: &HamiltonianParts,
    tau_im: f64,
    tau_merge: f64,
) -> Result<ImagEigs> {
    let eigs = linalg::eigenvalues(parts.m_gamma.as_ref())?;
    let mut hits: Vec<(f64, f64)> = eigs
        .iter()
        .filter(|z| z.re.abs() <= tau_im * (1.0 + z.norm()))
        .filter(|z| z.im >= 0.0)
        .map(|z| (z.im, z.re.abs()))
        .collect();
    hits.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut frequencies = Vec::new();
    let mut residuals = Vec::new();
    for (freq, residual) in hits {
        match frequencies.last().copied() {
            Some(last) if freq - last <= tau_merge * (1.0 + freq) => {
                // keep the best-certified member of the merged group
                let idx = residuals.len() - 1;
                if residual < residuals[idx] {
                    residuals[idx] = residual;
                }
            }
            _ => {
                frequencies.push(freq);
                residuals.push(residual);
            }
        }
    }
    Ok(ImagEigs {
        frequencies,
        residuals,
    })
}
