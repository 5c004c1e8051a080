//! The level-set iteration that computes the regularized cyclic
//! output-to-output gain to a relative tolerance.
//!
//! Instead of sweeping frequencies, the solver sweeps gain levels: at each
//! level γ it asks the Hamiltonian query for *all* frequencies where the
//! objective equals γ, evaluates the objective at the midpoints between
//! consecutive crossings, and raises the certified lower bound to the best
//! of those. When a level produces no crossing the interval
//! [γ̲, (1+2ε_γ)γ̲) brackets the gain and the midpoint is returned.

use crate::error::{Error, Result};
use crate::gsv::max_gsv_from_responses;
use crate::hamiltonian::{imaginary_eigenvalues, retry_regularization};
use crate::linalg;
use crate::ss::{FreqEvaluator, TwoOutputPlant};

/// Tolerances and caps for the solver and the numerical kernels under it.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Regularization ε of the gain objective.
    pub epsilon: f64,
    /// Relative tolerance ε_γ of the returned value.
    pub tol_gamma: f64,
    /// Imaginary-axis classification threshold (relative, scale-aware).
    pub tau_im: f64,
    /// Crossing-frequency merge threshold (relative, scale-aware).
    pub tau_merge: f64,
    /// Relative rank threshold for the Hamiltonian coefficient matrix.
    pub tau_sing: f64,
    /// Stability margin coefficient; the margin used is τ·(1 + ‖A‖_F).
    pub tau_stab: f64,
    /// Cap on level-set iterations.
    pub max_iters: usize,
    /// Cap on regularization retries per level.
    pub max_reg_tries: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-8,
            tol_gamma: 1e-4,
            tau_im: 1e-8,
            tau_merge: 1e-7,
            tau_sing: 1e-12,
            tau_stab: 1e-8,
            max_iters: 100,
            max_reg_tries: 20,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.epsilon > 0.0
            && self.tol_gamma > 0.0
            && self.tau_im > 0.0
            && self.tau_merge > 0.0
            && self.tau_sing > 0.0
            && self.tau_stab > 0.0;
        if !all_positive {
            return Err(Error::GenerationFailed(
                "solver tolerances must all be positive".into(),
            ));
        }
        if self.max_iters < 1 {
            return Err(Error::GenerationFailed(
                "max_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One level-set iteration: the lower bound it started from, the crossing
/// frequencies the Hamiltonian query returned, and any skipped midpoint
/// evaluations.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub lower_bound: f64,
    pub crossings: Vec<f64>,
    pub warnings: Vec<String>,
}

/// A certified gain interval and the returned midpoint.
#[derive(Debug, Clone)]
pub struct RcoogResult {
    /// Midpoint ½(γ̲ + γ̄); relative error from the true gain is ≤ ε_γ.
    pub value: f64,
    /// Certified lower bound γ̲.
    pub lower: f64,
    /// Certified strict upper bound γ̄ = (1 + 2ε_γ)·γ̲.
    pub upper: f64,
    /// Best estimate of the frequency attaining the gain; `f64::INFINITY`
    /// encodes the feedthrough (ω → ∞) candidate.
    pub peak_frequency: f64,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

/// σ̄ of the feedthrough pair (D_p, [D_r; √ε·I]), the ω → ∞ limit of the
/// objective.
pub fn feedthrough_gain(plant: &TwoOutputPlant, epsilon: f64) -> Result<f64> {
    let dp = linalg::to_complex(plant.dp());
    let dr = linalg::to_complex(plant.dr());
    max_gsv_from_responses(dp.as_ref(), dr.as_ref(), epsilon)
}

/// Lower bound from the two frequency endpoints: σ̄ at ω = 0 and the
/// feedthrough pair for ω → ∞. Returns the bound and the endpoint that
/// attained it (0 or `f64::INFINITY`).
pub fn initial_lower_bound(plant: &TwoOutputPlant, epsilon: f64) -> Result<(f64, f64)> {
    let (gp0, gr0) = plant.freq_responses(0.0)?;
    let at_zero = max_gsv_from_responses(gp0.as_ref(), gr0.as_ref(), epsilon)?;
    let at_inf = feedthrough_gain(plant, epsilon)?;
    if at_inf > at_zero {
        Ok((at_inf, f64::INFINITY))
    } else {
        Ok((at_zero, 0.0))
    }
}

/// Minimal relative improvement for a midpoint evaluation to count as
/// progress.
const PROGRESS_TOL: f64 = 1e-12;

/// Computes the regularized cyclic output-to-output gain of the plant to
/// relative tolerance `cfg.tol_gamma`.
///
/// The Hamiltonian query for a level γ̄ in objective units uses the squared
/// parameter γ̄², matching the determinant identity
/// det(γ̄²(G_rᴴG_r + εI) - G_pᴴG_p) = 0 at the crossings.
pub fn compute_rcoog(plant: &TwoOutputPlant, cfg: &SolverConfig) -> Result<RcoogResult> {
    cfg.validate()?;
    plant.check_hurwitz(cfg.tau_stab)?;

    let (mut lower, mut peak) = initial_lower_bound(plant, cfg.epsilon)?;
    if lower <= 0.0 {
        // zero performance channel; a positive level would be meaningless
        return Ok(RcoogResult {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            peak_frequency: 0.0,
            iterations: 0,
            trace: Vec::new(),
        });
    }

    let evaluator = FreqEvaluator::new(plant);
    let step = 1.0 + 2.0 * cfg.tol_gamma;
    let mut trace: Vec<IterationRecord> = Vec::new();

    for iteration in 1..=cfg.max_iters {
        let level = step * lower;
        let (_, parts) = retry_regularization(
            plant,
            cfg.epsilon,
            level * level,
            cfg.max_reg_tries,
            cfg.tau_sing,
        )?;
        let eigs = imaginary_eigenvalues(&parts, cfg.tau_im, cfg.tau_merge)?;
        let mut record = IterationRecord {
            lower_bound: lower,
            crossings: eigs.frequencies.clone(),
            warnings: Vec::new(),
        };

        if eigs.is_empty() {
            trace.push(record);
            let upper = step * lower;
            return Ok(RcoogResult {
                value: 0.5 * (lower + upper),
                lower,
                upper,
                peak_frequency: peak,
                iterations: iteration,
                trace,
            });
        }

        let freqs = &eigs.frequencies;
        let singleton = freqs.len() < 2;
        let candidates: Vec<f64> = if singleton {
            // a lone crossing is a tangential touch at the peak; probe it
            // and its octave neighbours
            let w = freqs[0];
            vec![w, 0.5 * w, 2.0 * w]
        } else {
            freqs
                .windows(2)
                .map(|pair| 0.5 * (pair[0] + pair[1]))
                .collect()
        };

        let mut best = lower;
        let mut best_freq = peak;
        for &w in &candidates {
            let sigma = evaluator
                .responses(w)
                .and_then(|(gp, gr)| max_gsv_from_responses(gp.as_ref(), gr.as_ref(), cfg.epsilon));
            match sigma {
                Ok(v) => {
                    if v > best {
                        best = v;
                        best_freq = w;
                    }
                }
                Err(e) => record
                    .warnings
                    .push(format!("skipped midpoint ω = {w:.6e}: {e}")),
            }
        }
        trace.push(record);

        if best <= lower * (1.0 + PROGRESS_TOL) {
            if singleton {
                // converged: the touch point cannot raise the bound
                let upper = step * lower;
                return Ok(RcoogResult {
                    value: 0.5 * (lower + upper),
                    lower,
                    upper,
                    peak_frequency: peak,
                    iterations: iteration,
                    trace,
                });
            }
            return Err(Error::StagnationDetected {
                lower,
                n_crossings: freqs.len(),
            });
        }
        lower = best;
        peak = best_freq;
    }

    Err(Error::MaxIterationsExceeded {
        max_iters: cfg.max_iters,
        lower,
        upper: f64::INFINITY,
    })
}

/// Certified threshold test: true exactly when the gain is below `gamma`.
///
/// Combines the endpoint bound (σ̄ at ω ∈ {0, ∞} must already be below the
/// level) with the Hamiltonian crossing query at the squared parameter; the
/// endpoint guard covers levels below the feedthrough floor, where the
/// crossing query alone would be vacuous.
pub fn bounded_below_gamma(plant: &TwoOutputPlant, cfg: &SolverConfig, gamma: f64) -> Result<bool> {
    assert!(gamma > 0.0, "gamma must be positive");
    cfg.validate()?;
    plant.check_hurwitz(cfg.tau_stab)?;
    let (endpoint_bound, _) = initial_lower_bound(plant, cfg.epsilon)?;
    if endpoint_bound >= gamma {
        return Ok(false);
    }
    let (_, parts) = retry_regularization(
        plant,
        cfg.epsilon,
        gamma * gamma,
        cfg.max_reg_tries,
        cfg.tau_sing,
    )?;
    Ok(imaginary_eigenvalues(&parts, cfg.tau_im, cfg.tau_merge)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::{Mat, mat};

    fn scalar_plant() -> TwoOutputPlant {
        TwoOutputPlant::new(
            mat![[-1.0]],
            mat![[1.0]],
            mat![[1.0]],
            mat![[0.0]],
            mat![[1.0]],
            mat![[0.0]],
        )
        .unwrap()
    }

    fn cfg_eps(epsilon: f64) -> SolverConfig {
        SolverConfig {
            epsilon,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn initial_bound_scalar_plant() {
        let (bound, omega) = initial_lower_bound(&scalar_plant(), 0.01).unwrap();
        assert!((bound - 1.0 / 1.01f64.sqrt()).abs() < 1e-12);
        assert_eq!(omega, 0.0);
        // the feedthrough candidate is zero for a strictly proper plant
        assert_eq!(feedthrough_gain(&scalar_plant(), 0.01).unwrap(), 0.0);
    }

    #[test]
    fn initial_bound_zero_performance() {
        let plant = TwoOutputPlant::new(
            mat![[-1.0]],
            mat![[1.0]],
            mat![[0.0]],
            mat![[0.0]],
            mat![[1.0]],
            mat![[0.0]],
        )
        .unwrap();
        assert_eq!(initial_lower_bound(&plant, 0.01).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn initial_bound_feedthrough_dominates() {
        let plant = TwoOutputPlant::new(
            mat![[-1.0]],
            mat![[1.0]],
            mat![[0.0]],
            mat![[1.0]],
            mat![[0.0]],
            mat![[0.0]],
        )
        .unwrap();
        let (bound, _) = initial_lower_bound(&plant, 1.0).unwrap();
        assert!((bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_fixture_gain() {
        let result = compute_rcoog(&scalar_plant(), &cfg_eps(0.01)).unwrap();
        let want = 1.0 / 1.01f64.sqrt();
        // peak sits at ω = 0, so the first level query already certifies
        assert_eq!(result.iterations, 1);
        assert_eq!(result.peak_frequency, 0.0);
        assert!((result.value - want).abs() < 2e-4 * want);
        assert!(result.lower <= result.value && result.value <= result.upper);
        assert!((result.upper - (1.0 + 2.0e-4) * result.lower).abs() < 1e-15);
        // tighter tolerance pins the value to the closed form
        let tight = SolverConfig {
            epsilon: 0.01,
            tol_gamma: 1e-7,
            ..SolverConfig::default()
        };
        let result = compute_rcoog(&scalar_plant(), &tight).unwrap();
        assert!((result.value - want).abs() < 1e-6 * want);
    }

    #[test]
    fn zero_plant_short_circuits() {
        let plant = TwoOutputPlant::new(
            mat![[-1.0]],
            mat![[1.0]],
            mat![[0.0]],
            mat![[0.0]],
            mat![[1.0]],
            mat![[0.0]],
        )
        .unwrap();
        let result = compute_rcoog(&plant, &cfg_eps(1e-8)).unwrap();
        assert_eq!(result.value, 0.0);
        assert_eq!(result.iterations, 0);
    }

    #[test]
    fn hinf_reduction_static_gains() {
        // y_r = u turns the gain into ‖G_p‖_∞/√(1+ε); G(s) = k/(s+1) peaks
        // at DC with value k
        for k in [1.0, 5.0] {
            let plant = TwoOutputPlant::new(
                mat![[-1.0]],
                mat![[1.0]],
                mat![[k]],
                mat![[0.0]],
                mat![[0.0]],
                mat![[1.0]],
            )
            .unwrap();
            let result = compute_rcoog(&plant, &cfg_eps(1e-8)).unwrap();
            assert!(
                (result.value - k).abs() < 1e-3 * k,
                "gain {} for k = {k}",
                result.value
            );
        }
    }

    /// Resonant plant with the gain peak at an interior frequency.
    fn resonant_plant() -> TwoOutputPlant {
        TwoOutputPlant::new(
            mat![[-0.1, 1.0], [-1.0, -0.1]],
            mat![[1.0], [0.0]],
            mat![[0.0, 1.0]],
            mat![[0.0]],
            Mat::zeros(1, 2),
            mat![[1.0]],
        )
        .unwrap()
    }

    #[test]
    fn interior_peak_matches_dense_grid() {
        let plant = resonant_plant();
        let cfg = cfg_eps(1e-8);
        let result = compute_rcoog(&plant, &cfg).unwrap();
        assert!(result.iterations >= 1);
        assert!(
            (result.peak_frequency - 1.0).abs() < 0.1,
            "peak estimate {}",
            result.peak_frequency
        );
        // brute scan of |G_p| near the resonance
        let mut grid_max = 0.0f64;
        for k in 0..=40000 {
            let omega = 0.5 + k as f64 * (1.5 - 0.5) / 40000.0;
            let g = plant.performance_system().freq_response(omega).unwrap();
            grid_max = grid_max.max(g[(0, 0)].norm());
        }
        assert!(
            (result.value - grid_max).abs() < 1e-3 * grid_max,
            "{} vs grid {}",
            result.value,
            grid_max
        );
        assert!(grid_max < result.upper * (1.0 + 1e-9));
        assert!(grid_max > result.lower * (1.0 - 1e-6));
    }

    #[test]
    fn threshold_test_examples() {
        let plant = scalar_plant();
        let cfg = cfg_eps(0.01);
        assert!(bounded_below_gamma(&plant, &cfg, 1.0).unwrap());
        assert!(!bounded_below_gamma(&plant, &cfg, 0.9).unwrap());
        assert!(bounded_below_gamma(&plant, &cfg, 1e9).unwrap());
    }

    #[test]
    fn threshold_test_brackets_computed_interval() {
        let plant = resonant_plant();
        let cfg = cfg_eps(1e-8);
        let result = compute_rcoog(&plant, &cfg).unwrap();
        assert!(bounded_below_gamma(&plant, &cfg, result.upper).unwrap());
        assert!(!bounded_below_gamma(&plant, &cfg, result.lower * (1.0 - 1e-6)).unwrap());
    }

    #[test]
    fn deterministic_results() {
        let plant = resonant_plant();
        let cfg = cfg_eps(1e-8);
        let a = compute_rcoog(&plant, &cfg).unwrap();
        let b = compute_rcoog(&plant, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn trace_lower_bounds_strictly_increase() {
        let plant = resonant_plant();
        let result = compute_rcoog(&plant, &cfg_eps(1e-8)).unwrap();
        for pair in result.trace.windows(2) {
            assert!(pair[1].lower_bound > pair[0].lower_bound);
        }
    }

    #[test]
    fn iteration_cap_reports_best_interval() {
        let plant = resonant_plant();
        let cfg = SolverConfig {
            epsilon: 1e-8,
            max_iters: 1,
            ..SolverConfig::default()
        };
        match compute_rcoog(&plant, &cfg) {
            Err(Error::MaxIterationsExceeded {
                max_iters, lower, ..
            }) => {
                assert_eq!(max_iters, 1);
                assert!(lower > 0.0);
            }
            other => panic!("expected iteration cap, got {other:?}"),
        }
    }

    #[test]
    fn spurious_classification_reports_stagnation() {
        // an absurd imaginary-axis threshold classifies the whole spectrum
        // as crossings; once the bound reaches the peak, the midpoint of
        // the two phantom resonance frequencies sits in the valley and
        // cannot raise it
        let plant = TwoOutputPlant::new(
            mat![
                [-0.1, 1.0, 0.0, 0.0],
                [-1.0, -0.1, 0.0, 0.0],
                [0.0, 0.0, -0.1, 3.0],
                [0.0, 0.0, -3.0, -0.1]
            ],
            mat![[1.0], [0.0], [1.0], [0.0]],
            mat![[0.0, 1.0, 0.0, 1.0]],
            mat![[0.0]],
            Mat::zeros(1, 4),
            mat![[1.0]],
        )
        .unwrap();
        let cfg = SolverConfig {
            epsilon: 1e-8,
            tau_im: 10.0,
            ..SolverConfig::default()
        };
        match compute_rcoog(&plant, &cfg) {
            Err(Error::StagnationDetected { n_crossings, .. }) => {
                assert!(n_crossings >= 2);
            }
            other => panic!("expected stagnation, got {other:?}"),
        }
    }

    #[test]
    fn unstable_plant_rejected() {
        let plant = TwoOutputPlant::new(
            mat![[0.5]],
            mat![[1.0]],
            mat![[1.0]],
            mat![[0.0]],
            mat![[1.0]],
            mat![[0.0]],
        )
        .unwrap();
        assert!(matches!(
            compute_rcoog(&plant, &SolverConfig::default()),
            Err(Error::NotStable { .. })
        ));
    }
}
