//! Output-to-output gain computation for continuous-time linear systems.
//!
//! The gain of a plant with a performance output and a residual output is
//! the worst-case performance energy achievable under a unit bound on the
//! residual energy (plus an ε·‖u‖² regularization term that keeps the
//! associated Riccati objects well defined). Its frequency characterization
//! is the maximum over ω of the largest generalized singular value of
//! (G_p(iω), [G_r(iω); √ε·I]).
//!
//! Rather than sweeping frequencies, [`solver::compute_rcoog`] sweeps gain
//! levels: each candidate level is certified or refuted through the
//! imaginary eigenvalues of a Hamiltonian matrix, which locate *all*
//! frequencies where the objective attains the level. [`oracle`] provides
//! the naive grid sweep as an independent cross-check, and [`sysgen`]
//! generates the two families of benchmark systems.

pub mod error;
pub mod gsv;
pub mod hamiltonian;
mod linalg;
pub mod oracle;
pub mod plantfile;
pub mod solver;
pub mod ss;
pub mod sysgen;

pub use error::{Error, Result};
pub use gsv::{
    GsvResult, generalized_singular_values, max_gsv_at_frequency, max_gsv_from_responses,
};
pub use hamiltonian::{
    HamiltonianParts, ImagEigs, build_hamiltonian, imaginary_eigenvalues, retry_regularization,
};
pub use oracle::{GridSpec, gamma_determinant, grid_rcoog, hinf_reference};
pub use solver::{
    IterationRecord, RcoogResult, SolverConfig, bounded_below_gamma, compute_rcoog,
    initial_lower_bound,
};
pub use ss::{FreqEvaluator, StateSpace, TwoOutputPlant, spectral_abscissa, stability_margin};
pub use sysgen::{NetworkSpec, RandomSystemSpec, networked_plant, random_stable_plant};
