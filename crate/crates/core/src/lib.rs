//! Unital qubit channels between pairs of states: closed-form feasibility
//! decisions, explicit channel construction, and brute-force cross-checks.
//!
//! ```
//! use unifeas::{decide_unital, example_family, synthesize, verify_channel, CPolicy};
//!
//! let inst = example_family(0.0).unwrap();
//! assert!(decide_unital(&inst).is_feasible());
//! let ch = synthesize(&inst, CPolicy::Midpoint).unwrap();
//! assert!(verify_channel(&ch, &inst, 1e-9).passed);
//!
//! assert!(!decide_unital(&example_family(2.0 / 3.0).unwrap()).is_feasible());
//! ```

pub mod canonical;
pub mod cli;
pub mod error;
pub mod feasibility;
pub mod oracle;
pub mod qmat2;
pub mod synth;

pub use canonical::{canonicalize, CanonicalForm, PauliDiagonalParams};
pub use error::{Error, Result};
pub use feasibility::{
    decide_alberti_uhlmann, decide_degenerate, decide_unital, matrix_majorization_2x2,
    parabola_coeffs, Criterion, Decision, Margin, ParabolaCoeffs, ProblemInstance, Verdict,
    Witness,
};
pub use oracle::{
    example1_channel, example_family, example_map, grid_condition_iii, grid_condition_iv,
    random_channel_search, random_instance, scan_condition_v, GridSpec, SampleMode, SearchBudget,
};
pub use qmat2::{BlochVector, CMat2, DensityMatrix, Herm2, C64};
pub use synth::{
    pauli_channel, synthesize, verify_channel, CPolicy, Channel, Provenance, VerificationReport,
};
