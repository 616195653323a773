//! Verification toolkit for two-factor integral operators of
//! Forelli-Rudin type on the tube domain over the forward light cone.
//!
//! The crate has three layers:
//!
//! 1. **Exact layer** — rational-arithmetic predicates: the closed-form
//!    exponent calculus ([`closed_forms`]), the boundedness conditions
//!    ([`conditions`]), and the Schur-test exponent construction
//!    ([`schur`]). Equalities between exponents are the crux of the
//!    theory, so nothing here touches floating point.
//! 2. **Numeric layer** — kernel evaluation ([`kernels`]) over the cone
//!    geometry ([`geometry`]), with importance-sampled Monte Carlo
//!    quadrature ([`quadrature`]) driven by heavy-tailed proposals
//!    ([`sampling`]).
//! 3. **Experiment layer** ([`experiments`]) — scaling-law fits,
//!    constancy checks, duality pairings, and blow-up probes that tie the
//!    two layers together.

pub mod closed_forms;
pub mod conditions;
pub mod experiments;
pub mod geometry;
pub mod kernels;
pub mod quadrature;
pub mod ratio;
pub mod sampling;
pub mod schur;

pub use closed_forms::{
    image_norm_exponent, single_pole_exponent, testfn_norm_exponent, two_pole_exponent,
    PowerLawPrediction, TestFnSpec, TestFnVariant,
};
pub use conditions::{TheoremId, TheoremVerdict};
pub use geometry::{g_form, in_cone, q_diff, q_form, ConePoint, TubePoint};
pub use kernels::{adjoint_params, cpow, kernel_s, kernel_t, FRParams, Factor, SpaceSpec};
pub use quadrature::{McComplexEstimate, McEstimate, SamplingConfig};
pub use ratio::{parse_rat, rat, rint, Rat};
pub use sampling::{sample_tube, SampleBatch};
pub use schur::{witness_solve, SchurWitness, WitnessVariant};
