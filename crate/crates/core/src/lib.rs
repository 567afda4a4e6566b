//! Curvature-sign testing for metric spaces.
//!
//! The crate answers two kinds of questions about a pointed metric space
//! `(X, d, p)`:
//!
//! * **Macroscopic:** do finite samples (or whole finite spaces) satisfy the
//!   quadrilateral, Lebedeva–Petrunin, and Ptolemy four-point inequalities?
//!   See [`four_point`].
//! * **Infinitesimal:** do the normalized functionals `A1`, `A2`, `A3`
//!   (defect divided by the squared max distance to the base point) stay
//!   nonnegative as quadruples shrink toward `p`? See [`infinitesimal`],
//!   [`convexity`].
//!
//! To cross-check the infinitesimal verdicts, [`pretangent`] builds a finite
//! approximation of a pretangent space — the blow-up limit of `X` at `p`
//! along a normalizing sequence `r_n ↓ 0` — and the four-point scanners run
//! again on that quotient.
//!
//! All sampling is driven by explicit seeds and derived streams; every
//! parallel reduction is deterministic for any worker count.

pub mod convexity;
pub mod defaults;
pub mod error;
pub mod four_point;
pub mod infinitesimal;
pub mod metric;
pub mod pretangent;
pub mod rng;
pub mod spaces;

pub use error::{Error, Result};
pub use four_point::{
    lp_defect, ptolemy_defect, quadrilateral_defect, scan_finite, scan_sampled, FunctionalKind,
    QuadrupleDefectReport, SampledScan, ScanMode, Verdict,
};
pub use infinitesimal::{
    delta_p, estimate_liminf, evaluate, LiminfEstimate, NormalizedFunctional, ScaleSchedule,
};
pub use metric::{validate_metric, AxiomViolation, FiniteMetricSpace, MetricOracle, ValidationReport};
pub use spaces::{estimate_doubling_constant, make_oracle, BuiltinOracle, CarrierPoint, SpaceSpec};
