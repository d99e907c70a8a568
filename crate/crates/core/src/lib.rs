//! Givental-type Landau-Ginzburg models of Fano complete intersections.
//!
//! For a smooth Fano complete intersection X of degrees (d_1, ..., d_k) in
//! P^N this crate builds the Laurent polynomial f_X and checks, at desk
//! scale and with exact or high-precision arithmetic:
//!
//! * the period sequence of f_X against closed-form quantum period coefficients,
//! * that the torus critical points with nonzero value are exactly i_X points
//!   with values i_X d^{1/i_X} times the i_X-th roots of unity,
//! * that each of them is a nondegenerate (Morse) critical point, together with
//!   the exact quadratic form of the local chart polynomial,
//! * that these values match the nonzero spectrum of quantum multiplication by c_1.

pub mod critical;
pub mod hessian;
pub mod laurent;
pub mod model;
pub mod numeric;
pub mod periods;
pub mod report;
pub mod spectrum;

pub use critical::{Classification, CriticalPointRecord, ProbeConfig, Tolerances};
pub use laurent::{Exponents, LaurentError, LaurentPoly};
pub use model::{CiModel, ModelError, ModelInvariants};
pub use numeric::{ComplexBig, Precision};
pub use hessian::{Convention, HessianReport, RadicalExt};
pub use periods::PeriodReport;
pub use report::{FullReport, OutputFormat, RunConfig, Verdict, VerdictStatus};
pub use spectrum::SpectrumReport;
