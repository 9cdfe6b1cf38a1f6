//! Exact source-functional algebra of the Gaussian sliced kernel.
//!
//! Everything here runs over arbitrary-precision rationals, with complex
//! values kept as Gaussian rationals. Equalities are exact.

pub mod audit;
pub mod derivatives;
pub mod dmatrix;
pub mod form;
pub mod rational;

pub use audit::{
    alpha_cancellation_audit, brownian_bridge_entry, full_audit, jj_closed_form, midpoint_limit_check, AuditRow,
    CancellationReport, LimitCheck,
};
pub use derivatives::{
    apply_l, apply_l_exp, first_derivative_direct, l_operator, l_prefactor, second_derivative_report,
    SecondDerivativeParts,
};
pub use dmatrix::{bareiss_determinant, d_det, d_inverse_entry, DMatrix};
pub use form::{build_phi, ExactSlicing, PhiForm, Quadratic, SourceKind, SourceMap, ThetaQ};
pub use rational::{parse_rational, q, qi, to_f64, GQ, Q};
