//! Bell-inequality predictions for discrete phase measurements on
//! photon-number-correlated pair states.
//!
//! The pipeline: [`fock`] generates real coefficient vectors `c_n` for
//! states `sum_n c_n |n>|n>`; [`phase`] turns them into exact joint and
//! marginal outcome distributions for phase measurements of resolution
//! `s` (with a direct-amplitude oracle for cross-checking); [`binning`]
//! reduces the `s+1` outcomes per mode to a binary up/down result; and
//! [`bell`] evaluates the Clauser-Horne ratio `B_CH` and the spin
//! combination `B_S` over those binary tables, including a
//! deterministic angle optimizer. [`lhv`] bounds the same functionals
//! classically by enumerating every deterministic two-setting
//! hidden-variable strategy.

pub mod bell;
pub mod binning;
pub mod error;
pub mod fock;
mod kahan;
pub mod lhv;
pub mod phase;

pub use bell::{
    bell_ch_factorized, bell_ch_general, bell_s_factorized, bell_s_general, correlation_e,
    maximize_over_psi, optimize_psi, AngleSet, BellEvaluation, BinnedSystem, Functional,
    DEFAULT_OPT_GRID, PSI0_MAX,
};
pub use binning::{
    bin_distribution, make_scheme, p_up_marginal, BinaryJointTable, BinningScheme, SchemeKind,
    SchemeSpec,
};
pub use error::{Error, Result};
pub use fock::{
    bessel_i0, circle_coeffs, custom_coeffs, equal_coeffs, parse_coeff_lines, tms_coeffs,
    CoefficientVector, Source,
};
pub use lhv::{enumerate_lhv_bounds, mixture_check, DeterministicStrategy, Outcome};
pub use phase::{
    joint_distribution, joint_prob, marginal_prob, oracle_joint_prob, JointPhaseDistribution,
    NormalizationMode, PhaseGrid,
};
