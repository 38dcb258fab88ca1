//! Gelfand-Zeitlin action-angle data for Hermitian matrices and the
//! canonical Ginzburg-Weinstein map `γ: Herm(n) → Herm⁺(n)`, together with
//! the numerical Poisson geometry used to check it.

pub mod error;
pub mod fiber;
pub mod gw;
pub mod io;
pub mod linalg;
pub mod pattern;
pub mod poisson;
pub mod sampling;

pub use error::{Error, Result};
pub use fiber::{chi_word, reconstruct, recover_torus, section, torus_act, GZTorusElement, RegularHermitian};
pub use gw::{chi_tilde_word, gw_forward, gw_inverse, n2_closed_form, psi_extract, GWResult, TwistResult};
pub use io::{hermitian_from_json, matrix_from_json, matrix_to_json};
pub use linalg::{
    cholesky_an, eig_hermitian, exp_hermitian, log_pd, ANMatrix, AntiHermitianMatrix, ComplexMatrix,
    EigenDecomposition, HermitianMatrix, PositiveDefiniteMatrix, UnitaryMatrix, C64,
};
pub use pattern::{classify, exp_pattern, gz_lambda, gz_mu, sample_interior, ConeClass, ConeClassification, GZPattern};
pub use poisson::{
    chart_gamma, dual_pl_bivector, gauge_transform, gz_involution_residual, gz_involution_residual_dual, iwasawa_split,
    kirillov_bivector, moment_flow_check, pushforward_residual, BivectorMatrix, HermChart,
};
