//! Polynomial solutions of moment-driven nonlinear integral equations.

pub mod error;
pub mod expr;
pub mod hankel;
pub mod linalg;
pub mod moments;
pub mod numeric;
pub mod poly;
pub mod quadrature;
pub mod reference;
pub mod serial;
pub mod variant;
pub mod weight;

pub use error::{Error, Result};
pub use expr::Expr;
pub use hankel::{
    hankel_condition, normalization, polynomial_via_determinants, solve_polynomial, HankelCondition, HankelSystem,
};
pub use moments::{
    contour_moments, contour_moments_symbolic, generalized_moments, moments, GeneralizedMoments, MomentSequence,
    MomentSource,
};
pub use numeric::{scalar_eq, with_precision, GaussRational, Mode, PrecisionContext, Scalar};
pub use poly::{eval, inner_moment, orthogonality, shifted_inner, Polynomial};
pub use reference::{chebyshev_u_star, jacobi_g, laguerre, legendre, match_up_to_scale};
pub use variant::{
    check_arbitrary_f, check_functional_orthogonality, enumerate_multiplicative, parity_measure_moments,
    solve_functional, solve_linear_shift, solve_multiplicative, verify, EquationForm, VerificationReport,
};
pub use weight::{normalize, parse_weight, Bound, Interval, Preset, Weight};
