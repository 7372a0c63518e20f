//! Chart-based tensor calculus workbench.
//!
//! Metrics, potentials and perturbations are closed-form expressions over
//! the coordinates of a chart; derivatives come from forward-mode Taylor
//! jets, so curvature residuals are exact up to floating-point rounding.
//! On top of the pointwise engine sit the Bakry-Emery curvature objects,
//! the associated field equations with their stress tensor, a discretized
//! first-variation toolkit on periodic charts, and the warped-product
//! cosmology constructors.

pub mod bakry_emery;
pub mod chart;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;

pub use bakry_emery::{be_ricci, best_lambda, df_covector, differentiate, grad_projective_conn, weighted_scalar, BEParam, QEInstance, SolitonClass};
pub use chart::{check_nondegenerate, Axis, Chart, MetricField, SampleGrid, ScalarField, SymJets, SymTensorField};
pub use error::{ConfigError, DomainErrorKind, EvalError, GeomError, ParseError};
pub use expr::{parse, BinOp, Expr, UnaryOp};
pub use geometry::{affine_ricci, div_sym2, div_vector, gradient, grad_norm_sq, hessian, inner, laplacian, max_abs, max_abs_vec, projective_conn, trace2, AffineConn, PointFrame, Sym2Cov1, Ten3, Ten4};
pub use jet::Jet;
