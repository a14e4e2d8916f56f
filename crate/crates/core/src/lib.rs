//! Critical-radius maximal operators on uniform grids.
//!
//! The crate implements Hardy–Littlewood and Orlicz maximal operators damped
//! by a critical radius function ρ,
//!
//! ```text
//! M_η^{ρ,σ} f(x) = sup_{Q ∋ x} (1 + r_Q/ρ(x_Q))^{-σ} ‖f‖_{η,Q},
//! ```
//!
//! together with the surrounding machinery: Young functions and their
//! complementary duals, Luxemburg norms, ρ-adapted Muckenhoupt constants, an
//! integral growth condition on `(a, b, η)`, and a harness that runs weighted
//! inequalities as numerical experiments with refinement diagnostics.
//!
//! All suprema are taken over a fixed finite [`domain::CubeFamily`]; the
//! computed operators are therefore lower bounds of the continuum ones, and
//! every inequality between operators is checked with both sides over the
//! same family.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dini;
pub mod domain;
pub mod error;
pub mod harness;
pub mod maximal;
pub mod orlicz;
pub mod quadrature;
pub mod radius;
pub mod weights;
pub mod young;

pub use error::{Error, Result};
