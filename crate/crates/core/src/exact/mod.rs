//! Exact scalars and polynomials: rationals, dense univariate and sparse
//! multivariate polynomials, real algebraic numbers, root isolation and
//! certified integration.

mod algebraic;
mod enclosure;
mod integrate;
mod mpoly;
mod poly;
mod rat;
mod roots;

pub use algebraic::AlgebraicReal;
pub use enclosure::Enclosure;
pub use integrate::integrate_abs;
pub use mpoly::{MPoly, Var};
pub use poly::Poly;
pub use rat::{rat, Rat};
pub use roots::{isolate_real_roots, isolate_roots, sturm_count, sturm_sequence};
