//! Exact piecewise-polynomial calculus for networks of semi-algebraic gates.
//!
//! Networks are restricted to affine lines, compiled into piecewise
//! polynomials with algebraic breakpoints, and compared through crossing
//! numbers and certified L¹ distances. Triangle-wave constructions, the
//! depth-separation verification harness and capacity calculators are
//! built on top.

pub mod capacity;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod gates;
pub mod partition;
pub mod network;
pub mod piecewise;
pub mod separation;

pub use error::{Error, Result};
pub use exact::{rat, AlgebraicReal, Enclosure, MPoly, Poly, Rat, Var};
pub use partition::{Cut, CutKind, Interval, Partition};
pub use network::{parse_net, serialize_net, LineMap, NetProfile, NetworkGraph, Node};
pub use piecewise::{CrossingReport, PiecewisePoly};
