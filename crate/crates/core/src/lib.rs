//! Exact-arithmetic construction of the differential graded Lie algebra of
//! symmetric-group projector images inside the geometric cobar complex of a
//! simply connected simplicial set, together with the bar-construction side
//! used to cross-check the resulting rational homotopy ranks.
//!
//! Module map:
//! - [`fincat`]: finite sets, their rational linearization and the named
//!   group-ring elements (`w_n`, `s_n`, bracket elements, `phi`, `psi`).
//! - [`freelie`]: graded tensor algebra, the signed right action of the
//!   group ring and free Lie algebra oracles.
//! - [`simplicial`]: reduced simplicial sets, powers relative to the fat
//!   wedge and the Eilenberg-Zilber shuffle map.
//! - [`homalg`]: exact sparse linear algebra over chain complexes.
//! - [`dgl`]: the cobar algebra, its Lie subcomplex and homotopy reports.
//! - [`bar`]: bar construction and indecomposables of commutative algebras.
//! - [`cli`]: the command-line surface.

pub mod bar;
pub mod cli;
pub mod dgl;
pub mod error;
pub mod fincat;
pub mod freelie;
pub mod homalg;
pub mod rational;
pub mod simplicial;

pub use error::{Error, Result};
pub use rational::Q;
