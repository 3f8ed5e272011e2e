//! Exact homological algebra over the rationals.

pub mod bigraded;
pub mod complex;
pub mod filtered;
pub mod linalg;
pub mod reduce;

pub use bigraded::BigradedComplex;
pub use complex::{image_summand, ChainComplex, Homology, ImageSummand};
pub use filtered::{lemma_pq, FilteredComplex, LemmaPQ};
pub use linalg::{IntMatrix, QMatrix, Reducer};
