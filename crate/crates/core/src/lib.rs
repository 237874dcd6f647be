//! Exact modular verification of the rank of the second Gaussian map for
//! general binary curves of genus `g`.
//!
//! The pipeline builds the quadric ideal of a canonical binary curve, the
//! non-torsion (`nu`) and torsion (`tau`) parts of the second Gaussian map,
//! and their ranks over GF(p). A maximal-rank verdict mod `p` is a lower
//! bound for the rank over the rationals.

pub mod curve;
pub mod error;
pub mod field;
pub mod gauss_map;
pub mod ideal;
pub mod matrix;
pub mod minors;
pub mod poly;
pub mod report;

pub use curve::{Component, CurveFamily, PairIndex};
pub use error::{Error, Result};
pub use field::{FieldElement, PrimeModulus};
pub use gauss_map::{rank_report, RankReport};
pub use matrix::{DenseMatrix, EchelonForm};
pub use poly::DensePoly;
