//! Exact Todd classes and equivariant Riemann-Roch for complete simplicial
//! toric varieties.
//!
//! ```
//! use toric_todd::{corpus, riemann_roch::todd_class};
//!
//! let report = todd_class(&corpus::p112()).unwrap();
//! assert_eq!(report.integral, toric_todd::linalg::rat(1, 1));
//! ```

pub mod chow;
pub mod cli;
pub mod corpus;
pub mod cyclotomic;
pub mod fan;
pub mod io;
pub mod linalg;
pub mod polytope;
pub mod riemann_roch;
pub mod series;
pub mod stabilizers;
