//! Simultaneously small linear forms on non-degenerate curves.
//!
//! The crate enumerates integer coefficient vectors `a` for which the forms
//! `F_j(x_j) = Σ a_i f_{j,i}(x_j)` are simultaneously smaller than `Ψ(H(a))`,
//! classifies the Khintchine-type sums that decide whether such solutions
//! occur for almost all points, estimates the related measures, and builds the
//! resonant root systems used to bound Hausdorff dimensions from below.

pub mod error;
pub mod exact;
pub mod poly;
pub mod roots;
pub mod lattice;
pub mod approx;
pub mod curves;
pub mod solver;
pub mod measure;
pub mod ubiquity;
pub mod io;

pub use approx::{ApproxFunction, Classification, DimensionFunction, SumVerdict};
pub use curves::{CurveMap, SquareSystemMatrix, SystemMap, SystemSpec};
pub use error::{Error, Result};
pub use exact::{Point, Rational};
pub use measure::{CellDecomposition, SampleRegion, ThetaTuple};
pub use poly::Poly;
pub use roots::RealRoot;
pub use solver::{Backend, Form, SolutionRecord, SolverConfig};
pub use ubiquity::{ResonantPoint, UbiquityConfig};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
