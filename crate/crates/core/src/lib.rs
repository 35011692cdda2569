//! Exact-arithmetic laboratory for Cartesian-product/surface intersections:
//! grid counting, proximate quadruple extraction, dual curves and
//! point-curve incidences, polynomial expansion and distance applications.

pub mod algebra;
pub mod apps;
pub mod dual;
pub mod error;
pub mod expander;
pub mod expr;
pub mod fit;
pub mod grid;
pub mod io;
pub mod monotone;
pub mod quadruples;
pub mod report;
pub mod seed;

pub use error::{Error, ErrorClass, Result};
