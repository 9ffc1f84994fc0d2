//! Exact arithmetic for transportation cost spaces over finite metric spaces.

mod error;

pub mod linalg;
pub mod metric;
pub mod min_condition;
pub mod random;
pub mod rational;
pub mod seminorm;
pub mod special;
pub mod transport;
pub mod tree;
pub mod wire;

pub use error::{Error, Result};
pub use metric::FiniteMetricSpace;
pub use rational::Rational;
pub use transport::{TransportPlan, TransportProblem};
