//! Tensor-algebraic tools for higher-order Lotka-Volterra models.
//!
//! The crate is organised bottom-up: [`tensor`] holds dense cubical tensors
//! and their classification, [`poly`] solves non-homogeneous polynomial
//! tensor equations, [`pcp`] handles quadratic complementarity problems,
//! [`model`] builds and analyses Lotka-Volterra models, and [`sim`]
//! integrates their trajectories.

pub mod io;
pub mod linalg;
pub mod model;
pub mod pcp;
pub mod poly;
pub mod sim;
pub mod tensor;

pub use model::{EquilibriumReport, LvModel, ModelError, Scenario};
pub use pcp::{PcpError, QcpProblem};
pub use poly::{PolyError, PolySystem, SolveOptions, SolveResult};
pub use tensor::{CubicalTensor, TensorClassReport, TensorError};
