//! Dense vector/matrix primitives, seeded randomness, eigenvalue estimation,
//! Euclidean-ball projection, and the Lambert W_-1 branch.

pub mod eig;
pub mod lambert;
pub mod matrix;
pub mod rng;
pub mod vec;

pub use eig::{max_eigenvalue, min_eigenvalue};
pub use lambert::lambert_w_minus1;
pub use matrix::Matrix;
pub use rng::{Direction, RngRoot, RngStream};
pub use vec::project_ball;
