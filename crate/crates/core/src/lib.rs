//! Explicit Cantor-type BV homeomorphism of the square, with numerical
//! checks of degree, distributional Jacobian and graph-measure identities.

pub mod bump;
pub mod construction;
pub mod degree;
pub mod derivative;
pub mod error;
pub mod geometry;
pub mod graph_measure;
pub mod maps;
pub mod pieces;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{mat_apply, rect_contains, Mat2, Point2, Rect2, SignCode, P2};
pub use scalar::{Exact, Scalar};
