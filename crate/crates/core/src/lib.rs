//! Exact computations in the free pre-Lie algebra on rooted trees, its
//! enveloping Hopf algebra, the associated Solomon idempotents, and the
//! pre-Lie Magnus expansion with a numerical matrix backend.

pub mod combinat;
pub mod element;
pub mod error;
pub mod hopf;
pub mod magnus;
pub mod odemagnus;
pub mod prelie;
pub mod solomon;
mod text;
pub mod trees;
pub mod verify;

/// Exact coefficient field.
pub type Rational = num_rational::BigRational;

pub use element::Element;
pub use error::{Error, Result};
pub use hopf::{TensorElement, TruncationOrder};
pub use trees::{Alphabet, Forest, Label, Tree};
