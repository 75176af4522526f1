//! Exact-arithmetic Hopf algebras built from Feynman categories.
//!
//! Graphs and their morphisms live in [`graph`], [`canon`], [`tree`] and
//! [`morphism`]. The algebraic layer ([`algebra`], [`hopf`], [`verify`]) works
//! with isomorphism classes of basic morphisms, and [`instances`] supplies the
//! factorization enumerators for the concrete families.

pub mod algebra;
pub mod canon;
pub mod error;
pub mod expr;
pub mod graph;
pub mod hopf;
pub mod instances;
pub mod morphism;
pub mod render;
pub mod tree;
pub mod verify;

pub use algebra::{ClassKey, Coeff, Elem, LinComb, Ring, Symmetry, Tensor2, Word};
pub use error::{Error, Result};
pub use graph::Graph;
pub use hopf::{Channel, HopfAlgebra, Instance, OrbitChannel};
pub use morphism::GraphMorphism;
