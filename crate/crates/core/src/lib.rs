//! Private distributed matrix multiplication with bivariate Hermitian
//! polynomial codes over prime fields.
//!
//! The master splits `A` into `K` row blocks and `B` into `L` column blocks,
//! hides them under `T` layers of random masks and hands each worker one
//! evaluation of `A(x)` plus `m` derivative evaluations of `B(x, y)`. Any
//! order-respecting set of `R_th` results decodes every block product
//! `A_k B_l`, and any `T` workers together learn nothing.

pub mod baseline;
pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod privacy;
pub mod scheme;
pub mod simulator;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldOrder};
pub use matrix::FieldMatrix;
pub use poly::{CodeShape, EvalPoint, SchemeParams};
