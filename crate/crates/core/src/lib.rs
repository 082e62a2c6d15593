//! Analysis of multipartite unitary gates of operator Schmidt rank two.
//!
//! * [`tensor`]: operators on tensor products, realignment and Schmidt ranks.
//! * [`schmidt`]: the unique two-term decomposition and the singular number.
//! * [`families`]: canonical gate families for each singular-number class.
//! * [`diag3`]: classification of three-qubit diagonal gates.
//! * [`qgate`]: the QGATE text format.

pub mod catalog;
pub mod diag3;
pub mod error;
pub mod families;
pub mod qgate;
pub mod random;
pub mod schmidt;
pub mod tensor;

pub use error::{Error, Result};
pub use schmidt::{
    classify, is_genuine, product_operators_in_span, schmidt_decomposition_sr2, singular_number,
    ClassLabel, SchmidtDecompositionSR2, SpanProducts,
};
pub use tensor::{Bipartition, CMatrix, CVector, LocalOperator, Operator};
