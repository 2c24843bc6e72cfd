//! Combinatorial models for tensor products of operads.
//!
//! The crate covers finite set operads and their tree terms, k-fold monoidal
//! words and their posets, the simplicial complexes indexing the cells of a
//! tensor product, a set-level W-construction, binodal trees, the
//! Grothendieck-construction poset and exact integer homology of order
//! complexes.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod binodal;
pub mod error;
pub mod interchange;
pub mod kcomplex;
pub mod monoidal_words;
pub mod operad_core;
pub mod par;
pub mod t_construction;
pub mod tensor_calculus;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
