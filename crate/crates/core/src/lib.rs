//! Exact edge-deletion solvers over tree decompositions.
//!
//! Two dynamic programs run over nice tree decompositions: a specialised one
//! bounding the size (or weight) of every connected component, and a general
//! one removing every copy of a small forbidden family, as subgraphs or as
//! induced subgraphs. A brute-force oracle and instance generators back the
//! test suite.

pub mod bits;
pub mod component;
pub mod decomposition;
pub mod driver;
pub mod error;
pub mod general;
pub mod graph;
pub mod oracle;
pub mod partition;

pub use error::{Error, Result};
