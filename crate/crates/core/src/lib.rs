//! SPARQL to Notation3 translation, with a reference SPARQL evaluator, a
//! forward-chaining N3 engine and a tabled backward prover.

pub mod algebra;
pub mod cli;
pub mod engine;
pub mod error;
pub mod fuzz;
pub mod gen;
pub(crate) mod lexer;
pub mod n3;
pub mod prover;
pub mod rdf;
pub mod scope;
pub mod sparql;
pub mod translate;

pub use error::{Error, ExitCode, Result};
