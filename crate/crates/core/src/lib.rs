//! Queries in the `∧ / next / eventually` fragment of LTL over finite event
//! traces, and the machinery for separating positive from negative traces:
//! evaluation under strict semantics, query containment, strengthening and
//! weakening frontiers, product-graph search for extremal separators, and an
//! exhaustive oracle used as ground truth.

pub mod containment;
pub mod eval;
pub mod frontiers;
mod masks;
pub mod model;
pub mod oracle;
pub mod parse;
pub mod separation;
pub mod sepgraphs;

pub use model::{
    Atom, AtomSet, AnyQuery, DataInstance, DiamondQueryNF, ExampleSet, PathQuery, Query,
    QueryClass, Signature, Step, TemporalOp,
};

use thiserror::Error;

/// Errors shared across the crate's operations.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] parse::ParseError),
    #[error("query `{0}` is not in normal form")]
    NotNormalForm(String),
    #[error("query `{0}` is not in class {1}")]
    NotInClass(String, QueryClass),
    #[error("unsupported for class {0}: {1}")]
    Unsupported(QueryClass, &'static str),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("example set must contain at least one positive instance")]
    EmptyPositives,
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    #[error("query does not separate the example set")]
    NotSeparator,
    #[error("invalid clause: {0}")]
    InvalidClause(String),
}

pub type Result<T> = std::result::Result<T, Error>;
