use thiserror::Error;

use crate::kernel::BasisId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: BasisId, right: BasisId },
    #[error("cone contains a line (lineality dimension {lineality})")]
    NotPointed { lineality: usize },
    #[error("intermediate ray count {count} exceeds the ceiling {ceiling}")]
    TooManyRays { count: usize, ceiling: usize },
    #[error(
        "time budget exhausted after {processed} of {total} constraints ({rays} intermediate rays)"
    )]
    Deadline {
        processed: usize,
        total: usize,
        rays: usize,
    },
    #[error("matrix is singular")]
    Singular,
    #[error("internal soundness check failed: {0}")]
    Unsound(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unsupported marking count {0}; only 5 and 6 are bundled")]
    UnsupportedN(usize),
    #[error("non-canonical boundary label {0:?}")]
    NonCanonicalLabel(Vec<u8>),
    #[error("{0} is not a permutation of the markings")]
    BadPermutation(String),
    #[error(
        "boundary dictionary is inconsistent with the permutation {perm:?} at label {label:?}"
    )]
    DictionaryInconsistent { perm: Vec<u8>, label: Vec<u8> },
    #[error("catalog invariant violated: {0}")]
    Invariant(String),
    #[error("malformed catalog file: {0}")]
    Malformed(String),
    #[error("cannot parse class {0:?}")]
    BadClass(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(
        "search budget exceeded: a state of size {size} exceeds the maximum subset size {max_size}"
    )]
    BudgetExceeded { size: usize, max_size: usize },
    #[error("ray budget exceeded: {rays} rays exceed the ceiling {ceiling}")]
    RayBudget { rays: usize, ceiling: usize },
    #[error("curve is not in the cone generated by the negative curves")]
    NotInCone,
    #[error("zero curve has no face")]
    ZeroCurve,
    #[error("curve pairs negatively with a divisor generator")]
    NotQNef,
    #[error("cone (E+M) is not pointed; the dual cone has dimension {0}")]
    DualNotFullDimensional(usize),
    #[error("ledger edge {from} -> {to} would close a directed cycle")]
    LedgerCycle { from: usize, to: usize },
    #[error("criterion hypothesis failed: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}
