//! Nef-minimal subsets of the negative-curve catalog: q-nef tests, sweep graphs,
//! vanishing closures, coverage and the enumeration itself.

pub mod closure;
pub mod enumerate;
pub mod graph;
pub mod ledger;
pub mod qnef;

pub use closure::{CurveSet, FaceOracle};
pub use enumerate::{
    classify_state, enumerate, replacement, CoverAssignment, Criteria, EnumerationOptions,
    EnumerationReport, EnumerationStats, LedgerSummary, NefMinimalSubset, StateStatus, SubsetState,
};
pub use graph::{build_graph, SweepGraph};
pub use ledger::{EliminationLedger, LedgerRecord};
pub use qnef::{
    distinct_sweeps, nef_minimal_check, pairing_matrix, qnef_generate, qnef_lp, qnef_rref,
    QNefCertificate,
};
