//! Reports and artifacts: run configuration, certificates, contraction data and fixtures.

pub mod certificate;
pub mod config;
pub mod contractions;
pub mod fixtures;

pub use certificate::{
    build_certificate, catalog_of, catalog_violation_json, check_certificate, counterexample_json,
    nums, versions, CertError, CertificateFile, CounterexampleFile, NefminDoc, Num,
};
pub use config::{Budgets, Command, Route, RunConfig};
pub use contractions::{report_contractions, ContractionEntry, ContractionReport, Decomposition};
pub use fixtures::{all_passed, fixtures, FixtureResult};

use crate::catalog::{Catalog, SpaceId};
use crate::kernel::Vector;

/// Representatives of the covering classes: the fibers of the initial contractions
/// of fiber type.
pub fn standard_covering_classes(cat: &Catalog) -> Vec<Vector> {
    let names: &[&str] = match cat.id() {
        SpaceId::M05 => &["l-e0", "2l-e0-e1-e2-e3"],
        SpaceId::M06 => &["l-e1", "l-e12-e34", "2l-e12-e13-e14-e25-e35-e45"],
    };
    names
        .iter()
        .map(|n| cat.space.parse_class(n).expect("covering class parses"))
        .collect()
}
