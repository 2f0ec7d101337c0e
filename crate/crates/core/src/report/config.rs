//! Run configuration shared by the CLI and the artifacts it writes.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::catalog::SpaceId;
use crate::kernel::DdOptions;
use crate::nefmin::Criteria;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyEff,
    EnumerateNefmin,
    Orbits,
    Face,
    Oracle,
    Fixtures,
    ReportContractions,
    CatalogDump,
    CertCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Qrays,
    Nefmin,
    Both,
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "qrays" => Ok(Route::Qrays),
            "nefmin" => Ok(Route::Nefmin),
            "both" => Ok(Route::Both),
            other => Err(format!(
                "unknown route {other:?} (expected qrays, nefmin or both)"
            )),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Qrays => "qrays",
            Route::Nefmin => "nefmin",
            Route::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub max_subset_size: usize,
    /// Ceiling on intermediate rays in any double description run.
    pub max_rays: usize,
    /// Wall-clock ceiling in seconds for the long oracle computations.
    pub wall_clock_secs: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_subset_size: 8,
            max_rays: 2_000_000,
            wall_clock_secs: 600,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub space: SpaceId,
    pub command: Command,
    pub route: Route,
    #[serde(serialize_with = "criteria_str")]
    pub criteria: Criteria,
    pub budgets: Budgets,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

fn criteria_str<S: serde::Serializer>(c: &Criteria, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

impl RunConfig {
    pub fn new(space: SpaceId, command: Command) -> Self {
        RunConfig {
            space,
            command,
            route: Route::Qrays,
            criteria: Criteria::Certified,
            budgets: Budgets::default(),
            output: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let b = &self.budgets;
        if b.max_subset_size == 0 || b.max_rays == 0 || b.wall_clock_secs == 0 {
            return Err("budgets must be positive".into());
        }
        if b.max_subset_size > 127 {
            return Err("maximum subset size is at most 127".into());
        }
        Ok(())
    }

    /// DD options for the long computations, with the deadline starting now.
    pub fn dd_options(&self) -> DdOptions {
        DdOptions {
            max_rays: Some(self.budgets.max_rays),
            deadline: Some(Instant::now() + Duration::from_secs(self.budgets.wall_clock_secs)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_budgets_are_rejected() {
        let mut c = RunConfig::new(SpaceId::M05, Command::VerifyEff);
        assert!(c.validate().is_ok());
        c.budgets.max_rays = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn routes_round_trip() {
        for r in [Route::Qrays, Route::Nefmin, Route::Both] {
            assert_eq!(r.to_string().parse::<Route>().unwrap(), r);
        }
    }
}
