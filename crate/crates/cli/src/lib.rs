//! The `negcone` command line: argument types, pipelines and exit-code mapping.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use negcone_core::catalog::file::{dump_json, load_json};
use negcone_core::catalog::invariants::catalog_usable;
use negcone_core::catalog::{check_invariants, orbits_of_ids, Catalog, Group, GroupKind, SpaceId};
use negcone_core::face::{
    certify_containment, covered_by, face_of, face_rays, verify_effective_cone, Verdict,
    VerifyOptions,
};
use negcone_core::kernel::DdOptions;
use negcone_core::nefmin::{
    enumerate, Criteria, EnumerationOptions, EnumerationReport, FaceOracle,
};
use negcone_core::oracle::{crosscheck_faces, crosscheck_qnef, oracle_report, RaysOfM};
use negcone_core::report::{
    all_passed, build_certificate, catalog_violation_json, check_certificate, counterexample_json,
    fixtures, nums, report_contractions, standard_covering_classes, versions, Budgets,
    CertificateFile, Command, CounterexampleFile, NefminDoc, Num, Route, RunConfig,
};
use negcone_core::{EngineError, KernelError, Vector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_CATALOG: i32 = 3;
/// Bad arguments, unreadable files and other usage errors.
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "negcone",
    version,
    about = "Exact verification of effective cones of M0,5 and M0,6 bounded by negative curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args, Clone)]
pub struct SpaceArgs {
    /// m05 or m06.
    #[arg(long, required_unless_present = "catalog")]
    pub space: Option<SpaceId>,
    /// Catalog JSON (as written by `catalog dump`) replacing the bundled one.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Symmetry group: all permutations of the markings, or those fixing the last one.
    /// Defaults to full for m06 and fix-last for m05.
    #[arg(long, value_enum)]
    pub group: Option<GroupArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Full,
    FixLast,
}

#[derive(Debug, Args, Clone)]
pub struct BudgetArgs {
    /// Largest subset the enumeration may grow.
    #[arg(long, default_value_t = Budgets::default().max_subset_size)]
    pub max_size: usize,
    /// Ceiling on intermediate rays in a double description run.
    #[arg(long, default_value_t = Budgets::default().max_rays)]
    pub max_rays: usize,
    /// Wall-clock ceiling in seconds for double description runs.
    #[arg(long, default_value_t = Budgets::default().wall_clock_secs)]
    pub wall_clock: u64,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        Budgets {
            max_subset_size: self.max_size,
            max_rays: self.max_rays,
            wall_clock_secs: self.wall_clock,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleWhat {
    Rays,
    Facets,
    Crosscheck,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Verify that cone(D) is the effective cone.
    VerifyEff {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value = "qrays")]
        route: Route,
        #[arg(long, default_value = "1")]
        criteria: Criteria,
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Use no symmetry: every Q-ray gets its own face certificate.
        #[arg(long)]
        no_symmetry: bool,
        /// Certificate on success, counterexample on failure.
        #[arg(long, alias = "out")]
        cert: Option<PathBuf>,
    },
    /// Enumerate nef-minimal subsets of negative curves.
    EnumerateNefmin {
        #[command(flatten)]
        space: SpaceArgs,
        /// Covering classes, one per line; the bundled classes when omitted.
        #[arg(long)]
        covers: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        criteria: Criteria,
        #[arg(long, default_value_t = Budgets::default().max_subset_size)]
        max_size: usize,
        #[arg(long)]
        no_orbit_pruning: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit partitions of the curve and divisor catalogs.
    Orbits {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The face of the nef-side cone cut out by a curve class, with membership certificates.
    Face {
        #[command(flatten)]
        space: SpaceArgs,
        /// Curve class, e.g. `l-e12-e34`.
        #[arg(long)]
        curve: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force cross-checks.
    Oracle {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum)]
        what: OracleWhat,
        /// Random subsets for the crosscheck.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Largest random subset for the crosscheck.
        #[arg(long, default_value_t = 5)]
        subset_size: usize,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regression identities on both bundled spaces.
    Fixtures {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-class data for the covering classes.
    ReportContractions {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Catalog interchange files.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Certificate files.
    Cert {
        #[command(subcommand)]
        action: CertCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    /// Write the catalog with its orbit partitions.
    Dump {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CertCmd {
    /// Re-verify a certificate written by `verify-eff`.
    Check {
        file: PathBuf,
        /// Catalog to check against; the bundled catalog of the certificate's space when omitted.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("catalog invariant violated: {0}")]
    Catalog(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Catalog(_) => EXIT_CATALOG,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::BudgetExceeded { .. }
            | EngineError::RayBudget { .. }
            | EngineError::Kernel(KernelError::TooManyRays { .. } | KernelError::Deadline { .. }) => {
                CliError::Budget(e.to_string())
            }
            EngineError::Catalog(c) => CliError::Catalog(c.to_string()),
            other => CliError::Verification(other.to_string()),
        }
    }
}

/// Result of a command: the exit code, the human summary and the JSON artifact.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub artifact: Option<String>,
}

impl Outcome {
    fn ok(summary: String, artifact: String) -> Self {
        Outcome {
            code: EXIT_OK,
            summary,
            artifact: Some(artifact),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Loaded catalog with its symmetry group, after the invariant suite.
struct Loaded {
    cat: Catalog,
    group: Group,
    seed: u64,
}

/// Loads the catalog, failing with the catalog exit code and a violation file when a
/// fatal invariant breaks.
fn load(args: &SpaceArgs) -> Result<Result<Loaded, Outcome>, CliError> {
    let cat = match &args.catalog {
        Some(p) => match load_json(&read(p)?) {
            Ok(c) => c,
            Err(e) => return Err(CliError::Catalog(e.to_string())),
        },
        None => {
            let space = args.space.expect("clap requires --space without --catalog");
            Catalog::standard(space.n()).map_err(|e| CliError::Catalog(e.to_string()))?
        }
    };
    if let Some(s) = args.space {
        if s != cat.id() {
            return Err(CliError::Usage(format!(
                "--space {s} but the catalog is for {}",
                cat.id()
            )));
        }
    }
    let checks = check_invariants(&cat, None);
    if !catalog_usable(&checks) {
        let file = catalog_violation_json(cat.id(), &checks, args.seed);
        let mut summary = String::from("catalog invariant violated\n");
        for v in &file.violations {
            let _ = writeln!(summary, "  {v}");
        }
        return Ok(Err(Outcome {
            code: EXIT_CATALOG,
            summary,
            artifact: Some(to_json(&file)),
        }));
    }
    let group = match args.group {
        None => cat.default_group(),
        Some(GroupArg::Full) => Group::build(&cat, GroupKind::Full),
        Some(GroupArg::FixLast) => Group::build(&cat, GroupKind::FixLast),
    }
    .map_err(|e| CliError::Catalog(e.to_string()))?;
    Ok(Ok(Loaded {
        cat,
        group,
        seed: args.seed,
    }))
}

macro_rules! loaded {
    ($args:expr) => {
        match load($args)? {
            Ok(l) => l,
            Err(outcome) => return Ok(outcome),
        }
    };
}

fn config(
    l: &Loaded,
    command: Command,
    route: Route,
    criteria: Criteria,
    budgets: Budgets,
) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::new(l.cat.id(), command);
    c.route = route;
    c.criteria = criteria;
    c.budgets = budgets;
    c.seed = l.seed;
    c.validate().map_err(CliError::Usage)?;
    Ok(c)
}

fn enumerate_nefmin(
    l: &Loaded,
    covers: &[Vector],
    criteria: Criteria,
    max_size: usize,
    prune: bool,
) -> Result<EnumerationReport, CliError> {
    let opts = EnumerationOptions {
        criteria,
        orbit_pruning: prune,
        max_size,
    };
    Ok(enumerate(&l.cat, &l.group, covers, opts)?)
}

#[derive(Serialize)]
struct FailureFile<'a> {
    space: SpaceId,
    kind: &'a str,
    violations: Vec<String>,
    explanation: &'a str,
    seed: u64,
    versions: std::collections::BTreeMap<String, String>,
}

fn failure(
    l: &Loaded,
    kind: &str,
    violations: Vec<String>,
    explanation: &str,
    summary: String,
) -> Outcome {
    let file = FailureFile {
        space: l.cat.id(),
        kind,
        violations,
        explanation,
        seed: l.seed,
        versions: versions(),
    };
    Outcome {
        code: EXIT_VERIFICATION,
        summary,
        artifact: Some(to_json(&file)),
    }
}

fn verify_eff(l: &Loaded, cfg: &RunConfig, no_symmetry: bool) -> Result<Outcome, CliError> {
    let cat = &l.cat;
    let covers = standard_covering_classes(cat);
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "space {} ({} curves, {} divisors), route {}",
        cat.id(),
        cat.curves.len(),
        cat.divisors.len(),
        cfg.route
    );

    let mut nefmin = None;
    if cfg.route != Route::Qrays {
        let t = Instant::now();
        let report = enumerate_nefmin(l, &covers, cfg.criteria, cfg.budgets.max_subset_size, true)?;
        let doc = NefminDoc::from_report(cat, &report);
        let _ = writeln!(
            summary,
            "nefmin: {} nef-minimal subsets, {} uncovered, criteria {}, {:.2?}",
            doc.nef_minimal_classes,
            doc.uncovered.len(),
            cfg.criteria,
            t.elapsed()
        );
        if doc.ledger_acyclic == Some(false) {
            return Ok(failure(
                l,
                "ledger",
                Vec::new(),
                "the elimination ledger has a cycle",
                summary,
            ));
        }
        nefmin = Some(doc);
    }
    let nefmin_covered = nefmin.as_ref().map(|d| d.all_covered);

    if cfg.route == Route::Nefmin {
        let doc = nefmin.expect("nefmin route ran");
        if !doc.all_covered {
            let v = doc.uncovered.iter().map(|s| s.join(" + ")).collect();
            return Ok(failure(
                l,
                "uncovered-subsets",
                v,
                "nef-minimal subsets not covered by any covering class",
                summary,
            ));
        }
        let _ = writeln!(summary, "verified: every nef-minimal subset is covered");
        #[derive(Serialize)]
        struct NefminFile {
            space: SpaceId,
            nefmin: NefminDoc,
            seed: u64,
            versions: std::collections::BTreeMap<String, String>,
        }
        let file = NefminFile {
            space: cat.id(),
            nefmin: doc,
            seed: l.seed,
            versions: versions(),
        };
        return Ok(Outcome::ok(summary, to_json(&file)));
    }

    let t = Instant::now();
    let verdict = verify_effective_cone(
        cat,
        &l.group,
        VerifyOptions {
            dd: cfg.dd_options(),
            no_symmetry,
        },
    )?;
    let cert = match verdict {
        Verdict::Refuted(cx) => {
            let file = counterexample_json(cat, &cx, l.seed);
            let _ = writeln!(summary, "refuted ({}): {}", file.kind, file.explanation);
            return Ok(Outcome {
                code: EXIT_VERIFICATION,
                summary,
                artifact: Some(to_json(&file)),
            });
        }
        Verdict::Verified(c) => c,
    };
    let rays: usize = cert.faces.iter().map(|f| f.rays.len()).sum();
    let _ = writeln!(
        summary,
        "qrays: {} Q-rays in {} orbits, {} face rays certified, {:.2?}",
        cert.q_rays.len(),
        cert.faces.len(),
        rays,
        t.elapsed()
    );
    if let Some(bad) = cert.faces.iter().find(|f| !f.verify(cat)) {
        return Err(CliError::Verification(format!(
            "face certificate of {} failed re-verification",
            cat.space.format_class(&bad.face.curve)
        )));
    }
    let cls = &cert.classification;
    let _ = writeln!(
        summary,
        "covering classification: {} classes, orbit sizes {:?}",
        cls.representatives.len(),
        cls.orbit_sizes
    );
    for r in &cls.representatives {
        let _ = writeln!(summary, "  {}", cat.space.format_class(r));
    }
    let cover = covered_by(cat, &l.group, &cert, &covers)?;
    let uncovered: Vec<String> = cert
        .q_rays
        .iter()
        .zip(&cover)
        .filter(|(_, c)| c.is_none())
        .map(|(q, _)| cat.space.format_class(&q.ray))
        .collect();
    let qrays_covered = uncovered.is_empty();
    let _ = writeln!(
        summary,
        "covering classes {}: {}",
        covers
            .iter()
            .map(|c| cat.space.format_class(c))
            .collect::<Vec<_>>()
            .join(", "),
        if qrays_covered {
            "cover every Q-ray face".to_string()
        } else {
            format!("{} Q-ray faces uncovered", uncovered.len())
        }
    );
    if !qrays_covered {
        return Ok(failure(
            l,
            "uncovered-q-rays",
            uncovered,
            "Q-ray faces not contained in a face of any covering class",
            summary,
        ));
    }
    if let Some(n) = nefmin_covered {
        if n != qrays_covered {
            return Ok(failure(
                l,
                "route-disagreement",
                Vec::new(),
                "the two routes reach different verdicts",
                summary,
            ));
        }
        let _ = writeln!(summary, "routes agree");
    }
    let file = build_certificate(cat, &cert, nefmin, l.seed)?;
    let _ = writeln!(summary, "verified");
    Ok(Outcome::ok(summary, to_json(&file)))
}

fn parse_covers(cat: &Catalog, text: &str) -> Result<Vec<Vector>, CliError> {
    text.lines()
        .map(str::trim)
        .filter(|s| !s.is_empty() && !s.starts_with('#'))
        .map(|s| {
            cat.space
                .parse_class(s)
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

#[derive(Serialize)]
struct SubsetDoc {
    ids: Vec<usize>,
    curves: Vec<String>,
    /// Weights keyed by curve id, as exact rationals.
    certificate: Vec<(usize, Num)>,
    generated: Vec<Num>,
    cover: Option<String>,
}

#[derive(Serialize)]
struct EnumerationFile {
    space: SpaceId,
    summary: NefminDoc,
    subsets: Vec<SubsetDoc>,
    stats: Stats,
    seed: u64,
    versions: std::collections::BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Stats {
    states: usize,
    levels: usize,
    duplicate: usize,
    covered: usize,
    generating: usize,
    criterion2: usize,
    criterion3: usize,
}

fn enumerate_cmd(
    l: &Loaded,
    covers: Vec<Vector>,
    criteria: Criteria,
    max_size: usize,
    prune: bool,
) -> Result<Outcome, CliError> {
    let cat = &l.cat;
    let cfg = config(
        l,
        Command::EnumerateNefmin,
        Route::Nefmin,
        criteria,
        Budgets {
            max_subset_size: max_size,
            ..Budgets::default()
        },
    )?;
    let t = Instant::now();
    let report = enumerate_nefmin(l, &covers, cfg.criteria, cfg.budgets.max_subset_size, prune)?;
    let s = &report.stats;
    let doc = NefminDoc::from_report(cat, &report);
    let mut summary = format!(
        "{} states over {} levels; {} nef-minimal subsets recorded, {} uncovered; {:.2?}\n",
        s.states,
        s.levels,
        report.subsets.len(),
        report.uncovered.len(),
        t.elapsed()
    );
    if let Some(led) = &report.ledger {
        let _ = writeln!(
            summary,
            "ledger: {} edges, acyclic {}",
            led.edges.len(),
            led.acyclic
        );
    }
    let subsets = report
        .subsets
        .iter()
        .map(|m| SubsetDoc {
            ids: m.ids.clone(),
            curves: m.ids.iter().map(|&c| cat.curve_name(c)).collect(),
            certificate: m
                .certificate
                .weights
                .iter()
                .map(|(&c, w)| (c, Num::from_scalar(w)))
                .collect(),
            generated: nums(&m.certificate.curve),
            cover: m.cover.as_ref().map(|c| cat.space.format_class(&c.curve)),
        })
        .collect();
    let all = doc.all_covered && doc.ledger_acyclic != Some(false);
    let file = EnumerationFile {
        space: cat.id(),
        summary: doc,
        subsets,
        stats: Stats {
            states: s.states,
            levels: s.levels,
            duplicate: s.duplicate,
            covered: s.covered,
            generating: s.generating,
            criterion2: s.criterion2,
            criterion3: s.criterion3,
        },
        seed: l.seed,
        versions: versions(),
    };
    let code = if all { EXIT_OK } else { EXIT_VERIFICATION };
    Ok(Outcome {
        code,
        summary,
        artifact: Some(to_json(&file)),
    })
}

fn orbits_cmd(l: &Loaded) -> Outcome {
    let cat = &l.cat;
    let curve_orbits = orbits_of_ids(cat.curves.len(), &l.group.curve_perms());
    let stab = l.group.divisor_stabilizer();
    let perms: Vec<Vec<usize>> = stab
        .elements
        .iter()
        .map(|e| {
            e.divisor_perm
                .iter()
                .map(|x| x.expect("stabilizer"))
                .collect()
        })
        .collect();
    let refs: Vec<&[usize]> = perms.iter().map(Vec::as_slice).collect();
    let divisor_orbits = orbits_of_ids(cat.divisors.len(), &refs);
    #[derive(Serialize)]
    struct OrbitsFile {
        space: SpaceId,
        group_order: usize,
        divisor_group_order: usize,
        curves: Vec<Vec<String>>,
        divisors: Vec<Vec<String>>,
        seed: u64,
    }
    let file = OrbitsFile {
        space: cat.id(),
        group_order: l.group.order(),
        divisor_group_order: stab.order(),
        curves: curve_orbits
            .iter()
            .map(|o| o.iter().map(|&c| cat.curve_name(c)).collect())
            .collect(),
        divisors: divisor_orbits
            .iter()
            .map(|o| o.iter().map(|&d| cat.divisors[d].name.clone()).collect())
            .collect(),
        seed: l.seed,
    };
    let sizes = |o: &[Vec<usize>]| o.iter().map(Vec::len).collect::<Vec<_>>();
    let summary = format!(
        "group of order {}\ncurve orbits: {:?}\ndivisor orbits: {:?}\n",
        l.group.order(),
        sizes(&curve_orbits),
        sizes(&divisor_orbits)
    );
    Outcome::ok(summary, to_json(&file))
}

fn face_cmd(l: &Loaded, curve: &str) -> Result<Outcome, CliError> {
    let cat = &l.cat;
    let c = cat
        .space
        .parse_class(curve)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let oracle = FaceOracle::new(cat);
    let face = face_of(cat, &oracle, &c)?;
    let rays = face_rays(&face, DdOptions::default())?;
    #[derive(Serialize)]
    struct FaceFile {
        space: SpaceId,
        curve: String,
        closure: Vec<String>,
        rays: Vec<Vec<Num>>,
        ray_names: Vec<String>,
        memberships: Vec<Vec<(String, Num)>>,
        failing_ray: Option<Vec<Num>>,
        separator: Option<Vec<Num>>,
        seed: u64,
    }
    let mut file = FaceFile {
        space: cat.id(),
        curve: cat.space.format_class(&c),
        closure: face
            .closure
            .ids()
            .iter()
            .map(|&i| cat.curve_name(i))
            .collect(),
        rays: rays.iter().map(nums).collect(),
        ray_names: rays.iter().map(|r| cat.space.format_class(r)).collect(),
        memberships: Vec::new(),
        failing_ray: None,
        separator: None,
        seed: l.seed,
    };
    let mut summary = format!(
        "face of {}: closure {} curves, {} rays\n",
        file.curve,
        file.closure.len(),
        rays.len()
    );
    let code = match certify_containment(cat, &face, &rays)? {
        Ok(cert) => {
            file.memberships = cert
                .memberships
                .iter()
                .map(|w| {
                    w.iter()
                        .map(|(&d, x)| (cat.divisors[d].name.clone(), Num::from_scalar(x)))
                        .collect()
                })
                .collect();
            summary.push_str("every ray lies in cone(D)\n");
            EXIT_OK
        }
        Err(fail) => {
            let _ = writeln!(
                summary,
                "ray {} lies outside cone(D)",
                cat.space.format_class(&fail.ray)
            );
            file.failing_ray = Some(nums(&fail.ray));
            file.separator = Some(nums(&fail.separator));
            EXIT_VERIFICATION
        }
    };
    Ok(Outcome {
        code,
        summary,
        artifact: Some(to_json(&file)),
    })
}

fn oracle_cmd(
    l: &Loaded,
    what: OracleWhat,
    trials: usize,
    subset_size: usize,
    budgets: Budgets,
) -> Result<Outcome, CliError> {
    let cat = &l.cat;
    let cfg = config(
        l,
        Command::Oracle,
        Route::Qrays,
        Criteria::Certified,
        budgets,
    )?;
    let mut summary = String::new();
    #[derive(Serialize)]
    struct OracleFile {
        space: SpaceId,
        what: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        rays: Option<Vec<Vec<Num>>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        matched: Option<Vec<Option<String>>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        facets: Option<Vec<Vec<Num>>>,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        uncertified_facets: Vec<Vec<Num>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        disagreements: Option<Vec<Vec<usize>>>,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        face_disagreements: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        trials: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        generating: Option<usize>,
        passed: bool,
        seed: u64,
        versions: std::collections::BTreeMap<String, String>,
    }
    let mut file = OracleFile {
        space: cat.id(),
        what: "",
        rays: None,
        matched: None,
        facets: None,
        uncertified_facets: Vec::new(),
        disagreements: None,
        face_disagreements: Vec::new(),
        trials: None,
        generating: None,
        passed: false,
        seed: l.seed,
        versions: versions(),
    };
    match what {
        OracleWhat::Rays => {
            file.what = "rays";
            let report = oracle_report(cat, Some(cfg.dd_options()), false)?;
            match report.rays_of_m {
                Some(RaysOfM::Computed(rays)) => {
                    let matched: Vec<Option<String>> = report
                        .matched
                        .iter()
                        .map(|m| m.map(|d| cat.divisors[d].name.clone()))
                        .collect();
                    file.passed = report.matched.len() == cat.divisors.len() && {
                        let mut hit: Vec<usize> =
                            report.matched.iter().flatten().copied().collect();
                        hit.sort_unstable();
                        hit.dedup();
                        hit.len() == cat.divisors.len()
                    };
                    let _ = writeln!(
                        summary,
                        "{} rays of M, {} on divisor generators ({} generators), {:.2?}",
                        rays.len(),
                        matched.iter().flatten().count(),
                        cat.divisors.len(),
                        report.rays_time.unwrap_or_default()
                    );
                    file.rays = Some(rays.iter().map(nums).collect());
                    file.matched = Some(matched);
                }
                other => {
                    let msg = match other {
                        Some(RaysOfM::Budget(m)) => m,
                        _ => "not computed".into(),
                    };
                    let _ = writeln!(
                        summary,
                        "rays of M: {msg} after {:.2?}",
                        report.rays_time.unwrap_or_default()
                    );
                    return Ok(Outcome {
                        code: EXIT_BUDGET,
                        summary,
                        artifact: None,
                    });
                }
            }
        }
        OracleWhat::Facets => {
            file.what = "facets";
            let report = oracle_report(cat, None, true)?;
            let bad: Vec<Vec<Num>> = report
                .facet_certs
                .iter()
                .filter(|f| !f.answer.is_member())
                .map(|f| nums(&f.facet))
                .collect();
            let _ = writeln!(
                summary,
                "{} facets of cone(D), {} not in cone(C), {:.2?}",
                report.facets_of_e.len(),
                bad.len(),
                report.facets_time.unwrap_or_default()
            );
            file.passed = bad.is_empty();
            file.facets = Some(report.facets_of_e.iter().map(nums).collect());
            file.uncertified_facets = bad;
        }
        OracleWhat::Crosscheck => {
            file.what = "crosscheck";
            let t = Instant::now();
            let r = crosscheck_qnef(cat, trials, l.seed, subset_size);
            // Faces of the covering classes against a from-scratch DD.
            let oracle = FaceOracle::new(cat);
            let mut certs = Vec::new();
            for c in standard_covering_classes(cat) {
                let face = face_of(cat, &oracle, &c)?;
                let rays = face_rays(&face, DdOptions::default())?;
                if let Ok(cert) = certify_containment(cat, &face, &rays)? {
                    certs.push(cert);
                }
            }
            let face_dis = crosscheck_faces(cat, &certs, cfg.dd_options())?;
            let _ = writeln!(
                summary,
                "{} subsets (seed {}): {} generating, {} disagreements, {} bad certificates; {} faces, {} disagreements; {:.2?}",
                r.trials,
                r.seed,
                r.generating,
                r.disagreements.len(),
                r.bad_certificates.len(),
                certs.len(),
                face_dis.len(),
                t.elapsed()
            );
            file.passed = r.clean() && face_dis.is_empty();
            file.trials = Some(r.trials);
            file.generating = Some(r.generating);
            let mut all = r.disagreements.clone();
            all.extend(r.bad_certificates.iter().cloned());
            file.disagreements = Some(all);
            file.face_disagreements = face_dis;
        }
    }
    let code = if file.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    };
    Ok(Outcome {
        code,
        summary,
        artifact: Some(to_json(&file)),
    })
}

fn fixtures_cmd() -> Result<Outcome, CliError> {
    let m05 = Catalog::standard(5).map_err(|e| CliError::Catalog(e.to_string()))?;
    let m06 = Catalog::standard(6).map_err(|e| CliError::Catalog(e.to_string()))?;
    let s6 = m06
        .default_group()
        .map_err(|e| CliError::Catalog(e.to_string()))?;
    let results = fixtures(&m05, &m06, &s6)?;
    let mut summary = String::new();
    for r in &results {
        let _ = writeln!(
            summary,
            "{} {} / {}{}",
            if r.passed { "PASS" } else { "FAIL" },
            r.group,
            r.name,
            if r.passed {
                String::new()
            } else {
                format!(": {}", r.detail)
            }
        );
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let _ = writeln!(summary, "{passed}/{} fixtures pass", results.len());
    let code = if all_passed(&results) {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    };
    Ok(Outcome {
        code,
        summary,
        artifact: Some(to_json(&results)),
    })
}

fn contractions_cmd(l: &Loaded) -> Result<Outcome, CliError> {
    let report = report_contractions(&l.cat, &l.group, &standard_covering_classes(&l.cat))?;
    Ok(Outcome::ok(report.render(), to_json(&report)))
}

fn cert_check(path: &Path, catalog: Option<&Path>) -> Result<Outcome, CliError> {
    let file: CertificateFile = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let cat = match catalog {
        Some(p) => load_json(&read(p)?).map_err(|e| CliError::Catalog(e.to_string()))?,
        None => Catalog::standard(file.space.n()).map_err(|e| CliError::Catalog(e.to_string()))?,
    };
    match check_certificate(&file, &cat) {
        Ok(msg) => Ok(Outcome {
            code: EXIT_OK,
            summary: format!("{msg}\n"),
            artifact: None,
        }),
        Err(e) => Ok(Outcome {
            code: EXIT_VERIFICATION,
            summary: format!("{e}\n"),
            artifact: None,
        }),
    }
}

/// Reads a counterexample file and re-checks it against the catalog.
pub fn check_counterexample(text: &str, cat: &Catalog) -> Result<bool, CliError> {
    let file: CounterexampleFile =
        serde_json::from_str(text).map_err(|e| CliError::Usage(e.to_string()))?;
    file.verify(cat)
        .map_err(|e| CliError::Verification(e.to_string()))
}

/// Runs a parsed command. The artifact is returned, not written.
pub fn run(cmd: &Cmd) -> Result<Outcome, CliError> {
    match cmd {
        Cmd::VerifyEff {
            space,
            route,
            criteria,
            budgets,
            no_symmetry,
            ..
        } => {
            let l = loaded!(space);
            let cfg = config(&l, Command::VerifyEff, *route, *criteria, budgets.budgets())?;
            verify_eff(&l, &cfg, *no_symmetry)
        }
        Cmd::EnumerateNefmin {
            space,
            covers,
            criteria,
            max_size,
            no_orbit_pruning,
            ..
        } => {
            let l = loaded!(space);
            let covers = match covers {
                Some(p) => parse_covers(&l.cat, &read(p)?)?,
                None => standard_covering_classes(&l.cat),
            };
            enumerate_cmd(&l, covers, *criteria, *max_size, !no_orbit_pruning)
        }
        Cmd::Orbits { space, .. } => Ok(orbits_cmd(&loaded!(space))),
        Cmd::Face { space, curve, .. } => face_cmd(&loaded!(space), curve),
        Cmd::Oracle {
            space,
            what,
            trials,
            subset_size,
            budgets,
            ..
        } => oracle_cmd(
            &loaded!(space),
            *what,
            *trials,
            *subset_size,
            budgets.budgets(),
        ),
        Cmd::Fixtures { .. } => fixtures_cmd(),
        Cmd::ReportContractions { space, .. } => contractions_cmd(&loaded!(space)),
        Cmd::Catalog {
            action: CatalogCmd::Dump { space, .. },
        } => {
            let l = loaded!(space);
            let checks = check_invariants(&l.cat, Some(&l.group));
            let mut summary = String::new();
            for c in &checks {
                let _ = writeln!(
                    summary,
                    "{} {}: {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(Outcome::ok(
                summary,
                format!("{}\n", dump_json(&l.cat, Some(&l.group))),
            ))
        }
        Cmd::Cert {
            action: CertCmd::Check { file, catalog },
        } => cert_check(file, catalog.as_deref()),
    }
}

/// Output path of a command, if any.
pub fn output_path(cmd: &Cmd) -> Option<&Path> {
    match cmd {
        Cmd::VerifyEff { cert, .. } => cert.as_deref(),
        Cmd::EnumerateNefmin { out, .. }
        | Cmd::Orbits { out, .. }
        | Cmd::Face { out, .. }
        | Cmd::Oracle { out, .. }
        | Cmd::Fixtures { out }
        | Cmd::ReportContractions { out, .. }
        | Cmd::Catalog {
            action: CatalogCmd::Dump { out, .. },
        } => out.as_deref(),
        Cmd::Cert { .. } => None,
    }
}

/// Caps the global thread pool from `NEGCONE_THREADS`.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NEGCONE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("NEGCONE_THREADS={v:?} is not a count")))?;
    if n == 0 {
        return Err(CliError::Usage("NEGCONE_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn engine_errors_map_to_exit_codes() {
        assert_eq!(
            CliError::from(EngineError::BudgetExceeded {
                size: 9,
                max_size: 8
            })
            .exit_code(),
            EXIT_BUDGET
        );
        let deadline = EngineError::Kernel(KernelError::Deadline {
            processed: 1,
            total: 2,
            rays: 3,
        });
        assert_eq!(CliError::from(deadline).exit_code(), EXIT_BUDGET);
        assert_eq!(
            CliError::from(EngineError::NotInCone).exit_code(),
            EXIT_VERIFICATION
        );
    }

    #[test]
    fn covers_file_skips_comments() {
        let cat = Catalog::standard(5).unwrap();
        let v = parse_covers(&cat, "# fibers\nl-e0\n\n2l-e0-e1-e2-e3\n").unwrap();
        assert_eq!(v, standard_covering_classes(&cat));
    }
}
