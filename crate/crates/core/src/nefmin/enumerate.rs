//! Search for nef-minimal subsets of 𝒞 and their coverage by a set of q-nef curves.
//!
//! States are subsets I, canonicalized to the lexicographically least sorted image under
//! the pruning group. A state grows by curves c' whose swept divisor lies in P(I) and not
//! in N(I). The graph of a nef-minimal subset is strongly connected, so every nef-minimal
//! subset is reached from any of its singletons unless an ancestor was closed by a rule
//! that also settles it.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::closure::{CurveSet, FaceOracle};
use super::graph::{build_graph, SweepGraph};
use super::ledger::{EliminationLedger, LedgerRecord};
use super::qnef::{nef_minimal_check, qnef_generate, QNefCertificate};
use crate::catalog::{Catalog, Group, SpaceId};
use crate::error::EngineError;
use crate::kernel::farkas::{cone_member_raw, RawAnswer};
use crate::kernel::linalg;
use crate::kernel::scalar::int;
use crate::kernel::{Scalar, Vector};

/// Which elimination rules may close a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criteria {
    /// Duplicate sweeps and coverage only.
    Certified,
    /// Adds the replacement criteria with the bookkeeping ledger.
    Replication,
}

impl fmt::Display for Criteria {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criteria::Certified => "1",
            Criteria::Replication => "123",
        })
    }
}

impl FromStr for Criteria {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" => Ok(Criteria::Certified),
            "123" => Ok(Criteria::Replication),
            other => Err(format!("unknown criteria set {other:?}; expected 1 or 123")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    pub criteria: Criteria,
    pub orbit_pruning: bool,
    pub max_size: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            criteria: Criteria::Certified,
            orbit_pruning: true,
            max_size: 8,
        }
    }
}

/// Why a state stopped growing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateStatus {
    Open,
    /// `criterion` is 1 for duplicate sweeps or coverage, 2 or 3 for the replacement rules.
    Eliminated {
        criterion: u8,
        witness: String,
    },
    NefGenerating(QNefCertificate),
}

#[derive(Debug, Clone)]
pub struct SubsetState {
    pub ids: Vec<usize>,
    pub graph: SweepGraph,
    pub status: StateStatus,
}

/// A covering curve image assigned to a subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverAssignment {
    /// Index into the covering classes passed to [`enumerate`].
    pub class: usize,
    /// The group image that covers.
    pub curve: Vector,
}

#[derive(Debug, Clone)]
pub struct NefMinimalSubset {
    pub ids: Vec<usize>,
    pub certificate: QNefCertificate,
    pub cover: Option<CoverAssignment>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub states: usize,
    pub levels: usize,
    pub duplicate: usize,
    pub covered: usize,
    pub generating: usize,
    pub criterion2: usize,
    pub criterion3: usize,
    pub extended: usize,
}

#[derive(Debug, Clone)]
pub struct LedgerSummary {
    pub edges: Vec<(usize, usize)>,
    pub records: Vec<LedgerRecord>,
    pub acyclic: bool,
}

#[derive(Debug, Clone)]
pub struct EnumerationReport {
    pub space: SpaceId,
    pub criteria: Criteria,
    pub orbit_pruning: bool,
    pub max_size: usize,
    pub covering_classes: Vec<Vector>,
    /// Recorded nef-minimal subsets, sorted by id list.
    pub subsets: Vec<NefMinimalSubset>,
    pub uncovered: Vec<Vec<usize>>,
    pub stats: EnumerationStats,
    pub ledger: Option<LedgerSummary>,
}

impl EnumerationReport {
    pub fn all_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

struct CoverImage {
    class: usize,
    curve: Vec<i64>,
    support: CurveSet,
}

/// Orbit images of the covering classes with the support of one decomposition over 𝒞.
/// A class covers I exactly when that support lies in I(F(I)).
struct Covers {
    images: Vec<CoverImage>,
}

impl Covers {
    fn new(
        cat: &Catalog,
        face: &FaceOracle,
        group: &Group,
        classes: &[Vector],
    ) -> Result<Covers, EngineError> {
        let mut images = Vec::new();
        for (k, s) in classes.iter().enumerate() {
            if s.basis != cat.space.curve_basis_id() {
                return Err(EngineError::Hypothesis(format!(
                    "covering class {k} is not a curve class"
                )));
            }
            let v = s.to_i64s().ok_or(EngineError::NotInCone)?;
            if (0..cat.divisors.len()).any(|d| cat.pair_with_curve(d, &v) < 0) {
                return Err(EngineError::NotQNef);
            }
            for img in group.curve_class_orbit(&v) {
                let support = face.support(&img).ok_or(EngineError::NotInCone)?;
                images.push(CoverImage {
                    class: k,
                    curve: img,
                    support,
                });
            }
        }
        Ok(Covers { images })
    }

    fn find(&self, closure: CurveSet) -> Option<&CoverImage> {
        self.images.iter().find(|c| c.support.is_subset(closure))
    }
}

struct Search<'a> {
    cat: &'a Catalog,
    face: &'a FaceOracle<'a>,
    prune: &'a Group,
    covers: Covers,
    /// Divisors each curve pairs positively with.
    positive: Vec<CurveSet>,
    opts: EnumerationOptions,
}

enum Outcome {
    Duplicate,
    Generating(Option<NefMinimalSubset>),
    Covered,
    Criterion2,
    Criterion3,
    Extend(Vec<CurveSet>),
}

fn sorted_ids(s: CurveSet) -> Vec<usize> {
    s.ids()
}

impl<'a> Search<'a> {
    fn canonical(&self, ids: &[usize]) -> CurveSet {
        CurveSet::from_ids(&self.prune.canonical_curve_set(ids))
    }

    fn swept_set(&self, s: CurveSet) -> CurveSet {
        let mut out = CurveSet::EMPTY;
        for c in s.ids() {
            out.insert(self.cat.curves[c].swept);
        }
        out
    }

    fn children(&self, state: CurveSet) -> Vec<CurveSet> {
        let swept = self.swept_set(state);
        let mut p = CurveSet::EMPTY;
        for c in state.ids() {
            p = p.union(self.positive[c]);
        }
        let targets = p.minus(swept);
        let mut out: Vec<CurveSet> = (0..self.cat.curves.len())
            .filter(|&c| !state.contains(c) && targets.contains(self.cat.curves[c].swept))
            .map(|c| self.canonical(&state.with(c).ids()))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn assign(&self, closure: CurveSet) -> Option<CoverAssignment> {
        self.covers.find(closure).map(|c| CoverAssignment {
            class: c.class,
            curve: Vector::from_ints(&c.curve, self.cat.space.curve_basis_id()),
        })
    }

    /// Shared first steps of both routes. `None` means the state is still open.
    fn settle(&self, state: CurveSet) -> (Option<Outcome>, CurveSet) {
        let ids = sorted_ids(state);
        if self.swept_set(state).len() < ids.len() {
            return (Some(Outcome::Duplicate), CurveSet::EMPTY);
        }
        if let Some(cert) = qnef_generate(self.cat, &ids) {
            if !nef_minimal_check(self.cat, &ids) {
                return (Some(Outcome::Generating(None)), CurveSet::EMPTY);
            }
            let closure = self.face.closure_of_set(state);
            let rec = NefMinimalSubset {
                ids,
                certificate: cert,
                cover: self.assign(closure),
            };
            return (Some(Outcome::Generating(Some(rec))), closure);
        }
        let closure = self.face.closure_of_set(state);
        if self.covers.find(closure).is_some() {
            return (Some(Outcome::Covered), closure);
        }
        (None, closure)
    }

    fn extend(&self, state: CurveSet) -> Result<Outcome, EngineError> {
        let kids = self.children(state);
        if !kids.is_empty() && state.len() >= self.opts.max_size {
            return Err(EngineError::BudgetExceeded {
                size: state.len() + 1,
                max_size: self.opts.max_size,
            });
        }
        Ok(Outcome::Extend(kids))
    }

    fn process_certified(&self, state: CurveSet) -> Result<Outcome, EngineError> {
        match self.settle(state) {
            (Some(o), _) => Ok(o),
            (None, _) => self.extend(state),
        }
    }

    fn orbit_edges(&self, from: usize, targets: &[usize]) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for g in &self.prune.elements {
            for &t in targets {
                edges.push((g.curve_perm[from], g.curve_perm[t]));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    fn process_replication(
        &self,
        state: CurveSet,
        ledger: &mut EliminationLedger,
    ) -> Result<Outcome, EngineError> {
        let closure = match self.settle(state) {
            (Some(o), _) => return Ok(o),
            (None, k) => k,
        };
        let ids = sorted_ids(state);
        for &c in &ids {
            if let Ok(rep) = replacement(self.cat, self.face, state, closure, c) {
                let targets = rep.minus(state).ids();
                if ledger.try_insert(&self.orbit_edges(c, &targets)).is_ok() {
                    ledger.records.push(LedgerRecord {
                        subset: ids,
                        criterion: 2,
                        pivot: c,
                        targets,
                        divisor: None,
                    });
                    return Ok(Outcome::Criterion2);
                }
            }
        }
        if self.criterion3(state, closure, ledger) {
            return Ok(Outcome::Criterion3);
        }
        self.extend(state)
    }

    /// Tries each divisor D swept inside I(F(I)) but not by I. Every child I ∪ {c} with c
    /// sweeping D inside the closure must fall to the replacement rule with a pivot in I;
    /// the footnote edge from some pivot to its c must also fit.
    fn criterion3(
        &self,
        state: CurveSet,
        closure: CurveSet,
        ledger: &mut EliminationLedger,
    ) -> bool {
        let ids = sorted_ids(state);
        let swept = self.swept_set(state);
        let mut ds: Vec<usize> = closure
            .ids()
            .iter()
            .map(|&c| self.cat.curves[c].swept)
            .collect();
        ds.sort_unstable();
        ds.dedup();
        for d in ds.into_iter().filter(|&d| !swept.contains(d)) {
            let saved = ledger.clone();
            let cs: Vec<usize> = self
                .cat
                .curves_sweeping(d)
                .into_iter()
                .filter(|&c| closure.contains(c))
                .collect();
            let mut pivots = Vec::new();
            let mut ok = true;
            for &c in &cs {
                let child = state.with(c);
                let mut done = None;
                for &p in &ids {
                    if let Ok(rep) = replacement(self.cat, self.face, child, closure, p) {
                        let targets = rep.minus(child).ids();
                        if ledger.try_insert(&self.orbit_edges(p, &targets)).is_ok() {
                            ledger.records.push(LedgerRecord {
                                subset: child.ids(),
                                criterion: 2,
                                pivot: p,
                                targets,
                                divisor: None,
                            });
                            done = Some(p);
                            break;
                        }
                    }
                }
                match done {
                    Some(p) => pivots.push((p, c)),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let fits = pivots.iter().find_map(|&(p, c)| {
                    ledger
                        .try_insert(&self.orbit_edges(p, &[c]))
                        .is_ok()
                        .then_some((p, c))
                });
                if let Some((p, c)) = fits {
                    ledger.records.push(LedgerRecord {
                        subset: ids,
                        criterion: 3,
                        pivot: p,
                        targets: vec![c],
                        divisor: Some(d),
                    });
                    return true;
                }
            }
            *ledger = saved;
        }
        false
    }
}

/// The replacement rule for pivot `c` in `state`: the unique α in the span of the other
/// curves with N(c')·(c+α) = 0 for all of them must have nonnegative coefficients, and
/// c+α must be generated by I(F(I)) without c. Returns the support I₀ of such a
/// decomposition.
pub fn replacement(
    cat: &Catalog,
    face: &FaceOracle,
    state: CurveSet,
    closure: CurveSet,
    c: usize,
) -> Result<CurveSet, EngineError> {
    if !state.contains(c) {
        return Err(EngineError::Hypothesis(format!(
            "pivot {c} is not in the subset"
        )));
    }
    let rest: Vec<usize> = state.ids().into_iter().filter(|&r| r != c).collect();
    let m: Vec<Vec<Scalar>> = rest
        .iter()
        .map(|&row| {
            rest.iter()
                .map(|&col| int(cat.pair(cat.curves[row].swept, col)))
                .collect()
        })
        .collect();
    let b: Vec<Scalar> = rest
        .iter()
        .map(|&row| int(-cat.pair(cat.curves[row].swept, c)))
        .collect();
    let a = if rest.is_empty() {
        Vec::new()
    } else {
        linalg::solve(&m, &b)
            .map_err(|_| EngineError::Hypothesis("pairing matrix is singular".into()))?
    };
    if a.iter().any(Signed::is_negative) {
        return Err(EngineError::Hypothesis(
            "replacement needs a negative coefficient".into(),
        ));
    }
    let mut t: Vec<Scalar> = cat.curve_ints(c).iter().map(|&x| int(x)).collect();
    for (w, &r) in a.iter().zip(&rest) {
        for (ti, &x) in t.iter_mut().zip(cat.curve_ints(r)) {
            *ti += w * int(x);
        }
    }
    for (&row, _) in rest.iter().zip(&a) {
        let d = cat.curves[row].swept;
        let s: Scalar = t
            .iter()
            .zip(cat.divisor_ints(d))
            .enumerate()
            .map(|(i, (x, &y))| if i == 0 { x * int(y) } else { -(x * int(y)) })
            .sum();
        if !s.is_zero() {
            return Err(EngineError::Hypothesis(
                "replacement identity does not hold".into(),
            ));
        }
    }
    let gens_ids: Vec<usize> = closure.ids().into_iter().filter(|&g| g != c).collect();
    let rows = face.curve_rows();
    let gens: Vec<&[Scalar]> = gens_ids.iter().map(|&g| rows[g].as_slice()).collect();
    match cone_member_raw(&t, &gens)? {
        RawAnswer::Combination(w) => {
            let used: Vec<usize> = gens_ids
                .iter()
                .zip(&w)
                .filter(|(_, x)| !x.is_zero())
                .map(|(&g, _)| g)
                .collect();
            Ok(CurveSet::from_ids(&used))
        }
        RawAnswer::Separator(_) => Err(EngineError::Hypothesis(
            "no replacement set inside the closure".into(),
        )),
    }
}

/// Classifies one subset under the certified rules without extending it.
pub fn classify_state(
    cat: &Catalog,
    face: &FaceOracle,
    covers: &[Vector],
    ids: &[usize],
) -> SubsetState {
    let graph = build_graph(cat, ids);
    let set = CurveSet::from_ids(ids);
    let status = if graph.vertices.len() < ids.len() {
        StateStatus::Eliminated {
            criterion: 1,
            witness: "two curves sweep the same divisor".into(),
        }
    } else if let Some(cert) = qnef_generate(cat, ids) {
        StateStatus::NefGenerating(cert)
    } else {
        let closure = face.closure_of_set(set);
        let hit = covers.iter().find(|s| {
            let target: Vec<Scalar> = s.coords.clone();
            face.member(&target, closure)
        });
        match hit {
            Some(s) => StateStatus::Eliminated {
                criterion: 1,
                witness: format!("covered by {}", cat.space.format_class(s)),
            },
            None => StateStatus::Open,
        }
    };
    SubsetState {
        ids: ids.to_vec(),
        graph,
        status,
    }
}

/// Runs the search. `group` supplies the symmetry used for covering images and, when
/// orbit pruning is on, for canonical forms and orbit-closed ledger edges.
pub fn enumerate(
    cat: &Catalog,
    group: &Group,
    covering: &[Vector],
    opts: EnumerationOptions,
) -> Result<EnumerationReport, EngineError> {
    if cat.curves.len() > 128 || cat.divisors.len() > 128 {
        return Err(EngineError::Hypothesis(
            "catalog too large for bitset states".into(),
        ));
    }
    let trivial;
    let prune = if opts.orbit_pruning {
        group
    } else {
        trivial = Group {
            kind: group.kind,
            elements: vec![group.elements[0].clone()],
        };
        &trivial
    };
    let face = FaceOracle::new(cat);
    let covers = Covers::new(cat, &face, group, covering)?;
    let positive = (0..cat.curves.len())
        .map(|c| {
            CurveSet::from_ids(
                &(0..cat.divisors.len())
                    .filter(|&d| cat.pair(d, c) > 0)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let search = Search {
        cat,
        face: &face,
        prune,
        covers,
        positive,
        opts,
    };

    let mut frontier: BTreeSet<CurveSet> = (0..cat.curves.len())
        .map(|c| search.canonical(&[c]))
        .collect();
    let mut visited: HashSet<CurveSet> = frontier.iter().copied().collect();
    let mut stats = EnumerationStats::default();
    let mut subsets = Vec::new();
    let mut ledger =
        (opts.criteria == Criteria::Replication).then(|| EliminationLedger::new(cat.curves.len()));

    while !frontier.is_empty() {
        stats.levels += 1;
        let level: Vec<CurveSet> = frontier.into_iter().collect();
        let outcomes: Vec<Outcome> = match ledger.as_mut() {
            None => level
                .par_iter()
                .map(|&s| search.process_certified(s))
                .collect::<Result<_, _>>()?,
            Some(l) => level
                .iter()
                .map(|&s| search.process_replication(s, l))
                .collect::<Result<_, _>>()?,
        };
        let mut next = BTreeSet::new();
        for o in outcomes {
            stats.states += 1;
            match o {
                Outcome::Duplicate => stats.duplicate += 1,
                Outcome::Covered => stats.covered += 1,
                Outcome::Criterion2 => stats.criterion2 += 1,
                Outcome::Criterion3 => stats.criterion3 += 1,
                Outcome::Generating(rec) => {
                    stats.generating += 1;
                    subsets.extend(rec);
                }
                Outcome::Extend(kids) => {
                    stats.extended += 1;
                    for k in kids {
                        if visited.insert(k) {
                            next.insert(k);
                        }
                    }
                }
            }
        }
        frontier = next;
    }

    subsets.sort_by(|a, b| a.ids.cmp(&b.ids));
    let uncovered = subsets
        .iter()
        .filter(|s| s.cover.is_none())
        .map(|s| s.ids.clone())
        .collect();
    let ledger = ledger.map(|l| LedgerSummary {
        edges: l.edges(),
        acyclic: l.is_acyclic(),
        records: l.records,
    });
    Ok(EnumerationReport {
        space: cat.id(),
        criteria: opts.criteria,
        orbit_pruning: opts.orbit_pruning,
        max_size: opts.max_size,
        covering_classes: covering.to_vec(),
        subsets,
        uncovered,
        stats,
        ledger,
    })
}
