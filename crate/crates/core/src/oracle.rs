//! Brute-force cross-checks that share only the kernel with the main route.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{Catalog, SpaceId};
use crate::error::{EngineError, KernelError};
use crate::face::FaceCertificate;
use crate::kernel::{
    cone_member, extreme_rays_with, facets_with, linalg, pair, DdOptions, FarkasAnswer,
};
use crate::kernel::{InequalitySystem, Scalar, Vector};
use crate::nefmin::{distinct_sweeps, qnef_lp, qnef_rref};

/// Rays of 𝔐, or why they could not be computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RaysOfM {
    Computed(Vec<Vector>),
    Budget(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetCertificate {
    pub facet: Vector,
    /// Curve-id weights when the facet functional lies in cone(𝒞); otherwise a separator.
    pub answer: FarkasAnswer,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub space: SpaceId,
    pub rays_of_m: Option<RaysOfM>,
    /// Ray index to the divisor generator on the same ray, if any.
    pub matched: Vec<Option<usize>>,
    pub facets_of_e: Vec<Vector>,
    pub facet_certs: Vec<FacetCertificate>,
    pub rays_time: Option<Duration>,
    pub facets_time: Option<Duration>,
}

impl OracleReport {
    pub fn matched_count(&self) -> usize {
        self.matched.iter().filter(|m| m.is_some()).count()
    }

    /// Rays of 𝔐 match 𝒟 bijectively up to positive scaling.
    pub fn rays_match_divisors(&self, cat: &Catalog) -> bool {
        let Some(RaysOfM::Computed(rays)) = &self.rays_of_m else {
            return false;
        };
        if rays.len() != cat.divisors.len() {
            return false;
        }
        let mut hit: Vec<usize> = self.matched.iter().flatten().copied().collect();
        hit.sort_unstable();
        hit.dedup();
        hit.len() == cat.divisors.len()
    }

    pub fn uncertified_facets(&self) -> usize {
        self.facet_certs
            .iter()
            .filter(|f| !f.answer.is_member())
            .count()
    }
}

/// Extreme rays of 𝔐 = {D : D·c >= 0 for all c in 𝒞}.
pub fn rays_of_m(cat: &Catalog, opts: DdOptions) -> Result<Vec<Vector>, EngineError> {
    let mut sys = InequalitySystem::new(cat.space.curve_basis_id());
    sys.inequalities = cat.curve_vectors();
    extreme_rays_with(&sys, opts).map_err(|e| match e {
        KernelError::TooManyRays { count, ceiling } => EngineError::RayBudget {
            rays: count,
            ceiling,
        },
        other => other.into(),
    })
}

/// Index of the divisor generator on the ray of `v`, if any.
pub fn match_divisor(cat: &Catalog, v: &Vector) -> Option<usize> {
    cat.divisors.iter().position(|d| d.class.same_ray(v))
}

/// Facets of cone(𝒟), each certified in cone(𝒞) or given a separator.
pub fn facet_check(
    cat: &Catalog,
    opts: DdOptions,
) -> Result<(Vec<Vector>, Vec<FacetCertificate>), EngineError> {
    let desc = facets_with(&cat.divisor_vectors(), opts)?;
    if !desc.equations.is_empty() {
        return Err(EngineError::DualNotFullDimensional(
            cat.rank() - desc.equations.len(),
        ));
    }
    let curves = cat.curve_vectors();
    let certs = desc
        .facets
        .par_iter()
        .map(|f| {
            Ok(FacetCertificate {
                facet: f.clone(),
                answer: cone_member(f, &curves)?,
            })
        })
        .collect::<Result<Vec<_>, KernelError>>()?;
    Ok((desc.facets, certs))
}

/// Runs the requested parts. A ray computation that runs out of budget is reported in
/// the result rather than failing the whole report.
pub fn oracle_report(
    cat: &Catalog,
    rays: Option<DdOptions>,
    facets: bool,
) -> Result<OracleReport, EngineError> {
    let mut report = OracleReport {
        space: cat.id(),
        rays_of_m: None,
        matched: Vec::new(),
        facets_of_e: Vec::new(),
        facet_certs: Vec::new(),
        rays_time: None,
        facets_time: None,
    };
    if let Some(opts) = rays {
        let t = Instant::now();
        match rays_of_m(cat, opts) {
            Ok(r) => {
                report.matched = r.iter().map(|v| match_divisor(cat, v)).collect();
                report.rays_of_m = Some(RaysOfM::Computed(r));
            }
            Err(
                e @ (EngineError::RayBudget { .. }
                | EngineError::Kernel(KernelError::Deadline { .. })),
            ) => {
                report.rays_of_m = Some(RaysOfM::Budget(e.to_string()));
            }
            Err(e) => return Err(e),
        }
        report.rays_time = Some(t.elapsed());
    }
    if facets {
        let t = Instant::now();
        let (f, c) = facet_check(cat, DdOptions::default())?;
        report.facets_of_e = f;
        report.facet_certs = c;
        report.facets_time = Some(t.elapsed());
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub seed: u64,
    pub trials: usize,
    pub generating: usize,
    pub disagreements: Vec<Vec<usize>>,
    /// Certificates that failed independent re-verification.
    pub bad_certificates: Vec<Vec<usize>>,
    pub faces_checked: usize,
    pub face_disagreements: Vec<String>,
}

impl CrosscheckReport {
    pub fn clean(&self) -> bool {
        self.disagreements.is_empty()
            && self.bad_certificates.is_empty()
            && self.face_disagreements.is_empty()
    }
}

/// A random subset of 1..=max_size curves sweeping pairwise distinct divisors.
pub fn random_subset(cat: &Catalog, rng: &mut ChaCha8Rng, max_size: usize) -> Vec<usize> {
    let size = rng.gen_range(1..=max_size);
    loop {
        let mut ids: Vec<usize> = (0..cat.curves.len()).collect();
        ids.shuffle(rng);
        let mut out: Vec<usize> = Vec::with_capacity(size);
        for c in ids {
            if out.len() == size {
                break;
            }
            let mut trial = out.clone();
            trial.push(c);
            if distinct_sweeps(cat, &trial) {
                out = trial;
            }
        }
        if out.len() == size {
            out.sort_unstable();
            return out;
        }
    }
}

/// Compares the row-reduction and LP q-nef tests on seeded random subsets.
pub fn crosscheck_qnef(
    cat: &Catalog,
    trials: usize,
    seed: u64,
    max_size: usize,
) -> CrosscheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Vec<usize>> = (0..trials)
        .map(|_| random_subset(cat, &mut rng, max_size))
        .collect();
    let results: Vec<(bool, bool, bool)> = subsets
        .par_iter()
        .map(|ids| {
            let a = qnef_rref(cat, ids);
            let b = qnef_lp(cat, ids);
            let ok = a.as_ref().is_none_or(|c| c.verify(cat))
                && b.as_ref().is_none_or(|c| c.verify(cat));
            (a.is_some(), b.is_some(), ok)
        })
        .collect();
    let mut report = CrosscheckReport {
        seed,
        trials,
        ..Default::default()
    };
    for (ids, (a, b, ok)) in subsets.into_iter().zip(results) {
        if a != b {
            report.disagreements.push(ids.clone());
        }
        if !ok {
            report.bad_certificates.push(ids.clone());
        }
        if a && b {
            report.generating += 1;
        }
    }
    report
}

/// Face of 𝔐 cut out by the curve `q`, computed from scratch: equality q only, all of 𝒞
/// as inequalities.
pub fn face_rays_direct(
    cat: &Catalog,
    q: &Vector,
    opts: DdOptions,
) -> Result<Vec<Vector>, EngineError> {
    let mut sys = InequalitySystem::new(cat.space.curve_basis_id());
    sys.equalities.push(q.clone());
    sys.inequalities = cat.curve_vectors();
    Ok(extreme_rays_with(&sys, opts)?)
}

/// Dimension of a cone from its rays.
pub fn cone_dimension(rays: &[Vector]) -> usize {
    linalg::rank(&rays.iter().map(|r| r.coords.clone()).collect::<Vec<_>>())
}

/// Dimension of F from its vanishing set: rank minus the rank of the vanishing curves,
/// valid when the closure is exact (the relative interior of F pairs positively with
/// every other curve).
pub fn dimension_from_closure(cat: &Catalog, closure: &[usize], q: &Vector) -> usize {
    let mut rows: Vec<Vec<Scalar>> = closure
        .iter()
        .map(|&c| cat.curves[c].class.coords.clone())
        .collect();
    rows.push(q.coords.clone());
    cat.rank() - linalg::rank(&rows)
}

/// Rays of 𝔐 vanishing on `q`, from a precomputed list of rays of 𝔐.
pub fn face_from_m_rays(m_rays: &[Vector], q: &Vector) -> Vec<Vector> {
    let mut out: Vec<Vector> = m_rays
        .iter()
        .filter(|r| pair(r, q).map(|v| v.is_zero()).unwrap_or(false))
        .cloned()
        .collect();
    out.sort_by(|a, b| a.coords.cmp(&b.coords));
    out
}

/// Engine/oracle agreement on faces: each certified face's rays must equal the rays
/// of the same face recomputed from scratch, and the dimension implied by the closure
/// must equal the dimension of the recomputed cone. Returns one line per disagreement.
pub fn crosscheck_faces(
    cat: &Catalog,
    faces: &[FaceCertificate],
    opts: DdOptions,
) -> Result<Vec<String>, EngineError> {
    let results = faces
        .par_iter()
        .map(|f| {
            let direct = face_rays_direct(cat, &f.face.curve, opts)?;
            let mut lines = Vec::new();
            let name = cat.space.format_class(&f.face.curve);
            let mut engine = f.rays.clone();
            engine.sort_by(|a, b| a.coords.cmp(&b.coords));
            let mut direct_sorted = direct.clone();
            direct_sorted.sort_by(|a, b| a.coords.cmp(&b.coords));
            if engine != direct_sorted {
                lines.push(format!(
                    "{name}: engine has {} rays, direct DD has {}",
                    engine.len(),
                    direct.len()
                ));
            }
            let closure = f.face.closure.ids();
            let by_closure = dimension_from_closure(cat, &closure, &f.face.curve);
            let by_rays = cone_dimension(&direct);
            if by_closure != by_rays {
                lines.push(format!(
                    "{name}: closure gives dimension {by_closure}, rays give {by_rays}"
                ));
            }
            Ok(lines)
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(results.into_iter().flatten().collect())
}
