//! Faces F(c) of 𝔐, their extreme rays and membership certificates in cone(𝒟).
//!
//! The route of record: take the extreme rays of the dual cone Q = (𝔈 + 𝔐)*, and for
//! each one check F(q) ⊆ 𝔈 ray by ray. A nonzero x in Q decomposes over Q's extreme
//! rays, and a point of 𝔐 pairs nonnegatively with each of them, so every face of 𝔐
//! cut out by some x is contained in F(q) for an extreme ray q.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::catalog::{int_coords, Catalog, Group, GroupElement, SpaceId};
use crate::error::{EngineError, KernelError};
use crate::kernel::{
    cone_member, extreme_rays_with, linalg, pair, DdOptions, FarkasAnswer, InequalitySystem,
};
use crate::kernel::{Scalar, Vector};
use crate::nefmin::{CurveSet, FaceOracle};

/// F(c) = 𝔐 ∩ c^⊥, described by its vanishing closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub curve: Vector,
    pub closure: CurveSet,
    /// Functionals are curve classes; points are divisor classes.
    pub system: InequalitySystem,
}

/// Membership of each face ray in cone(𝒟), as divisor-id weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceCertificate {
    pub face: Face,
    pub rays: Vec<Vector>,
    pub memberships: Vec<BTreeMap<usize, Scalar>>,
}

/// A face ray outside cone(𝒟), with a separating curve class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailingRay {
    pub curve: Vector,
    pub ray: Vector,
    pub separator: Vector,
}

/// A point of 𝔐 outside 𝔈 found while computing Q: the Q-ray `q` is not in cone(𝒞),
/// and `divisor` pairs nonnegatively with 𝒞 but negatively with `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCounterexample {
    pub q: Vector,
    pub divisor: Vector,
    /// A separator showing `divisor` is not in cone(𝒟).
    pub separator: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    Dual(DualCounterexample),
    Face(FailingRay),
}

/// Orbit classes of maximal faces among {F(q)}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringClassification {
    /// One Q-ray per class.
    pub representatives: Vec<Vector>,
    pub orbit_sizes: Vec<usize>,
    /// For each Q-ray, the class whose orbit supplies a face containing F(q).
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QRay {
    pub ray: Vector,
    /// Index into `TheoremCertificate::faces` of the orbit representative.
    pub rep: usize,
    /// Permutation of the markings carrying the representative to this ray.
    pub perm: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremCertificate {
    pub space: SpaceId,
    pub q_rays: Vec<QRay>,
    /// Face certificates for the orbit representatives.
    pub faces: Vec<FaceCertificate>,
    pub classification: CoveringClassification,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub dd: DdOptions,
    /// Treat every Q-ray as its own representative.
    pub no_symmetry: bool,
}

/// Outcome of the theorem route: a certificate or an explicit counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified(Box<TheoremCertificate>),
    Refuted(Box<Counterexample>),
}

/// Assembles F(c) for a class c in cone(𝒞).
pub fn face_of(cat: &Catalog, oracle: &FaceOracle, c: &Vector) -> Result<Face, EngineError> {
    if c.basis != cat.space.curve_basis_id() {
        return Err(EngineError::Kernel(KernelError::BasisMismatch {
            left: c.basis,
            right: cat.space.curve_basis_id(),
        }));
    }
    let v = c.to_i64s().ok_or(EngineError::NotInCone)?;
    let closure = oracle.closure_of_curve(&v)?;
    Ok(face_from_closure(cat, c.clone(), closure))
}

fn face_from_closure(cat: &Catalog, curve: Vector, closure: CurveSet) -> Face {
    let mut system = InequalitySystem::new(cat.space.curve_basis_id());
    for i in 0..cat.curves.len() {
        if closure.contains(i) {
            system.equalities.push(cat.curves[i].class.clone());
        } else {
            system.inequalities.push(cat.curves[i].class.clone());
        }
    }
    system.equalities.push(curve.clone());
    Face {
        curve,
        closure,
        system,
    }
}

/// Extreme rays of the face cone.
pub fn face_rays(face: &Face, opts: DdOptions) -> Result<Vec<Vector>, EngineError> {
    match extreme_rays_with(&face.system, opts) {
        Ok(r) => Ok(r),
        Err(KernelError::NotPointed { lineality }) => Err(EngineError::Hypothesis(format!(
            "face of {} contains a line (dimension {lineality}); the catalog is inconsistent",
            face.curve
        ))),
        Err(e) => Err(e.into()),
    }
}

/// Certifies each ray in cone(𝒟), or returns the first failing ray with its separator.
pub fn certify_containment(
    cat: &Catalog,
    face: &Face,
    rays: &[Vector],
) -> Result<Result<FaceCertificate, FailingRay>, EngineError> {
    let gens = cat.divisor_vectors();
    let answers: Vec<FarkasAnswer> = rays
        .par_iter()
        .map(|r| cone_member(r, &gens))
        .collect::<Result<Vec<_>, KernelError>>()?;
    let mut memberships = Vec::with_capacity(rays.len());
    for (ray, ans) in rays.iter().zip(answers) {
        match ans {
            FarkasAnswer::Combination(w) => memberships.push(w),
            FarkasAnswer::Separator(y) => {
                return Ok(Err(FailingRay {
                    curve: face.curve.clone(),
                    ray: ray.clone(),
                    separator: y,
                }))
            }
        }
    }
    Ok(Ok(FaceCertificate {
        face: face.clone(),
        rays: rays.to_vec(),
        memberships,
    }))
}

impl FaceCertificate {
    /// Independent re-check: each ray satisfies the face system, and each combination
    /// has nonnegative weights on catalog divisors summing to the ray.
    pub fn verify(&self, cat: &Catalog) -> bool {
        if self.rays.len() != self.memberships.len() {
            return false;
        }
        self.rays.iter().zip(&self.memberships).all(|(ray, w)| {
            if !self.face.system.contains(ray).unwrap_or(false) || ray.is_zero() {
                return false;
            }
            let mut sum = Vector::zero(cat.space.divisor_basis_id());
            for (&d, x) in w {
                if d >= cat.divisors.len() || !crate::kernel::scalar::is_nonneg(x) {
                    return false;
                }
                sum = sum.add(&cat.divisors[d].class.scale(x));
            }
            sum == *ray
        })
    }
}

/// Extreme rays of 𝒟* = {x : D·x >= 0 for all D in 𝒟}, as curve classes.
pub fn dual_rays(cat: &Catalog, opts: DdOptions) -> Result<Vec<Vector>, EngineError> {
    let mut sys = InequalitySystem::new(cat.space.divisor_basis_id());
    sys.inequalities = cat.divisor_vectors();
    match extreme_rays_with(&sys, opts) {
        Ok(r) => Ok(r),
        Err(KernelError::NotPointed { lineality }) => {
            Err(EngineError::DualNotFullDimensional(cat.rank() - lineality))
        }
        Err(e) => Err(e.into()),
    }
}

/// Orbit partition of rays with, for each ray, a group element index carrying its
/// orbit's first member to it.
fn ray_orbits(group: &Group, rays: &[Vector]) -> (Vec<usize>, Vec<(usize, usize)>) {
    let keys: Vec<Vec<i64>> = rays.iter().map(int_coords).collect();
    let index: HashMap<&Vec<i64>, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; rays.len()];
    let mut reps = Vec::new();
    for i in 0..rays.len() {
        if owner[i].is_some() {
            continue;
        }
        let r = reps.len();
        reps.push(i);
        for (gi, g) in group.elements.iter().enumerate() {
            if let Some(&j) = index.get(&g.action.apply_curve(&keys[i])) {
                if owner[j].is_none() {
                    owner[j] = Some((r, gi));
                }
            }
        }
    }
    (
        reps,
        owner
            .into_iter()
            .map(|o| o.expect("every ray is in its own orbit"))
            .collect(),
    )
}

/// The theorem route. Returns a certificate, or a counterexample when some ray of
/// 𝒟* lies outside cone(𝒞) or some face ray lies outside cone(𝒟).
pub fn verify_effective_cone(
    cat: &Catalog,
    group: &Group,
    opts: VerifyOptions,
) -> Result<Verdict, EngineError> {
    let oracle = FaceOracle::new(cat);
    let rays = dual_rays(cat, opts.dd)?;
    let rank = linalg::rank(&rays.iter().map(|r| r.coords.clone()).collect::<Vec<_>>());
    if rank < cat.rank() {
        return Err(EngineError::DualNotFullDimensional(rank));
    }
    // Only elements preserving 𝒟 permute the rays of 𝒟*.
    let acting = if opts.no_symmetry {
        Group {
            kind: group.kind,
            elements: vec![group.elements[0].clone()],
        }
    } else {
        group.divisor_stabilizer()
    };
    let (reps, owner) = ray_orbits(&acting, &rays);

    // Q = 𝒟* ∩ cone(𝒞); a ray of 𝒟* outside cone(𝒞) yields a point of 𝔐 outside 𝔈.
    let curves = cat.curve_vectors();
    let divisors = cat.divisor_vectors();
    let member: Vec<FarkasAnswer> = reps
        .par_iter()
        .map(|&i| cone_member(&rays[i], &curves))
        .collect::<Result<Vec<_>, KernelError>>()?;
    for (&i, ans) in reps.iter().zip(&member) {
        if let FarkasAnswer::Separator(y) = ans {
            let sep = match cone_member(y, &divisors)? {
                FarkasAnswer::Separator(s) => s,
                FarkasAnswer::Combination(_) => {
                    return Err(EngineError::Kernel(KernelError::Unsound(
                        "separator of a dual ray lies in cone(D)".into(),
                    )))
                }
            };
            return Ok(Verdict::Refuted(Box::new(Counterexample::Dual(
                DualCounterexample {
                    q: rays[i].clone(),
                    divisor: y.clone(),
                    separator: sep,
                },
            ))));
        }
    }

    let mut faces = Vec::with_capacity(reps.len());
    for &i in &reps {
        let face = face_of(cat, &oracle, &rays[i])?;
        let fr = face_rays(&face, opts.dd)?;
        match certify_containment(cat, &face, &fr)? {
            Ok(cert) => faces.push(cert),
            Err(fail) => return Ok(Verdict::Refuted(Box::new(Counterexample::Face(fail)))),
        }
    }

    let elements = &acting.elements[..];
    let q_rays: Vec<QRay> = rays
        .iter()
        .zip(&owner)
        .map(|(r, &(rep, gi))| QRay {
            ray: r.clone(),
            rep,
            perm: elements[gi].action.perm.clone(),
        })
        .collect();
    let classification = classify(elements, &faces, &q_rays);
    Ok(Verdict::Verified(Box::new(TheoremCertificate {
        space: cat.id(),
        q_rays,
        faces,
        classification,
    })))
}

fn image_closure(elements: &[GroupElement], q: &QRay, rep: CurveSet) -> CurveSet {
    let g = elements
        .iter()
        .find(|g| g.action.perm == q.perm)
        .expect("perm from the same group");
    rep.map(&g.curve_perm)
}

/// Maximal faces among {F(q)} up to symmetry. F(q) ⊆ F(q') exactly when
/// I(F(q')) ⊆ I(F(q)).
fn classify(
    elements: &[GroupElement],
    faces: &[FaceCertificate],
    q_rays: &[QRay],
) -> CoveringClassification {
    let closures: Vec<CurveSet> = q_rays
        .iter()
        .map(|q| image_closure(elements, q, faces[q.rep].face.closure))
        .collect();
    let distinct: BTreeSet<CurveSet> = closures.iter().copied().collect();
    let minimal: Vec<CurveSet> = distinct
        .iter()
        .copied()
        .filter(|&k| !distinct.iter().any(|&o| o != k && o.is_subset(k)))
        .collect();
    // Orbit classes of minimal closures, keyed by the representative of the first Q-ray
    // realizing them.
    let mut class_of_rep: BTreeMap<usize, usize> = BTreeMap::new();
    let mut representatives = Vec::new();
    let mut orbit_sizes = Vec::new();
    for (i, q) in q_rays.iter().enumerate() {
        if minimal.contains(&closures[i]) && !class_of_rep.contains_key(&q.rep) {
            class_of_rep.insert(q.rep, representatives.len());
            representatives.push(faces[q.rep].face.curve.clone());
            orbit_sizes.push(q_rays.iter().filter(|o| o.rep == q.rep).count());
        }
    }
    let assignment = closures
        .iter()
        .map(|&k| {
            let (j, _) = q_rays
                .iter()
                .enumerate()
                .find(|(j, o)| class_of_rep.contains_key(&o.rep) && closures[*j].is_subset(k))
                .expect("some maximal face contains every face");
            class_of_rep[&q_rays[j].rep]
        })
        .collect();
    CoveringClassification {
        representatives,
        orbit_sizes,
        assignment,
    }
}

/// Whether every Q-ray face lies in F(σs) for some given class s and group element σ.
/// Returns, per Q-ray, the index of a covering class or `None`.
pub fn covered_by(
    cat: &Catalog,
    group: &Group,
    cert: &TheoremCertificate,
    classes: &[Vector],
) -> Result<Vec<Option<usize>>, EngineError> {
    let oracle = FaceOracle::new(cat);
    let mut supports = Vec::new();
    for (k, s) in classes.iter().enumerate() {
        let v = s.to_i64s().ok_or(EngineError::NotInCone)?;
        for img in group.curve_class_orbit(&v) {
            supports.push((k, oracle.support(&img).ok_or(EngineError::NotInCone)?));
        }
    }
    let elements = if cert
        .q_rays
        .iter()
        .all(|q| q.perm == group.elements[0].action.perm)
    {
        &group.elements[..1]
    } else {
        &group.elements[..]
    };
    Ok(cert
        .q_rays
        .iter()
        .map(|q| {
            let k = image_closure(elements, q, cert.faces[q.rep].face.closure);
            supports
                .iter()
                .find(|(_, s)| s.is_subset(k))
                .map(|(c, _)| *c)
        })
        .collect())
}

/// Convenience for curve classes written in the catalog notation.
pub fn parse_curves(cat: &Catalog, names: &[&str]) -> Result<Vec<Vector>, EngineError> {
    names
        .iter()
        .map(|n| {
            let v = cat.space.parse_class(n).map_err(EngineError::Catalog)?;
            if v.basis != cat.space.curve_basis_id() {
                return Err(EngineError::Hypothesis(format!("{n} is not a curve class")));
            }
            Ok(v)
        })
        .collect()
}

/// Pairing of a divisor generator with a curve, exact.
pub fn pair_divisor(cat: &Catalog, d: usize, c: &Vector) -> Scalar {
    pair(&cat.divisors[d].class, c).expect("divisor and curve bases are dual")
}
