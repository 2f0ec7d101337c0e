//! JSON certificates and their independent re-verification.
//!
//! Integers are written as JSON numbers, other rationals as `"p/q"` strings.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{
    build_space, int_coords, ActionSolver, Catalog, DivisorGen, DivisorLabel, InvariantCheck,
    LinearAction, NegativeCurve, SpaceId,
};
use crate::error::{CatalogError, EngineError};
use crate::face::{dual_rays, face_rays, Counterexample, Face, TheoremCertificate};
use crate::kernel::{
    cone_member, format_scalar, pair, parse_scalar, DdOptions, FarkasAnswer, InequalitySystem,
};
use crate::kernel::{Scalar, Vector};
use crate::nefmin::{CurveSet, EnumerationReport, FaceOracle};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn from_scalar(s: &Scalar) -> Num {
        if s.is_integer() {
            if let Some(v) = s.numer().to_i64() {
                return Num::Int(v);
            }
        }
        Num::Text(format_scalar(s))
    }

    pub fn to_scalar(&self) -> Result<Scalar, CertError> {
        match self {
            Num::Int(v) => Ok(Scalar::from_integer((*v).into())),
            Num::Text(t) => parse_scalar(t).map_err(|e| CertError::Malformed(e.to_string())),
        }
    }
}

pub fn nums(v: &Vector) -> Vec<Num> {
    v.coords.iter().map(Num::from_scalar).collect()
}

fn nums_i(v: &[i64]) -> Vec<Num> {
    v.iter().map(|&x| Num::Int(x)).collect()
}

fn vector(v: &[Num], basis: crate::kernel::BasisId) -> Result<Vector, CertError> {
    if v.len() != basis.dim {
        return Err(CertError::Malformed(format!(
            "vector of length {} in dimension {}",
            v.len(),
            basis.dim
        )));
    }
    Ok(Vector::new(
        v.iter().map(Num::to_scalar).collect::<Result<_, _>>()?,
        basis,
    ))
}

/// Format and crate versions stamped into every artifact.
pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("format".to_string(), FORMAT_VERSION.to_string()),
        (
            "negcone-core".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        ),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub divisors: Vec<String>,
    pub curves: Vec<String>,
    /// Diagonal of the pairing: `D · c = Σ signature_i D_i c_i`.
    pub signature: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorDoc {
    pub name: String,
    pub class: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub class: Vec<Num>,
    pub swept: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorsDoc {
    pub divisors: Vec<DivisorDoc>,
    pub curves: Vec<CurveDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QRayDoc {
    pub ray: Vec<Num>,
    pub rep: usize,
    pub perm: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    pub id: usize,
    pub weight: Num,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceDoc {
    pub curve: Vec<Num>,
    /// Positive combination of negative curves equal to `curve`.
    pub curve_combination: Vec<Weight>,
    pub closure: Vec<usize>,
    pub rays: Vec<Vec<Num>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationDoc {
    pub representatives: Vec<Vec<Num>>,
    pub names: Vec<String>,
    pub orbit_sizes: Vec<usize>,
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefminDoc {
    pub criteria: String,
    pub orbit_pruning: bool,
    pub max_size: usize,
    pub covering_classes: Vec<String>,
    pub nef_minimal_classes: usize,
    pub uncovered: Vec<Vec<String>>,
    pub all_covered: bool,
    pub ledger_edges: Option<usize>,
    pub ledger_acyclic: Option<bool>,
}

impl NefminDoc {
    pub fn from_report(cat: &Catalog, r: &EnumerationReport) -> NefminDoc {
        NefminDoc {
            criteria: r.criteria.to_string(),
            orbit_pruning: r.orbit_pruning,
            max_size: r.max_size,
            covering_classes: r
                .covering_classes
                .iter()
                .map(|c| cat.space.format_class(c))
                .collect(),
            nef_minimal_classes: r.subsets.len(),
            uncovered: r
                .uncovered
                .iter()
                .map(|ids| ids.iter().map(|&c| cat.curve_name(c)).collect())
                .collect(),
            all_covered: r.all_covered(),
            ledger_edges: r.ledger.as_ref().map(|l| l.edges.len()),
            ledger_acyclic: r.ledger.as_ref().map(|l| l.acyclic),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub space: SpaceId,
    pub basis: BasisDoc,
    pub generators: GeneratorsDoc,
    pub q_rays: Vec<QRayDoc>,
    pub faces: Vec<FaceDoc>,
    /// Per face, per ray: nonnegative divisor weights summing to the ray.
    pub memberships: Vec<Vec<Vec<Weight>>>,
    pub classification: ClassificationDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nefmin: Option<NefminDoc>,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
}

fn basis_doc(cat: &Catalog) -> BasisDoc {
    BasisDoc {
        divisors: cat.space.divisor_basis.clone(),
        curves: cat.space.curve_basis.clone(),
        signature: (0..cat.rank())
            .map(|i| cat.space.divisor_basis_id().sign(i) as i64)
            .collect(),
    }
}

fn generators_doc(cat: &Catalog) -> GeneratorsDoc {
    GeneratorsDoc {
        divisors: (0..cat.divisors.len())
            .map(|d| DivisorDoc {
                name: cat.divisors[d].name.clone(),
                class: nums_i(cat.divisor_ints(d)),
            })
            .collect(),
        curves: (0..cat.curves.len())
            .map(|c| CurveDoc {
                class: nums_i(cat.curve_ints(c)),
                swept: cat.curves[c].swept,
            })
            .collect(),
    }
}

fn weights(w: &BTreeMap<usize, Scalar>) -> Vec<Weight> {
    w.iter()
        .map(|(&id, x)| Weight {
            id,
            weight: Num::from_scalar(x),
        })
        .collect()
}

/// Serializable form of a theorem certificate.
pub fn build_certificate(
    cat: &Catalog,
    cert: &TheoremCertificate,
    nefmin: Option<NefminDoc>,
    seed: u64,
) -> Result<CertificateFile, EngineError> {
    let curves = cat.curve_vectors();
    let mut faces = Vec::with_capacity(cert.faces.len());
    for f in &cert.faces {
        let combo = match cone_member(&f.face.curve, &curves)? {
            FarkasAnswer::Combination(w) => weights(&w),
            FarkasAnswer::Separator(_) => return Err(EngineError::NotInCone),
        };
        faces.push(FaceDoc {
            curve: nums(&f.face.curve),
            curve_combination: combo,
            closure: f.face.closure.ids(),
            rays: f.rays.iter().map(nums).collect(),
        });
    }
    let class = &cert.classification;
    Ok(CertificateFile {
        space: cat.id(),
        basis: basis_doc(cat),
        generators: generators_doc(cat),
        q_rays: cert
            .q_rays
            .iter()
            .map(|q| QRayDoc {
                ray: nums(&q.ray),
                rep: q.rep,
                perm: q.perm.clone(),
            })
            .collect(),
        faces,
        memberships: cert
            .faces
            .iter()
            .map(|f| f.memberships.iter().map(weights).collect())
            .collect(),
        classification: ClassificationDoc {
            representatives: class.representatives.iter().map(nums).collect(),
            names: class
                .representatives
                .iter()
                .map(|r| cat.space.format_class(r))
                .collect(),
            orbit_sizes: class.orbit_sizes.clone(),
            assignment: class.assignment.clone(),
        },
        nefmin,
        seed,
        versions: versions(),
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("certificate catalog differs from the catalog in use: {0}")]
    CatalogMismatch(String),
    #[error("certificate does not verify: {0}")]
    Invalid(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn invalid(msg: impl Into<String>) -> CertError {
    CertError::Invalid(msg.into())
}

/// Rebuilds the catalog written into a certificate.
pub fn catalog_of(file: &CertificateFile) -> Result<Catalog, CertError> {
    let space = build_space(file.space.n())?;
    if file.basis.divisors != space.divisor_basis || file.basis.curves != space.curve_basis {
        return Err(CertError::Malformed(
            "basis labels do not match the space".into(),
        ));
    }
    let divisors = file
        .generators
        .divisors
        .iter()
        .map(|d| {
            Ok(DivisorGen {
                class: vector(&d.class, space.divisor_basis_id())?,
                label: DivisorLabel::Other(d.name.clone()),
                name: d.name.clone(),
            })
        })
        .collect::<Result<Vec<_>, CertError>>()?;
    let curves = file
        .generators
        .curves
        .iter()
        .map(|c| {
            Ok(NegativeCurve {
                class: vector(&c.class, space.curve_basis_id())?,
                swept: c.swept,
                family: String::new(),
            })
        })
        .collect::<Result<Vec<_>, CertError>>()?;
    Ok(Catalog::from_parts(space, curves, divisors)?)
}

fn ray_key(v: &Vector) -> Vec<i64> {
    int_coords(&v.primitive())
}

/// Re-verifies a certificate from scratch against `cat`: the dual rays are recomputed,
/// each orbit map is checked to preserve the catalogs, each face closure is recomputed
/// one curve at a time, each face's rays are recomputed, every membership combination
/// is summed, and every Q-ray face is checked to lie in a face of a listed class.
pub fn check_certificate(file: &CertificateFile, cat: &Catalog) -> Result<String, CertError> {
    let own = catalog_of(file)?;
    if own.id() != cat.id()
        || own.curves.len() != cat.curves.len()
        || own.divisors.len() != cat.divisors.len()
        || (0..cat.curves.len()).any(|c| {
            own.curve_ints(c) != cat.curve_ints(c) || own.curves[c].swept != cat.curves[c].swept
        })
        || (0..cat.divisors.len()).any(|d| own.divisor_ints(d) != cat.divisor_ints(d))
    {
        return Err(CertError::CatalogMismatch("generators differ".into()));
    }
    if !cat.sign_pattern_ok() {
        return Err(invalid("catalog sign pattern fails"));
    }
    let cb = cat.space.curve_basis_id();

    // Q-rays: exactly the extreme rays of the dual of cone(D).
    let q: Vec<Vector> = file
        .q_rays
        .iter()
        .map(|r| vector(&r.ray, cb))
        .collect::<Result<_, _>>()?;
    let listed: BTreeSet<Vec<i64>> = q.iter().map(ray_key).collect();
    let fresh: BTreeSet<Vec<i64>> = dual_rays(cat, DdOptions::default())?
        .iter()
        .map(ray_key)
        .collect();
    if listed != fresh || listed.len() != q.len() {
        return Err(invalid(format!(
            "{} listed dual rays, {} recomputed",
            q.len(),
            fresh.len()
        )));
    }

    // Faces of the orbit representatives.
    let curves = cat.curve_vectors();
    let oracle = FaceOracle::new(cat);
    if file.memberships.len() != file.faces.len() {
        return Err(CertError::Malformed(
            "membership list does not match faces".into(),
        ));
    }
    let checked = file
        .faces
        .par_iter()
        .zip(&file.memberships)
        .enumerate()
        .map(|(fi, (f, members))| check_face(cat, &oracle, &curves, fi, f, members))
        .collect::<Result<Vec<_>, CertError>>()?;
    let (face_curves, closures): (Vec<Vector>, Vec<CurveSet>) = checked.into_iter().unzip();

    // Orbit maps: each permutation preserves both catalogs and carries its
    // representative's curve onto the ray.
    let solver = ActionSolver::new(&cat.space)?;
    let perms: BTreeSet<&Vec<u8>> = file.q_rays.iter().map(|d| &d.perm).collect();
    let maps: HashMap<&Vec<u8>, (LinearAction, Vec<usize>)> = perms
        .into_par_iter()
        .map(|perm| {
            let action = solver.action(perm)?;
            let curve_map: Vec<usize> = (0..cat.curves.len())
                .map(|c| cat.find_curve(&action.apply_curve(cat.curve_ints(c))))
                .collect::<Option<_>>()
                .ok_or_else(|| {
                    invalid(format!("permutation {perm:?} does not preserve the curves"))
                })?;
            if (0..cat.divisors.len()).any(|d| {
                cat.find_divisor(&action.apply_divisor(cat.divisor_ints(d)))
                    .is_none()
            }) {
                return Err(invalid(format!(
                    "permutation {perm:?} does not preserve the divisors"
                )));
            }
            Ok((perm, (action, curve_map)))
        })
        .collect::<Result<_, CertError>>()?;
    let mut ray_closures = Vec::with_capacity(q.len());
    for (r, doc) in q.iter().zip(&file.q_rays) {
        if doc.rep >= face_curves.len() {
            return Err(invalid("Q-ray refers to a missing face"));
        }
        let (action, curve_map) = &maps[&doc.perm];
        if !action.apply(&face_curves[doc.rep]).same_ray(r) {
            return Err(invalid(
                "permutation does not carry the representative to the ray",
            ));
        }
        ray_closures.push(closures[doc.rep].map(curve_map));
    }

    // Classification: each F(q) lies in F of an image of its assigned class.
    let c = &file.classification;
    if c.assignment.len() != q.len() || c.orbit_sizes.len() != c.representatives.len() {
        return Err(CertError::Malformed("classification lengths".into()));
    }
    let reps: Vec<Vector> = c
        .representatives
        .iter()
        .map(|r| vector(r, cb))
        .collect::<Result<_, _>>()?;
    let mut images: Vec<Vec<CurveSet>> = vec![Vec::new(); reps.len()];
    for (i, doc) in file.q_rays.iter().enumerate() {
        if let Some(k) = reps.iter().position(|r| r.same_ray(&face_curves[doc.rep])) {
            images[k].push(ray_closures[i]);
        }
    }
    for (k, imgs) in images.iter().enumerate() {
        if imgs.len() != c.orbit_sizes[k] {
            return Err(invalid(format!(
                "class {k}: orbit size {} but {} rays",
                c.orbit_sizes[k],
                imgs.len()
            )));
        }
    }
    for (i, &k) in c.assignment.iter().enumerate() {
        if k >= reps.len() || !images[k].iter().any(|img| img.is_subset(ray_closures[i])) {
            return Err(invalid(format!(
                "Q-ray {i} is not covered by its assigned class"
            )));
        }
    }
    let total: usize = file.memberships.iter().map(Vec::len).sum();
    Ok(format!(
        "{}: {} dual rays, {} face representatives, {} membership combinations, {} covering classes",
        file.space,
        q.len(),
        file.faces.len(),
        total,
        reps.len()
    ))
}

fn check_face(
    cat: &Catalog,
    oracle: &FaceOracle,
    curves: &[Vector],
    fi: usize,
    f: &FaceDoc,
    members: &[Vec<Weight>],
) -> Result<(Vector, CurveSet), CertError> {
    let cb = cat.space.curve_basis_id();
    let db = cat.space.divisor_basis_id();
    let curve = vector(&f.curve, cb)?;
    let mut sum = Vector::zero(cb);
    for w in &f.curve_combination {
        let x = w.weight.to_scalar()?;
        if w.id >= curves.len() || x.is_negative() {
            return Err(invalid(format!("face {fi}: bad curve weight")));
        }
        sum = sum.add(&curves[w.id].scale(&x));
    }
    if sum != curve || curve.is_zero() {
        return Err(invalid(format!(
            "face {fi}: curve combination does not sum to the curve"
        )));
    }
    let ints = curve
        .to_i64s()
        .ok_or_else(|| invalid("face curve is not integral"))?;
    let closure = oracle.closure_by_single_tests(&[ints]);
    if f.closure.iter().any(|&c| c >= curves.len()) || closure != CurveSet::from_ids(&f.closure) {
        return Err(invalid(format!("face {fi}: vanishing closure differs")));
    }
    let mut system = InequalitySystem::new(cb);
    for (c, cv) in curves.iter().enumerate() {
        if closure.contains(c) {
            system.equalities.push(cv.clone());
        } else {
            system.inequalities.push(cv.clone());
        }
    }
    system.equalities.push(curve.clone());
    let face = Face {
        curve: curve.clone(),
        closure,
        system,
    };
    let rays: Vec<Vector> = f
        .rays
        .iter()
        .map(|r| vector(r, db))
        .collect::<Result<_, _>>()?;
    let got: BTreeSet<Vec<i64>> = rays.iter().map(ray_key).collect();
    let want: BTreeSet<Vec<i64>> = face_rays(&face, DdOptions::default())?
        .iter()
        .map(ray_key)
        .collect();
    if got != want {
        return Err(invalid(format!(
            "face {fi}: {} listed rays, {} recomputed",
            got.len(),
            want.len()
        )));
    }
    if members.len() != rays.len() {
        return Err(invalid(format!(
            "face {fi}: one membership per ray expected"
        )));
    }
    for (ray, m) in rays.iter().zip(members) {
        let mut sum = Vector::zero(db);
        for w in m {
            let x = w.weight.to_scalar()?;
            if w.id >= cat.divisors.len() || x.is_negative() {
                return Err(invalid(format!("face {fi}: bad divisor weight")));
            }
            sum = sum.add(&cat.divisors[w.id].class.scale(&x));
        }
        if sum != *ray {
            return Err(invalid(format!(
                "face {fi}: a membership does not sum to its ray"
            )));
        }
    }
    Ok((curve, closure))
}

/// An explicit reason for a nonzero exit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleFile {
    pub space: SpaceId,
    /// `dual-ray`, `face-ray` or `catalog`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separator: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    pub explanation: String,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
}

pub fn counterexample_json(cat: &Catalog, cx: &Counterexample, seed: u64) -> CounterexampleFile {
    let (kind, curve, divisor, separator, explanation) = match cx {
        Counterexample::Dual(d) => (
            "dual-ray",
            &d.q,
            &d.divisor,
            &d.separator,
            "the curve is an extreme ray of the dual of cone(D) outside cone(C); the divisor pairs \
             nonnegatively with every negative curve and negatively with the curve, and the separator \
             shows it is not in cone(D)",
        ),
        Counterexample::Face(f) => (
            "face-ray",
            &f.curve,
            &f.ray,
            &f.separator,
            "the divisor is an extreme ray of the face cut out by the curve and the separator is \
             nonnegative on cone(D) but negative on the divisor",
        ),
    };
    CounterexampleFile {
        space: cat.id(),
        kind: kind.into(),
        curve: Some(nums(curve)),
        divisor: Some(nums(divisor)),
        separator: Some(nums(separator)),
        violations: Vec::new(),
        explanation: explanation.into(),
        seed,
        versions: versions(),
    }
}

pub fn catalog_violation_json(
    space: SpaceId,
    checks: &[InvariantCheck],
    seed: u64,
) -> CounterexampleFile {
    CounterexampleFile {
        space,
        kind: "catalog".into(),
        curve: None,
        divisor: None,
        separator: None,
        violations: checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect(),
        explanation: "the catalog fails a structural invariant".into(),
        seed,
        versions: versions(),
    }
}

impl CounterexampleFile {
    /// Re-checks a divisor counterexample by direct arithmetic: the divisor pairs
    /// nonnegatively with every negative curve (dual-ray kind) or lies on the claimed
    /// face (face-ray kind), and the separator is nonnegative on cone(D) and negative on
    /// the divisor.
    pub fn verify(&self, cat: &Catalog) -> Result<bool, CertError> {
        let (Some(c), Some(d), Some(s)) = (&self.curve, &self.divisor, &self.separator) else {
            return Ok(!self.violations.is_empty());
        };
        let cb = cat.space.curve_basis_id();
        let db = cat.space.divisor_basis_id();
        let (c, d, s) = (vector(c, cb)?, vector(d, db)?, vector(s, cb)?);
        let p = |a: &Vector, b: &Vector| pair(a, b).map_err(|e| CertError::Engine(e.into()));
        let nonneg_on_curves = curves_nonneg(cat, &d)?;
        let sep_ok = p(&d, &s)?.is_negative()
            && cat
                .divisors
                .iter()
                .map(|g| p(&g.class, &s))
                .collect::<Result<Vec<_>, _>>()?
                .iter()
                .all(|x| !x.is_negative());
        let shape = match self.kind.as_str() {
            "dual-ray" => p(&d, &c)?.is_negative(),
            "face-ray" => p(&d, &c)?.is_zero(),
            _ => false,
        };
        Ok(nonneg_on_curves && sep_ok && shape)
    }
}

fn curves_nonneg(cat: &Catalog, d: &Vector) -> Result<bool, CertError> {
    for c in &cat.curves {
        if pair(d, &c.class)
            .map_err(|e| CertError::Engine(e.into()))?
            .is_negative()
        {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for text in ["0", "-7", "3/4", "-5/2", "123456789012345678901234567890"] {
            let s = parse_scalar(text).unwrap();
            let n = Num::from_scalar(&s);
            let json = serde_json::to_string(&n).unwrap();
            let back: Num = serde_json::from_str(&json).unwrap();
            assert_eq!(back.to_scalar().unwrap(), s);
        }
        assert_eq!(
            serde_json::to_string(&Num::from_scalar(&parse_scalar("3").unwrap())).unwrap(),
            "3"
        );
        assert_eq!(
            serde_json::to_string(&Num::from_scalar(&parse_scalar("1/2").unwrap())).unwrap(),
            "\"1/2\""
        );
    }
}
