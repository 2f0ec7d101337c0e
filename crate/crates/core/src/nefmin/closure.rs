//! Vanishing closures I(F(I)) and covering tests.
//!
//! A curve c' vanishes on the face F(V) = 𝔐 ∩ V^⊥ exactly when -c' lies in the cone
//! generated by 𝒞 ∪ -V. Candidates are tested together: the aggregate target
//! -Σ c' either lies in that cone, settling every candidate at once, or a separator
//! is returned. Any separator is a point of F(V), so every candidate pairing
//! positively with it is excluded and the test repeats on the rest.

use std::fmt;
use std::sync::RwLock;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::catalog::Catalog;
use crate::error::EngineError;
use crate::kernel::farkas::{cone_member_raw, RawAnswer};
use crate::kernel::scalar::int;
use crate::kernel::Scalar;

/// A set of curve ids, for catalogs of at most 128 curves.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveSet(pub u128);

impl CurveSet {
    pub const EMPTY: CurveSet = CurveSet(0);

    pub fn from_ids(ids: &[usize]) -> CurveSet {
        CurveSet(ids.iter().fold(0u128, |acc, &i| acc | 1 << i))
    }

    pub fn all(count: usize) -> CurveSet {
        if count >= 128 {
            CurveSet(u128::MAX)
        } else {
            CurveSet((1u128 << count) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn with(self, i: usize) -> CurveSet {
        CurveSet(self.0 | 1 << i)
    }

    pub fn is_subset(self, other: CurveSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: CurveSet) -> CurveSet {
        CurveSet(self.0 | other.0)
    }

    pub fn minus(self, other: CurveSet) -> CurveSet {
        CurveSet(self.0 & !other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn ids(self) -> Vec<usize> {
        (0..128).filter(|&i| self.contains(i)).collect()
    }

    /// Image under a permutation of curve ids.
    pub fn map(self, perm: &[usize]) -> CurveSet {
        let mut out = CurveSet::EMPTY;
        for i in self.ids() {
            out.insert(perm[i]);
        }
        out
    }
}

impl fmt::Debug for CurveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ids()).finish()
    }
}

const POOL_LIMIT: usize = 4096;

/// Closure computations for one catalog, with a pool of known points of 𝔐 used to
/// exclude candidates cheaply. The pool only affects speed, never answers.
pub struct FaceOracle<'a> {
    cat: &'a Catalog,
    rows: Vec<Vec<Scalar>>,
    pool: RwLock<Vec<Vec<i64>>>,
}

fn idot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> FaceOracle<'a> {
    pub fn new(cat: &'a Catalog) -> Self {
        let rows = (0..cat.curves.len())
            .map(|c| cat.curve_ints(c).iter().map(|&x| int(x)).collect())
            .collect();
        FaceOracle {
            cat,
            rows,
            pool: RwLock::new(Vec::new()),
        }
    }

    pub fn catalog(&self) -> &'a Catalog {
        self.cat
    }

    /// Raw coordinates of all curves, in catalog order.
    pub fn curve_rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    /// I(F(I)) for a set of catalog curves.
    pub fn closure_of_set(&self, set: CurveSet) -> CurveSet {
        let vs: Vec<Vec<i64>> = set
            .ids()
            .iter()
            .map(|&c| self.cat.curve_ints(c).to_vec())
            .collect();
        self.closure_general(&vs, set)
    }

    /// I(F(c)) for a class c in the cone spanned by 𝒞.
    pub fn closure_of_curve(&self, v: &[i64]) -> Result<CurveSet, EngineError> {
        if v.iter().all(|&x| x == 0) {
            return Err(EngineError::ZeroCurve);
        }
        let target: Vec<Scalar> = v.iter().map(|&x| int(x)).collect();
        if !self.member(&target, CurveSet::all(self.cat.curves.len())) {
            return Err(EngineError::NotInCone);
        }
        Ok(self.closure_general(&[v.to_vec()], CurveSet::EMPTY))
    }

    fn closure_general(&self, vs: &[Vec<i64>], known: CurveSet) -> CurveSet {
        let n = self.cat.curves.len();
        let mut cand = CurveSet::all(n).minus(known);
        {
            let pool = self.pool.read().expect("pool lock");
            for y in pool.iter() {
                if cand.is_empty() {
                    break;
                }
                if vs.iter().all(|v| idot(y, v) == 0) {
                    for k in cand.ids() {
                        if idot(y, self.cat.curve_ints(k)) > 0 {
                            cand.remove(k);
                        }
                    }
                }
            }
        }
        let neg_v: Vec<Vec<Scalar>> = vs
            .iter()
            .map(|v| v.iter().map(|&x| int(-x)).collect())
            .collect();
        while !cand.is_empty() {
            let mut target = vec![Scalar::zero(); self.cat.rank()];
            for k in cand.ids() {
                for (t, x) in target.iter_mut().zip(self.cat.curve_ints(k)) {
                    *t -= int(*x);
                }
            }
            let gens: Vec<&[Scalar]> = self
                .rows
                .iter()
                .map(Vec::as_slice)
                .chain(neg_v.iter().map(Vec::as_slice))
                .collect();
            match cone_member_raw(&target, &gens).expect("closure LP re-verifies") {
                RawAnswer::Combination(_) => break,
                RawAnswer::Separator(y) => {
                    let before = cand;
                    for k in cand.ids() {
                        let s: Scalar = y.iter().zip(&self.rows[k]).map(|(a, b)| a * b).sum();
                        if s.is_positive() {
                            cand.remove(k);
                        }
                    }
                    debug_assert!(cand != before, "separator excludes a candidate");
                    self.remember(&y);
                }
            }
        }
        known.union(cand)
    }

    fn remember(&self, y: &[Scalar]) {
        let Some(ints) = y
            .iter()
            .map(|x| {
                if x.is_integer() {
                    x.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect::<Option<Vec<i64>>>()
        else {
            return;
        };
        let mut pool = self.pool.write().expect("pool lock");
        if pool.len() < POOL_LIMIT && !pool.contains(&ints) {
            pool.push(ints);
        }
    }

    /// Whether `target` lies in the cone of the given curves.
    pub fn member(&self, target: &[Scalar], set: CurveSet) -> bool {
        let gens: Vec<&[Scalar]> = set.ids().iter().map(|&c| self.rows[c].as_slice()).collect();
        cone_member_raw(target, &gens)
            .expect("membership LP re-verifies")
            .is_member()
    }

    /// Support of one positive decomposition of `v` over 𝒞, if `v` lies in that cone.
    pub fn support(&self, v: &[i64]) -> Option<CurveSet> {
        let target: Vec<Scalar> = v.iter().map(|&x| int(x)).collect();
        let gens: Vec<&[Scalar]> = self.rows.iter().map(Vec::as_slice).collect();
        match cone_member_raw(&target, &gens).expect("membership LP re-verifies") {
            RawAnswer::Combination(w) => Some(CurveSet::from_ids(
                &(0..w.len())
                    .filter(|&i| !w[i].is_zero())
                    .collect::<Vec<_>>(),
            )),
            RawAnswer::Separator(_) => None,
        }
    }

    /// `c` covers `I` when the closure of `I` generates `c`.
    pub fn covers(&self, c: &[i64], set: CurveSet) -> bool {
        let target: Vec<Scalar> = c.iter().map(|&x| int(x)).collect();
        self.member(&target, self.closure_of_set(set))
    }

    /// Brute-force closure: one membership test per curve. Used as a test oracle.
    pub fn closure_by_single_tests(&self, vs: &[Vec<i64>]) -> CurveSet {
        let neg_v: Vec<Vec<Scalar>> = vs
            .iter()
            .map(|v| v.iter().map(|&x| int(-x)).collect())
            .collect();
        let gens: Vec<&[Scalar]> = self
            .rows
            .iter()
            .map(Vec::as_slice)
            .chain(neg_v.iter().map(Vec::as_slice))
            .collect();
        let mut out = CurveSet::EMPTY;
        for c in 0..self.cat.curves.len() {
            let target: Vec<Scalar> = self.rows[c].iter().map(|x| -x).collect();
            if cone_member_raw(&target, &gens)
                .expect("membership LP re-verifies")
                .is_member()
            {
                out.insert(c);
            }
        }
        out
    }

    /// Number of pooled points of 𝔐 (diagnostics only).
    pub fn pool_size(&self) -> usize {
        self.pool.read().map(|p| p.len()).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_set_basics() {
        let s = CurveSet::from_ids(&[3, 94, 0]);
        assert_eq!(s.ids(), vec![0, 3, 94]);
        assert!(CurveSet::from_ids(&[3]).is_subset(s));
        assert_eq!(CurveSet::all(95).len(), 95);
    }

    #[test]
    fn empty_closure_is_empty() {
        let cat = Catalog::standard(6).unwrap();
        let f = FaceOracle::new(&cat);
        assert!(f.closure_of_set(CurveSet::EMPTY).is_empty());
    }

    #[test]
    fn m05_closure_of_h_minus_e3() {
        let cat = Catalog::standard(5).unwrap();
        let f = FaceOracle::new(&cat);
        let v = crate::catalog::int_coords(&cat.space.parse_class("l-e3").unwrap());
        let cl = f.closure_of_curve(&v).unwrap();
        for name in ["e0", "e1", "e2", "l-e0-e3", "l-e1-e3", "l-e2-e3"] {
            assert!(cl.contains(cat.curve_id(name).unwrap()), "{name}");
        }
        assert_eq!(cl, f.closure_by_single_tests(&[v]));
    }

    #[test]
    fn aggregate_matches_single_tests_on_m06() {
        let cat = Catalog::standard(6).unwrap();
        let f = FaceOracle::new(&cat);
        let i = CurveSet::from_ids(&[
            cat.curve_id("e23").unwrap(),
            cat.curve_id("l-e1-e23").unwrap(),
        ]);
        let vs: Vec<Vec<i64>> = i
            .ids()
            .iter()
            .map(|&c| cat.curve_ints(c).to_vec())
            .collect();
        assert_eq!(f.closure_of_set(i), f.closure_by_single_tests(&vs));
    }

    #[test]
    fn covering_examples() {
        let cat = Catalog::standard(6).unwrap();
        let f = FaceOracle::new(&cat);
        let i = CurveSet::from_ids(&[
            cat.curve_id("e23").unwrap(),
            cat.curve_id("l-e1-e23").unwrap(),
        ]);
        let l_e1 = crate::catalog::int_coords(&cat.space.parse_class("l-e1").unwrap());
        let l_e2 = crate::catalog::int_coords(&cat.space.parse_class("l-e2").unwrap());
        assert!(f.covers(&l_e1, i));
        assert!(!f.covers(&l_e2, i));
    }
}
