//! Does a subset of negative curves generate a nonzero class nonnegative on 𝒟?

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::catalog::Catalog;
use crate::kernel::farkas::{cone_member_raw, RawAnswer};
use crate::kernel::scalar::{int, normalize_weights};
use crate::kernel::{rref_positive, Scalar, Vector};

/// A nonnegative combination of curves whose sum pairs nonnegatively with every divisor generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QNefCertificate {
    pub curve: Vector,
    /// Positive weights keyed by curve id.
    pub weights: BTreeMap<usize, Scalar>,
}

impl QNefCertificate {
    fn from_weights(cat: &Catalog, ids: &[usize], w: &[Scalar]) -> QNefCertificate {
        let w = normalize_weights(w);
        let mut curve = Vector::zero(cat.space.curve_basis_id());
        let mut weights = BTreeMap::new();
        for (&c, x) in ids.iter().zip(&w) {
            if x.is_zero() {
                continue;
            }
            curve = curve.add(&cat.curves[c].class.scale(x));
            weights.insert(c, x.clone());
        }
        QNefCertificate { curve, weights }
    }

    /// Re-checks the sum and the pairing signs by direct arithmetic.
    pub fn verify(&self, cat: &Catalog) -> bool {
        if self.weights.is_empty() || self.weights.values().any(|w| !w.is_positive()) {
            return false;
        }
        let mut sum = Vector::zero(cat.space.curve_basis_id());
        for (&c, w) in &self.weights {
            if c >= cat.curves.len() {
                return false;
            }
            sum = sum.add(&cat.curves[c].class.scale(w));
        }
        sum == self.curve
            && !sum.is_zero()
            && cat.divisors.iter().all(|d| {
                !crate::kernel::pair(&d.class, &sum)
                    .map(|v| v.is_negative())
                    .unwrap_or(true)
            })
    }
}

/// Whether the curves of `ids` sweep pairwise distinct divisors.
pub fn distinct_sweeps(cat: &Catalog, ids: &[usize]) -> bool {
    let mut seen = Vec::with_capacity(ids.len());
    for &c in ids {
        let d = cat.curves[c].swept;
        if seen.contains(&d) {
            return false;
        }
        seen.push(d);
    }
    true
}

/// `A_I = [(D_i . c_j)]`: rows are the swept divisors of `ids`, columns the curves.
pub fn pairing_matrix(cat: &Catalog, ids: &[usize]) -> Vec<Vec<Scalar>> {
    ids.iter()
        .map(|&r| {
            ids.iter()
                .map(|&c| int(cat.pair(cat.curves[r].swept, c)))
                .collect()
        })
        .collect()
}

/// q-nef test by positive row reduction of the transposed pairing matrix.
/// Only meaningful when the sign pattern holds and the sweeps are distinct.
pub fn qnef_rref(cat: &Catalog, ids: &[usize]) -> Option<QNefCertificate> {
    let a = pairing_matrix(cat, ids);
    let at: Vec<Vec<Scalar>> = (0..ids.len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect();
    let found = rref_positive(&at)?;
    Some(QNefCertificate::from_weights(cat, ids, &found.weights))
}

/// q-nef test as a feasibility problem: weights `x >= 0`, `Σ x = 1`, `Σ x_j (D . c_j) >= 0` for all D.
pub fn qnef_lp(cat: &Catalog, ids: &[usize]) -> Option<QNefCertificate> {
    let nd = cat.divisors.len();
    let mut gens: Vec<Vec<Scalar>> = Vec::with_capacity(ids.len() + nd);
    for &c in ids {
        let mut g: Vec<Scalar> = (0..nd).map(|d| int(cat.pair(d, c))).collect();
        g.push(int(1));
        gens.push(g);
    }
    for d in 0..nd {
        let mut g = vec![Scalar::zero(); nd + 1];
        g[d] = int(-1);
        gens.push(g);
    }
    let mut target = vec![Scalar::zero(); nd + 1];
    target[nd] = int(1);
    let refs: Vec<&[Scalar]> = gens.iter().map(Vec::as_slice).collect();
    match cone_member_raw(&target, &refs).expect("q-nef LP re-verifies") {
        RawAnswer::Combination(w) => Some(QNefCertificate::from_weights(cat, ids, &w[..ids.len()])),
        RawAnswer::Separator(_) => None,
    }
}

/// q-nef generation test: the row-reduction criterion when it applies, the LP otherwise.
pub fn qnef_generate(cat: &Catalog, ids: &[usize]) -> Option<QNefCertificate> {
    if ids.is_empty() {
        return None;
    }
    let cert = if cat.sign_pattern_ok() && distinct_sweeps(cat, ids) {
        qnef_rref(cat, ids)
    } else {
        qnef_lp(cat, ids)
    };
    debug_assert!(cert.as_ref().is_none_or(|c| c.verify(cat)));
    cert
}

/// A generating subset is nef-minimal when none of its maximal proper subsets generates.
pub fn nef_minimal_check(cat: &Catalog, ids: &[usize]) -> bool {
    if qnef_generate(cat, ids).is_none() {
        return false;
    }
    (0..ids.len()).all(|skip| {
        let sub: Vec<usize> = ids
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &c)| c)
            .collect();
        qnef_generate(cat, &sub).is_none()
    })
}
