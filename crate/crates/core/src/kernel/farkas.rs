//! Exact cone membership by phase-one simplex, with Farkas separators on failure.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::scalar::{big, primitive, Scalar};
use super::vector::{dot, FarkasAnswer, Vector};
use crate::error::KernelError;

/// Membership answer in raw Euclidean coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawAnswer {
    /// One weight per generator.
    Combination(Vec<Scalar>),
    /// `y` with `y . target < 0` and `y . g >= 0` for every generator `g`.
    Separator(Vec<Scalar>),
}

impl RawAnswer {
    pub fn is_member(&self) -> bool {
        matches!(self, RawAnswer::Combination(_))
    }
}

/// Decides whether `target` lies in the cone spanned by `generators`.
pub fn cone_member(target: &Vector, generators: &[Vector]) -> Result<FarkasAnswer, KernelError> {
    for g in generators {
        if g.basis != target.basis {
            return Err(KernelError::BasisMismatch {
                left: target.basis,
                right: g.basis,
            });
        }
    }
    let gens: Vec<&[Scalar]> = generators.iter().map(|g| g.coords.as_slice()).collect();
    Ok(match cone_member_raw(&target.coords, &gens)? {
        RawAnswer::Combination(w) => FarkasAnswer::Combination(
            w.into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        ),
        RawAnswer::Separator(y) => {
            let basis = target.basis.dual();
            let coords = y
                .into_iter()
                .enumerate()
                .map(|(i, v)| if basis.sign(i) < 0 { -v } else { v })
                .collect();
            FarkasAnswer::Separator(Vector::new(coords, basis))
        }
    })
}

/// Checks a Farkas answer against its inputs by direct arithmetic.
pub fn verify_answer(target: &Vector, generators: &[Vector], ans: &FarkasAnswer) -> bool {
    match ans {
        FarkasAnswer::Combination(w) => {
            let mut sum = vec![Scalar::zero(); target.dim()];
            for (&i, x) in w {
                if x.is_negative() || i >= generators.len() {
                    return false;
                }
                for (s, g) in sum.iter_mut().zip(&generators[i].coords) {
                    *s += x * g;
                }
            }
            sum == target.coords
        }
        FarkasAnswer::Separator(y) => {
            let Ok(t) = super::vector::pair(y, target) else {
                return false;
            };
            t.is_negative()
                && generators.iter().all(|g| {
                    super::vector::pair(y, g)
                        .map(|v| !v.is_negative())
                        .unwrap_or(false)
                })
        }
    }
}

fn verify_raw(target: &[Scalar], gens: &[&[Scalar]], ans: &RawAnswer) -> bool {
    match ans {
        RawAnswer::Combination(w) => {
            if w.len() != gens.len() || w.iter().any(Signed::is_negative) {
                return false;
            }
            let mut sum = vec![Scalar::zero(); target.len()];
            for (x, g) in w.iter().zip(gens) {
                if x.is_zero() {
                    continue;
                }
                for (s, gi) in sum.iter_mut().zip(g.iter()) {
                    *s += x * gi;
                }
            }
            sum.as_slice() == target
        }
        RawAnswer::Separator(y) => {
            dot(y, target).is_negative() && gens.iter().all(|g| !dot(y, g).is_negative())
        }
    }
}

/// Raw-coordinate membership test. The answer is re-verified before it is returned.
pub fn cone_member_raw(target: &[Scalar], gens: &[&[Scalar]]) -> Result<RawAnswer, KernelError> {
    let m = target.len();
    let n = gens.len();
    if target.iter().all(Zero::is_zero) {
        return Ok(RawAnswer::Combination(vec![Scalar::zero(); n]));
    }
    let flip: Vec<bool> = target.iter().map(Signed::is_negative).collect();
    let width = n + m;
    let mut tab: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width + 1);
            for g in gens {
                row.push(if flip[i] { -g[i].clone() } else { g[i].clone() });
            }
            for k in 0..m {
                row.push(if k == i {
                    Scalar::one()
                } else {
                    Scalar::zero()
                });
            }
            row.push(target[i].abs());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..width).collect();
    let mut z = vec![Scalar::zero(); width + 1];
    for row in &tab {
        for j in 0..n {
            z[j] -= &row[j];
        }
        z[width] -= &row[width];
    }

    loop {
        let Some(enter) = (0..width).find(|&j| z[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Scalar)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width] / &row[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // The phase-one objective is bounded below by zero, so a leaving row always exists.
        let (r, _) = leave.ok_or_else(|| KernelError::Unsound("unbounded phase one".into()))?;
        pivot(&mut tab, &mut z, r, enter);
        basis[r] = enter;
    }

    let ans = if z[width].is_zero() {
        let mut w = vec![Scalar::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                w[b] = tab[i][width].clone();
            }
        }
        RawAnswer::Combination(w)
    } else {
        let y: Vec<Scalar> = (0..m)
            .map(|i| {
                let pi = Scalar::one() - &z[n + i];
                if flip[i] {
                    pi
                } else {
                    -pi
                }
            })
            .collect();
        RawAnswer::Separator(primitive(&y).into_iter().map(big).collect())
    };
    if !verify_raw(target, gens, &ans) {
        return Err(KernelError::Unsound(
            "Farkas answer failed re-verification".into(),
        ));
    }
    Ok(ans)
}

fn pivot(tab: &mut [Vec<Scalar>], z: &mut [Scalar], r: usize, c: usize) {
    let inv = tab[r][c].recip();
    for x in tab[r].iter_mut() {
        if !x.is_zero() {
            *x *= &inv;
        }
    }
    let prow = tab[r].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for &j in &nz {
            row[j] -= &f * &prow[j];
        }
    }
    if !z[c].is_zero() {
        let f = z[c].clone();
        for &j in &nz {
            z[j] -= &f * &prow[j];
        }
    }
}

/// Membership over a subset of indices into a shared generator list; weights are re-indexed.
pub fn cone_member_indexed(
    target: &[Scalar],
    all: &[Vec<Scalar>],
    subset: &[usize],
) -> Result<RawAnswer, KernelError> {
    let gens: Vec<&[Scalar]> = subset.iter().map(|&i| all[i].as_slice()).collect();
    cone_member_raw(target, &gens)
}

/// Weights of a raw combination as a sparse map keyed by generator position.
pub fn sparse(weights: &[Scalar]) -> BTreeMap<usize, Scalar> {
    weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(i, w)| (i, w.clone()))
        .collect()
}
