//! Symmetric group action on N¹ and N₁, solved from the boundary dictionary.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::space::Space;
use super::{int_coords, Catalog};
use crate::error::CatalogError;
use crate::kernel::linalg::{self, Matrix};
use crate::kernel::{Scalar, Vector};

/// A permutation of the markings with its matrices on divisors and curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearAction {
    /// `perm[i - 1] = σ(i)`.
    pub perm: Vec<u8>,
    pub on_divisors: Vec<Vec<i64>>,
    pub on_curves: Vec<Vec<i64>>,
}

fn apply_int(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

impl LinearAction {
    pub fn apply_divisor(&self, v: &[i64]) -> Vec<i64> {
        apply_int(&self.on_divisors, v)
    }

    pub fn apply_curve(&self, v: &[i64]) -> Vec<i64> {
        apply_int(&self.on_curves, v)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let m = match v.basis.side {
            crate::kernel::Side::Primal => &self.on_divisors,
            crate::kernel::Side::Dual => &self.on_curves,
        };
        let coords = m
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v.coords)
                    .map(|(a, x)| Scalar::from_integer((*a).into()) * x)
                    .sum()
            })
            .collect();
        Vector::new(coords, v.basis)
    }
}

fn check_perm(space: &Space, perm: &[u8]) -> Result<(), CatalogError> {
    let mut seen: Vec<u8> = perm.to_vec();
    seen.sort_unstable();
    if seen != (1..=space.n as u8).collect::<Vec<_>>() {
        return Err(CatalogError::BadPermutation(format!("{perm:?}")));
    }
    Ok(())
}

fn image_label(space: &Space, perm: &[u8], label: &[u8]) -> Result<Vec<u8>, CatalogError> {
    let img: Vec<u8> = label.iter().map(|&i| perm[i as usize - 1]).collect();
    space.canonical_label(&img)
}

/// Boundary labels whose classes form a basis of N¹, chosen greedily in catalog order.
fn independent_labels(space: &Space) -> Vec<Vec<u8>> {
    let mut chosen: Vec<Vec<u8>> = Vec::new();
    let mut rows: Matrix = Vec::new();
    for l in space.boundary_labels() {
        let v = space.boundary_class(&l).expect("canonical label").coords;
        rows.push(v);
        if linalg::rank(&rows) == rows.len() {
            chosen.push(l);
        } else {
            rows.pop();
        }
        if chosen.len() == space.rank {
            break;
        }
    }
    chosen
}

fn to_int_matrix(m: &Matrix) -> Option<Vec<Vec<i64>>> {
    use num_traits::ToPrimitive;
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    if x.is_integer() {
                        x.to_integer().to_i64()
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect()
}

/// Precomputed boundary basis used to solve for the action matrices.
pub struct ActionSolver<'a> {
    space: &'a Space,
    labels: Vec<Vec<u8>>,
    b_inv: Matrix,
}

impl<'a> ActionSolver<'a> {
    pub fn new(space: &'a Space) -> Result<Self, CatalogError> {
        let labels = independent_labels(space);
        let cols: Matrix = labels
            .iter()
            .map(|l| space.boundary_class(l).map(|v| v.coords))
            .collect::<Result<_, _>>()?;
        let b_inv = linalg::inverse(&linalg::transpose(&cols))?;
        Ok(ActionSolver {
            space,
            labels,
            b_inv,
        })
    }

    /// The linear action of a permutation of the markings.
    pub fn action(&self, perm: &[u8]) -> Result<LinearAction, CatalogError> {
        let space = self.space;
        check_perm(space, perm)?;
        let img_cols: Matrix = self
            .labels
            .iter()
            .map(|l| {
                space
                    .boundary_class(&image_label(space, perm, l)?)
                    .map(|v| v.coords)
            })
            .collect::<Result<_, _>>()?;
        let t = linalg::mul(&linalg::transpose(&img_cols), &self.b_inv);
        let inconsistent = |label: &[u8]| CatalogError::DictionaryInconsistent {
            perm: perm.to_vec(),
            label: label.to_vec(),
        };
        for l in space.boundary_labels() {
            let v = space.boundary_class(&l)?.coords;
            let w = space.boundary_class(&image_label(space, perm, &l)?)?.coords;
            if linalg::mul_vec(&t, &v) != w {
                return Err(inconsistent(&l));
            }
        }
        let t_inv = linalg::inverse(&t)?;
        let p = |i: usize| if i == 0 { 1 } else { -1 };
        let s: Matrix = (0..space.rank)
            .map(|i| {
                (0..space.rank)
                    .map(|j| t_inv[j][i].clone() * Scalar::from_integer((p(i) * p(j)).into()))
                    .collect()
            })
            .collect();
        let on_divisors = to_int_matrix(&t).ok_or_else(|| inconsistent(&[]))?;
        let on_curves = to_int_matrix(&s).ok_or_else(|| inconsistent(&[]))?;
        Ok(LinearAction {
            perm: perm.to_vec(),
            on_divisors,
            on_curves,
        })
    }
}

/// The linear action of a permutation of the markings.
pub fn s_action(space: &Space, perm: &[u8]) -> Result<LinearAction, CatalogError> {
    ActionSolver::new(space)?.action(perm)
}

/// Composition `σ ∘ τ` of permutations in image-list form.
pub fn compose(sigma: &[u8], tau: &[u8]) -> Vec<u8> {
    tau.iter().map(|&t| sigma[t as usize - 1]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// All permutations of the markings.
    Full,
    /// Permutations fixing the last marking.
    FixLast,
}

#[derive(Debug, Clone)]
pub struct GroupElement {
    pub action: LinearAction,
    /// Image of each curve id.
    pub curve_perm: Vec<usize>,
    /// Image of each divisor id, `None` when the image is not in the catalog.
    pub divisor_perm: Vec<Option<usize>>,
}

/// A finite group acting on a catalog, listed element by element (identity first).
#[derive(Debug, Clone)]
pub struct Group {
    pub kind: GroupKind,
    pub elements: Vec<GroupElement>,
}

fn all_perms(n: u8) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n);
            out.push(q);
        }
    }
    out.sort();
    out
}

impl Group {
    pub fn build(cat: &Catalog, kind: GroupKind) -> Result<Group, CatalogError> {
        let n = cat.space.n as u8;
        let perms: Vec<Vec<u8>> = all_perms(n)
            .into_iter()
            .filter(|p| kind == GroupKind::Full || p[n as usize - 1] == n)
            .collect();
        let solver = ActionSolver::new(&cat.space)?;
        let elements = perms
            .par_iter()
            .map(|p| {
                let action = solver.action(p)?;
                let curve_perm = (0..cat.curves.len())
                    .map(|c| {
                        cat.find_curve(&action.apply_curve(cat.curve_ints(c)))
                            .ok_or_else(|| {
                                CatalogError::Invariant(format!(
                                    "curve {} has no image under {:?}",
                                    cat.curve_name(c),
                                    p
                                ))
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let divisor_perm = (0..cat.divisors.len())
                    .map(|d| cat.find_divisor(&action.apply_divisor(cat.divisor_ints(d))))
                    .collect();
                Ok(GroupElement {
                    action,
                    curve_perm,
                    divisor_perm,
                })
            })
            .collect::<Result<Vec<_>, CatalogError>>()?;
        Ok(Group { kind, elements })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Whether every element maps the divisor catalog onto itself.
    pub fn divisors_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|g| g.divisor_perm.iter().all(Option::is_some))
    }

    /// The subgroup mapping the divisor catalog onto itself.
    pub fn divisor_stabilizer(&self) -> Group {
        let elements = self
            .elements
            .iter()
            .filter(|g| g.divisor_perm.iter().all(Option::is_some))
            .cloned()
            .collect();
        Group {
            kind: self.kind,
            elements,
        }
    }

    pub fn curve_perms(&self) -> Vec<&[usize]> {
        self.elements
            .iter()
            .map(|g| g.curve_perm.as_slice())
            .collect()
    }

    /// Lexicographically least image of a sorted id set.
    pub fn canonical_curve_set(&self, ids: &[usize]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for g in &self.elements {
            let mut img: Vec<usize> = ids.iter().map(|&i| g.curve_perm[i]).collect();
            img.sort_unstable();
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
        best.unwrap_or_default()
    }

    /// All distinct images of a sorted curve-id set.
    pub fn curve_set_orbit(&self, ids: &[usize]) -> BTreeSet<Vec<usize>> {
        self.elements
            .iter()
            .map(|g| {
                let mut img: Vec<usize> = ids.iter().map(|&i| g.curve_perm[i]).collect();
                img.sort_unstable();
                img
            })
            .collect()
    }

    /// Orbit of an arbitrary integral curve class.
    pub fn curve_class_orbit(&self, v: &[i64]) -> BTreeSet<Vec<i64>> {
        self.elements
            .iter()
            .map(|g| g.action.apply_curve(v))
            .collect()
    }
}

/// Orbits of `0..count` under the given permutations, each sorted, ordered by least member.
pub fn orbits_of_ids(count: usize, perms: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in perms {
        for (i, &j) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..count {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Partitions vectors (all in one basis) into orbits under the group's linear action.
pub fn orbits(vectors: &[Vector], group: &Group) -> Vec<Vec<usize>> {
    let keys: Vec<Vec<i64>> = vectors.iter().map(int_coords).collect();
    let index: std::collections::HashMap<&Vec<i64>, usize> =
        keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let primal = vectors
        .first()
        .is_none_or(|v| v.basis.side == crate::kernel::Side::Primal);
    let perms: Vec<Vec<usize>> = group
        .elements
        .par_iter()
        .map(|g| {
            keys.iter()
                .enumerate()
                .map(|(i, k)| {
                    let img = if primal {
                        g.action.apply_divisor(k)
                    } else {
                        g.action.apply_curve(k)
                    };
                    index.get(&img).copied().unwrap_or(i)
                })
                .collect()
        })
        .collect();
    // Vectors whose images fall outside the list only merge with what is present.
    let refs: Vec<&[usize]> = perms.iter().map(Vec::as_slice).collect();
    orbits_of_ids(vectors.len(), &refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_space;
    use crate::kernel::pair;

    #[test]
    fn transposition_images() {
        let s = build_space(6).unwrap();
        let t12 = s_action(&s, &[2, 1, 3, 4, 5, 6]).unwrap();
        let e1 = s.parse_class("E1").unwrap();
        assert_eq!(t12.apply(&e1), s.parse_class("E2").unwrap());
        let t56 = s_action(&s, &[1, 2, 3, 4, 6, 5]).unwrap();
        assert_eq!(
            t56.apply(&s.parse_class("E12").unwrap()),
            s.parse_class("E34").unwrap()
        );
        let id = s_action(&s, &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(id.on_divisors, linalg_identity(16));
    }

    fn linalg_identity(n: usize) -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect()
    }

    #[test]
    fn contragredient_preserves_pairing() {
        let s = build_space(6).unwrap();
        let a = s_action(&s, &[6, 3, 1, 2, 5, 4]).unwrap();
        let d = s.parse_class("2H-E1-E2-E3-E4-E5-E12-E14-E23-E34").unwrap();
        let c = s.parse_class("l-e12-e13-e23-e45").unwrap();
        assert_eq!(
            pair(&a.apply(&d), &a.apply(&c)).unwrap(),
            pair(&d, &c).unwrap()
        );
    }

    #[test]
    fn homomorphism() {
        let s = build_space(6).unwrap();
        let sigma = [2, 3, 1, 6, 4, 5];
        let tau = [6, 5, 4, 3, 2, 1];
        let a = s_action(&s, &sigma).unwrap();
        let b = s_action(&s, &tau).unwrap();
        let ab = s_action(&s, &compose(&sigma, &tau)).unwrap();
        let prod: Vec<Vec<i64>> = (0..16)
            .map(|i| {
                (0..16)
                    .map(|j| {
                        (0..16)
                            .map(|k| a.on_divisors[i][k] * b.on_divisors[k][j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        assert_eq!(prod, ab.on_divisors);
    }

    #[test]
    fn m05_fixing_last_has_order_24() {
        let cat = Catalog::standard(5).unwrap();
        assert_eq!(Group::build(&cat, GroupKind::FixLast).unwrap().order(), 24);
        assert_eq!(Group::build(&cat, GroupKind::Full).unwrap().order(), 120);
    }

    #[test]
    fn bad_permutation_rejected() {
        let s = build_space(5).unwrap();
        assert!(s_action(&s, &[1, 1, 2, 3, 4]).is_err());
    }
}
