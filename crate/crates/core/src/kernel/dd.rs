//! Double description: extreme rays of `{ x : A x >= 0, B x = 0 }` over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::linalg;
use super::scalar::{primitive, primitive_int, Scalar};
use super::vector::{InequalitySystem, Vector};
use crate::error::KernelError;

/// Bitset over constraint indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(bits: usize) -> Self {
        ZeroSet(vec![0; bits.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn subset_of(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits >> b & 1 == 1)
                .map(move |b| w * 64 + b)
        })
    }
}

#[derive(Debug, Clone)]
struct Ray {
    v: Vec<BigInt>,
    z: ZeroSet,
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// `alpha * p + beta * n`, reduced to a primitive vector.
fn combine(alpha: &BigInt, p: &[BigInt], beta: &BigInt, n: &[BigInt]) -> Vec<BigInt> {
    primitive_int(p.iter().zip(n).map(|(x, y)| alpha * x + beta * y).collect())
}

/// Options for the raw enumerator.
#[derive(Debug, Clone, Copy, Default)]
pub struct DdOptions {
    /// Abort when an intermediate ray list grows beyond this size.
    pub max_rays: Option<usize>,
    /// Abort once this instant has passed (checked between constraints).
    pub deadline: Option<std::time::Instant>,
}

/// Extreme rays of a system given by integer rows in Euclidean coordinates.
/// Rays are primitive and sorted lexicographically.
pub fn extreme_rays_int(
    dim: usize,
    equalities: &[Vec<BigInt>],
    inequalities: &[Vec<BigInt>],
    opts: DdOptions,
) -> Result<Vec<Vec<BigInt>>, KernelError> {
    let total = equalities.len() + inequalities.len();
    let rows: Vec<&Vec<BigInt>> = equalities.iter().chain(inequalities).collect();
    let mut lineality: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut remaining: Vec<usize> = (equalities.len()..total).collect();
    let mut done = ZeroSet::new(total);

    let mut next_eq = 0;
    loop {
        let (idx, is_eq) = if next_eq < equalities.len() {
            next_eq += 1;
            (next_eq - 1, true)
        } else if remaining.is_empty() {
            break;
        } else {
            let pick = pick_next(&rows, &remaining, &rays, &lineality);
            (remaining.remove(pick), false)
        };
        let a = rows[idx];

        if let Some(pos) = lineality.iter().position(|l| !idot(a, l).is_zero()) {
            let mut l0 = lineality.remove(pos);
            let mut al0 = idot(a, &l0);
            if al0.is_negative() {
                l0.iter_mut().for_each(|x| *x = -&*x);
                al0 = -al0;
            }
            for l in lineality.iter_mut() {
                let al = idot(a, l);
                if !al.is_zero() {
                    *l = combine(&al0, l, &(-al), &l0);
                }
            }
            for r in rays.iter_mut() {
                let ar = idot(a, &r.v);
                if !ar.is_zero() {
                    r.v = combine(&al0, &r.v, &(-ar), &l0);
                }
                r.z.set(idx);
            }
            if !is_eq {
                rays.push(Ray {
                    v: primitive_int(l0),
                    z: done.clone(),
                });
            }
            done.set(idx);
            continue;
        }

        let signs: Vec<BigInt> = rays.iter().map(|r| idot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&i| signs[i].is_positive())
            .collect();
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&i| signs[i].is_negative())
            .collect();
        let k = dim - lineality.len();
        let need = k.saturating_sub(2);

        // For each processed constraint, the rays tight on it; a blocking ray for a pair
        // must lie in every list indexed by the pair's common zero set.
        let mut tight_on: Vec<Vec<u32>> = vec![Vec::new(); total];
        for (j, r) in rays.iter().enumerate() {
            for k in r.z.ones() {
                tight_on[k].push(j as u32);
            }
        }
        let new_rays: Vec<Ray> = pos
            .par_iter()
            .flat_map_iter(|&p| {
                let rays = &rays;
                let signs = &signs;
                let tight_on = &tight_on;
                neg.iter().filter_map(move |&n| {
                    let common = rays[p].z.and(&rays[n].z);
                    if common.count() < need {
                        return None;
                    }
                    let shortest = common.ones().min_by_key(|&k| tight_on[k].len());
                    let blocked = match shortest {
                        Some(k) => tight_on[k].iter().any(|&j| {
                            let j = j as usize;
                            j != p && j != n && common.subset_of(&rays[j].z)
                        }),
                        None => rays
                            .iter()
                            .enumerate()
                            .any(|(j, r)| j != p && j != n && common.subset_of(&r.z)),
                    };
                    if blocked {
                        return None;
                    }
                    let v = combine(&signs[p], &rays[n].v, &(-&signs[n]), &rays[p].v);
                    let mut z = common;
                    z.set(idx);
                    Some(Ray { v, z })
                })
            })
            .collect();

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + new_rays.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if signs[i].is_zero() {
                r.z.set(idx);
                next.push(r);
            } else if signs[i].is_positive() && !is_eq {
                next.push(r);
            }
        }
        next.extend(new_rays);
        if let Some(cap) = opts.max_rays {
            if next.len() > cap {
                return Err(KernelError::TooManyRays {
                    count: next.len(),
                    ceiling: cap,
                });
            }
        }
        rays = next;
        done.set(idx);
        if opts.deadline.is_some_and(|d| std::time::Instant::now() > d) {
            return Err(KernelError::Deadline {
                processed: done.count(),
                total,
                rays: rays.len(),
            });
        }
        if std::env::var_os("NEGCONE_DD_TRACE").is_some() {
            eprintln!(
                "dd: constraint {idx} -> {} rays (lineality {})",
                rays.len(),
                lineality.len()
            );
        }
    }

    if !lineality.is_empty() {
        return Err(KernelError::NotPointed {
            lineality: lineality.len(),
        });
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    check_rays(dim, equalities, inequalities, &out)?;
    Ok(out)
}

/// Chooses the remaining inequality that creates the fewest candidate pairs.
fn pick_next(
    rows: &[&Vec<BigInt>],
    remaining: &[usize],
    rays: &[Ray],
    lineality: &[Vec<BigInt>],
) -> usize {
    let mut best = (usize::MAX, 0);
    for (pos, &i) in remaining.iter().enumerate() {
        let a = rows[i];
        if lineality.iter().any(|l| !idot(a, l).is_zero()) {
            return pos;
        }
        let (mut p, mut n) = (0usize, 0usize);
        for r in rays {
            let s = idot(a, &r.v);
            if s.is_positive() {
                p += 1;
            } else if s.is_negative() {
                n += 1;
            }
        }
        let cost = p * n;
        if cost < best.0 {
            best = (cost, pos);
        }
    }
    best.1
}

/// Soundness: each ray satisfies every constraint and its tight set has rank `dim - 1`.
fn check_rays(
    dim: usize,
    equalities: &[Vec<BigInt>],
    inequalities: &[Vec<BigInt>],
    rays: &[Vec<BigInt>],
) -> Result<(), KernelError> {
    rays.par_iter().try_for_each(|r| {
        let mut tight: Vec<Vec<BigInt>> = Vec::new();
        for e in equalities {
            if !idot(e, r).is_zero() {
                return Err(KernelError::Unsound("ray violates an equality".into()));
            }
            tight.push(e.clone());
        }
        for a in inequalities {
            let s = idot(a, r);
            if s.is_negative() {
                return Err(KernelError::Unsound("ray violates an inequality".into()));
            }
            if s.is_zero() {
                tight.push(a.clone());
            }
        }
        if linalg::rank_int(&tight) != dim - 1 {
            return Err(KernelError::Unsound("ray is not extreme".into()));
        }
        Ok(())
    })
}

fn to_int_row(f: &[Scalar]) -> Vec<BigInt> {
    primitive(f)
}

/// Extreme rays of an inequality system; rays live in the dual of the functionals' basis.
pub fn extreme_rays(sys: &InequalitySystem) -> Result<Vec<Vector>, KernelError> {
    extreme_rays_with(sys, DdOptions::default())
}

pub fn extreme_rays_with(
    sys: &InequalitySystem,
    opts: DdOptions,
) -> Result<Vec<Vector>, KernelError> {
    sys.check()?;
    let dim = sys.basis.dim;
    let eqs: Vec<Vec<BigInt>> = sys
        .equalities
        .iter()
        .map(|f| to_int_row(&f.euclidean_functional()))
        .collect();
    let ineqs: Vec<Vec<BigInt>> = sys
        .inequalities
        .iter()
        .map(|f| to_int_row(&f.euclidean_functional()))
        .collect();
    let rays = extreme_rays_int(dim, &eqs, &ineqs, opts)?;
    let basis = sys.point_basis();
    Ok(rays
        .into_iter()
        .map(|r| Vector::from_bigints(r, basis))
        .collect())
}

/// Facet description of a finitely generated cone, computed inside its linear span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetDescription {
    /// Facet functionals, primitive and sorted.
    pub facets: Vec<Vector>,
    /// Functionals cutting out the linear span of the cone (empty when full-dimensional).
    pub equations: Vec<Vector>,
}

/// Facets of the cone generated by `rays`. Functionals live in the dual basis.
pub fn facets(rays: &[Vector]) -> Result<FacetDescription, KernelError> {
    facets_with(rays, DdOptions::default())
}

pub fn facets_with(rays: &[Vector], opts: DdOptions) -> Result<FacetDescription, KernelError> {
    let Some(first) = rays.first() else {
        return Ok(FacetDescription {
            facets: Vec::new(),
            equations: Vec::new(),
        });
    };
    let basis = first.basis;
    for r in rays {
        if r.basis != basis {
            return Err(KernelError::BasisMismatch {
                left: basis,
                right: r.basis,
            });
        }
    }
    let dim = basis.dim;
    let rows: Vec<Vec<BigInt>> = rays.iter().map(|r| primitive(&r.coords)).collect();
    let span_eqs: Vec<Vec<BigInt>> = linalg::nullspace(&linalg::from_bigints(&rows), dim)
        .iter()
        .map(|v| primitive(v))
        .collect();
    let mut dual = extreme_rays_int(dim, &span_eqs, &rows, opts)?;
    let fbasis = basis.dual();
    let to_functional = |y: Vec<BigInt>| {
        let coords: Vec<BigInt> = y
            .into_iter()
            .enumerate()
            .map(|(i, x)| if fbasis.sign(i) < 0 { -x } else { x })
            .collect();
        coords
    };
    let mut facets: Vec<Vec<BigInt>> = dual.drain(..).map(to_functional).collect();
    facets.sort();
    let mut equations: Vec<Vec<BigInt>> = span_eqs.into_iter().map(to_functional).collect();
    equations.sort();
    Ok(FacetDescription {
        facets: facets
            .into_iter()
            .map(|f| Vector::from_bigints(f, fbasis))
            .collect(),
        equations: equations
            .into_iter()
            .map(|f| Vector::from_bigints(f, fbasis))
            .collect(),
    })
}

/// Greatest common divisor of a slice, used by callers normalizing integer data.
pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::vector::BasisId;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn orthant() {
        let rays =
            extreme_rays_int(2, &[], &[b(&[1, 0]), b(&[0, 1])], DdOptions::default()).unwrap();
        assert_eq!(rays, vec![b(&[0, 1]), b(&[1, 0])]);
    }

    #[test]
    fn halfplane_is_not_pointed() {
        let err = extreme_rays_int(2, &[], &[b(&[1, 0])], DdOptions::default()).unwrap_err();
        assert_eq!(err, KernelError::NotPointed { lineality: 1 });
    }

    #[test]
    fn square_cone() {
        // Cone over a square: x3 >= |x1|, x3 >= |x2|.
        let ineqs = [b(&[1, 0, 1]), b(&[-1, 0, 1]), b(&[0, 1, 1]), b(&[0, -1, 1])];
        let rays = extreme_rays_int(3, &[], &ineqs, DdOptions::default()).unwrap();
        assert_eq!(
            rays,
            vec![
                b(&[-1, -1, 1]),
                b(&[-1, 1, 1]),
                b(&[1, -1, 1]),
                b(&[1, 1, 1])
            ]
        );
    }

    #[test]
    fn zero_cone_has_no_rays() {
        let ineqs = [b(&[1]), b(&[-1])];
        assert!(extreme_rays_int(1, &[], &ineqs, DdOptions::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn equality_cuts_a_face() {
        let ineqs = [b(&[1, 0, 0]), b(&[0, 1, 0]), b(&[0, 0, 1])];
        let rays = extreme_rays_int(3, &[b(&[0, 0, 1])], &ineqs, DdOptions::default()).unwrap();
        assert_eq!(rays, vec![b(&[0, 1, 0]), b(&[1, 0, 0])]);
    }

    #[test]
    fn facets_of_lower_dimensional_cone() {
        let basis = BasisId::euclidean(3);
        let rays = [
            Vector::from_ints(&[1, 0, 0], basis),
            Vector::from_ints(&[0, 1, 0], basis),
        ];
        let fd = facets(&rays).unwrap();
        assert_eq!(fd.facets.len(), 2);
        assert_eq!(
            fd.equations,
            vec![Vector::from_ints(&[0, 0, 1], basis.dual())]
        );
    }

    #[test]
    fn ray_budget_is_reported() {
        let ineqs = [b(&[1, 0, 1]), b(&[-1, 0, 1]), b(&[0, 1, 1]), b(&[0, -1, 1])];
        let err = extreme_rays_int(
            3,
            &[],
            &ineqs,
            DdOptions {
                max_rays: Some(1),
                deadline: None,
            },
        )
        .unwrap_err();
        assert!(matches!(err, KernelError::TooManyRays { .. }));
    }
}
