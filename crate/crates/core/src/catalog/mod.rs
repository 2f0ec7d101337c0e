//! Negative-curve and divisor catalogs for M̄0,5 and M̄0,6.

pub mod action;
pub mod file;
pub mod invariants;
pub mod space;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use action::{
    orbits, orbits_of_ids, s_action, ActionSolver, Group, GroupElement, GroupKind, LinearAction,
};
pub use invariants::{check_invariants, InvariantCheck};
pub use space::{build_space, Space, SpaceId};

use crate::error::CatalogError;
use crate::kernel::Vector;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "label", rename_all = "kebab-case")]
pub enum DivisorLabel {
    /// Boundary divisor δ_I with its canonical marking subset.
    Boundary(Vec<u8>),
    /// Keel-Vermeire divisor KV_{ij,kh}.
    KeelVermeire([[u8; 2]; 2]),
    /// Anything loaded from a file that matches neither shape.
    Other(String),
}

impl fmt::Display for DivisorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorLabel::Boundary(s) => {
                write!(f, "delta_")?;
                s.iter().try_for_each(|i| write!(f, "{i}"))
            }
            DivisorLabel::KeelVermeire([a, b]) => write!(f, "KV_{}{},{}{}", a[0], a[1], b[0], b[1]),
            DivisorLabel::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorGen {
    pub class: Vector,
    pub label: DivisorLabel,
    /// Short class name in the Kapranov notation, e.g. `E1`, `Delta123`, `KV13,24`.
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCurve {
    pub class: Vector,
    /// Index into the divisor catalog of the swept divisor N(c).
    pub swept: usize,
    /// Family tag, e.g. `e_i-e_ij`.
    pub family: String,
}

/// A space with its catalogs 𝒞 and 𝒟, pairing table and symmetry group.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub space: Space,
    pub curves: Vec<NegativeCurve>,
    pub divisors: Vec<DivisorGen>,
    /// `pairings[d][c] = pair(divisor d, curve c)`.
    pub pairings: Vec<Vec<i64>>,
    curve_ints: Vec<Vec<i64>>,
    divisor_ints: Vec<Vec<i64>>,
    curve_index: HashMap<Vec<i64>, usize>,
    divisor_index: HashMap<Vec<i64>, usize>,
    sign_ok: bool,
}

/// Integer coordinates of an integral vector; panics on fractional or oversized entries.
pub fn int_coords(v: &Vector) -> Vec<i64> {
    v.to_i64s().expect("catalog vectors are small integers")
}

/// Lorentzian pairing of integral coordinates.
pub fn pair_ints(d: &[i64], c: &[i64]) -> i64 {
    d.iter()
        .zip(c)
        .enumerate()
        .map(|(i, (x, y))| if i == 0 { x * y } else { -x * y })
        .sum()
}

impl Catalog {
    /// The bundled catalog for n = 5 or 6.
    pub fn standard(n: usize) -> Result<Catalog, CatalogError> {
        let space = build_space(n)?;
        let divisors = catalog_d(&space);
        let curves = catalog_c(&space, &divisors)?;
        Catalog::from_parts(space, curves, divisors)
    }

    pub fn from_parts(
        space: Space,
        curves: Vec<NegativeCurve>,
        divisors: Vec<DivisorGen>,
    ) -> Result<Catalog, CatalogError> {
        for c in &curves {
            if c.class.basis != space.curve_basis_id() || c.swept >= divisors.len() {
                return Err(CatalogError::Malformed(format!(
                    "bad curve entry {}",
                    c.class
                )));
            }
        }
        for d in &divisors {
            if d.class.basis != space.divisor_basis_id() {
                return Err(CatalogError::Malformed(format!(
                    "bad divisor entry {}",
                    d.class
                )));
            }
        }
        let curve_ints: Vec<Vec<i64>> = curves.iter().map(|c| int_coords(&c.class)).collect();
        let divisor_ints: Vec<Vec<i64>> = divisors.iter().map(|d| int_coords(&d.class)).collect();
        let pairings: Vec<Vec<i64>> = divisor_ints
            .iter()
            .map(|d| curve_ints.iter().map(|c| pair_ints(d, c)).collect())
            .collect();
        let curve_index = curve_ints
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let divisor_index = divisor_ints
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let sign_ok = curves.iter().enumerate().all(|(c, curve)| {
            (0..divisors.len()).all(|d| (pairings[d][c] < 0) == (d == curve.swept))
        });
        Ok(Catalog {
            space,
            curves,
            divisors,
            pairings,
            curve_ints,
            divisor_ints,
            curve_index,
            divisor_index,
            sign_ok,
        })
    }

    /// Each curve pairs negatively with its swept divisor and nonnegatively with all others.
    pub fn sign_pattern_ok(&self) -> bool {
        self.sign_ok
    }

    pub fn id(&self) -> SpaceId {
        self.space.id
    }

    pub fn rank(&self) -> usize {
        self.space.rank
    }

    pub fn curve_ints(&self, i: usize) -> &[i64] {
        &self.curve_ints[i]
    }

    pub fn divisor_ints(&self, i: usize) -> &[i64] {
        &self.divisor_ints[i]
    }

    pub fn find_curve(&self, v: &[i64]) -> Option<usize> {
        self.curve_index.get(v).copied()
    }

    pub fn find_divisor(&self, v: &[i64]) -> Option<usize> {
        self.divisor_index.get(v).copied()
    }

    /// Curve id for a class written in the Kapranov notation.
    pub fn curve_id(&self, text: &str) -> Option<usize> {
        let v = self.space.parse_class(text).ok()?;
        self.find_curve(&int_coords(&v))
    }

    pub fn divisor_id(&self, text: &str) -> Option<usize> {
        if let Some(d) = self.divisors.iter().position(|d| d.name == text) {
            return Some(d);
        }
        let v = self.space.parse_class(text).ok()?;
        self.find_divisor(&int_coords(&v))
    }

    /// The paired value `D_d · c_c`.
    pub fn pair(&self, d: usize, c: usize) -> i64 {
        self.pairings[d][c]
    }

    /// Pairing of an arbitrary integral divisor with curve `c`.
    pub fn pair_divisor_curve(&self, d: &[i64], c: usize) -> i64 {
        pair_ints(d, &self.curve_ints[c])
    }

    /// Pairing of divisor `d` with an arbitrary integral curve.
    pub fn pair_with_curve(&self, d: usize, c: &[i64]) -> i64 {
        pair_ints(&self.divisor_ints[d], c)
    }

    pub fn curve_name(&self, c: usize) -> String {
        self.space.format_class(&self.curves[c].class)
    }

    pub fn swept_name(&self, c: usize) -> &str {
        &self.divisors[self.curves[c].swept].name
    }

    pub fn curve_vectors(&self) -> Vec<Vector> {
        self.curves.iter().map(|c| c.class.clone()).collect()
    }

    pub fn divisor_vectors(&self) -> Vec<Vector> {
        self.divisors.iter().map(|d| d.class.clone()).collect()
    }

    /// Curves sweeping divisor `d`.
    pub fn curves_sweeping(&self, d: usize) -> Vec<usize> {
        (0..self.curves.len())
            .filter(|&c| self.curves[c].swept == d)
            .collect()
    }

    pub fn to_bigints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// The default symmetry group: S6 for n=6, the relabelings fixing marking 5 for n=5.
    pub fn default_group(&self) -> Result<Group, CatalogError> {
        match self.id() {
            SpaceId::M06 => Group::build(self, GroupKind::Full),
            SpaceId::M05 => Group::build(self, GroupKind::FixLast),
        }
    }

    /// Catalog with one divisor removed; curves sweeping it are removed too.
    pub fn without_divisor(&self, d: usize) -> Result<Catalog, CatalogError> {
        let divisors: Vec<DivisorGen> = self
            .divisors
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != d)
            .map(|(_, x)| x.clone())
            .collect();
        let curves = self
            .curves
            .iter()
            .filter(|c| c.swept != d)
            .map(|c| NegativeCurve {
                swept: if c.swept > d { c.swept - 1 } else { c.swept },
                ..c.clone()
            })
            .collect();
        Catalog::from_parts(self.space.clone(), curves, divisors)
    }
}

fn divisor_name(space: &Space, label: &DivisorLabel) -> String {
    match (space.id, label) {
        (SpaceId::M06, DivisorLabel::Boundary(s)) => match s.as_slice() {
            [i, 6] => format!("E{i}"),
            [i, j, 6] => format!("E{i}{j}"),
            [i, j] => {
                let rest: Vec<String> = (1..6u8)
                    .filter(|k| k != i && k != j)
                    .map(|k| k.to_string())
                    .collect();
                format!("Delta{}", rest.concat())
            }
            _ => label.to_string(),
        },
        (SpaceId::M05, DivisorLabel::Boundary(_)) => {
            space.format_class(&space.boundary_class_unchecked(label))
        }
        (_, DivisorLabel::KeelVermeire([a, b])) => format!("KV{}{},{}{}", a[0], a[1], b[0], b[1]),
        (_, DivisorLabel::Other(s)) => s.clone(),
    }
}

impl Space {
    fn boundary_class_unchecked(&self, label: &DivisorLabel) -> Vector {
        match label {
            DivisorLabel::Boundary(s) => self.boundary_class(s).expect("canonical label"),
            _ => unreachable!(),
        }
    }
}

/// The divisor catalog 𝒟: boundary divisors, then Keel-Vermeire divisors (n=6).
pub fn catalog_d(space: &Space) -> Vec<DivisorGen> {
    let mut out: Vec<DivisorGen> = space
        .boundary_labels()
        .into_iter()
        .map(|l| {
            let label = DivisorLabel::Boundary(l.clone());
            DivisorGen {
                class: space.boundary_class(&l).expect("canonical label"),
                name: divisor_name(space, &label),
                label,
            }
        })
        .collect();
    if space.id == SpaceId::M06 {
        for [i, j] in pairs(&space.point_labels()) {
            for [k, h] in pairs(&space.point_labels()) {
                if [i, j] < [k, h] && ![k, h].contains(&i) && ![k, h].contains(&j) {
                    let label = DivisorLabel::KeelVermeire([[i, j], [k, h]]);
                    out.push(DivisorGen {
                        class: space.keel_vermeire([i, j], [k, h]),
                        name: divisor_name(space, &label),
                        label,
                    });
                }
            }
        }
    }
    out
}

fn pairs(pts: &[u8]) -> Vec<[u8; 2]> {
    let mut out = Vec::new();
    for (a, &i) in pts.iter().enumerate() {
        for &j in &pts[a + 1..] {
            out.push([i, j]);
        }
    }
    out
}

/// The negative-curve catalog 𝒞 with swept divisors.
pub fn catalog_c(
    space: &Space,
    divisors: &[DivisorGen],
) -> Result<Vec<NegativeCurve>, CatalogError> {
    let find = |name: &str| {
        divisors
            .iter()
            .position(|d| d.name == name)
            .ok_or_else(|| CatalogError::Invariant(format!("missing divisor {name}")))
    };
    let mut out = Vec::new();
    let mut push = |text: String, swept: &str, family: &str| -> Result<(), CatalogError> {
        out.push(NegativeCurve {
            class: space.parse_class(&text)?,
            swept: find(swept)?,
            family: family.to_string(),
        });
        Ok(())
    };
    match space.id {
        SpaceId::M05 => {
            for d in divisors {
                let coords = int_coords(&d.class);
                let c = space.curve(&coords);
                push(space.format_class(&c), &d.name, "boundary")?;
            }
        }
        SpaceId::M06 => {
            let pts = space.point_labels();
            let e = |i: u8, j: u8| format!("e{}{}", i.min(j), i.max(j));
            for &i in &pts {
                let ei = format!("E{i}");
                for &j in pts.iter().filter(|&&j| j != i) {
                    push(format!("e{i}-{}", e(i, j)), &ei, "e_i-e_ij")?;
                }
                let mut t = format!("2e{i}");
                for &j in pts.iter().filter(|&&j| j != i) {
                    t.push_str(&format!("-{}", e(i, j)));
                }
                push(t, &ei, "2e_i-sum_e_ij")?;
            }
            for [a, b] in pairs(&pts) {
                for c in pts.iter().copied().filter(|&c| c > b) {
                    let tri = [a, b, c];
                    let rest: Vec<u8> = pts.iter().copied().filter(|p| !tri.contains(p)).collect();
                    let (h, l) = (rest[0], rest[1]);
                    let dname = format!("Delta{a}{b}{c}");
                    for (i, j, k) in [(a, b, c), (b, a, c), (c, a, b)] {
                        push(format!("l-e{i}-{}", e(j, k)), &dname, "l-e_i-e_jk")?;
                    }
                    push(
                        format!("2l-e{a}-e{b}-e{c}-{}", e(h, l)),
                        &dname,
                        "2l-e_i-e_j-e_k-e_hl",
                    )?;
                    push(
                        format!("l-{}-{}-{}-{}", e(a, b), e(a, c), e(b, c), e(h, l)),
                        &dname,
                        "l-e_ij-e_ik-e_jk-e_hl",
                    )?;
                }
            }
            for [i, j] in pairs(&pts) {
                let dname = format!("E{i}{j}");
                push(e(i, j), &dname, "e_ij")?;
                push(format!("l-e{i}-e{j}+{}", e(i, j)), &dname, "l-e_i-e_j+e_ij")?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_sizes() {
        let c6 = Catalog::standard(6).unwrap();
        assert_eq!(c6.curves.len(), 95);
        assert_eq!(c6.divisors.len(), 40);
        let c5 = Catalog::standard(5).unwrap();
        assert_eq!(c5.curves.len(), 10);
        assert_eq!(c5.divisors.len(), 10);
    }

    #[test]
    fn named_entries() {
        let c6 = Catalog::standard(6).unwrap();
        let id = c6.curve_id("2e1-e12-e13-e14-e15").unwrap();
        assert_eq!(c6.swept_name(id), "E1");
        let kv = c6.divisor_id("KV13,24").unwrap();
        assert_eq!(
            c6.divisors[kv].class,
            c6.space
                .parse_class("2H-E1-E2-E3-E4-E5-E12-E14-E23-E34")
                .unwrap()
        );
        assert_eq!(
            c6.divisor_id("Delta123"),
            c6.divisor_id("H-E1-E2-E3-E12-E13-E23")
        );
        let c5 = Catalog::standard(5).unwrap();
        let h = c5.curve_id("l-e0-e1").unwrap();
        assert_eq!(c5.swept_name(h), "H-E0-E1");
    }

    #[test]
    fn swept_divisor_is_negative() {
        for n in [5, 6] {
            let cat = Catalog::standard(n).unwrap();
            for (c, curve) in cat.curves.iter().enumerate() {
                assert!(cat.pair(curve.swept, c) < 0, "{}", cat.curve_name(c));
            }
        }
    }
}
