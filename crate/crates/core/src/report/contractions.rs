//! Per-class data for the initial contractions of fiber type.
//!
//! Only pairing-level data is reported: a divisor is listed as vertical when it pairs
//! to zero with the fiber class. Which of those are contracted to points is a
//! geometric question the cone data does not settle.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::catalog::{int_coords, Catalog, Group, SpaceId};
use crate::error::EngineError;
use crate::face::{face_of, face_rays};
use crate::kernel::{format_scalar, linalg, DdOptions, Scalar, Vector};
use crate::nefmin::FaceOracle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub weight: String,
    pub curve: String,
    pub swept: String,
}

/// `representative = Σ weight · curve` with each curve a negative curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionEntry {
    pub representative: String,
    pub orbit_size: usize,
    /// All decompositions over the vanishing closure with the fewest distinct curves.
    pub decompositions: Vec<Decomposition>,
    pub closure: Vec<String>,
    /// Divisor generators pairing to zero with the representative.
    pub vertical_divisors: Vec<String>,
    pub face_rays: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionReport {
    pub space: SpaceId,
    pub entries: Vec<ContractionEntry>,
}

const MAX_TERMS: usize = 4;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Unique positive weights with `Σ w_i cols_i = target`, if the columns are independent.
fn positive_solution(cols: &[&[i64]], target: &[i64]) -> Option<Vec<Scalar>> {
    let k = cols.len();
    let mut aug: Vec<Vec<Scalar>> = (0..target.len())
        .map(|r| {
            let mut row: Vec<Scalar> = cols
                .iter()
                .map(|c| Scalar::from_integer(c[r].into()))
                .collect();
            row.push(Scalar::from_integer(target[r].into()));
            row
        })
        .collect();
    let pivots = linalg::rref(&mut aug);
    if pivots.len() != k || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    let w: Vec<Scalar> = (0..k).map(|i| aug[i][k].clone()).collect();
    w.iter().all(|x| x.is_positive()).then_some(w)
}

fn decompositions(cat: &Catalog, rep: &[i64], closure: &[usize]) -> Vec<Decomposition> {
    for size in 1..=MAX_TERMS {
        let mut found = Vec::new();
        for pick in combinations(closure.len(), size) {
            let ids: Vec<usize> = pick.iter().map(|&i| closure[i]).collect();
            let cols: Vec<&[i64]> = ids.iter().map(|&c| cat.curve_ints(c)).collect();
            if let Some(w) = positive_solution(&cols, rep) {
                let terms = ids
                    .iter()
                    .zip(&w)
                    .map(|(&c, x)| Term {
                        weight: format_scalar(x),
                        curve: cat.curve_name(c),
                        swept: cat.swept_name(c).to_string(),
                    })
                    .collect();
                found.push(Decomposition { terms });
            }
        }
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

/// Checks that a decomposition sums to the representative exactly.
pub fn reconstructs(cat: &Catalog, rep: &Vector, d: &Decomposition) -> bool {
    let mut sum = Vector::zero(cat.space.curve_basis_id());
    for t in &d.terms {
        let (Ok(w), Ok(c)) = (
            crate::kernel::parse_scalar(&t.weight),
            cat.space.parse_class(&t.curve),
        ) else {
            return false;
        };
        if cat.find_curve(&int_coords(&c)).is_none() || !w.is_positive() {
            return false;
        }
        sum = sum.add(&c.scale(&w));
    }
    sum == *rep
}

/// One entry per covering class, in the order given.
pub fn report_contractions(
    cat: &Catalog,
    group: &Group,
    classes: &[Vector],
) -> Result<ContractionReport, EngineError> {
    let oracle = FaceOracle::new(cat);
    let mut entries = Vec::with_capacity(classes.len());
    for rep in classes {
        let face = face_of(cat, &oracle, rep)?;
        let rays = face_rays(&face, DdOptions::default())?;
        let v = rep.to_i64s().ok_or(EngineError::NotInCone)?;
        let closure = face.closure.ids();
        let decompositions = decompositions(cat, &v, &closure);
        debug_assert!(decompositions.iter().all(|d| reconstructs(cat, rep, d)));
        let vertical_divisors = (0..cat.divisors.len())
            .filter(|&d| cat.pair_with_curve(d, &v).is_zero())
            .map(|d| cat.divisors[d].name.clone())
            .collect();
        entries.push(ContractionEntry {
            representative: cat.space.format_class(rep),
            orbit_size: group.curve_class_orbit(&v).len(),
            decompositions,
            closure: closure.iter().map(|&c| cat.curve_name(c)).collect(),
            vertical_divisors,
            face_rays: rays.len(),
        });
    }
    Ok(ContractionReport {
        space: cat.id(),
        entries,
    })
}

impl ContractionReport {
    /// Plain-text rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "class {}: {} (orbit {})\n",
                i + 1,
                e.representative,
                e.orbit_size
            ));
            for d in &e.decompositions {
                let terms: Vec<String> = d
                    .terms
                    .iter()
                    .map(|t| {
                        if t.weight == "1" {
                            t.curve.clone()
                        } else {
                            format!("{}({})", t.weight, t.curve)
                        }
                    })
                    .collect();
                let swept: Vec<String> = d
                    .terms
                    .iter()
                    .map(|t| format!("{}x{}", t.swept, t.weight))
                    .collect();
                out.push_str(&format!(
                    "  = {}   swept {}\n",
                    terms.join(" + "),
                    swept.join(", ")
                ));
            }
            out.push_str(&format!("  closure: {} curves\n", e.closure.len()));
            out.push_str(&format!(
                "  vertical divisors: {}\n",
                e.vertical_divisors.join(", ")
            ));
            out.push_str(&format!("  face rays: {}\n", e.face_rays));
        }
        out
    }
}
