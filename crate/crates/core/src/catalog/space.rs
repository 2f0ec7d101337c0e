//! Bases, pairing, boundary dictionary and class notation for M̄0,5 and M̄0,6.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CatalogError;
use crate::kernel::{BasisId, Form, Side, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceId {
    #[serde(rename = "m05")]
    M05,
    #[serde(rename = "m06")]
    M06,
}

impl SpaceId {
    pub fn n(self) -> usize {
        match self {
            SpaceId::M05 => 5,
            SpaceId::M06 => 6,
        }
    }

    pub fn from_n(n: usize) -> Result<Self, CatalogError> {
        match n {
            5 => Ok(SpaceId::M05),
            6 => Ok(SpaceId::M06),
            _ => Err(CatalogError::UnsupportedN(n)),
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceId::M05 => "m05",
            SpaceId::M06 => "m06",
        })
    }
}

impl FromStr for SpaceId {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "m05" | "5" => Ok(SpaceId::M05),
            "m06" | "6" => Ok(SpaceId::M06),
            _ => Err(CatalogError::Malformed(format!("unknown space {s:?}"))),
        }
    }
}

/// A basis element: `H`, a point `E_i`, or a line `E_ij` (indices as written).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisElem {
    Hyperplane,
    Point(u8),
    Line(u8, u8),
}

/// Basis, dual basis and pairing of N¹ / N₁.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    pub id: SpaceId,
    pub n: usize,
    pub rank: usize,
    pub divisor_basis: Vec<String>,
    pub curve_basis: Vec<String>,
    /// Diagonal pairing matrix between the two bases.
    pub pairing: Vec<Vec<i64>>,
    elems: Vec<BasisElem>,
}

/// The point indices used in the Kapranov model: `1..=5` for n=6 and `0..=3` for n=5.
fn points(id: SpaceId) -> Vec<u8> {
    match id {
        SpaceId::M05 => (0..4).collect(),
        SpaceId::M06 => (1..6).collect(),
    }
}

pub fn build_space(n: usize) -> Result<Space, CatalogError> {
    let id = SpaceId::from_n(n)?;
    let mut elems = vec![BasisElem::Hyperplane];
    let pts = points(id);
    elems.extend(pts.iter().map(|&i| BasisElem::Point(i)));
    if id == SpaceId::M06 {
        for (a, &i) in pts.iter().enumerate() {
            for &j in &pts[a + 1..] {
                elems.push(BasisElem::Line(i, j));
            }
        }
    }
    let rank = elems.len();
    let label = |e: &BasisElem, up: bool| match *e {
        BasisElem::Hyperplane => (if up { "H" } else { "l" }).to_string(),
        BasisElem::Point(i) => format!("{}{}", if up { "E" } else { "e" }, i),
        BasisElem::Line(i, j) => format!("{}{}{}", if up { "E" } else { "e" }, i, j),
    };
    let pairing = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    if i != j {
                        0
                    } else if i == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect();
    Ok(Space {
        id,
        n,
        rank,
        divisor_basis: elems.iter().map(|e| label(e, true)).collect(),
        curve_basis: elems.iter().map(|e| label(e, false)).collect(),
        pairing,
        elems,
    })
}

impl Space {
    pub fn divisor_basis_id(&self) -> BasisId {
        BasisId {
            form: Form::Lorentzian,
            dim: self.rank,
            side: Side::Primal,
        }
    }

    pub fn curve_basis_id(&self) -> BasisId {
        BasisId {
            form: Form::Lorentzian,
            dim: self.rank,
            side: Side::Dual,
        }
    }

    pub fn divisor(&self, coords: &[i64]) -> Vector {
        Vector::from_ints(coords, self.divisor_basis_id())
    }

    pub fn curve(&self, coords: &[i64]) -> Vector {
        Vector::from_ints(coords, self.curve_basis_id())
    }

    /// Index of `E_i` (point) in the basis.
    pub fn point_index(&self, i: u8) -> Option<usize> {
        self.elems.iter().position(|e| *e == BasisElem::Point(i))
    }

    /// Index of `E_ij` in the basis (n=6 only), in either index order.
    pub fn line_index(&self, i: u8, j: u8) -> Option<usize> {
        let (a, b) = (i.min(j), i.max(j));
        self.elems.iter().position(|e| *e == BasisElem::Line(a, b))
    }

    pub fn point_labels(&self) -> Vec<u8> {
        points(self.id)
    }

    /// Parses a class such as `2H-E1-E23` or `l-e12+e3`. Upper-case symbols give a divisor,
    /// lower-case a curve.
    pub fn parse_class(&self, text: &str) -> Result<Vector, CatalogError> {
        let bad = || CatalogError::BadClass(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let upper = s.contains(['H', 'E']);
        let lower = s.contains(['l', 'e']);
        if upper == lower {
            return Err(bad());
        }
        let mut coords = vec![0i64; self.rank];
        let bytes = s.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let mut sign = 1;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -1;
                }
                pos += 1;
            } else if pos > 0 {
                return Err(bad());
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coef: i64 = if start == pos {
                1
            } else {
                s[start..pos].parse().map_err(|_| bad())?
            };
            let sym = *bytes.get(pos).ok_or_else(bad)?;
            pos += 1;
            let dstart = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let digits: Vec<u8> = bytes[dstart..pos].iter().map(|b| b - b'0').collect();
            let idx = match (sym, digits.as_slice()) {
                (b'H' | b'l', []) => 0,
                (b'E' | b'e', [i]) => self.point_index(*i).ok_or_else(bad)?,
                (b'E' | b'e', [i, j]) if i != j => self.line_index(*i, *j).ok_or_else(bad)?,
                _ => return Err(bad()),
            };
            coords[idx] += sign * coef;
        }
        Ok(if upper {
            self.divisor(&coords)
        } else {
            self.curve(&coords)
        })
    }

    /// Human-readable form of an integral class, e.g. `2l-e12-e13`.
    pub fn format_class(&self, v: &Vector) -> String {
        let labels = match v.basis.side {
            Side::Primal => &self.divisor_basis,
            Side::Dual => &self.curve_basis,
        };
        let mut out = String::new();
        for (c, name) in v.coords.iter().zip(labels) {
            let text = crate::kernel::format_scalar(c);
            if text == "0" {
                continue;
            }
            let (neg, mag) = match text.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, text),
            };
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if mag != "1" {
                out.push_str(&mag);
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Canonical form of a boundary label: a sorted subset of `1..=n`.
    pub fn canonical_label(&self, subset: &[u8]) -> Result<Vec<u8>, CatalogError> {
        let n = self.n as u8;
        let mut s: Vec<u8> = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != subset.len() || s.iter().any(|&i| i == 0 || i > n) {
            return Err(CatalogError::NonCanonicalLabel(subset.to_vec()));
        }
        let complement: Vec<u8> = (1..=n).filter(|i| !s.contains(i)).collect();
        let canon = match (self.id, s.len()) {
            (_, 2) => s,
            (SpaceId::M05, 3) => complement,
            (SpaceId::M06, 4) => complement,
            (SpaceId::M06, 3) => {
                if s.contains(&6) {
                    s
                } else {
                    complement
                }
            }
            _ => return Err(CatalogError::NonCanonicalLabel(subset.to_vec())),
        };
        Ok(canon)
    }

    /// All canonical boundary labels in catalog order.
    pub fn boundary_labels(&self) -> Vec<Vec<u8>> {
        let n = self.n as u8;
        let mut out = Vec::new();
        // Exceptional divisors over points first, then lines, then the remaining boundary.
        for i in 1..n {
            out.push(vec![i, n]);
        }
        if self.id == SpaceId::M06 {
            for i in 1..n {
                for j in i + 1..n {
                    out.push(vec![i, j, n]);
                }
            }
        }
        for i in 1..n {
            for j in i + 1..n {
                out.push(vec![i, j]);
            }
        }
        out
    }

    /// Class of the boundary divisor with the given label.
    pub fn boundary_class(&self, label: &[u8]) -> Result<Vector, CatalogError> {
        let canon = self.canonical_label(label)?;
        if canon.as_slice() != label {
            let mut sorted = label.to_vec();
            sorted.sort_unstable();
            if sorted != canon {
                return Err(CatalogError::NonCanonicalLabel(label.to_vec()));
            }
        }
        let n = self.n as u8;
        let mut coords = vec![0i64; self.rank];
        match self.id {
            SpaceId::M06 => match canon.as_slice() {
                [i, 6] => coords[self.point_index(*i).unwrap()] = 1,
                [i, j, 6] => coords[self.line_index(*i, *j).unwrap()] = 1,
                [i, j] => {
                    let rest: Vec<u8> = (1..n).filter(|k| k != i && k != j).collect();
                    return Ok(self.delta(rest[0], rest[1], rest[2]));
                }
                _ => return Err(CatalogError::NonCanonicalLabel(label.to_vec())),
            },
            SpaceId::M05 => match canon.as_slice() {
                [i, 5] => coords[self.point_index(i - 1).unwrap()] = 1,
                [i, j] => {
                    coords[0] = 1;
                    for k in (1..n).filter(|k| k != i && k != j) {
                        coords[self.point_index(k - 1).unwrap()] = -1;
                    }
                }
                _ => return Err(CatalogError::NonCanonicalLabel(label.to_vec())),
            },
        }
        Ok(self.divisor(&coords))
    }

    /// `Δ_ijk = H - E_i - E_j - E_k - E_ij - E_ik - E_jk` on M̄0,6.
    pub fn delta(&self, i: u8, j: u8, k: u8) -> Vector {
        let mut coords = vec![0i64; self.rank];
        coords[0] = 1;
        for p in [i, j, k] {
            coords[self.point_index(p).expect("point index")] = -1;
        }
        for (a, b) in [(i, j), (i, k), (j, k)] {
            coords[self.line_index(a, b).expect("line index")] = -1;
        }
        self.divisor(&coords)
    }

    /// `KV_{ij,kh} = 2H - Σ E_α - E_ik - E_ih - E_jk - E_jh` on M̄0,6.
    pub fn keel_vermeire(&self, ij: [u8; 2], kh: [u8; 2]) -> Vector {
        let mut coords = vec![0i64; self.rank];
        coords[0] = 2;
        for p in self.point_labels() {
            coords[self.point_index(p).unwrap()] = -1;
        }
        for a in ij {
            for b in kh {
                coords[self.line_index(a, b).expect("line index")] -= 1;
            }
        }
        self.divisor(&coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{int, pair};

    #[test]
    fn ranks_and_labels() {
        let m6 = build_space(6).unwrap();
        assert_eq!(m6.rank, 16);
        assert_eq!(m6.divisor_basis[6], "E12");
        assert_eq!(m6.curve_basis[15], "e45");
        let m5 = build_space(5).unwrap();
        assert_eq!(m5.rank, 5);
        assert_eq!(m5.divisor_basis, vec!["H", "E0", "E1", "E2", "E3"]);
        assert!(build_space(7).is_err());
    }

    #[test]
    fn basic_pairings() {
        let s = build_space(6).unwrap();
        let p = |d: &str, c: &str| {
            pair(&s.parse_class(d).unwrap(), &s.parse_class(c).unwrap()).unwrap()
        };
        assert_eq!(p("H", "l"), int(1));
        assert_eq!(p("E1", "e1"), int(-1));
        assert_eq!(p("E12", "e34"), int(0));
        assert_eq!(p("H-E1-E2-E3-E12-E13-E23", "l-e1-e23"), int(-1));
    }

    #[test]
    fn parse_and_format_round_trip() {
        let s = build_space(6).unwrap();
        for text in [
            "2l-e12-e13-e14-e25-e35-e45",
            "l-e1-e2+e12",
            "2e1-e12-e13-e14-e15",
            "H",
        ] {
            assert_eq!(s.format_class(&s.parse_class(text).unwrap()), text);
        }
        assert!(s.parse_class("E16").is_err());
        assert!(s.parse_class("H-e1").is_err());
    }

    #[test]
    fn dictionary_values() {
        let s = build_space(6).unwrap();
        assert_eq!(
            s.boundary_class(&[1, 6]).unwrap(),
            s.parse_class("E1").unwrap()
        );
        assert_eq!(
            s.boundary_class(&[1, 2, 6]).unwrap(),
            s.parse_class("E12").unwrap()
        );
        assert_eq!(
            s.boundary_class(&[4, 5]).unwrap(),
            s.parse_class("H-E1-E2-E3-E12-E13-E23").unwrap()
        );
        assert_eq!(s.boundary_labels().len(), 25);
        assert!(s.boundary_class(&[1, 2, 3]).is_err());
        let t = build_space(5).unwrap();
        assert_eq!(
            t.boundary_class(&[1, 5]).unwrap(),
            t.parse_class("E0").unwrap()
        );
        assert_eq!(
            t.boundary_class(&[1, 2]).unwrap(),
            t.parse_class("H-E2-E3").unwrap()
        );
        assert_eq!(t.boundary_labels().len(), 10);
    }

    #[test]
    fn keel_vermeire_formula() {
        let s = build_space(6).unwrap();
        assert_eq!(
            s.keel_vermeire([1, 3], [2, 4]),
            s.parse_class("2H-E1-E2-E3-E4-E5-E12-E14-E23-E34").unwrap()
        );
    }
}
