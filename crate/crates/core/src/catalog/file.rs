//! JSON interchange form of a catalog.

use serde::{Deserialize, Serialize};

use super::action::{orbits_of_ids, Group};
use super::{build_space, int_coords, Catalog, DivisorGen, DivisorLabel, NegativeCurve, SpaceId};
use crate::error::CatalogError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorEntry {
    pub name: String,
    pub label: DivisorLabel,
    pub class: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub class: Vec<i64>,
    pub swept: usize,
    pub family: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    pub curves: Vec<Vec<usize>>,
    pub divisors: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogFile {
    pub space: SpaceId,
    pub n: usize,
    pub divisor_basis: Vec<String>,
    pub curve_basis: Vec<String>,
    pub pairing: Vec<Vec<i64>>,
    pub divisors: Vec<DivisorEntry>,
    pub curves: Vec<CurveEntry>,
    #[serde(default)]
    pub orbits: OrbitPartition,
}

impl CatalogFile {
    pub fn from_catalog(cat: &Catalog, group: Option<&Group>) -> CatalogFile {
        let orbits = group
            .map(|g| {
                let curves = orbits_of_ids(cat.curves.len(), &g.curve_perms());
                let divisors = if g.divisors_closed() {
                    let perms: Vec<Vec<usize>> = g
                        .elements
                        .iter()
                        .map(|e| e.divisor_perm.iter().map(|x| x.unwrap()).collect())
                        .collect();
                    let refs: Vec<&[usize]> = perms.iter().map(Vec::as_slice).collect();
                    orbits_of_ids(cat.divisors.len(), &refs)
                } else {
                    Vec::new()
                };
                OrbitPartition { curves, divisors }
            })
            .unwrap_or_default();
        CatalogFile {
            space: cat.id(),
            n: cat.space.n,
            divisor_basis: cat.space.divisor_basis.clone(),
            curve_basis: cat.space.curve_basis.clone(),
            pairing: cat.space.pairing.clone(),
            divisors: cat
                .divisors
                .iter()
                .map(|d| DivisorEntry {
                    name: d.name.clone(),
                    label: d.label.clone(),
                    class: int_coords(&d.class),
                })
                .collect(),
            curves: cat
                .curves
                .iter()
                .map(|c| CurveEntry {
                    class: int_coords(&c.class),
                    swept: c.swept,
                    family: c.family.clone(),
                })
                .collect(),
            orbits,
        }
    }

    pub fn into_catalog(self) -> Result<Catalog, CatalogError> {
        let space = build_space(self.n)?;
        if space.id != self.space
            || space.divisor_basis != self.divisor_basis
            || space.curve_basis != self.curve_basis
            || space.pairing != self.pairing
        {
            return Err(CatalogError::Malformed(
                "basis or pairing differs from the documented order".into(),
            ));
        }
        let rank = space.rank;
        let check_len = |v: &[i64]| {
            if v.len() == rank {
                Ok(())
            } else {
                Err(CatalogError::Malformed(format!(
                    "vector of length {} in a rank {rank} space",
                    v.len()
                )))
            }
        };
        let mut divisors = Vec::new();
        for d in self.divisors {
            check_len(&d.class)?;
            divisors.push(DivisorGen {
                class: space.divisor(&d.class),
                label: d.label,
                name: d.name,
            });
        }
        let mut curves = Vec::new();
        for c in self.curves {
            check_len(&c.class)?;
            curves.push(NegativeCurve {
                class: space.curve(&c.class),
                swept: c.swept,
                family: c.family,
            });
        }
        Catalog::from_parts(space, curves, divisors)
    }
}

pub fn dump_json(cat: &Catalog, group: Option<&Group>) -> String {
    serde_json::to_string_pretty(&CatalogFile::from_catalog(cat, group))
        .expect("catalog serializes")
}

pub fn load_json(text: &str) -> Result<Catalog, CatalogError> {
    let file: CatalogFile =
        serde_json::from_str(text).map_err(|e| CatalogError::Malformed(e.to_string()))?;
    file.into_catalog()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cat = Catalog::standard(6).unwrap();
        let text = dump_json(&cat, None);
        let back = load_json(&text).unwrap();
        assert_eq!(back.curves, cat.curves);
        assert_eq!(back.divisors, cat.divisors);
    }

    #[test]
    fn wrong_length_rejected() {
        let cat = Catalog::standard(5).unwrap();
        let mut file = CatalogFile::from_catalog(&cat, None);
        file.curves[0].class.push(0);
        assert!(file.into_catalog().is_err());
    }
}
