//! Regression fixtures: displayed identities between negative curves, the face
//! equalities of the covering classes, and the M̄0,5 identities.

use std::fmt::Write as _;

use serde::Serialize;

use crate::catalog::{int_coords, pair_ints, Catalog, Group, Space};
use crate::error::EngineError;
use crate::face::{face_of, face_rays};
use crate::kernel::{cone_member, verify_answer, DdOptions, Vector};
use crate::nefmin::{qnef_generate, FaceOracle};

use super::standard_covering_classes;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureResult {
    pub group: String,
    pub name: String,
    pub passed: bool,
    /// Instance count on success, the first offending instance otherwise.
    pub detail: String,
}

#[derive(Default)]
struct Suite {
    results: Vec<FixtureResult>,
}

impl Suite {
    fn push(
        &mut self,
        group: &str,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) {
        self.results.push(FixtureResult {
            group: group.into(),
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Records a family of instances: passes when every instance does.
    fn family<I: IntoIterator<Item = Result<(), String>>>(
        &mut self,
        group: &str,
        name: &str,
        items: I,
    ) {
        let mut count = 0;
        for r in items {
            if let Err(e) = r {
                self.push(group, name, false, e);
                return;
            }
            count += 1;
        }
        self.push(group, name, count > 0, format!("{count} instances"));
    }
}

type Ints = Vec<i64>;

fn add(a: &[i64], b: &[i64]) -> Ints {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale(k: i64, a: &[i64]) -> Ints {
    a.iter().map(|x| k * x).collect()
}

fn sum(terms: &[Ints]) -> Ints {
    terms
        .iter()
        .skip(1)
        .fold(terms[0].clone(), |acc, t| add(&acc, t))
}

/// Kapranov-basis builder for classes with explicit indices.
struct K<'a> {
    space: &'a Space,
}

impl K<'_> {
    fn zero(&self) -> Ints {
        vec![0; self.space.rank]
    }

    fn h(&self) -> Ints {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    fn e(&self, i: u8) -> Ints {
        let mut v = self.zero();
        v[self.space.point_index(i).expect("point")] = 1;
        v
    }

    fn ee(&self, i: u8, j: u8) -> Ints {
        let mut v = self.zero();
        v[self.space.line_index(i, j).expect("line")] = 1;
        v
    }

    /// `2e_j - Σ_α e_jα`.
    fn minus2(&self, j: u8) -> Ints {
        let mut v = scale(2, &self.e(j));
        for a in self.space.point_labels().into_iter().filter(|&a| a != j) {
            v = add(&v, &scale(-1, &self.ee(j, a)));
        }
        v
    }

    fn lin(&self, terms: &[(i64, Ints)]) -> Ints {
        terms
            .iter()
            .fold(self.zero(), |acc, (k, t)| add(&acc, &scale(*k, t)))
    }

    fn parse(&self, text: &str) -> Ints {
        int_coords(&self.space.parse_class(text).expect("fixture class parses"))
    }

    fn show(&self, v: &[i64]) -> String {
        self.space.format_class(&self.space.curve(v))
    }
}

fn injections(k: usize, n: u8) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &out {
            for x in (1..=n).filter(|x| !p.contains(x)) {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Checks `lhs == rhs` and that every summand is a catalog curve.
fn identity(cat: &Catalog, k: &K, lhs: &[Ints], rhs: &[Ints]) -> Result<(), String> {
    for t in lhs.iter().chain(rhs) {
        if cat.find_curve(t).is_none() {
            return Err(format!("{} is not a catalog curve", k.show(t)));
        }
    }
    let (a, b) = (sum(lhs), sum(rhs));
    if a != b {
        return Err(format!("{} != {}", k.show(&a), k.show(&b)));
    }
    Ok(())
}

/// Checks that catalog curves sum to `target`, which need not be a catalog curve.
fn decomposes(cat: &Catalog, k: &K, terms: &[Ints], target: &[i64]) -> Result<(), String> {
    if let Some(t) = terms.iter().find(|t| cat.find_curve(t).is_none()) {
        return Err(format!("{} is not a catalog curve", k.show(t)));
    }
    let total = sum(terms);
    if total != target {
        return Err(format!("{} != {}", k.show(&total), k.show(target)));
    }
    Ok(())
}

fn in_orbit(group: &Group, v: &[i64], rep: &[i64]) -> bool {
    group.curve_class_orbit(rep).contains(v)
}

fn ids_of(cat: &Catalog, k: &K, names: &[&str]) -> Vec<usize> {
    let mut ids: Vec<usize> = names
        .iter()
        .map(|n| {
            cat.find_curve(&k.parse(n))
                .expect("fixture curve in catalog")
        })
        .collect();
    ids.sort_unstable();
    ids
}

/// Divisor coordinates `d`, `m_i`, `m_ij` of `D = dH - Σ m_i E_i - Σ m_ij E_ij`.
struct M<'a> {
    space: &'a Space,
    v: Ints,
}

impl M<'_> {
    fn d(&self) -> i64 {
        self.v[0]
    }
    fn m(&self, i: u8) -> i64 {
        -self.v[self.space.point_index(i).expect("point")]
    }
    fn mm(&self, i: u8, j: u8) -> i64 {
        -self.v[self.space.line_index(i, j).expect("line")]
    }
}

fn primitive_ints(v: &Vector) -> Ints {
    int_coords(&v.primitive())
}

fn divisor_sum(cat: &Catalog, terms: &[(i64, &str)]) -> Result<Ints, String> {
    let mut out = vec![0; cat.rank()];
    for (k, name) in terms {
        let d = cat
            .divisor_id(name)
            .ok_or_else(|| format!("{name} is not a catalog divisor"))?;
        out = add(&out, &scale(*k, cat.divisor_ints(d)));
    }
    Ok(out)
}

/// Runs every fixture. The M̄0,6 group must be the full S6.
pub fn fixtures(
    m05: &Catalog,
    m06: &Catalog,
    s6: &Group,
) -> Result<Vec<FixtureResult>, EngineError> {
    let mut s = Suite::default();
    relationships(&mut s, m06, s6);
    orbit_facts(&mut s, m06, s6);
    subset_facts(&mut s, m06, s6);
    face_facts(&mut s, m06)?;
    example_m05(&mut s, m05)?;
    Ok(s.results)
}

fn relationships(s: &mut Suite, cat: &Catalog, s6: &Group) {
    let k = K { space: &cat.space };
    let g = "relationships";
    s.family(
        g,
        "(l-ei-ej+eij)+(ei-eik) = (l-ej-eik)+eij",
        injections(3, 5).into_iter().map(|p| {
            let (i, j, kk) = (p[0], p[1], p[2]);
            identity(
                cat,
                &k,
                &[
                    k.lin(&[(1, k.h()), (-1, k.e(i)), (-1, k.e(j)), (1, k.ee(i, j))]),
                    k.lin(&[(1, k.e(i)), (-1, k.ee(i, kk))]),
                ],
                &[
                    k.lin(&[(1, k.h()), (-1, k.e(j)), (-1, k.ee(i, kk))]),
                    k.ee(i, j),
                ],
            )
        }),
    );
    let alt = identity(
        cat,
        &k,
        &[k.parse("e12"), k.parse("2l-e1-e2-e3-e45")],
        &[k.parse("l-e1-e2+e12"), k.parse("l-e3-e45")],
    )
    .and_then(|_| {
        let a = ids_of(cat, &k, &["e12", "2l-e1-e2-e3-e45"]);
        let b = ids_of(cat, &k, &["l-e1-e2+e12", "e1-e13"]);
        if s6.canonical_curve_set(&a) == s6.canonical_curve_set(&b) {
            Ok(())
        } else {
            Err("left-hand sides are not S6-equivalent".into())
        }
    });
    s.family(g, "alternate form e12+(2l-e1-e2-e3-e45)", [alt]);

    // The last summand is e_j - e_jk: with e_j - e_ij the sides differ by e_ij - e_jk.
    s.family(
        g,
        "(2ej-Σejα)+(l-ei-ej+eij)+(ei-eik) = (l-ejh-ejm-ehm-eik)+ehm+(ej-ejk)",
        injections(5, 5).into_iter().map(|p| {
            let (i, j, kk, h, m) = (p[0], p[1], p[2], p[3], p[4]);
            identity(
                cat,
                &k,
                &[
                    k.minus2(j),
                    k.lin(&[(1, k.h()), (-1, k.e(i)), (-1, k.e(j)), (1, k.ee(i, j))]),
                    k.lin(&[(1, k.e(i)), (-1, k.ee(i, kk))]),
                ],
                &[
                    k.lin(&[
                        (1, k.h()),
                        (-1, k.ee(j, h)),
                        (-1, k.ee(j, m)),
                        (-1, k.ee(h, m)),
                        (-1, k.ee(i, kk)),
                    ]),
                    k.ee(h, m),
                    k.lin(&[(1, k.e(j)), (-1, k.ee(j, kk))]),
                ],
            )
        }),
    );
    let used = identity(
        cat,
        &k,
        &[k.parse("l-e1-e2+e12"), k.parse("e2-e24"), k.minus2(1)],
        &[
            k.parse("l-e13-e15-e35-e24"),
            k.parse("e35"),
            k.parse("e1-e14"),
        ],
    );
    s.family(g, "instance (l-e1-e2+e12)+(e2-e24)+(2e1-Σe1i)", [used]);

    s.family(
        g,
        "(2ej-Σejα)+(l-ei-ej+eij)+ejk = (ej-ejm)+(l-ei-ejh)",
        injections(5, 5).into_iter().map(|p| {
            let (i, j, kk, h, m) = (p[0], p[1], p[2], p[3], p[4]);
            identity(
                cat,
                &k,
                &[
                    k.minus2(j),
                    k.lin(&[(1, k.h()), (-1, k.e(i)), (-1, k.e(j)), (1, k.ee(i, j))]),
                    k.ee(j, kk),
                ],
                &[
                    k.lin(&[(1, k.e(j)), (-1, k.ee(j, m))]),
                    k.lin(&[(1, k.h()), (-1, k.e(i)), (-1, k.ee(j, h))]),
                ],
            )
        }),
    );
    s.family(
        g,
        "(2ej-Σejα)+eij+ejk = (ej-ejm)+(ej-ejh)",
        injections(5, 5).into_iter().map(|p| {
            let (i, j, kk, h, m) = (p[0], p[1], p[2], p[3], p[4]);
            identity(
                cat,
                &k,
                &[k.minus2(j), k.ee(i, j), k.ee(j, kk)],
                &[
                    k.lin(&[(1, k.e(j)), (-1, k.ee(j, m))]),
                    k.lin(&[(1, k.e(j)), (-1, k.ee(j, h))]),
                ],
            )
        }),
    );
}

fn orbit_facts(s: &mut Suite, cat: &Catalog, s6: &Group) {
    let k = K { space: &cat.space };
    let g = "orbits";
    let same = |a: &str, b: &str| -> Result<(), String> {
        if in_orbit(s6, &k.parse(a), &k.parse(b)) {
            Ok(())
        } else {
            Err(format!("{a} and {b} lie in different orbits"))
        }
    };
    s.family(g, "eij ~ l-ei-ej+eij", [same("e12", "l-e1-e2+e12")]);
    s.family(
        g,
        "2l-ei-ej-ek-ehl ~ l-ei-ejk ~ ei-eij",
        [
            same("2l-e1-e2-e3-e45", "l-e1-e23"),
            same("l-e1-e23", "e1-e12"),
        ],
    );
    s.family(
        g,
        "2ei-Σeij ~ l-e12-e13-e23-e45",
        [same("2e1-e12-e13-e14-e15", "l-e12-e13-e23-e45")],
    );
    let div_same = {
        let a = cat.divisor_id("Delta123").expect("Delta123");
        let b = cat.divisor_id("E1").expect("E1");
        s6.elements.iter().any(|e| e.divisor_perm[a] == Some(b))
    };
    s.push(g, "Delta_ijk ~ E_i", div_same, "");

    // P(c) = {D : c.D > 0}, read over boundary divisors.
    let positive = |c: &str| -> Vec<String> {
        let id = cat.curve_id(c).expect("fixture curve");
        let mut names: Vec<String> = (0..cat.divisors.len())
            .filter(|&d| cat.pair(d, id) > 0 && !cat.divisors[d].name.starts_with("KV"))
            .map(|d| cat.divisors[d].name.clone())
            .collect();
        names.sort();
        names
    };
    let expect = |c: &str, want: &[&str]| -> Result<(), String> {
        let got = positive(c);
        let mut want: Vec<String> = want.iter().map(|w| w.to_string()).collect();
        want.sort();
        if got == want {
            Ok(())
        } else {
            Err(format!("P({c}) = {got:?}"))
        }
    };
    s.family(
        g,
        "boundary part of P(c)",
        [
            expect("2e1-e12-e13-e14-e15", &["E12", "E13", "E14", "E15"]),
            expect("e1-e12", &["E12", "Delta134", "Delta135", "Delta145"]),
            expect("e12", &["Delta123", "Delta124", "Delta125"]),
        ],
    );
}

fn subset_facts(s: &mut Suite, cat: &Catalog, s6: &Group) {
    let k = K { space: &cat.space };
    let reps: Vec<Ints> = standard_covering_classes(cat)
        .iter()
        .map(int_coords)
        .collect();
    let m2 = "2e1-e12-e13-e14-e15";
    let m2b = "2e2-e12-e23-e24-e25";
    let m2d = "2e4-e14-e24-e34-e45";
    // Generic form first, then the listed equivalent forms.
    let subsets: Vec<(&str, Vec<Vec<&str>>)> = vec![
        (
            "{e1-e12, l-e1-e2+e12}",
            vec![
                vec!["e1-e12", "l-e1-e2+e12"],
                vec!["2l-e1-e2-e3-e45", "l-e4-e5+e45"],
                vec!["l-e1-e23", "e23"],
            ],
        ),
        (
            "{2e1-Σe1i, l-e1-e2+e12, l-e1-e3+e13}",
            vec![
                vec![m2, "l-e1-e2+e12", "l-e1-e3+e13"],
                vec!["l-e12-e13-e23-e45", "e12", "e13"],
                vec!["l-e12-e13-e23-e45", "e12", "l-e4-e5+e45"],
            ],
        ),
        (
            "{l-e1-e23, e1-e14}",
            vec![
                vec!["l-e1-e23", "e1-e14"],
                vec!["2l-e1-e2-e4-e35", "e4-e34"],
                vec!["l-e1-e34", "l-e2-e35"],
            ],
        ),
        (
            "{2e1-Σe1i, 2e2-Σe2i, l-e1-e2+e12}",
            vec![
                vec![m2, m2b, "l-e1-e2+e12"],
                vec!["l-e12-e13-e23-e45", "l-e12-e14-e24-e35", "e12"],
                vec!["l-e12-e13-e23-e45", m2d, "l-e4-e5+e45"],
            ],
        ),
        (
            "{e1-e12, e12}",
            vec![
                vec!["e1-e12", "e12"],
                vec!["2l-e1-e2-e3-e45", "e45"],
                vec!["l-e1-e23", "l-e2-e3+e23"],
            ],
        ),
        (
            "{2e1-Σe1i, e12}",
            vec![
                vec![m2, "e12"],
                vec!["l-e12-e13-e23-e45", "l-e1-e2+e12"],
                vec!["l-e12-e13-e23-e45", "e45"],
            ],
        ),
        (
            "{e1-e12, l-e3-e14}",
            vec![
                vec!["e1-e12", "l-e3-e14"],
                vec!["l-e1-e23", "l-e2-e45"],
                vec!["l-e1-e23", "e1-e12"],
                vec!["2l-e1-e2-e3-e45", "e1-e12"],
            ],
        ),
        (
            "{2e1-Σe1i, e12, l-e1-e3+e13}",
            vec![
                vec![m2, "e12", "l-e1-e3+e13"],
                vec!["l-e12-e13-e23-e45", "l-e1-e2+e12", "e13"],
                vec!["l-e12-e13-e23-e45", "e12", "e45"],
                vec!["l-e12-e13-e23-e45", "l-e1-e2+e12", "l-e4-e5+e45"],
            ],
        ),
        (
            "{2e1-Σe1i, e12, e13}",
            vec![
                vec![m2, "e12", "e13"],
                vec!["l-e12-e13-e23-e45", "l-e1-e2+e12", "l-e1-e3+e13"],
                vec!["l-e12-e13-e23-e45", "l-e1-e2+e12", "e45"],
            ],
        ),
    ];
    for (name, forms) in &subsets {
        let canon: Vec<Vec<usize>> = forms
            .iter()
            .map(|f| s6.canonical_curve_set(&ids_of(cat, &k, f)))
            .collect();
        let ok = canon.iter().all(|c| *c == canon[0]);
        let detail = if ok {
            format!("{} forms", forms.len())
        } else {
            format!("forms of {name} are not S6-equivalent")
        };
        s.push(
            "subsets",
            format!("subset {name} equivalent forms"),
            ok,
            detail,
        );
    }

    // The first four subsets generate curves in the orbits of covering classes 1, 2, 2, 3.
    for ((name, forms), class) in subsets.iter().take(4).zip([0usize, 1, 1, 2]) {
        let mut items = Vec::new();
        for f in forms {
            let ids = ids_of(cat, &k, f);
            items.push(match qnef_generate(cat, &ids) {
                None => Err(format!("{f:?} does not generate")),
                Some(cert) => {
                    let v = primitive_ints(&cert.curve);
                    if in_orbit(s6, &v, &reps[class]) {
                        Ok(())
                    } else {
                        Err(format!("{f:?} generates {}", k.show(&v)))
                    }
                }
            });
        }
        s.family(
            "subsets",
            &format!("subset {name} generates covering class {}", class + 1),
            items,
        );
    }

    // Identities used while eliminating the non-generating subsets.
    let class_of = |v: &Ints, class: usize| -> Result<(), String> {
        if in_orbit(s6, v, &reps[class]) {
            Ok(())
        } else {
            Err(format!(
                "{} is not in covering class {}",
                k.show(v),
                class + 1
            ))
        }
    };
    let plus =
        |terms: &[&str]| -> Ints { sum(&terms.iter().map(|t| k.parse(t)).collect::<Vec<_>>()) };
    let sweeps = |c: &str, d: &str| -> Result<(), String> {
        let id = cat.curve_id(c).ok_or_else(|| format!("{c} missing"))?;
        if cat.swept_name(id) == d {
            Ok(())
        } else {
            Err(format!("{c} sweeps {}", cat.swept_name(id)))
        }
    };
    s.family(
        "subsets",
        "subset {e1-e12, e12}: e1-e12+e12 = e1-e1a+e1a",
        (3..=5u8).map(|a| {
            identity(
                cat,
                &k,
                &[k.parse("e1-e12"), k.parse("e12")],
                &[k.lin(&[(1, k.e(1)), (-1, k.ee(1, a))]), k.ee(1, a)],
            )
        }),
    );
    s.family(
        "subsets",
        "subset {e1-e12, e12}: curves sweeping Delta123",
        [
            "l-e1-e23",
            "l-e2-e13",
            "l-e3-e12",
            "2l-e1-e2-e3-e45",
            "l-e12-e13-e23-e45",
        ]
        .map(|c| sweeps(c, "Delta123")),
    );
    s.family(
        "subsets",
        "subset {e1-e12, e12}: completions land in covering classes",
        [
            class_of(&plus(&["l-e1-e23", "e1-e14"]), 1),
            class_of(&plus(&["l-e2-e13", "e13"]), 0),
            class_of(&plus(&["l-e3-e12", "e12"]), 0),
            class_of(&plus(&["2l-e1-e2-e3-e45", "e1-e14"]), 1),
            class_of(&plus(&["l-e12-e13-e23-e45", "e12", "e13"]), 1),
        ],
    );
    s.family(
        "subsets",
        "subset {2e1-Σe1i, e12}: identities",
        [
            identity(
                cat,
                &k,
                &[k.parse("l-e1-e23"), k.parse("e12")],
                &[k.parse("l-e1-e2+e12"), k.parse("e2-e23")],
            ),
            identity(
                cat,
                &k,
                &[
                    k.parse("l-e2-e14"),
                    k.parse("e12"),
                    k.parse("l-e12-e13-e23-e45"),
                ],
                &[
                    k.parse("l-e14-e15-e45-e23"),
                    k.parse("e15"),
                    k.parse("l-e2-e13"),
                ],
            ),
            identity(
                cat,
                &k,
                &[k.parse("l-e1-e24"), k.parse("e12")],
                &[k.parse("l-e1-e2+e12"), k.parse("e2-e24")],
            ),
            identity(
                cat,
                &k,
                &[k.parse("l-e1-e24"), k.parse("e1-e14")],
                &[k.parse("l-e14-e24-e12-e35"), k.parse("e12"), k.parse("e35")],
            ),
            class_of(&plus(&["l-e3-e12", "e12"]), 0),
        ],
    );
    s.family(
        "subsets",
        "subset {2e1-Σe1i, e12}: curves sweeping Delta124",
        ["l-e4-e12", "l-e2-e14", "l-e1-e24", "l-e12-e14-e24-e35"].map(|c| sweeps(c, "Delta124")),
    );
    s.family(
        "subsets",
        "subset {e1-e12, l-e3-e14}: completions land in covering classes",
        [
            decomposes(
                cat,
                &k,
                &[k.parse("l-e1-e25"), k.parse("e1-e14")],
                &k.parse("l-e14-e25"),
            ),
            class_of(&plus(&["l-e1-e25", "e1-e14"]), 1),
            class_of(&plus(&["l-e5-e12", "l-e3-e14"]), 1),
            decomposes(
                cat,
                &k,
                &[
                    k.parse("l-e5-e13"),
                    k.parse("l-e1-e3+e13"),
                    k.parse("e1-e12"),
                ],
                &k.parse("2l-e3-e5-e12"),
            ),
            sweeps("l-e12-e15-e25-e34", "Delta125"),
        ],
    );
}

fn face_facts(s: &mut Suite, cat: &Catalog) -> Result<(), EngineError> {
    let k = K { space: &cat.space };
    let oracle = FaceOracle::new(cat);
    let g = "faces";
    let rays_of = |text: &str| -> Result<Vec<M<'_>>, EngineError> {
        let face = face_of(cat, &oracle, &cat.space.parse_class(text)?)?;
        Ok(face_rays(&face, DdOptions::default())?
            .iter()
            .map(|r| M {
                space: &cat.space,
                v: int_coords(&r.primitive()),
            })
            .collect())
    };
    let all = |rays: &[M], f: &dyn Fn(&M) -> bool| -> Result<(), String> {
        match rays.iter().find(|r| !f(r)) {
            None => Ok(()),
            Some(r) => Err(format!(
                "fails on ray {}",
                cat.space.format_class(&cat.space.divisor(&r.v))
            )),
        }
    };
    let others = [2u8, 3, 4, 5];

    let f1 = rays_of("l-e1")?;
    s.family(
        g,
        "class 1: face of l-e1",
        [
            all(&f1, &|r| r.d() == r.m(1)),
            all(&f1, &|r| {
                others
                    .iter()
                    .all(|&i| others.iter().all(|&j| i == j || r.mm(i, j) == 0))
            }),
            all(&f1, &|r| others.iter().all(|&i| r.m(i) == r.mm(1, i))),
        ],
    );

    let q2 = "l-e12-e34";
    let f2 = rays_of(q2)?;
    s.family(
        g,
        "class 2: face of l-e12-e34",
        [
            decomposes(
                cat,
                &k,
                &[k.parse("l-e1-e34"), k.parse("e1-e12")],
                &k.parse(q2),
            ),
            all(&f2, &|r| r.m(1) == r.m(2) && r.m(2) == r.mm(1, 2)),
            all(&f2, &|r| r.m(3) == r.m(4) && r.m(4) == r.mm(3, 4)),
            all(&f2, &|r| r.m(5) <= r.mm(1, 2).min(r.mm(3, 4))),
            all(&f2, &|r| (1..=4u8).all(|i| r.mm(i, 5) == 0)),
            all(&f2, &|r| {
                r.mm(1, 2) >= r.mm(1, 3) + r.mm(1, 4) && r.mm(1, 2) >= r.mm(2, 3) + r.mm(2, 4)
            }),
            all(&f2, &|r| {
                r.mm(3, 4) >= (r.mm(1, 3) + r.mm(2, 3)).max(r.mm(1, 4) + r.mm(2, 4))
            }),
        ],
    );
    let closure = oracle.closure_of_curve(&k.parse(q2))?;
    let mut vanish: Vec<Ints> = closure
        .ids()
        .iter()
        .map(|&c| cat.curve_ints(c).to_vec())
        .collect();
    vanish.push(k.parse(q2));
    let listed: [&[(i64, &str)]; 13] = [
        &[(1, "E5")],
        &[(1, "E13")],
        &[(1, "E14")],
        &[(1, "E23")],
        &[(1, "E24")],
        &[(1, "KV13,24")],
        &[(1, "KV14,23")],
        &[(1, "E2"), (1, "Delta234")],
        &[(1, "E1"), (1, "Delta134")],
        &[(1, "E4"), (1, "Delta124")],
        &[(1, "E3"), (1, "Delta123")],
        &[(1, "Delta125"), (1, "E15"), (1, "E25")],
        &[(1, "Delta345"), (1, "E35"), (1, "E45")],
    ];
    s.family(
        g,
        "class 2: listed divisors lie in L and in the cone of D",
        listed.iter().map(|terms| {
            let d = divisor_sum(cat, terms)?;
            match vanish.iter().find(|c| pair_ints(&d, c) != 0) {
                None => Ok(()),
                Some(c) => Err(format!("{terms:?} does not vanish on {}", k.show(c))),
            }
        }),
    );

    let q3 = "2l-e12-e13-e14-e25-e35-e45";
    let mut splits = vec![decomposes(
        cat,
        &k,
        &[
            k.parse("l-e1-e5+e15"),
            k.parse("l-e1-e5+e15"),
            k.minus2(1),
            k.minus2(5),
        ],
        &k.parse(q3),
    )];
    for p in [[2u8, 3, 4], [2, 4, 3], [3, 4, 2]] {
        let (i, j, kk) = (p[0], p[1], p[2]);
        let a = k.lin(&[
            (1, k.h()),
            (-1, k.ee(1, i)),
            (-1, k.ee(1, j)),
            (-1, k.ee(i, j)),
            (-1, k.ee(kk, 5)),
        ]);
        let b = k.lin(&[
            (1, k.h()),
            (-1, k.ee(i, 5)),
            (-1, k.ee(j, 5)),
            (-1, k.ee(i, j)),
            (-1, k.ee(1, kk)),
        ]);
        let eij = k.ee(i, j);
        splits.push(decomposes(cat, &k, &[a, b, eij.clone(), eij], &k.parse(q3)));
    }
    s.family(g, "class 3: both decompositions", splits);

    let f3 = rays_of(q3)?;
    let mid = [2u8, 3, 4];
    s.family(
        g,
        "class 3: face equalities",
        [
            all(&f3, &|r| {
                mid.iter()
                    .all(|&i| mid.iter().all(|&j| i == j || r.mm(i, j) == 0))
            }),
            all(&f3, &|r| mid.iter().all(|&i| r.mm(1, i) == r.mm(i, 5))),
            all(&f3, &|r| r.m(1) == r.m(5)),
            all(&f3, &|r| r.d() == r.m(1) + r.m(5) - r.mm(1, 5)),
            all(&f3, &|r| {
                2 * r.m(1) == (2..=5u8).map(|i| r.mm(1, i)).sum::<i64>()
            }),
        ],
    );
    let ray6 = class3_ray(&cat.space);
    let present = f3.iter().any(|r| r.v == ray6);
    s.push(
        g,
        "class 3: d=6 ray is a face ray",
        present,
        k_show_div(cat, &ray6),
    );
    let member = cone_member(&cat.space.divisor(&ray6), &cat.divisor_vectors())?;
    let valid = member.is_member()
        && verify_answer(&cat.space.divisor(&ray6), &cat.divisor_vectors(), &member);
    s.push(g, "class 3: d=6 ray lies in cone(D)", valid, "");
    let (ok, detail) = match divisor_sum(cat, &CLASS3_COMBINATION) {
        Ok(v) if v == ray6 => (true, String::new()),
        Ok(v) => (false, format!("sums to {}", k_show_div(cat, &v))),
        Err(e) => (false, e),
    };
    s.push(
        g,
        "class 3: 2Delta125+KV15,34+Delta135+Delta145+E1+E5+2E15 is the d=6 ray",
        ok,
        detail,
    );
    Ok(())
}

/// The d = 6 ray of the class-3 face: m1 = m5 = 4, m2 = m3 = m4 = 3, m15 = 2, m1i = mi5 = 2.
pub fn class3_ray(space: &Space) -> Ints {
    let mut v = vec![0i64; space.rank];
    v[0] = 6;
    for (i, m) in [(1u8, 4), (2, 3), (3, 3), (4, 3), (5, 4)] {
        v[space.point_index(i).expect("point")] = -m;
    }
    for (i, j) in [(1u8, 5u8), (1, 2), (1, 3), (1, 4), (2, 5), (3, 5), (4, 5)] {
        v[space.line_index(i, j).expect("line")] = -2;
    }
    v
}

/// `2Δ125 + KV15,34 + Δ135 + Δ145 + E1 + E5 + 2E15`.
pub const CLASS3_COMBINATION: [(i64, &str); 7] = [
    (2, "Delta125"),
    (1, "KV15,34"),
    (1, "Delta135"),
    (1, "Delta145"),
    (1, "E1"),
    (1, "E5"),
    (2, "E15"),
];

fn k_show_div(cat: &Catalog, v: &[i64]) -> String {
    cat.space.format_class(&cat.space.divisor(v))
}

fn example_m05(s: &mut Suite, cat: &Catalog) -> Result<(), EngineError> {
    let g = "m05";
    let p = |t: &str| int_coords(&cat.space.parse_class(t).expect("fixture class parses"));
    let in_d = |v: &Ints| cat.find_divisor(v).is_some();
    let lhs = p("2H-E0-E1-E2-E3");
    let (a, b) = (p("H-E0-E1"), p("H-E2-E3"));
    let ok = in_d(&a) && in_d(&b) && add(&a, &b) == lhs;
    s.push(g, "2H-ΣEi = (H-E0-E1)+(H-E2-E3)", ok, "");
    let pts = cat.space.point_labels();
    s.family(
        g,
        "H-Ei = (H-Ei-Ej)+Ej",
        pts.iter()
            .flat_map(|&i| pts.iter().filter(move |&&j| j != i).map(move |&j| (i, j)))
            .map(|(i, j)| {
                let hij = p(&format!("H-E{i}-E{j}"));
                let ej = p(&format!("E{j}"));
                if !in_d(&hij) || !in_d(&ej) {
                    return Err(format!("H-E{i}-E{j} or E{j} is not a boundary class"));
                }
                if add(&hij, &ej) == p(&format!("H-E{i}")) {
                    Ok(())
                } else {
                    Err(format!("fails for i={i}, j={j}"))
                }
            }),
    );
    let oracle = FaceOracle::new(cat);
    let face = face_of(cat, &oracle, &cat.space.parse_class("l-e3")?)?;
    let rays = face_rays(&face, DdOptions::default())?;
    let want = cat.space.parse_class("H-E3")?;
    let ok = rays.len() == 1 && rays[0].same_ray(&want);
    let mut detail = String::new();
    for r in &rays {
        let _ = write!(detail, "{} ", cat.space.format_class(r));
    }
    s.push(
        g,
        "face of l-e3 is the ray H-E3",
        ok,
        detail.trim_end().to_string(),
    );
    Ok(())
}

/// Whether every fixture passed.
pub fn all_passed(results: &[FixtureResult]) -> bool {
    !results.is_empty() && results.iter().all(|r| r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injection_counts() {
        assert_eq!(injections(3, 5).len(), 60);
        assert_eq!(injections(5, 5).len(), 120);
    }

    #[test]
    fn class3_combination_misses_the_ray_by_e3_plus_e4() {
        let cat = Catalog::standard(6).unwrap();
        let k = K { space: &cat.space };
        let combo = divisor_sum(&cat, &CLASS3_COMBINATION).unwrap();
        assert_eq!(
            add(&combo, &scale(-1, &k.parse("E3+E4"))),
            class3_ray(&cat.space)
        );
    }
}
