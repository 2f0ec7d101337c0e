//! Self-checks that validate the dictionary and catalogs.

use serde::Serialize;

use super::action::{orbits_of_ids, s_action, Group};
use super::Catalog;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    /// First offending item, or a summary when the check passed.
    pub detail: String,
    /// A failing check makes the catalog unusable (exit code 3 in the CLI).
    pub fatal: bool,
}

/// A pair (divisor, curve) breaking the sign pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignViolation {
    pub divisor: usize,
    pub curve: usize,
    pub value: i64,
}

/// Every curve is negative exactly on its swept divisor.
pub fn sign_pattern_violations(cat: &Catalog) -> Vec<SignViolation> {
    let mut out = Vec::new();
    for (c, curve) in cat.curves.iter().enumerate() {
        for d in 0..cat.divisors.len() {
            let v = cat.pair(d, c);
            if (v < 0) != (d == curve.swept) {
                out.push(SignViolation {
                    divisor: d,
                    curve: c,
                    value: v,
                });
            }
        }
    }
    out
}

/// Per curve: every off-divisor pairing is 0 or `-N(c).c`.
pub fn unimodality_flags(cat: &Catalog) -> Vec<bool> {
    cat.curves
        .iter()
        .enumerate()
        .map(|(c, curve)| {
            let self_pair = -cat.pair(curve.swept, c);
            (0..cat.divisors.len())
                .filter(|&d| d != curve.swept)
                .all(|d| matches!(cat.pair(d, c), v if v == 0 || v == self_pair))
        })
        .collect()
}

fn check(name: &str, failure: Option<String>, ok: String, fatal: bool) -> InvariantCheck {
    InvariantCheck {
        name: name.to_string(),
        passed: failure.is_none(),
        detail: failure.unwrap_or(ok),
        fatal,
    }
}

/// Runs the catalog invariant suite.
pub fn check_invariants(cat: &Catalog, group: Option<&Group>) -> Vec<InvariantCheck> {
    let mut out = Vec::new();
    let viol = sign_pattern_violations(cat);
    let describe = |v: &SignViolation| {
        format!(
            "{} . {} = {} (swept divisor {})",
            cat.divisors[v.divisor].name,
            cat.curve_name(v.curve),
            v.value,
            cat.swept_name(v.curve)
        )
    };
    out.push(check(
        "sign-pattern",
        viol.iter()
            .find(|v| v.divisor == cat.curves[v.curve].swept)
            .map(describe),
        format!(
            "{} curves negative on their swept divisor",
            cat.curves.len()
        ),
        true,
    ));
    out.push(check(
        "divisors-in-M",
        viol.iter()
            .find(|v| v.divisor != cat.curves[v.curve].swept)
            .map(describe),
        format!(
            "{} divisors nonnegative off their own curves",
            cat.divisors.len()
        ),
        true,
    ));

    let n = cat.space.n as u8;
    let mut closure_c = None;
    let mut closure_d = None;
    for i in 1..n {
        let mut perm: Vec<u8> = (1..=n).collect();
        perm.swap(i as usize - 1, i as usize);
        let action = match s_action(&cat.space, &perm) {
            Ok(a) => a,
            Err(e) => {
                closure_c.get_or_insert(format!("({} {}): {e}", i, i + 1));
                continue;
            }
        };
        for c in 0..cat.curves.len() {
            if cat
                .find_curve(&action.apply_curve(cat.curve_ints(c)))
                .is_none()
            {
                closure_c.get_or_insert(format!(
                    "({} {}) moves {} out of the catalog",
                    i,
                    i + 1,
                    cat.curve_name(c)
                ));
            }
        }
        for d in 0..cat.divisors.len() {
            if cat
                .find_divisor(&action.apply_divisor(cat.divisor_ints(d)))
                .is_none()
            {
                closure_d.get_or_insert(format!(
                    "({} {}) moves {} out of the catalog",
                    i,
                    i + 1,
                    cat.divisors[d].name
                ));
            }
        }
    }
    out.push(check(
        "curves-closed",
        closure_c,
        "adjacent transpositions permute the curves".into(),
        true,
    ));
    out.push(check(
        "divisors-closed",
        closure_d,
        "adjacent transpositions permute the divisors".into(),
        false,
    ));

    if let Some(g) = group {
        let orbit_c = orbits_of_ids(cat.curves.len(), &g.curve_perms());
        let mut sizes: Vec<usize> = orbit_c.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        out.push(check(
            "curve-orbits",
            None,
            format!("{} orbits, sizes {:?}", sizes.len(), sizes),
            false,
        ));
        if g.divisors_closed() {
            let perms: Vec<Vec<usize>> = g
                .elements
                .iter()
                .map(|e| e.divisor_perm.iter().map(|x| x.unwrap()).collect())
                .collect();
            let refs: Vec<&[usize]> = perms.iter().map(Vec::as_slice).collect();
            let mut sizes: Vec<usize> = orbits_of_ids(cat.divisors.len(), &refs)
                .iter()
                .map(Vec::len)
                .collect();
            sizes.sort_unstable();
            out.push(check(
                "divisor-orbits",
                None,
                format!("{} orbits, sizes {:?}", sizes.len(), sizes),
                false,
            ));
        }
    }
    let flags = unimodality_flags(cat);
    let bad = flags.iter().filter(|f| !**f).count();
    out.push(check(
        "unimodality",
        None,
        format!("{bad} non-unimodal curves"),
        false,
    ));
    out
}

/// True when no fatal check failed.
pub fn catalog_usable(checks: &[InvariantCheck]) -> bool {
    checks.iter().all(|c| c.passed || !c.fatal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalogs_pass() {
        for n in [5, 6] {
            let cat = Catalog::standard(n).unwrap();
            let g = cat.default_group().unwrap();
            let checks = check_invariants(&cat, Some(&g));
            assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        }
    }

    #[test]
    fn minus_two_curves_are_the_only_non_unimodal_ones() {
        let cat = Catalog::standard(6).unwrap();
        let flags = unimodality_flags(&cat);
        let bad: Vec<usize> = (0..95).filter(|&c| !flags[c]).collect();
        assert_eq!(bad.len(), 15);
        for c in bad {
            let self_pair = cat.pair(cat.curves[c].swept, c);
            assert_eq!(self_pair, -2, "{}", cat.curve_name(c));
        }
        assert!(flags[cat.curve_id("e12").unwrap()]);
        assert!(!flags[cat.curve_id("2e1-e12-e13-e14-e15").unwrap()]);
        assert!(unimodality_flags(&Catalog::standard(5).unwrap())
            .iter()
            .all(|f| *f));
    }
}
