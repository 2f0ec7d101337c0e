use std::sync::OnceLock;

use negcone_core::catalog::{Catalog, Group, GroupKind};
use negcone_core::kernel::{
    cone_member, extreme_rays, format_scalar, parse_scalar, verify_answer, BasisId,
    InequalitySystem, Scalar, Vector,
};
use negcone_core::nefmin::{distinct_sweeps, qnef_lp, qnef_rref, CurveSet, FaceOracle};
use negcone_core::report::Num;
use num_bigint::BigInt;
use proptest::prelude::*;

fn m06() -> &'static (Catalog, Group) {
    static CELL: OnceLock<(Catalog, Group)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cat = Catalog::standard(6).unwrap();
        let g = Group::build(&cat, GroupKind::Full).unwrap();
        (cat, g)
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Scalar::new(BigInt::from(n), BigInt::from(d)))
}

fn int_vec(dim: usize, range: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-range..=range, dim)
}

fn subset_of(n: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..n, 1..=max).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scalar_text_round_trip(s in scalar()) {
        prop_assert_eq!(parse_scalar(&format_scalar(&s)).unwrap(), s);
    }

    #[test]
    fn num_round_trip_through_json(s in scalar()) {
        let n = Num::from_scalar(&s);
        let text = serde_json::to_string(&n).unwrap();
        let back: Num = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_scalar().unwrap(), s);
    }

    #[test]
    fn membership_answers_verify(
        gens in prop::collection::vec(int_vec(4, 5), 1..7),
        target in int_vec(4, 6),
    ) {
        let b = BasisId::euclidean(4);
        let gens: Vec<Vector> = gens.iter().map(|g| Vector::from_ints(g, b)).collect();
        let t = Vector::from_ints(&target, b);
        let ans = cone_member(&t, &gens).unwrap();
        prop_assert!(verify_answer(&t, &gens, &ans));
    }

    #[test]
    fn dd_rays_are_extreme_points_of_the_system(rows in prop::collection::vec(int_vec(4, 4), 0..8)) {
        // The orthant rows keep the cone pointed.
        let b = BasisId::euclidean(4);
        let mut sys = InequalitySystem::new(b.dual());
        for i in 0..4 {
            let mut e = vec![0i64; 4];
            e[i] = 1;
            sys.inequalities.push(Vector::from_ints(&e, b.dual()));
        }
        sys.inequalities.extend(rows.iter().map(|r| Vector::from_ints(r, b.dual())));
        let rays = extreme_rays(&sys).unwrap();
        for r in &rays {
            prop_assert!(!r.is_zero());
            prop_assert!(sys.contains(r).unwrap());
            let tight: Vec<Vec<Scalar>> = sys
                .inequalities
                .iter()
                .filter(|f| negcone_core::kernel::pair(f, r).unwrap() == Scalar::from_integer(0.into()))
                .map(|f| f.coords.clone())
                .collect();
            prop_assert_eq!(negcone_core::kernel::linalg::rank(&tight), 3);
        }
        // Every ray of the system is a nonnegative combination of the computed rays.
        for i in 0..4 {
            let mut e = vec![0i64; 4];
            e[i] = 1;
            let p = Vector::from_ints(&e, b);
            if sys.contains(&p).unwrap() {
                prop_assert!(cone_member(&p, &rays).unwrap().is_member());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_invariant(g in 0usize..720, d in 0usize..40, c in 0usize..95) {
        let (cat, group) = m06();
        let e = &group.elements[g];
        let d2 = e.divisor_perm[d].expect("S6 preserves the divisor catalog");
        prop_assert_eq!(cat.pair(d2, e.curve_perm[c]), cat.pair(d, c));
    }

    #[test]
    fn qnef_routes_agree(ids in subset_of(95, 5)) {
        let (cat, _) = m06();
        prop_assume!(distinct_sweeps(cat, &ids));
        let a = qnef_rref(cat, &ids);
        let b = qnef_lp(cat, &ids);
        prop_assert_eq!(a.is_some(), b.is_some());
        for cert in a.iter().chain(b.iter()) {
            prop_assert!(cert.verify(cat));
            prop_assert!(cert.weights.keys().all(|c| ids.contains(c)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closure_is_equivariant(g in 0usize..720, ids in subset_of(95, 3)) {
        let (cat, group) = m06();
        let face = FaceOracle::new(cat);
        let perm = &group.elements[g].curve_perm;
        let set = CurveSet::from_ids(&ids);
        prop_assert_eq!(face.closure_of_set(set.map(perm)), face.closure_of_set(set).map(perm));
    }

    #[test]
    fn closure_is_monotone_and_idempotent(ids in subset_of(95, 4), extra in subset_of(95, 2)) {
        let (cat, _) = m06();
        let face = FaceOracle::new(cat);
        let small = CurveSet::from_ids(&ids);
        let big = small.union(CurveSet::from_ids(&extra));
        let cs = face.closure_of_set(small);
        let cb = face.closure_of_set(big);
        prop_assert!(small.is_subset(cs));
        prop_assert!(cs.is_subset(cb));
        prop_assert_eq!(face.closure_of_set(cs), cs);
    }
}
