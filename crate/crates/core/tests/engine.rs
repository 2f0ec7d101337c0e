use negcone_core::catalog::{Catalog, Group, GroupKind};
use negcone_core::face::{
    certify_containment, covered_by, face_of, face_rays, verify_effective_cone, Counterexample,
    Verdict, VerifyOptions,
};
use negcone_core::kernel::{cone_member, verify_answer, DdOptions, Vector};
use negcone_core::nefmin::{build_graph, nef_minimal_check, qnef_generate, FaceOracle};
use negcone_core::oracle::{crosscheck_qnef, facet_check, match_divisor, rays_of_m};
use negcone_core::report::contractions::reconstructs;
use negcone_core::report::{
    build_certificate, check_certificate, report_contractions, standard_covering_classes,
    CertificateFile, Num,
};
use negcone_core::EngineError;

fn standard(n: usize) -> (Catalog, Group) {
    let cat = Catalog::standard(n).unwrap();
    let group = cat.default_group().unwrap();
    (cat, group)
}

fn class(cat: &Catalog, text: &str) -> Vector {
    cat.space.parse_class(text).unwrap()
}

fn ids(cat: &Catalog, names: &[&str]) -> Vec<usize> {
    names
        .iter()
        .map(|n| {
            cat.curve_id(n)
                .unwrap_or_else(|| panic!("{n} not in catalog"))
        })
        .collect()
}

fn certificate(cat: &Catalog, group: &Group) -> CertificateFile {
    match verify_effective_cone(cat, group, VerifyOptions::default()).unwrap() {
        Verdict::Verified(cert) => build_certificate(cat, &cert, None, 7).unwrap(),
        Verdict::Refuted(c) => panic!("unexpected refutation: {c:?}"),
    }
}

#[test]
fn m05_certificate_round_trips_and_checks() {
    let (cat, group) = standard(5);
    let file = certificate(&cat, &group);
    let text = serde_json::to_string_pretty(&file).unwrap();
    let back: CertificateFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back, file);
    assert!(check_certificate(&back, &cat).is_ok());
    assert_eq!(file.classification.representatives.len(), 2);
}

#[test]
fn m05_certificate_is_deterministic() {
    let (cat, group) = standard(5);
    let a = serde_json::to_string(&certificate(&cat, &group)).unwrap();
    let b = serde_json::to_string(&certificate(&cat, &group)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tampered_certificates_are_rejected() {
    let (cat, group) = standard(5);
    let file = certificate(&cat, &group);

    let mut bad = file.clone();
    let w = bad
        .memberships
        .iter_mut()
        .flatten()
        .flatten()
        .next()
        .unwrap();
    w.weight = Num::Text("1/3".into());
    assert!(check_certificate(&bad, &cat).is_err());

    let mut bad = file.clone();
    bad.q_rays.pop();
    assert!(check_certificate(&bad, &cat).is_err());

    let mut bad = file;
    bad.generators.curves[0].class[0] = Num::Int(7);
    assert!(check_certificate(&bad, &cat).is_err());
}

#[test]
fn m06_covering_classes_cover_every_q_face() {
    let (cat, group) = standard(6);
    let Verdict::Verified(cert) =
        verify_effective_cone(&cat, &group, VerifyOptions::default()).unwrap()
    else {
        panic!("m06 refuted");
    };
    assert_eq!(cert.q_rays.len(), 3905);
    assert!(cert.faces.iter().all(|f| f.verify(&cat)));
    let cover = covered_by(&cat, &group, &cert, &standard_covering_classes(&cat)).unwrap();
    assert!(cover.iter().all(Option::is_some));
}

#[test]
fn dropping_a_divisor_is_refuted() {
    let (cat, _) = standard(6);
    let last = cat.divisors.len() - 1;
    let dropped = cat.divisors[last].class.clone();
    let smaller = cat.without_divisor(last).unwrap();
    let group = Group::build(&smaller, GroupKind::Full).unwrap();
    match verify_effective_cone(&smaller, &group, VerifyOptions::default()).unwrap() {
        Verdict::Refuted(c) => match *c {
            Counterexample::Dual(d) => {
                assert!(d.divisor.same_ray(&dropped));
                let curves = smaller.curve_vectors();
                assert!(!cone_member(&d.q, &curves).unwrap().is_member());
                assert!(!cone_member(&d.divisor, &smaller.divisor_vectors())
                    .unwrap()
                    .is_member());
            }
            Counterexample::Face(f) => panic!("expected a dual counterexample, got {f:?}"),
        },
        Verdict::Verified(_) => panic!("catalog without a KV divisor verified"),
    }
}

#[test]
fn face_of_zero_is_rejected() {
    let (cat, _) = standard(6);
    let oracle = FaceOracle::new(&cat);
    let zero = Vector::zero(cat.space.curve_basis_id());
    assert!(matches!(
        face_of(&cat, &oracle, &zero),
        Err(EngineError::ZeroCurve)
    ));
}

#[test]
fn face_ray_counts() {
    let (m05, _) = standard(5);
    let oracle = FaceOracle::new(&m05);
    let face = face_of(&m05, &oracle, &class(&m05, "l-e3")).unwrap();
    let rays = face_rays(&face, DdOptions::default()).unwrap();
    assert_eq!(rays.len(), 1);
    assert!(rays[0].same_ray(&class(&m05, "H-E3")));

    let (m06, _) = standard(6);
    let oracle = FaceOracle::new(&m06);
    for (text, count) in [
        ("l-e1", 10),
        ("l-e12-e34", 23),
        ("2l-e12-e13-e14-e25-e35-e45", 14),
    ] {
        let face = face_of(&m06, &oracle, &class(&m06, text)).unwrap();
        let rays = face_rays(&face, DdOptions::default()).unwrap();
        assert_eq!(rays.len(), count, "{text}");
        let cert = certify_containment(&m06, &face, &rays).unwrap().unwrap();
        assert!(cert.verify(&m06));
    }
}

#[test]
fn contraction_report_for_m06() {
    let (cat, group) = standard(6);
    let classes = standard_covering_classes(&cat);
    let report = report_contractions(&cat, &group, &classes).unwrap();
    assert_eq!(report.entries.len(), 3);
    for (e, rep) in report.entries.iter().zip(&classes) {
        assert!(!e.decompositions.is_empty());
        assert!(e.decompositions.iter().all(|d| reconstructs(&cat, rep, d)));
    }

    let first = &report.entries[0];
    assert_eq!(first.orbit_size, 6);
    assert!(first.decompositions.iter().any(|d| {
        d.terms
            .iter()
            .any(|t| t.curve == "l-e1-e23" && t.swept == "Delta123")
            && d.terms.iter().any(|t| t.curve == "e23" && t.swept == "E23")
    }));

    let second = &report.entries[1];
    for d in ["E13", "E14", "E23", "E24", "E5"] {
        assert!(
            second.vertical_divisors.iter().any(|v| v == d),
            "{d} missing"
        );
    }
    assert_eq!(
        report
            .entries
            .iter()
            .map(|e| e.face_rays)
            .collect::<Vec<_>>(),
        [10, 23, 14]
    );
}

#[test]
fn qnef_generation_and_sweep_graph() {
    let (cat, _) = standard(6);
    let pair = ids(&cat, &["e1-e12", "l-e1-e2+e12"]);
    let cert = qnef_generate(&cat, &pair).unwrap();
    assert!(cert.verify(&cat));
    assert!(nef_minimal_check(&cat, &pair));
    assert!(build_graph(&cat, &pair).is_single_hamiltonian_cycle());

    let single = ids(&cat, &["e12"]);
    assert!(qnef_generate(&cat, &single).is_none());
}

#[test]
fn m05_oracle() {
    let (cat, _) = standard(5);
    let rays = rays_of_m(&cat, DdOptions::default()).unwrap();
    assert_eq!(rays.len(), 10);
    assert_eq!(
        rays.iter()
            .filter(|r| match_divisor(&cat, r).is_some())
            .count(),
        0
    );

    let (facets, certs) = facet_check(&cat, DdOptions::default()).unwrap();
    assert_eq!(facets.len(), certs.len());
    let curves = cat.curve_vectors();
    for c in &certs {
        assert!(c.answer.is_member());
        assert!(verify_answer(&c.facet, &curves, &c.answer));
    }
}

#[test]
fn small_crosscheck_is_clean() {
    let (cat, _) = standard(6);
    let r = crosscheck_qnef(&cat, 300, 11, 5);
    assert!(r.clean(), "{r:?}");
    assert!(r.generating > 0);
}
