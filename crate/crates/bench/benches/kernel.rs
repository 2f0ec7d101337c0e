use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use negcone_core::catalog::Catalog;
use negcone_core::face::{dual_rays, face_of, face_rays};
use negcone_core::kernel::{cone_member, DdOptions};
use negcone_core::nefmin::{qnef_lp, qnef_rref, CurveSet, FaceOracle};
use negcone_core::oracle::rays_of_m;

fn double_description(c: &mut Criterion) {
    let m05 = Catalog::standard(5).unwrap();
    let m06 = Catalog::standard(6).unwrap();
    c.bench_function("dual rays m05", |b| {
        b.iter(|| dual_rays(black_box(&m05), DdOptions::default()).unwrap())
    });
    c.bench_function("nef-side rays m05", |b| {
        b.iter(|| rays_of_m(black_box(&m05), DdOptions::default()).unwrap())
    });
    let mut slow = c.benchmark_group("m06");
    slow.sample_size(10);
    slow.bench_function("dual rays m06", |b| {
        b.iter(|| dual_rays(black_box(&m06), DdOptions::default()).unwrap())
    });
    let oracle = FaceOracle::new(&m06);
    let class = m06.space.parse_class("l-e12-e34").unwrap();
    slow.bench_function("face of l-e12-e34", |b| {
        b.iter(|| {
            let face = face_of(&m06, &oracle, black_box(&class)).unwrap();
            face_rays(&face, DdOptions::default()).unwrap()
        })
    });
    slow.finish();
}

fn membership(c: &mut Criterion) {
    let m06 = Catalog::standard(6).unwrap();
    let curves = m06.curve_vectors();
    let rays = dual_rays(&m06, DdOptions::default()).unwrap();
    let target = &rays[rays.len() / 2];
    c.bench_function("dual ray in cone of curves", |b| {
        b.iter(|| cone_member(black_box(target), &curves).unwrap())
    });

    let ids: Vec<usize> = ["2e1-e12-e13-e14-e15", "l-e1-e2+e12", "l-e1-e3+e13"]
        .iter()
        .map(|n| m06.curve_id(n).unwrap())
        .collect();
    c.bench_function("q-nef by row reduction", |b| {
        b.iter(|| qnef_rref(&m06, black_box(&ids)))
    });
    c.bench_function("q-nef by LP", |b| b.iter(|| qnef_lp(&m06, black_box(&ids))));
}

fn closure(c: &mut Criterion) {
    let m06 = Catalog::standard(6).unwrap();
    let ids: Vec<usize> = ["e1-e12", "l-e1-e2+e12"]
        .iter()
        .map(|n| m06.curve_id(n).unwrap())
        .collect();
    let set = CurveSet::from_ids(&ids);
    // A fresh oracle per iteration keeps the separator pool from warming up.
    c.bench_function("vanishing closure", |b| {
        b.iter(|| FaceOracle::new(&m06).closure_of_set(black_box(set)))
    });
}

criterion_group!(benches, double_description, membership, closure);
criterion_main!(benches);
