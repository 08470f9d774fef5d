use std::sync::OnceLock;

use magcorep::catalog::{catalog_all, CatalogEntry};
use magcorep::corep::CoRep;
use magcorep::io::{to_json_checked, CoRepFile, ReduceReport};
use magcorep::kp::poly::{polynomial_channel, substitution_residual};
use magcorep::kp::{multiplicity_special_form, multiplicity_value};
use magcorep::linalg::{conj, identity, max_abs, random_unitary, seeded_rng, symmetric_unitary_sqrt};
use magcorep::reduce::{
    criterion_character_form, criterion_trace_form, reduce_corep, torsion_indicator, QUANT_TOL,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn catalog() -> &'static [CatalogEntry] {
    static C: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    C.get_or_init(|| catalog_all().unwrap())
}

/// Every irreducible catalog co-rep as (entry index, rep index).
fn irreps() -> Vec<(usize, usize)> {
    catalog()
        .iter()
        .enumerate()
        .flat_map(|(i, e)| (0..e.reps.len()).map(move |j| (i, j)))
        .collect()
}

fn pick() -> impl Strategy<Value = (usize, usize)> {
    proptest::sample::select(irreps())
}

fn phases(n: usize, angles: &[f64]) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::from_polar(1.0, angles[i % angles.len()] * (i + 1) as f64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_leaves_invariants_alone(
        (i, j) in pick(),
        angles in prop::collection::vec(0.0..std::f64::consts::TAU, 1..6),
    ) {
        let e = &catalog()[i];
        let r = &e.reps[j].corep;
        let w = phases(e.group.order(), &angles);
        let g = r.gauge_transform(&w).unwrap();
        prop_assert!(g.validate(1e-9).pass);
        prop_assert!((criterion_character_form(&g) - criterion_character_form(r)).norm() < 1e-9);
        prop_assert!((torsion_indicator(&g).unwrap() - torsion_indicator(r).unwrap()).abs() < 1e-9);
        for a in &e.probe_actions {
            let d = multiplicity_value(&g, a).unwrap() - multiplicity_value(r, a).unwrap();
            prop_assert!(d.norm() < 1e-9);
        }
    }

    #[test]
    fn cocycle_transforms_covariantly(
        (i, j) in pick(),
        angles in prop::collection::vec(0.0..std::f64::consts::TAU, 1..6),
    ) {
        let e = &catalog()[i];
        let r = &e.reps[j].corep;
        let w = phases(e.group.order(), &angles);
        let g = r.gauge_transform(&w).unwrap();
        let expected = r.omega().gauge_transform(&e.group, &w);
        prop_assert!(expected.validate(&e.group, 1e-9).unwrap().pass);
        for a in 0..e.group.order() {
            for b in 0..e.group.order() {
                prop_assert!((g.omega().get(a, b) - expected.get(a, b)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dual_paths_agree_on_conjugated_sums(
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4),
        entry in any::<prop::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let e = &catalog()[entry.index(catalog().len())];
        let w0 = e.reps[0].corep.omega();
        let pool: Vec<&CoRep> = e.reps.iter().map(|r| &r.corep).filter(|r| r.omega() == w0).collect();
        let parts: Vec<CoRep> = picks.iter().map(|p| pool[p.index(pool.len())].clone()).collect();
        let sum = CoRep::direct_sum(&parts).unwrap();
        let mut rng = seeded_rng(seed);
        let r = sum.change_basis(&random_unitary(&mut rng, sum.dim())).unwrap();
        let a = criterion_character_form(&r);
        let b = criterion_trace_form(&r);
        prop_assert!((a - b).norm() < 1e-9);
        prop_assert!((a - criterion_character_form(&sum)).norm() < 1e-9);
        prop_assert!(a.im.abs() < 1e-9 && (a.re - a.re.round()).abs() < 1e-9);
    }

    #[test]
    fn f_of_h_has_conjugate_character((i, j) in pick()) {
        let r = &catalog()[i].reps[j].corep;
        if r.group().is_antiunitary_group() {
            for &h in r.group().unitary_elements() {
                let f = r.f_of_h(h).unwrap();
                prop_assert!((f.trace() - r.matrix(h).trace().conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn special_multiplicity_form_matches((i, j) in pick()) {
        let e = &catalog()[i];
        let r = &e.reps[j].corep;
        for a in &e.probe_actions {
            if let Some(s) = multiplicity_special_form(r, a) {
                prop_assert!((s - multiplicity_value(r, a).unwrap()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetric_sqrt_contract(seed in any::<u64>(), d in 1usize..=16) {
        let mut rng = seeded_rng(seed);
        let v = random_unitary(&mut rng, d);
        let m = &v * v.transpose();
        let u = symmetric_unitary_sqrt(&m, 1e-9).unwrap().root;
        prop_assert!(max_abs(&(&u * &u - &m)) < 1e-9);
        prop_assert!(max_abs(&(u.transpose() - &u)) < 1e-9);
        prop_assert!(max_abs(&(u.adjoint() * &m * conj(&u) - identity(d))) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reduction_survives_json(
        picks in prop::collection::vec(any::<prop::sample::Index>(), 2..4),
        entry in any::<prop::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let e = &catalog()[entry.index(catalog().len())];
        let w0 = e.reps[0].corep.omega();
        let pool: Vec<&CoRep> = e.reps.iter().map(|r| &r.corep).filter(|r| r.omega() == w0).collect();
        let parts: Vec<CoRep> = picks.iter().map(|p| pool[p.index(pool.len())].clone()).collect();
        let sum = CoRep::direct_sum(&parts).unwrap();
        let mut rng = seeded_rng(seed);
        let r = sum.change_basis(&random_unitary(&mut rng, sum.dim())).unwrap();

        let text = to_json_checked(&CoRepFile::from_corep(&r)).unwrap();
        let file: CoRepFile = serde_json::from_str(&text).unwrap();
        let back = match file.group.as_ref().unwrap() {
            magcorep::io::GroupRef::Inline(g) => {
                let (g, w) = g.build().unwrap();
                file.build(g, w).unwrap()
            }
            _ => unreachable!(),
        };
        for g in 0..r.group().order() {
            prop_assert!(max_abs(&(back.matrix(g) - r.matrix(g))) < 1e-14);
        }

        let dec = reduce_corep(&back, seed, QUANT_TOL).unwrap();
        let report: ReduceReport =
            serde_json::from_str(&to_json_checked(&ReduceReport::new(&back, &dec)).unwrap()).unwrap();
        let (off, worst, pass) = report.reverify(&back).unwrap();
        prop_assert!(pass, "off-block {off:e}, worst criterion error {worst:e}");
        prop_assert_eq!(report.block_dims.len(), parts.len());
    }
}

#[test]
fn polynomial_channels_substitute_correctly() {
    for e in catalog() {
        let k = e.probe_actions.iter().find(|a| a.name == "momentum").unwrap();
        for n in 1..=3 {
            for ch in polynomial_channel(&e.group, k, n, 5).unwrap() {
                let res = substitution_residual(k, &ch, 100, 9).unwrap();
                assert!(res < 1e-9, "{} order {n} {}: {res:e}", e.name, ch.name);
            }
        }
    }
}
