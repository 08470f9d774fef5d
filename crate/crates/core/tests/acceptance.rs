//! Acceptance suite: twelve criteria, one PASS/FAIL line each.
//! Runs as a plain binary (`harness = false`) so the lines are always shown.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use magcorep::catalog::{catalog_all, catalog_get, CatalogEntry};
use magcorep::corep::CoRep;
use magcorep::kp::oracle::ORACLE_TOL;
use magcorep::kp::poly::{irreducible_channels, polynomial_channel};
use magcorep::kp::{
    build_gamma_matrices, covariance_roundtrip, linear_multiplicity, multiplicity_value, probe_stability,
    solve_constraints, KpModel, ProbeRepAction, KP_TOL, MULTIPLICITY_TOL,
};
use magcorep::linalg::{
    conj, hermitian_residual, identity, max_abs, projector_distance, random_unitary, seeded_rng,
    symmetric_unitary_sqrt,
};
use magcorep::reduce::{
    build_g_commutant, criterion_character_form, criterion_trace_form, irreducibility_index, reduce_corep,
    restricted_norm, torsion_indicator, QUANT_TOL,
};
use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<T>(r: magcorep::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn catalog() -> Vec<CatalogEntry> {
    catalog_all().expect("catalog builds")
}

/// Channels used by the sweeps: the whole action and its irreducible parts at
/// first order, the irreducible quadratic channels at second order.
fn channels(e: &CatalogEntry, a: &ProbeRepAction) -> Result<Vec<(usize, ProbeRepAction)>, String> {
    let mut out = Vec::new();
    for ch in e2s(polynomial_channel(&e.group, a, 1, 7))? {
        out.push((1, ch));
    }
    let parts = e2s(irreducible_channels(&e.group, a, 1, 7))?;
    if parts.len() > 1 {
        out.extend(parts.into_iter().map(|c| (1, c)));
    }
    for ch in e2s(polynomial_channel(&e.group, a, 2, 7))? {
        out.push((2, ch));
    }
    Ok(out)
}

fn all_reps(e: &CatalogEntry) -> impl Iterator<Item = &magcorep::catalog::NamedRep> {
    e.reps.iter().chain(&e.reducible)
}

fn c1() -> Outcome {
    let k = catalog_get("z2t_kramers").unwrap().rep("kramers").unwrap().clone();
    let one = e2s(irreducibility_index(&k))?;
    let two = e2s(irreducibility_index(&e2s(CoRep::direct_sum(&[k.clone(), k]))?))?;
    ensure((one - 1.0).abs() <= 1e-10, || format!("Kramers index {one}"))?;
    ensure((two - 6.0).abs() <= 1e-10, || format!("double Kramers index {two}"))?;
    Ok(format!("Kramers {one}, double {two}"))
}

fn c2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for e in catalog() {
        for r in all_reps(&e) {
            let d = (criterion_character_form(&r.corep) - criterion_trace_form(&r.corep)).norm();
            ensure(d <= 1e-9, || format!("{}/{}: paths differ by {d:e}", e.name, r.name))?;
            worst = worst.max(d);
            n += 1;
        }
    }
    Ok(format!("{n} co-reps, worst difference {worst:.1e}"))
}

fn c3() -> Outcome {
    let mut counts = [0usize; 3];
    for e in catalog() {
        for r in &e.reps {
            let ind = e2s(torsion_indicator(&r.corep))?;
            let (slot, rr) = [(1.0, 1usize), (0.0, 2), (-2.0, 4)]
                .iter()
                .enumerate()
                .find(|(_, (v, _))| (ind - v).abs() <= 1e-8)
                .map(|(i, (_, rr))| (i, *rr))
                .ok_or_else(|| format!("{}/{}: indicator {ind} not quantized", e.name, r.name))?;
            counts[slot] += 1;
            let norm = restricted_norm(&r.corep);
            ensure((norm - rr as f64).abs() <= 1e-8, || format!("{}/{}: restricted norm {norm} for R={rr}", e.name, r.name))?;
            if rr == 4 {
                let h = e2s(r.corep.restrict_to_unitary())?;
                let dec = e2s(reduce_corep(&h, 17, QUANT_TOL))?;
                ensure(dec.blocks.len() == 2, || format!("{}/{}: restriction gave {:?}", e.name, r.name, dec.block_dims()))?;
                let a = e2s(dec.block_corep(&h, 0))?.character();
                let b = e2s(dec.block_corep(&h, 1))?.character();
                let diff = a.chi.iter().zip(&b.chi).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                ensure(diff <= 1e-8, || format!("{}/{}: restricted blocks differ ({diff:e})", e.name, r.name))?;
            }
        }
    }
    ensure(counts.iter().all(|&c| c > 0), || format!("not all torsion classes present: {counts:?}"))?;
    Ok(format!("R=1: {}, R=2: {}, R=4: {} (R=4 restrictions split into identical pairs)", counts[0], counts[1], counts[2]))
}

fn c4() -> Outcome {
    let entries = catalog();
    let mut rng = seeded_rng(2024);
    let mut done = 0;
    let mut worst_off: f64 = 0.0;
    let mut attempts = 0;
    while done < 24 {
        attempts += 1;
        if attempts > 1000 {
            return Err("could not draw enough direct sums".into());
        }
        let e = entries.choose(&mut rng).unwrap();
        let seed_rep = &e.reps.choose(&mut rng).unwrap().corep;
        let pool: Vec<&CoRep> = e.reps.iter().map(|r| &r.corep).filter(|r| r.omega() == seed_rep.omega()).collect();
        let k = rng.random_range(2..=4);
        let parts: Vec<CoRep> = (0..k).map(|_| (*pool.choose(&mut rng).unwrap()).clone()).collect();
        let d: usize = parts.iter().map(|p| p.dim()).sum();
        if d > 24 {
            continue;
        }
        let mut expected: Vec<usize> = parts.iter().map(|p| p.dim()).collect();
        expected.sort_unstable();
        let sum = e2s(CoRep::direct_sum(&parts))?;
        let hidden = e2s(sum.change_basis(&random_unitary(&mut rng, d)))?;
        for seed in [11u64, 9001] {
            let dec = e2s(reduce_corep(&hidden, seed, QUANT_TOL))
                .map_err(|m| format!("{} sum {expected:?}: {m}", e.name))?;
            let mut got = dec.block_dims();
            got.sort_unstable();
            ensure(got == expected, || format!("{}: expected {expected:?}, got {got:?} (seed {seed})", e.name))?;
            ensure(dec.residuals.block_diagonality < 1e-8, || format!("off-block residual {}", dec.residuals.block_diagonality))?;
            for b in &dec.blocks {
                ensure((b.criterion - 1.0).abs() <= 1e-8, || format!("block criterion {}", b.criterion))?;
            }
            worst_off = worst_off.max(dec.residuals.block_diagonality);
        }
        done += 1;
    }
    Ok(format!("{done} random sums, two seeds each, worst off-block {worst_off:.1e}"))
}

fn c5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_schur: f64 = 0.0;
    let mut fixtures: Vec<(String, CoRep, bool)> = Vec::new();
    for e in catalog() {
        for r in &e.reps {
            fixtures.push((format!("{}/{}", e.name, r.name), r.corep.clone(), true));
        }
        for r in &e.reducible {
            fixtures.push((format!("{}/{}", e.name, r.name), r.corep.clone(), false));
        }
        let linear: Vec<CoRep> = e.reps.iter().filter(|r| r.corep.omega() == e.reps[0].corep.omega()).map(|r| r.corep.clone()).collect();
        fixtures.push((format!("{}/sum", e.name), e2s(CoRep::direct_sum(&linear))?, linear.len() == 1));
    }
    for (name, r, irreducible) in &fixtures {
        let c = build_g_commutant(r, 31);
        let res = c.residuals(r);
        let scale = c.gamma.norm().max(1.0);
        let rel = res.hermiticity.max(res.unitary_commutation).max(res.antiunitary_commutation) / scale;
        ensure(rel < 1e-9, || format!("{name}: commutant residual {rel:e}"))?;
        worst = worst.max(rel);
        if *irreducible {
            let mean = c.gamma.trace() / Complex64::from(r.dim() as f64);
            let dev = (&c.gamma - identity(r.dim()) * mean).norm() / c.gamma.norm();
            ensure(dev < 1e-8, || format!("{name}: Gamma deviates from a multiple of I by {dev:e}"))?;
            worst_schur = worst_schur.max(dev);
        }
    }
    Ok(format!("{} fixtures, worst relative residual {worst:.1e}, worst Schur deviation {worst_schur:.1e}", fixtures.len()))
}

fn c6() -> Outcome {
    let mut rng = seeded_rng(6);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let d = 1 + i % 16;
        let v = random_unitary(&mut rng, d);
        let m = &v * v.transpose();
        let s = e2s(symmetric_unitary_sqrt(&m, 1e-9))?;
        let u = &s.root;
        let r = max_abs(&(u * u - &m))
            .max(max_abs(&(u.transpose() - u)))
            .max(max_abs(&(u.adjoint() * &m * conj(u) - identity(d))));
        ensure(r < 1e-9, || format!("draw {i} (d={d}): residual {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("100 symmetric unitaries, worst residual {worst:.1e}"))
}

fn c7() -> Outcome {
    let e = catalog_get("z2t_kramers").unwrap();
    let r = e.rep("kramers").unwrap();
    let k = e.action("momentum").unwrap();
    let p = e2s(linear_multiplicity(r, k, MULTIPLICITY_TOL))?;
    ensure(p == 9, || format!("Weyl multiplicity {p}"))?;
    let model = e2s(build_gamma_matrices(r, k, KP_TOL))?;
    let oracle = e2s(solve_constraints(r, k, ORACLE_TOL))?;
    ensure(oracle.dim() == 9, || format!("oracle dimension {}", oracle.dim()))?;
    let dist = projector_distance(&model.real_span(), &oracle.basis);
    ensure(dist < 1e-8, || format!("span distance {dist:e}"))?;
    let s = catalog_get("z2t_spinless").unwrap();
    let p0 = e2s(linear_multiplicity(s.rep("scalar").unwrap(), s.action("momentum").unwrap(), MULTIPLICITY_TOL))?;
    ensure(p0 == 0, || format!("spinless TRIM multiplicity {p0}"))?;
    Ok(format!("Weyl 9 (span distance {dist:.1e}), spinless TRIM {p0}"))
}

struct Built {
    name: String,
    rep: CoRep,
    channel: ProbeRepAction,
    model: KpModel,
}

/// Criterion-vs-oracle sweep; also returns every model it built.
fn sweep() -> Result<(usize, Vec<Built>), String> {
    let mut checked = 0;
    let mut built = Vec::new();
    for e in catalog() {
        for a in &e.probe_actions {
            for (n, ch) in channels(&e, a)? {
                for r in all_reps(&e) {
                    let d = r.corep.dim();
                    if ch.dim() * d * d > 200 {
                        continue;
                    }
                    let name = format!("{}/{} x {} (N={n})", e.name, r.name, ch.name);
                    let p = e2s(linear_multiplicity(&r.corep, &ch, MULTIPLICITY_TOL)).map_err(|m| format!("{name}: {m}"))?;
                    let oracle = e2s(solve_constraints(&r.corep, &ch, ORACLE_TOL))?;
                    ensure(p == oracle.dim(), || format!("{name}: criterion {p}, oracle {}", oracle.dim()))?;
                    checked += 1;
                    if p > 0 {
                        let model = e2s(build_gamma_matrices(&r.corep, &ch, KP_TOL)).map_err(|m| format!("{name}: {m}"))?;
                        let dist = projector_distance(&model.real_span(), &oracle.basis);
                        ensure(dist < 1e-8, || format!("{name}: span distance {dist:e}"))?;
                        built.push(Built { name, rep: r.corep.clone(), channel: ch.clone(), model });
                    }
                }
            }
        }
    }
    Ok((checked, built))
}

fn c8(s: &Result<(usize, Vec<Built>), String>) -> Outcome {
    let (checked, built) = s.as_ref().map_err(Clone::clone)?;
    Ok(format!("{checked} (rep, channel) pairs agree with the oracle; {} models span the oracle space", built.len()))
}

fn c9(s: &Result<(usize, Vec<Built>), String>) -> Outcome {
    let (_, built) = s.as_ref().map_err(Clone::clone)?;
    let mut worst: f64 = 0.0;
    for (i, b) in built.iter().enumerate() {
        let r = e2s(covariance_roundtrip(&b.rep, &b.channel, &b.model, 50, 1000 + i as u64))?;
        ensure(r < 1e-8, || format!("{}: covariance residual {r:e}", b.name))?;
        worst = worst.max(r);
    }
    Ok(format!("{} models x 50 draws, worst residual {worst:.1e}", built.len()))
}

fn probe_models() -> Result<Vec<(String, KpModel)>, String> {
    let mut out = Vec::new();
    for e in catalog() {
        let (g, emb) = e2s(e.group.subgroup(&(0..e.group.order()).collect::<Vec<_>>()))?;
        let g = Arc::new(g);
        for r in &e.reps {
            let rep = e2s(probe_stability(&r.corep, g.clone(), &emb, &e.probe_actions, KP_TOL))?;
            for c in rep.channels {
                if let Some(m) = c.model {
                    out.push((format!("{}/{} {}", e.name, r.name, c.channel), m));
                }
            }
        }
    }
    Ok(out)
}

fn c10(s: &Result<(usize, Vec<Built>), String>) -> Outcome {
    let (_, built) = s.as_ref().map_err(Clone::clone)?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let probes = probe_models()?;
    let all = built.iter().map(|b| (&b.name, &b.model)).chain(probes.iter().map(|(n, m)| (n, m)));
    for (name, model) in all {
        for fam in &model.gammas {
            for g in fam {
                let h = hermitian_residual(g);
                ensure(h < 1e-10, || format!("{name}: anti-Hermitian part {h:e}"))?;
                worst = worst.max(h);
                count += 1;
            }
        }
    }
    Ok(format!("{count} matrices (couplings and probe matrices), worst anti-Hermitian part {worst:.1e}"))
}

fn c11() -> Outcome {
    let mut rng = seeded_rng(11);
    let mut checks = 0;
    for e in catalog() {
        for r in &e.reps {
            let base_index = criterion_character_form(&r.corep);
            let base_torsion = e2s(torsion_indicator(&r.corep))?;
            let base_mult: Vec<Complex64> =
                e.probe_actions.iter().map(|a| multiplicity_value(&r.corep, a)).collect::<magcorep::Result<_>>().map_err(|m| m.to_string())?;
            for _ in 0..10 {
                let phases: Vec<Complex64> = (0..e.group.order())
                    .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                    .collect();
                let g = e2s(r.corep.gauge_transform(&phases))?;
                e2s(g.ensure_valid(1e-9))?;
                let name = format!("{}/{}", e.name, r.name);
                let di = (criterion_character_form(&g) - base_index).norm();
                ensure(di <= 1e-9, || format!("{name}: index moved by {di:e}"))?;
                let dt = (e2s(torsion_indicator(&g))? - base_torsion).abs();
                ensure(dt <= 1e-9, || format!("{name}: torsion moved by {dt:e}"))?;
                for (a, m0) in e.probe_actions.iter().zip(&base_mult) {
                    let dm = (e2s(multiplicity_value(&g, a))? - m0).norm();
                    ensure(dm <= 1e-9, || format!("{name} x {}: multiplicity moved by {dm:e}", a.name))?;
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} gauged co-reps keep index, torsion and multiplicities"))
}

fn c12() -> Outcome {
    let e = catalog_get("z2t_kramers").unwrap();
    let r = e.rep("kramers").unwrap();
    let (g, emb) = e2s(e.group.subgroup(&[0, 1]))?;
    let probes = [e.action("magnetic").unwrap().clone(), e.action("electric").unwrap().clone()];
    let rep = e2s(probe_stability(r, Arc::new(g), &emb, &probes, KP_TOL))?;
    ensure(rep.protected, || "Kramers doublet not protected by Z2^T".into())?;
    let mag = &rep.channels[0];
    let ele = &rep.channels[1];
    ensure(mag.multiplicity == 3 && mag.splitting == 3, || format!("magnetic: {} couplings, {} splitting", mag.multiplicity, mag.splitting))?;
    ensure(ele.splitting == 0, || format!("electric splitting {}", ele.splitting))?;
    let (t, emb) = e2s(e.group.subgroup(&[0]))?;
    let rep0 = e2s(probe_stability(r, Arc::new(t), &emb, &[], KP_TOL))?;
    ensure(!rep0.protected && (rep0.restricted_criterion - 4.0).abs() < 1e-10, || format!("trivial subgroup criterion {}", rep0.restricted_criterion))?;
    Ok(format!(
        "magnetic {} (splitting {}), electric splitting {} (identity coupling {}), trivial subgroup index {}",
        mag.multiplicity, mag.splitting, ele.splitting, ele.identity_couplings, rep0.restricted_criterion
    ))
}

fn run(n: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    match outcome {
        Ok(detail) => {
            println!("PASS  {n:>2} {title}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL  {n:>2} {title}: {detail}");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= run(1, "criterion on exact fixtures", c1);
    ok &= run(2, "character form equals trace form", c2);
    ok &= run(3, "torsion trichotomy", c3);
    ok &= run(4, "reduction round-trip", c4);
    ok &= run(5, "commutant contracts", c5);
    ok &= run(6, "symmetric unitary square root", c6);
    ok &= run(7, "Weyl benchmark", c7);
    let s = sweep();
    ok &= run(8, "criterion vs constraint solver", || c8(&s));
    ok &= run(9, "covariance round-trip", || c9(&s));
    ok &= run(10, "hermiticity of couplings", || c10(&s));
    ok &= run(11, "gauge invariance", c11);
    ok &= run(12, "probe stability", c12);
    if !ok {
        std::process::exit(1);
    }
}
