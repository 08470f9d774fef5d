//! Irreducibility criterion, torsion number and reduction of co-representations
//! into irreducible blocks through a random commuting Hermitian matrix.

use log::{debug, info};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::corep::{CoRep, COREP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    cluster_sorted, complex_gaussian, conj, eigh, hermitian_residual, identity, max_abs,
    seeded_rng, simultaneous_diag, CMatrix, I,
};

/// Tolerance for quantized quantities (criterion value, torsion indicator).
pub const QUANT_TOL: f64 = 1e-8;
/// Relative threshold `|e1 - e2| <= ENERGY_REL_TOL * |Gamma|` for equal block energies.
pub const ENERGY_REL_TOL: f64 = 1e-7;
/// Number of attempts with fresh seeds before reduction gives up.
pub const DEFAULT_ATTEMPTS: usize = 5;

fn criterion_sum(r: &CoRep, coset_term: impl Fn(usize) -> Complex64) -> Complex64 {
    let g = r.group();
    let chi = r.character();
    let h_order = chi.elements.len() as f64;
    let unitary: Complex64 = chi.chi.iter().map(|c| c.norm_sqr()).sum::<f64>().into();
    match g.t0() {
        None => unitary / h_order,
        Some(t0) => {
            let coset: Complex64 = chi.elements.iter().map(|&h| coset_term(g.mul(t0, h))).sum();
            (unitary + coset) / (2.0 * h_order)
        }
    }
}

/// Criterion through characters: `omega(u, u) chi(u^2)` on the coset `T0 H`.
pub fn criterion_character_form(r: &CoRep) -> Complex64 {
    let g = r.group();
    criterion_sum(r, |u| r.omega().get(u, u) * r.matrix(g.mul(u, u)).trace())
}

/// Criterion through traces: `Tr[M(u) M*(u)]` on the coset `T0 H`.
pub fn criterion_trace_form(r: &CoRep) -> Complex64 {
    criterion_sum(r, |u| (r.matrix(u) * conj(r.matrix(u))).trace())
}

/// The irreducibility criterion; the co-representation is irreducible iff it equals 1.
/// Validates `r` first.
pub fn irreducibility_index(r: &CoRep) -> Result<f64> {
    r.ensure_valid(COREP_TOL)?;
    Ok(criterion_character_form(r).re)
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityReport {
    pub criterion: f64,
    pub criterion_trace_form: f64,
    /// Largest imaginary part of the two forms, and their mutual difference.
    pub imaginary_part: f64,
    pub path_difference: f64,
    pub irreducible: bool,
    pub tolerance: f64,
}

pub fn irreducibility_report(r: &CoRep, tol: f64) -> Result<IrreducibilityReport> {
    r.ensure_valid(COREP_TOL.max(tol))?;
    let a = criterion_character_form(r);
    let b = criterion_trace_form(r);
    Ok(IrreducibilityReport {
        criterion: a.re,
        criterion_trace_form: b.re,
        imaginary_part: a.im.abs().max(b.im.abs()),
        path_difference: (a - b).norm(),
        irreducible: (a.re - 1.0).abs() <= tol,
        tolerance: tol,
    })
}

/// `(1/|H|) sum_h |chi(h)|^2`, the self-overlap of the restriction to H.
pub fn restricted_norm(r: &CoRep) -> f64 {
    let chi = r.character();
    chi.chi.iter().map(|c| c.norm_sqr()).sum::<f64>() / chi.elements.len() as f64
}

/// Coset indicator `(1/|H|) sum_{u in T0 H} Tr[M(u) M*(u)]`.
pub fn torsion_indicator(r: &CoRep) -> Result<f64> {
    let g = r.group();
    let t0 = g.require_t0()?;
    let hs = g.unitary_elements();
    let s: Complex64 = hs
        .iter()
        .map(|&h| {
            let m = r.matrix(g.mul(t0, h));
            (m * conj(m)).trace()
        })
        .sum();
    Ok(s.re / hs.len() as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionReport {
    pub indicator: f64,
    /// `(1/|H|) sum |chi|^2`; equals R for an irreducible co-rep.
    pub restricted_norm: f64,
    pub torsion: u8,
    pub tolerance: f64,
}

/// Torsion number of an irreducible co-representation.
///
/// The indicator takes the values 1, 0, -2 for R = 1, 2, 4: with the criterion
/// equal to 1 it is `2 - R`. The restricted norm must agree with the same R.
pub fn torsion_report(r: &CoRep, tol: f64) -> Result<TorsionReport> {
    let index = criterion_character_form(r).re;
    if (index - 1.0).abs() > tol {
        return Err(Error::NotIrreducible(index));
    }
    let indicator = torsion_indicator(r)?;
    let torsion = [(1.0, 1u8), (0.0, 2), (-2.0, 4)]
        .iter()
        .find(|(v, _)| (indicator - v).abs() <= tol)
        .map(|&(_, t)| t)
        .ok_or(Error::IndicatorNotQuantized(indicator))?;
    let norm = restricted_norm(r);
    if (norm - f64::from(torsion)).abs() > tol {
        return Err(Error::IndicatorNotQuantized(norm));
    }
    Ok(TorsionReport {
        indicator,
        restricted_norm: norm,
        torsion,
        tolerance: tol,
    })
}

pub fn torsion_number(r: &CoRep) -> Result<u8> {
    Ok(torsion_report(r, QUANT_TOL)?.torsion)
}

fn hermitianize(x: &CMatrix) -> CMatrix {
    let xd = x.adjoint();
    (x + &xd) + (x - &xd) * I
}

/// Hermitian `Lambda` commuting with `M(h)` for every unitary `h`, from a seeded
/// complex Gaussian matrix averaged over H.
pub fn build_h_commutant(r: &CoRep, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let a = complex_gaussian(&mut rng, r.dim(), r.dim());
    let mut l0 = CMatrix::zeros(r.dim(), r.dim());
    for &h in r.group().unitary_elements() {
        let m = r.matrix(h);
        l0 += m * &a * m.adjoint();
    }
    hermitianize(&l0)
}

#[derive(Debug, Clone)]
pub struct CommutantHamiltonian {
    pub gamma: CMatrix,
    pub lambda: CMatrix,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutantResiduals {
    pub hermiticity: f64,
    /// `max_h |M(h) Gamma M(h)^dagger - Gamma|`
    pub unitary_commutation: f64,
    /// `|M(T0) Gamma* M(T0)^dagger - Gamma|`, zero for unitary groups.
    pub antiunitary_commutation: f64,
}

impl CommutantHamiltonian {
    pub fn residuals(&self, r: &CoRep) -> CommutantResiduals {
        let g = &self.gamma;
        let unitary_commutation = r
            .group()
            .unitary_elements()
            .iter()
            .map(|&h| {
                let m = r.matrix(h);
                max_abs(&(m * g * m.adjoint() - g))
            })
            .fold(0.0, f64::max);
        let antiunitary_commutation = r.group().t0().map_or(0.0, |t0| {
            let m = r.matrix(t0);
            max_abs(&(m * conj(g) * m.adjoint() - g))
        });
        CommutantResiduals {
            hermiticity: hermitian_residual(g),
            unitary_commutation,
            antiunitary_commutation,
        }
    }
}

/// `Gamma = Lambda + M(T0) Lambda* M(T0)^dagger`, which commutes with the whole
/// co-representation. For a unitary group `Gamma = Lambda`.
pub fn build_g_commutant(r: &CoRep, seed: u64) -> CommutantHamiltonian {
    let lambda = build_h_commutant(r, seed);
    let gamma = g_symmetrize(r, &lambda);
    CommutantHamiltonian {
        gamma,
        lambda,
        seed,
    }
}

/// `X + M(T0) X* M(T0)^dagger`, or `X` itself for a unitary group.
pub fn g_symmetrize(r: &CoRep, x: &CMatrix) -> CMatrix {
    match r.group().t0() {
        Some(t0) => {
            let m = r.matrix(t0);
            x + m * conj(x) * m.adjoint()
        }
        None => x.clone(),
    }
}

/// `C_i = sum_{a in subgroup} M(a) M(h_i) M(a)^dagger`.
pub fn class_operator(r: &CoRep, class_rep: usize, subgroup: &[usize]) -> Result<CMatrix> {
    let g = r.group();
    if class_rep >= g.order() || g.is_antiunitary(class_rep) {
        return Err(Error::ElementNotInSubgroup(class_rep));
    }
    if let Some(&bad) = subgroup
        .iter()
        .find(|&&a| a >= g.order() || g.is_antiunitary(a))
    {
        return Err(Error::ElementNotInSubgroup(bad));
    }
    let mh = r.matrix(class_rep);
    let mut c = CMatrix::zeros(r.dim(), r.dim());
    for &a in subgroup {
        let m = r.matrix(a);
        c += m * mh * m.adjoint();
    }
    Ok(c)
}

/// Hermitian and anti-Hermitian parts `(C + C^dagger, i(C - C^dagger))` of a
/// normal operator. Both are Hermitian and commute with each other.
pub fn hermitian_pair(c: &CMatrix) -> (CMatrix, CMatrix) {
    let cd = c.adjoint();
    (&cd + c, (c - &cd) * I)
}

/// Class-operator pair for the whole group. With `X_i = C_i + M(T0) C_i* M(T0)^dagger`
/// the pair is `(X_i + X_i^dagger, i(X_i - X_i^dagger))`; both are Hermitian and
/// commute with every `M(h)`, and the first also with `M(T0) K`.
pub fn g_class_operator_pair(r: &CoRep, class_rep: usize) -> Result<(CMatrix, CMatrix)> {
    let c = class_operator(r, class_rep, r.group().unitary_elements())?;
    Ok(hermitian_pair(&g_symmetrize(r, &c)))
}

/// Random real combination of the class operators of one subgroup in the chain,
/// returned as its Hermitian pair.
fn combined_class_pair<R: Rng>(
    r: &CoRep,
    subgroup: &[usize],
    classes: &[Vec<usize>],
    rng: &mut R,
    whole_group: bool,
) -> Result<(CMatrix, CMatrix)> {
    let d = r.dim();
    let mut c = CMatrix::zeros(d, d);
    for class in classes {
        let w: f64 = rng.random_range(0.5..1.5);
        let ci = class_operator(r, class[0], subgroup)?;
        c += ci * Complex64::from(w);
    }
    if whole_group {
        c = g_symmetrize(r, &c);
    }
    let scale = (subgroup.len() as f64).max(1.0);
    let (p, m) = hermitian_pair(&c);
    Ok((p / Complex64::from(scale), m / Complex64::from(scale)))
}

#[derive(Debug, Clone, Serialize)]
pub struct IrrepBlock {
    pub start: usize,
    pub dim: usize,
    /// Eigenvalue of the commuting Hamiltonian on this block.
    pub energy: f64,
    /// Eigenvalue of the combined class operator of H on the first basis vector,
    /// followed by those of the subgroup chain.
    pub class_labels: Vec<Complex64>,
    /// `None` for unitary groups.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<u8>,
    pub criterion: f64,
}

impl IrrepBlock {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.dim
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionResiduals {
    /// Largest entry outside the declared blocks of `U^dagger M(g) conj^s(U)`.
    pub block_diagonality: f64,
    /// Largest `|criterion - 1|` over blocks.
    pub block_criterion: f64,
    pub basis_unitarity: f64,
    pub commutant: CommutantResiduals,
}

#[derive(Debug, Clone)]
pub struct IrrepDecomposition {
    pub basis: CMatrix,
    pub blocks: Vec<IrrepBlock>,
    pub residuals: DecompositionResiduals,
    pub seeds_used: Vec<u64>,
    /// Degenerate label clusters that needed the H-commutant to split them.
    pub lambda_refinements: usize,
    pub tolerance: f64,
}

impl IrrepDecomposition {
    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    /// Co-representation carried by block `k`.
    pub fn block_corep(&self, r: &CoRep, k: usize) -> Result<CoRep> {
        let b = &self.blocks[k];
        r.change_basis(&self.basis.columns(b.start, b.dim).into_owned())
    }
}

#[derive(Debug, Clone)]
pub struct ReduceOptions {
    pub seed: u64,
    /// Acceptance tolerance for block residuals and per-block criteria.
    pub tol: f64,
    pub energy_rel_tol: f64,
    pub attempts: usize,
    /// Use the whole-group class operators instead of those of H.
    pub whole_group_classes: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            tol: QUANT_TOL,
            energy_rel_tol: ENERGY_REL_TOL,
            attempts: DEFAULT_ATTEMPTS,
            whole_group_classes: false,
        }
    }
}

/// Reduces `r` into irreducible blocks, retrying with fresh seeds on failure.
pub fn reduce_corep(r: &CoRep, seed: u64, tol: f64) -> Result<IrrepDecomposition> {
    reduce_corep_with(
        r,
        &ReduceOptions {
            seed,
            tol,
            ..Default::default()
        },
    )
}

fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn reduce_corep_with(r: &CoRep, opts: &ReduceOptions) -> Result<IrrepDecomposition> {
    r.ensure_valid(COREP_TOL)?;
    let mut seeds = Vec::new();
    let mut last = String::new();
    for attempt in 0..opts.attempts.max(1) {
        let s = attempt_seed(opts.seed, attempt);
        seeds.push(s);
        match reduce_once(r, s, opts) {
            Ok(mut dec) => {
                dec.seeds_used = seeds;
                info!(
                    "reduction succeeded with blocks {:?} after {} attempt(s)",
                    dec.block_dims(),
                    attempt + 1
                );
                return Ok(dec);
            }
            Err(e) => {
                debug!("reduction attempt {attempt} with seed {s} failed: {e}");
                last = e.to_string();
            }
        }
    }
    Err(Error::ReductionFailed {
        attempts: seeds.len(),
        reason: last,
    })
}

fn reduce_once(r: &CoRep, seed: u64, opts: &ReduceOptions) -> Result<IrrepDecomposition> {
    let g = r.group();
    let d = r.dim();
    let comm = build_g_commutant(r, seed);
    let commutant = comm.residuals(r);

    // labelling family: C of H, then C(s) along the chain, then Gamma
    let mut rng = seeded_rng(seed ^ 0x5DEE_CE66);
    let mut family = Vec::new();
    let (cp, cm) = combined_class_pair(
        r,
        g.unitary_elements(),
        g.classes(),
        &mut rng,
        opts.whole_group_classes,
    )?;
    family.push(cp);
    family.push(cm);
    for (k, sub) in g.subgroup_chain().iter().enumerate() {
        let (p, m) = combined_class_pair(r, sub, g.chain_classes(k), &mut rng, false)?;
        family.push(p);
        family.push(m);
    }
    let gamma_norm = comm.gamma.norm().max(f64::MIN_POSITIVE);
    family.push(comm.gamma.clone() / Complex64::from(gamma_norm));
    let sd = simultaneous_diag(&family, seed, 1e-9)?;

    // group columns by energy
    let energies_raw = &sd.eigenvalues[family.len() - 1];
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| energies_raw[a].total_cmp(&energies_raw[b]));
    let sorted_e: Vec<f64> = order.iter().map(|&c| energies_raw[c]).collect();
    let ranges = cluster_sorted(&sorted_e, opts.energy_rel_tol);

    let mut basis = CMatrix::zeros(d, d);
    let mut blocks = Vec::new();
    let mut lambda_refinements = 0;
    let mut col = 0;
    for range in ranges {
        // columns of this block keep their label order
        let mut cols: Vec<usize> = order[range.clone()].to_vec();
        cols.sort_unstable();
        let block_start = col;
        let mut k = 0;
        while k < cols.len() {
            // subcluster with identical labels in every family member
            let mut end = k + 1;
            while end < cols.len()
                && family.iter().enumerate().all(|(f, a)| {
                    let q = 1e-9 * a.norm().max(1.0);
                    (sd.eigenvalues[f][cols[end]] - sd.eigenvalues[f][cols[k]]).abs() <= q
                })
            {
                end += 1;
            }
            let mut sub = CMatrix::zeros(d, end - k);
            for (j, &c) in cols[k..end].iter().enumerate() {
                sub.set_column(j, &sd.unitary.column(c));
            }
            if end - k > 1 {
                let restricted = sub.adjoint() * &comm.lambda * &sub;
                let eig = eigh(&restricted, 1e-8)?;
                sub = &sub * eig.vectors;
                lambda_refinements += 1;
            }
            for j in 0..sub.ncols() {
                basis.set_column(col, &sub.column(j));
                col += 1;
            }
            k = end;
        }
        let first = cols[0];
        let dim = cols.len();
        let mut class_labels = Vec::new();
        for f in (0..family.len() - 1).step_by(2) {
            let p = sd.eigenvalues[f][first];
            let m = sd.eigenvalues[f + 1][first];
            class_labels.push(Complex64::new(p / 2.0, -m / 2.0));
        }
        blocks.push(IrrepBlock {
            start: block_start,
            dim,
            energy: energies_raw[first] * gamma_norm,
            class_labels,
            torsion: None,
            criterion: 0.0,
        });
    }

    let basis_unitarity = max_abs(&(basis.adjoint() * &basis - identity(d)));
    let block_diagonality = block_diagonality(r, &basis, &blocks);
    if basis_unitarity > opts.tol || block_diagonality > opts.tol {
        return Err(Error::ReductionFailed {
            attempts: 1,
            reason: format!(
                "basis residual {basis_unitarity:.3e}, off-block residual {block_diagonality:.3e}"
            ),
        });
    }
    let mut block_criterion: f64 = 0.0;
    for b in &mut blocks {
        let sub = r.change_basis(&basis.columns(b.start, b.dim).into_owned())?;
        b.criterion = criterion_character_form(&sub).re;
        block_criterion = block_criterion.max((b.criterion - 1.0).abs());
        if (b.criterion - 1.0).abs() > opts.tol {
            return Err(Error::ReductionFailed {
                attempts: 1,
                reason: format!("block at {} has criterion {:.6}", b.start, b.criterion),
            });
        }
        if g.t0().is_some() {
            b.torsion = Some(torsion_report(&sub, opts.tol)?.torsion);
        }
    }
    Ok(IrrepDecomposition {
        basis,
        blocks,
        residuals: DecompositionResiduals {
            block_diagonality,
            block_criterion,
            basis_unitarity,
            commutant,
        },
        seeds_used: vec![seed],
        lambda_refinements,
        tolerance: opts.tol,
    })
}

/// Largest entry of `U^dagger M(g) conj^s(U)` outside the diagonal blocks, over all g.
pub fn block_diagonality(r: &CoRep, basis: &CMatrix, blocks: &[IrrepBlock]) -> f64 {
    let d = r.dim();
    let mut owner = vec![0usize; d];
    for (k, b) in blocks.iter().enumerate() {
        for i in b.range() {
            owner[i] = k;
        }
    }
    let ud = basis.adjoint();
    let uc = conj(basis);
    let mut worst: f64 = 0.0;
    for g in 0..r.group().order() {
        let right = if r.group().is_antiunitary(g) {
            &uc
        } else {
            basis
        };
        let m = &ud * r.matrix(g) * right;
        for i in 0..d {
            for j in 0..d {
                if owner[i] != owner[j] {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FactorSystem, MagneticGroup};
    use crate::linalg::{random_unitary, ONE, ZERO};
    use std::sync::Arc;

    fn z2t() -> Arc<MagneticGroup> {
        Arc::new(MagneticGroup::new(vec![vec![0, 1], vec![1, 0]], vec![false, true]).unwrap())
    }

    fn kramers() -> CoRep {
        let w = FactorSystem::from_fn(2, |a, b| if a == 1 && b == 1 { -ONE } else { ONE });
        let isy = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]);
        CoRep::new(z2t(), w, vec![identity(2), isy]).unwrap()
    }

    fn real_scalar() -> CoRep {
        CoRep::new(
            z2t(),
            FactorSystem::trivial(2),
            vec![identity(1), identity(1)],
        )
        .unwrap()
    }

    #[test]
    fn kramers_criterion_and_double() {
        let k = kramers();
        assert!((irreducibility_index(&k).unwrap() - 1.0).abs() < 1e-12);
        let kk = CoRep::direct_sum(&[k.clone(), k]).unwrap();
        assert!((irreducibility_index(&kk).unwrap() - 6.0).abs() < 1e-12);
        let rep = irreducibility_report(&kk, 1e-9).unwrap();
        assert!(rep.path_difference < 1e-12 && !rep.irreducible);
    }

    #[test]
    fn torsion_real_and_quaternionic() {
        let t = torsion_report(&real_scalar(), QUANT_TOL).unwrap();
        assert_eq!((t.indicator, t.torsion), (1.0, 1));
        let t = torsion_report(&kramers(), QUANT_TOL).unwrap();
        assert_eq!((t.indicator, t.torsion), (-2.0, 4));
        let kk = CoRep::direct_sum(&[kramers(), kramers()]).unwrap();
        assert!(matches!(torsion_number(&kk), Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn commutants_of_kramers() {
        let k = kramers();
        let c = build_g_commutant(&k, 3);
        let res = c.residuals(&k);
        assert!(
            res.hermiticity < 1e-12
                && res.unitary_commutation < 1e-12
                && res.antiunitary_commutation < 1e-12
        );
        let g = &c.gamma;
        let avg = g.trace() / Complex64::from(2.0);
        assert!(max_abs(&(g - identity(2) * avg)) < 1e-10 * g.norm());
        // Lambda = I gives Gamma = 2I
        assert_eq!(
            g_symmetrize(&k, &identity(2)),
            identity(2) * Complex64::from(2.0)
        );
    }

    #[test]
    fn class_operator_of_identity_class() {
        let k = kramers();
        let c = class_operator(&k, 0, &[0]).unwrap();
        assert_eq!(c, identity(2));
        assert!(matches!(
            class_operator(&k, 1, &[0]),
            Err(Error::ElementNotInSubgroup(1))
        ));
    }

    #[test]
    fn reduce_irreducible_and_double_kramers() {
        let one = reduce_corep(&kramers(), 7, QUANT_TOL).unwrap();
        assert_eq!(one.block_dims(), vec![2]);
        assert_eq!(one.blocks[0].torsion, Some(4));

        let kk = CoRep::direct_sum(&[kramers(), kramers()]).unwrap();
        let u = random_unitary(&mut seeded_rng(11), 4);
        let mixed = kk.change_basis(&u).unwrap();
        let dec = reduce_corep(&mixed, 5, QUANT_TOL).unwrap();
        assert_eq!(dec.block_dims(), vec![2, 2]);
        assert!(dec.residuals.block_diagonality < 1e-8);
        assert!(dec.blocks.iter().all(|b| b.torsion == Some(4)));
    }

    #[test]
    fn reduce_real_scalars() {
        let rr = CoRep::direct_sum(&[real_scalar(), real_scalar(), real_scalar()]).unwrap();
        let u = random_unitary(&mut seeded_rng(2), 3);
        let dec = reduce_corep(&rr.change_basis(&u).unwrap(), 1, QUANT_TOL).unwrap();
        assert_eq!(dec.block_dims(), vec![1, 1, 1]);
    }
}
