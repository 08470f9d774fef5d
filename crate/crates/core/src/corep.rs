//! Unitary projective co-representations `g -> M(g) K^{s(g)}` and the
//! derived representations `F(h)` and `V(g)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FactorSystem, MagneticGroup};
use crate::linalg::{conj, conj_if, identity, kron, max_abs, CMatrix};

/// Default tolerance for unitarity and the twisted multiplication rule.
pub const COREP_TOL: f64 = 1e-9;

/// A co-representation: one `d x d` unitary per group element, with
/// anti-unitary elements acting as `M(g) K`. The multiplication rule is
/// `M(g1) conj^{s(g1)}(M(g2)) = omega(g1, g2) M(g1 g2)`.
#[derive(Debug, Clone)]
pub struct CoRep {
    group: Arc<MagneticGroup>,
    omega: FactorSystem,
    dim: usize,
    matrices: Vec<CMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoRepReport {
    pub unitarity_residual: f64,
    pub relation_residual: f64,
    /// The pair `(g1, g2)` with the largest multiplication-rule residual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_pair: Option<(usize, usize)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Characters `chi(h) = Tr M(h)` on the unitary subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    pub elements: Vec<usize>,
    pub chi: Vec<Complex64>,
}

impl Character {
    pub fn get(&self, h: usize) -> Option<Complex64> {
        self.elements
            .iter()
            .position(|&e| e == h)
            .map(|i| self.chi[i])
    }
}

impl CoRep {
    pub fn new(
        group: Arc<MagneticGroup>,
        omega: FactorSystem,
        matrices: Vec<CMatrix>,
    ) -> Result<Self> {
        let n = group.order();
        if matrices.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for a group of order {n}",
                matrices.len()
            )));
        }
        if omega.size() != n {
            return Err(Error::DimensionMismatch(
                "factor system size differs from group order".into(),
            ));
        }
        let dim = matrices.first().map_or(0, |m| m.nrows());
        if matrices
            .iter()
            .any(|m| m.nrows() != dim || m.ncols() != dim)
        {
            return Err(Error::DimensionMismatch(
                "matrices must all be d x d".into(),
            ));
        }
        Ok(Self {
            group,
            omega,
            dim,
            matrices,
        })
    }

    pub fn group(&self) -> &MagneticGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<MagneticGroup> {
        &self.group
    }

    pub fn omega(&self) -> &FactorSystem {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `omega(T0, T0)`.
    pub fn eta0(&self) -> Result<Complex64> {
        let t0 = self.group.require_t0()?;
        Ok(self.omega.get(t0, t0))
    }

    /// Largest entrywise residuals of unitarity and of the multiplication rule over all pairs.
    pub fn validate(&self, tol: f64) -> CoRepReport {
        let n = self.group.order();
        let eye = identity(self.dim);
        let unitarity_residual = self
            .matrices
            .iter()
            .map(|m| max_abs(&(m.adjoint() * m - &eye)))
            .fold(0.0, f64::max);
        let mut relation_residual: f64 = 0.0;
        let mut worst_pair = None;
        for g1 in 0..n {
            let s1 = self.group.is_antiunitary(g1);
            for g2 in 0..n {
                let lhs = &self.matrices[g1] * conj_if(&self.matrices[g2], s1);
                let rhs = &self.matrices[self.group.mul(g1, g2)] * self.omega.get(g1, g2);
                let r = max_abs(&(lhs - rhs));
                if r > relation_residual {
                    relation_residual = r;
                    worst_pair = Some((g1, g2));
                }
            }
        }
        CoRepReport {
            unitarity_residual,
            relation_residual,
            worst_pair,
            tolerance: tol,
            pass: unitarity_residual <= tol && relation_residual <= tol,
        }
    }

    /// Errors with `InvalidCoRep` unless [`validate`](Self::validate) passes.
    pub fn ensure_valid(&self, tol: f64) -> Result<()> {
        let r = self.validate(tol);
        if r.pass {
            Ok(())
        } else {
            Err(Error::InvalidCoRep(format!(
                "unitarity residual {:.3e}, relation residual {:.3e} at {:?}",
                r.unitarity_residual, r.relation_residual, r.worst_pair
            )))
        }
    }

    pub fn character(&self) -> Character {
        let elements = self.group.unitary_elements().to_vec();
        let chi = elements.iter().map(|&h| self.matrices[h].trace()).collect();
        Character { elements, chi }
    }

    /// `F(h) = M(T0) M*(h) M(T0)^dagger`, a representation of H equivalent to `M*(h)`.
    pub fn f_of_h(&self, h: usize) -> Result<CMatrix> {
        let t0 = self.group.require_t0()?;
        if self.group.is_antiunitary(h) {
            return Err(Error::NotUnitaryElement(h));
        }
        let mt = &self.matrices[t0];
        Ok(mt * conj(&self.matrices[h]) * mt.adjoint())
    }

    /// Matrix part of the linear co-representation `V(g) K^{s(g)}` on `C^d x C^d`.
    ///
    /// `V(h) = M(h) x F(h)` on H and `V(T0) = M(T0) x M(T0)`; the rest of the
    /// anti-unitary coset follows from the group law `V(h T0) = V(h) V(T0)`.
    /// For a purely unitary group `V(h) = M(h) x M*(h)`.
    pub fn product_rep_v(&self, g: usize) -> Result<CMatrix> {
        let Some(t0) = self.group.t0() else {
            if self.group.is_antiunitary(g) {
                return Err(Error::NoT0);
            }
            let m = &self.matrices[g];
            return Ok(kron(m, &conj(m)));
        };
        if !self.group.is_antiunitary(g) {
            return Ok(kron(&self.matrices[g], &self.f_of_h(g)?));
        }
        let mt = &self.matrices[t0];
        let vt0 = kron(mt, mt);
        let h = self.group.coset_representative(g)?;
        if h == self.group.identity() {
            return Ok(vt0);
        }
        Ok(kron(&self.matrices[h], &self.f_of_h(h)?) * vt0)
    }

    /// Co-representation in the new basis `U`: `U^dagger M(g) conj^{s(g)}(U)`.
    /// `U` may be rectangular (`d x k`) when its columns span an invariant subspace.
    pub fn change_basis(&self, u: &CMatrix) -> Result<CoRep> {
        if u.nrows() != self.dim {
            return Err(Error::DimensionMismatch(
                "basis has the wrong number of rows".into(),
            ));
        }
        let ud = u.adjoint();
        let uc = conj(u);
        let matrices = (0..self.group.order())
            .map(|g| {
                let right = if self.group.is_antiunitary(g) { &uc } else { u };
                &ud * &self.matrices[g] * right
            })
            .collect();
        CoRep::new(self.group.clone(), self.omega.clone(), matrices)
    }

    /// Rephasing `M'(g) = W(g) M(g)` together with the matching factor system.
    pub fn gauge_transform(&self, phases: &[Complex64]) -> Result<CoRep> {
        if phases.len() != self.group.order() {
            return Err(Error::DimensionMismatch(
                "one phase per element required".into(),
            ));
        }
        let omega = self.omega.gauge_transform(&self.group, phases);
        let matrices = self
            .matrices
            .iter()
            .zip(phases)
            .map(|(m, w)| m * *w)
            .collect();
        CoRep::new(self.group.clone(), omega, matrices)
    }

    /// Block-diagonal direct sum. All parts must share the group and factor system.
    pub fn direct_sum(parts: &[CoRep]) -> Result<CoRep> {
        let first = parts
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty direct sum".into()))?;
        let n = first.group.order();
        for p in parts {
            if p.group.order() != n || p.omega != first.omega {
                return Err(Error::DimensionMismatch(
                    "direct sum parts need the same group and factor system".into(),
                ));
            }
        }
        let d: usize = parts.iter().map(|p| p.dim).sum();
        let matrices = (0..n)
            .map(|g| {
                let mut m = CMatrix::zeros(d, d);
                let mut off = 0;
                for p in parts {
                    m.view_mut((off, off), (p.dim, p.dim))
                        .copy_from(&p.matrices[g]);
                    off += p.dim;
                }
                m
            })
            .collect();
        CoRep::new(first.group.clone(), first.omega.clone(), matrices)
    }

    /// Pulls the co-representation back to a subgroup along `embedding` (sub id -> id).
    pub fn restrict(&self, sub: Arc<MagneticGroup>, embedding: &[usize]) -> Result<CoRep> {
        self.group.check_embedding(&sub, embedding)?;
        let omega = self.omega.restrict(embedding);
        let matrices = embedding
            .iter()
            .map(|&g| self.matrices[g].clone())
            .collect();
        CoRep::new(sub, omega, matrices)
    }

    /// Restriction to the unitary halving subgroup, as a co-rep of a purely unitary group.
    pub fn restrict_to_unitary(&self) -> Result<CoRep> {
        let (h, emb) = self.group.subgroup(self.group.unitary_elements())?;
        self.restrict(Arc::new(h), &emb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unitary, seeded_rng, I, ONE, ZERO};

    fn z2t() -> Arc<MagneticGroup> {
        Arc::new(MagneticGroup::new(vec![vec![0, 1], vec![1, 0]], vec![false, true]).unwrap())
    }

    fn kramers_omega(sign: f64) -> FactorSystem {
        FactorSystem::from_fn(2, |a, b| if a == 1 && b == 1 { ONE * sign } else { ONE })
    }

    fn isy() -> CMatrix {
        // i sigma_y = [[0, 1], [-1, 0]]
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO])
    }

    fn kramers() -> CoRep {
        CoRep::new(z2t(), kramers_omega(-1.0), vec![identity(2), isy()]).unwrap()
    }

    #[test]
    fn trivial_group_identity_rep() {
        let g = Arc::new(MagneticGroup::new(vec![vec![0]], vec![false]).unwrap());
        let r = CoRep::new(g, FactorSystem::trivial(1), vec![identity(1)]).unwrap();
        let report = r.validate(COREP_TOL);
        assert!(report.pass);
        assert_eq!(report.relation_residual, 0.0);
    }

    #[test]
    fn kramers_validates_only_with_minus_sign() {
        assert!(kramers().validate(COREP_TOL).pass);
        let wrong = CoRep::new(z2t(), kramers_omega(1.0), vec![identity(2), isy()]).unwrap();
        let report = wrong.validate(COREP_TOL);
        assert!(!report.pass);
        // (i sigma_y)(i sigma_y)* = -I against +I
        assert!((report.relation_residual - 2.0).abs() < 1e-12);
        assert_eq!(report.worst_pair, Some((1, 1)));
    }

    #[test]
    fn f_and_v_on_kramers() {
        let r = kramers();
        assert!((r.f_of_h(0).unwrap() - identity(2)).norm() < 1e-14);
        assert!((r.product_rep_v(0).unwrap() - identity(4)).norm() < 1e-14);
        let vt = r.product_rep_v(1).unwrap();
        assert!((vt.clone() - kron(&isy(), &isy())).norm() < 1e-14);
        assert!(vt.iter().all(|z| z.im == 0.0));
        assert!(matches!(r.f_of_h(1), Err(Error::NotUnitaryElement(1))));
    }

    #[test]
    fn eta0_of_kramers() {
        assert_eq!(kramers().eta0().unwrap(), -ONE);
    }

    #[test]
    fn characters_add_under_direct_sum() {
        let r = kramers();
        assert_eq!(r.character().get(0), Some(Complex64::new(2.0, 0.0)));
        let sum = CoRep::direct_sum(&[r.clone(), r]).unwrap();
        assert_eq!(sum.character().get(0), Some(Complex64::new(4.0, 0.0)));
        assert!(sum.validate(COREP_TOL).pass);
    }

    #[test]
    fn basis_change_and_gauge_keep_validity() {
        let mut rng = seeded_rng(4);
        let u = random_unitary(&mut rng, 2);
        let r = kramers().change_basis(&u).unwrap();
        assert!(r.validate(COREP_TOL).pass);
        let g = r
            .gauge_transform(&[Complex64::from_polar(1.0, 0.3), I])
            .unwrap();
        assert!(g.validate(COREP_TOL).pass);
        assert!(g.omega().validate(g.group(), 1e-10).unwrap().pass);
    }
}
