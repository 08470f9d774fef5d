//! Real linear actions of the group on probe components (momentum, fields,
//! polynomial channels).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::MagneticGroup;
use crate::linalg::RMatrix;

use super::poly::Polynomial;

/// Default tolerance for the representation property of an action.
pub const ACTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Momentum,
    Polynomial(usize),
    Electric,
    Magnetic,
    Custom,
}

/// Vector-side action `D(g)` of every group element on a `q`-dimensional real
/// space. Anti-unitary elements act linearly: `D(h T0) = D(h) D(T0)`.
/// The coupling matrices transform with the dual `D(g)^{-T}`.
#[derive(Debug, Clone)]
pub struct ProbeRepAction {
    pub name: String,
    pub kind: ActionKind,
    dim: usize,
    matrices: Vec<RMatrix>,
    /// Polynomial in the momentum components for each channel coordinate, if any.
    pub polynomials: Option<Vec<Polynomial>>,
}

impl ProbeRepAction {
    /// Builds an action from matrices for every element and validates it.
    pub fn new(
        group: &MagneticGroup,
        matrices: Vec<RMatrix>,
        kind: ActionKind,
        name: &str,
    ) -> Result<Self> {
        Self::from_partial(group, matrices.into_iter().map(Some).collect(), kind, name)
    }

    /// Builds an action from matrices for all unitary elements and T0. Entries for
    /// the rest of the anti-unitary coset are optional: missing ones are filled
    /// in as `D(h) D(T0)`, given ones must agree with that product.
    pub fn from_partial(
        group: &MagneticGroup,
        partial: Vec<Option<RMatrix>>,
        kind: ActionKind,
        name: &str,
    ) -> Result<Self> {
        let n = group.order();
        if partial.len() != n {
            return Err(Error::InvalidAction(format!(
                "{} entries for a group of order {n}",
                partial.len()
            )));
        }
        let dim = partial
            .iter()
            .flatten()
            .next()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::InvalidAction("no matrices given".into()))?;
        if partial
            .iter()
            .flatten()
            .any(|m| m.nrows() != dim || m.ncols() != dim)
        {
            return Err(Error::InvalidAction("matrices must all be q x q".into()));
        }
        let mut full: Vec<RMatrix> = Vec::with_capacity(n);
        let dt0 = match group.t0() {
            Some(t0) => Some(partial[t0].clone().ok_or_else(|| {
                Error::InvalidAction(format!("missing matrix for {}", group.label(t0)))
            })?),
            None => None,
        };
        for (g, m) in partial.iter().enumerate() {
            if !group.is_antiunitary(g) {
                full.push(m.clone().ok_or_else(|| {
                    Error::InvalidAction(format!("missing matrix for {}", group.label(g)))
                })?);
                continue;
            }
            let h = group.coset_representative(g)?;
            let built = partial[h].as_ref().ok_or_else(|| {
                Error::InvalidAction(format!("missing matrix for {}", group.label(h)))
            })? * dt0.as_ref().expect("anti-unitary element implies T0");
            if let Some(given) = m {
                if (given - &built).amax() > ACTION_TOL * built.amax().max(1.0) {
                    return Err(Error::InvalidAction(format!(
                        "matrix for {} differs from D(h) D(T0)",
                        group.label(g)
                    )));
                }
            }
            full.push(built);
        }
        let action = Self {
            name: name.to_string(),
            kind,
            dim,
            matrices: full,
            polynomials: None,
        };
        action.validate(group, ACTION_TOL)?;
        Ok(action)
    }

    pub fn with_polynomials(mut self, polys: Vec<Polynomial>) -> Self {
        self.polynomials = Some(polys);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.matrices.len()
    }

    #[inline]
    pub fn matrix(&self, g: usize) -> &RMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[RMatrix] {
        &self.matrices
    }

    pub fn character(&self, g: usize) -> f64 {
        self.matrices[g].trace()
    }

    /// Largest residual of `D(g1) D(g2) = D(g1 g2)` over all pairs.
    pub fn homomorphism_residual(&self, group: &MagneticGroup) -> f64 {
        let n = group.order();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let r = (&self.matrices[a] * &self.matrices[b] - &self.matrices[group.mul(a, b)])
                    .amax();
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn validate(&self, group: &MagneticGroup, tol: f64) -> Result<()> {
        if self.matrices.len() != group.order() {
            return Err(Error::DimensionMismatch(
                "action size differs from group order".into(),
            ));
        }
        let scale = self.matrices.iter().map(|m| m.amax()).fold(1.0, f64::max);
        let res = self.homomorphism_residual(group);
        if res > tol * scale * scale {
            return Err(Error::InvalidAction(format!(
                "not a representation (residual {res:.3e})"
            )));
        }
        Ok(())
    }

    /// The dual action `D(g)^{-T}`, under which the coupling matrices transform.
    pub fn dual(&self) -> Result<ProbeRepAction> {
        let matrices = self
            .matrices
            .iter()
            .enumerate()
            .map(|(g, m)| {
                m.clone()
                    .try_inverse()
                    .map(|inv| inv.transpose())
                    .ok_or(Error::SingularAction(g))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbeRepAction {
            name: format!("{}~", self.name),
            kind: self.kind,
            dim: self.dim,
            matrices,
            polynomials: None,
        })
    }

    /// Number of independent invariant vectors, `(1/|G|) sum_g Tr D(g)`.
    pub fn invariant_count(&self) -> f64 {
        self.matrices.iter().map(|m| m.trace()).sum::<f64>() / self.matrices.len() as f64
    }

    /// Pulls the action back to a subgroup along `embedding`.
    pub fn restrict(&self, sub: &MagneticGroup, embedding: &[usize]) -> Result<ProbeRepAction> {
        if embedding.len() != sub.order() {
            return Err(Error::NotASubgroupEmbedding(
                "embedding length differs from subgroup order".into(),
            ));
        }
        let matrices = embedding
            .iter()
            .map(|&g| self.matrices[g].clone())
            .collect();
        let out = ProbeRepAction {
            name: self.name.clone(),
            kind: self.kind,
            dim: self.dim,
            matrices,
            polynomials: self.polynomials.clone(),
        };
        out.validate(sub, ACTION_TOL)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2t() -> MagneticGroup {
        MagneticGroup::new(vec![vec![0, 1], vec![1, 0]], vec![false, true]).unwrap()
    }

    #[test]
    fn fills_coset_and_validates() {
        let g = z2t();
        let a = ProbeRepAction::from_partial(
            &g,
            vec![
                Some(RMatrix::identity(3, 3)),
                Some(-RMatrix::identity(3, 3)),
            ],
            ActionKind::Momentum,
            "k",
        )
        .unwrap();
        assert_eq!(a.character(1), -3.0);
        assert_eq!(a.invariant_count(), 0.0);
        let bad = ProbeRepAction::new(
            &g,
            vec![RMatrix::identity(1, 1), RMatrix::from_element(1, 1, 2.0)],
            ActionKind::Custom,
            "x",
        );
        assert!(matches!(bad, Err(Error::InvalidAction(_))));
    }

    #[test]
    fn dual_of_orthogonal_and_oblique() {
        let g = z2t();
        let id = ProbeRepAction::new(
            &g,
            vec![RMatrix::identity(2, 2); 2],
            ActionKind::Custom,
            "id",
        )
        .unwrap();
        assert_eq!(id.dual().unwrap().matrix(1), &RMatrix::identity(2, 2));

        // swap of two non-orthogonal lattice vectors written in an oblique basis
        let s = RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        let swap = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let d = &s * swap * s.clone().try_inverse().unwrap();
        let a = ProbeRepAction::new(
            &g,
            vec![RMatrix::identity(2, 2), d.clone()],
            ActionKind::Custom,
            "obl",
        )
        .unwrap();
        let dual = a.dual().unwrap();
        assert!((dual.matrix(1).transpose() * &d - RMatrix::identity(2, 2)).amax() < 1e-12);
        assert!((dual.matrix(1) - &d).amax() > 0.1);
    }
}
