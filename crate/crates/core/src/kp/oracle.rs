//! Direct solution of the coupling constraints by a real null-space computation.
//!
//! The unknowns are `q` Hermitian `d x d` matrices `G^m`, written in an
//! orthonormal real basis of Hermitian matrices. For every group element the
//! residual `M(g) conj^s(G^m) M(g)^dagger - sum_n D~_nm(g) G^n` is stacked
//! (real and imaginary parts) into one real linear system.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::corep::CoRep;
use crate::error::{Error, Result};
use crate::linalg::{conj_if, real_null_space, CMatrix, RMatrix};

use super::action::ProbeRepAction;

/// Relative eigenvalue cut of the Gram matrix used to detect the null space.
pub const ORACLE_TOL: f64 = 1e-10;

/// Orthonormal real basis of the `d x d` Hermitian matrices: `E_ii`, then for
/// `i < j` the pair `(E_ij + E_ji)/sqrt2`, `i(E_ij - E_ji)/sqrt2`.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = CMatrix::zeros(d, d);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(i, j)] = Complex64::new(s, 0.0);
            sym[(j, i)] = Complex64::new(s, 0.0);
            out.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(i, j)] = Complex64::new(0.0, s);
            anti[(j, i)] = Complex64::new(0.0, -s);
            out.push(anti);
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`] (the anti-Hermitian
/// part is discarded).
pub fn hermitian_coordinates(h: &CMatrix) -> DVector<f64> {
    let d = h.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(h[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    DVector::from_vec(out)
}

/// Stacked coordinates of a family `G^1..G^q`.
pub fn family_coordinates(family: &[CMatrix]) -> DVector<f64> {
    let parts: Vec<f64> = family
        .iter()
        .flat_map(|g| hermitian_coordinates(g).iter().copied().collect::<Vec<_>>())
        .collect();
    DVector::from_vec(parts)
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    /// Orthonormal columns spanning the solution space in stacked coordinates.
    pub basis: RMatrix,
    pub q: usize,
    pub d: usize,
}

impl OracleSolution {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Column `i` of the basis as `q` Hermitian matrices.
    pub fn family(&self, i: usize) -> Vec<CMatrix> {
        let herm = hermitian_basis(self.d);
        let n = self.d * self.d;
        (0..self.q)
            .map(|m| {
                let mut g = CMatrix::zeros(self.d, self.d);
                for (k, b) in herm.iter().enumerate() {
                    g += b * Complex64::from(self.basis[(m * n + k, i)]);
                }
                g
            })
            .collect()
    }
}

/// Solves the covariance constraints for every element of the group directly.
pub fn solve_constraints(r: &CoRep, a: &ProbeRepAction, tol: f64) -> Result<OracleSolution> {
    let g = r.group();
    if a.order() != g.order() {
        return Err(Error::DimensionMismatch(
            "action and co-rep belong to different groups".into(),
        ));
    }
    let dual = a.dual()?;
    let (d, q) = (r.dim(), a.dim());
    let herm = hermitian_basis(d);
    let n = d * d;
    let unknowns = q * n;
    let rows_per_g = 2 * q * n;
    let mut sys = RMatrix::zeros(rows_per_g * g.order(), unknowns);
    for (col, (m0, b)) in (0..q)
        .flat_map(|m| herm.iter().map(move |b| (m, b)))
        .enumerate()
    {
        for e in 0..g.order() {
            let mg = r.matrix(e);
            let rotated = mg * conj_if(b, g.is_antiunitary(e)) * mg.adjoint();
            let base = e * rows_per_g;
            for m in 0..q {
                let mut res = -b * Complex64::from(dual.matrix(e)[(m0, m)]);
                if m == m0 {
                    res += &rotated;
                }
                for (k, z) in res.iter().enumerate() {
                    sys[(base + 2 * (m * n + k), col)] = z.re;
                    sys[(base + 2 * (m * n + k) + 1, col)] = z.im;
                }
            }
        }
    }
    Ok(OracleSolution {
        basis: real_null_space(&sys, tol),
        q,
        d,
    })
}
