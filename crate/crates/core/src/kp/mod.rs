//! Symmetry-allowed couplings `H(x) = sum_i r_i sum_m x_m gamma_i^m` between the
//! states of a co-representation and a probe channel `x` (momentum, polynomials
//! of momentum, external fields).

pub mod action;
pub mod oracle;
pub mod poly;
pub mod probe;

use log::{debug, warn};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corep::CoRep;
use crate::error::{Error, Result};
use crate::linalg::{
    conj, eigenspace_of_one, hermitian_residual, identity, kron, max_abs, real_column_span,
    seeded_rng, symmetric_unitary_sqrt, to_complex, CMatrix, RMatrix,
};

pub use action::{ActionKind, ProbeRepAction};
pub use oracle::{solve_constraints, OracleSolution};
pub use poly::{polynomial_channel, Polynomial};
pub use probe::{dispersion_order, probe_stability, DispersionReport, ProbeReport};

/// Default tolerance of the coupling construction.
pub const KP_TOL: f64 = 1e-9;
/// Distance from an integer accepted for a multiplicity.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

fn check_pair(r: &CoRep, a: &ProbeRepAction) -> Result<()> {
    if a.order() != r.group().order() {
        return Err(Error::InvalidAction(
            "action and co-rep belong to different groups".into(),
        ));
    }
    Ok(())
}

/// Multiplicity of the channel in the symmetric product of the co-representation,
/// by characters: `(1/2|H|) sum_h [|chi(h)|^2 chi_v(h) + chi_v(u) omega(u,u) chi(u^2)]`
/// with `u = h T0` and `chi_v(u) = Tr D(h) D(T0)`. For unitary groups
/// `(1/|H|) sum_h |chi(h)|^2 chi_v(h)`.
pub fn multiplicity_value(r: &CoRep, a: &ProbeRepAction) -> Result<Complex64> {
    check_pair(r, a)?;
    let g = r.group();
    let chi = r.character();
    let h_order = chi.elements.len() as f64;
    let first: f64 = chi
        .elements
        .iter()
        .zip(&chi.chi)
        .map(|(&h, c)| c.norm_sqr() * a.character(h))
        .sum();
    let Some(t0) = g.t0() else {
        return Ok(Complex64::from(first / h_order));
    };
    let second: Complex64 = chi
        .elements
        .iter()
        .map(|&h| {
            let u = g.mul(h, t0);
            r.omega().get(u, u) * r.matrix(g.mul(u, u)).trace() * a.character(u)
        })
        .sum();
    Ok((Complex64::from(first) + second) / (2.0 * h_order))
}

/// Simplified form valid when `D(T0) = +I` or `-I`:
/// `(1/2|H|) sum_h [|chi(h)|^2 +- omega(u,u) chi(u^2)] chi_v(h)`. `None` otherwise.
pub fn multiplicity_special_form(r: &CoRep, a: &ProbeRepAction) -> Option<Complex64> {
    let g = r.group();
    let t0 = g.t0()?;
    let dt = a.matrix(t0);
    let q = a.dim();
    let sign = if (dt - RMatrix::identity(q, q)).amax() < 1e-12 {
        1.0
    } else if (dt + RMatrix::identity(q, q)).amax() < 1e-12 {
        -1.0
    } else {
        return None;
    };
    let chi = r.character();
    let total: Complex64 = chi
        .elements
        .iter()
        .zip(&chi.chi)
        .map(|(&h, c)| {
            let u = g.mul(h, t0);
            (c.norm_sqr() + sign * r.omega().get(u, u) * r.matrix(g.mul(u, u)).trace())
                * a.character(h)
        })
        .sum();
    Some(total / (2.0 * chi.elements.len() as f64))
}

fn round_multiplicity(v: Complex64, tol: f64) -> Result<usize> {
    let n = v.re.round();
    if (v.re - n).abs() > tol || v.im.abs() > tol || n < 0.0 {
        return Err(Error::NonIntegerMultiplicity(v.re));
    }
    Ok(n as usize)
}

/// Number of independent real coupling parameters for the channel.
pub fn linear_multiplicity(r: &CoRep, a: &ProbeRepAction, tol: f64) -> Result<usize> {
    round_multiplicity(multiplicity_value(r, a)?, tol)
}

/// `W(g) = D(g) x V(g)` on the stacked space of `q` matrices, with index layout
/// `m d^2 + i d + j`. For unitary groups `W(h) = D(h) x M(h) x M*(h)`.
pub fn build_w(r: &CoRep, a: &ProbeRepAction, g: usize) -> Result<CMatrix> {
    check_pair(r, a)?;
    let v = r.product_rep_v(g)?;
    Ok(kron(&to_complex(a.matrix(g)), &v))
}

/// `P = (1/|H|) sum_h W(h)`, the projector onto vectors invariant under H.
pub fn identity_projector(r: &CoRep, a: &ProbeRepAction) -> Result<CMatrix> {
    let hs = r.group().unitary_elements();
    let n = a.dim() * r.dim() * r.dim();
    let mut p = CMatrix::zeros(n, n);
    for &h in hs {
        p += build_w(r, a, h)?;
    }
    Ok(p / Complex64::from(hs.len() as f64))
}

/// Generalized transpose `T[(m,k,l),(n,a,b)] = eta0 D_mn(T0) M(sigma)_la delta_bk`,
/// whose fixed vectors encode hermiticity together with T0 covariance.
pub fn twist_operator(r: &CoRep, a: &ProbeRepAction) -> Result<CMatrix> {
    let g = r.group();
    let t0 = g.require_t0()?;
    let sigma = g.mul(t0, t0);
    let eta0 = r.omega().get(t0, t0);
    let (d, q) = (r.dim(), a.dim());
    let ms = r.matrix(sigma);
    let dt = a.matrix(t0);
    let n = q * d * d;
    let mut t = CMatrix::zeros(n, n);
    for m in 0..q {
        for nn in 0..q {
            let dmn = dt[(m, nn)];
            if dmn == 0.0 {
                continue;
            }
            for k in 0..d {
                for l in 0..d {
                    for aa in 0..d {
                        t[(m * d * d + k * d + l, nn * d * d + aa * d + k)] =
                            eta0 * ms[(l, aa)] * dmn;
                    }
                }
            }
        }
    }
    Ok(t)
}

/// Index swap `vec(X) -> vec(X^T)` on each of the `q` slices.
fn slice_transpose(q: usize, d: usize) -> CMatrix {
    let n = q * d * d;
    let mut s = CMatrix::zeros(n, n);
    for m in 0..q {
        for i in 0..d {
            for j in 0..d {
                s[(m * d * d + i * d + j, m * d * d + j * d + i)] = Complex64::from(1.0);
            }
        }
    }
    s
}

/// How the T0 (or hermiticity) real structure was fixed on the coupling space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeFix {
    /// `"symmetric_sqrt"` or `"real_structure"`.
    pub method: String,
    pub branch_cut_hits: usize,
    /// `|Delta^+ S Delta* - I|` after rebasing, `S` the antilinear action matrix.
    pub rebased_residual: f64,
    /// `|S zeta* - zeta M|`: invariance of the coupling space under `S K`.
    pub invariance_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KpResiduals {
    /// Largest `|gamma - gamma^dagger|` over emitted matrices (no symmetrization applied).
    pub hermiticity: f64,
    /// `max |M(h) gamma^m M(h)^dagger - sum_n D~_nm(h) gamma^n|`
    pub unitary_covariance: f64,
    /// `max |M(u) gamma^m* M(u)^dagger - sum_n gamma^n D~_nm(u)|`
    pub antiunitary_covariance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KpModel {
    pub channel: String,
    pub kind: ActionKind,
    pub multiplicity: usize,
    pub q: usize,
    pub d: usize,
    /// `gammas[i][m]`: the `m`-th matrix of the `i`-th independent coupling.
    #[serde(
        serialize_with = "crate::io::ser_matrix_grid",
        deserialize_with = "crate::io::de_matrix_grid"
    )]
    pub gammas: Vec<Vec<CMatrix>>,
    #[serde(skip_serializing_if = "Option::is_none", skip_deserializing)]
    pub polynomials: Option<Vec<Polynomial>>,
    pub gauge: GaugeFix,
    pub residuals: KpResiduals,
    pub tolerance: f64,
}

impl KpModel {
    /// `H(x) = sum_i r_i sum_m x_m gamma_i^m`.
    pub fn hamiltonian(&self, coeffs: &[f64], x: &[f64]) -> CMatrix {
        let mut h = CMatrix::zeros(self.d, self.d);
        for (gi, &ri) in self.gammas.iter().zip(coeffs) {
            for (gm, &xm) in gi.iter().zip(x) {
                h += gm * Complex64::from(ri * xm);
            }
        }
        h
    }

    /// Orthonormal real basis of the span of the couplings, in the coordinates of
    /// [`oracle::family_coordinates`].
    pub fn real_span(&self) -> RMatrix {
        let n = self.q * self.d * self.d;
        let mut m = RMatrix::zeros(n, self.gammas.len());
        for (i, g) in self.gammas.iter().enumerate() {
            m.set_column(i, &oracle::family_coordinates(g));
        }
        real_column_span(&m, 1e-10)
    }
}

/// Largest residual of `M(g) conj^s(H(x)) M(g)^dagger = H(D~(g) x)` over all g.
pub fn covariance_residual(
    r: &CoRep,
    a: &ProbeRepAction,
    model: &KpModel,
    coeffs: &[f64],
    x: &[f64],
) -> Result<f64> {
    let dual = a.dual()?;
    let g = r.group();
    let h = model.hamiltonian(coeffs, x);
    let hc = conj(&h);
    let xv = DVector::from_column_slice(x);
    let mut worst: f64 = 0.0;
    for e in 0..g.order() {
        let m = r.matrix(e);
        let lhs = m * if g.is_antiunitary(e) { &hc } else { &h } * m.adjoint();
        let gx = dual.matrix(e) * &xv;
        let rhs = model.hamiltonian(coeffs, gx.as_slice());
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    Ok(worst)
}

/// [`covariance_residual`] maximized over seeded random coefficients and channel vectors.
pub fn covariance_roundtrip(
    r: &CoRep,
    a: &ProbeRepAction,
    model: &KpModel,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let coeffs: Vec<f64> = (0..model.multiplicity)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let x: Vec<f64> = (0..model.q).map(|_| rng.random_range(-1.0..1.0)).collect();
        worst = worst.max(covariance_residual(r, a, model, &coeffs, &x)?);
    }
    Ok(worst)
}

/// Hermiticity and covariance residuals of coupling families, against the dual action.
pub fn covariance_residuals(
    r: &CoRep,
    dual: &ProbeRepAction,
    gammas: &[Vec<CMatrix>],
) -> KpResiduals {
    let g = r.group();
    let mut hermiticity: f64 = 0.0;
    let mut unitary_covariance: f64 = 0.0;
    let mut antiunitary_covariance: f64 = 0.0;
    for family in gammas {
        for gm in family {
            hermiticity = hermiticity.max(hermitian_residual(gm));
        }
        for e in 0..g.order() {
            let anti = g.is_antiunitary(e);
            let m = r.matrix(e);
            let de = dual.matrix(e);
            for (mi, gm) in family.iter().enumerate() {
                let lhs = m * if anti { conj(gm) } else { gm.clone() } * m.adjoint();
                let mut rhs = CMatrix::zeros(gm.nrows(), gm.ncols());
                for (n, gn) in family.iter().enumerate() {
                    rhs += gn * Complex64::from(de[(n, mi)]);
                }
                let res = max_abs(&(lhs - rhs));
                if anti {
                    antiunitary_covariance = antiunitary_covariance.max(res);
                } else {
                    unitary_covariance = unitary_covariance.max(res);
                }
            }
        }
    }
    KpResiduals {
        hermiticity,
        unitary_covariance,
        antiunitary_covariance,
    }
}

/// Rebases `zeta` so that the antilinear map `v -> S v*` acts as plain conjugation.
fn fix_real_structure(zeta: &CMatrix, s: &CMatrix, tol: f64) -> Result<(CMatrix, GaugeFix)> {
    let p = zeta.ncols();
    let sz = s * conj(zeta);
    let m = zeta.adjoint() * &sz;
    let invariance_residual = max_abs(&(&sz - zeta * &m));
    let scale = max_abs(s).max(1.0);
    if invariance_residual > tol * scale {
        return Err(Error::GaugeFixFailed(invariance_residual));
    }
    let eye = identity(p);
    let involution = max_abs(&(&m * conj(&m) - &eye));
    if involution > tol * scale * scale {
        return Err(Error::GaugeFixFailed(involution));
    }
    let unitary = max_abs(&(&m * m.adjoint() - &eye));
    let (delta, method, hits) = if unitary <= tol {
        let root = symmetric_unitary_sqrt(&m, tol.max(1e-12) * (p as f64).max(1.0))?;
        (zeta * &root.root, "symmetric_sqrt", root.branch_cut_hits)
    } else {
        // fixed vectors c = M c* of the antilinear involution, in realified form
        warn!("coupling space: T0 action is not unitary in this basis (residual {unitary:.3e}); using the real-structure fixed space");
        let re = m.map(|z| z.re);
        let im = m.map(|z| z.im);
        let mut j = RMatrix::zeros(2 * p, 2 * p);
        j.view_mut((0, 0), (p, p)).copy_from(&re);
        j.view_mut((0, p), (p, p)).copy_from(&im);
        j.view_mut((p, 0), (p, p)).copy_from(&im);
        j.view_mut((p, p), (p, p)).copy_from(&(-&re));
        let fixed = (RMatrix::identity(2 * p, 2 * p) + j) * 0.5;
        let span = real_column_span(&fixed, 1e-8);
        if span.ncols() != p {
            return Err(Error::GaugeFixFailed(span.ncols() as f64 - p as f64));
        }
        let c = CMatrix::from_fn(p, p, |i, k| Complex64::new(span[(i, k)], span[(i + p, k)]));
        (zeta * c, "real_structure", 0)
    };
    let pinv = delta
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::InvalidAction(e.to_string()))?;
    let rebased_residual = max_abs(&(pinv * s * conj(&delta) - &eye));
    if rebased_residual > tol * scale {
        return Err(Error::GaugeFixFailed(rebased_residual));
    }
    Ok((
        delta,
        GaugeFix {
            method: method.to_string(),
            branch_cut_hits: hits,
            rebased_residual,
            invariance_residual,
        },
    ))
}

/// Builds the independent Hermitian coupling families for a channel.
///
/// The invariant subspace of the stacked space is extracted from a projector,
/// rebased so that T0 (or hermiticity, for unitary groups) acts as complex
/// conjugation, and each basis vector is cut into its `q` matrix slices.
pub fn build_gamma_matrices(r: &CoRep, a: &ProbeRepAction, tol: f64) -> Result<KpModel> {
    check_pair(r, a)?;
    r.ensure_valid(crate::corep::COREP_TOL)?;
    let g = r.group();
    let (d, q) = (r.dim(), a.dim());
    let p_expected = linear_multiplicity(r, a, MULTIPLICITY_TOL)?;
    if p_expected == 0 {
        return Err(Error::EmptyChannel);
    }
    let p_h = identity_projector(r, a)?;
    let n = q * d * d;
    let (projector, s) = match g.t0() {
        Some(t0) => {
            let t = twist_operator(r, a)?;
            let sym = (identity(n) + t) * Complex64::from(0.5);
            (&p_h * sym * &p_h, build_w(r, a, t0)?)
        }
        None => (p_h, slice_transpose(q, d)),
    };
    let zeta = eigenspace_of_one(&projector, tol.max(1e-10) * 10.0)?;
    if zeta.ncols() != p_expected {
        return Err(Error::DimensionMismatch(format!(
            "coupling space has dimension {} but the character formula gives {p_expected}",
            zeta.ncols()
        )));
    }
    debug!(
        "channel {}: coupling space of dimension {}",
        a.name,
        zeta.ncols()
    );
    let (delta, gauge) = fix_real_structure(&zeta, &s, tol.max(1e-10) * 10.0)?;

    let right = g.t0().map(|t0| conj(r.matrix(t0)));
    let gammas: Vec<Vec<CMatrix>> = (0..delta.ncols())
        .map(|i| {
            (0..q)
                .map(|m| {
                    let slice = CMatrix::from_fn(d, d, |k, l| delta[(m * d * d + k * d + l, i)]);
                    match &right {
                        Some(mc) => slice * mc,
                        None => slice,
                    }
                })
                .collect()
        })
        .collect();
    let dual = a.dual()?;
    let residuals = covariance_residuals(r, &dual, &gammas);
    let worst = residuals
        .hermiticity
        .max(residuals.unitary_covariance)
        .max(residuals.antiunitary_covariance);
    if worst > tol.max(1e-10) * 100.0 {
        return Err(Error::GaugeFixFailed(worst));
    }
    Ok(KpModel {
        channel: a.name.clone(),
        kind: a.kind,
        multiplicity: gammas.len(),
        q,
        d,
        gammas,
        polynomials: a.polynomials.clone(),
        gauge,
        residuals,
        tolerance: tol,
    })
}
