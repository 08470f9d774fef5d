//! Homogeneous polynomial channels: the action induced on degree-N monomials by
//! substituting transformed momenta, and its decomposition into irreducible real
//! channels.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::MagneticGroup;
use crate::linalg::{eigh_real, seeded_rng, RMatrix};

use super::action::{ActionKind, ProbeRepAction};

/// Coefficients below this magnitude are dropped from printed polynomials.
const COEFF_EPS: f64 = 1e-12;

/// A polynomial `sum c * x1^a1 x2^a2 ...` stored as sorted exponent tuples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn monomial(exps: Vec<u32>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(exps, 1.0);
        Self { terms }
    }

    pub fn linear(coeffs: &[f64]) -> Self {
        let q = coeffs.len();
        let mut terms = BTreeMap::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                let mut e = vec![0; q];
                e[i] = 1;
                terms.insert(e, c);
            }
        }
        Self { terms }
    }

    pub fn constant(q: usize, c: f64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; q], c);
        Self { terms }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        Polynomial { terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &v)| v.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms.get(exps).copied().unwrap_or(0.0)
    }
}

fn var_name(i: usize, q: usize) -> String {
    if q <= 3 {
        ["k_x", "k_y", "k_z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        // highest powers of the first variable first
        for (e, &c) in self.terms.iter().rev() {
            if c.abs() < COEFF_EPS {
                continue;
            }
            let q = e.len();
            let mut mono = String::new();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push(' ');
                }
                mono.push_str(&var_name(i, q));
                if k > 1 {
                    mono.push_str(&format!("^{k}"));
                }
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if mono.is_empty() {
                write!(f, "{a:.6}")?;
            } else if (a - 1.0).abs() < 1e-12 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a:.6} {mono}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Exponent tuples of the degree-`n` monomials in `q` variables, in descending
/// lexicographic order.
pub fn monomial_exponents(q: usize, n: u32) -> Vec<Vec<u32>> {
    fn rec(q: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == q {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=n).rev() {
            prefix.push(k);
            rec(q, n - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if q == 0 {
        return out;
    }
    rec(q, n, &mut Vec::new(), &mut out);
    out
}

/// Matrix `A` with `m_j(L x) = sum_i A_ji m_i(x)` for the degree-`n` monomials `m`
/// and a linear substitution `L`.
pub fn substitution_matrix(l: &RMatrix, n: u32) -> RMatrix {
    let q = l.nrows();
    let monos = monomial_exponents(q, n);
    let index: BTreeMap<&Vec<u32>, usize> = monos.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let rows: Vec<Polynomial> = (0..q)
        .map(|r| Polynomial::linear(&l.row(r).iter().copied().collect::<Vec<_>>()))
        .collect();
    let mut a = RMatrix::zeros(monos.len(), monos.len());
    for (j, e) in monos.iter().enumerate() {
        let mut p = Polynomial::constant(q, 1.0);
        for (var, &k) in e.iter().enumerate() {
            for _ in 0..k {
                p = p.mul(&rows[var]);
            }
        }
        for (exps, c) in &p.terms {
            a[(j, index[exps])] += c;
        }
    }
    a
}

/// Symmetric positive square root and its inverse.
fn sqrt_and_inverse(q: &RMatrix) -> (RMatrix, RMatrix) {
    let (vals, vecs) = eigh_real(q);
    let n = vals.len();
    let mut s = RMatrix::zeros(n, n);
    let mut si = RMatrix::zeros(n, n);
    for i in 0..n {
        let v = vals[i].max(0.0).sqrt();
        s[(i, i)] = v;
        si[(i, i)] = 1.0 / v;
    }
    (&vecs * s * vecs.transpose(), &vecs * si * vecs.transpose())
}

/// Splits a real linear representation into irreducible real subspaces.
///
/// With the invariant metric `Q = sum_g R^T R` and `S = Q^{1/2}`, the matrices
/// `S R S^{-1}` are orthogonal. Eigenspaces of a symmetric element of their
/// commutant are invariant; they are refined with further seeded random elements
/// until the commutant restricted to each piece is scalar. Returned columns are in
/// the original coordinates.
pub fn decompose_real_rep(reps: &[RMatrix], seed: u64) -> Vec<RMatrix> {
    let n = reps[0].nrows();
    let mut q = RMatrix::zeros(n, n);
    for r in reps {
        q += r.transpose() * r;
    }
    let (s, si) = sqrt_and_inverse(&q);
    let ortho: Vec<RMatrix> = reps.iter().map(|r| &s * r * &si).collect();
    let mut rng = seeded_rng(seed);

    let average = |x: &RMatrix, basis: &RMatrix| -> RMatrix {
        let mut l = RMatrix::zeros(basis.ncols(), basis.ncols());
        for b in &ortho {
            let rb = basis.transpose() * b * basis;
            l += &rb * x * rb.transpose();
        }
        l
    };

    // each pending piece carries the number of random probes it has survived
    let mut pending = vec![(RMatrix::identity(n, n), 0u8)];
    let mut done = Vec::new();
    // the first probe is a fixed diagonal so the original basis is kept when the
    // action permits it
    let mut first = true;
    while let Some((basis, survived)) = pending.pop() {
        let k = basis.ncols();
        if k == 1 || survived >= 2 {
            done.push(basis);
            continue;
        }
        let x = if first {
            first = false;
            RMatrix::from_diagonal(&nalgebra::DVector::from_fn(k, |i, _| {
                1.0 + i as f64 + ((i + 2) as f64).sqrt().fract()
            }))
        } else {
            let g = RMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
            &g + g.transpose()
        };
        let l = average(&x, &basis);
        let (vals, vecs) = eigh_real(&l);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let values: Vec<f64> = vals.iter().copied().collect();
        let ranges = crate::linalg::cluster_sorted(&values, 1e-8 * scale);
        if ranges.len() == 1 {
            pending.push((basis, survived + 1));
            continue;
        }
        let rotated = &basis * vecs;
        for r in ranges.into_iter().rev() {
            pending.push((rotated.columns(r.start, r.len()).into_owned(), 0));
        }
    }
    done.into_iter().map(|z| &si * z).collect()
}

/// Restricts a representation to an invariant subspace spanned by the columns of `y`.
fn restrict_to(reps: &[RMatrix], y: &RMatrix) -> Result<Vec<RMatrix>> {
    let pinv = y
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::InvalidAction(e.to_string()))?;
    Ok(reps.iter().map(|r| &pinv * r * y).collect())
}

/// Rotates the columns of a channel basis into column echelon form: the first
/// monomial that occurs appears only in the first polynomial, and so on. Makes
/// each leading coefficient positive and rescales so the largest coefficient is 1.
/// Only an orthogonal rotation and a common scale are applied, so an orthogonal
/// restricted action stays orthogonal.
fn echelon(y: &RMatrix) -> RMatrix {
    let k = y.ncols();
    let mut out = y.clone();
    let mut j0 = 0;
    for r in 0..out.nrows() {
        if j0 == k {
            break;
        }
        let v = out.view((r, j0), (1, k - j0)).transpose();
        if v.norm() < 1e-9 {
            continue;
        }
        // Householder reflection exchanging v/|v| and the first unit vector
        let mut u = v.clone_owned();
        u[0] -= v.norm();
        let q = if u.norm() < 1e-15 {
            RMatrix::identity(k - j0, k - j0)
        } else {
            RMatrix::identity(k - j0, k - j0) - &u * u.transpose() * (2.0 / u.norm_squared())
        };
        let rotated = out.columns(j0, k - j0) * q;
        out.columns_mut(j0, k - j0).copy_from(&rotated);
        j0 += 1;
    }
    for j in 0..out.ncols() {
        let lead = out
            .column(j)
            .iter()
            .copied()
            .find(|v| v.abs() > 1e-9)
            .unwrap_or(1.0);
        if lead < 0.0 {
            out.column_mut(j).neg_mut();
        }
    }
    let top = out.amax();
    if top > 0.0 {
        out /= top;
    }
    out.map(|v| if v.abs() < 1e-13 { 0.0 } else { v })
}

fn monomial_polys(q: usize, n: u32) -> Vec<Polynomial> {
    monomial_exponents(q, n)
        .into_iter()
        .map(Polynomial::monomial)
        .collect()
}

/// Channels carried by the degree-`n` polynomials of a momentum action.
///
/// Each channel is returned as a vector-side action `D` whose dual describes how
/// its polynomials `P_i` transform: `P_j(D~(g) k) = sum_i D~_ji(g) P_i(k)`.
/// For `n = 1` the input action itself is returned as the single channel; for
/// higher orders the channels are irreducible.
pub fn polynomial_channel(
    group: &MagneticGroup,
    a: &ProbeRepAction,
    n: u32,
    seed: u64,
) -> Result<Vec<ProbeRepAction>> {
    match n {
        0 => Err(Error::InvalidAction(
            "polynomial order must be at least 1".into(),
        )),
        1 => {
            let q = a.dim();
            let polys = (0..q)
                .map(|i| {
                    let mut c = vec![0.0; q];
                    c[i] = 1.0;
                    Polynomial::linear(&c)
                })
                .collect();
            Ok(vec![a.clone().with_polynomials(polys)])
        }
        _ => irreducible_channels(group, a, n, seed),
    }
}

/// Irreducible real channels of the degree-`n` polynomials (any `n >= 1`).
pub fn irreducible_channels(
    group: &MagneticGroup,
    a: &ProbeRepAction,
    n: u32,
    seed: u64,
) -> Result<Vec<ProbeRepAction>> {
    if n == 0 {
        return Err(Error::InvalidAction(
            "polynomial order must be at least 1".into(),
        ));
    }
    let q = a.dim();
    let dual = a.dual()?;
    let subst: Vec<RMatrix> = dual
        .matrices()
        .iter()
        .map(|l| substitution_matrix(l, n))
        .collect();
    let vector_side = subst
        .iter()
        .enumerate()
        .map(|(g, s)| {
            s.clone()
                .try_inverse()
                .map(|i| i.transpose())
                .ok_or(Error::SingularAction(g))
        })
        .collect::<Result<Vec<_>>>()?;
    let monos = monomial_polys(q, n);
    let mut out = Vec::new();
    for (c, y) in decompose_real_rep(&vector_side, seed)
        .into_iter()
        .enumerate()
    {
        let y = echelon(&y);
        let mats = restrict_to(&vector_side, &y)?;
        let polys = (0..y.ncols())
            .map(|i| {
                let mut p = Polynomial::default();
                for (a_idx, m) in monos.iter().enumerate() {
                    let coeff = y[(a_idx, i)];
                    if coeff.abs() > COEFF_EPS {
                        for (e, v) in &m.terms {
                            *p.terms.entry(e.clone()).or_insert(0.0) += coeff * v;
                        }
                    }
                }
                p
            })
            .collect();
        let name = format!("{}^{n}#{c}", a.name);
        out.push(
            ProbeRepAction::new(group, mats, ActionKind::Polynomial(n as usize), &name)?
                .with_polynomials(polys),
        );
    }
    Ok(out)
}

/// Largest mismatch of `P_j(D~(g) k) = sum_i D~_ji(g) P_i(k)` over random momenta.
pub fn substitution_residual(
    momentum: &ProbeRepAction,
    channel: &ProbeRepAction,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let polys = channel
        .polynomials
        .as_ref()
        .ok_or_else(|| Error::InvalidAction("channel carries no polynomials".into()))?;
    let kd = momentum.dual()?;
    let cd = channel.dual()?;
    let mut rng = seeded_rng(seed);
    let q = momentum.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let k = nalgebra::DVector::from_fn(q, |_, _| rng.random_range(-1.0..1.0));
        let p: Vec<f64> = polys.iter().map(|pl| pl.eval(k.as_slice())).collect();
        let pv = nalgebra::DVector::from_vec(p);
        for g in 0..momentum.order() {
            let gk = kd.matrix(g) * &k;
            let lhs = nalgebra::DVector::from_iterator(
                polys.len(),
                polys.iter().map(|pl| pl.eval(gk.as_slice())),
            );
            let rhs = cd.matrix(g) * &pv;
            worst = worst.max((lhs - rhs).amax());
        }
    }
    Ok(worst)
}
