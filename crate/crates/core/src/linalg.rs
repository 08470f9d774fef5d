//! Dense numerical kernels used throughout: Hermitian eigensolver, simultaneous
//! diagonalization, the square root of a symmetric unitary and projector ranges.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// All randomized routines draw from ChaCha8 seeded with a `u64`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn real_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> RMatrix {
    RMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let qr = complex_gaussian(rng, d, d).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let col = q.column(j) * (rjj / rjj.norm());
            q.set_column(j, &col);
        }
    }
    q
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// `conj^s(m)`: complex conjugate when `s` holds, identity otherwise.
pub fn conj_if(m: &CMatrix, s: bool) -> CMatrix {
    if s {
        conj(m)
    } else {
        m.clone()
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn hermitian_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm()
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.trace()
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

/// Hermitian eigensolver. The input must be Hermitian to within
/// `tol * max(1, |A|)`; it is symmetrized before solving.
pub fn eigh(a: &CMatrix, tol: f64) -> Result<EigenSystem> {
    assert!(a.is_square(), "eigh needs a square matrix");
    let scale = a.norm().max(1.0);
    let res = hermitian_residual(a);
    if res > tol * scale {
        return Err(Error::NotHermitian(res));
    }
    let d = a.nrows();
    if d == 0 {
        return Ok(EigenSystem {
            values: DVector::zeros(0),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(d, d);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok(EigenSystem { values, vectors })
}

/// Real symmetric eigensolver with ascending eigenvalues and orthogonal vectors.
pub fn eigh_real(a: &RMatrix) -> (DVector<f64>, RMatrix) {
    let d = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = RMatrix::zeros(d, d);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Splits ascending values into runs whose neighbours differ by at most `threshold`.
pub fn cluster_sorted(values: &[f64], threshold: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > threshold {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

fn columns(m: &CMatrix, range: std::ops::Range<usize>) -> CMatrix {
    m.columns(range.start, range.len()).into_owned()
}

/// Output of [`simultaneous_diag`].
#[derive(Debug, Clone)]
pub struct SimultaneousDiag {
    pub unitary: CMatrix,
    /// `eigenvalues[k][c]` is the eigenvalue of family member `k` on column `c`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Sizes of the degenerate clusters of the random combination, for auditing.
    pub cluster_sizes: Vec<usize>,
}

/// Simultaneously diagonalizes a family of pairwise commuting Hermitian matrices.
///
/// A seeded random real combination is diagonalized first; each degenerate
/// cluster is then refined by the family members in order, restricted to the
/// cluster. Columns come out sorted lexicographically by their eigenvalue tuples.
pub fn simultaneous_diag(family: &[CMatrix], seed: u64, tol: f64) -> Result<SimultaneousDiag> {
    let d = family.first().map_or(0, |a| a.nrows());
    for (k, a) in family.iter().enumerate() {
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "family member {k} has wrong shape"
            )));
        }
        let res = hermitian_residual(a);
        if res > tol * a.norm().max(1.0) {
            return Err(Error::NotHermitian(res));
        }
    }
    for a in 0..family.len() {
        for b in a + 1..family.len() {
            let norm = commutator_norm(&family[a], &family[b]);
            if norm > tol * (family[a].norm() * family[b].norm()).max(1.0) {
                return Err(Error::NotCommuting { a, b, norm });
            }
        }
    }
    if family.is_empty() || d == 0 {
        return Ok(SimultaneousDiag {
            unitary: identity(d),
            eigenvalues: vec![Vec::new(); family.len()],
            cluster_sizes: Vec::new(),
        });
    }

    let mut rng = seeded_rng(seed);
    let mut combo = CMatrix::zeros(d, d);
    for a in family {
        let r: f64 = rng.random_range(0.5..1.5);
        combo += a.scale(r / a.norm().max(1.0));
    }
    let eig = eigh(&combo, tol)?;
    let threshold = tol * combo.norm().max(1.0);
    let values: Vec<f64> = eig.values.iter().copied().collect();
    let mut blocks = Vec::new();
    let mut cluster_sizes = Vec::new();
    for range in cluster_sorted(&values, threshold) {
        cluster_sizes.push(range.len());
        let basis = columns(&eig.vectors, range);
        refine(family, 0, basis, tol, &mut blocks)?;
    }
    debug!("simultaneous_diag: d={d} clusters={cluster_sizes:?}");

    let mut unitary = CMatrix::zeros(d, d);
    let mut c = 0;
    for b in &blocks {
        for j in 0..b.ncols() {
            unitary.set_column(c, &b.column(j));
            c += 1;
        }
    }

    let raw: Vec<Vec<f64>> = family
        .iter()
        .map(|a| {
            let diag = unitary.adjoint() * a * &unitary;
            (0..d).map(|i| diag[(i, i)].re).collect()
        })
        .collect();
    let quanta: Vec<f64> = family.iter().map(|a| tol * a.norm().max(1.0)).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| {
        for (k, q) in quanta.iter().enumerate() {
            let (vx, vy) = (raw[k][x], raw[k][y]);
            if (vx - vy).abs() > *q {
                return vx.total_cmp(&vy);
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut sorted = CMatrix::zeros(d, d);
    for (c, &i) in order.iter().enumerate() {
        sorted.set_column(c, &unitary.column(i));
    }
    let eigenvalues = raw
        .iter()
        .map(|v| order.iter().map(|&i| v[i]).collect())
        .collect();
    Ok(SimultaneousDiag {
        unitary: sorted,
        eigenvalues,
        cluster_sizes,
    })
}

fn refine(
    family: &[CMatrix],
    k: usize,
    basis: CMatrix,
    tol: f64,
    out: &mut Vec<CMatrix>,
) -> Result<()> {
    if basis.ncols() <= 1 || k == family.len() {
        out.push(basis);
        return Ok(());
    }
    let restricted = basis.adjoint() * &family[k] * &basis;
    let eig = eigh(&restricted, tol)?;
    let rotated = &basis * &eig.vectors;
    let values: Vec<f64> = eig.values.iter().copied().collect();
    let threshold = tol * family[k].norm().max(1.0);
    for range in cluster_sorted(&values, threshold) {
        refine(family, k + 1, columns(&rotated, range), tol, out)?;
    }
    Ok(())
}

/// Real orthogonal simultaneous diagonalization of commuting real symmetric matrices.
fn simultaneous_diag_real(family: &[RMatrix], tol: f64) -> RMatrix {
    let d = family[0].nrows();
    // fixed generic weights keep the routine deterministic without a seed
    let weights = [1.0, std::f64::consts::FRAC_1_SQRT_2 * 0.917, 0.5497, 0.3312];
    let mut combo = RMatrix::zeros(d, d);
    for (k, a) in family.iter().enumerate() {
        combo += a * weights[k % weights.len()];
    }
    let (vals, vecs) = eigh_real(&combo);
    let threshold = tol * combo.norm().max(1.0);
    let values: Vec<f64> = vals.iter().copied().collect();
    let mut out: Vec<RMatrix> = Vec::new();
    for range in cluster_sorted(&values, threshold) {
        let basis = vecs.columns(range.start, range.len()).into_owned();
        refine_real(family, 0, basis, tol, &mut out);
    }
    let mut q = RMatrix::zeros(d, d);
    let mut c = 0;
    for b in &out {
        for j in 0..b.ncols() {
            q.set_column(c, &b.column(j));
            c += 1;
        }
    }
    q
}

fn refine_real(family: &[RMatrix], k: usize, basis: RMatrix, tol: f64, out: &mut Vec<RMatrix>) {
    if basis.ncols() <= 1 || k == family.len() {
        out.push(basis);
        return;
    }
    let restricted = basis.transpose() * &family[k] * &basis;
    let (vals, vecs) = eigh_real(&restricted);
    let rotated = &basis * vecs;
    let values: Vec<f64> = vals.iter().copied().collect();
    let threshold = tol * family[k].norm().max(1.0);
    for range in cluster_sorted(&values, threshold) {
        let sub = rotated.columns(range.start, range.len()).into_owned();
        refine_real(family, k + 1, sub, tol, out);
    }
}

/// Principal square root of a symmetric unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitarySqrt {
    pub root: CMatrix,
    /// Number of eigenvalues that sat on the branch cut at -1 and were mapped to angle pi.
    pub branch_cut_hits: usize,
}

/// Square root `U` of a unitary `M` with `M M* = I` (equivalently `M = M^T`).
///
/// `M = A + iB` with `A`, `B` real symmetric and commuting, so `M = Q D Q^T`
/// with a real orthogonal `Q`. Eigenphases are taken in (-pi, pi] and halved,
/// giving `U = Q D^{1/2} Q^T`, which is again symmetric and unitary.
pub fn symmetric_unitary_sqrt(m: &CMatrix, tol: f64) -> Result<UnitarySqrt> {
    let d = m.nrows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch("square matrix required".into()));
    }
    let eye = identity(d);
    let res = (m * conj(m) - &eye)
        .norm()
        .max((m * m.adjoint() - &eye).norm());
    if res > tol {
        return Err(Error::NotSymmetricUnitary(res));
    }
    let a = m.map(|z| z.re);
    let b = m.map(|z| z.im);
    let a = (&a + a.transpose()) * 0.5;
    let b = (&b + b.transpose()) * 0.5;
    let q = simultaneous_diag_real(&[a, b], tol.max(1e-12));
    let qc = to_complex(&q);
    let diag = qc.transpose() * m * &qc;
    let mut hits = 0;
    let mut half = CMatrix::zeros(d, d);
    for i in 0..d {
        let lambda = diag[(i, i)];
        let mut theta = lambda.arg();
        if (lambda + ONE).norm() <= tol {
            theta = std::f64::consts::PI;
            hits += 1;
        }
        half[(i, i)] = Complex64::from_polar(1.0, theta / 2.0);
    }
    if hits > 0 {
        warn!("symmetric_unitary_sqrt: {hits} eigenvalue(s) at the branch cut mapped to angle pi");
    }
    let root = &qc * half * qc.transpose();
    Ok(UnitarySqrt {
        root,
        branch_cut_hits: hits,
    })
}

/// Orthonormal basis of the eigenvalue-1 subspace (the range) of an idempotent matrix.
pub fn eigenspace_of_one(p: &CMatrix, tol: f64) -> Result<CMatrix> {
    let d = p.nrows();
    let scale = p.norm().max(1.0);
    let res = (p * p - p).norm();
    if res > tol * scale {
        return Err(Error::NotIdempotent(res));
    }
    let tr = p.trace();
    let rank = tr.re.round();
    if (tr.re - rank).abs() > tol * scale || tr.im.abs() > tol * scale {
        return Err(Error::TraceNotInteger(tr.re));
    }
    let rank = rank as usize;
    if rank == 0 || d == 0 {
        return Ok(CMatrix::zeros(d, 0));
    }
    // the range of P equals the range of P P^dagger, whose nonzero eigenvalues are >= 1
    let pp = p * p.adjoint();
    let eig = eigh(&((&pp + pp.adjoint()) * Complex64::from(0.5)), 1e-12)?;
    let keep: Vec<usize> = (0..d).rev().filter(|&i| eig.values[i] > 0.5).collect();
    if keep.len() != rank {
        return Err(Error::NotIdempotent(
            res.max((keep.len() as f64 - rank as f64).abs()),
        ));
    }
    let mut basis = CMatrix::zeros(d, rank);
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &eig.vectors.column(i));
    }
    let fixed = (p * &basis - &basis).norm();
    if fixed > tol * scale {
        return Err(Error::NotIdempotent(fixed));
    }
    Ok(basis)
}

/// Orthonormal basis of the real null space of a real matrix, from the Gram matrix.
pub fn real_null_space(a: &RMatrix, tol: f64) -> RMatrix {
    let n = a.ncols();
    let gram = a.transpose() * a;
    let (vals, vecs) = eigh_real(&gram);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] <= tol * scale).collect();
    let mut out = RMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &vecs.column(i));
    }
    out
}

/// Orthonormal basis of the column span of a real matrix: Gram-Schmidt with
/// column pivoting, stopping once the largest remaining column falls below
/// `tol` times the largest input column.
pub fn real_column_span(a: &RMatrix, tol: f64) -> RMatrix {
    let mut work = a.clone();
    let scale = (0..a.ncols())
        .map(|j| a.column(j).norm())
        .fold(0.0f64, f64::max);
    let mut out: Vec<nalgebra::DVector<f64>> = Vec::new();
    if scale == 0.0 {
        return RMatrix::zeros(a.nrows(), 0);
    }
    while out.len() < a.nrows().min(a.ncols()) {
        let (j, norm) = (0..work.ncols())
            .map(|j| (j, work.column(j).norm()))
            .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if norm <= tol * scale {
            break;
        }
        let mut v = work.column(j).into_owned() / norm;
        for _ in 0..2 {
            for u in &out {
                let c = u.dot(&v);
                v -= u * c;
            }
            v /= v.norm();
        }
        for k in 0..work.ncols() {
            let c = v.dot(&work.column(k));
            let col = work.column(k) - &v * c;
            work.set_column(k, &col);
        }
        out.push(v);
    }
    let mut m = RMatrix::zeros(a.nrows(), out.len());
    for (c, v) in out.iter().enumerate() {
        m.set_column(c, v);
    }
    m
}

/// Frobenius distance between the orthogonal projectors onto two real subspaces
/// given by orthonormal column bases.
pub fn projector_distance(a: &RMatrix, b: &RMatrix) -> f64 {
    let pa = a * a.transpose();
    let pb = b * b.transpose();
    (pa - pb).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli() -> [CMatrix; 3] {
        [
            CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        ]
    }

    #[test]
    fn eigh_identity_and_sigma_z() {
        let e = eigh(&identity(2), 1e-12).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 1.0]);
        let [_, _, sz] = pauli();
        let e = eigh(&sz, 1e-12).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.vectors[(1, 0)].norm() > 0.999);
        assert!(e.vectors[(0, 1)].norm() > 0.999);
    }

    #[test]
    fn eigh_matches_quadratic_formula() {
        let mut rng = seeded_rng(7);
        for _ in 0..20 {
            let g = complex_gaussian(&mut rng, 2, 2);
            let a = &g + g.adjoint();
            let (p, q, s) = (a[(0, 0)].re, a[(1, 1)].re, a[(0, 1)].norm());
            let mid = 0.5 * (p + q);
            let rad = (0.25 * (p - q) * (p - q) + s * s).sqrt();
            let e = eigh(&a, 1e-12).unwrap();
            assert!((e.values[0] - (mid - rad)).abs() < 1e-12);
            assert!((e.values[1] - (mid + rad)).abs() < 1e-12);
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(eigh(&m, 1e-10), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn simultaneous_diag_trivial_families() {
        let sd = simultaneous_diag(&[identity(3)], 1, 1e-10).unwrap();
        assert!((sd.unitary.adjoint() * &sd.unitary - identity(3)).norm() < 1e-12);
        let [_, _, sz] = pauli();
        let sd = simultaneous_diag(&[sz.clone(), identity(2)], 1, 1e-10).unwrap();
        let d = sd.unitary.adjoint() * &sz * &sd.unitary;
        assert!((d[(0, 1)]).norm() < 1e-12);
        assert_eq!(sd.eigenvalues[0].len(), 2);
        assert!(sd.eigenvalues[0][0] < sd.eigenvalues[0][1]);
    }

    #[test]
    fn simultaneous_diag_sigma_x_family() {
        let [sx, _, _] = pauli();
        let mut rng = seeded_rng(3);
        let (r0, r1): (f64, f64) = (rng.random(), rng.random());
        let combo = identity(2).scale(r0) + sx.scale(r1);
        let sd = simultaneous_diag(&[sx.clone(), combo.clone()], 11, 1e-10).unwrap();
        for a in [&sx, &combo] {
            let d = sd.unitary.adjoint() * a * &sd.unitary;
            assert!(d[(0, 1)].norm() < 1e-10 && d[(1, 0)].norm() < 1e-10);
        }
    }

    #[test]
    fn simultaneous_diag_rejects_non_commuting() {
        let [sx, _, sz] = pauli();
        assert!(matches!(
            simultaneous_diag(&[sx, sz], 1, 1e-10),
            Err(Error::NotCommuting { .. })
        ));
    }

    #[test]
    fn simultaneous_diag_degenerate_family() {
        // A = diag(1,1,2,2), B = diag(5,6,5,6) in a random basis.
        let mut rng = seeded_rng(5);
        let u = random_unitary(&mut rng, 4);
        let a = CMatrix::from_diagonal(&DVector::from_vec(vec![
            c(1., 0.),
            c(1., 0.),
            c(2., 0.),
            c(2., 0.),
        ]));
        let b = CMatrix::from_diagonal(&DVector::from_vec(vec![
            c(5., 0.),
            c(6., 0.),
            c(5., 0.),
            c(6., 0.),
        ]));
        let a = &u * a * u.adjoint();
        let b = &u * b * u.adjoint();
        let sd = simultaneous_diag(&[a.clone(), b.clone()], 9, 1e-9).unwrap();
        for m in [&a, &b] {
            let d = sd.unitary.adjoint() * m * &sd.unitary;
            let off = d.clone() - CMatrix::from_diagonal(&d.diagonal());
            assert!(off.norm() < 1e-10);
        }
        let tuples: Vec<(i64, i64)> = (0..4)
            .map(|i| {
                (
                    sd.eigenvalues[0][i].round() as i64,
                    sd.eigenvalues[1][i].round() as i64,
                )
            })
            .collect();
        assert_eq!(tuples, vec![(1, 5), (1, 6), (2, 5), (2, 6)]);
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let r = symmetric_unitary_sqrt(&identity(3), 1e-12).unwrap();
        assert!((r.root - identity(3)).norm() < 1e-12);
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![I, -I]));
        let r = symmetric_unitary_sqrt(&m, 1e-12).unwrap();
        let q = std::f64::consts::FRAC_PI_4;
        assert!((r.root[(0, 0)] - Complex64::from_polar(1.0, q)).norm() < 1e-12);
        assert!((r.root[(1, 1)] - Complex64::from_polar(1.0, -q)).norm() < 1e-12);
        assert!(r.root[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn sqrt_branch_cut() {
        let m = identity(2).scale(-1.0);
        let r = symmetric_unitary_sqrt(&m, 1e-12).unwrap();
        assert_eq!(r.branch_cut_hits, 2);
        assert!((r.root.clone() - identity(2).scale(1.0) * I).norm() < 1e-12);
    }

    #[test]
    fn sqrt_rejects_non_symmetric() {
        let [_, sy, _] = pauli();
        // i sigma_y is real orthogonal but antisymmetric
        let m = sy.scale(1.0) * I;
        assert!(matches!(
            symmetric_unitary_sqrt(&m, 1e-10),
            Err(Error::NotSymmetricUnitary(_))
        ));
    }

    #[test]
    fn eigenspace_of_one_cases() {
        assert_eq!(
            eigenspace_of_one(&CMatrix::zeros(3, 3), 1e-10)
                .unwrap()
                .ncols(),
            0
        );
        assert_eq!(eigenspace_of_one(&identity(3), 1e-10).unwrap().ncols(), 3);
        let mut rng = seeded_rng(1);
        let v = complex_gaussian(&mut rng, 4, 1);
        let v = &v / Complex64::new(v.norm(), 0.0);
        let p = &v * v.adjoint();
        let b = eigenspace_of_one(&p, 1e-10).unwrap();
        assert_eq!(b.ncols(), 1);
        let overlap = (v.adjoint() * &b)[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        let not_idem = identity(2).scale(0.5);
        assert!(matches!(
            eigenspace_of_one(&not_idem, 1e-10),
            Err(Error::NotIdempotent(_))
        ));
    }

    #[test]
    fn eigenspace_of_oblique_projector() {
        // non-Hermitian idempotent [[1, 1], [0, 0]]
        let p = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        let b = eigenspace_of_one(&p, 1e-10).unwrap();
        assert_eq!(b.ncols(), 1);
        assert!((&p * &b - &b).norm() < 1e-12);
    }
}
