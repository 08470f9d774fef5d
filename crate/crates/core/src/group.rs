//! Finite anti-unitary groups given by Cayley table, and their U(1) factor systems.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default absolute tolerance for cocycle checks.
pub const COCYCLE_TOL: f64 = 1e-10;

/// A group element: its index in the Cayley table and a display label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub id: usize,
    pub label: String,
}

/// A validated finite group G = H + T0 H with anti-unitary flags.
///
/// Everything that the algorithms need repeatedly (identity, inverses, element
/// orders, the halving subgroup and its conjugacy classes) is computed once in
/// the constructor. The value is immutable afterwards.
#[derive(Debug, Clone)]
pub struct MagneticGroup {
    order: usize,
    labels: Vec<String>,
    cayley: Vec<usize>,
    antiunitary: Vec<bool>,
    identity: usize,
    inverse: Vec<usize>,
    element_order: Vec<usize>,
    t0: Option<usize>,
    unitary: Vec<usize>,
    subgroup_chain: Vec<Vec<usize>>,
    classes: Vec<Vec<usize>>,
    chain_classes: Vec<Vec<Vec<usize>>>,
}

impl MagneticGroup {
    /// Validates a Cayley table with anti-unitary flags. Labels default to
    /// `g0, g1, ...` and the subgroup chain defaults to `{E}`.
    pub fn new(cayley: Vec<Vec<usize>>, antiunitary: Vec<bool>) -> Result<Self> {
        Self::with_details(cayley, antiunitary, None, None)
    }

    pub fn with_details(
        cayley: Vec<Vec<usize>>,
        antiunitary: Vec<bool>,
        labels: Option<Vec<String>>,
        subgroup_chain: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let n = cayley.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty Cayley table".into()));
        }
        if antiunitary.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} flags for a group of order {n}",
                antiunitary.len()
            )));
        }
        let mut table = Vec::with_capacity(n * n);
        for (a, row) in cayley.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAGroup(format!(
                    "row {a} has {} entries",
                    row.len()
                )));
            }
            for &ab in row {
                if ab >= n {
                    return Err(Error::NotAGroup(format!(
                        "entry {ab} out of range in row {a}"
                    )));
                }
                table.push(ab);
            }
        }
        let mul = |a: usize, b: usize| table[a * n + b];

        // Latin square: every row and column is a permutation.
        for a in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for b in 0..n {
                if std::mem::replace(&mut row_seen[mul(a, b)], true) {
                    return Err(Error::NotAGroup(format!("row {a} repeats an element")));
                }
                if std::mem::replace(&mut col_seen[mul(b, a)], true) {
                    return Err(Error::NotAGroup(format!("column {a} repeats an element")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|b| mul(e, b) == b && mul(b, e) == b))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails for ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
                    .ok_or_else(|| Error::NotAGroup(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;

        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                if antiunitary[a] ^ antiunitary[b] != antiunitary[ab] {
                    return Err(Error::FlagInconsistent { a, b, ab });
                }
            }
        }

        let element_order: Vec<usize> = (0..n)
            .map(|g| {
                let mut k = 1;
                let mut x = g;
                while x != identity {
                    x = mul(x, g);
                    k += 1;
                }
                k
            })
            .collect();

        let unitary: Vec<usize> = (0..n).filter(|&g| !antiunitary[g]).collect();
        let t0 = if unitary.len() == n {
            None
        } else {
            if 2 * unitary.len() != n {
                return Err(Error::NoHalvingSubgroup {
                    unitary: unitary.len(),
                    order: n,
                });
            }
            // minimal order first, lowest id on ties
            (0..n)
                .filter(|&g| antiunitary[g])
                .min_by_key(|&g| (element_order[g], g))
        };

        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(l) => {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for a group of order {n}",
                    l.len()
                )))
            }
            None => (0..n).map(|i| format!("g{i}")).collect(),
        };

        let chain = subgroup_chain.unwrap_or_else(|| vec![vec![identity]]);
        let mut previous: Option<&Vec<usize>> = None;
        for (index, sub) in chain.iter().enumerate() {
            let reason = |r: &str| Error::InvalidSubgroupChain {
                index,
                reason: r.to_string(),
            };
            if sub.is_empty() {
                return Err(reason("empty subgroup"));
            }
            if sub.iter().any(|&g| g >= n || antiunitary[g]) {
                return Err(reason("element outside the unitary subgroup"));
            }
            if !sub
                .iter()
                .all(|&a| sub.iter().all(|&b| sub.contains(&mul(a, b))))
            {
                return Err(reason("not closed under multiplication"));
            }
            if let Some(prev) = previous {
                if !prev.iter().all(|g| sub.contains(g)) {
                    return Err(reason("does not contain the previous subgroup"));
                }
            }
            previous = Some(sub);
        }

        let classes_in = |sub: &[usize]| -> Vec<Vec<usize>> {
            let mut seen = vec![false; n];
            let mut out = Vec::new();
            for &h in sub {
                if seen[h] {
                    continue;
                }
                let mut class: Vec<usize> =
                    sub.iter().map(|&a| mul(mul(a, h), inverse[a])).collect();
                class.sort_unstable();
                class.dedup();
                for &c in &class {
                    seen[c] = true;
                }
                out.push(class);
            }
            out
        };
        let classes = classes_in(&unitary);
        let chain_classes = chain.iter().map(|s| classes_in(s)).collect();

        Ok(Self {
            order: n,
            labels,
            cayley: table,
            antiunitary,
            identity,
            inverse,
            element_order,
            t0,
            unitary,
            subgroup_chain: chain,
            classes,
            chain_classes,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a * self.order + b]
    }

    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.cayley.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn element_order(&self, g: usize) -> usize {
        self.element_order[g]
    }

    #[inline]
    pub fn is_antiunitary(&self, g: usize) -> bool {
        self.antiunitary[g]
    }

    pub fn antiunitary_flags(&self) -> &[bool] {
        &self.antiunitary
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element(&self, g: usize) -> GroupElement {
        GroupElement {
            id: g,
            label: self.labels[g].clone(),
        }
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn t0(&self) -> Option<usize> {
        self.t0
    }

    pub fn require_t0(&self) -> Result<usize> {
        self.t0.ok_or(Error::NoT0)
    }

    /// `T0^2`, the element called sigma; identity for type-I groups.
    pub fn sigma(&self) -> Option<usize> {
        self.t0.map(|t| self.mul(t, t))
    }

    pub fn is_antiunitary_group(&self) -> bool {
        self.t0.is_some()
    }

    /// True when `T0^2 != E`, i.e. G does not split as H x| Z2^T.
    pub fn is_type_two(&self) -> bool {
        self.sigma().is_some_and(|s| s != self.identity)
    }

    /// Ids of the unitary (halving) subgroup H, ascending.
    pub fn unitary_elements(&self) -> &[usize] {
        &self.unitary
    }

    pub fn antiunitary_elements(&self) -> Vec<usize> {
        (0..self.order).filter(|&g| self.antiunitary[g]).collect()
    }

    /// Conjugacy classes of H (conjugation by elements of H).
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn subgroup_chain(&self) -> &[Vec<usize>] {
        &self.subgroup_chain
    }

    pub fn chain_classes(&self, index: usize) -> &[Vec<usize>] {
        &self.chain_classes[index]
    }

    /// `T0^-1 h T0` for unitary `h`.
    pub fn conjugate_by_t0(&self, h: usize) -> Result<usize> {
        let t0 = self.require_t0()?;
        if self.antiunitary[h] {
            return Err(Error::NotUnitaryElement(h));
        }
        Ok(self.mul(self.mul(self.inverse[t0], h), t0))
    }

    /// Splits an anti-unitary element `u` as `h * T0` and returns `h`.
    pub fn coset_representative(&self, u: usize) -> Result<usize> {
        let t0 = self.require_t0()?;
        Ok(self.mul(u, self.inverse[t0]))
    }

    /// Extracts the subgroup on `elements` (which must be closed) as a group
    /// of its own. Returns the new group and the embedding `sub id -> parent id`.
    /// The identity becomes id 0; the rest keep their relative order.
    pub fn subgroup(&self, elements: &[usize]) -> Result<(MagneticGroup, Vec<usize>)> {
        let mut embedding: Vec<usize> = elements.to_vec();
        embedding.sort_unstable();
        embedding.dedup();
        if embedding.iter().any(|&g| g >= self.order) {
            return Err(Error::NotASubgroupEmbedding("element out of range".into()));
        }
        if let Some(pos) = embedding.iter().position(|&g| g == self.identity) {
            embedding.remove(pos);
            embedding.insert(0, self.identity);
        } else {
            return Err(Error::NotASubgroupEmbedding("identity missing".into()));
        }
        let m = embedding.len();
        let mut local = vec![usize::MAX; self.order];
        for (i, &g) in embedding.iter().enumerate() {
            local[g] = i;
        }
        let mut cayley = vec![vec![0; m]; m];
        for i in 0..m {
            for j in 0..m {
                let ab = local[self.mul(embedding[i], embedding[j])];
                if ab == usize::MAX {
                    return Err(Error::NotASubgroupEmbedding("subset is not closed".into()));
                }
                cayley[i][j] = ab;
            }
        }
        let flags = embedding.iter().map(|&g| self.antiunitary[g]).collect();
        let labels = embedding.iter().map(|&g| self.labels[g].clone()).collect();
        let group = MagneticGroup::with_details(cayley, flags, Some(labels), None)?;
        Ok((group, embedding))
    }

    /// Checks that `embedding` (sub id -> parent id) is an injective
    /// homomorphism that preserves anti-unitary flags.
    pub fn check_embedding(&self, sub: &MagneticGroup, embedding: &[usize]) -> Result<()> {
        if embedding.len() != sub.order() {
            return Err(Error::NotASubgroupEmbedding(format!(
                "embedding has {} entries for a subgroup of order {}",
                embedding.len(),
                sub.order()
            )));
        }
        let mut seen = vec![false; self.order];
        for (i, &g) in embedding.iter().enumerate() {
            if g >= self.order || std::mem::replace(&mut seen[g], true) {
                return Err(Error::NotASubgroupEmbedding(format!(
                    "entry {i} invalid or repeated"
                )));
            }
            if sub.is_antiunitary(i) != self.antiunitary[g] {
                return Err(Error::NotASubgroupEmbedding(format!(
                    "flag mismatch at {i}"
                )));
            }
        }
        for a in 0..sub.order() {
            for b in 0..sub.order() {
                if embedding[sub.mul(a, b)] != self.mul(embedding[a], embedding[b]) {
                    return Err(Error::NotASubgroupEmbedding(format!(
                        "product of {a} and {b} not preserved"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A U(1)-valued 2-cocycle table `omega[g1][g2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSystem {
    n: usize,
    omega: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleReport {
    pub max_violation: f64,
    pub max_modulus_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl FactorSystem {
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            omega: vec![Complex64::new(1.0, 0.0); n * n],
        }
    }

    pub fn from_table(table: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = table.len();
        let mut omega = Vec::with_capacity(n * n);
        for row in table {
            if row.len() != n {
                return Err(Error::DimensionMismatch("omega table is not square".into()));
            }
            omega.extend(row);
        }
        Ok(Self { n, omega })
    }

    /// Builds a factor system from a closure on pairs of ids.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let omega = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, omega }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.omega[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.omega.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Evaluates the twisted cocycle equation on all n^3 triples.
    pub fn validate(&self, group: &MagneticGroup, tol: f64) -> Result<CocycleReport> {
        let n = group.order();
        if self.n != n {
            return Err(Error::DimensionMismatch(format!(
                "omega is {0}x{0} for a group of order {n}",
                self.n
            )));
        }
        let max_modulus_error = self
            .omega
            .iter()
            .map(|w| (w.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        let mut max_violation: f64 = 0.0;
        for g1 in 0..n {
            let twist = group.is_antiunitary(g1);
            for g2 in 0..n {
                let g12 = group.mul(g1, g2);
                let w12 = self.get(g1, g2);
                for g3 in 0..n {
                    let w23 = self.get(g2, g3);
                    let w23 = if twist { w23.conj() } else { w23 };
                    let lhs = w23 * self.get(g1, group.mul(g2, g3)) / (self.get(g12, g3) * w12);
                    max_violation = max_violation.max((lhs - 1.0).norm());
                }
            }
        }
        Ok(CocycleReport {
            max_violation,
            max_modulus_error,
            tolerance: tol,
            pass: max_violation <= tol && max_modulus_error <= tol,
        })
    }

    /// `omega'(g1,g2) = omega(g1,g2) W(g1) W^{s(g1)}(g2) / W(g1 g2)` for phases `W`.
    pub fn gauge_transform(&self, group: &MagneticGroup, phases: &[Complex64]) -> Self {
        Self::from_fn(self.n, |a, b| {
            let wb = if group.is_antiunitary(a) {
                phases[b].conj()
            } else {
                phases[b]
            };
            self.get(a, b) * phases[a] * wb / phases[group.mul(a, b)]
        })
    }

    /// Pulls the factor system back along a subgroup embedding.
    pub fn restrict(&self, embedding: &[usize]) -> Self {
        Self::from_fn(embedding.len(), |a, b| self.get(embedding[a], embedding[b]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2t() -> MagneticGroup {
        MagneticGroup::new(vec![vec![0, 1], vec![1, 0]], vec![false, true]).unwrap()
    }

    fn z4t() -> MagneticGroup {
        // E, sigma, T0, T0 sigma with T0^2 = sigma
        let c = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 1, 0],
            vec![3, 2, 0, 1],
        ];
        MagneticGroup::new(c, vec![false, false, true, true]).unwrap()
    }

    #[test]
    fn trivial_group() {
        let g = MagneticGroup::new(vec![vec![0]], vec![false]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.t0(), None);
        assert!(!g.is_antiunitary_group());
    }

    #[test]
    fn z2t_is_type_one() {
        let g = z2t();
        assert_eq!(g.t0(), Some(1));
        assert_eq!(g.unitary_elements(), &[0]);
        assert_eq!(g.sigma(), Some(0));
        assert!(!g.is_type_two());
    }

    #[test]
    fn z4t_picks_order_four_t0() {
        let g = z4t();
        let brute: Vec<usize> = (0..4)
            .map(|x| {
                let mut y = x;
                let mut k = 1;
                while y != 0 {
                    y = g.cayley_rows()[y][x];
                    k += 1;
                }
                k
            })
            .collect();
        assert_eq!(brute, vec![1, 2, 4, 4]);
        assert_eq!(g.t0(), Some(2));
        assert_eq!(g.element_order(2), 4);
        assert!(g.is_type_two());
        assert_eq!(g.sigma(), Some(1));
    }

    #[test]
    fn rejects_bad_tables() {
        let bad = MagneticGroup::new(vec![vec![0, 1], vec![1, 1]], vec![false, false]);
        assert!(matches!(bad, Err(Error::NotAGroup(_))));
        let out_of_range = MagneticGroup::new(vec![vec![0, 2], vec![1, 0]], vec![false, false]);
        assert!(matches!(out_of_range, Err(Error::NotAGroup(_))));
        let flags = MagneticGroup::new(vec![vec![0, 1], vec![1, 0]], vec![true, true]);
        assert!(matches!(flags, Err(Error::FlagInconsistent { .. })));
    }

    #[test]
    fn rejects_non_halving_flags() {
        // Z2 x Z2 with a flag assignment that is a homomorphism but leaves
        // only the identity unitary is impossible; instead give a consistent
        // homomorphism with |H| = n/2 and check a broken one.
        let c = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ];
        assert!(MagneticGroup::new(c.clone(), vec![false, true, false, true]).is_ok());
        assert!(matches!(
            MagneticGroup::new(c, vec![false, true, true, true]),
            Err(Error::FlagInconsistent { .. })
        ));
    }

    #[test]
    fn conjugation_on_abelian_group_is_trivial() {
        let g = z4t();
        for &h in g.unitary_elements() {
            assert_eq!(g.conjugate_by_t0(h).unwrap(), h);
        }
        assert!(matches!(
            g.conjugate_by_t0(2),
            Err(Error::NotUnitaryElement(2))
        ));
        let trivial = MagneticGroup::new(vec![vec![0]], vec![false]).unwrap();
        assert!(matches!(trivial.conjugate_by_t0(0), Err(Error::NoT0)));
    }

    #[test]
    fn cocycle_fixtures() {
        let g = z2t();
        let trivial = FactorSystem::trivial(2).validate(&g, COCYCLE_TOL).unwrap();
        assert_eq!(trivial.max_violation, 0.0);
        assert!(trivial.pass);

        let one = Complex64::new(1.0, 0.0);
        let kramers = FactorSystem::from_table(vec![vec![one, one], vec![one, -one]]).unwrap();
        assert!(kramers.validate(&g, COCYCLE_TOL).unwrap().pass);

        // omega(T,T) = i: the triple (T,T,T) gives conj(i) * 1 * 1 / i = -1.
        let i = Complex64::new(0.0, 1.0);
        let bad = FactorSystem::from_table(vec![vec![one, one], vec![one, i]]).unwrap();
        let report = bad.validate(&g, COCYCLE_TOL).unwrap();
        assert!(!report.pass);
        assert!((report.max_violation - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cocycle_dimension_mismatch() {
        let g = z2t();
        assert!(matches!(
            FactorSystem::trivial(3).validate(&g, COCYCLE_TOL),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn subgroup_extraction() {
        let g = z4t();
        let (h, emb) = g.subgroup(g.unitary_elements()).unwrap();
        assert_eq!(h.order(), 2);
        assert_eq!(emb, vec![0, 1]);
        assert!(!h.is_antiunitary_group());
        g.check_embedding(&h, &emb).unwrap();
        assert!(g.subgroup(&[0, 2]).is_err());
    }

    #[test]
    fn subgroup_chain_validation() {
        let c = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 1, 0],
            vec![3, 2, 0, 1],
        ];
        let flags = vec![false, false, true, true];
        let ok = MagneticGroup::with_details(
            c.clone(),
            flags.clone(),
            None,
            Some(vec![vec![0], vec![0, 1]]),
        );
        assert!(ok.is_ok());
        let bad = MagneticGroup::with_details(c, flags, None, Some(vec![vec![0, 2]]));
        assert!(matches!(bad, Err(Error::InvalidSubgroupChain { .. })));
    }
}
