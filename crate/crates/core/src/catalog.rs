//! Built-in magnetic point groups with co-representations and probe actions.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::corep::{CoRep, COREP_TOL};
use crate::error::{Error, Result};
use crate::group::{FactorSystem, MagneticGroup};
use crate::kp::{ActionKind, ProbeRepAction};
use crate::linalg::{identity, max_abs, CMatrix, RMatrix, I, ONE, ZERO};
use crate::reduce::{criterion_character_form, QUANT_TOL};

#[derive(Debug, Clone)]
pub struct NamedRep {
    pub name: String,
    pub corep: CoRep,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub group: Arc<MagneticGroup>,
    pub omega_classes: Vec<(String, FactorSystem)>,
    /// Irreducible co-representations.
    pub reps: Vec<NamedRep>,
    /// Natural candidates that turned out reducible (criterion above 1); useful
    /// inputs for the reduction pipeline.
    pub reducible: Vec<NamedRep>,
    pub probe_actions: Vec<ProbeRepAction>,
}

impl CatalogEntry {
    /// Looks a co-representation up by name among the irreducible and the reducible ones.
    pub fn rep(&self, name: &str) -> Result<&CoRep> {
        self.reps
            .iter()
            .chain(&self.reducible)
            .find(|r| r.name == name)
            .map(|r| &r.corep)
            .ok_or_else(|| Error::UnknownName(format!("{}/{name}", self.name)))
    }

    pub fn action(&self, name: &str) -> Result<&ProbeRepAction> {
        self.probe_actions
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::UnknownName(format!("{}/{name}", self.name)))
    }
}

const NAMES: [&str; 8] = [
    "z2t_spinless",
    "z2t_kramers",
    "z4t",
    "c4_grey",
    "c4v_grey",
    "c4v_mprime",
    "c6v_grey",
    "c4_prime",
];

pub fn catalog_list() -> Vec<&'static str> {
    NAMES.to_vec()
}

pub fn catalog_get(name: &str) -> Result<CatalogEntry> {
    match name {
        "z2t_spinless" => z2t(false),
        "z2t_kramers" => z2t(true),
        "z4t" => z4t(),
        "c4_grey" => point_group(
            name,
            "4 with time reversal (41')",
            &[(rot_z(4), false), (Matrix3::identity(), true)],
            &[
                ("A", Lin::Trivial),
                ("B", Lin::B1),
                ("E", Lin::Plane(1)),
                ("spin_half", Lin::Spin),
            ],
        ),
        "c4v_grey" => point_group(
            name,
            "4mm with time reversal (4mm1')",
            &[
                (rot_z(4), false),
                (mirror_x(), false),
                (Matrix3::identity(), true),
            ],
            &[
                ("A1", Lin::Trivial),
                ("A2", Lin::Det),
                ("B1", Lin::B1),
                ("B2", Lin::B2),
                ("E", Lin::Plane(1)),
                ("spin_half", Lin::Spin),
            ],
        ),
        "c4v_mprime" => point_group(
            name,
            "4m'm': mirrors combined with time reversal",
            &[(rot_z(4), false), (mirror_x(), true)],
            &[
                ("A1", Lin::Trivial),
                ("A2", Lin::Det),
                ("B1", Lin::B1),
                ("B2", Lin::B2),
                ("E", Lin::Plane(1)),
                ("spin_half", Lin::Spin),
            ],
        ),
        "c6v_grey" => point_group(
            name,
            "6mm with time reversal (6mm1')",
            &[
                (rot_z(6), false),
                (mirror_x(), false),
                (Matrix3::identity(), true),
            ],
            &[
                ("A1", Lin::Trivial),
                ("A2", Lin::Det),
                ("B1", Lin::B1),
                ("B2", Lin::B2),
                ("E1", Lin::Plane(1)),
                ("E2", Lin::Plane(2)),
                ("spin_half", Lin::Spin),
            ],
        ),
        "c4_prime" => point_group(
            name,
            "4': fourfold rotations combined with time reversal, non-split",
            &[(rot_z(4), true)],
            &[
                ("A", Lin::Trivial),
                ("B", Lin::B1),
                ("E", Lin::Plane(1)),
                ("spin_half", Lin::Spin),
            ],
        ),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

pub fn catalog_all() -> Result<Vec<CatalogEntry>> {
    NAMES.iter().map(|n| catalog_get(n)).collect()
}

fn scalar(v: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, v)
}

fn i_sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO])
}

fn rmat(q: usize, v: f64) -> RMatrix {
    RMatrix::identity(q, q) * v
}

/// Vector and scalar actions of an abstract group, even or odd under the anti-unitary coset.
fn abstract_actions(g: &MagneticGroup) -> Result<Vec<ProbeRepAction>> {
    let mut out = Vec::new();
    let specs: [(&str, usize, f64, ActionKind); 4] = [
        ("momentum", 3, -1.0, ActionKind::Momentum),
        ("vec_even", 3, 1.0, ActionKind::Custom),
        ("electric", 1, 1.0, ActionKind::Electric),
        ("magnetic", 1, -1.0, ActionKind::Magnetic),
    ];
    for (name, q, t_sign, kind) in specs {
        let mats = (0..g.order())
            .map(|e| {
                // unitary elements are powers of T0 squared, so they act trivially
                rmat(q, if g.is_antiunitary(e) { t_sign } else { 1.0 })
            })
            .collect();
        out.push(ProbeRepAction::new(g, mats, kind, name)?);
    }
    Ok(out)
}

fn z2t(kramers: bool) -> Result<CatalogEntry> {
    let g = Arc::new(MagneticGroup::with_details(
        vec![vec![0, 1], vec![1, 0]],
        vec![false, true],
        Some(vec!["E".into(), "T".into()]),
        None,
    )?);
    let plus = FactorSystem::trivial(2);
    let minus = FactorSystem::from_fn(2, |a, b| if a == 1 && b == 1 { -ONE } else { ONE });
    let reps = if kramers {
        vec![NamedRep {
            name: "kramers".into(),
            corep: CoRep::new(g.clone(), minus.clone(), vec![identity(2), i_sigma_y()])?,
        }]
    } else {
        vec![NamedRep {
            name: "scalar".into(),
            corep: CoRep::new(g.clone(), plus.clone(), vec![identity(1), identity(1)])?,
        }]
    };
    let probe_actions = abstract_actions(&g)?;
    finish(CatalogEntry {
        name: if kramers {
            "z2t_kramers"
        } else {
            "z2t_spinless"
        }
        .into(),
        description: if kramers {
            "Z2 generated by time reversal with T^2 = -1".into()
        } else {
            "Z2 generated by time reversal with T^2 = +1".into()
        },
        group: g,
        omega_classes: vec![("linear".into(), plus), ("kramers".into(), minus)],
        reps,
        reducible: Vec::new(),
        probe_actions,
    })
}

fn z4t() -> Result<CatalogEntry> {
    let g = Arc::new(MagneticGroup::with_details(
        vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 1, 0],
            vec![3, 2, 0, 1],
        ],
        vec![false, false, true, true],
        Some(vec!["E".into(), "s".into(), "T0".into(), "T0s".into()]),
        None,
    )?);
    let w = FactorSystem::trivial(4);
    let trivial = CoRep::new(g.clone(), w.clone(), vec![identity(1); 4])?;
    let isy = i_sigma_y();
    let quat = CoRep::new(
        g.clone(),
        w.clone(),
        vec![identity(2), -identity(2), isy.clone(), -isy],
    )?;
    finish(CatalogEntry {
        name: "z4t".into(),
        description: "Z4 generated by an anti-unitary T0 with T0^2 = s (type II)".into(),
        probe_actions: abstract_actions(&g)?,
        group: g,
        omega_classes: vec![("linear".into(), w)],
        reps: vec![
            NamedRep {
                name: "trivial".into(),
                corep: trivial,
            },
            NamedRep {
                name: "quaternionic".into(),
                corep: quat,
            },
        ],
        reducible: Vec::new(),
    })
}

fn finish(mut entry: CatalogEntry) -> Result<CatalogEntry> {
    for r in &entry.reps {
        r.corep
            .ensure_valid(COREP_TOL)
            .map_err(|e| Error::InvalidCoRep(format!("catalog {}/{}: {e}", entry.name, r.name)))?;
    }
    let (irr, red): (Vec<_>, Vec<_>) = entry
        .reps
        .into_iter()
        .partition(|r| (criterion_character_form(&r.corep).re - 1.0).abs() < QUANT_TOL);
    entry.reps = irr;
    entry.reducible.extend(red);
    Ok(entry)
}

// ---------------------------------------------------------------------------
// point groups

fn rot_z(n: u32) -> Matrix3<f64> {
    let a = 2.0 * PI / f64::from(n);
    Matrix3::new(a.cos(), -a.sin(), 0.0, a.sin(), a.cos(), 0.0, 0.0, 0.0, 1.0)
}

fn mirror_x() -> Matrix3<f64> {
    Matrix3::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
}

fn same(a: &Matrix3<f64>, b: &Matrix3<f64>) -> bool {
    (a - b).amax() < 1e-9
}

/// Closes the generators under multiplication; element 0 is the identity and
/// the rest follow in breadth-first order.
fn close(gens: &[(Matrix3<f64>, bool)]) -> Vec<(Matrix3<f64>, bool)> {
    let mut elems = vec![(Matrix3::identity(), false)];
    let mut k = 0;
    while k < elems.len() {
        let (a, ta) = elems[k];
        for &(g, tg) in gens {
            let p = (clean(a * g), ta ^ tg);
            if !elems.iter().any(|e| e.1 == p.1 && same(&e.0, &p.0)) {
                elems.push(p);
            }
        }
        k += 1;
    }
    elems
}

fn clean(m: Matrix3<f64>) -> Matrix3<f64> {
    m.map(|v| if v.abs() < 1e-12 { 0.0 } else { v })
}

fn axis_name(n: &nalgebra::Vector3<f64>) -> String {
    let close_to = |v: f64, t: f64| (v - t).abs() < 1e-6;
    if close_to(n.x.abs(), 1.0) {
        "x".into()
    } else if close_to(n.y.abs(), 1.0) {
        "y".into()
    } else if close_to(n.z.abs(), 1.0) {
        "z".into()
    } else if close_to(n.z, 0.0) {
        let deg = n.y.atan2(n.x).to_degrees().rem_euclid(180.0);
        format!("_{}", deg.round() as i64)
    } else {
        format!("[{:.2},{:.2},{:.2}]", n.x, n.y, n.z)
    }
}

/// Canonical axis direction: first nonzero component positive.
fn canonical(n: nalgebra::Vector3<f64>) -> nalgebra::Vector3<f64> {
    let first = n.iter().copied().find(|v| v.abs() > 1e-6).unwrap_or(1.0);
    if first < 0.0 {
        -n
    } else {
        n
    }
}

/// Angle in [0, pi] and canonical unit axis of a proper rotation; the sign tells
/// whether the rotation is positive about the canonical axis.
fn axis_angle(r: &Matrix3<f64>) -> (f64, nalgebra::Vector3<f64>, bool) {
    let c = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = c.acos();
    if theta < 1e-9 {
        return (0.0, nalgebra::Vector3::z(), true);
    }
    if (PI - theta).abs() < 1e-6 {
        let s = r + Matrix3::identity();
        let col = (0..3)
            .max_by(|&a, &b| s.column(a).norm().total_cmp(&s.column(b).norm()))
            .unwrap_or(0);
        let n = canonical(s.column(col).normalize());
        return (PI, n, true);
    }
    let v = nalgebra::Vector3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    ) / (2.0 * theta.sin());
    let n = canonical(v);
    (theta, n, n.dot(&v) > 0.0)
}

fn element_label(r: &Matrix3<f64>, anti: bool) -> String {
    let proper = r.determinant() > 0.0;
    let p = if proper { *r } else { -r };
    let (theta, n, positive) = axis_angle(&p);
    let order = if theta < 1e-9 {
        1
    } else {
        (2.0 * PI / theta).round() as u32
    };
    let sign = if order > 2 {
        if positive {
            "+"
        } else {
            "-"
        }
    } else {
        ""
    };
    let base = match (proper, order) {
        (true, 1) => "E".to_string(),
        (true, _) => format!("C{order}{}{sign}", axis_name(&n)),
        (false, 1) => "I".to_string(),
        (false, 2) => format!("m{}", axis_name(&n)),
        (false, _) => format!("IC{order}{}{sign}", axis_name(&n)),
    };
    match (anti, base.as_str()) {
        (true, "E") => "T".into(),
        (true, _) => format!("{base}'"),
        _ => base,
    }
}

/// SU(2) lift of a rotation; improper elements use the proper part `-R`.
fn spin_matrix(r: &Matrix3<f64>) -> CMatrix {
    let p = if r.determinant() > 0.0 { *r } else { -r };
    let (theta, n, positive) = axis_angle(&p);
    let th = if positive { theta } else { -theta };
    let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
    // exp(-i th/2 n.sigma)
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, -s * n.z),
            Complex64::new(-s * n.y, -s * n.x),
            Complex64::new(s * n.y, -s * n.x),
            Complex64::new(c, s * n.z),
        ],
    )
}

#[derive(Debug, Clone, Copy)]
enum Lin {
    Trivial,
    Det,
    B1,
    B2,
    /// Action of the rotation part on the xy plane, with angles multiplied by k.
    Plane(u32),
    Spin,
}

fn plane_block(r: &Matrix3<f64>) -> (bool, f64) {
    // (is rotation, angle): rotation by phi, or reflection across the line at alpha
    // returned as (false, 2 alpha)
    let det = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)];
    (det > 0.0, r[(1, 0)].atan2(r[(0, 0)]))
}

fn lin_matrix(kind: Lin, r: &Matrix3<f64>, n_fold: u32) -> CMatrix {
    let (rot, ang) = plane_block(r);
    let nf = f64::from(n_fold);
    let v = |x: f64| scalar(Complex64::from(x.round()));
    match kind {
        Lin::Trivial => scalar(ONE),
        Lin::Det => v(if rot { 1.0 } else { -1.0 }),
        Lin::B1 => v((nf * ang / 2.0).cos()),
        Lin::B2 => v(if rot {
            (nf * ang / 2.0).cos()
        } else {
            -(nf * ang / 2.0).cos()
        }),
        Lin::Plane(k) => {
            let a = f64::from(k) * ang;
            let (c, s) = (a.cos(), a.sin());
            let m = if rot { [c, -s, s, c] } else { [c, s, s, -c] };
            CMatrix::from_row_slice(2, 2, &m.map(Complex64::from))
        }
        Lin::Spin => spin_matrix(r),
    }
}

/// `omega(g1, g2)` from `M(g1) conj^s(M(g2)) = omega M(g1 g2)`; the matrices must
/// form a projective co-representation with scalar factors.
fn derived_omega(g: &MagneticGroup, mats: &[CMatrix]) -> Result<FactorSystem> {
    let n = g.order();
    let mut table = vec![vec![ONE; n]; n];
    for a in 0..n {
        for b in 0..n {
            let rhs = &mats[g.mul(a, b)];
            let lhs = if g.is_antiunitary(a) {
                &mats[a] * mats[b].conjugate()
            } else {
                &mats[a] * &mats[b]
            };
            let x = lhs * rhs.adjoint();
            let w = x[(0, 0)];
            if max_abs(&(x - identity(rhs.nrows()) * w)) > 1e-9 || (w.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidCoRep(format!(
                    "matrices are not projective at ({a},{b})"
                )));
            }
            // snap to the nearest fourth root of unity when it is one
            let snapped = [ONE, I, -ONE, -I]
                .into_iter()
                .find(|z| (z - w).norm() < 1e-9)
                .unwrap_or(w);
            table[a][b] = snapped;
        }
    }
    FactorSystem::from_table(table)
}

fn point_group(
    name: &str,
    description: &str,
    gens: &[(Matrix3<f64>, bool)],
    reps: &[(&str, Lin)],
) -> Result<CatalogEntry> {
    let elems = close(gens);
    let n = elems.len();
    let index = |m: &Matrix3<f64>, t: bool| {
        elems
            .iter()
            .position(|e| e.1 == t && same(&e.0, m))
            .expect("closed set")
    };
    let cayley: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| index(&clean(elems[a].0 * elems[b].0), elems[a].1 ^ elems[b].1))
                .collect()
        })
        .collect();
    let flags: Vec<bool> = elems.iter().map(|e| e.1).collect();
    let labels: Vec<String> = elems.iter().map(|(r, t)| element_label(r, *t)).collect();
    let n_fold = gens
        .iter()
        .map(|(r, _)| {
            let (theta, _, _) = axis_angle(&if r.determinant() > 0.0 { *r } else { -r });
            if theta < 1e-9 {
                1
            } else {
                (2.0 * PI / theta).round() as u32
            }
        })
        .max()
        .unwrap_or(1);

    // chain: {E} < rotations about z by pi < all unitary rotations about z
    let unitary_rot: Vec<usize> = (0..n)
        .filter(|&e| !elems[e].1 && elems[e].0.determinant() > 0.0)
        .collect();
    let c2: Vec<usize> = unitary_rot
        .iter()
        .copied()
        .filter(|&e| same(&elems[e].0, &Matrix3::identity()) || same(&elems[e].0, &rot_z(2)))
        .collect();
    let mut chain = vec![vec![0]];
    if c2.len() == 2 {
        chain.push(c2.clone());
    }
    if unitary_rot.len() > c2.len() {
        chain.push(unitary_rot.clone());
    }
    let group = Arc::new(MagneticGroup::with_details(
        cayley,
        flags,
        Some(labels),
        Some(chain),
    )?);

    let trivial = FactorSystem::trivial(n);
    let mut omega_classes = vec![("linear".to_string(), trivial.clone())];
    let mut named = Vec::new();
    for &(rname, kind) in reps {
        let mut mats: Vec<CMatrix> = elems
            .iter()
            .map(|(r, _)| lin_matrix(kind, r, n_fold))
            .collect();
        let omega = if let Lin::Spin = kind {
            for (m, (_, t)) in mats.iter_mut().zip(&elems) {
                if *t {
                    *m = &*m * i_sigma_y();
                }
            }
            let w = derived_omega(&group, &mats)?;
            if !omega_classes.iter().any(|(n, _)| n == "spinor") {
                omega_classes.push(("spinor".into(), w.clone()));
            }
            w
        } else {
            trivial.clone()
        };
        named.push(NamedRep {
            name: rname.to_string(),
            corep: CoRep::new(group.clone(), omega, mats)?,
        });
    }

    let actions = [
        ("momentum", ActionKind::Momentum),
        ("electric", ActionKind::Electric),
        ("magnetic", ActionKind::Magnetic),
    ]
    .iter()
    .map(|&(an, kind)| {
        let mats = elems
            .iter()
            .map(|(r, t)| {
                let s = match kind {
                    ActionKind::Momentum => {
                        if *t {
                            -1.0
                        } else {
                            1.0
                        }
                    }
                    ActionKind::Magnetic => r.determinant().signum() * if *t { -1.0 } else { 1.0 },
                    _ => 1.0,
                };
                RMatrix::from_fn(3, 3, |i, j| s * r[(i, j)])
            })
            .collect();
        ProbeRepAction::new(&group, mats, kind, an)
    })
    .collect::<Result<Vec<_>>>()?;

    finish(CatalogEntry {
        name: name.to_string(),
        description: description.to_string(),
        group,
        omega_classes,
        reps: named,
        reducible: Vec::new(),
        probe_actions: actions,
    })
}
