//! JSON formats for groups, co-representations, probe actions and reports.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested arrays.
//! Matrices of co-representations and actions are keyed by element label.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::corep::CoRep;
use crate::error::{Error, Result};
use crate::group::{FactorSystem, MagneticGroup};
use crate::kp::{ActionKind, KpModel, ProbeRepAction};
use crate::linalg::{CMatrix, RMatrix};
use crate::reduce::{
    criterion_character_form, torsion_report, DecompositionResiduals, IrrepBlock,
    IrrepDecomposition,
};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

pub fn cmatrix_to_rows(m: &CMatrix) -> ComplexRows {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn rows_to_cmatrix(rows: &ComplexRows) -> Result<CMatrix> {
    let n = rows.len();
    let c = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(CMatrix::from_fn(n, c, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn rmatrix_to_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub fn rows_to_rmatrix(rows: &[Vec<f64>]) -> Result<RMatrix> {
    let n = rows.len();
    let c = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(RMatrix::from_fn(n, c, |i, j| rows[i][j]))
}

pub fn ser_cmatrix<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    cmatrix_to_rows(m).serialize(s)
}

pub fn ser_matrix_grid<S: Serializer>(
    grid: &[Vec<CMatrix>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(grid.len()))?;
    for row in grid {
        let rows: Vec<ComplexRows> = row.iter().map(cmatrix_to_rows).collect();
        seq.serialize_element(&rows)?;
    }
    seq.end()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Flag {
    Int(u8),
    Bool(bool),
}

impl Flag {
    fn get(&self) -> Result<bool> {
        match *self {
            Flag::Int(0) | Flag::Bool(false) => Ok(false),
            Flag::Int(1) | Flag::Bool(true) => Ok(true),
            Flag::Int(v) => Err(Error::Parse(format!(
                "anti-unitary flag must be 0 or 1, got {v}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub cayley: Vec<Vec<usize>>,
    antiunitary: Vec<Flag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_chain: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<ComplexRows>,
}

impl GroupFile {
    pub fn from_group(g: &MagneticGroup, omega: &FactorSystem) -> Self {
        Self {
            order: g.order(),
            labels: Some(g.labels().to_vec()),
            cayley: g.cayley_rows(),
            antiunitary: g
                .antiunitary_flags()
                .iter()
                .map(|&b| Flag::Int(u8::from(b)))
                .collect(),
            subgroup_chain: Some(g.subgroup_chain().to_vec()),
            omega: Some(
                omega
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                    .collect(),
            ),
        }
    }

    /// Builds and validates the group; a missing `omega` means the trivial factor system.
    pub fn build(&self) -> Result<(Arc<MagneticGroup>, FactorSystem)> {
        if self.cayley.len() != self.order {
            return Err(Error::Parse(format!(
                "order {} but {} Cayley rows",
                self.order,
                self.cayley.len()
            )));
        }
        if self.antiunitary.len() != self.order {
            return Err(Error::Parse(
                "one anti-unitary flag per element required".into(),
            ));
        }
        let flags = self
            .antiunitary
            .iter()
            .map(Flag::get)
            .collect::<Result<Vec<_>>>()?;
        let g = MagneticGroup::with_details(
            self.cayley.clone(),
            flags,
            self.labels.clone(),
            self.subgroup_chain.clone(),
        )?;
        let omega = match &self.omega {
            None => FactorSystem::trivial(g.order()),
            Some(rows) => FactorSystem::from_table(
                rows.iter()
                    .map(|r| r.iter().map(|p| Complex64::new(p[0], p[1])).collect())
                    .collect(),
            )?,
        };
        if omega.size() != g.order() {
            return Err(Error::DimensionMismatch(
                "factor system size differs from group order".into(),
            ));
        }
        Ok((Arc::new(g), omega))
    }
}

/// A group given inline or by a path relative to the referring file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(Box<GroupFile>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoRepFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupRef>,
    pub dim: usize,
    pub matrices: BTreeMap<String, ComplexRows>,
}

impl CoRepFile {
    pub fn from_corep(r: &CoRep) -> Self {
        let g = r.group();
        Self {
            group: Some(GroupRef::Inline(Box::new(GroupFile::from_group(
                g,
                r.omega(),
            )))),
            dim: r.dim(),
            matrices: (0..g.order())
                .map(|e| (g.label(e).to_string(), cmatrix_to_rows(r.matrix(e))))
                .collect(),
        }
    }

    pub fn build(&self, group: Arc<MagneticGroup>, omega: FactorSystem) -> Result<CoRep> {
        let mut mats = Vec::with_capacity(group.order());
        for e in 0..group.order() {
            let label = group.label(e);
            let rows = self
                .matrices
                .get(label)
                .ok_or_else(|| Error::Parse(format!("no matrix for element {label:?}")))?;
            let m = rows_to_cmatrix(rows)?;
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(Error::DimensionMismatch(format!(
                    "matrix for {label:?} is not {0}x{0}",
                    self.dim
                )));
            }
            mats.push(m);
        }
        if let Some(extra) = self.matrices.keys().find(|k| group.find_label(k).is_none()) {
            return Err(Error::Parse(format!("unknown element label {extra:?}")));
        }
        CoRep::new(group, omega, mats)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ActionKind>,
    pub dim: usize,
    /// Matrices for the unitary elements and T0; other entries are optional.
    pub matrices: BTreeMap<String, Vec<Vec<f64>>>,
}

impl ActionFile {
    pub fn from_action(g: &MagneticGroup, a: &ProbeRepAction) -> Self {
        Self {
            name: Some(a.name.clone()),
            kind: Some(a.kind),
            dim: a.dim(),
            matrices: (0..g.order())
                .map(|e| (g.label(e).to_string(), rmatrix_to_rows(a.matrix(e))))
                .collect(),
        }
    }

    pub fn build(&self, group: &MagneticGroup) -> Result<ProbeRepAction> {
        let mut partial = vec![None; group.order()];
        for (label, rows) in &self.matrices {
            let e = group
                .find_label(label)
                .ok_or_else(|| Error::Parse(format!("unknown element label {label:?}")))?;
            let m = rows_to_rmatrix(rows)?;
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(Error::DimensionMismatch(format!(
                    "action matrix for {label:?} is not {0}x{0}",
                    self.dim
                )));
            }
            partial[e] = Some(m);
        }
        ProbeRepAction::from_partial(
            group,
            partial,
            self.kind.unwrap_or(ActionKind::Custom),
            self.name.as_deref().unwrap_or("action"),
        )
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_group(path: &Path) -> Result<(Arc<MagneticGroup>, FactorSystem)> {
    read_json::<GroupFile>(path)?.build()
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Loads a co-representation. `group` overrides the group named inside the file.
pub fn load_corep(path: &Path, group: Option<(Arc<MagneticGroup>, FactorSystem)>) -> Result<CoRep> {
    let file: CoRepFile = read_json(path)?;
    let (g, w) = match (group, &file.group) {
        (Some(gw), _) => gw,
        (None, Some(GroupRef::Inline(gf))) => gf.build()?,
        (None, Some(GroupRef::Path(p))) => load_group(&resolve(path, p))?,
        (None, None) => return Err(Error::Parse("co-rep file names no group".into())),
    };
    file.build(g, w)
}

pub fn load_action(path: &Path, group: &MagneticGroup) -> Result<ProbeRepAction> {
    read_json::<ActionFile>(path)?.build(group)
}

/// Serializes to pretty JSON, refusing values with non-finite numbers (which
/// would otherwise appear as `null`).
pub fn to_json_checked<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    fn walk(v: &serde_json::Value, path: &mut String) -> Result<()> {
        match v {
            serde_json::Value::Null => Err(Error::Parse(format!(
                "non-finite or missing value at {path}"
            ))),
            serde_json::Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    let len = path.len();
                    path.push_str(&format!("[{i}]"));
                    walk(x, path)?;
                    path.truncate(len);
                }
                Ok(())
            }
            serde_json::Value::Object(o) => {
                for (k, x) in o {
                    let len = path.len();
                    path.push('.');
                    path.push_str(k);
                    walk(x, path)?;
                    path.truncate(len);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
    walk(&v, &mut String::from("$"))?;
    Ok(serde_json::to_string_pretty(&v)?)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    std::fs::write(path, to_json_checked(value)? + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockEntry {
    pub start: usize,
    pub dim: usize,
    pub energy: f64,
    pub class_labels: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<u8>,
    pub criterion: f64,
}

impl From<&IrrepBlock> for BlockEntry {
    fn from(b: &IrrepBlock) -> Self {
        Self {
            start: b.start,
            dim: b.dim,
            energy: b.energy,
            class_labels: b.class_labels.iter().map(|z| [z.re, z.im]).collect(),
            torsion: b.torsion,
            criterion: b.criterion,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub block_diagonality: f64,
    pub block_criterion: f64,
    pub basis_unitarity: f64,
    pub commutant_hermiticity: f64,
    pub commutant_unitary: f64,
    pub commutant_antiunitary: f64,
}

impl From<&DecompositionResiduals> for ResidualEntry {
    fn from(r: &DecompositionResiduals) -> Self {
        Self {
            block_diagonality: r.block_diagonality,
            block_criterion: r.block_criterion,
            basis_unitarity: r.basis_unitarity,
            commutant_hermiticity: r.commutant.hermiticity,
            commutant_unitary: r.commutant.unitary_commutation,
            commutant_antiunitary: r.commutant.antiunitary_commutation,
        }
    }
}

/// Machine-readable reduction result. Reading it back and calling
/// [`ReduceReport::reverify`] recomputes the residual verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReduceReport {
    pub criterion: f64,
    pub irreducible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<u8>,
    pub message: String,
    pub block_dims: Vec<usize>,
    pub blocks: Vec<BlockEntry>,
    pub residuals: ResidualEntry,
    pub seeds_used: Vec<u64>,
    pub tolerance: f64,
    pub basis: ComplexRows,
}

impl ReduceReport {
    pub fn new(r: &CoRep, dec: &IrrepDecomposition) -> Self {
        let criterion = criterion_character_form(r).re;
        let irreducible = (criterion - 1.0).abs() <= dec.tolerance;
        let torsion = if irreducible && r.group().t0().is_some() {
            torsion_report(r, dec.tolerance).ok().map(|t| t.torsion)
        } else {
            None
        };
        let message = if dec.blocks.len() == 1 {
            "already irreducible".to_string()
        } else {
            format!("reduced into {} irreducible blocks", dec.blocks.len())
        };
        Self {
            criterion,
            irreducible,
            torsion,
            message,
            block_dims: dec.block_dims(),
            blocks: dec.blocks.iter().map(BlockEntry::from).collect(),
            residuals: ResidualEntry::from(&dec.residuals),
            seeds_used: dec.seeds_used.clone(),
            tolerance: dec.tolerance,
            basis: cmatrix_to_rows(&dec.basis),
        }
    }

    /// Recomputes block-diagonality and per-block criteria from the stored basis.
    /// Returns `(block_diagonality, worst |criterion - 1|, pass)`.
    pub fn reverify(&self, r: &CoRep) -> Result<(f64, f64, bool)> {
        let basis = rows_to_cmatrix(&self.basis)?;
        let blocks: Vec<IrrepBlock> = self
            .blocks
            .iter()
            .map(|b| IrrepBlock {
                start: b.start,
                dim: b.dim,
                energy: b.energy,
                class_labels: Vec::new(),
                torsion: b.torsion,
                criterion: b.criterion,
            })
            .collect();
        let off = crate::reduce::block_diagonality(r, &basis, &blocks);
        let mut worst: f64 = 0.0;
        for b in &blocks {
            let sub = r.change_basis(&basis.columns(b.start, b.dim).into_owned())?;
            worst = worst.max((criterion_character_form(&sub).re - 1.0).abs());
        }
        Ok((off, worst, off <= self.tolerance && worst <= self.tolerance))
    }
}

pub fn de_matrix_grid<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<Vec<CMatrix>>, D::Error> {
    let grid: Vec<Vec<ComplexRows>> = Deserialize::deserialize(d)?;
    grid.iter()
        .map(|fam| fam.iter().map(rows_to_cmatrix).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()
        .map_err(serde::de::Error::custom)
}

/// Parses a serialized [`KpModel`]; polynomial labels are not read back.
pub fn model_from_json(text: &str) -> Result<KpModel> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
