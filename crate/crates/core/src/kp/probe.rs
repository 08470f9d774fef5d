//! Leading dispersion order around a degenerate point and stability of the
//! degeneracy under symmetry-lowering probes.

use std::sync::Arc;

use serde::Serialize;

use crate::corep::CoRep;
use crate::error::{Error, Result};
use crate::group::MagneticGroup;
use crate::reduce::criterion_character_form;

use super::action::ProbeRepAction;
use super::poly::{irreducible_channels, polynomial_channel, Polynomial};
use super::{build_gamma_matrices, linear_multiplicity, KpModel, MULTIPLICITY_TOL};

#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub channel: String,
    pub order: usize,
    pub dim: usize,
    pub polynomials: Vec<Polynomial>,
    /// True for the whole (possibly reducible) first-order momentum channel.
    pub full_channel: bool,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<KpModel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionReport {
    pub channels: Vec<ChannelReport>,
    /// Smallest order with a nonzero multiplicity in some channel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading_order: Option<usize>,
    pub max_order: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl DispersionReport {
    pub fn at_order(&self, n: usize) -> impl Iterator<Item = &ChannelReport> {
        self.channels.iter().filter(move |c| c.order == n)
    }
}

fn channel_report(
    r: &CoRep,
    ch: &ProbeRepAction,
    order: usize,
    full: bool,
    tol: f64,
) -> Result<ChannelReport> {
    let multiplicity = linear_multiplicity(r, ch, MULTIPLICITY_TOL)?;
    let model = if multiplicity > 0 {
        Some(build_gamma_matrices(r, ch, tol)?)
    } else {
        None
    };
    Ok(ChannelReport {
        channel: ch.name.clone(),
        order,
        dim: ch.dim(),
        polynomials: ch.polynomials.clone().unwrap_or_default(),
        full_channel: full,
        multiplicity,
        model,
    })
}

/// Multiplicities and couplings of every irreducible polynomial channel up to `max_order`.
/// At first order the whole momentum channel is reported as well as its irreducible parts.
pub fn dispersion_order(
    r: &CoRep,
    momentum: &ProbeRepAction,
    max_order: usize,
    seed: u64,
    tol: f64,
) -> Result<DispersionReport> {
    if max_order == 0 {
        return Err(Error::InvalidAction(
            "maximum order must be at least 1".into(),
        ));
    }
    let g = r.group();
    let mut channels = Vec::new();
    for n in 1..=max_order {
        if n == 1 {
            let full = polynomial_channel(g, momentum, 1, seed)?;
            channels.push(channel_report(r, &full[0], 1, true, tol)?);
            let parts = irreducible_channels(g, momentum, 1, seed)?;
            if parts.len() > 1 {
                for ch in &parts {
                    channels.push(channel_report(r, ch, 1, false, tol)?);
                }
            }
        } else {
            for ch in &polynomial_channel(g, momentum, n as u32, seed)? {
                channels.push(channel_report(r, ch, n, false, tol)?);
            }
        }
    }
    let leading_order = channels
        .iter()
        .filter(|c| c.multiplicity > 0)
        .map(|c| c.order)
        .min();
    Ok(DispersionReport {
        channels,
        leading_order,
        max_order,
        seed,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeChannelReport {
    pub channel: String,
    pub kind: super::ActionKind,
    pub multiplicity: usize,
    /// Couplings proportional to the identity, `(1/|G|) sum_g Tr D(g)`; they shift
    /// but do not split the level.
    pub identity_couplings: usize,
    /// Independent couplings that split the level: multiplicity minus identity couplings.
    pub splitting: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<KpModel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub subgroup_order: usize,
    pub restricted_criterion: f64,
    /// True when the co-representation stays irreducible on the subgroup.
    pub protected: bool,
    pub channels: Vec<ProbeChannelReport>,
    pub tolerance: f64,
}

/// Restricts `r` to the subgroup given by `embedding` and evaluates the criterion
/// there; every probe channel (an action of the full group) is then coupled linearly.
pub fn probe_stability(
    r: &CoRep,
    sub: Arc<MagneticGroup>,
    embedding: &[usize],
    probes: &[ProbeRepAction],
    tol: f64,
) -> Result<ProbeReport> {
    let restricted = r.restrict(sub.clone(), embedding).map_err(|e| match e {
        Error::NotASubgroupEmbedding(s) => Error::NotASubgroupEmbedding(s),
        other => Error::NotASubgroupEmbedding(other.to_string()),
    })?;
    let value = criterion_character_form(&restricted).re;
    let mut channels = Vec::new();
    for a in probes {
        let multiplicity = linear_multiplicity(r, a, MULTIPLICITY_TOL)?;
        let inv = a.invariant_count();
        let identity_couplings = inv.round();
        if (inv - identity_couplings).abs() > MULTIPLICITY_TOL {
            return Err(Error::NonIntegerMultiplicity(inv));
        }
        let identity_couplings = identity_couplings as usize;
        let model = if multiplicity > 0 {
            Some(build_gamma_matrices(r, a, tol)?)
        } else {
            None
        };
        channels.push(ProbeChannelReport {
            channel: a.name.clone(),
            kind: a.kind,
            multiplicity,
            identity_couplings,
            splitting: multiplicity.saturating_sub(identity_couplings),
            model,
        });
    }
    Ok(ProbeReport {
        subgroup_order: sub.order(),
        restricted_criterion: value,
        protected: (value - 1.0).abs() <= MULTIPLICITY_TOL,
        channels,
        tolerance: tol,
    })
}
