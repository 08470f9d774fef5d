//! Which probes split a Kramers doublet, and which subgroups still protect the
//! fourfold-rotation doublet of 4mm1'.

use std::sync::Arc;

use magcorep::catalog::catalog_get;
use magcorep::kp::{probe_stability, KP_TOL};

fn main() -> magcorep::Result<()> {
    let z2 = catalog_get("z2t_kramers")?;
    let r = z2.rep("kramers")?;
    let probes = vec![z2.action("magnetic")?.clone(), z2.action("electric")?.clone()];
    let (whole, emb) = z2.group.subgroup(&[0, 1])?;
    let rep = probe_stability(r, Arc::new(whole), &emb, &probes, KP_TOL)?;
    println!("Kramers under Z2^T: criterion {} protected {}", rep.restricted_criterion, rep.protected);
    for c in &rep.channels {
        println!("  {:<9} couplings {} identity {} splitting {}", c.channel, c.multiplicity, c.identity_couplings, c.splitting);
    }
    let (trivial, emb) = z2.group.subgroup(&[0])?;
    let rep = probe_stability(r, Arc::new(trivial), &emb, &[], KP_TOL)?;
    println!("Kramers with T broken: criterion {} protected {}", rep.restricted_criterion, rep.protected);

    let c4v = catalog_get("c4v_grey")?;
    let g = &c4v.group;
    let e = c4v.rep("E")?;
    for (what, labels) in [
        ("C4 + T", vec!["E", "C4z+", "C2z", "C4z-", "T", "C4z+'", "C2z'", "C4z-'"]),
        ("mirrors mx, my", vec!["E", "mx", "my", "C2z"]),
        ("grey mirrors", vec!["E", "mx", "my", "C2z", "T", "mx'", "my'", "C2z'"]),
    ] {
        let ids: Vec<usize> = labels.iter().map(|l| g.find_label(l).expect("label")).collect();
        let (sub, emb) = g.subgroup(&ids)?;
        let rep = probe_stability(e, Arc::new(sub), &emb, &[], KP_TOL)?;
        println!("E of 4mm1' restricted to {what}: criterion {} protected {}", rep.restricted_criterion, rep.protected);
    }
    Ok(())
}
