//! Dispersion channels up to second order at a C6v point with time reversal.
//! The E1 doublet has no linear term; at second order the
//! (k_x^2 - k_y^2, k_x k_y) channel couples.

use magcorep::catalog::catalog_get;
use magcorep::kp::{dispersion_order, KP_TOL};

fn main() -> magcorep::Result<()> {
    let entry = catalog_get("c6v_grey")?;
    let k = entry.action("momentum")?;
    for name in ["E1", "E2", "spin_half"] {
        let rep = entry.rep(name)?;
        let report = dispersion_order(rep, k, 2, 1, KP_TOL)?;
        println!("{name}: leading order {:?}", report.leading_order);
        for c in &report.channels {
            let polys: Vec<String> = c.polynomials.iter().map(|p| p.to_string()).collect();
            println!("  N={} {:<16} [{}] -> {}", c.order, c.channel, polys.join(", "), c.multiplicity);
        }
    }
    Ok(())
}
