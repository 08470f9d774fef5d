//! A random Hermitian matrix averaged over H and symmetrized with T0 commutes
//! with the whole co-representation; on an irrep it is a multiple of the identity.

use magcorep::catalog::catalog_get;
use magcorep::corep::CoRep;
use magcorep::linalg::{eigh, identity};
use magcorep::reduce::build_g_commutant;
use num_complex::Complex64;

fn main() -> magcorep::Result<()> {
    let entry = catalog_get("c6v_grey")?;
    let e1 = entry.rep("E1")?;
    let c = build_g_commutant(e1, 5);
    let scale = c.gamma.trace().re / e1.dim() as f64;
    let dev = (&c.gamma - identity(e1.dim()) * Complex64::from(scale)).norm() / c.gamma.norm();
    println!("irreducible E1: residuals {:?}", c.residuals(e1));
    println!("  Gamma = {scale:.6} I, relative deviation {dev:.2e}");

    let sum = CoRep::direct_sum(&[e1.clone(), entry.rep("E2")?.clone(), entry.rep("A1")?.clone()])?;
    let c = build_g_commutant(&sum, 5);
    println!("E1 + E2 + A1: residuals {:?}", c.residuals(&sum));
    let spectrum = eigh(&c.gamma, 1e-9)?.values;
    println!("  spectrum {:.6}", spectrum.transpose());
    Ok(())
}
