//! Linear k.p couplings of a Kramers doublet with T flipping k: nine independent
//! terms (a generic Weyl point). The constraint solver gives the same space.

use magcorep::catalog::catalog_get;
use magcorep::kp::oracle::ORACLE_TOL;
use magcorep::kp::{build_gamma_matrices, linear_multiplicity, solve_constraints, KP_TOL, MULTIPLICITY_TOL};
use magcorep::linalg::projector_distance;

fn main() -> magcorep::Result<()> {
    let entry = catalog_get("z2t_kramers")?;
    let r = entry.rep("kramers")?;
    let k = entry.action("momentum")?;
    let p = linear_multiplicity(r, k, MULTIPLICITY_TOL)?;
    let model = build_gamma_matrices(r, k, KP_TOL)?;
    let oracle = solve_constraints(r, k, ORACLE_TOL)?;
    println!("multiplicity {p}, oracle dimension {}", oracle.dim());
    println!("span distance {:.2e}", projector_distance(&model.real_span(), &oracle.basis));
    println!("residuals {:?}", model.residuals);

    let h = model.hamiltonian(&[0.3, -0.2, 0.1, 0.0, 0.5, 0.0, 0.7, 0.0, -0.4], &[0.1, 0.2, -0.3]);
    println!("H(k) at k = (0.1, 0.2, -0.3):\n{h:.4}");

    let spinless = catalog_get("z2t_spinless")?;
    let p0 = linear_multiplicity(spinless.rep("scalar")?, spinless.action("momentum")?, MULTIPLICITY_TOL)?;
    println!("spinless TRIM, linear terms: {p0}");
    Ok(())
}
