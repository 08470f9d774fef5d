//! Hide a direct sum of C4v irreps behind a random unitary and recover the blocks.

use magcorep::catalog::catalog_get;
use magcorep::corep::CoRep;
use magcorep::linalg::{random_unitary, seeded_rng};
use magcorep::reduce::{reduce_corep, QUANT_TOL};

fn main() -> magcorep::Result<()> {
    let entry = catalog_get("c4v_grey")?;
    let parts: Vec<CoRep> = ["E", "A2", "E", "B1"]
        .iter()
        .map(|n| entry.rep(n).cloned())
        .collect::<magcorep::Result<_>>()?;
    let sum = CoRep::direct_sum(&parts)?;
    let mut rng = seeded_rng(3);
    let u = random_unitary(&mut rng, sum.dim());
    let hidden = sum.change_basis(&u)?;

    let dec = reduce_corep(&hidden, 42, QUANT_TOL)?;
    println!("dimension {} -> blocks {:?}", hidden.dim(), dec.block_dims());
    for b in &dec.blocks {
        println!("  start {:>2} dim {} criterion {:.12} torsion {:?} energy {:+.4}", b.start, b.dim, b.criterion, b.torsion, b.energy);
    }
    println!("block diagonality {:.2e}", dec.residuals.block_diagonality);
    println!("basis unitarity   {:.2e}", dec.residuals.basis_unitarity);
    println!("seeds used        {:?}", dec.seeds_used);

    let kramers = catalog_get("z2t_kramers")?.rep("kramers")?.clone();
    let two = CoRep::direct_sum(&[kramers.clone(), kramers])?.change_basis(&random_unitary(&mut rng, 4))?;
    println!("two Kramers doublets -> {:?}", reduce_corep(&two, 7, QUANT_TOL)?.block_dims());
    Ok(())
}
