//! Irreducibility criterion for the Kramers doublet, its double, and every
//! catalog co-representation (character form against trace form).

use magcorep::catalog::{catalog_all, catalog_get};
use magcorep::corep::CoRep;
use magcorep::reduce::{criterion_character_form, criterion_trace_form, irreducibility_index};

fn main() -> magcorep::Result<()> {
    let kramers = catalog_get("z2t_kramers")?.rep("kramers")?.clone();
    let double = CoRep::direct_sum(&[kramers.clone(), kramers.clone()])?;
    println!("Kramers doublet: {}", irreducibility_index(&kramers)?);
    println!("two Kramers doublets: {}", irreducibility_index(&double)?);

    println!("\n{:<12} {:<13} {:>3} {:>14} {:>14}", "group", "rep", "d", "character", "trace");
    for entry in catalog_all()? {
        for r in entry.reps.iter().chain(&entry.reducible) {
            let a = criterion_character_form(&r.corep);
            let b = criterion_trace_form(&r.corep);
            println!("{:<12} {:<13} {:>3} {:>14.10} {:>14.10}", entry.name, r.name, r.corep.dim(), a.re, b.re);
        }
    }
    Ok(())
}
