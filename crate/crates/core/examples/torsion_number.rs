//! Torsion numbers of the catalog irreps. An R = 4 irrep restricts to two
//! copies of the same irrep of the unitary subgroup, which the unitary
//! reduction pipeline exposes.

use magcorep::catalog::catalog_all;
use magcorep::reduce::{reduce_corep, torsion_report, QUANT_TOL};

fn main() -> magcorep::Result<()> {
    for entry in catalog_all()? {
        for r in &entry.reps {
            let t = torsion_report(&r.corep, QUANT_TOL)?;
            println!(
                "{:<12} {:<10} indicator {:>6.3}  |chi|^2 average {:>6.3}  R = {}",
                entry.name, r.name, t.indicator, t.restricted_norm, t.torsion
            );
            if t.torsion == 4 {
                let h = r.corep.restrict_to_unitary()?;
                let dec = reduce_corep(&h, 11, QUANT_TOL)?;
                let chars: Vec<Vec<String>> = (0..dec.blocks.len())
                    .map(|k| {
                        let b = dec.block_corep(&h, k).unwrap();
                        b.character().chi.iter().map(|z| format!("{:.2}", z.re)).collect()
                    })
                    .collect();
                println!("    restricted to H: blocks {:?}, characters {:?}", dec.block_dims(), chars);
            }
        }
    }
    Ok(())
}
