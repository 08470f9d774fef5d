//! A group given by its Cayley table: Z4 generated by an anti-unitary T0 with
//! T0^2 = s. Validate the factor system, gauge it, and check that the
//! criterion does not care.

use std::sync::Arc;

use magcorep::corep::CoRep;
use magcorep::group::{FactorSystem, MagneticGroup};
use magcorep::linalg::{identity, ONE, ZERO};
use magcorep::reduce::{criterion_character_form, torsion_report, QUANT_TOL};
use num_complex::Complex64;

fn main() -> magcorep::Result<()> {
    let cayley = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 1, 0], vec![3, 2, 0, 1]];
    let g = Arc::new(MagneticGroup::with_details(
        cayley,
        vec![false, false, true, true],
        Some(vec!["E".into(), "s".into(), "T0".into(), "T0s".into()]),
        None,
    )?);
    println!("order {}, type II: {}, T0 = {}", g.order(), g.is_type_two(), g.label(g.require_t0()?));

    let isy = magcorep::linalg::CMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]);
    let w = FactorSystem::trivial(4);
    println!("trivial cocycle: {:?}", w.validate(&g, 1e-12)?);
    let r = CoRep::new(g.clone(), w, vec![identity(2), -identity(2), isy.clone(), -isy])?;
    println!("criterion {}, torsion {}", criterion_character_form(&r).re, torsion_report(&r, QUANT_TOL)?.torsion);

    let phases: Vec<Complex64> = (0..4).map(|k| Complex64::from_polar(1.0, 0.7 * k as f64 + 0.2)).collect();
    let gauged = r.gauge_transform(&phases)?;
    println!("gauged cocycle: {:?}", gauged.omega().validate(&g, 1e-12)?);
    println!("gauged co-rep valid: {}", gauged.validate(1e-10).pass);
    println!("criterion after gauge {:.12}", criterion_character_form(&gauged).re);
    Ok(())
}
