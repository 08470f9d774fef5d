//! Square root of a symmetric unitary that is itself symmetric and unitary, and
//! its use to rebase an anti-unitary operator to plain complex conjugation.

use magcorep::linalg::{conj, identity, max_abs, random_unitary, seeded_rng, symmetric_unitary_sqrt};

fn main() -> magcorep::Result<()> {
    let mut rng = seeded_rng(9);
    for d in [1, 2, 5, 16] {
        let v = random_unitary(&mut rng, d);
        let m = &v * v.transpose();
        let s = symmetric_unitary_sqrt(&m, 1e-9)?;
        let u = &s.root;
        println!(
            "d={d:>2}  |U^2 - M| {:.1e}  |U^T - U| {:.1e}  |U U^+ - I| {:.1e}  rebased |U^+ M U* - I| {:.1e}",
            max_abs(&(u * u - &m)),
            max_abs(&(u.transpose() - u)),
            max_abs(&(u * u.adjoint() - identity(d))),
            max_abs(&(u.adjoint() * &m * conj(u) - identity(d)))
        );
    }
    // -1 sits on the branch cut of the principal square root
    let minus = -identity(3);
    let s = symmetric_unitary_sqrt(&minus, 1e-9)?;
    println!("M = -I: branch cut hits {}, |U^2 - M| {:.1e}", s.branch_cut_hits, max_abs(&(&s.root * &s.root - &minus)));
    Ok(())
}
