//! The anti-unitary coset acts on H by conjugation, h -> T0 h T0^-1, and on
//! irreps of H by F(h) = M(T0) M*(h) M(T0)^+. In 4m'm' the mirror-times-T
//! element maps C4 to its inverse.

use magcorep::catalog::catalog_get;
use magcorep::linalg::max_abs;

fn main() -> magcorep::Result<()> {
    let entry = catalog_get("c4v_mprime")?;
    let g = &entry.group;
    let t0 = g.require_t0()?;
    println!("T0 = {}", g.label(t0));
    for &h in g.unitary_elements() {
        let c = g.conjugate_by_t0(h)?;
        println!("  {:>5} -> {}", g.label(h), g.label(c));
    }
    let r = entry.rep("E")?;
    for &h in g.unitary_elements() {
        let f = r.f_of_h(h)?;
        let target = r.matrix(g.conjugate_by_t0(h)?);
        println!("  |F({}) - M(T0 h T0^-1)| = {:.1e}", g.label(h), max_abs(&(f - target)));
    }
    Ok(())
}
