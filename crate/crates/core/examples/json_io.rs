//! Write a catalog entry to JSON files, load it back, reduce, and re-verify
//! the stored decomposition from disk.

use magcorep::catalog::catalog_get;
use magcorep::io::{load_corep, load_group, write_json, CoRepFile, GroupFile, ReduceReport};
use magcorep::reduce::{reduce_corep, QUANT_TOL};

fn main() -> magcorep::Result<()> {
    let dir = std::env::temp_dir().join("magcorep_json_io");
    std::fs::create_dir_all(&dir)?;
    let entry = catalog_get("c4v_mprime")?;
    let r = entry.rep("E")?;

    write_json(&GroupFile::from_group(r.group(), r.omega()), &dir.join("group.json"))?;
    let mut file = CoRepFile::from_corep(r);
    file.group = Some(magcorep::io::GroupRef::Path("group.json".into()));
    write_json(&file, &dir.join("rep.json"))?;

    let back = load_corep(&dir.join("rep.json"), None)?;
    let (g, _) = load_group(&dir.join("group.json"))?;
    println!("loaded group of order {} with labels {:?}", g.order(), g.labels());

    let dec = reduce_corep(&back, 1, QUANT_TOL)?;
    let report = ReduceReport::new(&back, &dec);
    write_json(&report, &dir.join("reduced.json"))?;
    let text = std::fs::read_to_string(dir.join("reduced.json"))?;
    let stored: ReduceReport = serde_json::from_str(&text)?;
    let (off, worst, pass) = stored.reverify(&back)?;
    println!("{}: {:?}", stored.message, stored.block_dims);
    println!("re-verified from disk: off-block {off:.1e}, criterion error {worst:.1e}, pass {pass}");
    println!("files in {}", dir.display());
    Ok(())
}
