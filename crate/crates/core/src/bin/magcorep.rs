use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use magcorep::catalog::{catalog_get, catalog_list, CatalogEntry};
use magcorep::corep::{CoRep, CoRepReport, COREP_TOL};
use magcorep::group::{CocycleReport, FactorSystem, MagneticGroup};
use magcorep::io::{
    cmatrix_to_rows, load_action, load_corep, load_group, to_json_checked, ActionFile, CoRepFile,
    GroupFile, ReduceReport,
};
use magcorep::kp::probe::{ChannelReport, ProbeReport};
use magcorep::kp::{dispersion_order, probe_stability, DispersionReport, ProbeRepAction, KP_TOL};
use magcorep::reduce::{
    irreducibility_report, reduce_corep, torsion_report, IrreducibilityReport, TorsionReport,
    QUANT_TOL,
};
use magcorep::{Error, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "magcorep", version, about = "Co-representations of magnetic groups and k.p models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Tolerance; each command has its own default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Where the co-representation comes from: a rep file (optionally with a
/// separate group file) or a catalog entry written `entry/rep`.
#[derive(Args)]
struct RepArgs {
    /// Co-representation file.
    rep: Option<PathBuf>,
    /// Group file overriding the group named in the rep file.
    #[arg(long)]
    group: Option<PathBuf>,
    /// Catalog co-representation, e.g. `z2t_kramers/kramers`.
    #[arg(long, conflicts_with_all = ["rep", "group"])]
    catalog: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the group axioms, the factor system and the co-representation.
    Validate {
        #[command(flatten)]
        src: RepArgs,
    },
    /// Decompose into irreducible blocks.
    Reduce {
        #[command(flatten)]
        src: RepArgs,
    },
    /// Evaluate the irreducibility criterion in both forms.
    Irreducible {
        #[command(flatten)]
        src: RepArgs,
    },
    /// Torsion number of an irreducible co-representation.
    Torsion {
        #[command(flatten)]
        src: RepArgs,
    },
    /// Coupling matrices and dispersion orders for a momentum-like action.
    Kp {
        #[command(flatten)]
        src: RepArgs,
        /// Action file, or the name of a catalog action when `--catalog` is used.
        #[arg(long, default_value = "momentum")]
        action: String,
        #[arg(long, default_value_t = 1)]
        max_order: usize,
    },
    /// Stability of the degeneracy under a symmetry-lowering probe.
    Probe {
        #[command(flatten)]
        src: RepArgs,
        /// Comma-separated labels of the surviving elements.
        #[arg(long)]
        subgroup: String,
        /// Probe action files or catalog action names (repeatable).
        #[arg(long = "probe")]
        probes: Vec<String>,
    },
    /// Built-in groups.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show { name: String },
    /// Write group, co-rep and action files for an entry into a directory.
    Export { name: String, dir: PathBuf },
}

/// Exit status for a failed command: 2 for unreadable or malformed input, 1 otherwise.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::UnknownName(_) => 2,
        _ => 1,
    }
}

struct Loaded {
    rep: CoRep,
    entry: Option<CatalogEntry>,
}

fn load(src: &RepArgs) -> Result<Loaded, Error> {
    if let Some(entry_rep) = &src.catalog {
        let (name, rep) = entry_rep
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected entry/rep, got {entry_rep:?}")))?;
        let entry = catalog_get(name)?;
        let rep = entry.rep(rep)?.clone();
        return Ok(Loaded { rep, entry: Some(entry) });
    }
    let path = src
        .rep
        .as_ref()
        .ok_or_else(|| Error::Parse("a co-representation file or --catalog is required".into()))?;
    let group = src.group.as_deref().map(load_group).transpose()?;
    Ok(Loaded { rep: load_corep(path, group)?, entry: None })
}

fn resolve_action(name: &str, loaded: &Loaded) -> Result<ProbeRepAction, Error> {
    let p = Path::new(name);
    if p.is_file() {
        return load_action(p, loaded.rep.group());
    }
    match &loaded.entry {
        Some(e) => Ok(e.action(name)?.clone()),
        None => Err(Error::Parse(format!("action file {name:?} not found"))),
    }
}

#[derive(Serialize)]
struct ValidateReport {
    order: usize,
    antiunitary: bool,
    type_two: bool,
    cocycle: CocycleReport,
    corep: CoRepReport,
    pass: bool,
}

#[derive(Serialize)]
struct KpReport {
    criterion: f64,
    /// The degeneracy is symmetry-enforced when the co-rep is irreducible.
    protected: bool,
    #[serde(flatten)]
    dispersion: DispersionReport,
}

fn emit(common: &Common, json: String, text: String) -> Result<(), Error> {
    let body = match common.format {
        Format::Json => json,
        Format::Text => text,
    };
    match &common.out {
        Some(path) => std::fs::write(path, body + "\n")?,
        None => println!("{body}"),
    }
    Ok(())
}

fn fmt_matrix(out: &mut String, m: &magcorep::linalg::CMatrix) {
    for i in 0..m.nrows() {
        out.push_str("    [");
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = write!(out, " {:>7.4}{:+.4}i", z.re, z.im);
        }
        out.push_str(" ]\n");
    }
}

fn text_validate(r: &ValidateReport) -> String {
    format!(
        "group order {} ({}{})\ncocycle residual {:.3e}\nunitarity residual {:.3e}\nrelation residual {:.3e}\n{}",
        r.order,
        if r.antiunitary { "anti-unitary" } else { "unitary" },
        if r.type_two { ", T0^2 != E" } else { "" },
        r.cocycle.max_violation,
        r.corep.unitarity_residual,
        r.corep.relation_residual,
        if r.pass { "PASS" } else { "FAIL" }
    )
}

fn text_irreducible(r: &IrreducibilityReport) -> String {
    format!(
        "criterion {:.10} (trace form {:.10})\n{}",
        r.criterion,
        r.criterion_trace_form,
        if r.irreducible { "irreducible" } else { "reducible" }
    )
}

fn text_torsion(r: &TorsionReport) -> String {
    format!(
        "indicator {:.10}\nrestricted norm {:.10}\ntorsion R = {}",
        r.indicator, r.restricted_norm, r.torsion
    )
}

fn text_reduce(r: &ReduceReport) -> String {
    let mut s = format!("{}\nblock dims {:?}\n", r.message, r.block_dims);
    for (k, b) in r.blocks.iter().enumerate() {
        let _ = writeln!(
            s,
            "  block {k}: start {} dim {} criterion {:.10} torsion {}",
            b.start,
            b.dim,
            b.criterion,
            b.torsion.map_or("-".into(), |t| t.to_string())
        );
    }
    let _ = write!(
        s,
        "block diagonality {:.3e}, basis unitarity {:.3e}, seeds {:?}",
        r.residuals.block_diagonality, r.residuals.basis_unitarity, r.seeds_used
    );
    s
}

fn text_channel(s: &mut String, c: &ChannelReport) {
    let polys: Vec<String> = c.polynomials.iter().map(|p| p.to_string()).collect();
    let _ = writeln!(
        s,
        "order {} channel {}{} [{}]: multiplicity {}",
        c.order,
        c.channel,
        if c.full_channel { " (full)" } else { "" },
        polys.join(", "),
        c.multiplicity
    );
    if let Some(m) = &c.model {
        for (i, fam) in m.gammas.iter().enumerate() {
            for (j, g) in fam.iter().enumerate() {
                let _ = writeln!(s, "  gamma[{i}][{j}] ({}):", polys.get(j).map_or("", |p| p.as_str()));
                fmt_matrix(s, g);
            }
        }
    }
}

fn text_kp(r: &KpReport) -> String {
    let mut s = format!(
        "criterion {:.10} ({})\n",
        r.criterion,
        if r.protected { "degeneracy protected" } else { "reducible" }
    );
    for c in &r.dispersion.channels {
        text_channel(&mut s, c);
    }
    let _ = write!(
        s,
        "leading order: {}",
        r.dispersion.leading_order.map_or("none up to max order".into(), |n| n.to_string())
    );
    s
}

fn text_probe(r: &ProbeReport) -> String {
    let mut s = format!(
        "subgroup order {}: criterion {:.10} ({})\n",
        r.subgroup_order,
        r.restricted_criterion,
        if r.protected { "protected" } else { "splitting allowed" }
    );
    for c in &r.channels {
        let _ = writeln!(
            s,
            "  {}: multiplicity {}, identity couplings {}, splitting couplings {}",
            c.channel, c.multiplicity, c.identity_couplings, c.splitting
        );
    }
    s.trim_end().to_string()
}

fn text_entry(e: &CatalogEntry) -> String {
    let mut s = format!("{}: {}\norder {}\nelements {}\n", e.name, e.description, e.group.order(), e.group.labels().join(" "));
    for r in &e.reps {
        let _ = writeln!(s, "  rep {} (dim {})", r.name, r.corep.dim());
    }
    for r in &e.reducible {
        let _ = writeln!(s, "  reducible {} (dim {})", r.name, r.corep.dim());
    }
    for a in &e.probe_actions {
        let _ = writeln!(s, "  action {} (dim {})", a.name, a.dim());
    }
    s.trim_end().to_string()
}

#[derive(Serialize)]
struct EntrySummary<'a> {
    name: &'a str,
    description: &'a str,
    order: usize,
    labels: &'a [String],
    omega_classes: Vec<&'a str>,
    reps: Vec<(&'a str, usize)>,
    reducible: Vec<(&'a str, usize)>,
    probe_actions: Vec<(&'a str, usize)>,
}

fn summary(e: &CatalogEntry) -> EntrySummary<'_> {
    EntrySummary {
        name: &e.name,
        description: &e.description,
        order: e.group.order(),
        labels: e.group.labels(),
        omega_classes: e.omega_classes.iter().map(|(n, _)| n.as_str()).collect(),
        reps: e.reps.iter().map(|r| (r.name.as_str(), r.corep.dim())).collect(),
        reducible: e.reducible.iter().map(|r| (r.name.as_str(), r.corep.dim())).collect(),
        probe_actions: e.probe_actions.iter().map(|a| (a.name.as_str(), a.dim())).collect(),
    }
}

fn export(e: &CatalogEntry, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, json: String| -> Result<(), Error> {
        let p = dir.join(name);
        std::fs::write(&p, json + "\n")?;
        written.push(p);
        Ok(())
    };
    let trivial = FactorSystem::trivial(e.group.order());
    put("group.json".into(), to_json_checked(&GroupFile::from_group(&e.group, &trivial))?)?;
    for r in e.reps.iter().chain(&e.reducible) {
        // each rep carries its own factor system inline
        put(format!("rep_{}.json", r.name), to_json_checked(&CoRepFile::from_corep(&r.corep))?)?;
    }
    for a in &e.probe_actions {
        put(format!("action_{}.json", a.name), to_json_checked(&ActionFile::from_action(&e.group, a))?)?;
    }
    Ok(written)
}

fn subgroup_from_labels(g: &MagneticGroup, labels: &str) -> Result<(Arc<MagneticGroup>, Vec<usize>), Error> {
    let elems = labels
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| g.find_label(l).ok_or_else(|| Error::Parse(format!("unknown element label {l:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let (sub, emb) = g.subgroup(&elems)?;
    Ok((Arc::new(sub), emb))
}

fn run(cli: Cli) -> Result<u8, Error> {
    let c = &cli.common;
    match &cli.command {
        Command::Validate { src } => {
            let loaded = load(src)?;
            let r = &loaded.rep;
            let tol = c.tol.unwrap_or(COREP_TOL);
            let cocycle = r.omega().validate(r.group(), tol)?;
            let corep = r.validate(tol);
            let report = ValidateReport {
                order: r.group().order(),
                antiunitary: r.group().is_antiunitary_group(),
                type_two: r.group().is_type_two(),
                pass: cocycle.pass && corep.pass,
                cocycle,
                corep,
            };
            emit(c, to_json_checked(&report)?, text_validate(&report))?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Reduce { src } => {
            let r = load(src)?.rep;
            let dec = reduce_corep(&r, c.seed, c.tol.unwrap_or(QUANT_TOL))?;
            let report = ReduceReport::new(&r, &dec);
            emit(c, to_json_checked(&report)?, text_reduce(&report))?;
            Ok(0)
        }
        Command::Irreducible { src } => {
            let r = load(src)?.rep;
            let report = irreducibility_report(&r, c.tol.unwrap_or(QUANT_TOL))?;
            emit(c, to_json_checked(&report)?, text_irreducible(&report))?;
            Ok(0)
        }
        Command::Torsion { src } => {
            let r = load(src)?.rep;
            let report = torsion_report(&r, c.tol.unwrap_or(QUANT_TOL))?;
            emit(c, to_json_checked(&report)?, text_torsion(&report))?;
            Ok(0)
        }
        Command::Kp { src, action, max_order } => {
            if *max_order == 0 {
                return Err(Error::Parse("--max-order must be at least 1".into()));
            }
            let loaded = load(src)?;
            let a = resolve_action(action, &loaded)?;
            let r = &loaded.rep;
            let crit = irreducibility_report(r, QUANT_TOL)?;
            let dispersion = dispersion_order(r, &a, *max_order, c.seed, c.tol.unwrap_or(KP_TOL))?;
            let report = KpReport { criterion: crit.criterion, protected: crit.irreducible, dispersion };
            emit(c, to_json_checked(&report)?, text_kp(&report))?;
            Ok(0)
        }
        Command::Probe { src, subgroup, probes } => {
            let loaded = load(src)?;
            let r = &loaded.rep;
            let (sub, emb) = subgroup_from_labels(r.group(), subgroup)?;
            let actions = probes.iter().map(|p| resolve_action(p, &loaded)).collect::<Result<Vec<_>, _>>()?;
            let report = probe_stability(r, sub, &emb, &actions, c.tol.unwrap_or(KP_TOL))?;
            emit(c, to_json_checked(&report)?, text_probe(&report))?;
            Ok(0)
        }
        Command::Catalog { cmd } => match cmd {
            CatalogCmd::List => {
                let entries = catalog_list()
                    .into_iter()
                    .map(catalog_get)
                    .collect::<Result<Vec<_>, _>>()?;
                let sums: Vec<_> = entries.iter().map(summary).collect();
                let text = entries.iter().map(|e| format!("{:<14} {}", e.name, e.description)).collect::<Vec<_>>().join("\n");
                emit(c, to_json_checked(&sums)?, text)?;
                Ok(0)
            }
            CatalogCmd::Show { name } => {
                let e = catalog_get(name)?;
                let mut v = serde_json::to_value(summary(&e))?;
                v["reps_matrices"] = serde_json::to_value(
                    e.reps
                        .iter()
                        .map(|r| (r.name.clone(), r.corep.matrices().iter().map(cmatrix_to_rows).collect::<Vec<_>>()))
                        .collect::<std::collections::BTreeMap<_, _>>(),
                )?;
                emit(c, to_json_checked(&v)?, text_entry(&e))?;
                Ok(0)
            }
            CatalogCmd::Export { name, dir } => {
                let e = catalog_get(name)?;
                let files = export(&e, dir)?;
                let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
                emit(c, to_json_checked(&names)?, names.join("\n"))?;
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code(&e);
            let detail = serde_json::json!({ "error": e.to_string(), "exit_code": code });
            eprintln!("error: {e}");
            println!("{detail}");
            ExitCode::from(code)
        }
    }
}
