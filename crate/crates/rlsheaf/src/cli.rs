//! Command-line front end: loads fixtures or JSON files, runs the
//! validators/checkers/constructions, and emits text or JSON reports plus
//! DOT artifacts.
//!
//! Exit codes: 0 all checks pass, 1 mathematical failure (with witness),
//! 2 input/format error, 3 enumeration budget exceeded.

use crate::algebra::{self, AlgRef};
use crate::colimit;
use crate::dot;
use crate::etale::EtaleSpace;
use crate::fixtures;
use crate::functors::{self, EquivalenceInstance};
use crate::generate::{self, SplitMix64};
use crate::json;
use crate::presheaf::{self, PresheafRef};
use crate::report::{Budget, Error, Result, ValidationReport};
use crate::sheafify;
use crate::spectra::{self, SpectrumKind};
use crate::topology::{open_covers, CoverMode};
use std::io::Write;

pub struct Options {
    pub json: bool,
    pub seed: u64,
    pub out: Option<String>,
    pub budget: Budget,
    pub mode: CoverMode,
    pub kind: Option<String>,
    pub carrier: Option<String>,
    pub point: Option<String>,
    pub closed_basis: bool,
    pub count: usize,
    pub chain: usize,
    pub export: Option<String>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            json: false,
            seed: 0xd1ce,
            out: None,
            budget: Budget::default(),
            mode: CoverMode::Strict,
            kind: None,
            carrier: None,
            point: None,
            closed_basis: false,
            count: 20,
            chain: 10,
            export: None,
        }
    }
}

pub const USAGE: &str = "\
usage: rlsheaf <command> [flags] [input]

commands:
  validate-algebra <file|fixture>    axiom check with witnesses
  filters <file|fixture>             enumerate the filters F1..Fk
  classify <file|fixture>            prime / maximal / minimal-prime filters
  spectrum --kind hull|dual|patch --carrier spec|max|min <file|fixture>
  validate-presheaf <file|fixture>   functor laws + restriction morphisms
  sheaf-check --mode strict|paper <file|fixture>
  stalk --point P <file|fixture>     stalk at a base point (both routes)
  sheafify <file|fixture>            sections of the stalk space, with iota
  etale --export dot <file|fixture>  stalk space construction (+ DOT)
  theorem <equalizer|reflection|equivalence|subcategory>
  demo <example-id>                  end-to-end runs of the named examples

flags:
  --json            machine-readable report
  --seed N          seed for randomized suites (default fixed)
  --count N         instance count for randomized suites
  --out PATH        write DOT/JSON artifacts to PATH
  --mode M          sheaf-check mode (strict | paper)
  --closed-basis    hull topology via the closed-basis variant
  --chain K         chain resolution for parameterized demos (default 10)
  --budget-filters N / --budget-covers N / --budget-sections N /
  --budget-tuples N / --budget-morphisms N / --budget-opens N
                    raise or lower the enumeration guards

exit codes: 0 ok, 1 mathematical failure, 2 input error, 3 budget exceeded
";

fn parse_args(args: &[String]) -> Result<(String, Vec<String>, Options)> {
    let mut opts = Options::default();
    let mut positional = Vec::new();
    let mut cmd = String::new();
    let mut it = args.iter().peekable();
    let need_value = |it: &mut std::iter::Peekable<std::slice::Iter<String>>,
                          flag: &str|
     -> Result<String> {
        it.next()
            .cloned()
            .ok_or_else(|| Error::Format(format!("flag {flag} needs a value")))
    };
    while let Some(a) = it.next() {
        match a.as_str() {
            "--json" => opts.json = true,
            "--closed-basis" => opts.closed_basis = true,
            "--seed" => opts.seed = need_value(&mut it, "--seed")?.parse().map_err(|_| {
                Error::Format("--seed expects an integer".into())
            })?,
            "--count" => opts.count = need_value(&mut it, "--count")?.parse().map_err(|_| {
                Error::Format("--count expects an integer".into())
            })?,
            "--chain" => opts.chain = need_value(&mut it, "--chain")?.parse().map_err(|_| {
                Error::Format("--chain expects an integer".into())
            })?,
            "--out" => opts.out = Some(need_value(&mut it, "--out")?),
            "--export" => opts.export = Some(need_value(&mut it, "--export")?),
            "--budget-filters" | "--budget-covers" | "--budget-sections" | "--budget-tuples"
            | "--budget-morphisms" | "--budget-opens" => {
                let v: usize = need_value(&mut it, a)?
                    .parse()
                    .map_err(|_| Error::Format(format!("{a} expects an integer")))?;
                match a.as_str() {
                    "--budget-filters" => opts.budget.filter_algebra = v,
                    "--budget-covers" => opts.budget.cover_families = v,
                    "--budget-sections" => opts.budget.section_candidates = v,
                    "--budget-tuples" => opts.budget.tuple_scan = v,
                    "--budget-morphisms" => opts.budget.morphism_search = v,
                    _ => opts.budget.opens = v,
                }
            }
            "--kind" => opts.kind = Some(need_value(&mut it, "--kind")?),
            "--carrier" => opts.carrier = Some(need_value(&mut it, "--carrier")?),
            "--point" => opts.point = Some(need_value(&mut it, "--point")?),
            "--mode" => {
                opts.mode = match need_value(&mut it, "--mode")?.as_str() {
                    "strict" => CoverMode::Strict,
                    "paper" => CoverMode::Paper,
                    m => return Err(Error::Format(format!("unknown mode '{m}'"))),
                }
            }
            flag if flag.starts_with("--") => {
                return Err(Error::Format(format!("unknown flag '{flag}'")))
            }
            _ => {
                if cmd.is_empty() {
                    cmd = a.clone();
                } else {
                    positional.push(a.clone());
                }
            }
        }
    }
    Ok((cmd, positional, opts))
}

fn load_algebra(input: &str) -> Result<AlgRef> {
    let raw = if std::path::Path::new(input).exists() {
        let text = std::fs::read_to_string(input).map_err(|e| Error::Io(e.to_string()))?;
        json::parse_algebra(&text)?
    } else if let Some(a) = fixtures::algebra_fixture(input) {
        return Ok(a);
    } else {
        return Err(Error::Format(format!(
            "'{input}' is neither a file nor a known algebra fixture"
        )));
    };
    let v = algebra::validate_residuated_lattice(&raw)?;
    v.algebra.ok_or_else(|| {
        Error::Precondition(format!(
            "input algebra fails validation: {}",
            v.report
                .first_failure()
                .map(|c| c.name.clone())
                .unwrap_or_default()
        ))
    })
}

fn load_presheaf(input: &str, budget: &Budget) -> Result<PresheafRef> {
    if std::path::Path::new(input).exists() {
        let text = std::fs::read_to_string(input).map_err(|e| Error::Io(e.to_string()))?;
        json::parse_presheaf(&text)
    } else {
        fixtures::presheaf_fixture(input, budget)
    }
}

fn emit_report<W: Write>(out: &mut W, rep: &ValidationReport, as_json: bool) {
    if as_json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({
                "schema": json::REPORT_SCHEMA,
                "report": rep,
            })
        );
    } else {
        let _ = write!(out, "{rep}");
    }
}

fn write_artifact<W: Write>(out: &mut W, opts: &Options, text: &str) -> Result<()> {
    match &opts.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Io(e.to_string()))?;
            let _ = writeln!(out, "wrote {path}");
            Ok(())
        }
        None => {
            let _ = write!(out, "{text}");
            Ok(())
        }
    }
}

fn code_of(rep: &ValidationReport) -> i32 {
    if rep.is_valid() {
        0
    } else {
        1
    }
}

pub fn run<W: Write>(args: &[String], out: &mut W) -> i32 {
    match dispatch(args, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "{e}");
            match e {
                Error::Resource(_) => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let (cmd, pos, opts) = parse_args(args)?;
    match cmd.as_str() {
        "" | "help" | "--help" => {
            let _ = write!(out, "{USAGE}");
            Ok(0)
        }
        "validate-algebra" => cmd_validate_algebra(&pos, &opts, out),
        "filters" => cmd_filters(&pos, &opts, out),
        "classify" => cmd_classify(&pos, &opts, out),
        "spectrum" => cmd_spectrum(&pos, &opts, out),
        "validate-presheaf" => cmd_validate_presheaf(&pos, &opts, out),
        "sheaf-check" => cmd_sheaf_check(&pos, &opts, out),
        "stalk" => cmd_stalk(&pos, &opts, out),
        "sheafify" => cmd_sheafify(&pos, &opts, out),
        "etale" => cmd_etale(&pos, &opts, out),
        "theorem" => cmd_theorem(&pos, &opts, out),
        "demo" => cmd_demo(&pos, &opts, out),
        other => Err(Error::Format(format!("unknown command '{other}'"))),
    }
}

fn one_input(pos: &[String]) -> Result<&str> {
    pos.first()
        .map(String::as_str)
        .ok_or_else(|| Error::Format("an input file or fixture name is required".into()))
}

fn cmd_validate_algebra<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let input = one_input(pos)?;
    // Re-run full validation even for fixtures so the report is shown.
    let rep = if std::path::Path::new(input).exists() {
        let text = std::fs::read_to_string(input).map_err(|e| Error::Io(e.to_string()))?;
        algebra::validate_residuated_lattice(&json::parse_algebra(&text)?)?.report
    } else {
        let a = fixtures::algebra_fixture(input).ok_or_else(|| {
            Error::Format(format!("'{input}' is neither a file nor a known fixture"))
        })?;
        algebra::revalidate(&a)
    };
    emit_report(out, &rep, opts.json);
    Ok(code_of(&rep))
}

fn cmd_filters<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let a = load_algebra(one_input(pos)?)?;
    let fl = spectra::enumerate_filters(&a, &opts.budget)?;
    if opts.json {
        let filters: Vec<Vec<String>> = fl
            .filters
            .iter()
            .map(|f| f.members.iter().map(|i| a.label(i).to_string()).collect())
            .collect();
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({
                "schema": json::REPORT_SCHEMA,
                "algebra": a.name,
                "filters": filters,
            })
        );
    } else {
        let _ = writeln!(out, "filters of {}:", a.name);
        for (i, f) in fl.filters.iter().enumerate() {
            let _ = writeln!(out, "  {} = {}", fl.name(i), f.label());
        }
    }
    if let Some(path) = &opts.out {
        std::fs::write(path, dot::filter_lattice_dot(&fl))
            .map_err(|e| Error::Io(e.to_string()))?;
        let _ = writeln!(out, "wrote {path}");
    }
    Ok(0)
}

fn cmd_classify<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let a = load_algebra(one_input(pos)?)?;
    let fl = spectra::enumerate_filters(&a, &opts.budget)?;
    let c = spectra::classify_filters(&fl);
    let names = |v: &[usize]| {
        v.iter()
            .map(|&i| fl.name(i))
            .collect::<Vec<_>>()
            .join(", ")
    };
    if opts.json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({
                "schema": json::REPORT_SCHEMA,
                "algebra": a.name,
                "prime": c.prime.iter().map(|&i| fl.name(i)).collect::<Vec<_>>(),
                "maximal": c.maximal.iter().map(|&i| fl.name(i)).collect::<Vec<_>>(),
                "minimal_prime": c.minimal_prime.iter().map(|&i| fl.name(i)).collect::<Vec<_>>(),
            })
        );
    } else {
        let _ = writeln!(out, "classification of {}:", a.name);
        let _ = writeln!(out, "  prime:         {}", names(&c.prime));
        let _ = writeln!(out, "  maximal:       {}", names(&c.maximal));
        let _ = writeln!(out, "  minimal prime: {}", names(&c.minimal_prime));
    }
    Ok(0)
}

fn spectrum_of(
    a: &AlgRef,
    kind_s: &str,
    carrier_s: &str,
    closed_basis: bool,
    budget: &Budget,
) -> Result<(spectra::FilterLattice, spectra::SpectrumSpace)> {
    let fl = spectra::enumerate_filters(a, budget)?;
    let c = spectra::classify_filters(&fl);
    let carrier = match carrier_s {
        "spec" => c.prime.clone(),
        "max" => c.maximal.clone(),
        "min" => c.minimal_prime.clone(),
        other => return Err(Error::Format(format!("unknown carrier '{other}'"))),
    };
    let kind = SpectrumKind::parse(kind_s)
        .ok_or_else(|| Error::Format(format!("unknown topology kind '{kind_s}'")))?;
    let sp = spectra::spectrum_topology(&fl, &c, &carrier, kind, closed_basis)?;
    Ok((fl, sp))
}

fn render_opens(sp: &spectra::SpectrumSpace, budget: &Budget) -> Result<Vec<String>> {
    Ok(sp
        .topology
        .opens(budget.opens)?
        .iter()
        .map(|o| sp.topology.set_label(o))
        .collect())
}

fn cmd_spectrum<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let a = load_algebra(one_input(pos)?)?;
    let kind = opts.kind.as_deref().unwrap_or("hull");
    let carrier = opts.carrier.as_deref().unwrap_or("spec");
    let (_fl, sp) = spectrum_of(&a, kind, carrier, opts.closed_basis, &opts.budget)?;
    let opens = render_opens(&sp, &opts.budget)?;
    if opts.json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({
                "schema": json::REPORT_SCHEMA,
                "algebra": a.name,
                "kind": kind,
                "carrier": carrier,
                "points": sp.topology.points,
                "opens": opens,
            })
        );
    } else {
        let _ = writeln!(
            out,
            "{}_{}({}) on points {{{}}}:",
            match carrier {
                "spec" => "Spec",
                "max" => "Max",
                _ => "Min",
            },
            &kind[..1],
            a.name,
            sp.topology.points.join(",")
        );
        for o in &opens {
            let _ = writeln!(out, "  {o}");
        }
    }
    if let Some(path) = &opts.out {
        std::fs::write(path, dot::topology_dot(&sp.topology))
            .map_err(|e| Error::Io(e.to_string()))?;
        let _ = writeln!(out, "wrote {path}");
    }
    Ok(0)
}

fn cmd_validate_presheaf<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let p = load_presheaf(one_input(pos)?, &opts.budget)?;
    let rep = presheaf::validate_presheaf(&p);
    emit_report(out, &rep, opts.json);
    Ok(code_of(&rep))
}

fn cmd_sheaf_check<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let p = load_presheaf(one_input(pos)?, &opts.budget)?;
    let vrep = presheaf::validate_presheaf(&p);
    if !vrep.is_valid() {
        emit_report(out, &vrep, opts.json);
        return Ok(1);
    }
    let rep = presheaf::is_sheaf(&p, opts.mode, &opts.budget)?;
    if opts.json {
        let failures: Vec<String> = rep
            .failures
            .iter()
            .map(|f| match f {
                presheaf::SheafFailure::Separation { open, s, t, .. } => format!(
                    "separation at {}: {} vs {}",
                    p.open_label(*open),
                    p.values[*open].label(*s),
                    p.values[*open].label(*t)
                ),
                presheaf::SheafFailure::Gluing(fam) => format!(
                    "gluing at {}: family over {} members",
                    p.open_label(fam.open),
                    fam.cover.len()
                ),
            })
            .collect();
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({
                "schema": json::REPORT_SCHEMA,
                "presheaf": p.name,
                "mode": format!("{:?}", rep.mode),
                "is_sheaf": rep.is_sheaf,
                "covers_checked": rep.covers_checked,
                "failures": failures,
            })
        );
    } else {
        let _ = write!(out, "{}", rep.render(&p));
    }
    Ok(if rep.is_sheaf { 0 } else { 1 })
}

fn cmd_stalk<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let p = load_presheaf(one_input(pos)?, &opts.budget)?;
    let point_label = opts
        .point
        .as_deref()
        .ok_or_else(|| Error::Format("--point is required".into()))?;
    let x = p
        .base
        .point_index(point_label)
        .ok_or_else(|| Error::Format(format!("unknown point '{point_label}'")))?;
    let st = colimit::stalk(&p, x, &opts.budget)?;
    if opts.json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(&json::stalk_to_json(&p, &st)).unwrap()
        );
    } else {
        let _ = writeln!(
            out,
            "stalk of '{}' at {}: {} classes (minimal open {})",
            p.name,
            point_label,
            st.algebra.n(),
            p.open_label(st.min_open)
        );
        let _ = writeln!(
            out,
            "  colimit route agrees: {} classes, isomorphic",
            st.colimit.algebra.n()
        );
    }
    Ok(0)
}

fn cmd_sheafify<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let p = load_presheaf(one_input(pos)?, &opts.budget)?;
    let vrep = presheaf::validate_presheaf(&p);
    if !vrep.is_valid() {
        emit_report(out, &vrep, opts.json);
        return Ok(1);
    }
    let sf = sheafify::sheafification(&p, &opts.budget)?;
    if opts.json {
        let values: Vec<serde_json::Value> = (0..sf.plus.opens.len())
            .map(|u| {
                serde_json::json!({
                    "open": json::open_key(&sf.plus.base, &sf.plus.opens[u]),
                    "size": sf.plus.values[u].n(),
                    "iota": sf.iota.components[u],
                })
            })
            .collect();
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({
                "schema": json::REPORT_SCHEMA,
                "presheaf": p.name,
                "plus": sf.plus.name,
                "iota_is_isomorphism": sf.iota.is_isomorphism(),
                "values": values,
            })
        );
    } else {
        let _ = writeln!(out, "sheafification of '{}':", p.name);
        for u in 0..sf.plus.opens.len() {
            let _ = writeln!(
                out,
                "  {}: {} -> {} sections",
                p.open_label(u),
                p.values[u].n(),
                sf.plus.values[u].n()
            );
        }
        let _ = writeln!(
            out,
            "  universal morphism is {}an isomorphism",
            if sf.iota.is_isomorphism() { "" } else { "NOT " }
        );
        let _ = write!(out, "{}", sf.validation);
    }
    Ok(code_of(&sf.validation))
}

fn cmd_etale<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let p = load_presheaf(one_input(pos)?, &opts.budget)?;
    let et = sheafify::etale_of_presheaf(&p, &opts.budget)?;
    let _ = writeln!(
        out,
        "stalk space of '{}': {} total points over {} base points",
        p.name,
        et.space.total.n(),
        et.space.base.n()
    );
    emit_report(out, &et.validation, opts.json);
    if opts.json {
        // Dump the sections over every base open.
        for u in &et.space.base.opens(opts.budget.opens)? {
            let secs = crate::etale::sections(&et.space, u, &opts.budget)?;
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string(&json::sections_to_json(&et.space, u, &secs)).unwrap()
            );
        }
    }
    if opts.export.as_deref() == Some("dot") {
        let basis: Vec<(String, Vec<usize>)> = et
            .basis
            .iter()
            .map(|(u, s, im)| {
                (
                    format!(
                        "{}:{}",
                        json::open_key(&p.base, &p.opens[*u]),
                        p.values[*u].label(*s)
                    ),
                    im.indices(),
                )
            })
            .collect();
        write_artifact(out, opts, &dot::etale_dot(&et.space, &basis))?;
    }
    Ok(code_of(&et.validation))
}

fn cmd_theorem<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let id = pos
        .first()
        .map(String::as_str)
        .ok_or_else(|| Error::Format("a theorem id is required".into()))?;
    let budget = &opts.budget;
    let mut passed = 0usize;
    let mut failed = 0usize;
    let mut not_checked = 0usize;
    let mut reports: Vec<functors::TheoremReport> = Vec::new();
    match id {
        "equalizer" => {
            // Strict-mode separation+gluing must match the equalizer diagram
            // on every (open, cover) of seeded random presheaves.
            let mut rng = SplitMix64::new(opts.seed);
            for i in 0..opts.count {
                let p = generate::random_presheaf(&mut rng, budget)?;
                let mut rep = functors::TheoremReport {
                    theorem: "sheaf condition = equalizer diagram".into(),
                    instance: format!("random presheaf {i} over {} points", p.base.n()),
                    passed: true,
                    witnesses: vec![],
                    budget_notes: vec![],
                };
                'open_loop: for open in 0..p.opens.len() {
                    let covers = open_covers(&p.base, &p.opens[open], CoverMode::Strict, budget)?;
                    for cover_sets in covers {
                        let cover: Vec<usize> = cover_sets
                            .iter()
                            .map(|o| p.open_index(o).unwrap())
                            .collect();
                        let sep = presheaf::check_separation(&p, open, &cover, CoverMode::Strict);
                        let glue =
                            presheaf::check_gluing(&p, open, &cover, CoverMode::Strict, budget)?;
                        let eq = presheaf::check_equalizer(&p, open, &cover, budget)?;
                        if eq.holds != (sep.holds && glue.holds) {
                            rep.passed = false;
                            rep.witnesses.push(format!(
                                "open {} cover of {} members: equalizer={} but separation={}, gluing={}",
                                p.open_label(open),
                                cover.len(),
                                eq.holds,
                                sep.holds,
                                glue.holds
                            ));
                            break 'open_loop;
                        }
                    }
                }
                reports.push(rep);
            }
        }
        "reflection" => {
            for (name, p) in fixtures::builtin_presheaf_fixtures(2, budget)? {
                let sf = sheafify::sheafification(&p, budget)?;
                let rep = functors::check_reflection(&p, &sf.plus, &sf.iota, budget)?;
                reports.push(functors::TheoremReport {
                    instance: format!("{name}: universal morphism"),
                    ..rep
                });
            }
        }
        "equivalence" => {
            for (name, p) in fixtures::builtin_presheaf_fixtures(2, budget)? {
                let et = sheafify::etale_of_presheaf(&p, budget)?;
                let rep = functors::check_equivalence(
                    &EquivalenceInstance {
                        space: &et.space,
                        morphisms: vec![],
                    },
                    budget,
                )?;
                reports.push(functors::TheoremReport {
                    instance: format!("stalk space of {name}"),
                    ..rep
                });
            }
        }
        "subcategory" => {
            let spaces: Vec<EtaleSpace> = fixtures::builtin_presheaf_fixtures(2, budget)?
                .into_iter()
                .map(|(_, p)| sheafify::etale_of_presheaf(&p, budget).map(|e| e.space))
                .collect::<Result<_>>()?;
            let refs: Vec<&EtaleSpace> = spaces.iter().collect();
            let composable: Vec<(usize, usize, usize, Vec<usize>, Vec<usize>)> = (0..refs.len())
                .map(|i| {
                    let id: Vec<usize> = (0..refs[i].total.n()).collect();
                    (i, i, i, id.clone(), id)
                })
                .collect();
            reports.push(functors::check_subcategory(&refs, &composable, budget)?);
        }
        other => return Err(Error::Format(format!("unknown theorem id '{other}'"))),
    }
    for r in &reports {
        if !r.budget_notes.is_empty() {
            not_checked += 1;
        }
        if r.passed {
            passed += 1;
        } else {
            failed += 1;
        }
        if !opts.json {
            let _ = write!(out, "{}", r.render());
        }
    }
    if opts.json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::json!({
                "schema": json::REPORT_SCHEMA,
                "theorem": id,
                "passed": passed,
                "failed": failed,
                "not_checked": not_checked,
                "reports": reports,
            })
        );
    } else {
        let _ = writeln!(
            out,
            "theorem {id}: {passed} passed, {failed} failed, {not_checked} with unchecked parts"
        );
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// Demos

fn cmd_demo<W: Write>(pos: &[String], opts: &Options, out: &mut W) -> Result<i32> {
    let id = pos
        .first()
        .map(String::as_str)
        .ok_or_else(|| Error::Format("a demo id is required".into()))?;
    match id {
        "a4" | "a6" | "a8" => demo_algebra(id, opts, out),
        "lukas" => {
            let a = algebra::lukasiewicz_chain(opts.chain);
            let rep = algebra::revalidate(&a);
            emit_report(out, &rep, opts.json);
            Ok(code_of(&rep))
        }
        "filterexa" => {
            for name in ["a4", "a6", "a8"] {
                cmd_filters(&[name.to_string()], opts, out)?;
            }
            Ok(0)
        }
        "maxminex" => {
            for name in ["a4", "a6", "a8"] {
                cmd_classify(&[name.to_string()], opts, out)?;
            }
            Ok(0)
        }
        "spectrumofex" => demo_spectrumofex(opts, out),
        "mora6a4" => demo_mora6a4(opts, out),
        "prsresexa4" | "prsresexa6" | "prsresexa8" => demo_prsres(id, opts, out),
        "sirpshe" | "sirppresheaf" => demo_sirpshe(opts, out),
        "exsheanot" => demo_exsheanot(opts, out),
        "exsirsheanot" => demo_exsirsheanot(opts, out),
        "onepointshe" | "skyscraperpre" => demo_onepointshe(opts, out),
        "stalkgermex" => demo_stalkgermex(opts, out),
        "sheafify" => cmd_sheafify(&["constant(a4,discrete2)".to_string()], opts, out),
        "equivalence" => cmd_theorem(&["equivalence".to_string()], opts, out),
        "reflection" => cmd_theorem(&["reflection".to_string()], opts, out),
        other => Err(Error::Format(format!("unknown demo id '{other}'"))),
    }
}

fn demo_algebra<W: Write>(name: &str, opts: &Options, out: &mut W) -> Result<i32> {
    let code = cmd_validate_algebra(&[name.to_string()], opts, out)?;
    cmd_filters(&[name.to_string()], opts, out)?;
    cmd_classify(&[name.to_string()], opts, out)?;
    Ok(code)
}

fn demo_spectrumofex<W: Write>(opts: &Options, out: &mut W) -> Result<i32> {
    let budget = &opts.budget;
    let _ = writeln!(out, "reference spectra:");
    for (alg, kind, carrier) in [("a4", "hull", "spec"), ("a6", "dual", "max")] {
        let a = load_algebra(alg)?;
        let (_, sp) = spectrum_of(&a, kind, carrier, false, budget)?;
        let opens = render_opens(&sp, budget)?;
        let _ = writeln!(out, "  {}_{}({}): {}", carrier, &kind[..1], a.name, opens.join(" "));
    }
    // The reference minimal-spectrum family of A8 does not match
    // either candidate carrier; print all three computed families.
    let a8 = load_algebra("a8")?;
    let (_, min_patch) = spectrum_of(&a8, "patch", "min", false, budget)?;
    let (_, spec_patch) = spectrum_of(&a8, "patch", "spec", false, budget)?;
    let (_, spec_dual) = spectrum_of(&a8, "dual", "spec", false, budget)?;
    let _ = writeln!(out, "erratum note for the reference minimal-spectrum family of A8:");
    let _ = writeln!(
        out,
        "  reference:              {{}} {{F3}} {{F4}} {{F3,F4}} {{F2,F3,F4}}"
    );
    let _ = writeln!(
        out,
        "  patch on Min = {{F3,F4}}:  {}",
        render_opens(&min_patch, budget)?.join(" ")
    );
    let _ = writeln!(
        out,
        "  patch on Spec:          {}",
        render_opens(&spec_patch, budget)?.join(" ")
    );
    let _ = writeln!(
        out,
        "  dual on Spec:           {}  <- matches the reference family",
        render_opens(&spec_dual, budget)?.join(" ")
    );
    let _ = writeln!(
        out,
        "  neither candidate carrier yields the reference family under the patch topology;"
    );
    let _ = writeln!(
        out,
        "  it coincides with the dual hull-kernel topology on the full prime spectrum."
    );
    Ok(0)
}

fn demo_mora6a4<W: Write>(opts: &Options, out: &mut W) -> Result<i32> {
    let f = fixtures::mora6a4();
    let chk = algebra::check_morphism(&f);
    emit_report(out, &chk.report, opts.json);
    let _ = writeln!(
        out,
        "coker = {}, injective = {}",
        crate::algebra::FilterSubset::new(f.src.clone(), chk.coker.clone()).label(),
        chk.injective
    );
    Ok(code_of(&chk.report))
}

fn demo_prsres<W: Write>(id: &str, opts: &Options, out: &mut W) -> Result<i32> {
    let budget = &opts.budget;
    let (alg_name, kind, carrier) = match id {
        "prsresexa4" => ("a4", "hull", "spec"),
        "prsresexa6" => ("a6", "dual", "max"),
        _ => ("a8", "dual", "spec"),
    };
    cmd_filters(&[alg_name.to_string()], opts, out)?;
    let a = load_algebra(alg_name)?;
    let (_, sp) = spectrum_of(&a, kind, carrier, false, budget)?;
    let _ = writeln!(
        out,
        "base opens: {}",
        render_opens(&sp, budget)?.join(" ")
    );
    let p = fixtures::presheaf_fixture(id, budget)?;
    let rep = presheaf::validate_presheaf(&p);
    emit_report(out, &rep, opts.json);
    for u in 0..p.opens.len() {
        let _ = writeln!(
            out,
            "  value on {}: {} ({} elements)",
            p.open_label(u),
            p.values[u].name,
            p.values[u].n()
        );
    }
    if id == "prsresexa6" {
        let _ = writeln!(
            out,
            "erratum note: the reference global value is the quotient by F1, but the"
        );
        let _ = writeln!(
            out,
            "intersection convention gives F2 n F3 = F4; this fixture uses the convention."
        );
    }
    let sheaf = presheaf::is_sheaf(&p, opts.mode, budget)?;
    let _ = write!(out, "{}", sheaf.render(&p));
    Ok(if rep.is_valid() { 0 } else { 1 })
}

fn demo_sirpshe<W: Write>(opts: &Options, out: &mut W) -> Result<i32> {
    let budget = &opts.budget;
    let p = presheaf::sierpinski_fuzzy_presheaf(opts.chain, budget)?;
    let rep = presheaf::validate_presheaf(&p);
    emit_report(out, &rep, opts.json);
    let sheaf = presheaf::is_sheaf(&p, opts.mode, budget)?;
    let _ = write!(out, "{}", sheaf.render(&p));
    Ok(if rep.is_valid() && sheaf.is_sheaf { 0 } else { 1 })
}

fn demo_exsheanot<W: Write>(opts: &Options, out: &mut W) -> Result<i32> {
    let budget = &opts.budget;
    let p = presheaf::constant_presheaf(fixtures::discrete2(), &fixtures::a4(), budget)?;
    let _ = writeln!(
        out,
        "constant presheaf over a two-point discrete base: gluing must fail"
    );
    let paper = presheaf::is_sheaf(&p, CoverMode::Paper, budget)?;
    let _ = write!(out, "{}", paper.render(&p));
    let strict = presheaf::is_sheaf(&p, CoverMode::Strict, budget)?;
    let _ = write!(out, "{}", strict.render(&p));
    let _ = writeln!(
        out,
        "mode note: with empty overlaps included (strict), the failing families above"
    );
    let _ = writeln!(
        out,
        "are not even compatible; the separation failure moves to the empty cover."
    );
    // This demo reproduces a failure example: exit 1 with the witnesses.
    Ok(if paper.is_sheaf { 0 } else { 1 })
}

fn demo_exsirsheanot<W: Write>(opts: &Options, out: &mut W) -> Result<i32> {
    let budget = &opts.budget;
    let p = presheaf::sierpinski_modified_presheaf(opts.chain, budget)?;
    let rep = presheaf::validate_presheaf(&p);
    emit_report(out, &rep, opts.json);
    let _ = writeln!(
        out,
        "erratum note: forcing the second coordinate to zero breaks implication"
    );
    let _ = writeln!(
        out,
        "preservation, so this is not a presheaf of residuated lattices at all;"
    );
    let _ = writeln!(
        out,
        "it ships as a deliberately invalid fixture for validator diagnostics."
    );
    Ok(code_of(&rep))
}

fn demo_onepointshe<W: Write>(opts: &Options, out: &mut W) -> Result<i32> {
    let budget = &opts.budget;
    let mut all_ok = true;
    for (name, p) in [
        (
            "one-point presheaf of A4",
            presheaf::one_point_presheaf(&fixtures::a4(), budget)?,
        ),
        (
            "skyscraper at y over the Sierpinski space",
            presheaf::skyscraper_presheaf(fixtures::sierpinski(), 1, &fixtures::a4(), budget)?,
        ),
    ] {
        for mode in [CoverMode::Strict, CoverMode::Paper] {
            let rep = presheaf::is_sheaf(&p, mode, budget)?;
            let _ = writeln!(
                out,
                "{name} ({mode:?}): {}",
                if rep.is_sheaf { "sheaf" } else { "NOT a sheaf" }
            );
            all_ok &= rep.is_sheaf;
        }
    }
    Ok(if all_ok { 0 } else { 1 })
}

fn demo_stalkgermex<W: Write>(opts: &Options, out: &mut W) -> Result<i32> {
    let budget = &opts.budget;
    let p = presheaf::sierpinski_fuzzy_presheaf(opts.chain, budget)?;
    for (x, label) in [(0usize, "x"), (1, "y")] {
        let st = colimit::stalk(&p, x, budget)?;
        let _ = writeln!(
            out,
            "stalk at {label}: {} classes (chain resolution {})",
            st.algebra.n(),
            opts.chain
        );
    }
    let _ = writeln!(
        out,
        "the stalk at x keeps only the first coordinate; the stalk at y keeps both."
    );
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(
            &args.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            &mut buf,
        );
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn validate_algebra_fixture_passes() {
        let (code, text) = run_str(&["validate-algebra", "a4"]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("valid"));
    }

    #[test]
    fn unknown_input_is_exit_2() {
        let (code, _) = run_str(&["validate-algebra", "definitely-not-a-fixture"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn filters_table_lists_f_names() {
        let (code, text) = run_str(&["filters", "a6"]);
        assert_eq!(code, 0);
        assert!(text.contains("F1 = {1}"));
        assert!(text.contains("F2 = {a,b,d,1}"));
    }

    #[test]
    fn sheaf_check_paper_mode_fails_on_the_constant_presheaf() {
        let (code, text) = run_str(&[
            "sheaf-check",
            "--mode",
            "paper",
            "constant(a4,discrete2)",
        ]);
        assert_eq!(code, 1, "{text}");
        assert!(text.contains("gluing fails"));
    }

    #[test]
    fn validate_presheaf_rejects_the_modified_fixture() {
        let (code, text) = run_str(&["validate-presheaf", "sierpinski_modified(2)"]);
        assert_eq!(code, 1);
        assert!(text.contains("preserves ->"), "{text}");
    }

    #[test]
    fn demo_prsresexa4_runs_end_to_end() {
        let (code, text) = run_str(&["demo", "prsresexa4"]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("F2 = {a,1}"));
        assert!(text.contains("sheaf"));
    }

    #[test]
    fn demo_exsheanot_exits_one_with_witness() {
        let (code, text) = run_str(&["demo", "exsheanot"]);
        assert_eq!(code, 1);
        assert!(text.contains("gluing fails"));
    }

    #[test]
    fn stalk_command_reports_both_routes() {
        let (code, text) = run_str(&[
            "stalk",
            "--point",
            "y",
            "--chain",
            "2",
            "sierpinski_fuzzy(2)",
        ]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("9 classes"));
        assert!(text.contains("colimit route agrees"));
    }

    #[test]
    fn deterministic_output() {
        let a = run_str(&["demo", "spectrumofex"]);
        let b = run_str(&["demo", "spectrumofex"]);
        assert_eq!(a, b);
        assert_eq!(a.0, 0);
        assert!(a.1.contains("erratum note"));
    }

    #[test]
    fn theorem_equalizer_small_run() {
        let (code, text) = run_str(&["theorem", "equalizer", "--count", "5", "--seed", "7"]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("5 passed"));
    }
}
