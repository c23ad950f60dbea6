//! `twistcalc` — command-line front end.
//!
//! Exit codes: 0 success / accepted, 1 check failure, 2 malformed input.
//! Output is deterministic in both text and JSON mode.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twistcalc::atlas::NamedRelation;
use twistcalc::fibration::{self, Factorization, FibInvariants, Obstruction, SectionReport};
use twistcalc::homology;
use twistcalc::pi1::{verify_section_relation, TwistTable};
use twistcalc::relation::{
    check_script, search_elementary_path, verify_shipped_scripts, DerivationScript, ScriptReport, SearchBudget,
    SearchError, StepContext,
};
use twistcalc::word::DefinitionSet;
use twistcalc::{CurveAtlas, DerivationStep, TwistWord};

#[derive(Parser)]
#[command(name = "twistcalc", version, about = "Check Dehn-twist relations and derivation scripts")]
struct Cli {
    /// Curve atlas (JSON).
    #[arg(long, global = true, default_value = "data/atlas.json")]
    atlas: PathBuf,
    /// Directory holding `*.script.json` files (defaults to the atlas's directory).
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Maximum number of states explored by `search`.
    #[arg(long, global = true, default_value_t = SearchBudget::default().max_states)]
    budget_states: usize,
    /// Maximum search depth for `search`.
    #[arg(long, global = true, default_value_t = SearchBudget::default().max_depth)]
    budget_depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the atlas: shapes, boundary facts, intersection parity,
    /// relations on homology, renamings and pi_1 tables.
    ValidateAtlas,
    /// Check one derivation script.
    Check { script: PathBuf },
    /// Check every shipped script and every derived relation.
    CheckAll,
    /// Find Commute/Braid/Cancel steps rewriting one word into another.
    Search {
        from: String,
        to: String,
        #[arg(long)]
        model: String,
    },
    /// Homology action of a word (capped to the closed surface with --capped).
    Homology {
        word: String,
        #[arg(long)]
        model: String,
        #[arg(long)]
        capped: bool,
    },
    /// Compare a script's final word with the boundary multitwist on pi_1.
    Pi1Verify { script: PathBuf },
    /// Lefschetz fibration invariants of a positive word.
    Invariants {
        word: String,
        #[arg(long)]
        model: String,
        /// Number of known disjoint (-1)-sections.
        #[arg(long, default_value_t = 0)]
        sections: usize,
    },
    /// Fiber sum of p copies of A, q of B and r of C with one sewn section.
    Fibersum {
        p: usize,
        q: usize,
        r: usize,
        /// Closed model carrying the three summand relations.
        #[arg(long, default_value = "S2")]
        closed: String,
    },
    /// Blow-down test: can CP2 # k(-CP2) carry m disjoint (-1)-sections?
    Obstruction { m: u64, k: u64 },
}

/// Failure categories mapped onto exit codes.
enum Fail {
    Check(String),
    Input(String),
}

impl Fail {
    fn code(&self) -> ExitCode {
        match self {
            Fail::Check(_) => ExitCode::from(1),
            Fail::Input(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Check(m) | Fail::Input(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Fail {
    Fail::Input(e.to_string())
}

struct Env {
    atlas: CurveAtlas,
    data: PathBuf,
    format: Format,
    budget: SearchBudget,
}

impl Env {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) {
        let out = match self.format {
            Format::Json => serde_json::to_string_pretty(value).expect("serializable output") + "\n",
            Format::Text => text(),
        };
        // A closed pipe (e.g. `| head`) is not an error worth reporting.
        let _ = std::io::stdout().lock().write_all(out.as_bytes());
    }

    fn scripts(&self) -> Result<Vec<DerivationScript>, Fail> {
        DerivationScript::load_dir(&self.data).map_err(input)
    }
}

fn word(s: &str) -> Result<TwistWord, Fail> {
    s.parse().map_err(|e| Fail::Input(format!("`{s}`: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let data = cli
        .data
        .clone()
        .unwrap_or_else(|| cli.atlas.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")));
    let atlas = match CurveAtlas::load(&cli.atlas) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let env = Env {
        atlas,
        data,
        format: cli.format,
        budget: SearchBudget { max_states: cli.budget_states, max_depth: cli.budget_depth },
    };
    let result = match cli.command {
        Command::ValidateAtlas => validate_atlas(&env),
        Command::Check { script } => check(&env, &script),
        Command::CheckAll => check_all(&env),
        Command::Search { from, to, model } => search(&env, &from, &to, &model),
        Command::Homology { word, model, capped } => homology_cmd(&env, &word, &model, capped),
        Command::Pi1Verify { script } => pi1_verify(&env, &script),
        Command::Invariants { word, model, sections } => invariants_cmd(&env, &word, &model, sections),
        Command::Fibersum { p, q, r, closed } => fibersum(&env, p, q, r, &closed),
        Command::Obstruction { m, k } => obstruction(&env, m, k),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn validate_atlas(env: &Env) -> Result<(), Fail> {
    let report = env.atlas.validate();
    let lines: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    env.emit(&serde_json::json!({ "ok": report.is_ok(), "violations": lines }), || {
        let mut s: String = lines.iter().map(|l| format!("violation: {l}\n")).collect();
        s += &format!("{} violation(s)\n", lines.len());
        s
    });
    if report.is_ok() {
        Ok(())
    } else {
        Err(Fail::Check(format!("{} atlas violation(s)", lines.len())))
    }
}

#[derive(Serialize)]
struct ReportOut {
    name: String,
    model: String,
    accepted: bool,
    steps: usize,
    failing_step: Option<usize>,
    failure: Option<String>,
    final_len: usize,
    all_positive: bool,
    no_boundary: bool,
    homology_identity: Option<bool>,
    capped_identity: Option<bool>,
    section_relation: bool,
}

impl From<&ScriptReport> for ReportOut {
    fn from(r: &ScriptReport) -> Self {
        ReportOut {
            name: r.name.clone(),
            model: r.model.clone(),
            accepted: r.accepted(),
            steps: r.steps,
            failing_step: r.failure.as_ref().map(|f| f.index),
            failure: r.failure.as_ref().map(ToString::to_string),
            final_len: r.final_len,
            all_positive: r.all_positive,
            no_boundary: r.no_boundary,
            homology_identity: r.homology_identity,
            capped_identity: r.capped_identity,
            section_relation: r.is_section_relation(),
        }
    }
}

fn report_line(r: &ReportOut) -> String {
    let status = if r.accepted { "accept" } else { "reject" };
    let mut s = format!(
        "{} [{}] {status}: {} steps, final length {}, positive={}, non-boundary={}, H1 identity={}, capped identity={}",
        r.name,
        r.model,
        r.steps,
        r.final_len,
        r.all_positive,
        r.no_boundary,
        fmt_opt(r.homology_identity),
        fmt_opt(r.capped_identity),
    );
    if let Some(f) = &r.failure {
        s += &format!("\n  {f}");
    }
    s + "\n"
}

fn fmt_opt(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_else(|| "n/a".into())
}

fn load_script(path: &Path) -> Result<DerivationScript, Fail> {
    DerivationScript::load(path).map_err(input)
}

fn check(env: &Env, path: &Path) -> Result<(), Fail> {
    let script = load_script(path)?;
    let report = check_script(&env.atlas, &script);
    let out = ReportOut::from(&report);
    env.emit(&out, || report_line(&out));
    match &report.failure {
        None => Ok(()),
        Some(f) => Err(Fail::Check(format!("{} rejected at step {}", script.name, f.index))),
    }
}

fn check_all(env: &Env) -> Result<(), Fail> {
    let scripts = env.scripts()?;
    let summary = verify_shipped_scripts(&env.atlas, &scripts);
    let reports: Vec<ReportOut> = summary.reports.iter().map(ReportOut::from).collect();
    let derived: Vec<serde_json::Value> = summary
        .derived
        .iter()
        .map(|(id, r)| serde_json::json!({ "relation": id, "ok": r.is_ok(), "error": r.as_ref().err() }))
        .collect();
    let accepted = reports.iter().filter(|r| r.accepted).count();
    env.emit(&serde_json::json!({ "scripts": reports, "derived_relations": derived, "all_ok": summary.all_ok() }), || {
        let mut s: String = reports.iter().map(report_line).collect();
        for (id, r) in &summary.derived {
            match r {
                Ok(()) => s += &format!("derived relation {id}: ok\n"),
                Err(e) => s += &format!("derived relation {id}: FAILED: {e}\n"),
            }
        }
        s += &format!("{accepted}/{} scripts accepted\n", reports.len());
        s
    });
    if summary.all_ok() {
        Ok(())
    } else {
        Err(Fail::Check("not every script is an accepted section relation".into()))
    }
}

fn search(env: &Env, from: &str, to: &str, model: &str) -> Result<(), Fail> {
    env.atlas.model(model).map_err(input)?;
    let (from, to) = (word(from)?, word(to)?);
    let ctx = StepContext::new(&env.atlas, model, DefinitionSet::new());
    match search_elementary_path(&from, &to, &ctx, env.budget) {
        Ok(steps) => {
            env.emit(&steps, || steps_text(&from, &steps));
            Ok(())
        }
        Err(e @ SearchError::BudgetExhausted { .. }) => Err(Fail::Check(e.to_string())),
        Err(e) => Err(input(e)),
    }
}

fn steps_text(from: &TwistWord, steps: &[DerivationStep]) -> String {
    let mut s = format!("   {from}\n");
    for (i, st) in steps.iter().enumerate() {
        s += &format!("{i:>3} {}  ->  {}\n", st.rule, st.result);
    }
    s + &format!("{} step(s)\n", steps.len())
}

fn homology_cmd(env: &Env, w: &str, model: &str, capped: bool) -> Result<(), Fail> {
    let w = word(w)?;
    let m = homology::evaluate_checked(&env.atlas, model, &w).map_err(input)?;
    let m = if capped { homology::cap_matrix(env.atlas.model(model).map_err(input)?, &m) } else { m };
    let rows = m.rows();
    env.emit(&serde_json::json!({ "model": model, "capped": capped, "identity": m.is_identity(), "matrix": rows }), || {
        format!("{m}\nidentity: {}\n", m.is_identity())
    });
    Ok(())
}

/// Relations that rewrite uncovered curves into curves the table knows.
fn covering_relations<'a>(atlas: &'a CurveAtlas, table: &TwistTable) -> Vec<&'a NamedRelation> {
    atlas
        .relations()
        .filter(|r| r.model == table.model() && r.defs.is_empty() && !table.covers(&r.lhs) && table.covers(&r.rhs))
        .collect()
}

fn pi1_verify(env: &Env, path: &Path) -> Result<(), Fail> {
    let script = load_script(path)?;
    let report = check_script(&env.atlas, &script);
    if let Some(f) = report.failure {
        return Err(Fail::Check(format!("{} rejected at step {}", script.name, f.index)));
    }
    let table = env
        .atlas
        .pi1_table(&script.model)
        .ok_or_else(|| Fail::Input(format!("no pi_1 table for model `{}`", script.model)))?;
    let expanded = script.final_word.expand_definitions(&script.definitions()).map_err(input)?;
    let subs = covering_relations(&env.atlas, table);
    let equal = verify_section_relation(&env.atlas, table, &expanded, &subs).map_err(input)?;
    let used: Vec<&str> = subs.iter().map(|r| r.id.as_str()).collect();
    env.emit(&serde_json::json!({ "script": script.name, "model": script.model, "substitutions": used, "equal": equal }), || {
        format!(
            "{} [{}]: final word {} the boundary multitwist on pi_1 (substituted: {})\n",
            script.name,
            script.model,
            if equal { "equals" } else { "DIFFERS FROM" },
            if used.is_empty() { "none".to_string() } else { used.join(", ") }
        )
    });
    if equal {
        Ok(())
    } else {
        Err(Fail::Check("automorphisms differ".into()))
    }
}

fn invariants_text(inv: &FibInvariants) -> String {
    let mut s = format!(
        "singular fibers: {} ({} nonseparating, {} separating)\neuler characteristic: {}\nsignature: {}\n",
        inv.s, inv.n0, inv.s1, inv.euler, inv.signature
    );
    for fam in &inv.sections {
        s += &format!("sections: {} of square {}\n", fam.count, fam.square);
    }
    if let Some(h) = inv.total_space_hint {
        s += &format!("(euler, signature) of: {h}\n");
    }
    s
}

fn invariants_cmd(env: &Env, w: &str, model: &str, sections: usize) -> Result<(), Fail> {
    let f = Factorization::new(&env.atlas, model, word(w)?, vec![-1; sections]).map_err(input)?;
    let inv = fibration::invariants(&env.atlas, &f).map_err(input)?;
    env.emit(&inv, || invariants_text(&inv));
    Ok(())
}

/// Right side of the unique relation named `kind` on `model`.
fn relation_on<'a>(atlas: &'a CurveAtlas, model: &str, kind: &str) -> Result<&'a NamedRelation, Fail> {
    atlas
        .relation(&format!("{model}.{kind}"))
        .map_err(|_| Fail::Input(format!("model `{model}` has no `{kind}` relation")))
}

fn fibersum(env: &Env, p: usize, q: usize, r: usize, closed: &str) -> Result<(), Fail> {
    let rels = [
        relation_on(&env.atlas, closed, "hyperelliptic")?,
        relation_on(&env.atlas, closed, "chain5")?,
        relation_on(&env.atlas, closed, "chain4")?,
    ];
    // Known (-1)-sections: A from the accepted section scripts, B and C from
    // the bounded chain relations (one section per boundary twist).
    let scripts = env.scripts()?;
    let a_sections = scripts
        .iter()
        .filter(|s| check_script(&env.atlas, s).is_section_relation())
        .map(|s| fibration::sections_from_relation(s).len())
        .max()
        .unwrap_or(0);
    let bounded = |kind: &str| {
        env.atlas
            .relations()
            .filter(|rel| {
                rel.id.ends_with(&format!(".{kind}"))
                    && rel.model != closed
                    && rel.lhs.iter().all(|l| env.atlas.is_boundary(&rel.model, &l.curve))
            })
            .map(|rel| rel.lhs.len())
            .max()
            .unwrap_or(0)
    };
    let counts = [a_sections, bounded("chain5"), bounded("chain4")];
    let words = [&rels[0].rhs, &rels[1].rhs, &rels[2].rhs];
    let summands = fibration::standard_summands(&env.atlas, closed, words, counts).map_err(input)?;
    let report: SectionReport = fibration::sewn_section_report(&env.atlas, &summands, p, q, r).map_err(input)?;
    env.emit(&report, || {
        format!(
            "fiber sum {p}A + {q}B + {r}C (sections available: A {}, B {}, C {})\nsewn section square: {}\n{}direct recomputation: euler {}, signature {}\n",
            counts[0],
            counts[1],
            counts[2],
            report.section_square,
            invariants_text(&report.invariants),
            report.direct_euler,
            report.direct_signature
        )
    });
    Ok(())
}

fn obstruction(env: &Env, m: u64, k: u64) -> Result<(), Fail> {
    let o = fibration::max_sections_obstruction(m, k);
    let bound = fibration::section_bound(k);
    env.emit(&serde_json::json!({ "m": m, "k": k, "obstruction": o, "bound": bound }), || {
        format!(
            "{m} disjoint (-1)-sections on CP2 # {k}(-CP2): {}\nsection bound: {}\n",
            match o {
                Obstruction::Contradiction => "contradiction",
                Obstruction::Inconclusive => "inconclusive",
            },
            bound.map(|b| b.to_string()).unwrap_or_else(|| "none".into())
        )
    });
    Ok(())
}
