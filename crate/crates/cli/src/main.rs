use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use extmcg::ambient_geom::{self, GeomError, SignedPermMatrix};
use extmcg::classifier::{self, ClassifyError, GroupDescriptor, GroupName, KnotFamily, Realization};
use extmcg::f2_forms::{self, F2Error, QuadraticRefinement, SpElement, SymplecticSpaceF2};
use extmcg::sl2z::{self, GenWord, Mod2Class, SlError, UniModMat2};
use extmcg::smallgrp::{self, GroupError, MulTableGroup, Presentation};
use extmcg::verify;

/// Exact algebra for extendable mapping classes of standard knots.
#[derive(Parser)]
#[command(name = "extmcg", version)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Coset cap for Todd–Coxeter enumeration.
    #[arg(long, global = true, default_value_t = smallgrp::DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Arf invariant of a refinement: `[0,1]` or `{"gram": [[..]], "values": [..]}`.
    Arf { refinement: String },
    /// Isometries fixing a refinement.
    Stabilizer { refinement: String },
    /// Orbit of a refinement under all isometries.
    Orbit { refinement: String },
    /// The symplectic group Sp(2k, 2).
    EnumerateSp {
        #[arg(long)]
        k: usize,
        /// Print every element, not just the order.
        #[arg(long)]
        list: bool,
    },
    /// Membership in Γ_V(2) of `{"rows": [[a, b], [c, d]]}`.
    Member {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Class of a matrix mod 2: IdClass, VClass or Other.
    Mod2 {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Normal-form word in V and T for a member of Γ_V(2).
    Decompose {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
    /// Evaluate a word such as `V T^-2 V`.
    EvalWord {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Todd–Coxeter enumeration of `gens: a,b; rels: a^2, ...`.
    CosetEnum { presentation: String },
    /// Isomorphism test of two groups (presentations or names like `dihedral(8)`).
    Isomorphic { g: String, h: String },
    /// Ambient orthogonal matrix as sparse JSON or dense text.
    BuildOmega {
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = OmegaKind::Omega)]
        kind: OmegaKind,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Restriction to S^p × S^q and the induced action on H_p.
    InducedAction {
        matrix: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Classify the extendable mapping classes of a family.
    Classify(FamilyArgs),
    /// Short exact sequence recorded for a family.
    ExactSequence(FamilyArgs),
    /// Cross-module consistency checks for S^p × S^p.
    CrossValidate {
        #[arg(long)]
        p: u64,
    },
    /// Run the full verification suite.
    VerifyAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum OmegaKind {
    /// (a, b) ↦ (R(b), a)
    Omega,
    /// (a, b) ↦ (b, a), even p
    Hat,
    /// (a, b) ↦ (R(a), R(b)) on S^p × S^q, p < q
    Prime,
    /// (a, b) ↦ (R(a), R(b)) on S^p × S^p
    Double,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    UnknotSphere,
    EqualProduct,
    UnequalProduct,
    SubProduct,
}

#[derive(clap::Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
}

enum CliError {
    Parse(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<SlError> for CliError {
    fn from(e: SlError) -> Self {
        match e {
            SlError::Parse(_) => CliError::Parse(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<F2Error> for CliError {
    fn from(e: F2Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::Parse(_) => CliError::Parse(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Json(_) => CliError::Parse(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Json(_) => CliError::Parse(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Deserialize)]
#[serde(untagged)]
enum RefinementJson {
    Standard(Vec<u8>),
    General { gram: Vec<Vec<u8>>, values: Vec<u8> },
}

fn parse_refinement(text: &str) -> Result<QuadraticRefinement> {
    let raw: RefinementJson = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("refinement: {e}")))?;
    Ok(match raw {
        RefinementJson::Standard(values) => QuadraticRefinement::standard(&values)?,
        RefinementJson::General { gram, values } => {
            QuadraticRefinement::new(SymplecticSpaceF2::from_rows(&gram)?, &values)?
        }
    })
}

fn refinement_json(q: &QuadraticRefinement) -> Value {
    if q.space().is_standard() {
        json!(q.basis_values())
    } else {
        json!({ "gram": q.space().gram_rows(), "values": q.basis_values() })
    }
}

fn sp_json(s: &SpElement) -> Value {
    json!(s.rows())
}

fn rows_text(rows: &[Vec<u8>]) -> String {
    serde_json::to_string(rows).expect("serializable")
}

fn parse_group(text: &str, max_cosets: usize) -> Result<MulTableGroup> {
    let text = text.trim();
    if text.starts_with("gens:") {
        let p: Presentation = text.parse()?;
        return Ok(smallgrp::todd_coxeter(&p, max_cosets)?);
    }
    let arg = |name: &str| -> Option<Result<usize>> {
        let inner = text.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
        Some(inner.trim().parse().map_err(|_| CliError::Parse(format!("bad size in `{text}`"))))
    };
    if let Some(n) = arg("cyclic") {
        return Ok(smallgrp::cyclic(n?)?);
    }
    if let Some(n) = arg("dihedral") {
        return Ok(smallgrp::dihedral(n?)?);
    }
    match text {
        "klein" => return Ok(smallgrp::klein()),
        "quaternion" => return Ok(smallgrp::quaternion()),
        "trivial" => return Ok(smallgrp::trivial()),
        "model" | "e-even" => return Ok(smallgrp::build_e_even()),
        _ => {}
    }
    let name: GroupName = text
        .parse()
        .map_err(|_| CliError::Parse(format!("unknown group `{text}` (use a presentation or e.g. cyclic(4), dihedral(8), klein, quaternion, D8xZ2)")))?;
    match GroupDescriptor::new(name)?.realization {
        Realization::Table(g) => Ok(g),
        Realization::Presented(_) => Err(CliError::Domain(format!("{name} is infinite and has no table"))),
    }
}

fn family(args: &FamilyArgs) -> Result<KnotFamily> {
    let need = |v: Option<u64>, flag: &str| v.ok_or_else(|| CliError::Parse(format!("this family needs --{flag}")));
    Ok(match args.family {
        FamilyKind::UnknotSphere => KnotFamily::UnknotSphere { n: need(args.n, "n")? },
        FamilyKind::EqualProduct => KnotFamily::EqualProduct { p: need(args.p, "p")? },
        FamilyKind::UnequalProduct => KnotFamily::UnequalProduct { p: need(args.p, "p")?, q: need(args.q, "q")? },
        FamilyKind::SubProduct => KnotFamily::SubProduct { p: need(args.p, "p")? },
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Output text, and whether the command succeeded.
fn run(cli: &Cli) -> Result<(String, bool)> {
    let json = cli.json;
    let out = match &cli.command {
        Command::Arf { refinement } => {
            let q = parse_refinement(refinement)?;
            if json {
                pretty(&json!({ "refinement": refinement_json(&q), "arf": q.arf() }))
            } else {
                q.arf().to_string()
            }
        }
        Command::Stabilizer { refinement } => {
            let q = parse_refinement(refinement)?;
            let stab = f2_forms::stabilizer(&q)?;
            if json {
                pretty(&json!({ "order": stab.len(), "elements": stab.iter().map(sp_json).collect::<Vec<_>>() }))
            } else {
                let mut lines = vec![format!("order {}", stab.len())];
                lines.extend(stab.iter().map(|s| rows_text(&s.rows())));
                lines.join("\n")
            }
        }
        Command::Orbit { refinement } => {
            let q = parse_refinement(refinement)?;
            let orbit = f2_forms::orbit(&q)?;
            if json {
                pretty(&json!({ "size": orbit.len(), "arf": q.arf(), "refinements": orbit.iter().map(refinement_json).collect::<Vec<_>>() }))
            } else {
                let mut lines = vec![format!("size {}", orbit.len())];
                lines.extend(orbit.iter().map(|r| refinement_json(r).to_string()));
                lines.join("\n")
            }
        }
        Command::EnumerateSp { k, list } => {
            if *k == 0 || *k > f2_forms::MAX_ENUM_RANK {
                return Err(F2Error::UnsupportedRank { k: *k, max: f2_forms::MAX_ENUM_RANK }.into());
            }
            let order = f2_forms::sp_order(*k as u32).expect("small rank");
            let elements = if *list { Some(f2_forms::enumerate_sp(*k)?) } else { None };
            if json {
                let mut v = json!({ "k": k, "order": order as u64 });
                if let Some(els) = &elements {
                    v["elements"] = els.iter().map(sp_json).collect();
                }
                pretty(&v)
            } else {
                let mut lines = vec![format!("order {order}")];
                if let Some(els) = &elements {
                    lines.extend(els.iter().map(|s| rows_text(&s.rows())));
                }
                lines.join("\n")
            }
        }
        Command::Member { matrix } => {
            let m = UniModMat2::from_json(matrix)?;
            let member = sl2z::is_member(&m);
            if json {
                pretty(&json!({ "matrix": m.to_json(), "member": member }))
            } else {
                member.to_string()
            }
        }
        Command::Mod2 { matrix } => {
            let m = UniModMat2::from_json(matrix)?;
            let class: Mod2Class = sl2z::reduce_mod2(&m);
            if json {
                let r = m.mod2();
                pretty(&json!({ "class": class.to_string(), "reduced": [[r[0], r[1]], [r[2], r[3]]] }))
            } else {
                class.to_string()
            }
        }
        Command::Decompose { matrix } => {
            let m = UniModMat2::from_json(matrix)?;
            let w = sl2z::decompose(&m)?;
            if json {
                pretty(&json!({ "matrix": m.to_json(), "word": w.to_string() }))
            } else {
                w.to_string()
            }
        }
        Command::EvalWord { word } => {
            let w: GenWord = word.parse()?;
            let m = sl2z::eval_word(&w);
            if json {
                m.to_json().to_string()
            } else {
                m.to_string()
            }
        }
        Command::CosetEnum { presentation } => {
            let p: Presentation = presentation.parse()?;
            let table = smallgrp::enumerate_cosets(&p, cli.max_cosets)?;
            if json {
                pretty(&json!({
                    "order": table.len(),
                    "defined": table.defined,
                    "generators": p.generators(),
                    "actions": table.actions,
                }))
            } else {
                format!("order {}", table.len())
            }
        }
        Command::Isomorphic { g, h } => {
            let g = parse_group(g, cli.max_cosets)?;
            let h = parse_group(h, cli.max_cosets)?;
            let witness = smallgrp::find_isomorphism(&g, &h)?;
            if json {
                pretty(&json!({ "orders": [g.order(), h.order()], "isomorphic": witness.is_some(), "witness": witness }))
            } else {
                witness.is_some().to_string()
            }
        }
        Command::BuildOmega { p, kind, q } => {
            let m = match (kind, q) {
                (OmegaKind::Omega, None) => ambient_geom::build_omega(*p)?,
                (OmegaKind::Hat, None) => ambient_geom::build_omega_hat(*p)?,
                (OmegaKind::Double, None) => ambient_geom::build_double_reflection(*p)?,
                (OmegaKind::Prime, Some(q)) => ambient_geom::build_omega_prime(*p, *q)?,
                (OmegaKind::Prime, None) => return Err(CliError::Parse("--kind prime needs --q".into())),
                (_, Some(_)) => return Err(CliError::Parse("--q applies only to --kind prime".into())),
            };
            if json {
                m.to_json()
            } else {
                format!("{m}\ndet {}, order {}", m.det(), m.order(64).map_or("> 64".into(), |k| k.to_string()))
            }
        }
        Command::InducedAction { matrix, p, q } => {
            let m = SignedPermMatrix::from_json(matrix)?;
            let q = q.unwrap_or(*p);
            let d = ambient_geom::restrict_to_product(&m, *p, q)?;
            let action = ambient_geom::induced_homology_action(&d);
            if json {
                let action = action.ok().map(|a| a.0);
                pretty(&json!({ "descriptor": d, "action": action }))
            } else {
                let summary = format!(
                    "swaps factors: {}, block degrees: ({}, {})",
                    d.swaps_factors, d.first_block_det, d.second_block_det
                );
                match action {
                    Ok(a) => format!("{a}\n{summary}"),
                    Err(_) if d.p != d.q => summary,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Command::Classify(args) => {
            let r = classifier::classify(&family(args)?)?;
            if json {
                r.to_json()
            } else {
                r.to_string()
            }
        }
        Command::ExactSequence(args) => {
            let s = classifier::exact_sequence_report(&family(args)?)?;
            if json {
                let splits = match &s.splits {
                    classifier::Value::Known(b) => json!(b),
                    classifier::Value::Unknown(_) => Value::Null,
                };
                pretty(&json!({
                    "family": s.family,
                    "kernel": s.kernel,
                    "middle": s.middle,
                    "quotient": s.quotient,
                    "splits": splits,
                    "orders_consistent": s.orders_consistent(),
                    "citations": s.citations,
                    "notes": s.notes,
                }))
            } else {
                s.to_string()
            }
        }
        Command::CrossValidate { p } => {
            let report = classifier::cross_validate(&KnotFamily::EqualProduct { p: *p })?;
            let ok = report.passed();
            let text = if json {
                let checks: Vec<Value> = report
                    .checks
                    .iter()
                    .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                    .collect();
                pretty(&json!({ "passed": ok, "checks": checks }))
            } else {
                report
                    .checks
                    .iter()
                    .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            return Ok((text, ok));
        }
        Command::VerifyAll => {
            let checks = verify::run_all();
            let ok = checks.iter().all(|c| c.passed);
            let text = if json {
                let rows: Vec<Value> = checks
                    .iter()
                    .map(|c| json!({ "id": c.id, "name": c.name, "tag": c.tag, "passed": c.passed, "detail": c.detail }))
                    .collect();
                pretty(&json!({ "passed": ok, "checks": rows }))
            } else {
                checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("\n")
            };
            return Ok((text, ok));
        }
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, ok)) => {
            // a closed pipe (`| head`) is not an error worth a panic
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let (code, msg) = match &e {
                CliError::Parse(m) => (e.code(), m),
                CliError::Domain(m) => (e.code(), m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
