//! `folcat`: command-line front end.
//!
//! Exit codes: 0 success, 1 counterexample or law failure (with report),
//! 2 parse, validation or resource error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use folcat_core::category::{
    compose_str, declared_str_morphism, law_harness, validate_str_morphism, Alpha, CheckBounds, HarnessBounds,
    StrMorphism, Variant,
};
use folcat_core::examples::{self, parse_param, BUNDLES};
use folcat_core::morphism::LanguageMorphism;
use folcat_core::ominimal::{compile, decompose_unary_limited, QeError, QeLimits, Rational, Theory};
use folcat_core::parser::{
    formula_json, morphism_json, parse_formula, print_morphism, print_structure, structure_json, DocumentKind,
    Workspace,
};
use folcat_core::semantics::{check_transfer, definable_set, holds, reduct, Valuation};
use folcat_core::syntax::{enumerate_formulas, EnumBounds, Formula, Var};

#[derive(Parser)]
#[command(
    name = "folcat",
    version,
    about = "First-order languages, their morphisms and the category of structures"
)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Inputs {
    /// Extra documents loaded first, in order (signatures and the like).
    #[arg(short = 'f', long = "file")]
    files: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse documents and print them canonically.
    Parse { paths: Vec<PathBuf> },
    /// Translate a formula or term along a morphism.
    Translate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        morphism: PathBuf,
        /// Morphism name, when the file declares several.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        formula: String,
    },
    /// Reduct of a finite structure along a morphism.
    Reduct {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        morphism: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Evaluate a formula in a finite structure.
    Eval {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        formula: String,
        /// `xk=n`; without any, all satisfying valuations are listed.
        #[arg(long = "assign")]
        assign: Vec<String>,
    },
    /// Compare satisfaction in a reduct and in its parent on a formula corpus.
    CheckTransfer {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        morphism: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        /// Formulas to check; without any, the corpus is enumerated.
        #[arg(long)]
        formula: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        qdepth: usize,
    },
    /// Random checks of the category laws.
    CheckLaws {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value = "plain")]
        variant: String,
        #[arg(long, default_value_t = 4)]
        max_structure_size: usize,
        #[arg(long, default_value_t = 12)]
        max_formula_size: usize,
    },
    /// The set a unary formula defines over the rationals.
    Decompose {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        theory: String,
        #[arg(long)]
        formula: String,
        /// `xk=p/q`
        #[arg(long = "param")]
        params: Vec<String>,
        /// Morphism into the theory's language, extended with < if needed.
        #[arg(long)]
        morphism: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_atoms: usize,
        #[arg(long, default_value_t = 3)]
        max_quantifiers: usize,
    },
    /// Run the bundled examples and compare with their expected output.
    RunExamples {
        name: Option<String>,
        /// Rewrite the expected output in the source tree.
        #[arg(long)]
        bless: bool,
    },
    /// Check a language morphism against the assignment rules, or a
    /// structure morphism against a variant.
    ValidateMorphism {
        #[command(flatten)]
        inputs: Inputs,
        path: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value = "plain")]
        variant: String,
    },
    /// Compose two declared structure morphisms, `second * first`.
    StrCompose {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long, default_value = "plain")]
        variant: String,
    },
}

enum Failure {
    Found,
    Error(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, text: &str, value: Value) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("json values serialize")
            );
        } else {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
}

/// A workspace that remembers which files it has read, so a file named
/// twice (say with `-f` and `--morphism`) is loaded once.
struct Loader {
    ws: Workspace,
    seen: BTreeMap<PathBuf, Vec<(DocumentKind, String)>>,
}

impl Loader {
    fn new(inputs: &Inputs) -> Result<Loader, Failure> {
        let mut l = Loader {
            ws: Workspace::new(),
            seen: BTreeMap::new(),
        };
        for f in &inputs.files {
            l.load(f)?;
        }
        Ok(l)
    }

    fn load(&mut self, path: &Path) -> Result<Vec<(DocumentKind, String)>, Failure> {
        let key = std::fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
        if let Some(docs) = self.seen.get(&key) {
            return Ok(docs.clone());
        }
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
        let before = self.ws.documents().len();
        self.ws
            .load(&text)
            .map_err(|e| Failure::Error(format!("{}:{e}", path.display())))?;
        let docs = self.ws.documents()[before..].to_vec();
        self.seen.insert(key, docs.clone());
        Ok(docs)
    }

    fn morphism(&mut self, path: &Path, name: Option<&str>) -> Result<(String, LanguageMorphism), Failure> {
        let docs = self.load(path)?;
        let n = pick(&docs, DocumentKind::Morphism, name, path)?;
        let h = self.ws.morphism(&n)?;
        Ok((n, h))
    }

    fn structure(&mut self, path: &Path, name: Option<&str>) -> Result<String, Failure> {
        let docs = self.load(path)?;
        pick(&docs, DocumentKind::Structure, name, path)
    }
}

/// The document of `kind` a file declares: the one named, or the only one.
fn pick(
    docs: &[(DocumentKind, String)],
    kind: DocumentKind,
    name: Option<&str>,
    path: &Path,
) -> Result<String, Failure> {
    let kind_name = format!("{kind:?}").to_lowercase();
    let of_kind: Vec<&String> = docs.iter().filter(|(k, _)| *k == kind).map(|(_, n)| n).collect();
    match name {
        Some(n) if of_kind.iter().any(|m| *m == n) => Ok(n.to_string()),
        Some(n) => Err(Failure::Error(format!(
            "{}: no {kind_name} named `{n}`",
            path.display()
        ))),
        None if of_kind.len() == 1 => Ok(of_kind[0].clone()),
        None => Err(Failure::Error(format!(
            "{}: expected exactly one {} (found {}); pass --name",
            path.display(),
            kind_name,
            of_kind.len()
        ))),
    }
}

fn parse_assign(s: &str) -> Result<(Var, usize), Failure> {
    let (v, a) = s
        .split_once('=')
        .ok_or_else(|| Failure::Error(format!("`{s}` is not of the form xk=n")))?;
    let k = v
        .strip_prefix('x')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Failure::Error(format!("`{v}` is not a variable")))?;
    let a = a
        .parse()
        .map_err(|_| Failure::Error(format!("`{a}` is not an element")))?;
    Ok((Var(k), a))
}

fn variant(s: &str) -> Result<Variant, Failure> {
    Variant::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
        Failure::Error(format!("unknown variant `{s}` (expected one of {})", names.join(", ")))
    })
}

fn valuation_json(nu: &Valuation) -> Value {
    Value::Object(nu.0.iter().map(|(v, a)| (v.to_string(), json!(a))).collect())
}

fn str_morphism_json(m: &StrMorphism) -> Value {
    json!({
        "morphism": morphism_json("h", m.h().assignment()),
        "alpha": match m.alpha() {
            Alpha::Finite(a) => json!(a.map),
            Alpha::QeIdentity => json!("id"),
        },
    })
}

fn run(cli: Cli) -> Outcome {
    let out = Out { json: cli.json };
    match cli.command {
        Command::Parse { paths } => {
            let l = Loader::new(&Inputs { files: paths })?;
            out.emit(&l.ws.print(), l.ws.to_json());
        }
        Command::Translate {
            inputs,
            morphism,
            name,
            formula,
        } => {
            let mut l = Loader::new(&inputs)?;
            let (n, h) = l.morphism(&morphism, name.as_deref())?;
            let phi = parse_formula(&formula, h.source())?;
            let image = h.translate_formula(&phi)?;
            out.emit(
                &image.to_string(),
                json!({"morphism": n, "formula": formula_json(&phi), "image": formula_json(&image), "text": image.to_string()}),
            );
        }
        Command::Reduct {
            inputs,
            morphism,
            structure,
        } => {
            let mut l = Loader::new(&inputs)?;
            let (hn, h) = l.morphism(&morphism, None)?;
            let mn = l.structure(&structure, None)?;
            let r = reduct(&h, l.ws.structure(&mn)?)?;
            let name = format!("{mn}_{hn}");
            out.emit(&print_structure(&name, &r), structure_json(&name, &r));
        }
        Command::Eval {
            inputs,
            structure,
            name,
            formula,
            assign,
        } => {
            let mut l = Loader::new(&inputs)?;
            let mn = l.structure(&structure, name.as_deref())?;
            let m = l.ws.structure(&mn)?;
            let phi = parse_formula(&formula, m.signature())?;
            if assign.is_empty() {
                let sats: Vec<Valuation> = Valuation::all(&phi.free_vars(), m.size())
                    .into_iter()
                    .filter(|nu| holds(m, &phi, nu).unwrap_or(false))
                    .collect();
                let mut text: String = sats.iter().map(|nu| format!("{nu}\n")).collect();
                if phi.free_vars().is_empty() {
                    text = format!("{}\n", !sats.is_empty());
                } else if sats.is_empty() {
                    text = "none\n".to_string();
                }
                let mut value = json!({
                    "formula": formula_json(&phi),
                    "satisfying": sats.iter().map(valuation_json).collect::<Vec<_>>(),
                });
                if phi.free_vars().iter().all(|v| *v == Var(0)) && !phi.free_vars().is_empty() {
                    value["definable_set"] = json!(definable_set(m, &phi, Var(0))?);
                }
                out.emit(&text, value);
            } else {
                let mut nu = Valuation::new();
                for a in &assign {
                    let (v, e) = parse_assign(a)?;
                    nu = nu.with(v, e);
                }
                let b = holds(m, &phi, &nu)?;
                out.emit(
                    &b.to_string(),
                    json!({"formula": formula_json(&phi), "valuation": valuation_json(&nu), "holds": b}),
                );
            }
        }
        Command::CheckTransfer {
            inputs,
            morphism,
            structure,
            formula,
            max_size,
            qdepth,
        } => {
            let mut l = Loader::new(&inputs)?;
            let (_, h) = l.morphism(&morphism, None)?;
            let mn = l.structure(&structure, None)?;
            let corpus: Vec<Formula> = if formula.is_empty() {
                let bounds = EnumBounds {
                    max_size,
                    max_var_index: 2,
                    max_qdepth: qdepth,
                };
                enumerate_formulas(h.source(), bounds).collect()
            } else {
                formula
                    .iter()
                    .map(|f| parse_formula(f, h.source()))
                    .collect::<Result<_, _>>()?
            };
            let r = check_transfer(&h, l.ws.structure(&mn)?, &corpus)?;
            let mut text = format!(
                "{} formulas, {} valuations, {} counterexamples\n",
                r.formulas,
                r.valuations,
                r.counterexamples.len()
            );
            for c in &r.counterexamples {
                text += &format!(
                    "  {} at {}: reduct {}, parent {} ({})\n",
                    c.formula, c.valuation, c.in_reduct, c.in_parent, c.translated
                );
            }
            let value = json!({
                "formulas": r.formulas,
                "valuations": r.valuations,
                "counterexamples": r.counterexamples.iter().map(|c| json!({
                    "formula": formula_json(&c.formula),
                    "text": c.formula.to_string(),
                    "translated": c.translated.to_string(),
                    "valuation": valuation_json(&c.valuation),
                    "in_reduct": c.in_reduct,
                    "in_parent": c.in_parent,
                })).collect::<Vec<_>>(),
            });
            out.emit(&text, value);
            if !r.passed() {
                return Err(Failure::Found);
            }
        }
        Command::CheckLaws {
            seed,
            cases,
            variant: v,
            max_structure_size,
            max_formula_size,
        } => {
            if max_structure_size == 0 || max_formula_size == 0 {
                return Err(Failure::Error("bounds must be positive".into()));
            }
            let bounds = HarnessBounds {
                max_structure_size,
                max_formula_size,
                variant: variant(&v)?,
                check: CheckBounds::default(),
            };
            let r = law_harness(seed, cases, bounds);
            let value = json!({
                "seed": r.seed,
                "cases": r.cases,
                "checks": r.checks,
                "variant": bounds.variant.name(),
                "failures": r.failures.iter().map(|f| json!({"case": f.case, "law": f.law, "detail": f.detail})).collect::<Vec<_>>(),
            });
            out.emit(&r.to_string(), value);
            if !r.passed() {
                return Err(Failure::Found);
            }
        }
        Command::Decompose {
            inputs,
            theory,
            formula,
            params,
            morphism,
            name,
            max_atoms,
            max_quantifiers,
        } => {
            let theory: Theory = theory.parse().map_err(Failure::Error)?;
            let mut l = Loader::new(&inputs)?;
            let params: BTreeMap<Var, Rational> = params
                .iter()
                .map(|p| parse_param(p))
                .collect::<Result<_, _>>()
                .map_err(Failure::Error)?;
            let limits = QeLimits {
                max_atoms,
                max_quantifiers,
            };
            let phi = match &morphism {
                Some(path) => {
                    let (_, h) = l.morphism(path, name.as_deref())?;
                    let h = h.extend_with_order()?;
                    if !h.target().same_vocabulary(&theory.signature()) {
                        return Err(QeError::WrongTarget(theory).into());
                    }
                    let phi = parse_formula(&formula, h.source())?;
                    h.translate_formula(&phi)?
                }
                None => parse_formula(&formula, &theory.signature())?,
            };
            let set = decompose_unary_limited(&phi, &params, theory, limits)?;
            let compiled = compile(&phi, &params, theory)?;
            out.emit(
                &set.to_string(),
                json!({
                    "theory": theory.name(),
                    "formula": formula_json(&phi),
                    "atoms": compiled.atoms().len(),
                    "set": set.to_json(),
                    "text": set.to_string(),
                }),
            );
        }
        Command::RunExamples { name, bless } => {
            let names: Vec<&str> = match &name {
                Some(n) => vec![n.as_str()],
                None => BUNDLES.iter().map(|b| b.name).collect(),
            };
            let mut text = String::new();
            let mut reports = Vec::new();
            let mut failed = false;
            for n in names {
                let r = if bless {
                    examples::bless_bundle(n).map_err(|e| Failure::Error(e.to_string()))?
                } else {
                    examples::run_bundle(n)?
                };
                let ok = bless || r.passed();
                failed |= !ok;
                text += &format!("{} {}\n", if ok { "ok" } else { "DIFF" }, r.name);
                if !ok {
                    for d in r.diff() {
                        text += &format!("  {d}\n");
                    }
                }
                reports.push(json!({"name": r.name, "passed": ok, "output": r.output, "diff": if ok { vec![] } else { r.diff() }}));
            }
            out.emit(&text, json!({"bundles": reports}));
            if failed {
                return Err(Failure::Found);
            }
        }
        Command::ValidateMorphism {
            inputs,
            path,
            name,
            variant: v,
        } => {
            let mut l = Loader::new(&inputs)?;
            let docs = l.load(&path)?;
            let is_str = match &name {
                Some(n) => docs.iter().any(|(k, d)| *k == DocumentKind::StrMorphism && d == n),
                None => !docs.iter().any(|(k, _)| *k == DocumentKind::Morphism),
            };
            if is_str {
                let n = pick(&docs, DocumentKind::StrMorphism, name.as_deref(), &path)?;
                let v = variant(&v)?;
                let m = declared_str_morphism(&l.ws, &n)?;
                let violations = validate_str_morphism(&m, v, &CheckBounds::default());
                let mut text = format!(
                    "{n}: {} in {v}\n",
                    if violations.is_empty() { "valid" } else { "invalid" }
                );
                for x in &violations {
                    text += &format!("  {x}\n");
                }
                out.emit(
                    &text,
                    json!({
                        "name": n,
                        "variant": v.name(),
                        "valid": violations.is_empty(),
                        "violations": violations.iter().map(|x| json!({"name": x.name, "detail": x.detail})).collect::<Vec<_>>(),
                    }),
                );
                if !violations.is_empty() {
                    return Err(Failure::Found);
                }
            } else {
                let n = pick(&docs, DocumentKind::Morphism, name.as_deref(), &path)?;
                let a = l.ws.assignment(&n)?;
                let violations = a.validate();
                let mut text = format!("{n}: {}\n", if violations.is_empty() { "valid" } else { "invalid" });
                for x in &violations {
                    text += &format!("  {x}\n");
                }
                out.emit(
                    &text,
                    json!({
                        "name": n,
                        "valid": violations.is_empty(),
                        "violations": violations.iter().map(|x| json!({"symbol": x.symbol, "rule": format!("{:?}", x.rule).to_lowercase(), "detail": x.detail})).collect::<Vec<_>>(),
                    }),
                );
                if !violations.is_empty() {
                    return Err(Failure::Error(format!("morphism `{n}` is invalid")));
                }
            }
        }
        Command::StrCompose {
            inputs,
            first,
            second,
            variant: v,
        } => {
            let l = Loader::new(&inputs)?;
            let v = variant(&v)?;
            let f = declared_str_morphism(&l.ws, &first)?;
            let g = declared_str_morphism(&l.ws, &second)?;
            let c = compose_str(&g, &f)?;
            let violations = validate_str_morphism(&c, v, &CheckBounds::default());
            let mut text = print_morphism(&format!("{second}_{first}"), c.h().assignment()) + "\n";
            if let Alpha::Finite(a) = c.alpha() {
                text += &format!("alpha := {:?};\n", a.map);
            }
            text += &format!("{} in {v}\n", if violations.is_empty() { "valid" } else { "invalid" });
            for x in &violations {
                text += &format!("  {x}\n");
            }
            let mut value = str_morphism_json(&c);
            value["variant"] = json!(v.name());
            value["valid"] = json!(violations.is_empty());
            value["violations"] = json!(violations
                .iter()
                .map(|x| json!({"name": x.name, "detail": x.detail}))
                .collect::<Vec<_>>());
            out.emit(&text, value);
            if !violations.is_empty() {
                return Err(Failure::Found);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Found) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
