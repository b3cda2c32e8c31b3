//! Bundled example corpora and the small check language that drives them.
//!
//! A bundle is a set of `.fol` documents, a `checks` script and the expected
//! output of running it. Each line of `checks` is one command:
//!
//! ```text
//! note <text>                          echo text
//! show <name>                          canonical text of a document
//! order <new> <h>                      define new := h extended with <
//! compose <new> <outer> <inner>        define new := outer . inner
//! same <h> <k>                         equality of two morphisms
//! square <h> <size>                    H_< . i = i' . H on a formula corpus
//! translate <h> <formula>              image of a named formula
//! reduct <h> <structure>               reduct of a structure
//! transfer <h> <structure> <size> <q>  satisfaction transfer on a corpus
//! decompose <theory> <h|-> <formula> [xk=p/q ...]
//!                                      unary set, cross-checked
//! witness <theory> <h> <size>          decompose every unary formula
//! reading <variant> <h> <structure>    (h, id) validated in a variant
//! reading <variant> <h> qe <theory>    same, over the rationals
//! strmorphism <variant> <name>         a declared (H, alpha), validated
//! laws <seed> <cases> <variant>        the category law harness
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::category::{
    declared_str_morphism, law_harness, validate_str_morphism, CheckBounds, HarnessBounds, StrMorphism, StrObject,
    Variant,
};
use crate::morphism::LanguageMorphism;
use crate::ominimal::{
    compile, decompose_compiled, decompose_unary, decompose_via_morphism, oracle_on_compiled, sample_points,
    IntervalUnion, QeStructure, Rational, Theory,
};
use crate::parser::{print_morphism, print_signature, print_structure, Workspace};
use crate::semantics::{check_transfer, reduct};
use crate::syntax::{enumerate_formulas, EnumBounds, Formula, Var};

pub struct Bundle {
    pub name: &'static str,
    pub files: &'static [(&'static str, &'static str)],
    pub checks: &'static str,
    pub expected: &'static str,
}

macro_rules! bundle {
    ($name:literal, [$($file:literal),*]) => {
        Bundle {
            name: $name,
            files: &[$(($file, include_str!(concat!("../bundles/", $name, "/", $file)))),*],
            checks: include_str!(concat!("../bundles/", $name, "/checks")),
            expected: include_str!(concat!("../bundles/", $name, "/expected.txt")),
        }
    };
}

pub const BUNDLES: &[Bundle] = &[
    bundle!("fact1-syntactic", ["lang.fol"]),
    bundle!("fact1-semantic-odag", ["lang.fol"]),
    bundle!("fact2-syntactic", ["lang.fol"]),
    bundle!("grothendieck-identity", ["lang.fol", "structures.fol"]),
];

pub fn bundle(name: &str) -> Option<&'static Bundle> {
    BUNDLES.iter().find(|b| b.name == name)
}

/// Directory holding the bundle sources in the source tree.
pub fn bundle_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("bundles").join(name)
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("no bundle named `{0}`")]
    Missing(String),
    #[error("{file}: {error}")]
    Parse {
        file: String,
        error: crate::parser::ParseError,
    },
    #[error("checks line {line}: {message}")]
    Check { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleReport {
    pub name: String,
    pub output: String,
    pub expected: String,
}

impl BundleReport {
    pub fn passed(&self) -> bool {
        self.output == self.expected
    }

    /// Lines that differ, as `-expected` / `+actual` pairs.
    pub fn diff(&self) -> Vec<String> {
        let got: Vec<&str> = self.output.lines().collect();
        let want: Vec<&str> = self.expected.lines().collect();
        let mut out = Vec::new();
        for i in 0..got.len().max(want.len()) {
            let (w, g) = (want.get(i), got.get(i));
            if w != g {
                if let Some(w) = w {
                    out.push(format!("{}: -{w}", i + 1));
                }
                if let Some(g) = g {
                    out.push(format!("{}: +{g}", i + 1));
                }
            }
        }
        out
    }
}

/// Loads and runs a bundle; the report compares the output with the
/// bundled expectation.
pub fn run_bundle(name: &str) -> Result<BundleReport, BundleError> {
    let b = bundle(name).ok_or_else(|| BundleError::Missing(name.to_string()))?;
    let mut ws = Workspace::new();
    for (file, text) in b.files {
        ws.load(text).map_err(|error| BundleError::Parse {
            file: file.to_string(),
            error,
        })?;
    }
    let output = Runner::new(ws).run(b.checks)?;
    Ok(BundleReport {
        name: name.to_string(),
        output,
        expected: b.expected.to_string(),
    })
}

/// Runs a bundle and writes its output as the new expectation in the
/// source tree.
pub fn bless_bundle(name: &str) -> Result<BundleReport, Box<dyn std::error::Error>> {
    let report = run_bundle(name)?;
    std::fs::write(bundle_dir(name).join("expected.txt"), &report.output)?;
    Ok(report)
}

struct Runner {
    ws: Workspace,
    defined: BTreeMap<String, LanguageMorphism>,
    out: String,
}

type CheckResult = Result<(), String>;

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_theory(s: &str) -> Result<Theory, String> {
    s.parse()
}

/// `xk=p/q` or `xk=p`.
pub fn parse_param(s: &str) -> Result<(Var, Rational), String> {
    let (v, q) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not of the form xk=p/q"))?;
    let k: u32 = v
        .strip_prefix('x')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| format!("`{v}` is not a variable"))?;
    let q: Rational = q.parse().map_err(|_| format!("`{q}` is not a rational"))?;
    Ok((Var(k), q))
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).ok_or_else(|| format!("unknown variant `{s}`"))
}

impl Runner {
    fn new(ws: Workspace) -> Self {
        Runner {
            ws,
            defined: BTreeMap::new(),
            out: String::new(),
        }
    }

    fn run(mut self, checks: &str) -> Result<String, BundleError> {
        for (i, line) in checks.lines().enumerate() {
            let line = line.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            self.command(&words, line)
                .map_err(|message| BundleError::Check { line: i + 1, message })?;
        }
        Ok(self.out)
    }

    fn say(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn morphism(&self, name: &str) -> Result<LanguageMorphism, String> {
        if let Some(h) = self.defined.get(name) {
            return Ok(h.clone());
        }
        self.ws.morphism(name).map_err(|e| e.to_string())
    }

    fn formula(&self, name: &str) -> Result<Formula, String> {
        Ok(self.ws.formula(name).map_err(|e| e.to_string())?.1.clone())
    }

    fn define(&mut self, name: &str, h: LanguageMorphism) -> CheckResult {
        if self.defined.contains_key(name) || self.ws.assignment(name).is_ok() {
            return Err(format!("`{name}` is already defined"));
        }
        self.say(print_morphism(name, h.assignment()));
        self.defined.insert(name.to_string(), h);
        Ok(())
    }

    fn command(&mut self, w: &[&str], line: &str) -> CheckResult {
        match w {
            ["note", ..] => {
                let text = line["note".len()..].trim().to_string();
                self.say(format!("# {text}"));
            }
            ["show", name] => self.show(name)?,
            ["order", new, h] => {
                let ext = self.morphism(h)?.extend_with_order().map_err(|e| e.to_string())?;
                self.define(new, ext)?;
            }
            ["compose", new, outer, inner] => {
                let c = LanguageMorphism::compose(&self.morphism(outer)?, &self.morphism(inner)?)
                    .map_err(|e| e.to_string())?;
                self.define(new, c)?;
            }
            ["same", a, b] => {
                let same = crate::category::same_language_morphism(&self.morphism(a)?, &self.morphism(b)?);
                self.say(format!("{a} {} {b}", if same { "=" } else { "!=" }));
            }
            ["square", h, size] => self.square(h, parse_num(size)?)?,
            ["translate", h, phi] => {
                let image = self
                    .morphism(h)?
                    .translate_formula(&self.formula(phi)?)
                    .map_err(|e| e.to_string())?;
                self.say(format!("{h}({phi}) = {image}"));
            }
            ["reduct", h, m] => {
                let m = self.ws.structure(m).map_err(|e| e.to_string())?;
                let r = reduct(&self.morphism(h)?, m).map_err(|e| e.to_string())?;
                self.say(print_structure(&format!("{h}_reduct"), &r));
            }
            ["transfer", h, m, size, q] => {
                let h = self.morphism(h)?;
                let parent = self.ws.structure(m).map_err(|e| e.to_string())?;
                let bounds = EnumBounds {
                    max_size: parse_num(size)?,
                    max_var_index: 2,
                    max_qdepth: parse_num(q)?,
                };
                let corpus: Vec<Formula> = enumerate_formulas(h.source(), bounds).collect();
                let r = check_transfer(&h, parent, &corpus).map_err(|e| e.to_string())?;
                self.say(format!(
                    "transfer {m}: {} formulas, {} valuations, {} counterexamples",
                    r.formulas,
                    r.valuations,
                    r.counterexamples.len()
                ));
            }
            ["decompose", th, h, phi, params @ ..] => {
                let params = params.iter().map(|p| parse_param(p)).collect::<Result<_, _>>()?;
                self.decompose(parse_theory(th)?, h, phi, &params)?
            }
            ["witness", th, h, size] => self.witness(parse_theory(th)?, h, parse_num(size)?)?,
            ["reading", variant, h, "qe", th] => {
                let dst = StrObject::qe(QeStructure::base(parse_theory(th)?));
                self.reading(parse_variant(variant)?, h, dst, th)?;
            }
            ["reading", variant, h, m] => {
                let dst = StrObject::finite(self.ws.structure(m).map_err(|e| e.to_string())?.clone());
                self.reading(parse_variant(variant)?, h, dst, m)?;
            }
            ["strmorphism", variant, name] => self.strmorphism(parse_variant(variant)?, name)?,
            ["laws", seed, cases, variant] => {
                let bounds = HarnessBounds {
                    variant: parse_variant(variant)?,
                    max_structure_size: 3,
                    ..HarnessBounds::default()
                };
                let r = law_harness(parse_num(seed)?, parse_num(cases)?, bounds);
                self.say(format!("laws {variant}: {}", r.to_string().trim_end()));
            }
            _ => return Err(format!("cannot read `{line}`")),
        }
        Ok(())
    }

    fn show(&mut self, name: &str) -> CheckResult {
        let text = if let Ok(s) = self.ws.signature(name) {
            print_signature(s)
        } else if let Ok(a) = self.ws.assignment(name) {
            print_morphism(name, a)
        } else if let Some(h) = self.defined.get(name) {
            print_morphism(name, h.assignment())
        } else if let Ok(m) = self.ws.structure(name) {
            print_structure(name, m)
        } else if let Ok((s, phi)) = self.ws.formula(name) {
            format!("formula {name} : {s} := {phi};")
        } else {
            return Err(format!("nothing named `{name}`"));
        };
        self.say(text);
        Ok(())
    }

    /// `H_< . i = i' . H`, where `i` and `i'` add `<` to the source and
    /// target, compared clause by clause and on every formula of the corpus.
    fn square(&mut self, name: &str, size: usize) -> CheckResult {
        let h = self.morphism(name)?;
        let inc = |s: &crate::syntax::Signature| -> Result<LanguageMorphism, String> {
            let with = s.extend_with_order().map_err(|e| e.to_string())?;
            LanguageMorphism::simple(s, &with, &BTreeMap::new()).map_err(|e| e.to_string())
        };
        let (i, i2) = (inc(h.source())?, inc(h.target())?);
        let h_lt = h.extend_with_order().map_err(|e| e.to_string())?;
        let top = LanguageMorphism::compose(&h_lt, &i).map_err(|e| e.to_string())?;
        let bottom = LanguageMorphism::compose(&i2, &h).map_err(|e| e.to_string())?;
        let clauses = top.assignment().fun_map == bottom.assignment().fun_map
            && top.assignment().rel_map == bottom.assignment().rel_map;
        let bounds = EnumBounds {
            max_size: size,
            max_var_index: 1,
            max_qdepth: 1,
        };
        let mut n = 0;
        let mut bad = None;
        for phi in enumerate_formulas(h.source(), bounds) {
            n += 1;
            let a = top.translate_formula(&phi).map_err(|e| e.to_string())?;
            let b = bottom.translate_formula(&phi).map_err(|e| e.to_string())?;
            if a != b && bad.is_none() {
                bad = Some(phi);
            }
        }
        match (clauses, bad) {
            (true, None) => self.say(format!(
                "square {name}: {name}_< . i = i' . {name} clause by clause and on {n} formulas of size <= {size}"
            )),
            (_, Some(phi)) => self.say(format!("square {name}: fails on {phi}")),
            (false, None) => self.say(format!("square {name}: clauses differ")),
        }
        Ok(())
    }

    fn decompose(&mut self, theory: Theory, h: &str, phi_name: &str, params: &BTreeMap<Var, Rational>) -> CheckResult {
        let phi = self.formula(phi_name)?;
        let translated = if h == "-" {
            phi.clone()
        } else {
            self.morphism(h)?.translate_formula(&phi).map_err(|e| e.to_string())?
        };
        let (set, direct, oracle) = self.cross_checked(theory, h, &phi, &translated, params)?;
        let via = if h == "-" { String::new() } else { format!(" via {h}") };
        let at: Vec<String> = params.iter().map(|(v, q)| format!("x{}={q}", v.0)).collect();
        let at = if at.is_empty() {
            String::new()
        } else {
            format!(" at {}", at.join(", "))
        };
        self.say(format!(
            "{phi_name}{via}{at} in {theory}: {set} (canonical: {}, direct: {}, oracle: {})",
            yes(set.is_canonical()),
            agree(direct),
            agree(oracle)
        ));
        Ok(())
    }

    /// The set via the morphism, whether it equals the direct decomposition
    /// of the translation, and whether the sampling oracle agrees with it.
    fn cross_checked(
        &self,
        theory: Theory,
        h: &str,
        phi: &Formula,
        translated: &Formula,
        params: &BTreeMap<Var, Rational>,
    ) -> Result<(IntervalUnion, bool, bool), String> {
        let via = if h == "-" {
            decompose_unary(phi, params, theory)
        } else {
            decompose_via_morphism(&self.morphism(h)?, phi, params, theory)
        }
        .map_err(|e| e.to_string())?;
        let compiled = compile(translated, params, theory).map_err(|e| e.to_string())?;
        let (direct, bps) = decompose_compiled(&compiled).map_err(|e| e.to_string())?;
        let mut points = bps;
        points.extend(via.breakpoints());
        let samples = sample_points(&points);
        let oracle = oracle_on_compiled(&compiled, &samples);
        let oracle_ok = samples.iter().zip(&oracle).all(|(s, b)| via.contains(s) == *b);
        Ok((via.clone(), via == direct, oracle_ok))
    }

    fn witness(&mut self, theory: Theory, h_name: &str, size: usize) -> CheckResult {
        let h = self.morphism(h_name)?;
        let bounds = EnumBounds {
            max_size: size,
            max_var_index: 1,
            max_qdepth: 1,
        };
        let mut sets = std::collections::BTreeSet::new();
        let (mut n, mut canonical, mut direct, mut oracle) = (0, 0, 0, 0);
        for phi in enumerate_formulas(h.source(), bounds) {
            if phi.free_vars().iter().any(|v| *v != Var(0)) {
                continue;
            }
            let translated = h.translate_formula(&phi).map_err(|e| e.to_string())?;
            let (set, d, o) = self.cross_checked(theory, h_name, &phi, &translated, &BTreeMap::new())?;
            n += 1;
            canonical += usize::from(set.is_canonical());
            direct += usize::from(d);
            oracle += usize::from(o);
            sets.insert(set);
        }
        self.say(format!(
            "witness {h_name} in {theory}: {n} unary formulas of size <= {size}, {} distinct sets; canonical {canonical}/{n}, direct {direct}/{n}, oracle {oracle}/{n}",
            sets.len()
        ));
        let mut listing = String::new();
        for s in &sets {
            let _ = writeln!(listing, "  {s}");
        }
        self.out.push_str(&listing);
        Ok(())
    }

    fn report_violations(&mut self, what: &str, variant: Variant, m: &StrMorphism) {
        let v = validate_str_morphism(m, variant, &CheckBounds::default());
        if v.is_empty() {
            self.say(format!("{what}: valid in {variant}"));
        } else {
            let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            self.say(format!("{what}: invalid in {variant}: {}", list.join("; ")));
        }
    }

    fn reading(&mut self, variant: Variant, h: &str, dst: StrObject, dst_name: &str) -> CheckResult {
        let m = StrMorphism::reading(dst, self.morphism(h)?).map_err(|e| e.to_string())?;
        self.report_violations(&format!("({h}, id) into {dst_name}"), variant, &m);
        Ok(())
    }

    fn strmorphism(&mut self, variant: Variant, name: &str) -> CheckResult {
        let m = declared_str_morphism(&self.ws, name).map_err(|e| e.to_string())?;
        self.report_violations(name, variant, &m);
        Ok(())
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn agree(b: bool) -> &'static str {
    if b {
        "agree"
    } else {
        "DIFFER"
    }
}

/// Morphisms of all bundles whose order extension lands in the ODAG
/// language, with their bundle names.
pub fn odag_morphisms() -> Vec<(String, LanguageMorphism)> {
    let odag = Theory::Odag.signature();
    let mut out = Vec::new();
    for b in BUNDLES {
        let mut ws = Workspace::new();
        for (_, text) in b.files {
            ws.load(text).expect("bundled documents parse");
        }
        let names: Vec<String> = ws.morphism_names().map(str::to_string).collect();
        for name in names {
            let Ok(h) = ws.morphism(&name) else { continue };
            let Ok(h_lt) = h.extend_with_order() else { continue };
            if h_lt.target().same_vocabulary(&odag) {
                out.push((format!("{}/{name}", b.name), h_lt));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundle_matches_its_expectation() {
        for b in BUNDLES {
            let r = run_bundle(b.name).unwrap();
            assert!(r.passed(), "{}:\n{}", b.name, r.diff().join("\n"));
        }
    }

    #[test]
    fn missing_bundle() {
        assert!(matches!(run_bundle("nope"), Err(BundleError::Missing(_))));
    }
}
