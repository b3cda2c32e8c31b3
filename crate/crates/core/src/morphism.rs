//! Language morphisms.
//!
//! A [`SymbolAssignment`] sends each function symbol of the source to a
//! target term in `x0..x{n-1}` and each relation symbol to a target formula in
//! the same variables. [`LanguageMorphism`] wraps a validated assignment and
//! extends it structurally to every term and formula of the source.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, Signature, SubstMode, SyntaxError, Term, Var, ORDER_SYMBOL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("invalid assignment: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("symbol not in assignment: `{0}`")]
    UnmappedSymbol(String),
    #[error("signature mismatch: target `{inner_target}` is not source `{outer_source}`")]
    SignatureMismatch { inner_target: String, outer_source: String },
    #[error("`{0}` is not a symbol of the source signature")]
    UnknownSymbol(String),
    #[error("simple morphism: `{from}` and `{to}` differ in kind or arity")]
    RenameMismatch { from: String, to: String },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Strict mode is the category of the first-order languages proper: relation
/// symbols go to atomic formulas. Generalized mode lets them go to arbitrary
/// formulas with the right free variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Strict,
    Generalized,
}

impl Mode {
    pub fn join(self, other: Mode) -> Mode {
        if self == Mode::Generalized || other == Mode::Generalized {
            Mode::Generalized
        } else {
            Mode::Strict
        }
    }

    fn subst(self) -> SubstMode {
        match self {
            Mode::Strict => SubstMode::Strict,
            Mode::Generalized => SubstMode::Generalized,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// A source symbol has no clause.
    Missing,
    /// A clause names something that is not a source symbol of that kind.
    Unknown,
    /// The clause is not well formed over the target signature.
    IllFormed,
    /// The clause's variables are not exactly `x0..x{n-1}`.
    Variables,
    /// Strict mode requires an atomic relation clause.
    NonAtomic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Violation {
    pub symbol: String,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.symbol, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolAssignment {
    pub source: Signature,
    pub target: Signature,
    pub fun_map: BTreeMap<String, Term>,
    pub rel_map: BTreeMap<String, Formula>,
    pub mode: Mode,
}

fn first_vars(n: usize) -> BTreeSet<Var> {
    (0..n as u32).map(Var).collect()
}

fn fmt_vars(vs: &BTreeSet<Var>) -> String {
    let items: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

impl SymbolAssignment {
    pub fn new(source: Signature, target: Signature, mode: Mode) -> Self {
        SymbolAssignment {
            source,
            target,
            fun_map: BTreeMap::new(),
            rel_map: BTreeMap::new(),
            mode,
        }
    }

    pub fn map_function(mut self, f: &str, t: Term) -> Self {
        self.fun_map.insert(f.to_string(), t);
        self
    }

    pub fn map_relation(mut self, r: &str, phi: Formula) -> Self {
        self.rel_map.insert(r.to_string(), phi);
        self
    }

    /// Assignment of a simple morphism: `f |-> f'(x0..x{n-1})` and
    /// `R |-> R'(x0..x{n-1})` for an arity-preserving renaming.
    /// Symbols absent from `rename` keep their own name.
    pub fn simple(
        source: &Signature,
        target: &Signature,
        rename: &BTreeMap<String, String>,
    ) -> Result<Self, MorphismError> {
        for k in rename.keys() {
            if source.function_arity(k).is_none() && source.relation_arity(k).is_none() {
                return Err(MorphismError::UnknownSymbol(k.clone()));
            }
        }
        let mut out = SymbolAssignment::new(source.clone(), target.clone(), Mode::Strict);
        for (f, n) in source.functions() {
            let to = rename.get(f).map(String::as_str).unwrap_or(f);
            if target.function_arity(to) != Some(n) {
                return Err(MorphismError::RenameMismatch {
                    from: f.to_string(),
                    to: to.to_string(),
                });
            }
            out.fun_map
                .insert(f.to_string(), Term::App(to.to_string(), generic_args(n)));
        }
        for (r, n) in source.relations() {
            let to = rename.get(r).map(String::as_str).unwrap_or(r);
            if target.relation_arity(to) != Some(n) {
                return Err(MorphismError::RenameMismatch {
                    from: r.to_string(),
                    to: to.to_string(),
                });
            }
            out.rel_map
                .insert(r.to_string(), Formula::Rel(to.to_string(), generic_args(n)));
        }
        Ok(out)
    }

    /// All rule violations; empty iff the assignment generates a morphism.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let push = |out: &mut Vec<Violation>, symbol: &str, rule, detail: String| {
            out.push(Violation {
                symbol: symbol.to_string(),
                rule,
                detail,
            })
        };
        for (f, n) in self.source.functions() {
            let Some(t) = self.fun_map.get(f) else {
                push(&mut out, f, Rule::Missing, "no clause for function symbol".into());
                continue;
            };
            if !t.well_formed(&self.target) {
                push(
                    &mut out,
                    f,
                    Rule::IllFormed,
                    format!("not a term over {}", self.target.name()),
                );
            }
            let want = first_vars(n);
            let got = t.vars();
            if got != want {
                push(
                    &mut out,
                    f,
                    Rule::Variables,
                    format!("variables {} must be precisely {}", fmt_vars(&got), fmt_vars(&want)),
                );
            }
        }
        for (r, n) in self.source.relations() {
            let Some(phi) = self.rel_map.get(r) else {
                push(&mut out, r, Rule::Missing, "no clause for relation symbol".into());
                continue;
            };
            if !phi.well_formed(&self.target) {
                push(
                    &mut out,
                    r,
                    Rule::IllFormed,
                    format!("not a formula over {}", self.target.name()),
                );
            }
            if self.mode == Mode::Strict && !phi.is_atomic() {
                push(
                    &mut out,
                    r,
                    Rule::NonAtomic,
                    "strict mode requires an atomic formula".into(),
                );
            }
            let want = first_vars(n);
            let got = phi.free_vars();
            if got != want {
                push(
                    &mut out,
                    r,
                    Rule::Variables,
                    format!("variables {} must be precisely {}", fmt_vars(&got), fmt_vars(&want)),
                );
            }
        }
        for f in self.fun_map.keys() {
            if self.source.function_arity(f).is_none() {
                push(
                    &mut out,
                    f,
                    Rule::Unknown,
                    format!("not a function symbol of {}", self.source.name()),
                );
            }
        }
        for r in self.rel_map.keys() {
            if self.source.relation_arity(r).is_none() {
                push(
                    &mut out,
                    r,
                    Rule::Unknown,
                    format!("not a relation symbol of {}", self.source.name()),
                );
            }
        }
        out
    }
}

pub(crate) fn generic_args(n: usize) -> Vec<Term> {
    (0..n as u32).map(|i| Term::Var(Var(i))).collect()
}

/// A validated symbol assignment together with its extension to all terms
/// and formulas of the source language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageMorphism {
    assignment: SymbolAssignment,
}

impl LanguageMorphism {
    pub fn new(assignment: SymbolAssignment) -> Result<Self, MorphismError> {
        let violations = assignment.validate();
        if violations.is_empty() {
            Ok(LanguageMorphism { assignment })
        } else {
            Err(MorphismError::Invalid(violations))
        }
    }

    pub fn identity(sig: &Signature) -> Self {
        let a = SymbolAssignment::simple(sig, sig, &BTreeMap::new()).expect("identity renaming is arity preserving");
        LanguageMorphism { assignment: a }
    }

    pub fn simple(
        source: &Signature,
        target: &Signature,
        rename: &BTreeMap<String, String>,
    ) -> Result<Self, MorphismError> {
        LanguageMorphism::new(SymbolAssignment::simple(source, target, rename)?)
    }

    pub fn assignment(&self) -> &SymbolAssignment {
        &self.assignment
    }

    pub fn source(&self) -> &Signature {
        &self.assignment.source
    }

    pub fn target(&self) -> &Signature {
        &self.assignment.target
    }

    pub fn mode(&self) -> Mode {
        self.assignment.mode
    }

    pub fn function_image(&self, f: &str) -> Option<&Term> {
        self.assignment.fun_map.get(f)
    }

    pub fn relation_image(&self, r: &str) -> Option<&Formula> {
        self.assignment.rel_map.get(r)
    }

    /// `x |-> x` on variables, `f(t..) |-> h(f)[H(t0)/x0, ..]` on applications.
    pub fn translate_term(&self, t: &Term) -> Result<Term, MorphismError> {
        match t {
            Term::Var(v) => Ok(Term::Var(*v)),
            Term::App(f, args) => {
                let image = self
                    .assignment
                    .fun_map
                    .get(f)
                    .ok_or_else(|| MorphismError::UnmappedSymbol(f.clone()))?;
                let args = args
                    .iter()
                    .map(|a| self.translate_term(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(image.substitute(&args)?)
            }
        }
    }

    /// Structural recursion over `=`, relation atoms, `~`, `|` and `exists`;
    /// quantified variables are kept as they are.
    pub fn translate_formula(&self, phi: &Formula) -> Result<Formula, MorphismError> {
        Ok(match phi {
            Formula::Eq(l, r) => Formula::Eq(self.translate_term(l)?, self.translate_term(r)?),
            Formula::Rel(r, args) => {
                let image = self
                    .assignment
                    .rel_map
                    .get(r)
                    .ok_or_else(|| MorphismError::UnmappedSymbol(r.clone()))?;
                let args = args
                    .iter()
                    .map(|a| self.translate_term(a))
                    .collect::<Result<Vec<_>, _>>()?;
                image.substitute(&args, self.mode().subst())?
            }
            Formula::Not(a) => Formula::not(self.translate_formula(a)?),
            Formula::Or(a, b) => Formula::or(self.translate_formula(a)?, self.translate_formula(b)?),
            Formula::Exists(x, a) => Formula::exists(*x, self.translate_formula(a)?),
        })
    }

    /// `outer ∘ inner`: `f |-> H'(h(f))`, `R |-> H'(h(R))`.
    pub fn compose(outer: &LanguageMorphism, inner: &LanguageMorphism) -> Result<LanguageMorphism, MorphismError> {
        if !inner.target().same_vocabulary(outer.source()) {
            return Err(MorphismError::SignatureMismatch {
                inner_target: inner.target().name().to_string(),
                outer_source: outer.source().name().to_string(),
            });
        }
        let mut a = SymbolAssignment::new(
            inner.source().clone(),
            outer.target().clone(),
            inner.mode().join(outer.mode()),
        );
        for (f, t) in &inner.assignment.fun_map {
            a.fun_map.insert(f.clone(), outer.translate_term(t)?);
        }
        for (r, phi) in &inner.assignment.rel_map {
            a.rel_map.insert(r.clone(), outer.translate_formula(phi)?);
        }
        LanguageMorphism::new(a)
    }

    /// `H_<`: the same assignment between `L_<` and `L'_<`, with `<` sent to
    /// `x0 < x1`. A clause the source already has for `<` is kept.
    pub fn extend_with_order(&self) -> Result<LanguageMorphism, MorphismError> {
        let mut a = self.assignment.clone();
        let had_order = a.source.has_order();
        a.source = a.source.extend_with_order()?;
        a.target = a.target.extend_with_order()?;
        if !had_order {
            a.rel_map.insert(
                ORDER_SYMBOL.to_string(),
                Formula::Rel(ORDER_SYMBOL.to_string(), generic_args(2)),
            );
        }
        LanguageMorphism::new(a)
    }

    /// Agreement of the extensions on every formula of `corpus`, up to
    /// renaming of bound variables.
    pub fn agrees_on(&self, other: &LanguageMorphism, corpus: &[Formula]) -> bool {
        corpus.iter().all(
            |phi| match (self.translate_formula(phi), other.translate_formula(phi)) {
                (Ok(a), Ok(b)) => a.alpha_eq(&b),
                (Err(_), Err(_)) => true,
                _ => false,
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{app, var};

    fn arith() -> Signature {
        Signature::new("A")
            .with_function("plus", 2)
            .unwrap()
            .with_function("times", 2)
            .unwrap()
            .with_function("zero", 0)
            .unwrap()
    }

    fn f_sig() -> Signature {
        Signature::new("F").with_function("f", 1).unwrap()
    }

    fn doubling() -> LanguageMorphism {
        let a =
            SymbolAssignment::new(f_sig(), arith(), Mode::Strict).map_function("f", app("plus", vec![var(0), var(0)]));
        LanguageMorphism::new(a).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(doubling().assignment().validate().is_empty());

        let f2 = Signature::new("F2").with_function("f", 2).unwrap();
        let bad = SymbolAssignment::new(f2, arith(), Mode::Strict).map_function("f", app("plus", vec![var(0), var(0)]));
        let v = bad.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::Variables);
        assert!(v[0].detail.contains("precisely"));

        let r1 = Signature::new("R").with_relation("R", 1).unwrap();
        let tgt = Signature::new("O").with_relation("<", 2).unwrap();
        let phi = Formula::exists(Var(1), Formula::lt(var(1), var(0)));
        let strict = SymbolAssignment::new(r1.clone(), tgt.clone(), Mode::Strict).map_relation("R", phi.clone());
        assert!(strict.validate().iter().any(|v| v.rule == Rule::NonAtomic));
        let gen = SymbolAssignment::new(r1, tgt, Mode::Generalized).map_relation("R", phi);
        assert!(gen.validate().is_empty());
    }

    #[test]
    fn validate_reports_missing_and_unknown() {
        let a = SymbolAssignment::new(f_sig(), arith(), Mode::Strict).map_function("g", var(0));
        let rules: Vec<Rule> = a.validate().into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::Missing));
        assert!(rules.contains(&Rule::Unknown));
    }

    #[test]
    fn translate_term_examples() {
        let h = doubling();
        assert_eq!(
            h.translate_term(&app("f", vec![var(1)])).unwrap(),
            app("plus", vec![var(1), var(1)])
        );
        let x2 = app("plus", vec![var(0), var(0)]);
        assert_eq!(
            h.translate_term(&app("f", vec![app("f", vec![var(0)])])).unwrap(),
            app("plus", vec![x2.clone(), x2])
        );
        assert_eq!(
            h.translate_term(&app("g", vec![var(0)])),
            Err(MorphismError::UnmappedSymbol("g".into()))
        );
    }

    #[test]
    fn translate_formula_examples() {
        let h = doubling();
        let phi = Formula::eq(app("f", vec![var(0)]), var(1));
        assert_eq!(
            h.translate_formula(&phi).unwrap(),
            Formula::eq(app("plus", vec![var(0), var(0)]), var(1))
        );
        let ex = Formula::exists(Var(1), Formula::eq(app("f", vec![var(1)]), var(0)));
        assert_eq!(
            h.translate_formula(&ex).unwrap(),
            Formula::exists(Var(1), Formula::eq(app("plus", vec![var(1), var(1)]), var(0)))
        );
        let a = Formula::eq(var(0), var(1));
        let b = Formula::eq(app("f", vec![var(0)]), var(0));
        let neg = Formula::not(Formula::or(a.clone(), b.clone()));
        assert_eq!(
            h.translate_formula(&neg).unwrap(),
            Formula::not(Formula::or(
                h.translate_formula(&a).unwrap(),
                h.translate_formula(&b).unwrap()
            ))
        );
    }

    #[test]
    fn identity_fixes_terms_and_formulas() {
        let sig = arith().with_relation("P", 1).unwrap();
        let id = LanguageMorphism::identity(&sig);
        assert!(id.assignment().validate().is_empty());
        let t = app("plus", vec![app("zero", vec![]), var(3)]);
        assert_eq!(id.translate_term(&t).unwrap(), t);
        let phi = Formula::exists(Var(2), Formula::rel("P", vec![t]));
        assert_eq!(id.translate_formula(&phi).unwrap(), phi);
        assert_eq!(LanguageMorphism::simple(&sig, &sig, &BTreeMap::new()).unwrap(), id);
    }

    #[test]
    fn composition_unfolds_both_clauses() {
        let h = doubling();
        let a2 = arith();
        let m = Signature::new("M")
            .with_function("times", 2)
            .unwrap()
            .with_function("zero", 0)
            .unwrap();
        let h2 = LanguageMorphism::new(
            SymbolAssignment::new(a2, m, Mode::Strict)
                .map_function("plus", app("times", vec![var(0), var(1)]))
                .map_function("times", app("times", vec![var(0), var(1)]))
                .map_function("zero", app("zero", vec![])),
        )
        .unwrap();
        let c = LanguageMorphism::compose(&h2, &h).unwrap();
        assert_eq!(
            c.translate_term(&app("f", vec![var(1)])).unwrap(),
            app("times", vec![var(1), var(1)])
        );
        assert!(matches!(
            LanguageMorphism::compose(&h, &h2),
            Err(MorphismError::SignatureMismatch { .. })
        ));
        let id = LanguageMorphism::identity(&f_sig());
        assert_eq!(LanguageMorphism::compose(&h, &id).unwrap(), h);
    }

    #[test]
    fn simple_morphisms() {
        let src = Signature::new("S").with_function("plus", 2).unwrap();
        let tgt = Signature::new("T").with_function("add", 2).unwrap();
        let rename = BTreeMap::from([("plus".to_string(), "add".to_string())]);
        let h = LanguageMorphism::simple(&src, &tgt, &rename).unwrap();
        assert_eq!(
            h.translate_term(&app("plus", vec![var(1), var(0)])).unwrap(),
            app("add", vec![var(1), var(0)])
        );
        let bad = Signature::new("B").with_function("add", 1).unwrap();
        assert!(matches!(
            LanguageMorphism::simple(&src, &bad, &rename),
            Err(MorphismError::RenameMismatch { .. })
        ));
    }

    #[test]
    fn order_extension_of_morphisms() {
        let h = doubling();
        let hl = h.extend_with_order().unwrap();
        assert!(hl.source().has_order() && hl.target().has_order());
        let lt = Formula::lt(var(0), var(1));
        assert_eq!(hl.translate_formula(&lt).unwrap(), lt);
        let id = LanguageMorphism::identity(&f_sig());
        assert_eq!(
            id.extend_with_order().unwrap(),
            LanguageMorphism::identity(&f_sig().extend_with_order().unwrap())
        );
    }

    #[test]
    fn generalized_translation_avoids_capture() {
        // R(x0) |-> exists x1 . x0 < x1; translating R(x1) must rename the binder
        let r1 = Signature::new("R").with_relation("R", 1).unwrap();
        let tgt = Signature::new("O").with_relation("<", 2).unwrap();
        let h = LanguageMorphism::new(
            SymbolAssignment::new(r1, tgt, Mode::Generalized)
                .map_relation("R", Formula::exists(Var(1), Formula::lt(var(0), var(1)))),
        )
        .unwrap();
        let out = h.translate_formula(&Formula::rel("R", vec![var(1)])).unwrap();
        assert_eq!(out, Formula::exists(Var(2), Formula::lt(var(1), var(2))));
        assert_eq!(out.free_vars(), BTreeSet::from([Var(1)]));
    }
}
