//! Signatures, terms and formulas over the fixed variable pool `x0, x1, ...`.
//!
//! The formula AST only has the primitive constructors `=`, relation atoms,
//! `~`, `|` and `exists`. Everything else (`&`, `->`, `<->`, `forall`,
//! `true`, `false`) is desugared by the parser and never stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Name of the distinguished binary order relation.
pub const ORDER_SYMBOL: &str = "<";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("symbol `{0}` is declared as both a function and a relation")]
    KindClash(String),
    #[error("symbol `{0}` is declared twice")]
    Duplicate(String),
    #[error("the order symbol `<` must be a binary relation, found arity {0}")]
    OrderArity(usize),
    #[error("cannot add the order relation: `<` is already a function symbol")]
    OrderClash,
    #[error("substitution arity: variable {var} has no argument ({given} given)")]
    SubstitutionArity { var: Var, given: usize },
    #[error("strict substitution into a quantified formula")]
    QuantifierInStrictSubstitution,
}

/// A variable `x_i` from the single countable pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A first-order signature: function and relation symbols with arities.
///
/// The name is carried for printing and for resolving references in `.fol`
/// documents; [`Signature::same_vocabulary`] compares symbols only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    name: String,
    functions: BTreeMap<String, usize>,
    relations: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new(name: impl Into<String>) -> Self {
        Signature {
            name: name.into(),
            functions: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Signature {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn add_function(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SyntaxError> {
        let name = name.into();
        if self.relations.contains_key(&name) {
            return Err(SyntaxError::KindClash(name));
        }
        if self.functions.contains_key(&name) {
            return Err(SyntaxError::Duplicate(name));
        }
        self.functions.insert(name, arity);
        Ok(())
    }

    pub fn add_relation(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SyntaxError> {
        let name = name.into();
        if self.functions.contains_key(&name) {
            return Err(SyntaxError::KindClash(name));
        }
        if self.relations.contains_key(&name) {
            return Err(SyntaxError::Duplicate(name));
        }
        if name == ORDER_SYMBOL && arity != 2 {
            return Err(SyntaxError::OrderArity(arity));
        }
        self.relations.insert(name, arity);
        Ok(())
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Self, SyntaxError> {
        self.add_function(name, arity)?;
        Ok(self)
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Self, SyntaxError> {
        self.add_relation(name, arity)?;
        Ok(self)
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Whether the distinguished order relation `<` is declared.
    pub fn has_order(&self) -> bool {
        self.relations.get(ORDER_SYMBOL) == Some(&2)
    }

    pub fn symbol_count(&self) -> usize {
        self.functions.len() + self.relations.len()
    }

    /// Symbol-wise equality, ignoring the signature name.
    pub fn same_vocabulary(&self, other: &Signature) -> bool {
        self.functions == other.functions && self.relations == other.relations
    }

    /// `L_<`: the same signature with the binary relation `<` added.
    /// Idempotent when `<` is already present; otherwise the name gains `_lt`.
    pub fn extend_with_order(&self) -> Result<Signature, SyntaxError> {
        if self.functions.contains_key(ORDER_SYMBOL) {
            return Err(SyntaxError::OrderClash);
        }
        let mut out = self.clone();
        if !out.has_order() {
            out.relations.insert(ORDER_SYMBOL.to_string(), 2);
            out.name = format!("{}_lt", out.name);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
}

/// How bound variables are treated when substituting into a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubstMode {
    /// Only quantifier-free targets are accepted.
    Strict,
    /// Quantified targets are accepted; binders that would capture a free
    /// variable of an argument are renamed to the smallest unused indices.
    Generalized,
}

pub fn var(i: u32) -> Term {
    Term::Var(Var(i))
}

pub fn app(name: &str, args: Vec<Term>) -> Term {
    Term::App(name.to_string(), args)
}

impl Term {
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Number of function applications; variables are free.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn well_formed(&self, sig: &Signature) -> bool {
        match self {
            Term::Var(_) => true,
            Term::App(f, args) => sig.function_arity(f) == Some(args.len()) && args.iter().all(|a| a.well_formed(sig)),
        }
    }

    /// Simultaneous substitution `self[args[0]/x0, ..., args[n-1]/x{n-1}]`.
    pub fn substitute(&self, args: &[Term]) -> Result<Term, SyntaxError> {
        if let Some(v) = self.vars().into_iter().find(|v| v.index() >= args.len()) {
            return Err(SyntaxError::SubstitutionArity {
                var: v,
                given: args.len(),
            });
        }
        Ok(self.replace(&|v| args.get(v.index())))
    }

    pub(crate) fn replace<'a>(&self, lookup: &impl Fn(Var) -> Option<&'a Term>) -> Term {
        match self {
            Term::Var(v) => lookup(*v).cloned().unwrap_or(Term::Var(*v)),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.replace(lookup)).collect()),
        }
    }

    pub(crate) fn max_var(&self) -> Option<Var> {
        self.vars().into_iter().next_back()
    }
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(name.to_string(), args)
    }

    pub fn lt(l: Term, r: Term) -> Formula {
        Formula::Rel(ORDER_SYMBOL.to_string(), vec![l, r])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::not(Formula::exists(v, Formula::not(body)))
    }

    /// `exists x0 . x0 = x0`, which holds in every (nonempty) structure.
    pub fn truth() -> Formula {
        Formula::exists(Var(0), Formula::Eq(var(0), var(0)))
    }

    pub fn falsity() -> Formula {
        Formula::not(Formula::truth())
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Rel(..))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::Or(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(l, r) => 1 + l.size() + r.size(),
            Formula::Rel(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Not(a) => 1 + a.size(),
            Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, a) => 1 + a.size(),
        }
    }

    /// Maximal nesting of `exists`.
    pub fn qdepth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Rel(..) => 0,
            Formula::Not(a) => a.qdepth(),
            Formula::Or(a, b) => a.qdepth().max(b.qdepth()),
            Formula::Exists(_, a) => 1 + a.qdepth(),
        }
    }

    pub fn well_formed(&self, sig: &Signature) -> bool {
        match self {
            Formula::Eq(l, r) => l.well_formed(sig) && r.well_formed(sig),
            Formula::Rel(r, args) => {
                sig.relation_arity(r) == Some(args.len()) && args.iter().all(|a| a.well_formed(sig))
            }
            Formula::Not(a) => a.well_formed(sig),
            Formula::Or(a, b) => a.well_formed(sig) && b.well_formed(sig),
            Formula::Exists(_, a) => a.well_formed(sig),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            Formula::Eq(l, r) => {
                let mut s = l.vars();
                r.collect_vars(&mut s);
                s
            }
            Formula::Rel(_, args) => {
                let mut s = BTreeSet::new();
                args.iter().for_each(|a| a.collect_vars(&mut s));
                s
            }
            Formula::Not(a) => a.free_vars(),
            Formula::Or(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Formula::Exists(x, a) => {
                let mut s = a.free_vars();
                s.remove(x);
                s
            }
        }
    }

    /// Every variable occurring anywhere, free or bound (binders included).
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_all_vars(&mut out);
        out
    }

    fn collect_all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Eq(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Formula::Not(a) => a.collect_all_vars(out),
            Formula::Or(a, b) => {
                a.collect_all_vars(out);
                b.collect_all_vars(out);
            }
            Formula::Exists(x, a) => {
                out.insert(*x);
                a.collect_all_vars(out);
            }
        }
    }

    /// Simultaneous substitution of `args[i]` for the free occurrences of `x_i`.
    ///
    /// Every free variable of `self` must have an argument. In strict mode the
    /// target must be quantifier-free.
    pub fn substitute(&self, args: &[Term], mode: SubstMode) -> Result<Formula, SyntaxError> {
        if mode == SubstMode::Strict && !self.is_quantifier_free() {
            return Err(SyntaxError::QuantifierInStrictSubstitution);
        }
        if let Some(v) = self.free_vars().into_iter().find(|v| v.index() >= args.len()) {
            return Err(SyntaxError::SubstitutionArity {
                var: v,
                given: args.len(),
            });
        }
        let map: BTreeMap<Var, Term> = args
            .iter()
            .enumerate()
            .map(|(i, t)| (Var(i as u32), t.clone()))
            .collect();
        let mut used = self.all_vars();
        for a in args {
            a.collect_vars(&mut used);
        }
        Ok(self.substitute_map(&map, &mut used))
    }

    /// Capture-avoiding substitution of a variable map. `used` holds every
    /// variable that a fresh binder must avoid and is extended as binders are
    /// renamed.
    pub(crate) fn substitute_map(&self, map: &BTreeMap<Var, Term>, used: &mut BTreeSet<Var>) -> Formula {
        match self {
            Formula::Eq(l, r) => Formula::Eq(l.replace(&|v| map.get(&v)), r.replace(&|v| map.get(&v))),
            Formula::Rel(name, args) => {
                Formula::Rel(name.clone(), args.iter().map(|a| a.replace(&|v| map.get(&v))).collect())
            }
            Formula::Not(a) => Formula::not(a.substitute_map(map, used)),
            Formula::Or(a, b) => Formula::or(a.substitute_map(map, used), b.substitute_map(map, used)),
            Formula::Exists(x, body) => {
                let body_free = body.free_vars();
                let mut inner: BTreeMap<Var, Term> = map
                    .iter()
                    .filter(|(k, _)| *k != x && body_free.contains(k))
                    .map(|(k, t)| (*k, t.clone()))
                    .collect();
                let captures = inner.values().any(|t| t.vars().contains(x));
                if captures {
                    let fresh = smallest_unused(used);
                    used.insert(fresh);
                    inner.insert(*x, Term::Var(fresh));
                    Formula::exists(fresh, body.substitute_map(&inner, used))
                } else {
                    Formula::exists(*x, body.substitute_map(&inner, used))
                }
            }
        }
    }

    /// Equality up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq_in(self, other, &mut Vec::new())
    }

    /// Every term occurring at the top of an atom, in order.
    pub fn atom_terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.collect_atom_terms(&mut out);
        out
    }

    fn collect_atom_terms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Formula::Eq(l, r) => {
                out.push(l);
                out.push(r);
            }
            Formula::Rel(_, args) => out.extend(args.iter()),
            Formula::Not(a) | Formula::Exists(_, a) => a.collect_atom_terms(out),
            Formula::Or(a, b) => {
                a.collect_atom_terms(out);
                b.collect_atom_terms(out);
            }
        }
    }
}

fn smallest_unused(used: &BTreeSet<Var>) -> Var {
    (0u32..)
        .map(Var)
        .find(|v| !used.contains(v))
        .expect("variable pool is infinite")
}

fn alpha_eq_var(a: Var, b: Var, bound: &[(Var, Var)]) -> bool {
    for (x, y) in bound.iter().rev() {
        if *x == a || *y == b {
            return *x == a && *y == b;
        }
    }
    a == b
}

fn alpha_eq_term(s: &Term, t: &Term, bound: &[(Var, Var)]) -> bool {
    match (s, t) {
        (Term::Var(a), Term::Var(b)) => alpha_eq_var(*a, *b, bound),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_term(x, y, bound))
        }
        _ => false,
    }
}

fn alpha_eq_in(a: &Formula, b: &Formula, bound: &mut Vec<(Var, Var)>) -> bool {
    match (a, b) {
        (Formula::Eq(l1, r1), Formula::Eq(l2, r2)) => alpha_eq_term(l1, l2, bound) && alpha_eq_term(r1, r2, bound),
        (Formula::Rel(p, xs), Formula::Rel(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_term(x, y, bound))
        }
        (Formula::Not(x), Formula::Not(y)) => alpha_eq_in(x, y, bound),
        (Formula::Or(a1, b1), Formula::Or(a2, b2)) => alpha_eq_in(a1, a2, bound) && alpha_eq_in(b1, b2, bound),
        (Formula::Exists(x, p), Formula::Exists(y, q)) => {
            bound.push((*x, *y));
            let r = alpha_eq_in(p, q, bound);
            bound.pop();
            r
        }
        _ => false,
    }
}

/// Bounds for [`enumerate_formulas`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBounds {
    pub max_size: usize,
    pub max_var_index: u32,
    pub max_qdepth: usize,
}

/// All terms with exactly `apps` function applications, sorted.
fn terms_of_size(sig: &Signature, vars: &[Var], apps: usize, memo: &mut Vec<Vec<Term>>) -> Vec<Term> {
    while memo.len() <= apps {
        let k = memo.len();
        let mut bucket = Vec::new();
        if k == 0 {
            bucket.extend(vars.iter().map(|v| Term::Var(*v)));
        } else {
            for (f, arity) in sig.functions() {
                for split in compositions(k - 1, arity) {
                    let lists: Vec<&Vec<Term>> = split.iter().map(|s| &memo[*s]).collect();
                    for args in cartesian(&lists) {
                        bucket.push(Term::App(f.to_string(), args));
                    }
                }
            }
        }
        bucket.sort();
        memo.push(bucket);
    }
    memo[apps].clone()
}

/// Ordered ways of writing `total` as a sum of `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn cartesian<T: Clone>(lists: &[&Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![vec![]];
    for list in lists {
        let mut next = Vec::with_capacity(acc.len() * list.len());
        for prefix in &acc {
            for item in list.iter() {
                let mut p = prefix.clone();
                p.push(item.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

/// Deterministic, duplicate-free enumeration of every well-formed formula
/// within the bounds. Formulas come out by increasing [`Formula::size`] and,
/// within one size, in the derived `Ord` order of the AST.
pub fn enumerate_formulas(sig: &Signature, bounds: EnumBounds) -> FormulaEnumerator {
    FormulaEnumerator {
        sig: sig.clone(),
        bounds,
        vars: (0..=bounds.max_var_index).map(Var).collect(),
        term_memo: Vec::new(),
        by_size: Vec::new(),
        current: Vec::new().into_iter(),
        next_size: 1,
    }
}

pub struct FormulaEnumerator {
    sig: Signature,
    bounds: EnumBounds,
    vars: Vec<Var>,
    term_memo: Vec<Vec<Term>>,
    /// `by_size[s][q]`: formulas of size exactly `s` and qdepth exactly `q`.
    by_size: Vec<Vec<Vec<Formula>>>,
    current: std::vec::IntoIter<Formula>,
    next_size: usize,
}

impl FormulaEnumerator {
    fn build_size(&mut self, s: usize) {
        while self.by_size.len() < s {
            self.by_size.push(Vec::new());
        }
        let maxq = self.bounds.max_qdepth;
        let mut buckets: Vec<Vec<Formula>> = vec![Vec::new(); maxq + 1];
        // atoms: one node plus the applications in their arguments
        let apps = s - 1;
        for split in compositions(apps, 2) {
            let l = terms_of_size(&self.sig, &self.vars, split[0], &mut self.term_memo);
            let r = terms_of_size(&self.sig, &self.vars, split[1], &mut self.term_memo);
            for a in &l {
                for b in &r {
                    buckets[0].push(Formula::Eq(a.clone(), b.clone()));
                }
            }
        }
        let rels: Vec<(String, usize)> = self.sig.relations().map(|(r, n)| (r.to_string(), n)).collect();
        for (r, arity) in rels {
            for split in compositions(apps, arity) {
                let lists: Vec<Vec<Term>> = split
                    .iter()
                    .map(|k| terms_of_size(&self.sig, &self.vars, *k, &mut self.term_memo))
                    .collect();
                let refs: Vec<&Vec<Term>> = lists.iter().collect();
                for args in cartesian(&refs) {
                    buckets[0].push(Formula::Rel(r.clone(), args));
                }
            }
        }
        if s >= 2 {
            for q in 0..=maxq {
                for f in &self.by_size[s - 2][q] {
                    buckets[q].push(Formula::not(f.clone()));
                }
                if q >= 1 {
                    for f in &self.by_size[s - 2][q - 1] {
                        for v in &self.vars {
                            buckets[q].push(Formula::exists(*v, f.clone()));
                        }
                    }
                }
            }
        }
        if s >= 3 {
            for s1 in 1..(s - 1) {
                let s2 = s - 1 - s1;
                for q1 in 0..=maxq {
                    for q2 in 0..=maxq {
                        let q = q1.max(q2);
                        for a in &self.by_size[s1 - 1][q1] {
                            for b in &self.by_size[s2 - 1][q2] {
                                buckets[q].push(Formula::or(a.clone(), b.clone()));
                            }
                        }
                    }
                }
            }
        }
        for b in buckets.iter_mut() {
            b.sort();
        }
        self.by_size[s - 1] = buckets;
    }
}

impl Iterator for FormulaEnumerator {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        loop {
            if let Some(f) = self.current.next() {
                return Some(f);
            }
            if self.next_size > self.bounds.max_size {
                return None;
            }
            let s = self.next_size;
            self.next_size += 1;
            self.build_size(s);
            let mut all: Vec<Formula> = self.by_size[s - 1].iter().flatten().cloned().collect();
            all.sort();
            self.current = all.into_iter();
        }
    }
}
