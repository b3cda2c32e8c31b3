//! Seeded generators for signatures, morphisms, structures and formulas.
//!
//! Every generated signature contains a constant `c` and a binary function
//! `g`, which is enough to build a term or atom over exactly the variables
//! `x0..x{n-1}` for any `n`, so every generated assignment is a morphism.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::morphism::{LanguageMorphism, Mode, SymbolAssignment};
use crate::ominimal::{Rational, Theory};
use crate::semantics::{tuples, FiniteStructure};
use crate::syntax::{Formula, Signature, Term, Var, ORDER_SYMBOL};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct SigShape {
    /// Extra functions beyond `c/0` and `g/2`.
    pub extra_functions: usize,
    pub relations: usize,
    pub max_arity: usize,
    pub order: bool,
}

impl Default for SigShape {
    fn default() -> Self {
        SigShape {
            extra_functions: 1,
            relations: 2,
            max_arity: 2,
            order: false,
        }
    }
}

pub fn random_signature(rng: &mut impl Rng, name: &str, shape: SigShape) -> Signature {
    let mut sig = Signature::new(name);
    sig.add_function("c", 0).expect("fresh");
    sig.add_function("g", 2).expect("fresh");
    for i in 0..rng.gen_range(0..=shape.extra_functions) {
        sig.add_function(format!("f{i}"), rng.gen_range(0..=shape.max_arity))
            .expect("fresh");
    }
    for i in 0..rng.gen_range(1..=shape.relations.max(1)) {
        sig.add_relation(format!("R{i}"), rng.gen_range(0..=shape.max_arity))
            .expect("fresh");
    }
    if shape.order {
        sig = sig.extend_with_order().expect("no function named <");
    }
    sig
}

fn pool(n: u32) -> Vec<Var> {
    (0..n).map(Var).collect()
}

fn pick<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

/// A term over `vars` with at most `budget` function applications (one, a
/// constant, when `vars` is empty and `budget` is 0).
pub fn random_term(rng: &mut impl Rng, sig: &Signature, vars: &[Var], budget: usize) -> Term {
    let funs: Vec<(&str, usize)> = sig
        .functions()
        .filter(|(_, n)| *n == 0 || (budget > 0 && (!vars.is_empty() || *n < budget)))
        .collect();
    let leaf_var = !vars.is_empty() && (budget == 0 || rng.gen_bool(0.5));
    if leaf_var || funs.is_empty() {
        return Term::Var(*pick(rng, vars));
    }
    let (f, n) = *pick(rng, &funs);
    let mut left = budget.saturating_sub(1);
    let mut args = Vec::with_capacity(n);
    for i in 0..n {
        let share = if i + 1 == n { left } else { rng.gen_range(0..=left) };
        left -= share;
        args.push(random_term(rng, sig, vars, share));
    }
    Term::App(f.to_string(), args)
}

fn binary_function(sig: &Signature) -> &str {
    sig.functions()
        .find(|(_, n)| *n == 2)
        .map(|(f, _)| f)
        .expect("generated signatures have a binary function")
}

/// Wraps `t` so that it mentions every variable of `need`.
fn cover(rng: &mut impl Rng, sig: &Signature, mut t: Term, need: &BTreeSet<Var>) -> Term {
    let g = binary_function(sig).to_string();
    for v in need {
        if !t.vars().contains(v) {
            t = if rng.gen_bool(0.5) {
                Term::App(g.clone(), vec![t, Term::Var(*v)])
            } else {
                Term::App(g.clone(), vec![Term::Var(*v), t])
            };
        }
    }
    t
}

/// A term whose variables are exactly `x0..x{n-1}`.
pub fn random_term_exact(rng: &mut impl Rng, sig: &Signature, n: u32, budget: usize) -> Term {
    let vars = pool(n);
    let t = random_term(rng, sig, &vars, budget);
    cover(rng, sig, t, &vars.into_iter().collect())
}

fn random_atom(rng: &mut impl Rng, sig: &Signature, vars: &[Var], budget: usize) -> Formula {
    let rels: Vec<(&str, usize)> = sig.relations().collect();
    if rels.is_empty() || rng.gen_bool(0.35) {
        let share = rng.gen_range(0..=budget);
        return Formula::Eq(
            random_term(rng, sig, vars, share),
            random_term(rng, sig, vars, budget - share),
        );
    }
    let (r, n) = *pick(rng, &rels);
    let mut left = budget;
    let args = (0..n)
        .map(|i| {
            let share = if i + 1 == n { left } else { rng.gen_range(0..=left) };
            left -= share;
            random_term(rng, sig, vars, share)
        })
        .collect();
    Formula::Rel(r.to_string(), args)
}

/// An atomic formula whose variables are exactly `x0..x{n-1}`.
pub fn random_atom_exact(rng: &mut impl Rng, sig: &Signature, n: u32, budget: usize) -> Formula {
    let vars = pool(n);
    let need: BTreeSet<Var> = vars.iter().copied().collect();
    let atom = if vars.is_empty() && sig.relations().next().is_none() {
        let c = Term::App(constant(sig).to_string(), vec![]);
        Formula::Eq(c.clone(), c)
    } else if vars.is_empty() {
        // closed atoms need closed terms
        let closed: Vec<(&str, usize)> = sig.relations().collect();
        let (r, k) = *pick(rng, &closed);
        let c = Term::App(constant(sig).to_string(), vec![]);
        if rng.gen_bool(0.5) {
            Formula::Rel(r.to_string(), vec![c; k])
        } else {
            Formula::Eq(c.clone(), c)
        }
    } else {
        random_atom(rng, sig, &vars, budget)
    };
    if atom.free_vars() == need {
        return atom;
    }
    match atom {
        Formula::Eq(l, r) => Formula::Eq(cover(rng, sig, l, &need), r),
        Formula::Rel(r, mut args) if !args.is_empty() => {
            args[0] = cover(rng, sig, args[0].clone(), &need);
            Formula::Rel(r, args)
        }
        _ => {
            let t = cover(rng, sig, Term::Var(Var(0)), &need);
            Formula::Eq(t.clone(), t)
        }
    }
}

fn constant(sig: &Signature) -> &str {
    sig.functions()
        .find(|(_, n)| *n == 0)
        .map(|(f, _)| f)
        .expect("generated signatures have a constant")
}

/// A formula over `x0..x{nvars-1}` with `size <= max_size` and quantifier
/// depth at most `max_qdepth`. Quantifiers rebind variables of the same pool,
/// so shadowing and capture situations arise.
pub fn random_formula(rng: &mut impl Rng, sig: &Signature, nvars: u32, max_size: usize, max_qdepth: usize) -> Formula {
    let vars = pool(nvars.max(1));
    let size = rng.gen_range(1..=max_size.max(1));
    formula_of_size(rng, sig, &vars, size, max_qdepth)
}

fn formula_of_size(rng: &mut impl Rng, sig: &Signature, vars: &[Var], size: usize, qdepth: usize) -> Formula {
    let mut choices = vec![0];
    if size >= 2 {
        choices.push(1);
        if qdepth > 0 {
            choices.push(3);
        }
    }
    if size >= 3 {
        choices.push(2);
    }
    match *pick(rng, &choices) {
        0 => random_atom(rng, sig, vars, size - 1),
        1 => Formula::not(formula_of_size(rng, sig, vars, size - 1, qdepth)),
        2 => {
            let left = rng.gen_range(1..=size - 2);
            Formula::or(
                formula_of_size(rng, sig, vars, left, qdepth),
                formula_of_size(rng, sig, vars, size - 1 - left, qdepth),
            )
        }
        _ => {
            let v = *pick(rng, vars);
            Formula::exists(v, formula_of_size(rng, sig, vars, size - 1, qdepth - 1))
        }
    }
}

/// A formula whose free variables are exactly `x0..x{n-1}`.
pub fn random_formula_exact(
    rng: &mut impl Rng,
    sig: &Signature,
    n: u32,
    max_size: usize,
    max_qdepth: usize,
) -> Formula {
    let mut phi = random_formula(rng, sig, n + 1, max_size, max_qdepth);
    for v in phi.free_vars() {
        if v.0 >= n {
            phi = Formula::exists(v, phi);
        }
    }
    let present = phi.free_vars();
    for i in 0..n {
        if !present.contains(&Var(i)) {
            phi = Formula::and(phi, Formula::eq(Term::Var(Var(i)), Term::Var(Var(i))));
        }
    }
    phi
}

/// A morphism from `source` to `target`; `target` must contain a constant
/// and a binary function.
pub fn random_morphism(rng: &mut impl Rng, source: &Signature, target: &Signature, mode: Mode) -> LanguageMorphism {
    let mut a = SymbolAssignment::new(source.clone(), target.clone(), mode);
    for (f, n) in source.functions() {
        let budget = rng.gen_range(0..=2);
        a.fun_map
            .insert(f.to_string(), random_term_exact(rng, target, n as u32, budget));
    }
    for (r, n) in source.relations() {
        let image = match mode {
            Mode::Strict => {
                let budget = rng.gen_range(0..=2);
                random_atom_exact(rng, target, n as u32, budget)
            }
            Mode::Generalized => random_formula_exact(rng, target, n as u32, 6, 1),
        };
        a.rel_map.insert(r.to_string(), image);
    }
    LanguageMorphism::new(a).expect("generated clauses satisfy the morphism rules")
}

/// A structure with uniformly random tables; `<`, if present, is a random
/// strict total order.
pub fn random_structure(rng: &mut impl Rng, sig: &Signature, size: usize) -> FiniteStructure {
    let mut functions = BTreeMap::new();
    for (f, n) in sig.functions() {
        let len = size.pow(n as u32);
        functions.insert(f.to_string(), (0..len).map(|_| rng.gen_range(0..size)).collect());
    }
    let mut relations = BTreeMap::new();
    for (r, n) in sig.relations() {
        let ts: Vec<Vec<usize>> = if r == ORDER_SYMBOL {
            let rank = random_permutation(rng, size);
            tuples(size, 2).filter(|t| rank[t[0]] < rank[t[1]]).collect()
        } else {
            tuples(size, n).filter(|_| rng.gen_bool(0.5)).collect()
        };
        relations.insert(r.to_string(), ts);
    }
    FiniteStructure::new(sig.clone(), size, functions, relations).expect("tables are in range")
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn row_major(t: &[usize], n: usize) -> usize {
    t.iter().fold(0, |acc, a| acc * n + a)
}

/// The copy of `m` along the bijection `perm`, so that `perm` is an
/// isomorphism from `m` onto the result.
pub fn isomorphic_copy(m: &FiniteStructure, perm: &[usize]) -> FiniteStructure {
    let n = m.size();
    let sig = m.signature();
    let mut functions = BTreeMap::new();
    for (f, k) in sig.functions() {
        let mut table = vec![0; n.pow(k as u32)];
        for t in tuples(n, k) {
            let image: Vec<usize> = t.iter().map(|a| perm[*a]).collect();
            table[row_major(&image, n)] = perm[m.apply(f, &t)];
        }
        functions.insert(f.to_string(), table);
    }
    let mut relations = BTreeMap::new();
    for (r, _) in sig.relations() {
        let ts = m
            .relation_tuples(r)
            .into_iter()
            .map(|t| t.iter().map(|a| perm[*a]).collect())
            .collect();
        relations.insert(r.to_string(), ts);
    }
    FiniteStructure::new(sig.clone(), n, functions, relations).expect("a permutation keeps tables in range")
}

/// A unary formula in `x0` over a theory's signature with rational values
/// for its parameters.
#[derive(Clone, Debug)]
pub struct TheoryCase {
    pub formula: Formula,
    pub params: BTreeMap<Var, Rational>,
}

/// At most 6 atoms, 3 quantifiers and 2 parameters (`x1`, `x2`).
pub fn random_theory_case(rng: &mut impl Rng, theory: Theory) -> TheoryCase {
    let nparams = rng.gen_range(0..=2u32);
    let params: BTreeMap<Var, Rational> = (1..=nparams)
        .map(|i| {
            let num = rng.gen_range(-4i64..=4);
            let den = rng.gen_range(1i64..=3);
            (Var(i), Rational::new(BigInt::from(num), BigInt::from(den)))
        })
        .collect();
    let atoms = rng.gen_range(1..=6);
    let mut quants = rng.gen_range(0..=3);
    let mut scope: Vec<Var> = (0..=nparams).map(Var).collect();
    let mut next = nparams + 1;
    let formula = theory_formula(rng, theory, atoms, &mut quants, &mut scope, &mut next);
    TheoryCase { formula, params }
}

fn theory_formula(
    rng: &mut impl Rng,
    theory: Theory,
    atoms: usize,
    quants: &mut usize,
    scope: &mut Vec<Var>,
    next: &mut u32,
) -> Formula {
    if *quants > 0 && rng.gen_bool(0.35) {
        *quants -= 1;
        let v = Var(*next);
        *next += 1;
        scope.push(v);
        let body = theory_formula(rng, theory, atoms, quants, scope, next);
        scope.pop();
        return if rng.gen_bool(0.6) {
            Formula::exists(v, body)
        } else {
            Formula::forall(v, body)
        };
    }
    let f = if atoms == 1 {
        theory_atom(rng, theory, scope)
    } else {
        let left = rng.gen_range(1..atoms);
        let a = theory_formula(rng, theory, left, quants, scope, next);
        let b = theory_formula(rng, theory, atoms - left, quants, scope, next);
        match rng.gen_range(0..3) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            _ => Formula::implies(a, b),
        }
    };
    if rng.gen_bool(0.2) {
        Formula::not(f)
    } else {
        f
    }
}

fn theory_var(rng: &mut impl Rng, scope: &[Var]) -> Term {
    // favour the innermost bound variable so quantifiers are rarely vacuous
    if rng.gen_bool(0.4) {
        Term::Var(*scope.last().expect("x0 is always in scope"))
    } else {
        Term::Var(*pick(rng, scope))
    }
}

fn theory_term(rng: &mut impl Rng, theory: Theory, scope: &[Var], depth: usize) -> Term {
    if theory == Theory::Dlo || depth == 0 || rng.gen_bool(0.45) {
        if theory == Theory::Odag && rng.gen_bool(0.1) {
            return Term::App("zero".into(), vec![]);
        }
        return theory_var(rng, scope);
    }
    if rng.gen_bool(0.75) {
        Term::App(
            "plus".into(),
            vec![
                theory_term(rng, theory, scope, depth - 1),
                theory_term(rng, theory, scope, depth - 1),
            ],
        )
    } else {
        Term::App("minus".into(), vec![theory_term(rng, theory, scope, depth - 1)])
    }
}

fn theory_atom(rng: &mut impl Rng, theory: Theory, scope: &[Var]) -> Formula {
    let l = theory_term(rng, theory, scope, 2);
    let r = theory_term(rng, theory, scope, 2);
    if rng.gen_bool(0.65) {
        Formula::lt(l, r)
    } else {
        Formula::eq(l, r)
    }
}
