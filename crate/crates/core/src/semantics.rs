//! Finite structures, Tarskian satisfaction, and the reduct along a language
//! morphism.
//!
//! A [`FiniteStructure`] has domain `0..n` and explicit tables. The reduct
//! `reduct(H, M')` keeps the domain of `M'` and interprets each source symbol
//! as the value of its image under `H`, so that a source formula holds in the
//! reduct exactly when its translation holds in `M'`. [`check_transfer`]
//! verifies this exhaustively over a corpus.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::morphism::LanguageMorphism;
use crate::syntax::{enumerate_formulas, EnumBounds, Formula, Signature, Term, Var, ORDER_SYMBOL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unbound variable {0}")]
    Unbound(Var),
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("symbol `{0}` is not interpreted")]
    Uninterpreted(String),
    #[error("symbol `{0}` is not in the signature")]
    UnknownSymbol(String),
    #[error("table for `{symbol}` has {got} entries, expected {expected}")]
    TableSize {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("value {value} for `{symbol}` is outside the domain 0..{size}")]
    OutOfRange { symbol: String, value: usize, size: usize },
    #[error("tuple {tuple:?} for `{symbol}` has the wrong arity or leaves the domain")]
    BadTuple { symbol: String, tuple: Vec<usize> },
    #[error("`<` is not a strict total order: {0}")]
    NotOrdered(OrderViolation),
    #[error("signature mismatch: expected `{expected}`, found `{found}`")]
    SignatureMismatch { expected: String, found: String },
    #[error("structure map must send each of the {expected} source elements somewhere, got {got}")]
    MapSize { expected: usize, got: usize },
    #[error("structure maps are not composable")]
    NotComposable,
    #[error("formula is not well formed over `{0}`")]
    IllFormed(String),
}

/// The order axiom a `<` table violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderViolation {
    Missing,
    Irreflexivity(usize),
    Transitivity(usize, usize, usize),
    Trichotomy(usize, usize),
}

impl std::fmt::Display for OrderViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrderViolation::Missing => write!(f, "no `<` relation"),
            OrderViolation::Irreflexivity(a) => write!(f, "irreflexivity fails at {a}"),
            OrderViolation::Transitivity(a, b, c) => write!(f, "transitivity fails at {a} < {b} < {c}"),
            OrderViolation::Trichotomy(a, b) => write!(f, "trichotomy fails at {a}, {b}"),
        }
    }
}

fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

/// Row-major index of an argument tuple.
fn tuple_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, a| acc * n + a)
}

/// Inverse of [`tuple_index`].
fn tuple_at(n: usize, k: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    out
}

/// All `k`-tuples over `0..n` in row-major order.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..pow(n, k)).map(move |i| tuple_at(n, k, i))
}

/// An `L`-structure over the domain `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    sig: Signature,
    size: usize,
    functions: BTreeMap<String, Vec<usize>>,
    relations: BTreeMap<String, Vec<bool>>,
}

impl FiniteStructure {
    /// Builds a structure from function tables (row-major, one entry per
    /// argument tuple) and relation tuple lists.
    pub fn new(
        sig: Signature,
        size: usize,
        functions: BTreeMap<String, Vec<usize>>,
        relations: BTreeMap<String, Vec<Vec<usize>>>,
    ) -> Result<Self, SemanticsError> {
        if size == 0 {
            return Err(SemanticsError::EmptyDomain);
        }
        for name in functions.keys() {
            if sig.function_arity(name).is_none() {
                return Err(SemanticsError::UnknownSymbol(name.clone()));
            }
        }
        for name in relations.keys() {
            if sig.relation_arity(name).is_none() {
                return Err(SemanticsError::UnknownSymbol(name.clone()));
            }
        }
        let mut fun_tables = BTreeMap::new();
        for (f, k) in sig.functions() {
            let table = functions
                .get(f)
                .ok_or_else(|| SemanticsError::Uninterpreted(f.to_string()))?;
            if table.len() != pow(size, k) {
                return Err(SemanticsError::TableSize {
                    symbol: f.to_string(),
                    expected: pow(size, k),
                    got: table.len(),
                });
            }
            if let Some(&v) = table.iter().find(|&&v| v >= size) {
                return Err(SemanticsError::OutOfRange {
                    symbol: f.to_string(),
                    value: v,
                    size,
                });
            }
            fun_tables.insert(f.to_string(), table.clone());
        }
        let mut rel_tables = BTreeMap::new();
        for (r, k) in sig.relations() {
            let list = relations
                .get(r)
                .ok_or_else(|| SemanticsError::Uninterpreted(r.to_string()))?;
            let mut table = vec![false; pow(size, k)];
            for t in list {
                if t.len() != k || t.iter().any(|&a| a >= size) {
                    return Err(SemanticsError::BadTuple {
                        symbol: r.to_string(),
                        tuple: t.clone(),
                    });
                }
                table[tuple_index(size, t)] = true;
            }
            rel_tables.insert(r.to_string(), table);
        }
        Ok(FiniteStructure {
            sig,
            size,
            functions: fun_tables,
            relations: rel_tables,
        })
    }

    pub(crate) fn from_raw(
        sig: Signature,
        size: usize,
        functions: BTreeMap<String, Vec<usize>>,
        relations: BTreeMap<String, Vec<bool>>,
    ) -> Self {
        FiniteStructure {
            sig,
            size,
            functions,
            relations,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The function table in row-major argument order.
    pub fn function_table(&self, f: &str) -> Option<&[usize]> {
        self.functions.get(f).map(Vec::as_slice)
    }

    pub fn relation_table(&self, r: &str) -> Option<&[bool]> {
        self.relations.get(r).map(Vec::as_slice)
    }

    pub fn relation_tuples(&self, r: &str) -> Vec<Vec<usize>> {
        let k = self.sig.relation_arity(r).unwrap_or(0);
        match self.relations.get(r) {
            Some(table) => table
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| tuple_at(self.size, k, i))
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn apply(&self, f: &str, args: &[usize]) -> usize {
        self.functions[f][tuple_index(self.size, args)]
    }

    pub fn related(&self, r: &str, args: &[usize]) -> bool {
        self.relations[r][tuple_index(self.size, args)]
    }

    /// Checks that `<` is a strict total order.
    pub fn order_check(&self) -> Result<(), OrderViolation> {
        if !self.sig.has_order() {
            return Err(OrderViolation::Missing);
        }
        let n = self.size;
        let lt = |a: usize, b: usize| self.related(ORDER_SYMBOL, &[a, b]);
        for a in 0..n {
            if lt(a, a) {
                return Err(OrderViolation::Irreflexivity(a));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && !lt(a, b) && !lt(b, a) {
                    return Err(OrderViolation::Trichotomy(a, b));
                }
                for c in 0..n {
                    if lt(a, b) && lt(b, c) && !lt(a, c) {
                        return Err(OrderViolation::Transitivity(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_ordered(&self) -> bool {
        self.order_check().is_ok()
    }

    /// Position of each element in the `<` order (0 for the least).
    pub fn order_ranks(&self) -> Option<Vec<usize>> {
        self.order_check().ok()?;
        Some(
            (0..self.size)
                .map(|a| (0..self.size).filter(|&b| self.related(ORDER_SYMBOL, &[b, a])).count())
                .collect(),
        )
    }

    /// Whether the tables agree with `other` (signatures compared by vocabulary).
    pub fn same_tables(&self, other: &FiniteStructure) -> bool {
        self.sig.same_vocabulary(&other.sig)
            && self.size == other.size
            && self.functions == other.functions
            && self.relations == other.relations
    }
}

/// A finite assignment of domain elements to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(pub BTreeMap<Var, usize>);

impl Valuation {
    pub fn new() -> Self {
        Valuation(BTreeMap::new())
    }

    pub fn with(mut self, v: Var, a: usize) -> Self {
        self.0.insert(v, a);
        self
    }

    pub fn get(&self, v: Var) -> Option<usize> {
        self.0.get(&v).copied()
    }

    /// Post-composition with a map of domains.
    pub fn mapped(&self, map: &[usize]) -> Valuation {
        Valuation(self.0.iter().map(|(v, a)| (*v, map[*a])).collect())
    }

    /// Every valuation of `vars` into `0..size`, in lexicographic order.
    pub fn all(vars: &BTreeSet<Var>, size: usize) -> Vec<Valuation> {
        let vs: Vec<Var> = vars.iter().copied().collect();
        tuples(size, vs.len())
            .map(|t| Valuation(vs.iter().copied().zip(t).collect()))
            .collect()
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self.0.iter().map(|(v, a)| format!("{v}={a}")).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Dense environment indexed by variable number.
struct Env(Vec<Option<usize>>);

impl Env {
    fn from_valuation(nu: &Valuation, extra: usize) -> Env {
        let width = nu.0.keys().next_back().map_or(0, |v| v.index() + 1).max(extra);
        let mut slots = vec![None; width];
        for (v, a) in &nu.0 {
            slots[v.index()] = Some(*a);
        }
        Env(slots)
    }

    fn get(&self, v: Var) -> Option<usize> {
        self.0.get(v.index()).copied().flatten()
    }

    fn set(&mut self, v: Var, a: Option<usize>) -> Option<usize> {
        if self.0.len() <= v.index() {
            self.0.resize(v.index() + 1, None);
        }
        std::mem::replace(&mut self.0[v.index()], a)
    }
}

fn eval_in(m: &FiniteStructure, t: &Term, env: &Env) -> usize {
    match t {
        Term::Var(v) => env.get(*v).expect("free variables are checked before evaluation"),
        Term::App(f, args) => {
            let idx = args.iter().fold(0, |acc, a| acc * m.size + eval_in(m, a, env));
            m.functions[f][idx]
        }
    }
}

fn holds_in(m: &FiniteStructure, phi: &Formula, env: &mut Env) -> bool {
    match phi {
        Formula::Eq(l, r) => eval_in(m, l, env) == eval_in(m, r, env),
        Formula::Rel(r, args) => {
            let idx = args.iter().fold(0, |acc, a| acc * m.size + eval_in(m, a, env));
            m.relations[r][idx]
        }
        Formula::Not(a) => !holds_in(m, a, env),
        Formula::Or(a, b) => holds_in(m, a, env) || holds_in(m, b, env),
        Formula::Exists(x, body) => {
            let saved = env.get(*x);
            let mut found = false;
            for a in 0..m.size {
                env.set(*x, Some(a));
                if holds_in(m, body, env) {
                    found = true;
                    break;
                }
            }
            env.set(*x, saved);
            found
        }
    }
}

fn check_symbols(m: &FiniteStructure, ok: bool) -> Result<(), SemanticsError> {
    if ok {
        Ok(())
    } else {
        Err(SemanticsError::IllFormed(m.sig.name().to_string()))
    }
}

pub fn eval_term(m: &FiniteStructure, t: &Term, nu: &Valuation) -> Result<usize, SemanticsError> {
    check_symbols(m, t.well_formed(&m.sig))?;
    if let Some(v) = t.vars().into_iter().find(|v| nu.get(*v).is_none()) {
        return Err(SemanticsError::Unbound(v));
    }
    Ok(eval_in(m, t, &Env::from_valuation(nu, 0)))
}

/// `M |=_nu phi`; quantifiers range over the whole domain.
pub fn holds(m: &FiniteStructure, phi: &Formula, nu: &Valuation) -> Result<bool, SemanticsError> {
    check_symbols(m, phi.well_formed(&m.sig))?;
    if let Some(v) = phi.free_vars().into_iter().find(|v| nu.get(*v).is_none()) {
        return Err(SemanticsError::Unbound(v));
    }
    Ok(holds_unchecked(m, phi, nu))
}

fn holds_unchecked(m: &FiniteStructure, phi: &Formula, nu: &Valuation) -> bool {
    let width = phi.all_vars().into_iter().next_back().map_or(0, |v| v.index() + 1);
    holds_in(m, phi, &mut Env::from_valuation(nu, width))
}

/// The set `{a : M |= phi[a/x]}` for a formula whose only free variable is `x`.
pub fn definable_set(m: &FiniteStructure, phi: &Formula, x: Var) -> Result<Vec<usize>, SemanticsError> {
    let mut out = Vec::new();
    for a in 0..m.size {
        if holds(m, phi, &Valuation::new().with(x, a))? {
            out.push(a);
        }
    }
    Ok(out)
}

/// The reduct `E(H)(M')`: same domain, `f` read as `h(f)` and `R` as `h(R)`.
pub fn reduct(h: &LanguageMorphism, m: &FiniteStructure) -> Result<FiniteStructure, SemanticsError> {
    if !h.target().same_vocabulary(&m.sig) {
        return Err(SemanticsError::SignatureMismatch {
            expected: h.target().name().to_string(),
            found: m.sig.name().to_string(),
        });
    }
    let n = m.size;
    let mut functions = BTreeMap::new();
    for (f, k) in h.source().functions() {
        let image = h.function_image(f).expect("validated morphisms are total");
        let width = image.max_var().map_or(0, |v| v.index() + 1);
        let mut env = Env(vec![None; width.max(k)]);
        let table = tuples(n, k)
            .map(|t| {
                for (i, a) in t.iter().enumerate() {
                    env.set(Var(i as u32), Some(*a));
                }
                eval_in(m, image, &env)
            })
            .collect();
        functions.insert(f.to_string(), table);
    }
    let mut relations = BTreeMap::new();
    for (r, k) in h.source().relations() {
        let image = h.relation_image(r).expect("validated morphisms are total");
        let width = image.all_vars().into_iter().next_back().map_or(0, |v| v.index() + 1);
        let mut env = Env(vec![None; width.max(k)]);
        let table = tuples(n, k)
            .map(|t| {
                for (i, a) in t.iter().enumerate() {
                    env.set(Var(i as u32), Some(*a));
                }
                holds_in(m, image, &mut env)
            })
            .collect();
        relations.insert(r.to_string(), table);
    }
    Ok(FiniteStructure::from_raw(h.source().clone(), n, functions, relations))
}

/// A function between the domains of two structures over the same vocabulary.
/// Homomorphism and elementarity are checked, never assumed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureMap {
    pub source: FiniteStructure,
    pub target: FiniteStructure,
    pub map: Vec<usize>,
}

impl StructureMap {
    pub fn new(source: FiniteStructure, target: FiniteStructure, map: Vec<usize>) -> Result<Self, SemanticsError> {
        if !source.sig.same_vocabulary(&target.sig) {
            return Err(SemanticsError::SignatureMismatch {
                expected: source.sig.name().to_string(),
                found: target.sig.name().to_string(),
            });
        }
        if map.len() != source.size {
            return Err(SemanticsError::MapSize {
                expected: source.size,
                got: map.len(),
            });
        }
        if let Some(&v) = map.iter().find(|&&v| v >= target.size) {
            return Err(SemanticsError::OutOfRange {
                symbol: "map".into(),
                value: v,
                size: target.size,
            });
        }
        Ok(StructureMap { source, target, map })
    }

    pub fn identity(m: &FiniteStructure) -> Self {
        StructureMap {
            source: m.clone(),
            target: m.clone(),
            map: (0..m.size).collect(),
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &StructureMap) -> Result<StructureMap, SemanticsError> {
        if !first.target.same_tables(&self.source) {
            return Err(SemanticsError::NotComposable);
        }
        Ok(StructureMap {
            source: first.source.clone(),
            target: self.target.clone(),
            map: first.map.iter().map(|&a| self.map[a]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let image: BTreeSet<usize> = self.map.iter().copied().collect();
        image.len() == self.map.len()
    }
}

/// `E(H)(alpha')`: the same underlying function, between the reducts.
pub fn reduct_map(h: &LanguageMorphism, alpha: &StructureMap) -> Result<StructureMap, SemanticsError> {
    Ok(StructureMap {
        source: reduct(h, &alpha.source)?,
        target: reduct(h, &alpha.target)?,
        map: alpha.map.clone(),
    })
}

/// Functions commute with the map and relation tuples are preserved.
pub fn is_homomorphism(alpha: &StructureMap) -> bool {
    let (a, b, m) = (&alpha.source, &alpha.target, &alpha.map);
    let sig = &a.sig;
    for (f, k) in sig.functions() {
        for t in tuples(a.size, k) {
            let image: Vec<usize> = t.iter().map(|&x| m[x]).collect();
            if m[a.apply(f, &t)] != b.apply(f, &image) {
                return false;
            }
        }
    }
    for (r, k) in sig.relations() {
        for t in tuples(a.size, k) {
            if a.related(r, &t) {
                let image: Vec<usize> = t.iter().map(|&x| m[x]).collect();
                if !b.related(r, &image) {
                    return false;
                }
            }
        }
    }
    true
}

/// An injective homomorphism that also reflects every relation.
pub fn is_embedding(alpha: &StructureMap) -> bool {
    if !alpha.is_injective() || !is_homomorphism(alpha) {
        return false;
    }
    let (a, b, m) = (&alpha.source, &alpha.target, &alpha.map);
    for (r, k) in a.sig.relations() {
        for t in tuples(a.size, k) {
            let image: Vec<usize> = t.iter().map(|&x| m[x]).collect();
            if a.related(r, &t) != b.related(r, &image) {
                return false;
            }
        }
    }
    true
}

/// Formula corpus used by the bounded elementarity checks: every formula of
/// size at most `size` and quantifier depth at most `depth` over variables
/// `x0..x{depth+1}`.
fn bounded_corpus(sig: &Signature, depth: usize, size: usize) -> impl Iterator<Item = Formula> {
    enumerate_formulas(
        sig,
        EnumBounds {
            max_size: size,
            max_var_index: depth as u32 + 1,
            max_qdepth: depth,
        },
    )
}

/// Bounded approximation of elementarity: every formula within the bounds
/// (see [`bounded_corpus`]) is preserved and reflected under every valuation.
/// This is not a proof of elementarity.
pub fn is_elementary_up_to(alpha: &StructureMap, depth: usize, size: usize) -> bool {
    bounded_corpus(&alpha.source.sig, depth, size).all(|phi| {
        Valuation::all(&phi.free_vars(), alpha.source.size).iter().all(|nu| {
            holds_unchecked(&alpha.source, &phi, nu) == holds_unchecked(&alpha.target, &phi, &nu.mapped(&alpha.map))
        })
    })
}

/// Like [`is_elementary_up_to`], restricted to formulas with exactly one free
/// variable and only in the preserving direction.
pub fn preserves_unary_up_to(alpha: &StructureMap, depth: usize, size: usize) -> bool {
    bounded_corpus(&alpha.source.sig, depth, size)
        .filter(|phi| phi.free_vars().len() == 1)
        .all(|phi| {
            Valuation::all(&phi.free_vars(), alpha.source.size).iter().all(|nu| {
                !holds_unchecked(&alpha.source, &phi, nu)
                    || holds_unchecked(&alpha.target, &phi, &nu.mapped(&alpha.map))
            })
        })
}

/// One failure of the satisfaction transfer between a reduct and its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub formula: Formula,
    pub translated: Formula,
    pub valuation: Valuation,
    pub in_reduct: bool,
    pub in_parent: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferReport {
    pub formulas: usize,
    pub valuations: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// For every corpus formula and every valuation of its free variables,
/// compares `reduct(H, M') |= phi` with `M' |= H(phi)`.
pub fn check_transfer(
    h: &LanguageMorphism,
    parent: &FiniteStructure,
    corpus: &[Formula],
) -> Result<TransferReport, SemanticsError> {
    let small = reduct(h, parent)?;
    let mut report = TransferReport::default();
    for phi in corpus {
        if !phi.well_formed(h.source()) {
            return Err(SemanticsError::IllFormed(h.source().name().to_string()));
        }
        let translated = h
            .translate_formula(phi)
            .map_err(|_| SemanticsError::IllFormed(h.source().name().to_string()))?;
        report.formulas += 1;
        for nu in Valuation::all(&phi.free_vars(), parent.size) {
            report.valuations += 1;
            let in_reduct = holds_unchecked(&small, phi, &nu);
            let in_parent = holds(parent, &translated, &nu)?;
            if in_reduct != in_parent {
                report.counterexamples.push(Counterexample {
                    formula: phi.clone(),
                    translated: translated.clone(),
                    valuation: nu,
                    in_reduct,
                    in_parent,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{Mode, SymbolAssignment};
    use crate::syntax::{app, var};

    fn z4_sig() -> Signature {
        Signature::new("Z")
            .with_function("plus", 2)
            .unwrap()
            .with_function("zero", 0)
            .unwrap()
    }

    /// (Z/n, + mod n, 0).
    fn cyclic(n: usize) -> FiniteStructure {
        let plus = tuples(n, 2).map(|t| (t[0] + t[1]) % n).collect();
        FiniteStructure::new(
            z4_sig(),
            n,
            BTreeMap::from([("plus".into(), plus), ("zero".into(), vec![0])]),
            BTreeMap::new(),
        )
        .unwrap()
    }

    fn chain(n: usize) -> FiniteStructure {
        let sig = Signature::new("C").with_relation("<", 2).unwrap();
        let lt = tuples(n, 2).filter(|t| t[0] < t[1]).collect();
        FiniteStructure::new(sig, n, BTreeMap::new(), BTreeMap::from([("<".into(), lt)])).unwrap()
    }

    #[test]
    fn eval_examples() {
        let m = cyclic(4);
        let nu = Valuation::new().with(Var(0), 3);
        assert_eq!(eval_term(&m, &var(0), &nu).unwrap(), 3);
        // direct table lookup: 3 + 3 = 6 = 2 mod 4
        assert_eq!(eval_term(&m, &app("plus", vec![var(0), var(0)]), &nu).unwrap(), 2);
        assert_eq!(eval_term(&m, &app("zero", vec![]), &Valuation::new()).unwrap(), 0);
        assert_eq!(eval_term(&m, &var(1), &nu), Err(SemanticsError::Unbound(Var(1))));
    }

    #[test]
    fn holds_examples() {
        let m = cyclic(4);
        assert!(holds(&m, &Formula::eq(var(0), var(0)), &Valuation::new().with(Var(0), 2)).unwrap());
        let halvable = Formula::exists(Var(1), Formula::eq(app("plus", vec![var(1), var(1)]), var(0)));
        // witnesses checked by hand: 1+1=2, 3+3=2, 0+0=0, 2+2=0; 1 is never a double
        assert!(!holds(&m, &halvable, &Valuation::new().with(Var(0), 1)).unwrap());
        assert!(holds(&m, &halvable, &Valuation::new().with(Var(0), 2)).unwrap());
        assert_eq!(
            holds(&m, &halvable, &Valuation::new()),
            Err(SemanticsError::Unbound(Var(0)))
        );
    }

    #[test]
    fn reduct_examples() {
        let src = Signature::new("S")
            .with_function("f", 1)
            .unwrap()
            .with_relation("P", 1)
            .unwrap();
        let h = LanguageMorphism::new(
            SymbolAssignment::new(src, z4_sig(), Mode::Strict)
                .map_function("f", app("plus", vec![var(0), var(0)]))
                .map_relation("P", Formula::eq(app("plus", vec![var(0), var(0)]), app("zero", vec![]))),
        )
        .unwrap();
        let r = reduct(&h, &cyclic(4)).unwrap();
        assert_eq!(r.size(), 4);
        assert_eq!(r.function_table("f").unwrap(), &[0, 2, 0, 2]);
        assert_eq!(r.relation_tuples("P"), vec![vec![0], vec![2]]);

        let id = LanguageMorphism::identity(&z4_sig());
        assert_eq!(reduct(&id, &cyclic(4)).unwrap(), cyclic(4));
    }

    #[test]
    fn homomorphism_examples() {
        let m = cyclic(4);
        let id = StructureMap::identity(&m);
        assert!(is_homomorphism(&id) && is_embedding(&id));

        // Z2 -> Z4, a |-> 2a
        let doubling = StructureMap::new(cyclic(2), cyclic(4), vec![0, 2]).unwrap();
        assert!(is_homomorphism(&doubling));
        assert!(is_embedding(&doubling));
        let shifted = StructureMap::new(cyclic(2), cyclic(4), vec![1, 3]).unwrap();
        assert!(!is_homomorphism(&shifted));

        let c = chain(2);
        let constant = StructureMap::new(c.clone(), c, vec![0, 0]).unwrap();
        assert!(!is_embedding(&constant));
    }

    #[test]
    fn bounded_elementarity() {
        let c3 = chain(3);
        assert!(is_elementary_up_to(&StructureMap::identity(&c3), 1, 4));
        // reversing the order of a chain and mapping by the reversal is an isomorphism
        let sig = c3.signature().clone();
        let rev = FiniteStructure::new(
            sig,
            3,
            BTreeMap::new(),
            BTreeMap::from([("<".into(), tuples(3, 2).filter(|t| t[0] > t[1]).collect())]),
        )
        .unwrap();
        let iso = StructureMap::new(c3, rev, vec![2, 1, 0]).unwrap();
        assert!(is_embedding(&iso));
        assert!(is_elementary_up_to(&iso, 1, 4));

        // the 1-chain embeds at the bottom of the 2-chain, where
        // exists x1 . x0 < x1 becomes true
        let inc = StructureMap::new(chain(1), chain(2), vec![0]).unwrap();
        assert!(is_embedding(&inc));
        assert!(is_elementary_up_to(&inc, 0, 3));
        assert!(!is_elementary_up_to(&inc, 1, 2));
        assert!(preserves_unary_up_to(&StructureMap::identity(&chain(2)), 1, 3));
    }

    #[test]
    fn transfer_on_atoms() {
        let src = Signature::new("S")
            .with_function("f", 1)
            .unwrap()
            .with_relation("P", 1)
            .unwrap();
        let h = LanguageMorphism::new(
            SymbolAssignment::new(src.clone(), z4_sig(), Mode::Strict)
                .map_function("f", app("plus", vec![var(0), var(0)]))
                .map_relation("P", Formula::eq(var(0), app("zero", vec![]))),
        )
        .unwrap();
        let corpus: Vec<Formula> = enumerate_formulas(
            &src,
            EnumBounds {
                max_size: 4,
                max_var_index: 1,
                max_qdepth: 1,
            },
        )
        .collect();
        let report = check_transfer(&h, &cyclic(4), &corpus).unwrap();
        assert!(report.passed());
        assert_eq!(report.formulas, corpus.len());
    }

    #[test]
    fn structure_validation() {
        let sig = z4_sig();
        let err = FiniteStructure::new(
            sig.clone(),
            2,
            BTreeMap::from([("plus".into(), vec![0, 1, 1]), ("zero".into(), vec![0])]),
            BTreeMap::new(),
        );
        assert!(matches!(err, Err(SemanticsError::TableSize { .. })));
        let err = FiniteStructure::new(
            sig,
            2,
            BTreeMap::from([("plus".into(), vec![0, 1, 1, 0])]),
            BTreeMap::new(),
        );
        assert_eq!(err, Err(SemanticsError::Uninterpreted("zero".into())));
    }

    #[test]
    fn order_checks() {
        assert!(chain(3).is_ordered());
        assert_eq!(chain(3).order_ranks(), Some(vec![0, 1, 2]));
        let sig = Signature::new("C").with_relation("<", 2).unwrap();
        let flat = FiniteStructure::new(sig, 2, BTreeMap::new(), BTreeMap::from([("<".into(), vec![])])).unwrap();
        assert_eq!(flat.order_check(), Err(OrderViolation::Trichotomy(0, 1)));
    }
}
