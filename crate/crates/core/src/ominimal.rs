//! Quantifier elimination for dense linear orders (DLO) and ordered divisible
//! abelian groups (ODAG), both presented on the rationals, and canonical
//! interval decompositions of their unary definable sets.
//!
//! Formulas are compiled to boolean combinations of affine atoms `e = 0` and
//! `e < 0` with exact rational coefficients. [`eliminate`] removes quantifiers
//! innermost first: negation normal form, disjunctive normal form, then per
//! disjunct an equality is solved and substituted if one mentions the
//! variable, otherwise every lower bound is paired with every upper bound.
//! Density and the absence of endpoints make this complete for both theories.
//!
//! [`sampling_oracle`] decides the same formulas without [`eliminate`]: it
//! evaluates quantifiers by trying finitely many witnesses, namely the roots
//! of a set of affine expressions whose signs determine the body's truth,
//! their midpoints, and one point beyond each extreme.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::morphism::{LanguageMorphism, MorphismError};
use crate::semantics::{definable_set, FiniteStructure, OrderViolation};
use crate::syntax::{enumerate_formulas, EnumBounds, Formula, Signature, Term, Var, ORDER_SYMBOL};

pub type Rational = BigRational;

/// Hard cap on the number of disjuncts produced while normalizing.
pub const MAX_CASES: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QeError {
    #[error("symbol `{symbol}` is outside the {theory} signature")]
    OutsideTheory { symbol: String, theory: Theory },
    #[error("parameters missing for {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))]
    ParametersMissing(Vec<Var>),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("morphism does not land in the {0} language")]
    WrongTarget(Theory),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Theory {
    /// Dense linear order without endpoints; signature `{<}`.
    Dlo,
    /// Ordered divisible abelian group; signature `{plus/2, minus/1, zero/0, <}`.
    Odag,
}

impl Theory {
    pub fn name(self) -> &'static str {
        match self {
            Theory::Dlo => "DLO",
            Theory::Odag => "ODAG",
        }
    }

    pub fn signature(self) -> Signature {
        let sig = Signature::new(self.name());
        let sig = match self {
            Theory::Dlo => sig,
            Theory::Odag => sig
                .with_function("plus", 2)
                .and_then(|s| s.with_function("minus", 1))
                .and_then(|s| s.with_function("zero", 0))
                .expect("fixed signature"),
        };
        sig.with_relation(ORDER_SYMBOL, 2).expect("fixed signature")
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dlo" => Ok(Theory::Dlo),
            "odag" => Ok(Theory::Odag),
            other => Err(format!("unknown theory `{other}` (expected dlo or odag)")),
        }
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `sum c_i * x_i + constant`, zero coefficients never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearExpr {
    coeffs: BTreeMap<Var, Rational>,
    constant: Rational,
}

impl LinearExpr {
    pub fn constant(c: Rational) -> Self {
        LinearExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        LinearExpr {
            coeffs: BTreeMap::from([(v, Rational::one())]),
            constant: Rational::zero(),
        }
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (Var, Rational)>, constant: Rational) -> Self {
        let mut e = LinearExpr::constant(constant);
        for (v, c) in coeffs {
            e.add_term(v, c);
        }
        e
    }

    fn add_term(&mut self, v: Var, c: Rational) {
        let entry = self.coeffs.entry(v).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn coefficient(&self, v: Var) -> Rational {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn coefficients(&self) -> &BTreeMap<Var, Rational> {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn add(&self, other: &LinearExpr) -> LinearExpr {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(*v, c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn neg(&self) -> LinearExpr {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &LinearExpr) -> LinearExpr {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> LinearExpr {
        if k.is_zero() {
            return LinearExpr::constant(Rational::zero());
        }
        LinearExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces `v` by `e`.
    pub fn substitute(&self, v: Var, e: &LinearExpr) -> LinearExpr {
        match self.coeffs.get(&v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(&v);
                rest.add(&e.scale(c))
            }
        }
    }

    /// Replaces every variable bound in `env` by its value.
    pub fn substitute_values(&self, env: &BTreeMap<Var, Rational>) -> LinearExpr {
        let mut out = LinearExpr::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            match env.get(v) {
                Some(q) => out.constant += c * q,
                None => out.add_term(*v, c.clone()),
            }
        }
        out
    }

    /// Value under `env`, if every variable is bound.
    pub fn eval(&self, env: &BTreeMap<Var, Rational>) -> Option<Rational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * env.get(v)?;
        }
        Some(acc)
    }

    /// The expression `r` with `self = 0` iff `v = r`; `None` if `v` is absent.
    pub fn solve_for(&self, v: Var) -> Option<LinearExpr> {
        let c = self.coeffs.get(&v)?;
        let mut rest = self.clone();
        rest.coeffs.remove(&v);
        Some(rest.scale(&(-Rational::one() / c)))
    }

    fn leading(&self) -> Option<&Rational> {
        self.coeffs.values().next()
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            match (first, sign) {
                (true, "-") => write!(f, "-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_zero() {
            Ok(())
        } else if self.constant.is_negative() {
            write!(f, " - {}", -&self.constant)
        } else {
            write!(f, " + {}", self.constant)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    /// `expr = 0`
    Eq,
    /// `expr < 0`
    Lt,
}

/// `expr = 0` or `expr < 0` with at least one variable. Equalities are scaled
/// so the leading coefficient (lowest variable) is 1, inequalities so it is 1
/// or -1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearAtom {
    expr: LinearExpr,
    kind: AtomKind,
}

impl LinearAtom {
    /// Normalizes `expr ⋈ 0`; variable-free atoms fold to their truth value.
    pub fn build(expr: LinearExpr, kind: AtomKind) -> LinearFormula {
        let Some(lead) = expr.leading().cloned() else {
            let c = &expr.constant;
            return LinearFormula::constant(match kind {
                AtomKind::Eq => c.is_zero(),
                AtomKind::Lt => c.is_negative(),
            });
        };
        let k = match kind {
            AtomKind::Eq => Rational::one() / lead,
            AtomKind::Lt => Rational::one() / lead.abs(),
        };
        LinearFormula::Atom(LinearAtom {
            expr: expr.scale(&k),
            kind,
        })
    }

    pub fn expr(&self) -> &LinearExpr {
        &self.expr
    }

    pub fn kind(&self) -> AtomKind {
        self.kind
    }

    pub fn eval(&self, env: &BTreeMap<Var, Rational>) -> Option<bool> {
        let v = self.expr.eval(env)?;
        Some(match self.kind {
            AtomKind::Eq => v.is_zero(),
            AtomKind::Lt => v.is_negative(),
        })
    }
}

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            AtomKind::Eq => "=",
            AtomKind::Lt => "<",
        };
        write!(f, "{} {op} 0", self.expr)
    }
}

/// Boolean combinations of linear atoms, possibly quantified.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinearFormula {
    True,
    False,
    Atom(LinearAtom),
    Not(Box<LinearFormula>),
    And(Vec<LinearFormula>),
    Or(Vec<LinearFormula>),
    Exists(Var, Box<LinearFormula>),
}

impl LinearFormula {
    pub fn constant(b: bool) -> Self {
        if b {
            LinearFormula::True
        } else {
            LinearFormula::False
        }
    }

    fn negate(self) -> Self {
        match self {
            LinearFormula::True => LinearFormula::False,
            LinearFormula::False => LinearFormula::True,
            LinearFormula::Not(a) => *a,
            other => LinearFormula::Not(Box::new(other)),
        }
    }

    fn or_all(items: Vec<LinearFormula>) -> Self {
        let mut out = Vec::new();
        for f in items {
            match f {
                LinearFormula::True => return LinearFormula::True,
                LinearFormula::False => {}
                LinearFormula::Or(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => LinearFormula::False,
            1 => out.pop().unwrap(),
            _ => LinearFormula::Or(out),
        }
    }

    fn and_all(items: Vec<LinearFormula>) -> Self {
        let mut out = Vec::new();
        for f in items {
            match f {
                LinearFormula::False => return LinearFormula::False,
                LinearFormula::True => {}
                LinearFormula::And(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => LinearFormula::True,
            1 => out.pop().unwrap(),
            _ => LinearFormula::And(out),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            LinearFormula::True | LinearFormula::False | LinearFormula::Atom(_) => true,
            LinearFormula::Not(a) => a.is_quantifier_free(),
            LinearFormula::And(xs) | LinearFormula::Or(xs) => xs.iter().all(Self::is_quantifier_free),
            LinearFormula::Exists(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            LinearFormula::True | LinearFormula::False => BTreeSet::new(),
            LinearFormula::Atom(a) => a.expr.vars().collect(),
            LinearFormula::Not(a) => a.free_vars(),
            LinearFormula::And(xs) | LinearFormula::Or(xs) => xs.iter().flat_map(Self::free_vars).collect(),
            LinearFormula::Exists(x, a) => {
                let mut s = a.free_vars();
                s.remove(x);
                s
            }
        }
    }

    pub fn atoms(&self) -> Vec<&LinearAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a LinearAtom>) {
        match self {
            LinearFormula::True | LinearFormula::False => {}
            LinearFormula::Atom(a) => out.push(a),
            LinearFormula::Not(a) | LinearFormula::Exists(_, a) => a.collect_atoms(out),
            LinearFormula::And(xs) | LinearFormula::Or(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            LinearFormula::True | LinearFormula::False | LinearFormula::Atom(_) => 0,
            LinearFormula::Not(a) => a.quantifier_count(),
            LinearFormula::And(xs) | LinearFormula::Or(xs) => xs.iter().map(Self::quantifier_count).sum(),
            LinearFormula::Exists(_, a) => 1 + a.quantifier_count(),
        }
    }

    /// Truth of a quantifier-free formula under `env`; `None` if a variable
    /// is unbound or a quantifier is met.
    pub fn eval_qf(&self, env: &BTreeMap<Var, Rational>) -> Option<bool> {
        Some(match self {
            LinearFormula::True => true,
            LinearFormula::False => false,
            LinearFormula::Atom(a) => a.eval(env)?,
            LinearFormula::Not(a) => !a.eval_qf(env)?,
            LinearFormula::And(xs) => {
                let mut all = true;
                for x in xs {
                    all &= x.eval_qf(env)?;
                }
                all
            }
            LinearFormula::Or(xs) => {
                let mut any = false;
                for x in xs {
                    any |= x.eval_qf(env)?;
                }
                any
            }
            LinearFormula::Exists(..) => return None,
        })
    }
}

impl fmt::Display for LinearFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[LinearFormula], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            LinearFormula::True => write!(f, "true"),
            LinearFormula::False => write!(f, "false"),
            LinearFormula::Atom(a) => write!(f, "{a}"),
            LinearFormula::Not(a) => write!(f, "~{a}"),
            LinearFormula::And(xs) => join(f, xs, "&"),
            LinearFormula::Or(xs) => join(f, xs, "|"),
            LinearFormula::Exists(x, a) => write!(f, "exists {x} . {a}"),
        }
    }
}

fn outside(symbol: &str, theory: Theory) -> QeError {
    QeError::OutsideTheory {
        symbol: symbol.to_string(),
        theory,
    }
}

fn compile_term(t: &Term, params: &BTreeMap<Var, Rational>, theory: Theory) -> Result<LinearExpr, QeError> {
    match t {
        Term::Var(v) => Ok(match params.get(v) {
            Some(q) => LinearExpr::constant(q.clone()),
            None => LinearExpr::var(*v),
        }),
        Term::App(f, args) if theory == Theory::Odag => match (f.as_str(), args.as_slice()) {
            ("plus", [a, b]) => Ok(compile_term(a, params, theory)?.add(&compile_term(b, params, theory)?)),
            ("minus", [a]) => Ok(compile_term(a, params, theory)?.neg()),
            ("zero", []) => Ok(LinearExpr::constant(Rational::zero())),
            _ => Err(outside(f, theory)),
        },
        Term::App(f, _) => Err(outside(f, theory)),
    }
}

/// Compiles a formula over the theory signature into affine atoms.
/// Parameters are substituted as rational constants except where a
/// quantifier rebinds the same variable.
pub fn compile(phi: &Formula, params: &BTreeMap<Var, Rational>, theory: Theory) -> Result<LinearFormula, QeError> {
    Ok(match phi {
        Formula::Eq(l, r) => {
            let e = compile_term(l, params, theory)?.sub(&compile_term(r, params, theory)?);
            LinearAtom::build(e, AtomKind::Eq)
        }
        Formula::Rel(name, args) if name == ORDER_SYMBOL && args.len() == 2 => {
            let e = compile_term(&args[0], params, theory)?.sub(&compile_term(&args[1], params, theory)?);
            LinearAtom::build(e, AtomKind::Lt)
        }
        Formula::Rel(name, _) => return Err(outside(name, theory)),
        Formula::Not(a) => compile(a, params, theory)?.negate(),
        Formula::Or(a, b) => LinearFormula::or_all(vec![compile(a, params, theory)?, compile(b, params, theory)?]),
        Formula::Exists(x, a) => {
            let body = if params.contains_key(x) {
                let mut inner = params.clone();
                inner.remove(x);
                compile(a, &inner, theory)?
            } else {
                compile(a, params, theory)?
            };
            LinearFormula::Exists(*x, Box::new(body))
        }
    })
}

type Conjunct = BTreeSet<LinearAtom>;

fn push_atom(c: &mut Conjunct, f: LinearFormula) -> bool {
    match f {
        LinearFormula::True => true,
        LinearFormula::False => false,
        LinearFormula::Atom(a) => {
            c.insert(a);
            true
        }
        _ => unreachable!("atoms build to atoms or constants"),
    }
}

fn product(left: Vec<Conjunct>, right: Vec<Conjunct>) -> Result<Vec<Conjunct>, QeError> {
    if left.len().saturating_mul(right.len()) > MAX_CASES {
        return Err(QeError::Resource(format!(
            "more than {MAX_CASES} cases in disjunctive normal form"
        )));
    }
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in &left {
        for b in &right {
            let mut c = a.clone();
            c.extend(b.iter().cloned());
            out.push(c);
        }
    }
    Ok(out)
}

/// Disjunctive normal form of a quantifier-free formula (negated if `neg`),
/// with negated atoms rewritten as `~(e<0) = (-e<0) | (e=0)` and
/// `~(e=0) = (e<0) | (-e<0)`.
fn dnf(f: &LinearFormula, neg: bool) -> Result<Vec<Conjunct>, QeError> {
    Ok(match f {
        LinearFormula::True => {
            if neg {
                vec![]
            } else {
                vec![Conjunct::new()]
            }
        }
        LinearFormula::False => return dnf(&LinearFormula::True, !neg),
        LinearFormula::Atom(a) if !neg => vec![Conjunct::from([a.clone()])],
        LinearFormula::Atom(a) => {
            let (first, second) = match a.kind {
                AtomKind::Eq => (
                    LinearAtom::build(a.expr.clone(), AtomKind::Lt),
                    LinearAtom::build(a.expr.neg(), AtomKind::Lt),
                ),
                AtomKind::Lt => (
                    LinearAtom::build(a.expr.neg(), AtomKind::Lt),
                    LinearAtom::build(a.expr.clone(), AtomKind::Eq),
                ),
            };
            let mut out = Vec::new();
            for f in [first, second] {
                let mut c = Conjunct::new();
                if push_atom(&mut c, f) {
                    out.push(c);
                }
            }
            out
        }
        LinearFormula::Not(a) => dnf(a, !neg)?,
        LinearFormula::Or(xs) | LinearFormula::And(xs) => {
            let disjunctive = matches!(f, LinearFormula::Or(_)) != neg;
            if disjunctive {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(dnf(x, neg)?);
                    if out.len() > MAX_CASES {
                        return Err(QeError::Resource(format!(
                            "more than {MAX_CASES} cases in disjunctive normal form"
                        )));
                    }
                }
                out
            } else {
                let mut acc = vec![Conjunct::new()];
                for x in xs {
                    acc = product(acc, dnf(x, neg)?)?;
                }
                acc
            }
        }
        LinearFormula::Exists(..) => unreachable!("dnf is only taken of quantifier-free formulas"),
    })
}

/// Eliminates `x` from a conjunction of atoms. `None` if the conjunction is
/// found unsatisfiable.
fn eliminate_from_conjunct(c: &Conjunct, x: Var) -> Option<Conjunct> {
    let (with_x, mut rest): (Vec<&LinearAtom>, Vec<&LinearAtom>) =
        c.iter().partition(|a| !a.expr.coefficient(x).is_zero());
    let mut out: Conjunct = rest.drain(..).cloned().collect();
    if with_x.is_empty() {
        return Some(out);
    }
    if let Some(eq) = with_x.iter().find(|a| a.kind == AtomKind::Eq) {
        let value = eq.expr.solve_for(x).expect("x occurs in the equation");
        for a in &with_x {
            if std::ptr::eq(*a, *eq) {
                continue;
            }
            if !push_atom(&mut out, LinearAtom::build(a.expr.substitute(x, &value), a.kind)) {
                return None;
            }
        }
        return Some(out);
    }
    // c*x + r < 0: a lower bound on x when c < 0, an upper bound when c > 0
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for a in &with_x {
        let bound = a.expr.solve_for(x).expect("x occurs in the atom");
        if a.expr.coefficient(x).is_negative() {
            lower.push(bound);
        } else {
            upper.push(bound);
        }
    }
    for l in &lower {
        for u in &upper {
            if !push_atom(&mut out, LinearAtom::build(l.sub(u), AtomKind::Lt)) {
                return None;
            }
        }
    }
    Some(out)
}

fn from_dnf(conjuncts: impl IntoIterator<Item = Conjunct>) -> LinearFormula {
    let set: BTreeSet<Conjunct> = conjuncts.into_iter().collect();
    if set.iter().any(BTreeSet::is_empty) {
        return LinearFormula::True;
    }
    LinearFormula::or_all(
        set.into_iter()
            .map(|c| LinearFormula::and_all(c.into_iter().map(LinearFormula::Atom).collect()))
            .collect(),
    )
}

/// A quantifier-free formula equivalent to `f` over the same free variables.
pub fn eliminate(f: &LinearFormula) -> Result<LinearFormula, QeError> {
    Ok(match f {
        LinearFormula::True | LinearFormula::False | LinearFormula::Atom(_) => f.clone(),
        LinearFormula::Not(a) => eliminate(a)?.negate(),
        LinearFormula::And(xs) => LinearFormula::and_all(xs.iter().map(eliminate).collect::<Result<_, _>>()?),
        LinearFormula::Or(xs) => LinearFormula::or_all(xs.iter().map(eliminate).collect::<Result<_, _>>()?),
        LinearFormula::Exists(x, body) => {
            let body = eliminate(body)?;
            let cases = dnf(&body, false)?;
            from_dnf(cases.iter().filter_map(|c| eliminate_from_conjunct(c, *x)))
        }
    })
}

/// Input-size limits applied to user formulas before elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QeLimits {
    pub max_atoms: usize,
    pub max_quantifiers: usize,
}

impl Default for QeLimits {
    fn default() -> Self {
        QeLimits {
            max_atoms: 6,
            max_quantifiers: 3,
        }
    }
}

impl QeLimits {
    pub fn check(&self, f: &LinearFormula) -> Result<(), QeError> {
        let atoms = f.atoms().len();
        if atoms > self.max_atoms {
            return Err(QeError::Resource(format!("{atoms} atoms, limit is {}", self.max_atoms)));
        }
        let q = f.quantifier_count();
        if q > self.max_quantifiers {
            return Err(QeError::Resource(format!(
                "{q} quantifiers, limit is {}",
                self.max_quantifiers
            )));
        }
        Ok(())
    }
}

/// An interval endpoint; the infinities are symbolic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::Finite(q) => write!(f, "{q}"),
            Bound::PosInf => write!(f, "+inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Point(Rational),
    /// Open interval `(lo, hi)` with `lo < hi`.
    Open(Bound, Bound),
}

impl Component {
    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            Component::Point(p) => p == q,
            Component::Open(lo, hi) => {
                let above = match lo {
                    Bound::NegInf => true,
                    Bound::Finite(l) => l < q,
                    Bound::PosInf => false,
                };
                let below = match hi {
                    Bound::PosInf => true,
                    Bound::Finite(h) => q < h,
                    Bound::NegInf => false,
                };
                above && below
            }
        }
    }
}

/// A finite union of rational points and open intervals in canonical form:
/// components sorted and disjoint, and no interval-point-interval run that
/// could be merged into one interval.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalUnion {
    components: Vec<Component>,
}

enum Piece {
    Cell(Bound, Bound),
    Pt(Rational),
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { components: Vec::new() }
    }

    pub fn everything() -> Self {
        IntervalUnion {
            components: vec![Component::Open(Bound::NegInf, Bound::PosInf)],
        }
    }

    /// Canonical form of the union of arbitrary components.
    pub fn new(components: Vec<Component>) -> Self {
        IntervalUnion { components }.normalize()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.components.iter().any(|c| c.contains(q))
    }

    /// Finite endpoints and points, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = BTreeSet::new();
        for c in &self.components {
            match c {
                Component::Point(p) => {
                    out.insert(p.clone());
                }
                Component::Open(lo, hi) => {
                    for b in [lo, hi] {
                        if let Bound::Finite(q) = b {
                            out.insert(q.clone());
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn normalize(&self) -> Self {
        let valid: Vec<Component> = self
            .components
            .iter()
            .filter(|c| match c {
                Component::Open(lo, hi) => lo < hi,
                Component::Point(_) => true,
            })
            .cloned()
            .collect();
        let this = IntervalUnion { components: valid };
        IntervalUnion::from_membership(&this.breakpoints(), |q| this.contains(q))
    }

    pub fn is_canonical(&self) -> bool {
        self.components.iter().all(|c| match c {
            Component::Open(lo, hi) => lo < hi,
            Component::Point(_) => true,
        }) && self.normalize() == *self
    }

    /// Builds the canonical union of a set that is constant on each open cell
    /// between consecutive `breakpoints`, from its membership at the
    /// breakpoints and at one sample per cell.
    pub fn from_membership(breakpoints: &[Rational], member: impl Fn(&Rational) -> bool) -> Self {
        let mut bps: Vec<Rational> = breakpoints.to_vec();
        bps.sort();
        bps.dedup();
        let samples = cell_samples(&bps);
        let mut pieces: Vec<(Piece, bool)> = Vec::new();
        let bound_at = |i: usize| Bound::Finite(bps[i].clone());
        for (i, s) in samples.iter().enumerate() {
            let lo = if i == 0 { Bound::NegInf } else { bound_at(i - 1) };
            let hi = if i == bps.len() { Bound::PosInf } else { bound_at(i) };
            pieces.push((Piece::Cell(lo, hi), member(s)));
            if i < bps.len() {
                pieces.push((Piece::Pt(bps[i].clone()), member(&bps[i])));
            }
        }
        let mut components = Vec::new();
        let mut i = 0;
        while i < pieces.len() {
            if !pieces[i].1 {
                i += 1;
                continue;
            }
            let start = i;
            while i < pieces.len() && pieces[i].1 {
                i += 1;
            }
            let mut run: &[(Piece, bool)] = &pieces[start..i];
            if let Some((Piece::Pt(p), _)) = run.first() {
                components.push(Component::Point(p.clone()));
                run = &run[1..];
            }
            let trailing = match run.last() {
                Some((Piece::Pt(p), _)) => {
                    let p = p.clone();
                    run = &run[..run.len() - 1];
                    Some(p)
                }
                _ => None,
            };
            if let (Some((Piece::Cell(lo, _), _)), Some((Piece::Cell(_, hi), _))) = (run.first(), run.last()) {
                components.push(Component::Open(lo.clone(), hi.clone()));
            }
            if let Some(p) = trailing {
                components.push(Component::Point(p));
            }
        }
        IntervalUnion { components }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.components
                .iter()
                .map(|c| match c {
                    Component::Point(p) => json!({"point": rational_json(p)}),
                    Component::Open(lo, hi) => json!({"open": [bound_json(lo), bound_json(hi)]}),
                })
                .collect(),
        )
    }
}

pub fn rational_json(q: &Rational) -> Value {
    json!({"num": q.numer().to_string(), "den": q.denom().to_string()})
}

fn bound_json(b: &Bound) -> Value {
    match b {
        Bound::NegInf => json!("-inf"),
        Bound::PosInf => json!("+inf"),
        Bound::Finite(q) => rational_json(q),
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "∅");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            match c {
                Component::Point(p) => write!(f, "{{{p}}}")?,
                Component::Open(lo, hi) => write!(f, "({lo}, {hi})")?,
            }
        }
        Ok(())
    }
}

/// One sample inside each open cell cut out by sorted, distinct breakpoints:
/// one below the least, midpoints, one above the greatest.
pub fn cell_samples(bps: &[Rational]) -> Vec<Rational> {
    if bps.is_empty() {
        return vec![Rational::zero()];
    }
    let mut out = vec![&bps[0] - int(1)];
    for w in bps.windows(2) {
        out.push((&w[0] + &w[1]) / int(2));
    }
    out.push(&bps[bps.len() - 1] + int(1));
    out
}

/// Breakpoints together with the cell samples between and beyond them.
pub fn sample_points(breakpoints: &[Rational]) -> Vec<Rational> {
    let mut bps = breakpoints.to_vec();
    bps.sort();
    bps.dedup();
    let mut out = cell_samples(&bps);
    out.extend(bps);
    out.sort();
    out
}

const X0: Var = Var(0);

fn unary_compile(phi: &Formula, params: &BTreeMap<Var, Rational>, theory: Theory) -> Result<LinearFormula, QeError> {
    let compiled = compile(phi, params, theory)?;
    let missing: Vec<Var> = compiled.free_vars().into_iter().filter(|v| *v != X0).collect();
    if !missing.is_empty() {
        return Err(QeError::ParametersMissing(missing));
    }
    Ok(compiled)
}

/// Roots in `x0` of the atoms of a quantifier-free formula in `x0` alone.
fn roots_in_x0(qf: &LinearFormula) -> Vec<Rational> {
    let mut out: Vec<Rational> = qf
        .atoms()
        .into_iter()
        .filter_map(|a| a.expr.solve_for(X0))
        .map(|e| e.constant)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The set defined by `phi(x0)` after substituting `params`, as a canonical
/// interval union.
pub fn decompose_unary(
    phi: &Formula,
    params: &BTreeMap<Var, Rational>,
    theory: Theory,
) -> Result<IntervalUnion, QeError> {
    let compiled = unary_compile(phi, params, theory)?;
    Ok(decompose_compiled(&compiled)?.0)
}

/// Decomposition together with the breakpoints it was computed from.
pub fn decompose_compiled(compiled: &LinearFormula) -> Result<(IntervalUnion, Vec<Rational>), QeError> {
    let qf = eliminate(compiled)?;
    let bps = roots_in_x0(&qf);
    let union = IntervalUnion::from_membership(&bps, |q| {
        qf.eval_qf(&BTreeMap::from([(X0, q.clone())]))
            .expect("eliminated formula only mentions x0")
    });
    Ok((union, bps))
}

/// Same as [`decompose_unary`] with the input limits of `limits` enforced.
pub fn decompose_unary_limited(
    phi: &Formula,
    params: &BTreeMap<Var, Rational>,
    theory: Theory,
    limits: QeLimits,
) -> Result<IntervalUnion, QeError> {
    let compiled = unary_compile(phi, params, theory)?;
    limits.check(&compiled)?;
    Ok(decompose_compiled(&compiled)?.0)
}

/// Decomposes the set a source formula defines in the reduct of the theory's
/// rational model along `h`, by translating and decomposing in the theory.
pub fn decompose_via_morphism(
    h: &LanguageMorphism,
    phi: &Formula,
    params: &BTreeMap<Var, Rational>,
    theory: Theory,
) -> Result<IntervalUnion, QeError> {
    if !h.target().same_vocabulary(&theory.signature()) {
        return Err(QeError::WrongTarget(theory));
    }
    let translated = h.translate_formula(phi)?;
    decompose_unary(&translated, params, theory)
}

fn normalize_up_to_scale(e: LinearExpr) -> Option<LinearExpr> {
    let lead = e.leading()?.clone();
    Some(e.scale(&(Rational::one() / lead)))
}

/// Affine expressions in the variables not bound by `env` whose sign pattern
/// determines the truth of `f`. Quantified variables are projected out: for
/// `exists y . g`, the ordering of the roots in `y` of `g`'s expressions is
/// determined by the signs of each expression evaluated at every other root.
fn projection_exprs(f: &LinearFormula, env: &BTreeMap<Var, Rational>) -> BTreeSet<LinearExpr> {
    match f {
        LinearFormula::True | LinearFormula::False => BTreeSet::new(),
        LinearFormula::Atom(a) => normalize_up_to_scale(a.expr.substitute_values(env))
            .into_iter()
            .collect(),
        LinearFormula::Not(a) => projection_exprs(a, env),
        LinearFormula::And(xs) | LinearFormula::Or(xs) => xs.iter().flat_map(|x| projection_exprs(x, env)).collect(),
        LinearFormula::Exists(y, g) => {
            let mut inner_env = env.clone();
            inner_env.remove(y);
            let exprs = projection_exprs(g, &inner_env);
            let (with_y, mut out): (BTreeSet<LinearExpr>, BTreeSet<LinearExpr>) =
                exprs.into_iter().partition(|e| !e.coefficient(*y).is_zero());
            let roots: Vec<LinearExpr> = with_y.iter().map(|e| e.solve_for(*y).expect("y occurs")).collect();
            for (i, e) in with_y.iter().enumerate() {
                for (j, r) in roots.iter().enumerate() {
                    if i != j {
                        out.extend(normalize_up_to_scale(e.substitute(*y, r)));
                    }
                }
            }
            out
        }
    }
}

fn candidates(body: &LinearFormula, x: Var, env: &BTreeMap<Var, Rational>) -> Vec<Rational> {
    let mut inner_env = env.clone();
    inner_env.remove(&x);
    let mut roots: Vec<Rational> = projection_exprs(body, &inner_env)
        .into_iter()
        .filter_map(|e| e.solve_for(x))
        .filter(|r| r.is_constant())
        .map(|r| r.constant)
        .collect();
    roots.sort();
    roots.dedup();
    sample_points(&roots)
}

fn oracle_holds(f: &LinearFormula, env: &mut BTreeMap<Var, Rational>) -> bool {
    match f {
        LinearFormula::True => true,
        LinearFormula::False => false,
        LinearFormula::Atom(a) => a.eval(env).expect("every variable is bound during oracle evaluation"),
        LinearFormula::Not(a) => !oracle_holds(a, env),
        LinearFormula::And(xs) => xs.iter().all(|x| oracle_holds(x, env)),
        LinearFormula::Or(xs) => xs.iter().any(|x| oracle_holds(x, env)),
        LinearFormula::Exists(x, body) => {
            let saved = env.remove(x);
            let found = candidates(body, *x, env).into_iter().any(|c| {
                env.insert(*x, c);
                oracle_holds(body, env)
            });
            env.remove(x);
            if let Some(v) = saved {
                env.insert(*x, v);
            }
            found
        }
    }
}

/// Membership of each sample in the set `phi(x0)` defines, decided without
/// [`eliminate`].
pub fn sampling_oracle(
    phi: &Formula,
    params: &BTreeMap<Var, Rational>,
    theory: Theory,
    samples: &[Rational],
) -> Result<Vec<bool>, QeError> {
    let compiled = unary_compile(phi, params, theory)?;
    Ok(oracle_on_compiled(&compiled, samples))
}

pub fn oracle_on_compiled(compiled: &LinearFormula, samples: &[Rational]) -> Vec<bool> {
    samples
        .iter()
        .map(|s| oracle_holds(compiled, &mut BTreeMap::from([(X0, s.clone())])))
        .collect()
}

/// Breakpoints in `x0` that the oracle itself considers relevant.
pub fn oracle_breakpoints(compiled: &LinearFormula) -> Vec<Rational> {
    let mut out: Vec<Rational> = projection_exprs(compiled, &BTreeMap::new())
        .into_iter()
        .filter_map(|e| e.solve_for(X0))
        .filter(|r| r.is_constant())
        .map(|r| r.constant)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A reduct of a theory's rational model: the structure `E(view)(Q)` over
/// `view.source()`. Satisfaction is decided by elimination, never by
/// enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QeStructure {
    theory: Theory,
    view: LanguageMorphism,
}

impl QeStructure {
    /// The rational model of the theory itself.
    pub fn base(theory: Theory) -> Self {
        QeStructure {
            theory,
            view: LanguageMorphism::identity(&theory.signature()),
        }
    }

    pub fn new(theory: Theory, view: LanguageMorphism) -> Result<Self, QeError> {
        if !view.target().same_vocabulary(&theory.signature()) {
            return Err(QeError::WrongTarget(theory));
        }
        Ok(QeStructure { theory, view })
    }

    pub fn theory(&self) -> Theory {
        self.theory
    }

    pub fn view(&self) -> &LanguageMorphism {
        &self.view
    }

    pub fn signature(&self) -> &Signature {
        self.view.source()
    }

    /// Equality as structures: the same theory and the same interpretation
    /// of every symbol, up to renaming of bound variables.
    pub fn same_as(&self, other: &QeStructure) -> bool {
        let (a, b) = (self.view.assignment(), other.view.assignment());
        self.theory == other.theory
            && a.source.same_vocabulary(&b.source)
            && a.fun_map == b.fun_map
            && a.rel_map.len() == b.rel_map.len()
            && a.rel_map
                .iter()
                .all(|(r, phi)| b.rel_map.get(r).is_some_and(|psi| phi.alpha_eq(psi)))
    }

    /// `E(H)(self)`, presented through the composite view.
    pub fn reduct(&self, h: &LanguageMorphism) -> Result<QeStructure, QeError> {
        Ok(QeStructure {
            theory: self.theory,
            view: LanguageMorphism::compose(&self.view, h)?,
        })
    }

    pub fn definable_set(&self, phi: &Formula, params: &BTreeMap<Var, Rational>) -> Result<IntervalUnion, QeError> {
        decompose_via_morphism(&self.view, phi, params, self.theory)
    }

    /// Truth of `phi` when its free variables take the given rational values.
    pub fn holds(&self, phi: &Formula, values: &BTreeMap<Var, Rational>) -> Result<bool, QeError> {
        let translated = self.view.translate_formula(phi)?;
        let compiled = compile(&translated, values, self.theory)?;
        let missing: Vec<Var> = compiled.free_vars().into_iter().collect();
        if !missing.is_empty() {
            return Err(QeError::ParametersMissing(missing));
        }
        Ok(eliminate(&compiled)?
            .eval_qf(&BTreeMap::new())
            .expect("sentences eliminate to constants"))
    }

    /// Decomposes every unary formula of the view's source within `bounds`;
    /// each result is a canonical finite union.
    pub fn unary_witness(&self, bounds: EnumBounds) -> Result<Vec<(Formula, IntervalUnion)>, QeError> {
        let mut out = Vec::new();
        for phi in enumerate_formulas(self.signature(), bounds) {
            if phi.free_vars().iter().all(|v| *v == X0) {
                let set = self.definable_set(&phi, &BTreeMap::new())?;
                out.push((phi, set));
            }
        }
        Ok(out)
    }
}

/// Definable unary sets of a finite ordered structure, each written as a
/// union of points placed at the elements' positions in the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteOminimalityWitness {
    pub sets: Vec<(Formula, IntervalUnion)>,
}

/// A finite structure is o-minimal iff `<` is a strict total order. The
/// witness lists the distinct unary sets defined by formulas within `bounds`.
pub fn is_ominimal_finite(m: &FiniteStructure, bounds: EnumBounds) -> Result<FiniteOminimalityWitness, OrderViolation> {
    m.order_check()?;
    let ranks = m.order_ranks().expect("order checked");
    let mut seen = BTreeSet::new();
    let mut sets = Vec::new();
    for phi in enumerate_formulas(m.signature(), bounds) {
        if phi.free_vars() != BTreeSet::from([X0]) {
            continue;
        }
        let members = definable_set(m, &phi, X0).expect("formula is over the structure's signature");
        if seen.insert(members.clone()) {
            let union = IntervalUnion::new(
                members
                    .iter()
                    .map(|a| Component::Point(int(ranks[*a] as i64)))
                    .collect(),
            );
            sets.push((phi, union));
        }
    }
    Ok(FiniteOminimalityWitness { sets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{Mode, SymbolAssignment};
    use crate::semantics::tuples;
    use crate::syntax::{app, var};

    fn plus(a: Term, b: Term) -> Term {
        app("plus", vec![a, b])
    }

    fn zero() -> Term {
        app("zero", vec![])
    }

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    fn atom(coeffs: &[(u32, i64)], c: i64, kind: AtomKind) -> LinearFormula {
        LinearAtom::build(
            LinearExpr::from_parts(coeffs.iter().map(|(v, k)| (Var(*v), int(*k))), int(c)),
            kind,
        )
    }

    #[test]
    fn compile_examples() {
        let none = BTreeMap::new();
        let t = plus(var(0), plus(var(0), var(0)));
        let e = compile_term(&t, &none, Theory::Odag).unwrap();
        assert_eq!(e, LinearExpr::from_parts([(Var(0), int(3))], int(0)));

        let phi = Formula::lt(app("minus", vec![var(0)]), zero());
        // -x0 < 0, i.e. x0 > 0
        assert_eq!(
            compile(&phi, &none, Theory::Odag).unwrap(),
            atom(&[(0, -1)], 0, AtomKind::Lt)
        );

        let params = BTreeMap::from([(Var(1), q(1, 2))]);
        let phi = Formula::eq(plus(var(0), var(1)), zero());
        let expected = LinearAtom::build(LinearExpr::from_parts([(Var(0), int(1))], q(1, 2)), AtomKind::Eq);
        assert_eq!(compile(&phi, &params, Theory::Odag).unwrap(), expected);

        assert!(matches!(
            compile(&Formula::eq(zero(), var(0)), &none, Theory::Dlo),
            Err(QeError::OutsideTheory { .. })
        ));
    }

    #[test]
    fn compile_respects_shadowing() {
        let params = BTreeMap::from([(Var(1), q(5, 1))]);
        let phi = Formula::exists(Var(1), Formula::lt(var(0), var(1)));
        let c = compile(&phi, &params, Theory::Dlo).unwrap();
        assert_eq!(c.free_vars(), BTreeSet::from([Var(0)]));
        assert_eq!(eliminate(&c).unwrap(), LinearFormula::True);
    }

    #[test]
    fn eliminate_examples() {
        let none = BTreeMap::new();
        // exists x1 . x0 < x1 & x1 < x2  ==>  x0 < x2
        let phi = Formula::exists(
            Var(1),
            Formula::and(Formula::lt(var(0), var(1)), Formula::lt(var(1), var(2))),
        );
        let out = eliminate(&compile(&phi, &none, Theory::Dlo).unwrap()).unwrap();
        assert_eq!(out, atom(&[(0, 1), (2, -1)], 0, AtomKind::Lt));

        // exists x1 . x1 + x1 = x0 & 0 < x1  ==>  0 < x0
        let phi = Formula::exists(
            Var(1),
            Formula::and(Formula::eq(plus(var(1), var(1)), var(0)), Formula::lt(zero(), var(1))),
        );
        let out = eliminate(&compile(&phi, &none, Theory::Odag).unwrap()).unwrap();
        assert_eq!(out, atom(&[(0, -1)], 0, AtomKind::Lt));

        // exists x1 . x1 < x0  ==>  true
        let phi = Formula::exists(Var(1), Formula::lt(var(1), var(0)));
        assert_eq!(
            eliminate(&compile(&phi, &none, Theory::Dlo).unwrap()).unwrap(),
            LinearFormula::True
        );
    }

    #[test]
    fn decompose_examples() {
        let none = BTreeMap::new();
        let params = BTreeMap::from([(Var(1), q(1, 1))]);
        // 0 < x0 & x0 < x1 with x1 = 1
        let phi = Formula::and(Formula::lt(zero(), var(0)), Formula::lt(var(0), var(1)));
        let u = decompose_unary(&phi, &params, Theory::Odag).unwrap();
        assert_eq!(
            u.components(),
            &[Component::Open(Bound::Finite(q(0, 1)), Bound::Finite(q(1, 1)))]
        );

        let phi = Formula::not(Formula::eq(var(0), var(0)));
        assert!(decompose_unary(&phi, &none, Theory::Dlo).unwrap().is_empty());

        // x0 + x0 < x1 & 0 < x0 with x1 = 1: (0, 1/2)
        let phi = Formula::and(Formula::lt(plus(var(0), var(0)), var(1)), Formula::lt(zero(), var(0)));
        let u = decompose_unary(&phi, &params, Theory::Odag).unwrap();
        assert_eq!(
            u.components(),
            &[Component::Open(Bound::Finite(q(0, 1)), Bound::Finite(q(1, 2)))]
        );
        let oracle = sampling_oracle(&phi, &params, Theory::Odag, &sample_points(&u.breakpoints())).unwrap();
        let direct: Vec<bool> = sample_points(&u.breakpoints()).iter().map(|s| u.contains(s)).collect();
        assert_eq!(oracle, direct);

        let err = decompose_unary(&phi, &none, Theory::Odag);
        assert_eq!(err, Err(QeError::ParametersMissing(vec![Var(1)])));
    }

    #[test]
    fn interval_display() {
        let u = IntervalUnion::new(vec![
            Component::Open(Bound::Finite(q(1, 2)), Bound::PosInf),
            Component::Point(q(0, 1)),
        ]);
        assert_eq!(u.to_string(), "{0} ∪ (1/2, +inf)");
        assert_eq!(IntervalUnion::empty().to_string(), "∅");
    }

    #[test]
    fn interval_normalization_merges() {
        let a = Bound::Finite(q(0, 1));
        let b = Bound::Finite(q(1, 1));
        let u = IntervalUnion::new(vec![
            Component::Open(Bound::NegInf, a.clone()),
            Component::Point(q(0, 1)),
            Component::Open(a.clone(), b.clone()),
        ]);
        assert_eq!(u.components(), &[Component::Open(Bound::NegInf, b.clone())]);
        // a half-open run stays split
        let u = IntervalUnion::new(vec![Component::Point(q(0, 1)), Component::Open(a.clone(), b.clone())]);
        assert_eq!(u.components().len(), 2);
        assert!(u.is_canonical());
        // overlapping input
        let u = IntervalUnion::new(vec![
            Component::Open(a.clone(), Bound::Finite(q(3, 1))),
            Component::Open(b.clone(), Bound::Finite(q(5, 1))),
        ]);
        assert_eq!(u.components(), &[Component::Open(a, Bound::Finite(q(5, 1)))]);
        let noncanon = IntervalUnion {
            components: vec![Component::Point(q(0, 1)), Component::Point(q(0, 1))],
        };
        assert!(!noncanon.is_canonical());
    }

    #[test]
    fn oracle_examples() {
        let none = BTreeMap::new();
        let params = BTreeMap::from([(Var(1), q(1, 1))]);
        let phi = Formula::and(Formula::lt(zero(), var(0)), Formula::lt(var(0), var(1)));
        let bits = sampling_oracle(&phi, &params, Theory::Odag, &[q(-1, 1), q(1, 2), q(2, 1)]).unwrap();
        assert_eq!(bits, vec![false, true, false]);
        let empty = Formula::not(Formula::eq(var(0), var(0)));
        let bits = sampling_oracle(&empty, &none, Theory::Dlo, &[q(-1, 1), q(0, 1), q(7, 3)]).unwrap();
        assert_eq!(bits, vec![false, false, false]);
    }

    #[test]
    fn oracle_handles_nested_quantifiers() {
        // exists x1 . exists x2 . x1 + x1 = x0 & x2 + x2 + x2 = x1 & 0 < x2 : x0 > 0
        let phi = Formula::exists(
            Var(1),
            Formula::exists(
                Var(2),
                Formula::and(
                    Formula::and(
                        Formula::eq(plus(var(1), var(1)), var(0)),
                        Formula::eq(plus(var(2), plus(var(2), var(2))), var(1)),
                    ),
                    Formula::lt(zero(), var(2)),
                ),
            ),
        );
        let none = BTreeMap::new();
        let u = decompose_unary(&phi, &none, Theory::Odag).unwrap();
        assert_eq!(u.to_string(), "(0, +inf)");
        let samples = [q(-1, 1), q(0, 1), q(1, 7)];
        assert_eq!(
            sampling_oracle(&phi, &none, Theory::Odag, &samples).unwrap(),
            vec![false, false, true]
        );
    }

    #[test]
    fn via_morphism_examples() {
        let src = Signature::new("G").with_function("g", 1).unwrap();
        let target = Theory::Odag.signature();
        let mut target_no_order = Signature::new("ODAG");
        for (f, n) in target.functions() {
            target_no_order.add_function(f, n).unwrap();
        }
        let h = LanguageMorphism::new(
            SymbolAssignment::new(src, target_no_order, Mode::Strict)
                .map_function("g", plus(var(0), plus(var(0), var(0)))),
        )
        .unwrap()
        .extend_with_order()
        .unwrap();
        let none = BTreeMap::new();
        let positive = Formula::lt(app("g", vec![var(0)]), app("g", vec![app("g", vec![var(0)])]));
        let u = decompose_via_morphism(&h, &positive, &none, Theory::Odag).unwrap();
        assert_eq!(u.to_string(), "(0, +inf)");

        let fixed = Formula::eq(app("g", vec![var(0)]), var(0));
        let u = decompose_via_morphism(&h, &fixed, &none, Theory::Odag).unwrap();
        assert_eq!(u.to_string(), "{0}");
    }

    #[test]
    fn finite_ominimality() {
        let sig = Signature::new("C")
            .with_relation("<", 2)
            .unwrap()
            .with_relation("P", 1)
            .unwrap();
        let chain = |n: usize, p: Vec<Vec<usize>>| {
            FiniteStructure::new(
                sig.clone(),
                n,
                BTreeMap::new(),
                BTreeMap::from([
                    ("<".into(), tuples(n, 2).filter(|t| t[0] < t[1]).collect()),
                    ("P".into(), p),
                ]),
            )
            .unwrap()
        };
        let bounds = EnumBounds {
            max_size: 2,
            max_var_index: 1,
            max_qdepth: 1,
        };
        assert!(is_ominimal_finite(&chain(3, vec![]), bounds).is_ok());
        let w = is_ominimal_finite(&chain(2, vec![vec![1]]), bounds).unwrap();
        let p = Formula::rel("P", vec![var(0)]);
        let (_, set) = w.sets.iter().find(|(f, _)| *f == p).unwrap();
        assert_eq!(set.components(), &[Component::Point(q(1, 1))]);

        let flat = FiniteStructure::new(
            sig.clone(),
            2,
            BTreeMap::new(),
            BTreeMap::from([("<".into(), vec![]), ("P".into(), vec![])]),
        )
        .unwrap();
        assert_eq!(
            is_ominimal_finite(&flat, bounds).unwrap_err(),
            OrderViolation::Trichotomy(0, 1)
        );
    }

    #[test]
    fn qe_structure_reduct_and_holds() {
        let base = QeStructure::base(Theory::Odag);
        let none = BTreeMap::new();
        // every element is halvable in the divisible group
        let halvable = Formula::forall(
            Var(0),
            Formula::exists(Var(1), Formula::eq(plus(var(1), var(1)), var(0))),
        );
        assert!(base.holds(&halvable, &none).unwrap());
        let dlo = base
            .reduct(
                &LanguageMorphism::simple(&Theory::Dlo.signature(), &Theory::Odag.signature(), &BTreeMap::new())
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(dlo.signature().name(), "DLO");
        let no_max = Formula::forall(Var(0), Formula::exists(Var(1), Formula::lt(var(0), var(1))));
        assert!(dlo.holds(&no_max, &none).unwrap());
    }
}
