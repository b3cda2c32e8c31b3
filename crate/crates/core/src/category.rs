//! The category STR of all structures, built by the Grothendieck
//! construction over the reduct functor, and its variants.
//!
//! An object is a pair `(L, M)` with `M` an `L`-structure. A morphism
//! `(L, M) -> (L', N)` is a pair `(H, alpha)` with `H: L -> L'` a language
//! morphism and `alpha: E(H)(N) -> M`. Composition is
//! `(H', alpha') * (H, alpha) = (H' . H, alpha . E(H)(alpha'))`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::morphism::{LanguageMorphism, Mode, MorphismError};
use crate::ominimal::{QeError, QeStructure};
use crate::parser::{LookupError, Workspace};
use crate::random::{self, SigShape};
use crate::semantics::{
    is_elementary_up_to, is_homomorphism, preserves_unary_up_to, reduct, reduct_map, FiniteStructure, SemanticsError,
    StructureMap,
};
use crate::syntax::{EnumBounds, Formula, Signature, Term, Var, ORDER_SYMBOL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("morphisms are not composable: the first one's target is not the second one's source")]
    NotComposable,
    #[error("language morphism does not go from {expected_source} to {expected_target}")]
    LanguageMismatch {
        expected_source: String,
        expected_target: String,
    },
    #[error("alpha's source is not the reduct of the target structure")]
    AlphaSource,
    #[error("alpha's target is not the source structure")]
    AlphaTarget,
    #[error("finite and elimination-backed objects cannot be mixed")]
    KindMismatch,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error(transparent)]
    Lookup(#[from] LookupError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Finite(FiniteStructure),
    /// A reduct of the rationals as a model of DLO or ODAG.
    Qe(QeStructure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrObject {
    model: Model,
}

impl StrObject {
    pub fn finite(m: FiniteStructure) -> Self {
        StrObject {
            model: Model::Finite(m),
        }
    }

    pub fn qe(q: QeStructure) -> Self {
        StrObject { model: Model::Qe(q) }
    }

    pub fn lang(&self) -> &Signature {
        match &self.model {
            Model::Finite(m) => m.signature(),
            Model::Qe(q) => q.signature(),
        }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Structural equality: same vocabulary and the same interpretation.
    pub fn same_object(&self, other: &StrObject) -> bool {
        match (&self.model, &other.model) {
            (Model::Finite(a), Model::Finite(b)) => a.same_tables(b),
            (Model::Qe(a), Model::Qe(b)) => a.same_as(b),
            _ => false,
        }
    }

    /// `E(H)` applied to this object.
    pub fn reduct(&self, h: &LanguageMorphism) -> Result<StrObject, CategoryError> {
        Ok(match &self.model {
            Model::Finite(m) => StrObject::finite(reduct(h, m)?),
            Model::Qe(q) => StrObject::qe(q.reduct(h)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    Finite(StructureMap),
    /// The identity of an elimination-backed structure.
    QeIdentity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrMorphism {
    src: StrObject,
    dst: StrObject,
    h: LanguageMorphism,
    alpha: Alpha,
}

impl StrMorphism {
    /// `(h, alpha): src -> dst`; `h` must go from `src.lang()` to
    /// `dst.lang()` and `alpha` from the reduct of `dst` along `h` to `src`.
    pub fn new(src: StrObject, dst: StrObject, h: LanguageMorphism, alpha: Alpha) -> Result<Self, CategoryError> {
        if !h.source().same_vocabulary(src.lang()) || !h.target().same_vocabulary(dst.lang()) {
            return Err(CategoryError::LanguageMismatch {
                expected_source: src.lang().name().to_string(),
                expected_target: dst.lang().name().to_string(),
            });
        }
        let pulled = dst.reduct(&h)?;
        match (&alpha, &src.model, &pulled.model) {
            (Alpha::Finite(a), Model::Finite(m), Model::Finite(r)) => {
                if !a.source.same_tables(r) {
                    return Err(CategoryError::AlphaSource);
                }
                if !a.target.same_tables(m) {
                    return Err(CategoryError::AlphaTarget);
                }
            }
            (Alpha::QeIdentity, Model::Qe(_), Model::Qe(_)) => {
                if !pulled.same_object(&src) {
                    return Err(CategoryError::AlphaSource);
                }
            }
            _ => return Err(CategoryError::KindMismatch),
        }
        Ok(StrMorphism { src, dst, h, alpha })
    }

    /// `(h, id)` from the reduct of `dst` along `h` to `dst`.
    pub fn reading(dst: StrObject, h: LanguageMorphism) -> Result<Self, CategoryError> {
        let src = dst.reduct(&h)?;
        let alpha = match &src.model {
            Model::Finite(m) => Alpha::Finite(StructureMap::identity(m)),
            Model::Qe(_) => Alpha::QeIdentity,
        };
        StrMorphism::new(src, dst, h, alpha)
    }

    pub fn src(&self) -> &StrObject {
        &self.src
    }

    pub fn dst(&self) -> &StrObject {
        &self.dst
    }

    pub fn h(&self) -> &LanguageMorphism {
        &self.h
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    /// Equal `H` components (bound variables up to renaming) and equal maps.
    pub fn same_components(&self, other: &StrMorphism) -> bool {
        same_language_morphism(&self.h, &other.h)
            && match (&self.alpha, &other.alpha) {
                (Alpha::Finite(a), Alpha::Finite(b)) => a.map == b.map,
                (Alpha::QeIdentity, Alpha::QeIdentity) => true,
                _ => false,
            }
    }
}

impl fmt::Display for StrMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "({} -> {}, mode {:?})",
            self.src.lang().name(),
            self.dst.lang().name(),
            self.h.mode()
        )?;
        let a = self.h.assignment();
        for (s, t) in &a.fun_map {
            writeln!(f, "  fun {s} := {t}")?;
        }
        for (r, phi) in &a.rel_map {
            writeln!(f, "  rel {r} := {phi}")?;
        }
        match &self.alpha {
            Alpha::Finite(m) => write!(f, "  alpha = {:?}", m.map),
            Alpha::QeIdentity => write!(f, "  alpha = id"),
        }
    }
}

/// Same vocabularies, same function images, relation images equal up to
/// renaming of bound variables.
pub fn same_language_morphism(a: &LanguageMorphism, b: &LanguageMorphism) -> bool {
    let (x, y) = (a.assignment(), b.assignment());
    x.source.same_vocabulary(&y.source)
        && x.target.same_vocabulary(&y.target)
        && x.fun_map == y.fun_map
        && x.rel_map.len() == y.rel_map.len()
        && x.rel_map
            .iter()
            .all(|(r, phi)| y.rel_map.get(r).is_some_and(|psi| phi.alpha_eq(psi)))
}

/// The morphism a `strmorphism` document declares, over finite structures.
pub fn declared_str_morphism(ws: &Workspace, name: &str) -> Result<StrMorphism, CategoryError> {
    let d = ws.str_morphism(name)?;
    let h = ws.morphism(&d.via)?;
    let src = ws.structure(&d.source)?.clone();
    let dst = ws.structure(&d.target)?.clone();
    let pulled = reduct(&h, &dst)?;
    let alpha = StructureMap::new(pulled, src.clone(), d.alpha.clone())?;
    StrMorphism::new(StrObject::finite(src), StrObject::finite(dst), h, Alpha::Finite(alpha))
}

/// `g * f`, defined when `f.dst()` is `g.src()`.
pub fn compose_str(g: &StrMorphism, f: &StrMorphism) -> Result<StrMorphism, CategoryError> {
    if !f.dst.same_object(&g.src) {
        return Err(CategoryError::NotComposable);
    }
    let h = LanguageMorphism::compose(&g.h, &f.h)?;
    let alpha = match (&f.alpha, &g.alpha) {
        (Alpha::Finite(a), Alpha::Finite(a2)) => Alpha::Finite(a.after(&reduct_map(&f.h, a2)?)?),
        (Alpha::QeIdentity, Alpha::QeIdentity) => Alpha::QeIdentity,
        _ => return Err(CategoryError::KindMismatch),
    };
    Ok(StrMorphism {
        src: f.src.clone(),
        dst: g.dst.clone(),
        h,
        alpha,
    })
}

pub fn id_str(obj: &StrObject) -> StrMorphism {
    let alpha = match &obj.model {
        Model::Finite(m) => Alpha::Finite(StructureMap::identity(m)),
        Model::Qe(_) => Alpha::QeIdentity,
    };
    StrMorphism {
        src: obj.clone(),
        dst: obj.clone(),
        h: LanguageMorphism::identity(obj.lang()),
        alpha,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// `alpha` a homomorphism.
    Plain,
    /// `alpha` elementary.
    E,
    /// `alpha` preserves formulas with one free variable.
    E1,
    /// Languages with `<`, `H` an order extension.
    Ordered,
    /// As `Ordered`, with o-minimal structures.
    Omin,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Plain, Variant::E, Variant::E1, Variant::Ordered, Variant::Omin];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::E => "e",
            Variant::E1 => "e1",
            Variant::Ordered => "ordered",
            Variant::Omin => "omin",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn needs_order(self) -> bool {
        matches!(self, Variant::Ordered | Variant::Omin)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bounds for the bounded checks of the variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckBounds {
    /// Quantifier depth and size of the elementarity corpus.
    pub depth: usize,
    pub size: usize,
    /// Formulas decomposed when checking an elimination-backed structure.
    pub omin: EnumBounds,
}

impl Default for CheckBounds {
    fn default() -> Self {
        CheckBounds {
            depth: 1,
            size: 3,
            omin: EnumBounds {
                max_size: 3,
                max_var_index: 1,
                max_qdepth: 1,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrViolation {
    pub name: &'static str,
    pub detail: String,
}

impl fmt::Display for StrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.detail)
    }
}

fn ominimal_object(obj: &StrObject, bounds: &CheckBounds) -> Result<(), String> {
    match &obj.model {
        Model::Finite(m) => m.order_check().map_err(|v| v.to_string()),
        Model::Qe(q) => q.unary_witness(bounds.omin).map(|_| ()).map_err(|e| e.to_string()),
    }
}

/// Everything `m` violates in `variant`; empty iff it is a morphism there.
pub fn validate_str_morphism(m: &StrMorphism, variant: Variant, bounds: &CheckBounds) -> Vec<StrViolation> {
    let mut out = Vec::new();
    let mut push = |name, detail: String| out.push(StrViolation { name, detail });
    if let Alpha::Finite(a) = &m.alpha {
        if !is_homomorphism(a) {
            push("homomorphism", "alpha does not commute with the interpretations".into());
        }
        match variant {
            Variant::E if !is_elementary_up_to(a, bounds.depth, bounds.size) => push(
                "elementary",
                format!(
                    "alpha changes the truth of a formula of size <= {} and depth <= {}",
                    bounds.size, bounds.depth
                ),
            ),
            Variant::E1 if !preserves_unary_up_to(a, bounds.depth, bounds.size) => push(
                "unary",
                format!(
                    "alpha fails to preserve a unary formula of size <= {} and depth <= {}",
                    bounds.size, bounds.depth
                ),
            ),
            _ => {}
        }
    }
    if variant.needs_order() {
        if !m.src.lang().has_order() || !m.dst.lang().has_order() {
            push("order", "both languages must contain <".into());
        } else {
            let expected = Formula::Rel(ORDER_SYMBOL.into(), vec![Term::Var(Var(0)), Term::Var(Var(1))]);
            if m.h.relation_image(ORDER_SYMBOL) != Some(&expected) {
                push("order-extension", "H does not send < to x0 < x1".into());
            }
        }
    }
    if variant == Variant::Omin {
        for (which, obj) in [("source", &m.src), ("target", &m.dst)] {
            if let Err(e) = ominimal_object(obj, bounds) {
                push("o-minimal", format!("{which} structure: {e}"));
            }
        }
    }
    out
}

/// Bounds for generated cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarnessBounds {
    pub max_structure_size: usize,
    pub max_formula_size: usize,
    pub variant: Variant,
    pub check: CheckBounds,
}

impl Default for HarnessBounds {
    fn default() -> Self {
        HarnessBounds {
            max_structure_size: 4,
            max_formula_size: 12,
            variant: Variant::Plain,
            check: CheckBounds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawFailure {
    pub case: usize,
    pub law: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub seed: u64,
    pub cases: usize,
    pub checks: usize,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "seed {}: {} cases, {} checks, {} failures",
            self.seed,
            self.cases,
            self.checks,
            self.failures.len()
        )?;
        for fail in &self.failures {
            writeln!(f, "case {} [{}]\n{}", fail.case, fail.law, fail.detail)?;
        }
        Ok(())
    }
}

struct Checker {
    case: usize,
    checks: usize,
    failures: Vec<LawFailure>,
}

impl Checker {
    fn check(&mut self, law: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(LawFailure {
                case: self.case,
                law,
                detail: detail(),
            });
        }
    }
}

/// A random composable chain `L0 -> L1 -> L2 -> L3` of language morphisms.
pub fn random_chain(rng: &mut impl Rng, order: bool) -> Vec<LanguageMorphism> {
    let shape = SigShape::default();
    let sigs: Vec<Signature> = (0..4)
        .map(|i| random::random_signature(rng, &format!("L{i}"), shape))
        .collect();
    sigs.windows(2)
        .map(|w| {
            let mode = if rng.gen_bool(0.5) {
                Mode::Strict
            } else {
                Mode::Generalized
            };
            let h = random::random_morphism(rng, &w[0], &w[1], mode);
            if order {
                h.extend_with_order()
                    .expect("generated signatures have no function named <")
            } else {
                h
            }
        })
        .collect()
}

/// STR morphisms over a language chain, each `alpha` an isomorphism onto a
/// permuted copy of the reduct: `f[i]: (L_i, M_i) -> (L_{i+1}, M_{i+1})`.
pub fn random_str_chain(rng: &mut impl Rng, chain: &[LanguageMorphism], size: usize) -> Vec<StrMorphism> {
    let last = chain.last().expect("nonempty chain").target();
    let mut dst = random::random_structure(rng, last, size);
    let mut out = Vec::new();
    for h in chain.iter().rev() {
        let pulled = reduct(h, &dst).expect("generated morphisms land in the structure's language");
        let perm = random::random_permutation(rng, size);
        let src = random::isomorphic_copy(&pulled, &perm);
        let alpha = StructureMap::new(pulled, src.clone(), perm).expect("a permutation is a map");
        let f = StrMorphism::new(
            StrObject::finite(src.clone()),
            StrObject::finite(dst),
            h.clone(),
            Alpha::Finite(alpha),
        )
        .expect("alpha is built from the reduct");
        out.push(f);
        dst = src;
    }
    out.reverse();
    out
}

/// Checks identity and associativity laws in the category of languages and
/// in STR, functoriality of the reduct, and closure of the chosen variant
/// under composition, on `cases` random chains.
pub fn law_harness(seed: u64, cases: usize, bounds: HarnessBounds) -> LawReport {
    let mut rng = random::rng(seed);
    let mut ck = Checker {
        case: 0,
        checks: 0,
        failures: Vec::new(),
    };
    let order = bounds.variant.needs_order();
    for case in 0..cases {
        ck.case = case;
        let chain = random_chain(&mut rng, order);
        let (h1, h2, h3) = (&chain[0], &chain[1], &chain[2]);
        let show = |hs: &[&LanguageMorphism]| {
            hs.iter()
                .map(|h| crate::parser::print_morphism("H", h.assignment()))
                .collect::<Vec<_>>()
                .join("\n")
        };

        let id0 = LanguageMorphism::identity(h1.source());
        let id1 = LanguageMorphism::identity(h1.target());
        let c = |a, b| LanguageMorphism::compose(a, b).expect("chain is composable");
        ck.check("fol-left-identity", same_language_morphism(&c(&id1, h1), h1), || {
            show(&[h1])
        });
        ck.check("fol-right-identity", same_language_morphism(&c(h1, &id0), h1), || {
            show(&[h1])
        });
        let h32 = c(h3, h2);
        let h21 = c(h2, h1);
        let left = c(&h32, h1);
        let right = c(h3, &h21);
        ck.check("fol-associativity", same_language_morphism(&left, &right), || {
            show(&[h1, h2, h3])
        });

        let phi = random::random_formula(&mut rng, h1.source(), 3, bounds.max_formula_size, 2);
        let direct = h21.translate_formula(&phi).expect("well formed");
        let stepwise = h2
            .translate_formula(&h1.translate_formula(&phi).expect("well formed"))
            .expect("well formed");
        ck.check("extension-coherence", direct.alpha_eq(&stepwise), || {
            format!(
                "{}\nformula: {phi}\ncomposite: {direct}\nstepwise: {stepwise}",
                show(&[h1, h2])
            )
        });

        let size = rng.gen_range(1..=bounds.max_structure_size);
        let m2 = random::random_structure(&mut rng, h2.target(), size);
        let id2 = LanguageMorphism::identity(h2.target());
        ck.check(
            "reduct-identity",
            reduct(&id2, &m2).expect("ok").same_tables(&m2),
            || crate::parser::print_structure("M", &m2),
        );
        let once = reduct(&h21, &m2).expect("ok");
        let twice = reduct(h1, &reduct(h2, &m2).expect("ok")).expect("ok");
        ck.check("reduct-functoriality", once.same_tables(&twice), || {
            format!("{}\n{}", show(&[h1, h2]), crate::parser::print_structure("M", &m2))
        });

        let fs = random_str_chain(&mut rng, &chain, size);
        let (f1, f2, f3) = (&fs[0], &fs[1], &fs[2]);
        let s = |a: &StrMorphism, b: &StrMorphism| compose_str(a, b).expect("chain is composable");
        let l = s(&s(f3, f2), f1);
        let r = s(f3, &s(f2, f1));
        ck.check("str-associativity", l.same_components(&r), || format!("{l}\n{r}"));
        ck.check(
            "str-left-identity",
            s(&id_str(f1.dst()), f1).same_components(f1),
            || f1.to_string(),
        );
        ck.check(
            "str-right-identity",
            s(f1, &id_str(f1.src())).same_components(f1),
            || f1.to_string(),
        );
        for (name, m) in [("f1", f1.clone()), ("f3*f2*f1", l)] {
            let v = validate_str_morphism(&m, bounds.variant, &bounds.check);
            ck.check("variant-closure", v.is_empty(), || {
                let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("{name} in {}: {}\n{m}", bounds.variant, list.join("; "))
            });
        }
    }
    LawReport {
        seed,
        cases,
        checks: ck.checks,
        failures: ck.failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ominimal::Theory;
    use crate::semantics::tuples;
    use std::collections::BTreeMap;

    fn two_point(p: Vec<Vec<usize>>) -> FiniteStructure {
        let sig = Signature::new("U")
            .with_relation("P", 1)
            .unwrap()
            .with_relation("E", 2)
            .unwrap();
        FiniteStructure::new(
            sig,
            2,
            BTreeMap::new(),
            BTreeMap::from([("P".into(), p), ("E".into(), tuples(2, 2).collect())]),
        )
        .unwrap()
    }

    #[test]
    fn identity_laws_on_identities() {
        let m = StrObject::finite(two_point(vec![vec![0]]));
        let id = id_str(&m);
        assert!(compose_str(&id, &id).unwrap().same_components(&id));
        for v in Variant::ALL {
            let bad = validate_str_morphism(&id, v, &CheckBounds::default());
            let expected: Vec<&str> = match v {
                Variant::Ordered => vec!["order"],
                Variant::Omin => vec!["order", "o-minimal", "o-minimal"],
                _ => vec![],
            };
            assert_eq!(bad.iter().map(|x| x.name).collect::<Vec<_>>(), expected);
        }
    }

    #[test]
    fn reading_morphism_composes_to_identity_alpha() {
        let sig = random::random_signature(&mut random::rng(1), "A", SigShape::default());
        let mut rng = random::rng(2);
        let tgt = random::random_signature(&mut rng, "B", SigShape::default());
        let h = random::random_morphism(&mut rng, &sig, &tgt, Mode::Strict);
        let n = random::random_structure(&mut rng, &tgt, 3);
        let f = StrMorphism::reading(StrObject::finite(n.clone()), h.clone()).unwrap();
        let g = id_str(&StrObject::finite(n));
        let gf = compose_str(&g, &f).unwrap();
        let Alpha::Finite(a) = gf.alpha() else { panic!() };
        assert_eq!(a.map, vec![0, 1, 2]);
        assert!(same_language_morphism(gf.h(), &h));
        assert!(compose_str(&f, &g).is_err());
    }

    #[test]
    fn non_homomorphism_is_named() {
        let m = two_point(vec![vec![0]]);
        let id = LanguageMorphism::identity(m.signature());
        let swap = StructureMap::new(m.clone(), m.clone(), vec![1, 0]).unwrap();
        let f = StrMorphism::new(
            StrObject::finite(m.clone()),
            StrObject::finite(m),
            id,
            Alpha::Finite(swap),
        )
        .unwrap();
        let v = validate_str_morphism(&f, Variant::Plain, &CheckBounds::default());
        assert_eq!(v.iter().map(|x| x.name).collect::<Vec<_>>(), vec!["homomorphism"]);
    }

    #[test]
    fn unary_but_not_elementary() {
        // swapping the two points is an automorphism, so every element has
        // the same unary type and a constant map preserves all unary formulas;
        // it does not reflect x0 = x1
        let m = two_point(vec![]);
        let alpha = StructureMap::new(m.clone(), m.clone(), vec![0, 0]).unwrap();
        let f = StrMorphism::new(
            StrObject::finite(m.clone()),
            StrObject::finite(m.clone()),
            LanguageMorphism::identity(m.signature()),
            Alpha::Finite(alpha),
        )
        .unwrap();
        let b = CheckBounds::default();
        assert!(validate_str_morphism(&f, Variant::Plain, &b).is_empty());
        assert!(validate_str_morphism(&f, Variant::E1, &b).is_empty());
        let e = validate_str_morphism(&f, Variant::E, &b);
        assert_eq!(e.iter().map(|x| x.name).collect::<Vec<_>>(), vec!["elementary"]);
    }

    #[test]
    fn qe_reading_is_an_omin_morphism() {
        let odag = QeStructure::base(Theory::Odag);
        let to_dlo =
            LanguageMorphism::simple(&Theory::Dlo.signature(), &Theory::Odag.signature(), &BTreeMap::new()).unwrap();
        let f = StrMorphism::reading(StrObject::qe(odag), to_dlo).unwrap();
        assert!(validate_str_morphism(&f, Variant::Omin, &CheckBounds::default()).is_empty());
        let ff = compose_str(&id_str(f.dst()), &f).unwrap();
        assert!(ff.same_components(&f));
    }

    #[test]
    fn harness_is_deterministic_and_clean() {
        let a = law_harness(42, 20, HarnessBounds::default());
        let b = law_harness(42, 20, HarnessBounds::default());
        assert_eq!(a, b);
        assert!(a.passed(), "{a}");
        for v in [Variant::E1, Variant::Omin] {
            let r = law_harness(
                5,
                10,
                HarnessBounds {
                    variant: v,
                    max_structure_size: 3,
                    ..HarnessBounds::default()
                },
            );
            assert!(r.passed(), "{r}");
        }
    }
}
