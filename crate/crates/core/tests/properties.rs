use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;

use folcat_core::category::{random_chain, validate_str_morphism, Alpha, CheckBounds, StrMorphism, StrObject, Variant};
use folcat_core::morphism::{LanguageMorphism, Mode};
use folcat_core::ominimal::{decompose_unary, sample_points, sampling_oracle, Theory};
use folcat_core::parser::{parse_formula, print_structure};
use folcat_core::random::{
    random_formula, random_morphism, random_permutation, random_signature, random_structure, random_term,
    random_theory_case, rng, SigShape,
};
use folcat_core::semantics::{eval_term, holds, reduct, StructureMap, Valuation};
use folcat_core::syntax::{enumerate_formulas, EnumBounds, Formula, SubstMode, Term, Var};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

fn sig(seed: u64, order: bool) -> folcat_core::syntax::Signature {
    random_signature(
        &mut rng(seed),
        "L",
        SigShape {
            order,
            ..SigShape::default()
        },
    )
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn exists_removes_exactly_its_variable(seed in any::<u64>(), x in 0u32..4) {
        let mut r = rng(seed);
        let s = sig(seed, false);
        let phi = random_formula(&mut r, &s, 4, 12, 2);
        let mut expected = phi.free_vars();
        expected.remove(&Var(x));
        prop_assert_eq!(Formula::exists(Var(x), phi).free_vars(), expected);
    }

    #[test]
    fn identity_substitution(seed in any::<u64>(), n in 1u32..5) {
        let mut r = rng(seed);
        let s = sig(seed, false);
        let vars: Vec<Var> = (0..n).map(Var).collect();
        let ids: Vec<Term> = vars.iter().map(|v| Term::Var(*v)).collect();
        let t = random_term(&mut r, &s, &vars, 6);
        prop_assert_eq!(t.substitute(&ids).unwrap(), t);
    }

    #[test]
    fn generalized_substitution_never_captures(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = sig(seed, false);
        let phi = random_formula(&mut r, &s, 3, 10, 2);
        let vars: Vec<Var> = (0..3).map(Var).collect();
        let args: Vec<Term> = (0..3).map(|_| random_term(&mut r, &s, &vars, 2)).collect();
        let substituted = phi.substitute(&args, SubstMode::Generalized).unwrap();
        let size = r.gen_range(1..=3);
        let m = random_structure(&mut r, &s, size);
        for nu in Valuation::all(&vars.iter().copied().collect(), size) {
            let mut inner = Valuation::new();
            for (i, a) in args.iter().enumerate() {
                inner = inner.with(Var(i as u32), eval_term(&m, a, &nu).unwrap());
            }
            prop_assert_eq!(holds(&m, &substituted, &nu).unwrap(), holds(&m, &phi, &inner).unwrap());
        }
    }

    #[test]
    fn printing_is_injective_and_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = sig(seed, true);
        let a = random_formula(&mut r, &s, 3, 12, 2);
        let b = random_formula(&mut r, &s, 3, 12, 2);
        prop_assert_eq!(parse_formula(&a.to_string(), &s).unwrap(), a.clone());
        prop_assert_eq!(a == b, a.to_string() == b.to_string());
    }

    #[test]
    fn identity_and_associativity_of_composition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let chain = random_chain(&mut r, false);
        let (h, h2, h3) = (&chain[0], &chain[1], &chain[2]);
        let corpus: Vec<Formula> = (0..10).map(|_| random_formula(&mut r, h.source(), 3, 10, 2)).collect();
        let left_id = LanguageMorphism::compose(&LanguageMorphism::identity(h.target()), h).unwrap();
        let right_id = LanguageMorphism::compose(h, &LanguageMorphism::identity(h.source())).unwrap();
        let left = LanguageMorphism::compose(&LanguageMorphism::compose(h3, h2).unwrap(), h).unwrap();
        let right = LanguageMorphism::compose(h3, &LanguageMorphism::compose(h2, h).unwrap()).unwrap();
        for phi in &corpus {
            let image = h.translate_formula(phi).unwrap();
            prop_assert_eq!(&left_id.translate_formula(phi).unwrap(), &image);
            prop_assert_eq!(&right_id.translate_formula(phi).unwrap(), &image);
        }
        prop_assert!(left.agrees_on(&right, &corpus));
    }

    #[test]
    fn reduct_keeps_size_and_order(seed in any::<u64>(), size in 1usize..5) {
        let mut r = rng(seed);
        let (l, l2) = (sig(seed, false), sig(seed ^ 1, false));
        let md = if r.gen_bool(0.5) { Mode::Strict } else { Mode::Generalized };
        let h = random_morphism(&mut r, &l, &l2.renamed("L2"), md).extend_with_order().unwrap();
        let m = random_structure(&mut r, h.target(), size);
        let red = reduct(&h, &m).unwrap();
        prop_assert_eq!(red.size(), m.size());
        prop_assert!(red.is_ordered());
        prop_assert_eq!(red.relation_tuples("<"), m.relation_tuples("<"));
    }

    #[test]
    fn variants_are_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let chain = random_chain(&mut r, false);
        let h = &chain[0];
        let size = r.gen_range(1..=3);
        let dst = random_structure(&mut r, h.target(), size);
        let pulled = reduct(h, &dst).unwrap();
        // Either a permuted copy or an arbitrary map into a random structure.
        let (src, map) = if r.gen_bool(0.5) {
            let perm = random_permutation(&mut r, size);
            (folcat_core::random::isomorphic_copy(&pulled, &perm), perm)
        } else {
            let n = r.gen_range(1..=3);
            (random_structure(&mut r, h.source(), n), (0..size).map(|_| r.gen_range(0..n)).collect())
        };
        let alpha = StructureMap::new(pulled, src.clone(), map).unwrap();
        let m = StrMorphism::new(StrObject::finite(src), StrObject::finite(dst), h.clone(), Alpha::Finite(alpha)).unwrap();
        let bounds = CheckBounds::default();
        let valid = |v| validate_str_morphism(&m, v, &bounds).is_empty();
        let (plain, e, e1) = (valid(Variant::Plain), valid(Variant::E), valid(Variant::E1));
        prop_assert!(!e || e1, "valid in e but not e1");
        prop_assert!(!e1 || plain, "valid in e1 but not plain");
    }

    #[test]
    fn reading_with_identity_validates_everywhere(seed in any::<u64>(), size in 1usize..4) {
        let mut r = rng(seed);
        let chain = random_chain(&mut r, true);
        let n = random_structure(&mut r, chain[0].target(), size);
        let m = StrMorphism::reading(StrObject::finite(n.clone()), chain[0].clone()).unwrap();
        for v in Variant::ALL {
            let violations = validate_str_morphism(&m, v, &CheckBounds::default());
            prop_assert!(violations.is_empty(), "{v} on\n{}: {:?}", print_structure("N", &n), violations);
        }
    }

    #[test]
    fn decomposition_never_fails_and_matches_the_oracle(seed in any::<u64>(), odag in any::<bool>()) {
        let mut r = rng(seed);
        let theory = if odag { Theory::Odag } else { Theory::Dlo };
        let tc = random_theory_case(&mut r, theory);
        let set = decompose_unary(&tc.formula, &tc.params, theory).unwrap();
        prop_assert!(set.is_canonical());
        let samples = sample_points(&set.breakpoints());
        let truth = sampling_oracle(&tc.formula, &tc.params, theory, &samples).unwrap();
        for (q, t) in samples.iter().zip(truth) {
            prop_assert_eq!(set.contains(q), t, "{} at {}", tc.formula, q);
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let s = sig(5, true);
    let bounds = EnumBounds {
        max_size: 4,
        max_var_index: 1,
        max_qdepth: 1,
    };
    let a: Vec<Formula> = enumerate_formulas(&s, bounds).collect();
    let b: Vec<Formula> = enumerate_formulas(&s, bounds).collect();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn reduct_of_rationals_along_identity_is_the_base() {
    let q = folcat_core::ominimal::QeStructure::base(Theory::Odag);
    let id = LanguageMorphism::identity(&Theory::Odag.signature());
    assert!(q.reduct(&id).unwrap().same_as(&q));
    let none = BTreeMap::new();
    let phi = parse_formula("exists x1 . (x1 + x1 = x0 & zero() < x1)", &Theory::Odag.signature()).unwrap();
    assert_eq!(q.definable_set(&phi, &none).unwrap().to_string(), "(0, +inf)");
}
