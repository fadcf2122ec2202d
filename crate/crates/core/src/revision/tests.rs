use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::compile::compile_formula;
use crate::propcore::{check_postulates, dalal_oracle, models, parse_expr, random_formula, relax_semantic};

const COURSE_RULES: &str = "(x1 | x3) & (x4 -> x3) & (x2 -> x4 | x1)";

fn setup(n: usize, f: &str) -> (SddManager, Sdd) {
    let mut m = SddManager::new(Vtree::balanced(n).unwrap()).unwrap();
    let s = compile_formula(&mut m, &parse_expr(f).unwrap()).unwrap();
    (m, s)
}

fn compiled(m: &mut SddManager, f: &str) -> Sdd {
    compile_formula(m, &parse_expr(f).unwrap()).unwrap()
}

#[test]
fn course_rules_semi_resolvents() {
    let (mut m, s) = setup(4, COURSE_RULES);
    let f = parse_expr(COURSE_RULES).unwrap();
    for (var, sign) in [(4, Sign::Plus), (2, Sign::Minus)] {
        let r = semi_resolvent_sdd(&mut m, s, Var::new(var), sign).unwrap();
        let want = f.cofactor(Var::new(var), sign);
        assert_eq!(m.model_set(r).unwrap(), models(&want, 4).unwrap());
        assert!(m.size(r) <= m.size(s));
    }
    // with A set to ⊤ the rules reduce to P
    let plus_a = semi_resolvent_sdd(&mut m, s, Var::new(4), Sign::Plus).unwrap();
    assert_eq!(plus_a, m.literal(Literal::pos(3)).unwrap());
}

#[test]
fn matches_conditioning_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for round in 0..120 {
        let n = rng.gen_range(1..=7);
        let vtree = if round % 3 == 0 {
            Vtree::right_linear(n).unwrap()
        } else {
            Vtree::balanced(n).unwrap()
        };
        let mut m = SddManager::new(vtree).unwrap();
        let s = compile_formula(&mut m, &random_formula(&mut rng, n, 4)).unwrap();
        for v in 1..=n {
            for sign in [Sign::Plus, Sign::Minus] {
                let got = semi_resolvent_sdd(&mut m, s, Var::new(v), sign).unwrap();
                let want = m.condition(s, sign.literal(Var::new(v)));
                assert_eq!(got, want);
            }
        }
    }
}

#[test]
fn absent_variable_and_errors() {
    let (mut m, s) = setup(3, "x1 & x2");
    assert_eq!(semi_resolvent_sdd(&mut m, s, Var::new(3), Sign::Minus).unwrap(), s);
    assert!(semi_resolvent_sdd(&mut m, s, Var::new(4), Sign::Minus).is_err());
    let dup = higher_semi_resolvent(
        &mut m,
        s,
        &[Var::new(1), Var::new(1)],
        &SignVector::all(2).next().unwrap(),
        &mut ResolventCache::new(),
    );
    assert!(dup.is_err());
}

#[test]
fn single_leaf_vtree_uses_conditioning() {
    let (mut m, s) = setup(1, "~x1");
    assert_eq!(semi_resolvent_sdd(&mut m, s, Var::new(1), Sign::Minus).unwrap(), m.top());
    assert_eq!(semi_resolvent_sdd(&mut m, s, Var::new(1), Sign::Plus).unwrap(), m.bottom());
}

#[test]
fn permutations_and_cache_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 6;
    let mut m = SddManager::new(Vtree::balanced(n).unwrap()).unwrap();
    let f = random_formula(&mut rng, n, 5);
    let s = compile_formula(&mut m, &f).unwrap();
    let mut warm = ResolventCache::new();
    for key in resolvent_keys(n, 3) {
        let vars = key.vars().to_vec();
        let a = higher_semi_resolvent(&mut m, s, &vars, key.signs(), &mut warm).unwrap();
        let mut rev_vars = vars.clone();
        rev_vars.reverse();
        let mut rev_signs = key.signs().signs().to_vec();
        rev_signs.reverse();
        let b = higher_semi_resolvent(&mut m, s, &rev_vars, &SignVector::new(rev_signs), &mut ResolventCache::new())
            .unwrap();
        assert_eq!(a, b);
        let want = f.semi_resolvent(&vars, key.signs()).unwrap();
        assert_eq!(m.model_set(a).unwrap(), models(&want, n).unwrap());
        assert!(m.size(a) <= m.size(s) || m.size(a) == 0);
    }
    assert!(warm.hits > 0);
}

#[test]
fn key_order_is_lexicographic() {
    let keys: Vec<String> = resolvent_keys(3, 2).map(|k| k.to_string()).collect();
    assert_eq!(keys.len(), 12);
    assert_eq!(&keys[..5], &["x1+x2+", "x1+x2-", "x1-x2+", "x1-x2-", "x1+x3+"]);
}

#[test]
fn relaxation_of_two_variable_base() {
    let (mut m, s) = setup(2, "x1 & ~x2");
    let r = relax_sdd(&mut m, s, 1).unwrap();
    assert_eq!(r.semi_resolvents, 4);
    let want = ModelSet::from_bits(2, [0b01, 0b11, 0b00]).unwrap();
    assert_eq!(m.model_set(r.result).unwrap(), want);
    assert_eq!(relax_sdd(&mut m, s, 2).unwrap().result, m.top());
    assert!(relax_sdd(&mut m, s, 0).is_err());
    assert!(relax_sdd(&mut m, s, 3).is_err());
}

#[test]
fn relaxation_matches_semantic_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..15 {
        let n = rng.gen_range(2..=6);
        let f = random_formula(&mut rng, n, 4);
        let mut m = SddManager::new(Vtree::balanced(n).unwrap()).unwrap();
        let s = compile_formula(&mut m, &f).unwrap();
        for level in 1..=n.min(3) {
            let r = relax_sdd(&mut m, s, level).unwrap();
            assert_eq!(m.model_set(r.result).unwrap(), relax_semantic(&f, level, n).unwrap());
        }
    }
}

#[test]
fn two_variable_revision() {
    let (mut m, s) = setup(2, "x1 & ~x2");
    let mu = compiled(&mut m, "x2");
    let r = revise(&mut m, s, mu, &ReviseOptions::default()).unwrap();
    assert_eq!(r.mode, RevisionMode::Revised);
    assert_eq!(r.order, Some(1));
    assert_eq!(r.single(), Some(compiled(&mut m, "x1 & x2")));
}

#[test]
fn consistent_and_degenerate_cases() {
    let (mut m, s) = setup(3, "x1 | x2");
    let mu = compiled(&mut m, "~x1 & x3");
    let r = revise(&mut m, s, mu, &ReviseOptions::default()).unwrap();
    assert_eq!((r.mode, r.order), (RevisionMode::Conjoined, Some(0)));
    assert_eq!(r.single(), Some(compiled(&mut m, "~x1 & x2 & x3")));

    let bottom = m.bottom();
    assert_eq!(
        revise(&mut m, s, bottom, &ReviseOptions::default()).unwrap_err(),
        Error::UnsatisfiableNewInformation
    );
    let r = revise(&mut m, bottom, mu, &ReviseOptions::default()).unwrap();
    assert_eq!((r.mode, r.order, r.single()), (RevisionMode::Revised, Some(3), Some(mu)));

    let c = revise_collection(&mut m, s, mu, &ReviseOptions::default()).unwrap();
    assert_eq!(c.mode, RevisionMode::Conjoined);
    assert!(matches!(c.output, RevisionOutput::Collection(ref v) if v.len() == 1));
}

#[test]
fn bound_exceeded_returns_nothing() {
    let (mut m, s) = setup(3, "x1 & x2 & x3");
    let mu = compiled(&mut m, "~x1 & ~x2 & ~x3");
    let opts = ReviseOptions {
        max_order: Some(2),
        ..Default::default()
    };
    let r = revise(&mut m, s, mu, &opts).unwrap();
    assert_eq!((r.mode, r.order, r.output), (RevisionMode::BoundExceeded, None, RevisionOutput::None));
    let r = revise(&mut m, s, mu, &ReviseOptions::default()).unwrap();
    assert_eq!((r.mode, r.order), (RevisionMode::Revised, Some(3)));
}

#[test]
fn agrees_with_oracle_and_variants() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..60 {
        let n = rng.gen_range(2..=6);
        let psi = random_formula(&mut rng, n, 4);
        let mu = random_formula(&mut rng, n, 4);
        let want = dalal_oracle(&psi, &mu, n).unwrap();
        let mut m = SddManager::new(Vtree::balanced(n).unwrap()).unwrap();
        let s = compile_formula(&mut m, &psi).unwrap();
        let s2 = compile_formula(&mut m, &mu).unwrap();
        if want.k < 0 {
            assert!(revise(&mut m, s, s2, &ReviseOptions::default()).is_err());
            continue;
        }
        let each = ReviseOptions {
            conjoin_each: true,
            ..Default::default()
        };
        let a = revise(&mut m, s, s2, &ReviseOptions::default()).unwrap();
        let b = revise(&mut m, s, s2, &each).unwrap();
        let c = revise_collection(&mut m, s, s2, &ReviseOptions::default()).unwrap();
        assert_eq!(a.order, Some(want.k as usize));
        assert_eq!(m.model_set(a.single().unwrap()).unwrap(), want.models);
        assert_eq!(a.single(), b.single());
        assert_eq!(c.order, a.order);
        assert_eq!(c.materialize(&mut m).unwrap(), a.single());
    }
}

#[test]
fn dnf_revision_of_course_rules() {
    let (mut m, s) = setup(4, COURSE_RULES);
    let d = crate::compile::parse_dnf("p dnf 4 2\n-1 2 -3 -4 0\n1 -2 -3 4 0\n").unwrap();
    let r = revise_dnf(&mut m, s, &d, &ReviseOptions::default()).unwrap();
    let mu = crate::compile::compile_dnf(&mut m, &d).unwrap();
    assert_eq!(r.order, Some(1));
    assert_eq!(r.single(), Some(mu));
    let seen: Vec<(usize, String)> = r.stats.witnesses.iter().map(|w| (w.term, w.key.to_string())).collect();
    // enumerated by hand from the cofactors of the four rules
    assert_eq!(
        seen,
        vec![(0, "x1+".to_string()), (1, "x3+".to_string()), (1, "x4-".to_string())]
    );

    let incomplete = crate::compile::parse_dnf("p dnf 4 1\n1 0\n").unwrap();
    assert!(matches!(
        revise_dnf(&mut m, s, &incomplete, &ReviseOptions::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn dnf_single_consistent_term() {
    let (mut m, s) = setup(4, COURSE_RULES);
    let d = crate::compile::parse_dnf("p dnf 4 1\n1 2 3 4 0\n").unwrap();
    let r = revise_dnf(&mut m, s, &d, &ReviseOptions::default()).unwrap();
    assert_eq!(r.mode, RevisionMode::Conjoined);
    assert_eq!(r.single(), Some(crate::compile::compile_dnf(&mut m, &d).unwrap()));
}

#[test]
fn forced_order_one() {
    let (mut m, s) = setup(3, "x1 & x2");
    let mu = compiled(&mut m, "x1");
    // consistent, but the forced relaxation still widens the base
    let r = revise_at_order(&mut m, s, mu, 1).unwrap();
    assert_eq!(r, mu);
}

#[test]
fn operator_satisfies_postulates_on_two_variable_case() {
    let op = SddRevisionOperator {
        options: ReviseOptions::default(),
    };
    let psi = parse_expr("x1 & ~x2").unwrap();
    let mu = parse_expr("x2").unwrap();
    assert!(check_postulates(&op, &psi, &mu, 2).unwrap().all_pass());
}
