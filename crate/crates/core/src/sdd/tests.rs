use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::compile::compile_formula;
use crate::propcore::{models, parse_expr, random_formula, random_term, Formula, Sign};

const COURSE_RULES: &str = "(x1 | x3) & (x4 -> x3) & (x2 -> x4 | x1)";

fn manager(n: usize) -> SddManager {
    SddManager::new(Vtree::balanced(n).unwrap()).unwrap()
}

fn lit(m: &SddManager, d: i64) -> Sdd {
    m.literal(Literal::from_dimacs(d).unwrap()).unwrap()
}

/// The four-variable course-rules diagram written out node by node over the
/// balanced vtree (L, K, P, A = x1..x4), with literal-level decisions left
/// untrimmed.
fn course_rules_by_hand(m: &mut SddManager) -> Sdd {
    let (t, f) = (m.top(), m.bottom());
    let (l, nl, k, nk) = (lit(m, 1), lit(m, -1), lit(m, 2), lit(m, -2));
    let (p, np, a, na) = (lit(m, 3), lit(m, -3), lit(m, 4), lit(m, -4));
    let not_l_and_k = m.decision(&[(nl, k), (l, f)], 1).unwrap();
    let l_only = m.decision(&[(l, t), (nl, f)], 1).unwrap();
    let neither = m.decision(&[(nl, nk), (l, f)], 1).unwrap();
    let p_and_a = m.decision(&[(p, a), (np, f)], 5).unwrap();
    let a_implies_p = m.decision(&[(p, t), (np, na)], 5).unwrap();
    let p_only = m.decision(&[(p, t), (np, f)], 5).unwrap();
    m.decision(&[(not_l_and_k, p_and_a), (l_only, a_implies_p), (neither, p_only)], 3)
        .unwrap()
}

#[test]
fn terminals_are_canonical() {
    let m = manager(2);
    assert_eq!(m.top(), m.top());
    assert_ne!(lit(&m, 1), lit(&m, -1));
    let leaf_x1 = m.vtree().leaf_of(Var::new(1)).unwrap();
    assert_eq!(m.terminal(Terminal::Literal(Literal::pos(1)), leaf_x1).unwrap(), lit(&m, 1));
    assert!(m.terminal(Terminal::Literal(Literal::pos(2)), leaf_x1).is_err());
    assert!(m.terminal(Terminal::True, m.vtree().root()).is_err());
}

#[test]
fn decision_compresses_and_trims() {
    let mut m = manager(2);
    let (x, nx, y) = (lit(&m, 1), lit(&m, -1), lit(&m, 2));
    let merged = m.decision(&[(x, y), (nx, y)], 1).unwrap();
    assert_eq!(merged, y);
    let (t, f) = (m.top(), m.bottom());
    assert_eq!(m.decision(&[(f, t), (t, y)], 1).unwrap(), y);
    assert_eq!(m.decision(&[(x, t), (nx, f)], 1).unwrap(), x);
    assert!(matches!(m.decision(&[(x, y)], 1), Err(Error::Invariant(_))));
    assert!(matches!(m.decision(&[(x, y), (t, f)], 1), Err(Error::Invariant(_))));
    assert!(matches!(m.decision(&[(y, x), (y, x)], 1), Err(Error::Invariant(_))));
}

#[test]
fn course_rules_fixture() {
    let mut m = manager(4);
    let by_hand = course_rules_by_hand(&mut m);
    let compiled = compile_formula(&mut m, &parse_expr(COURSE_RULES).unwrap()).unwrap();
    assert_eq!(by_hand, compiled);
    assert_eq!(m.model_count(compiled), 9);
    // the drawing keeps the literal-level nodes for L and P that trimming removes
    assert_eq!(m.size(compiled), 11);
    assert_eq!(EditableSdd::expand(&m, compiled).size(), 15);
    assert_eq!(m.model_set(compiled).unwrap(), models(&parse_expr(COURSE_RULES).unwrap(), 4).unwrap());
}

#[test]
fn apply_small_cases() {
    let mut m = manager(2);
    let (x, y) = (lit(&m, 1), lit(&m, 2));
    let xy = m.conjoin(x, y).unwrap();
    assert_eq!(m.model_count(xy), 1);
    let nxy = m.negate(xy);
    assert_eq!(m.conjoin(xy, nxy).unwrap(), m.bottom());
    assert_eq!(m.disjoin(xy, nxy).unwrap(), m.top());
    let other = manager(2);
    assert!(matches!(m.apply(x, other.top(), BoolOp::AND), Err(Error::ForeignHandle)));
}

#[test]
fn all_sixteen_operators_follow_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = 5;
        let mut m = manager(n);
        let f = random_formula(&mut rng, n, 3);
        let g = random_formula(&mut rng, n, 3);
        let (a, b) = (compile_formula(&mut m, &f).unwrap(), compile_formula(&mut m, &g).unwrap());
        for op in BoolOp::all() {
            let r = m.apply(a, b, op).unwrap();
            for bits in 0..32u64 {
                assert_eq!(
                    m.evaluate(r, bits),
                    op.eval(f.eval_bits(bits), g.eval_bits(bits)),
                    "{op:?} on {f} and {g}"
                );
            }
        }
    }
}

#[test]
fn negation_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut m = manager(6);
    assert_eq!(m.negate(m.top()), m.bottom());
    for _ in 0..30 {
        let a = compile_formula(&mut m, &random_formula(&mut rng, 6, 4)).unwrap();
        let na = m.negate(a);
        assert_eq!(m.negate(na), a);
        assert_eq!(m.model_count(na), 64 - m.model_count(a));
    }
}

#[test]
fn counts_match_enumeration_and_visit_each_node_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=8 {
        let mut m = SddManager::new(if n % 2 == 0 {
            Vtree::balanced(n).unwrap()
        } else {
            Vtree::right_linear(n).unwrap()
        })
        .unwrap();
        for _ in 0..10 {
            let f = random_formula(&mut rng, n, 4);
            let a = compile_formula(&mut m, &f).unwrap();
            let (count, visits) = m.model_count_traced(a);
            assert_eq!(count, models(&f, n).unwrap().len() as u128);
            assert!(visits <= m.node_count(a));
        }
    }
}

#[test]
fn satisfies_agrees_with_conjoin_and_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 7;
    let mut m = manager(n);
    for _ in 0..100 {
        let a = compile_formula(&mut m, &random_formula(&mut rng, n, 4)).unwrap();
        let len = rand::Rng::gen_range(&mut rng, 0..=n);
        let c = random_term(&mut rng, n, len);
        let ct = crate::compile::compile_term(&mut m, &c).unwrap();
        let both = m.conjoin(a, ct).unwrap();
        let (sat, visits) = m.satisfies_traced(a, &c).unwrap();
        assert_eq!(sat, m.model_count(both) > 0);
        assert!(visits <= m.node_count(a));
    }
    assert!(m.satisfies(m.top(), &[]).unwrap());
    assert!(m.satisfies(m.top(), &[Literal::pos(1), Literal::neg(1)]).is_err());
}

#[test]
fn course_rules_rejects_first_conflicting_term() {
    let mut m = manager(4);
    let s = compile_formula(&mut m, &parse_expr(COURSE_RULES).unwrap()).unwrap();
    let c = [Literal::neg(1), Literal::pos(2), Literal::neg(3), Literal::neg(4)];
    assert!(!m.satisfies(s, &c).unwrap());
}

#[test]
fn conditioning_matches_cofactor() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 6;
    let mut m = manager(n);
    let f = parse_expr("x1 & (~x2 | x3)").unwrap();
    let a = compile_formula(&mut m, &f).unwrap();
    let c = m.condition(a, Literal::pos(1));
    assert_eq!(c, compile_formula(&mut m, &parse_expr("~x2 | x3").unwrap()).unwrap());
    assert_eq!(m.condition(m.top(), Literal::neg(3)), m.top());
    for _ in 0..60 {
        let f = random_formula(&mut rng, n, 4);
        let a = compile_formula(&mut m, &f).unwrap();
        for v in 1..=n {
            for sign in [Sign::Plus, Sign::Minus] {
                let got = m.condition(a, sign.literal(Var::new(v)));
                let want = compile_formula(&mut m, &f.cofactor(Var::new(v), sign)).unwrap();
                assert_eq!(got, want);
            }
        }
    }
}

#[test]
fn equivalent_formulas_share_ids() {
    let mut m = manager(4);
    let pairs = [
        ("x1 -> x2", "~x1 | x2"),
        ("~(x1 & x2)", "~x1 | ~x2"),
        ("x1 <-> x2", "(x1 & x2) | (~x1 & ~x2)"),
        ("(x1 | x3) & (x4 -> x3)", "(x3 | x1) & (~x4 | x3)"),
    ];
    for (a, b) in pairs {
        let fa = compile_formula(&mut m, &parse_expr(a).unwrap()).unwrap();
        let fb = compile_formula(&mut m, &parse_expr(b).unwrap()).unwrap();
        assert_eq!(fa, fb, "{a} vs {b}");
    }
}

#[test]
fn text_round_trip() {
    let mut m = manager(4);
    let s = compile_formula(&mut m, &parse_expr(COURSE_RULES).unwrap()).unwrap();
    for a in [s, m.bottom(), m.top(), lit(&m, -3)] {
        let text = m.serialize(a);
        assert_eq!(m.parse(&text).unwrap(), a, "{text}");
    }
    let mut fresh = manager(4);
    let again = fresh.parse(&m.serialize(s)).unwrap();
    assert_eq!(fresh.model_count(again), 9);
}

#[test]
fn parse_rejects_bad_diagrams() {
    let mut m = manager(2);
    // x1 and x1 are not a partition
    assert!(m.parse("sdd 3\nL 1 0 1\nL 2 2 2\nD 3 1 2 1 2 1 2\n").is_err());
    assert!(m.parse("sdd 2\nL 1 0 1\nD 3 1 1 1 9\n").is_err());
    assert!(m.parse("sdd 1\nL 1 2 1\n").is_err());
    assert!(m.parse("sdd 1\nL 1 7 1\n").is_err());
    assert!(m.parse("L 1 0 1\n").is_err());
    assert!(m.parse("sdd 2\nT 1\n").is_err());
    let err = m.parse("sdd 3\nL 1 0 1\nL 2 2 2\nD 3 0 1 1 2\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
}

#[test]
fn import_between_managers() {
    let mut a = manager(4);
    let mut b = manager(4);
    let f = parse_expr(COURSE_RULES).unwrap();
    let sa = compile_formula(&mut a, &f).unwrap();
    let _ = compile_formula(&mut b, &parse_expr("x2 & x3").unwrap()).unwrap();
    let sb = compile_formula(&mut b, &f).unwrap();
    assert_eq!(b.import(&a, sa).unwrap(), sb);
    let mut c = SddManager::new(Vtree::right_linear(4).unwrap()).unwrap();
    assert!(c.import(&a, sa).is_err());
}

#[test]
fn deadline_interrupts_apply() {
    let n = 40;
    let mut m = manager(n);
    m.set_deadline(Some(Instant::now()));
    let mut acc = m.top();
    let mut hit = false;
    for i in 1..n {
        let c = Formula::or(vec![Formula::var(i), Formula::var(i + 1), Formula::var((i * 7) % n + 1)]);
        match compile_formula(&mut m, &c).and_then(|c| m.conjoin(acc, c)) {
            Ok(r) => acc = r,
            Err(e) => {
                assert_eq!(e, Error::Interrupted);
                hit = true;
                break;
            }
        }
    }
    assert!(hit);
}

#[test]
fn expand_then_canonicalize_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 2..=7 {
        let mut m = manager(n);
        for _ in 0..20 {
            let a = compile_formula(&mut m, &random_formula(&mut rng, n, 4)).unwrap();
            let e = EditableSdd::expand(&m, a);
            assert!(e.size() >= m.size(a));
            assert_eq!(e.canonicalize(&mut m).unwrap(), a);
        }
    }
}

#[test]
fn expand_spells_out_leaf_primes() {
    let m = manager(2);
    let y = lit(&m, 2);
    // x2 alone: trimming has removed the node for the root
    let e = EditableSdd::expand(&m, y);
    let root = e.root();
    assert_eq!(e.elements(root).len(), 2);
    for &(p, s) in e.elements(root) {
        assert!(matches!(e.node(p), ENode::Literal(l) if l.var == Var::new(1)));
        assert!(matches!(e.node(s), ENode::Literal(l) if *l == Literal::pos(2)));
    }
}

#[test]
fn replace_and_prune() {
    let mut m = manager(2);
    let (x, y) = (lit(&m, 1), lit(&m, 2));
    let a = m.conjoin(x, y).unwrap();
    let mut e = EditableSdd::expand(&m, a);
    let root = e.root();
    e.replace(&m, root, root).unwrap();
    assert_eq!(e.canonicalize(&mut m).unwrap(), a);
    // x ∧ y with y set to ⊤ is x
    let ye = e.literal(Literal::pos(2));
    e.replace(&m, ye, EditableSdd::TRUE).unwrap();
    assert_eq!(e.canonicalize(&mut m).unwrap(), x);
    // a literal cannot take the place of a decision node
    let xe = e.literal(Literal::pos(1));
    assert!(e.replace(&m, root, xe).is_err());

    let mut e = EditableSdd::expand(&m, a);
    let nx = e.literal(Literal::neg(1));
    e.replace(&m, nx, EditableSdd::FALSE).unwrap();
    e.prune();
    assert_eq!(e.elements(e.root()).len(), 1);
}

#[test]
fn compress_merges_equal_subs() {
    let mut m = manager(2);
    let x = lit(&m, 1);
    let a = m.conjoin(x, lit(&m, 2)).unwrap();
    let mut e = EditableSdd::expand(&m, a);
    let root = e.root();
    let (p0, _) = e.elements(root)[0];
    let (p1, _) = e.elements(root)[1];
    let y = e.literal(Literal::pos(2));
    e.set_elements(root, vec![(p0, y), (p1, y)]);
    e.compress(&mut m, root).unwrap();
    assert_eq!(e.elements(root), &[(EditableSdd::TRUE, y)]);
    assert_eq!(e.canonicalize(&mut m).unwrap(), lit(&m, 2));
}
