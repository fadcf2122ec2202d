use rand::Rng;

use super::{Formula, Literal, Var};

/// Random formula over `x1..xn` with connective nesting up to `depth`.
/// Used to generate test instances.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, n: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        if rng.gen_ratio(1, 12) {
            return Formula::Const(rng.gen());
        }
        return Formula::Lit(Literal::new(Var::new(rng.gen_range(1..=n)), rng.gen()));
    }
    let child = |rng: &mut R| random_formula(rng, n, depth - 1);
    match rng.gen_range(0..6) {
        0 => Formula::not(child(rng)),
        1 | 2 => {
            let k = rng.gen_range(2..=3);
            Formula::And((0..k).map(|_| child(rng)).collect())
        }
        3 | 4 => {
            let k = rng.gen_range(2..=3);
            Formula::Or((0..k).map(|_| child(rng)).collect())
        }
        _ => {
            if rng.gen() {
                Formula::implies(child(rng), child(rng))
            } else {
                Formula::iff(child(rng), child(rng))
            }
        }
    }
}

/// Random term over distinct variables, `len ≤ n`.
pub fn random_term<R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> Vec<Literal> {
    let vars = rand::seq::index::sample(rng, n, len.min(n));
    let mut t: Vec<Literal> = vars
        .into_iter()
        .map(|i| Literal::new(Var::new(i + 1), rng.gen()))
        .collect();
    t.sort_by_key(|l| l.var);
    t
}
