use std::fmt;

use super::{check_resolvent_args, Interpretation, Literal, Sign, SignVector, Var};
use crate::{Error, Result};

/// Propositional formula over indexed variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Lit(Literal),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Const(true)
    }

    pub fn bottom() -> Self {
        Formula::Const(false)
    }

    pub fn var(index: usize) -> Self {
        Formula::Lit(Literal::pos(index))
    }

    pub fn lit(lit: Literal) -> Self {
        Formula::Lit(lit)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; an empty list is `⊤`.
    pub fn and(children: Vec<Formula>) -> Self {
        if children.is_empty() {
            Formula::top()
        } else {
            Formula::And(children)
        }
    }

    /// Disjunction; an empty list is `⊥`.
    pub fn or(children: Vec<Formula>) -> Self {
        if children.is_empty() {
            Formula::bottom()
        } else {
            Formula::Or(children)
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Conjunction of the given literals.
    pub fn term(lits: &[Literal]) -> Self {
        Formula::and(lits.iter().map(|&l| Formula::Lit(l)).collect())
    }

    /// Disjunction of the given literals.
    pub fn clause(lits: &[Literal]) -> Self {
        Formula::or(lits.iter().map(|&l| Formula::Lit(l)).collect())
    }

    /// Largest variable index occurring in the formula, 0 if none.
    pub fn max_var(&self) -> usize {
        match self {
            Formula::Const(_) => 0,
            Formula::Lit(l) => l.var.index(),
            Formula::Not(f) => f.max_var(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().map(Formula::max_var).max().unwrap_or(0),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// True if `var` occurs anywhere in the syntax tree.
    pub fn mentions(&self, var: Var) -> bool {
        match self {
            Formula::Const(_) => false,
            Formula::Lit(l) => l.var == var,
            Formula::Not(f) => f.mentions(var),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(|c| c.mentions(var)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.mentions(var) || b.mentions(var),
        }
    }

    /// Number of AST nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Lit(_) => 1,
            Formula::Not(f) => 1 + f.node_count(),
            Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(Formula::node_count).sum::<usize>(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    pub fn eval(&self, w: &Interpretation) -> Result<bool> {
        let need = self.max_var();
        if need > w.width() {
            return Err(Error::input(format!(
                "variable x{need} outside interpretation of width {}",
                w.width()
            )));
        }
        Ok(self.eval_bits(w.bits()))
    }

    /// Evaluation against a raw bit assignment (bit i-1 is variable i).
    pub(crate) fn eval_bits(&self, bits: u64) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Lit(l) => ((bits >> l.var.bit()) & 1 == 1) == l.positive,
            Formula::Not(f) => !f.eval_bits(bits),
            Formula::And(cs) => cs.iter().all(|c| c.eval_bits(bits)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval_bits(bits)),
            Formula::Implies(a, b) => !a.eval_bits(bits) || b.eval_bits(bits),
            Formula::Iff(a, b) => a.eval_bits(bits) == b.eval_bits(bits),
        }
    }

    /// Replaces every occurrence of `var` by `⊤` (`Plus`) or `⊥` (`Minus`)
    /// and folds the resulting constants away.
    pub fn cofactor(&self, var: Var, sign: Sign) -> Formula {
        self.substitute(var, sign.value()).simplify()
    }

    fn substitute(&self, var: Var, value: bool) -> Formula {
        match self {
            Formula::Const(_) => self.clone(),
            Formula::Lit(l) if l.var == var => Formula::Const(l.positive == value),
            Formula::Lit(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.substitute(var, value)),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.substitute(var, value)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.substitute(var, value)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(var, value), b.substitute(var, value)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(var, value), b.substitute(var, value)),
        }
    }

    /// Constant folding. The result is equivalent to the input and is either
    /// a bare constant or contains no constants at all.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::Const(_) | Formula::Lit(_) => self.clone(),
            Formula::Not(f) => match f.simplify() {
                Formula::Const(b) => Formula::Const(!b),
                Formula::Lit(l) => Formula::Lit(l.negate()),
                Formula::Not(inner) => *inner,
                other => Formula::not(other),
            },
            Formula::And(cs) => {
                let mut kept = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.simplify() {
                        Formula::Const(true) => {}
                        Formula::Const(false) => return Formula::bottom(),
                        Formula::And(inner) => kept.extend(inner),
                        other => kept.push(other),
                    }
                }
                match kept.len() {
                    0 => Formula::top(),
                    1 => kept.pop().unwrap(),
                    _ => Formula::And(kept),
                }
            }
            Formula::Or(cs) => {
                let mut kept = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.simplify() {
                        Formula::Const(false) => {}
                        Formula::Const(true) => return Formula::top(),
                        Formula::Or(inner) => kept.extend(inner),
                        other => kept.push(other),
                    }
                }
                match kept.len() {
                    0 => Formula::bottom(),
                    1 => kept.pop().unwrap(),
                    _ => Formula::Or(kept),
                }
            }
            Formula::Implies(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::Const(false), _) | (_, Formula::Const(true)) => Formula::top(),
                (Formula::Const(true), b) => b,
                (a, Formula::Const(false)) => Formula::not(a).simplify(),
                (a, b) => Formula::implies(a, b),
            },
            Formula::Iff(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::Const(x), Formula::Const(y)) => Formula::Const(x == y),
                (Formula::Const(true), f) | (f, Formula::Const(true)) => f,
                (Formula::Const(false), f) | (f, Formula::Const(false)) => Formula::not(f).simplify(),
                (a, b) => Formula::iff(a, b),
            },
        }
    }

    /// Iterated cofactor: fixes each `vars[i]` according to `signs[i]`.
    pub fn semi_resolvent(&self, vars: &[Var], signs: &SignVector) -> Result<Formula> {
        check_resolvent_args(vars, signs)?;
        let mut out = self.clone();
        for (&v, &s) in vars.iter().zip(signs.signs()) {
            out = out.substitute(v, s.value());
        }
        Ok(out.simplify())
    }

    /// Resolvent with respect to one variable: `f⁻ ∨ f⁺`.
    pub fn resolvent(&self, var: Var) -> Formula {
        Formula::or(vec![self.cofactor(var, Sign::Minus), self.cofactor(var, Sign::Plus)]).simplify()
    }
}

/// Free-function form of [`Formula::semi_resolvent`].
pub fn semi_resolvent_formula(f: &Formula, vars: &[Var], signs: &SignVector) -> Result<Formula> {
    f.semi_resolvent(vars, signs)
}

// Binding strength for printing: higher binds tighter.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Const(_) | Formula::Lit(_) | Formula::Not(_) => 5,
        Formula::And(_) => 4,
        Formula::Or(_) => 3,
        Formula::Implies(..) => 2,
        Formula::Iff(..) => 1,
    }
}

struct Prec<'a>(&'a Formula, u8);

impl fmt::Display for Prec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if precedence(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Prints in the expression syntax accepted by [`super::parse_expr`].
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => f.write_str("T"),
            Formula::Const(false) => f.write_str("F"),
            Formula::Lit(l) => write!(f, "{l}"),
            // `~x1` parses to a negative literal, so a negated literal node keeps its parens
            Formula::Not(inner) if matches!(**inner, Formula::Lit(_)) => write!(f, "~({inner})"),
            Formula::Not(inner) => write!(f, "~{}", Prec(inner, 5)),
            Formula::And(cs) | Formula::Or(cs) => {
                let (op, p) = if matches!(self, Formula::And(_)) { (" & ", 4) } else { (" | ", 3) };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    // same-level children are parenthesised so the tree shape survives a reparse
                    write!(f, "{}", Prec(c, p + 1))?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => write!(f, "{} -> {}", Prec(a, 3), Prec(b, 2)),
            Formula::Iff(a, b) => write!(f, "{} <-> {}", Prec(a, 1), Prec(b, 2)),
        }
    }
}
