//! Propositional formulas and an exhaustive-enumeration semantic oracle.
//!
//! Everything in here works on explicit model sets over at most
//! [`ORACLE_CAP`] variables. The oracle is the ground truth the circuit
//! algorithms are checked against, so it deliberately takes the slow,
//! definitional route for every operation.

mod expr;
mod formula;
mod models;
mod oracle;
mod postulates;
mod random;

use std::fmt;

pub use expr::parse_expr;
pub use formula::{semi_resolvent_formula, Formula};
pub use models::{ball, distance, models, relax_semantic, Interpretation, ModelSet};
pub use oracle::{dalal_oracle, DalalOutcome};
pub use random::{random_formula, random_term};
pub use postulates::{
    check_postulates, check_postulates_with, default_probes, OracleOperator, Postulate,
    PostulateReport, RevisionOperator,
};

/// Largest variable count the enumeration oracle accepts.
pub const ORACLE_CAP: usize = 24;

/// A propositional variable, indexed from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    /// # Panics
    /// Panics if `index` is zero.
    pub fn new(index: usize) -> Self {
        assert!(index >= 1, "variables are 1-based");
        Var(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Zero-based bit position inside an [`Interpretation`].
    pub(crate) fn bit(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: Var,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub fn pos(index: usize) -> Self {
        Literal::new(Var::new(index), true)
    }

    pub fn neg(index: usize) -> Self {
        Literal::new(Var::new(index), false)
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// DIMACS-style signed integer.
    pub fn to_dimacs(self) -> i64 {
        let i = self.var.index() as i64;
        if self.positive {
            i
        } else {
            -i
        }
    }

    /// Returns `None` for zero.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 {
            return None;
        }
        Some(Literal::new(
            Var::new(value.unsigned_abs() as usize),
            value > 0,
        ))
    }

    pub fn sign(self) -> Sign {
        if self.positive {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "~{}", self.var)
        }
    }
}

/// Which constant a variable is fixed to when taking a semi-resolvent:
/// `Plus` substitutes true, `Minus` substitutes false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> bool {
        matches!(self, Sign::Plus)
    }

    pub fn literal(self, var: Var) -> Literal {
        Literal::new(var, self.value())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Sign sequence selecting one semi-resolvent of a given order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<Sign>);

impl SignVector {
    pub fn new(signs: Vec<Sign>) -> Self {
        SignVector(signs)
    }

    /// The `counter`-th vector of length `len`, reading the counter as a
    /// binary number with `+` = 0 and the first sign as the most significant
    /// digit. Counting 0..2^len therefore walks `++..+` to `--..-`.
    pub fn from_counter(counter: u64, len: usize) -> Self {
        let signs = (0..len)
            .map(|i| {
                if (counter >> (len - 1 - i)) & 1 == 0 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            })
            .collect();
        SignVector(signs)
    }

    /// All 2^len sign vectors in counter order.
    pub fn all(len: usize) -> impl Iterator<Item = SignVector> {
        (0..(1u64 << len)).map(move |c| SignVector::from_counter(c, len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Rejects empty, duplicated or misaligned variable/sign sequences.
pub(crate) fn check_resolvent_args(vars: &[Var], signs: &SignVector) -> crate::Result<()> {
    if vars.len() != signs.len() {
        return Err(crate::Error::input(format!(
            "{} variables but {} signs",
            vars.len(),
            signs.len()
        )));
    }
    let mut seen = vars.to_vec();
    seen.sort();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(crate::Error::input("duplicate variable in resolvent"));
    }
    Ok(())
}
