//! Katsuno–Mendelzon rationality checks for revision operators, evaluated
//! on explicit model sets.

use std::fmt;

use super::{dalal_oracle, models, Formula, Literal, ModelSet};
use crate::Result;

/// A revision operator judged on the models it returns. Implementations
/// return an empty set when `mu` is unsatisfiable.
pub trait RevisionOperator {
    fn revise(&self, psi: &Formula, mu: &Formula, n: usize) -> Result<ModelSet>;
}

/// The enumeration oracle as an operator.
pub struct OracleOperator;

impl RevisionOperator for OracleOperator {
    fn revise(&self, psi: &Formula, mu: &Formula, n: usize) -> Result<ModelSet> {
        Ok(dalal_oracle(psi, mu, n)?.models)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Postulate {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
}

impl Postulate {
    pub const ALL: [Postulate; 6] = [
        Postulate::R1,
        Postulate::R2,
        Postulate::R3,
        Postulate::R4,
        Postulate::R5,
        Postulate::R6,
    ];
}

impl fmt::Display for Postulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostulateReport {
    pub verdicts: Vec<(Postulate, bool)>,
}

impl PostulateReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }

    pub fn passed(&self, p: Postulate) -> bool {
        self.verdicts.iter().any(|&(q, ok)| q == p && ok)
    }
}

/// Probe formulas used for R5/R6 when none are supplied: `⊤`, `⊥`, every
/// literal, and `psi`, `¬psi`, `mu`.
pub fn default_probes(psi: &Formula, mu: &Formula, n: usize) -> Vec<Formula> {
    let mut out = vec![Formula::top(), Formula::bottom()];
    for i in 1..=n {
        out.push(Formula::Lit(Literal::pos(i)));
        out.push(Formula::Lit(Literal::neg(i)));
    }
    out.push(psi.clone());
    out.push(Formula::not(psi.clone()));
    out.push(mu.clone());
    out
}

pub fn check_postulates(op: &dyn RevisionOperator, psi: &Formula, mu: &Formula, n: usize) -> Result<PostulateReport> {
    check_postulates_with(op, psi, mu, &default_probes(psi, mu, n), n)
}

/// Checks R1–R6 for `op` at `(psi, mu)`, using each of `probes` as the
/// extra formula of R5/R6. R4 compares against the complete-DNF and
/// double-negation rewrites of both inputs.
pub fn check_postulates_with(
    op: &dyn RevisionOperator,
    psi: &Formula,
    mu: &Formula,
    probes: &[Formula],
    n: usize,
) -> Result<PostulateReport> {
    let mod_psi = models(psi, n)?;
    let mod_mu = models(mu, n)?;
    let revised = op.revise(psi, mu, n)?;

    let r1 = revised.is_subset(&mod_mu);

    let both = mod_psi.intersection(&mod_mu);
    let r2 = both.is_empty() || revised == both;

    let r3 = mod_mu.is_empty() || !revised.is_empty();

    let mut r4 = true;
    for (p2, m2) in [
        (mod_psi.to_formula(), mod_mu.to_formula()),
        (Formula::not(Formula::not(psi.clone())), Formula::not(Formula::not(mu.clone()))),
    ] {
        r4 &= op.revise(&p2, &m2, n)? == revised;
    }

    let mut r5 = true;
    let mut r6 = true;
    for phi in probes {
        let mod_phi = models(phi, n)?;
        let lhs = revised.intersection(&mod_phi);
        let rhs = op.revise(psi, &Formula::and(vec![mu.clone(), phi.clone()]), n)?;
        r5 &= lhs.is_subset(&rhs);
        if !lhs.is_empty() {
            r6 &= rhs.is_subset(&lhs);
        }
    }

    Ok(PostulateReport {
        verdicts: vec![
            (Postulate::R1, r1),
            (Postulate::R2, r2),
            (Postulate::R3, r3),
            (Postulate::R4, r4),
            (Postulate::R5, r5),
            (Postulate::R6, r6),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propcore::parse_expr;

    /// Keeps the old beliefs no matter what: violates R1.
    struct Stubborn;

    impl RevisionOperator for Stubborn {
        fn revise(&self, psi: &Formula, _mu: &Formula, n: usize) -> Result<ModelSet> {
            models(psi, n)
        }
    }

    /// Accepts the new information wholesale: satisfies R1/R3 but not R2.
    struct Amnesiac;

    impl RevisionOperator for Amnesiac {
        fn revise(&self, _psi: &Formula, mu: &Formula, n: usize) -> Result<ModelSet> {
            models(mu, n)
        }
    }

    #[test]
    fn oracle_passes_on_two_variable_case() {
        let psi = parse_expr("x1 & ~x2").unwrap();
        let mu = parse_expr("x2").unwrap();
        let report = check_postulates(&OracleOperator, &psi, &mu, 2).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn broken_operators_are_caught() {
        let psi = parse_expr("x1 & ~x2").unwrap();
        let mu = parse_expr("x2").unwrap();
        let report = check_postulates(&Stubborn, &psi, &mu, 2).unwrap();
        assert!(!report.passed(Postulate::R1));

        let psi = parse_expr("x1").unwrap();
        let mu = parse_expr("x2").unwrap();
        let report = check_postulates(&Amnesiac, &psi, &mu, 2).unwrap();
        assert!(report.passed(Postulate::R1));
        assert!(!report.passed(Postulate::R2));
    }
}
