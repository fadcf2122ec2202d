use super::{ball, models, Formula, ModelSet};
use crate::Result;

/// Result of the semantic Dalal revision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DalalOutcome {
    /// Revision order: 0 when the inputs are consistent, -1 when the new
    /// information is unsatisfiable.
    pub k: i64,
    pub models: ModelSet,
}

/// Dalal revision `psi ∘ mu` by exhaustive enumeration.
///
/// An unsatisfiable `mu` yields `k = -1` and no models. An unsatisfiable
/// `psi` (with satisfiable `mu`) yields `mod(mu)` at `k = n`.
pub fn dalal_oracle(psi: &Formula, mu: &Formula, n: usize) -> Result<DalalOutcome> {
    let mod_psi = models(psi, n)?;
    let mod_mu = models(mu, n)?;
    if mod_mu.is_empty() {
        return Ok(DalalOutcome { k: -1, models: mod_mu });
    }
    if mod_psi.is_empty() {
        return Ok(DalalOutcome { k: n as i64, models: mod_mu });
    }
    for radius in 0..=n {
        let hit = ball(&mod_psi, radius).intersection(&mod_mu);
        if !hit.is_empty() {
            return Ok(DalalOutcome {
                k: radius as i64,
                models: hit,
            });
        }
    }
    unreachable!("the radius-n ball is the full space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propcore::parse_expr;

    #[test]
    fn two_variable_revision() {
        let psi = parse_expr("x1 & ~x2").unwrap();
        let mu = parse_expr("x2").unwrap();
        let out = dalal_oracle(&psi, &mu, 2).unwrap();
        assert_eq!(out.k, 1);
        assert_eq!(out.models, models(&parse_expr("x1 & x2").unwrap(), 2).unwrap());
    }

    #[test]
    fn consistent_case_is_conjunction() {
        let psi = parse_expr("x1 | x2").unwrap();
        let mu = parse_expr("~x1").unwrap();
        let out = dalal_oracle(&psi, &mu, 2).unwrap();
        assert_eq!(out.k, 0);
        assert_eq!(out.models, models(&parse_expr("~x1 & x2").unwrap(), 2).unwrap());
    }

    #[test]
    fn course_rules_with_conflicting_terms() {
        let psi = parse_expr("(x1 | x3) & (x4 -> x3) & (x2 -> x4 | x1)").unwrap();
        let mu = parse_expr("(~x1 & x2 & ~x3 & ~x4) | (x1 & ~x2 & ~x3 & x4)").unwrap();
        let out = dalal_oracle(&psi, &mu, 4).unwrap();
        assert_eq!(out.k, 1);
        assert_eq!(out.models, models(&mu, 4).unwrap());
    }

    #[test]
    fn degenerate_inputs() {
        let out = dalal_oracle(&Formula::var(1), &Formula::bottom(), 3).unwrap();
        assert_eq!(out.k, -1);
        assert!(out.models.is_empty());
        let out = dalal_oracle(&Formula::bottom(), &Formula::var(2), 3).unwrap();
        assert_eq!(out.k, 3);
        assert_eq!(out.models.len(), 4);
    }
}
