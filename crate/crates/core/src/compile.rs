//! DIMACS CNF and DNF files, and bottom-up compilation by repeated `apply`.

use std::fmt::Write as _;

use crate::propcore::{Formula, Literal};
use crate::sdd::{BoolOp, Sdd, SddManager};
use crate::{Error, Result};

/// Term limit used by [`complete_dnf`] unless the caller picks another.
pub const DEFAULT_TERM_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub n: usize,
    pub clauses: Vec<Vec<Literal>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnfInstance {
    pub n: usize,
    pub terms: Vec<Vec<Literal>>,
}

impl CnfInstance {
    pub fn to_formula(&self) -> Formula {
        Formula::and(self.clauses.iter().map(|c| Formula::clause(c)).collect())
    }

    pub fn to_dimacs(&self) -> String {
        write_signed("cnf", self.n, &self.clauses)
    }
}

impl DnfInstance {
    pub fn to_formula(&self) -> Formula {
        Formula::or(self.terms.iter().map(|t| Formula::term(t)).collect())
    }

    pub fn to_text(&self) -> String {
        write_signed("dnf", self.n, &self.terms)
    }

    /// Every term mentions all `n` variables.
    pub fn is_complete(&self) -> bool {
        self.terms.iter().all(|t| t.len() == self.n)
    }
}

fn write_signed(kind: &str, n: usize, rows: &[Vec<Literal>]) -> String {
    let mut out = format!("p {kind} {n} {}\n", rows.len());
    for row in rows {
        for l in row {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<CnfInstance> {
    let (n, clauses) = parse_signed(text, "cnf")?;
    Ok(CnfInstance { n, clauses })
}

/// Same layout as DIMACS with a `p dnf n m` header; each zero-terminated
/// row is a term. A variable may appear at most once per term.
pub fn parse_dnf(text: &str) -> Result<DnfInstance> {
    let (n, terms) = parse_signed(text, "dnf")?;
    Ok(DnfInstance { n, terms })
}

fn parse_signed(text: &str, kind: &str) -> Result<(usize, Vec<Vec<Literal>>)> {
    let mut header: Option<(usize, usize)> = None;
    let mut rows = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let f: Vec<&str> = t.split_whitespace().collect();
            if header.is_some() {
                return Err(Error::parse(line, "second problem line"));
            }
            if f.len() != 4 || f[0] != "p" || f[1] != kind {
                return Err(Error::parse(line, format!("expected 'p {kind} <vars> <rows>'")));
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("bad number '{s}'")))
            };
            header = Some((num(f[2])?, num(f[3])?));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(line, format!("missing 'p {kind}' header")));
        };
        for tok in t.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("bad literal '{tok}'")))?;
            match Literal::from_dimacs(v) {
                None => rows.push(std::mem::take(&mut current)),
                Some(l) => {
                    if l.var.index() > n {
                        return Err(Error::parse(line, format!("literal {v} exceeds {n} variables")));
                    }
                    if kind == "dnf" && current.iter().any(|c| c.var == l.var) {
                        return Err(Error::parse(line, format!("{} repeated in a term", l.var)));
                    }
                    if current.is_empty() {
                        current_line = line;
                    }
                    current.push(l);
                }
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(last_line.max(1), format!("missing 'p {kind}' header")))?;
    if !current.is_empty() {
        return Err(Error::parse(current_line, "row is not terminated by 0"));
    }
    if rows.len() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("header announces {m} rows but {} were given", rows.len()),
        ));
    }
    Ok((n, rows))
}

/// Expands each term over its missing variables. Fails when the result
/// would exceed `cap` terms.
pub fn complete_dnf(d: &DnfInstance, cap: usize) -> Result<DnfInstance> {
    let mut terms = Vec::new();
    for t in &d.terms {
        let missing: Vec<usize> = (1..=d.n).filter(|&i| !t.iter().any(|l| l.var.index() == i)).collect();
        let extra = 1usize.checked_shl(missing.len() as u32).filter(|&e| e > 0);
        let total = extra.and_then(|e| terms.len().checked_add(e));
        match total {
            Some(total) if total <= cap => {}
            _ => {
                return Err(Error::Capacity {
                    what: "completed DNF terms",
                    got: total.unwrap_or(usize::MAX),
                    limit: cap,
                })
            }
        }
        for mask in 0..extra.unwrap() {
            let mut term = t.clone();
            for (j, &v) in missing.iter().enumerate() {
                term.push(Literal::new(crate::propcore::Var::new(v), (mask >> j) & 1 == 1));
            }
            term.sort_by_key(|l| l.var);
            terms.push(term);
        }
    }
    Ok(DnfInstance { n: d.n, terms })
}

pub fn compile_formula(m: &mut SddManager, f: &Formula) -> Result<Sdd> {
    if f.max_var() > m.var_count() {
        return Err(Error::input(format!(
            "formula mentions x{} but the vtree has {} variables",
            f.max_var(),
            m.var_count()
        )));
    }
    compile_rec(m, f)
}

fn compile_rec(m: &mut SddManager, f: &Formula) -> Result<Sdd> {
    Ok(match f {
        Formula::Const(b) => m.constant(*b),
        Formula::Lit(l) => m.literal(*l)?,
        Formula::Not(g) => {
            let g = compile_rec(m, g)?;
            m.negate(g)
        }
        Formula::And(cs) => fold(m, cs, BoolOp::AND, true)?,
        Formula::Or(cs) => fold(m, cs, BoolOp::OR, false)?,
        Formula::Implies(a, b) => {
            let (a, b) = (compile_rec(m, a)?, compile_rec(m, b)?);
            m.apply(a, b, BoolOp::IMPLIES)?
        }
        Formula::Iff(a, b) => {
            let (a, b) = (compile_rec(m, a)?, compile_rec(m, b)?);
            m.apply(a, b, BoolOp::IFF)?
        }
    })
}

fn fold(m: &mut SddManager, cs: &[Formula], op: BoolOp, unit: bool) -> Result<Sdd> {
    let mut acc = m.constant(unit);
    for c in cs {
        let c = compile_rec(m, c)?;
        acc = m.apply(acc, c, op)?;
    }
    Ok(acc)
}

/// Conjoins the clauses left to right.
pub fn compile_cnf(m: &mut SddManager, c: &CnfInstance) -> Result<Sdd> {
    check_width(m, c.n)?;
    let mut acc = m.top();
    for clause in &c.clauses {
        let s = compile_clause(m, clause)?;
        acc = m.conjoin(acc, s)?;
    }
    Ok(acc)
}

pub fn compile_clause(m: &mut SddManager, clause: &[Literal]) -> Result<Sdd> {
    let mut acc = m.bottom();
    for &l in clause {
        let s = m.literal(l)?;
        acc = m.disjoin(acc, s)?;
    }
    Ok(acc)
}

pub fn compile_term(m: &mut SddManager, term: &[Literal]) -> Result<Sdd> {
    let mut acc = m.top();
    for &l in term {
        let s = m.literal(l)?;
        acc = m.conjoin(acc, s)?;
    }
    Ok(acc)
}

pub fn compile_dnf(m: &mut SddManager, d: &DnfInstance) -> Result<Sdd> {
    check_width(m, d.n)?;
    let mut acc = m.bottom();
    for t in &d.terms {
        let s = compile_term(m, t)?;
        acc = m.disjoin(acc, s)?;
    }
    Ok(acc)
}

fn check_width(m: &SddManager, n: usize) -> Result<()> {
    if n > m.var_count() {
        return Err(Error::input(format!(
            "instance has {n} variables but the vtree has {}",
            m.var_count()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propcore::{models, parse_expr};
    use crate::vtree::Vtree;

    #[test]
    fn dimacs_basics() {
        let c = parse_dimacs("c hi\np cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(c.clauses, vec![vec![Literal::pos(1), Literal::neg(2)]]);
        let empty = parse_dimacs("p cnf 3 0\n").unwrap();
        assert!(empty.clauses.is_empty());
        assert_eq!(parse_dimacs(&c.to_dimacs()).unwrap(), c);
        let multi = parse_dimacs("p cnf 3 2\n1 2\n 3 0 -1\n0\n").unwrap();
        assert_eq!(multi.clauses.len(), 2);
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(parse_dimacs("p cnf 3 1\n5 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2\n").is_err());
        assert!(parse_dimacs("p cnf 3 2\n1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 x 0\n").is_err());
        assert!(parse_dnf("p dnf 2 1\n1 -1 0\n").is_err());
    }

    #[test]
    fn completion() {
        let d = parse_dnf("p dnf 2 1\n1 0\n").unwrap();
        assert!(!d.is_complete());
        let c = complete_dnf(&d, DEFAULT_TERM_CAP).unwrap();
        assert!(c.is_complete());
        assert_eq!(
            c.terms,
            vec![vec![Literal::pos(1), Literal::neg(2)], vec![Literal::pos(1), Literal::pos(2)]]
        );
        assert_eq!(complete_dnf(&c, DEFAULT_TERM_CAP).unwrap(), c);
        let wide = DnfInstance {
            n: 20,
            terms: vec![vec![]],
        };
        assert!(matches!(complete_dnf(&wide, 1000), Err(Error::Capacity { .. })));
    }

    #[test]
    fn compiled_counts() {
        let mut m = SddManager::new(Vtree::balanced(3).unwrap()).unwrap();
        let f = parse_expr("x1 & (~x2 | x3)").unwrap();
        let s = compile_formula(&mut m, &f).unwrap();
        assert_eq!(m.model_count(s), 3);
        assert_eq!(compile_formula(&mut m, &Formula::bottom()).unwrap(), m.bottom());
        assert!(compile_formula(&mut m, &Formula::var(4)).is_err());
        let unit = compile_cnf(&mut m, &parse_dimacs("p cnf 3 1\n-2 0\n").unwrap()).unwrap();
        assert_eq!(unit, m.literal(Literal::neg(2)).unwrap());
    }

    #[test]
    fn complete_term_has_one_model() {
        let mut m = SddManager::new(Vtree::balanced(4).unwrap()).unwrap();
        let t = [Literal::neg(1), Literal::pos(2), Literal::neg(3), Literal::neg(4)];
        let s = compile_term(&mut m, &t).unwrap();
        assert_eq!(m.model_count(s), 1);
        let d = DnfInstance {
            n: 4,
            terms: vec![t.to_vec()],
        };
        let sd = compile_dnf(&mut m, &d).unwrap();
        assert_eq!(sd, s);
        assert_eq!(m.model_set(s).unwrap(), models(&d.to_formula(), 4).unwrap());
    }
}
