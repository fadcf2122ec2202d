//! Semi-resolvents computed directly on diagrams, relaxation as their
//! disjunction, and Dalal revision built on top.
//!
//! The order-`ℓ` semi-resolvent for variables `X1..Xℓ` and signs `σ`
//! substitutes `⊤` for `Xi` when `σi` is `+` and `⊥` when it is `-`. It is
//! produced by local edits of the input diagram: the decision nodes
//! normalised for the parent `w` of `X`'s leaf are rewritten and the rest of
//! the graph is only re-hashed.

use std::fmt;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rustc_hash::FxHashMap;

use crate::compile::{compile_term, DnfInstance};
use crate::propcore::{check_resolvent_args, Formula, Literal, ModelSet, RevisionOperator, Sign, SignVector, Var};
use crate::sdd::{ENode, EditableSdd, Sdd, SddManager};
use crate::vtree::Vtree;
use crate::{Error, Result};

/// `S` with `x` fixed to `⊤` (`Plus`) or `⊥` (`Minus`), by local
/// transformation of the decision nodes around `x`'s leaf.
pub fn semi_resolvent_sdd(m: &mut SddManager, s: Sdd, x: Var, sign: Sign) -> Result<Sdd> {
    m.check(s)?;
    let leaf = m.vtree().leaf_of(x)?;
    let w = match m.vtree().parent_of(x) {
        Ok(w) => w,
        Err(Error::NoParent(_)) => return Ok(m.condition(s, sign.literal(x))),
        Err(e) => return Err(e),
    };
    let mut e = EditableSdd::expand(m, s);
    let targets = e.decisions_at(w);
    if targets.is_empty() {
        return Ok(s);
    }
    if m.vtree().left(w) == leaf {
        for &node in &targets {
            let elements = e.elements(node).to_vec();
            let keep = elements
                .iter()
                .find(|&&(p, _)| prime_allows(&e, p, sign))
                .map(|&(_, sub)| sub)
                .ok_or_else(|| Error::Invariant("no prime covers the chosen sign".into()))?;
            e.set_elements(node, elements.into_iter().map(|(p, _)| (p, keep)).collect());
            e.compress(m, node)?;
        }
    } else {
        let pos = e.literal(Literal::new(x, true));
        let neg = e.literal(Literal::new(x, false));
        let (to_pos, to_neg) = match sign {
            Sign::Plus => (EditableSdd::TRUE, EditableSdd::FALSE),
            Sign::Minus => (EditableSdd::FALSE, EditableSdd::TRUE),
        };
        e.replace(m, pos, to_pos)?;
        e.replace(m, neg, to_neg)?;
        for &node in &targets {
            e.compress(m, node)?;
        }
    }
    e.prune();
    e.canonicalize(m)
}

/// Whether a prime over the leaf of the variable admits the value `sign`.
fn prime_allows(e: &EditableSdd, p: crate::sdd::EId, sign: Sign) -> bool {
    match e.node(p) {
        ENode::True => true,
        ENode::False => false,
        ENode::Literal(l) => l.positive == (sign == Sign::Plus),
        ENode::Decision { .. } => unreachable!("prime over a single leaf"),
    }
}

/// Sorted variables with their aligned signs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResolventKey {
    vars: Vec<Var>,
    signs: SignVector,
}

impl ResolventKey {
    pub fn new(vars: &[Var], signs: &SignVector) -> Result<ResolventKey> {
        check_resolvent_args(vars, signs)?;
        let mut pairs: Vec<(Var, Sign)> = vars.iter().copied().zip(signs.signs().iter().copied()).collect();
        pairs.sort_by_key(|&(v, _)| v);
        let (vars, signs): (Vec<Var>, Vec<Sign>) = pairs.into_iter().unzip();
        Ok(ResolventKey {
            vars,
            signs: SignVector::new(signs),
        })
    }

    pub fn single(var: Var, sign: Sign) -> ResolventKey {
        ResolventKey {
            vars: vec![var],
            signs: SignVector::new(vec![sign]),
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn signs(&self) -> &SignVector {
        &self.signs
    }

    pub fn order(&self) -> usize {
        self.vars.len()
    }

    /// Key without its last variable; `None` at order one.
    fn prefix(&self) -> Option<(ResolventKey, Var, Sign)> {
        if self.vars.len() < 2 {
            return None;
        }
        let k = self.vars.len() - 1;
        Some((
            ResolventKey {
                vars: self.vars[..k].to_vec(),
                signs: SignVector::new(self.signs.signs()[..k].to_vec()),
            },
            self.vars[k],
            self.signs.signs()[k],
        ))
    }
}

impl fmt::Display for ResolventKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, s) in self.vars.iter().zip(self.signs.signs()) {
            let mark = match s {
                Sign::Plus => '+',
                Sign::Minus => '-',
            };
            write!(f, "{v}{mark}")?;
        }
        Ok(())
    }
}

/// Semi-resolvents of one base diagram, keyed by [`ResolventKey`]. Order
/// `ℓ` entries are derived from the order `ℓ - 1` entry for the same key
/// with its last variable removed. Switching to another base clears it.
#[derive(Debug, Default)]
pub struct ResolventCache {
    base: Option<Sdd>,
    entries: FxHashMap<ResolventKey, Sdd>,
    pub hits: u64,
    pub computed: u64,
}

impl ResolventCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn rebase(&mut self, s: Sdd) {
        if self.base != Some(s) {
            self.base = Some(s);
            self.entries.clear();
        }
    }
}

/// Iterated [`semi_resolvent_sdd`] over `vars` with signs `signs`.
pub fn higher_semi_resolvent(
    m: &mut SddManager,
    s: Sdd,
    vars: &[Var],
    signs: &SignVector,
    cache: &mut ResolventCache,
) -> Result<Sdd> {
    let key = ResolventKey::new(vars, signs)?;
    resolvent_for_key(m, s, &key, cache)
}

fn resolvent_for_key(m: &mut SddManager, s: Sdd, key: &ResolventKey, cache: &mut ResolventCache) -> Result<Sdd> {
    cache.rebase(s);
    if let Some(&r) = cache.entries.get(key) {
        cache.hits += 1;
        return Ok(r);
    }
    let r = match key.prefix() {
        None => semi_resolvent_sdd(m, s, key.vars[0], key.signs.signs()[0])?,
        Some((prefix, var, sign)) => {
            let base = resolvent_for_key(m, s, &prefix, cache)?;
            semi_resolvent_sdd(m, base, var, sign)?
        }
    };
    cache.computed += 1;
    cache.entries.insert(key.clone(), r);
    Ok(r)
}

/// All order-`level` keys over `x1..xn`: variable subsets in lexicographic
/// order, then signs counted in binary with `+` as 0 and the first
/// variable most significant.
pub fn resolvent_keys(n: usize, level: usize) -> impl Iterator<Item = ResolventKey> {
    (1..=n).combinations(level).flat_map(move |subset| {
        let vars: Vec<Var> = subset.into_iter().map(Var::new).collect();
        (0..1u64 << level).map(move |counter| ResolventKey {
            vars: vars.clone(),
            signs: SignVector::from_counter(counter, level),
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relaxation {
    pub result: Sdd,
    pub semi_resolvents: u64,
}

/// The `level`-th relaxation of `s`: the disjunction of all its order-`level`
/// semi-resolvents.
pub fn relax_sdd(m: &mut SddManager, s: Sdd, level: usize) -> Result<Relaxation> {
    let n = m.var_count();
    if level == 0 || level > n {
        return Err(Error::input(format!("relaxation level {level} outside 1..={n}")));
    }
    let mut cache = ResolventCache::new();
    let mut acc = m.bottom();
    let mut count = 0;
    for key in resolvent_keys(n, level) {
        let r = resolvent_for_key(m, s, &key, &mut cache)?;
        count += 1;
        acc = m.disjoin(acc, r)?;
    }
    Ok(Relaxation {
        result: acc,
        semi_resolvents: count,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReviseOptions {
    /// Highest relaxation order tried; `None` means the variable count.
    pub max_order: Option<usize>,
    /// Conjoin each compatible semi-resolvent with the new information as
    /// soon as it is found instead of once at the end.
    pub conjoin_each: bool,
}


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevisionMode {
    Conjoined,
    Revised,
    CollectionRevised,
    BoundExceeded,
}

impl fmt::Display for RevisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RevisionOutput {
    Single(Sdd),
    Collection(Vec<Sdd>),
    None,
}

/// A term found compatible with a semi-resolvent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub term: usize,
    pub key: ResolventKey,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RevisionStats {
    pub semi_resolvents: u64,
    pub consistency_checks: u64,
    pub apply_calls: u64,
    pub cache_hits: u64,
    pub wall_time: Duration,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionResult {
    pub output: RevisionOutput,
    /// Revision order; 0 for the consistent case, `None` when the bound was
    /// exceeded.
    pub order: Option<usize>,
    pub mode: RevisionMode,
    pub stats: RevisionStats,
}

impl RevisionResult {
    pub fn single(&self) -> Option<Sdd> {
        match self.output {
            RevisionOutput::Single(s) => Some(s),
            _ => None,
        }
    }

    /// Disjunction of the output, whatever its shape.
    pub fn materialize(&self, m: &mut SddManager) -> Result<Option<Sdd>> {
        Ok(match &self.output {
            RevisionOutput::Single(s) => Some(*s),
            RevisionOutput::Collection(parts) => {
                let mut acc = m.bottom();
                for &p in parts {
                    acc = m.disjoin(acc, p)?;
                }
                Some(acc)
            }
            RevisionOutput::None => None,
        })
    }
}

struct Run {
    started: Instant,
    apply_before: u64,
    stats: RevisionStats,
    cache: ResolventCache,
}

impl Run {
    fn new(m: &SddManager) -> Run {
        Run {
            started: Instant::now(),
            apply_before: m.apply_calls(),
            stats: RevisionStats::default(),
            cache: ResolventCache::new(),
        }
    }

    fn finish(mut self, m: &SddManager, output: RevisionOutput, order: Option<usize>, mode: RevisionMode) -> RevisionResult {
        self.stats.apply_calls = m.apply_calls() - self.apply_before;
        self.stats.cache_hits = self.cache.hits;
        self.stats.wall_time = self.started.elapsed();
        RevisionResult {
            output,
            order,
            mode,
            stats: self.stats,
        }
    }

    fn resolvent(&mut self, m: &mut SddManager, s: Sdd, key: &ResolventKey) -> Result<Sdd> {
        self.stats.semi_resolvents += 1;
        resolvent_for_key(m, s, key, &mut self.cache)
    }

    fn consistent(&mut self, m: &SddManager, a: Sdd) -> bool {
        self.stats.consistency_checks += 1;
        m.model_count(a) > 0
    }
}

fn bound(m: &SddManager, opts: &ReviseOptions) -> usize {
    opts.max_order.unwrap_or(m.var_count()).min(m.var_count())
}

/// Dalal revision of `s` by `s2`, searching relaxation orders upward.
pub fn revise(m: &mut SddManager, s: Sdd, s2: Sdd, opts: &ReviseOptions) -> Result<RevisionResult> {
    revise_impl(m, s, s2, opts, false)
}

/// Like [`revise`], but returns one diagram per compatible semi-resolvent
/// (each already conjoined with `s2`) instead of their disjunction.
pub fn revise_collection(m: &mut SddManager, s: Sdd, s2: Sdd, opts: &ReviseOptions) -> Result<RevisionResult> {
    revise_impl(m, s, s2, opts, true)
}

fn revise_impl(m: &mut SddManager, s: Sdd, s2: Sdd, opts: &ReviseOptions, collect: bool) -> Result<RevisionResult> {
    m.check(s)?;
    m.check(s2)?;
    let mut run = Run::new(m);
    if !run.consistent(m, s2) {
        return Err(Error::UnsatisfiableNewInformation);
    }
    let both = m.conjoin(s, s2)?;
    if run.consistent(m, both) {
        let out = if collect {
            RevisionOutput::Collection(vec![both])
        } else {
            RevisionOutput::Single(both)
        };
        return Ok(run.finish(m, out, Some(0), RevisionMode::Conjoined));
    }
    let n = m.var_count();
    let k_max = bound(m, opts);
    let revised = if collect {
        RevisionMode::CollectionRevised
    } else {
        RevisionMode::Revised
    };
    if !run.consistent(m, s) {
        // Every relaxation of an inconsistent base is inconsistent; the
        // revision saturates at order n.
        if n > k_max {
            return Ok(run.finish(m, RevisionOutput::None, None, RevisionMode::BoundExceeded));
        }
        let out = if collect {
            RevisionOutput::Collection(vec![s2])
        } else {
            RevisionOutput::Single(s2)
        };
        return Ok(run.finish(m, out, Some(n), revised));
    }
    for level in 1..=k_max {
        let mut acc = m.bottom();
        let mut parts = Vec::new();
        for key in resolvent_keys(n, level) {
            let r = run.resolvent(m, s, &key)?;
            let joined = m.conjoin(r, s2)?;
            if !run.consistent(m, joined) {
                continue;
            }
            if collect {
                parts.push(joined);
            } else {
                let piece = if opts.conjoin_each { joined } else { r };
                acc = m.disjoin(acc, piece)?;
            }
        }
        if collect && !parts.is_empty() {
            return Ok(run.finish(m, RevisionOutput::Collection(parts), Some(level), revised));
        }
        if !collect && !m.is_false(acc) {
            let result = if opts.conjoin_each { acc } else { m.conjoin(acc, s2)? };
            return Ok(run.finish(m, RevisionOutput::Single(result), Some(level), revised));
        }
    }
    Ok(run.finish(m, RevisionOutput::None, None, RevisionMode::BoundExceeded))
}

/// Revision by a complete DNF, testing each term against each
/// semi-resolvent with a linear `satisfies` traversal.
pub fn revise_dnf(m: &mut SddManager, s: Sdd, d: &DnfInstance, opts: &ReviseOptions) -> Result<RevisionResult> {
    m.check(s)?;
    if d.n > m.var_count() {
        return Err(Error::input(format!(
            "DNF has {} variables but the vtree has {}",
            d.n,
            m.var_count()
        )));
    }
    if d.n != m.var_count() || !d.is_complete() {
        return Err(Error::Precondition(
            "revision by DNF needs complete terms over every variable".into(),
        ));
    }
    let mut run = Run::new(m);
    if d.terms.is_empty() {
        return Err(Error::UnsatisfiableNewInformation);
    }
    let mut term_sdds = Vec::with_capacity(d.terms.len());
    for t in &d.terms {
        term_sdds.push(compile_term(m, t)?);
    }

    let mut acc = m.bottom();
    for (t, &st) in d.terms.iter().zip(&term_sdds) {
        run.stats.consistency_checks += 1;
        if m.satisfies(s, t)? {
            acc = m.disjoin(acc, st)?;
        }
    }
    if !m.is_false(acc) {
        return Ok(run.finish(m, RevisionOutput::Single(acc), Some(0), RevisionMode::Conjoined));
    }

    let n = m.var_count();
    let k_max = bound(m, opts);
    if !run.consistent(m, s) {
        if n > k_max {
            return Ok(run.finish(m, RevisionOutput::None, None, RevisionMode::BoundExceeded));
        }
        let mut all = m.bottom();
        for &st in &term_sdds {
            all = m.disjoin(all, st)?;
        }
        return Ok(run.finish(m, RevisionOutput::Single(all), Some(n), RevisionMode::Revised));
    }
    for level in 1..=k_max {
        let mut added = vec![false; d.terms.len()];
        for key in resolvent_keys(n, level) {
            let r = run.resolvent(m, s, &key)?;
            for (i, t) in d.terms.iter().enumerate() {
                run.stats.consistency_checks += 1;
                if m.satisfies(r, t)? {
                    run.stats.witnesses.push(Witness { term: i, key: key.clone() });
                    if !added[i] {
                        added[i] = true;
                        acc = m.disjoin(acc, term_sdds[i])?;
                    }
                }
            }
        }
        if added.iter().any(|&a| a) {
            return Ok(run.finish(m, RevisionOutput::Single(acc), Some(level), RevisionMode::Revised));
        }
    }
    Ok(run.finish(m, RevisionOutput::None, None, RevisionMode::BoundExceeded))
}

/// `G^level(s) ∧ s2` regardless of whether a lower order would already be
/// consistent.
pub fn revise_at_order(m: &mut SddManager, s: Sdd, s2: Sdd, level: usize) -> Result<Sdd> {
    let n = m.var_count();
    if level == 0 || level > n {
        return Err(Error::input(format!("relaxation level {level} outside 1..={n}")));
    }
    let mut run = Run::new(m);
    let mut acc = m.bottom();
    for key in resolvent_keys(n, level) {
        let r = run.resolvent(m, s, &key)?;
        let joined = m.conjoin(r, s2)?;
        if run.consistent(m, joined) {
            acc = m.disjoin(acc, r)?;
        }
    }
    m.conjoin(acc, s2)
}

/// Dalal revision through diagrams, judged on model sets: compiles both
/// formulas under a balanced vtree and runs [`revise`].
pub struct SddRevisionOperator {
    pub options: ReviseOptions,
}

impl RevisionOperator for SddRevisionOperator {
    fn revise(&self, psi: &Formula, mu: &Formula, n: usize) -> Result<ModelSet> {
        let mut m = SddManager::new(Vtree::balanced(n)?)?;
        let s = crate::compile::compile_formula(&mut m, psi)?;
        let s2 = crate::compile::compile_formula(&mut m, mu)?;
        match revise(&mut m, s, s2, &self.options) {
            Err(Error::UnsatisfiableNewInformation) => ModelSet::empty(n),
            Err(e) => Err(e),
            Ok(r) => match r.single() {
                Some(out) => m.model_set(out),
                None => Err(Error::Precondition("revision bound exceeded".into())),
            },
        }
    }
}

#[cfg(test)]
mod tests;
