//! Canonical sentential decision diagrams.
//!
//! A [`SddManager`] owns one vtree and a hash-consed node store. Decision
//! nodes are kept compressed (no two elements share a sub) and trimmed
//! (`{(⊤,s)}` is `s`, `{(p,⊤),(¬p,⊥)}` is `p`), so two handles from the same
//! manager are equal exactly when they denote the same function.
//!
//! Node ids are global per manager: 0 is `⊥`, 1 is `⊤`, and the literals of
//! `x_i` sit at `2i` (positive) and `2i + 1` (negative), so negating a
//! literal flips the low bit.

mod apply;
mod editable;
mod io;
mod query;

use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Instant;

use rustc_hash::FxHashMap;

use crate::propcore::{Literal, Var};
use crate::vtree::Vtree;
use crate::{Error, Result};

pub use apply::BoolOp;
pub use editable::{EId, ENode, EditableSdd};

pub(crate) const FALSE: u32 = 0;
pub(crate) const TRUE: u32 = 1;

/// Models are counted in `u128`, so `2^n` must fit.
pub const MAX_VARS: usize = 127;

static NEXT_TAG: AtomicU32 = AtomicU32::new(1);

/// Handle to a node of one particular manager.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sdd {
    mgr: u32,
    id: u32,
}

impl Sdd {
    /// The canonical id inside the owning manager.
    pub fn id(self) -> u32 {
        self.id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    False,
    True,
    Literal(Literal),
}

/// Read-only view of a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SddNode {
    False,
    True,
    Literal(Literal),
    Decision { vtree: usize, elements: Vec<(Sdd, Sdd)> },
}

#[derive(Debug, Clone)]
enum Kind {
    False,
    True,
    Lit(Literal),
    Dec(Box<[(u32, u32)]>),
}

#[derive(Debug, Clone)]
struct NodeData {
    /// Vtree position; `u32::MAX` for constants.
    vtree: u32,
    kind: Kind,
}

const NO_VTREE: u32 = u32::MAX;

/// Vtree position and sorted elements of a decision node.
type UniqueKey = (u32, Box<[(u32, u32)]>);

pub struct SddManager {
    tag: u32,
    vtree: Vtree,
    nodes: Vec<NodeData>,
    unique: FxHashMap<UniqueKey, u32>,
    apply_cache: FxHashMap<(u8, u32, u32), u32>,
    negations: FxHashMap<u32, u32>,
    deadline: Option<Instant>,
    ticks: u64,
    apply_calls: u64,
}

impl std::fmt::Debug for SddManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SddManager")
            .field("vars", &self.vtree.var_count())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl SddManager {
    pub fn new(vtree: Vtree) -> Result<SddManager> {
        let n = vtree.var_count();
        if n > MAX_VARS {
            return Err(Error::Capacity {
                what: "manager variable count",
                got: n,
                limit: MAX_VARS,
            });
        }
        let mut nodes = Vec::with_capacity(2 + 2 * n);
        nodes.push(NodeData {
            vtree: NO_VTREE,
            kind: Kind::False,
        });
        nodes.push(NodeData {
            vtree: NO_VTREE,
            kind: Kind::True,
        });
        for i in 1..=n {
            let leaf = vtree.leaf_of(Var::new(i))? as u32;
            nodes.push(NodeData {
                vtree: leaf,
                kind: Kind::Lit(Literal::pos(i)),
            });
            nodes.push(NodeData {
                vtree: leaf,
                kind: Kind::Lit(Literal::neg(i)),
            });
        }
        Ok(SddManager {
            tag: NEXT_TAG.fetch_add(1, Ordering::Relaxed),
            vtree,
            nodes,
            unique: FxHashMap::default(),
            apply_cache: FxHashMap::default(),
            negations: FxHashMap::default(),
            deadline: None,
            ticks: 0,
            apply_calls: 0,
        })
    }

    pub fn vtree(&self) -> &Vtree {
        &self.vtree
    }

    pub fn var_count(&self) -> usize {
        self.vtree.var_count()
    }

    /// Number of nodes ever created, terminals included.
    pub fn node_total(&self) -> usize {
        self.nodes.len()
    }

    /// Top-level `apply` invocations so far.
    pub fn apply_calls(&self) -> u64 {
        self.apply_calls
    }

    /// After `deadline`, `apply` and everything built on it return
    /// [`Error::Interrupted`].
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    pub fn bottom(&self) -> Sdd {
        self.handle(FALSE)
    }

    pub fn top(&self) -> Sdd {
        self.handle(TRUE)
    }

    pub fn constant(&self, value: bool) -> Sdd {
        self.handle(if value { TRUE } else { FALSE })
    }

    pub fn literal(&self, lit: Literal) -> Result<Sdd> {
        if lit.var.index() > self.var_count() {
            return Err(Error::input(format!(
                "{} is outside the vtree over {} variables",
                lit.var,
                self.var_count()
            )));
        }
        Ok(self.handle(lit_id(lit)))
    }

    /// A terminal normalised for vtree leaf `leaf`.
    pub fn terminal(&self, which: Terminal, leaf: usize) -> Result<Sdd> {
        if leaf >= self.vtree.node_count() || !self.vtree.is_leaf(leaf) {
            return Err(Error::input(format!("vtree node {leaf} is not a leaf")));
        }
        match which {
            Terminal::False => Ok(self.bottom()),
            Terminal::True => Ok(self.top()),
            Terminal::Literal(l) => {
                if self.vtree.var(leaf) != Some(l.var) {
                    return Err(Error::input(format!("{} does not belong to vtree leaf {leaf}", l.var)));
                }
                self.literal(l)
            }
        }
    }

    /// Builds a decision node for vtree node `v` from explicit elements,
    /// checking placement and the partition property, then compressing and
    /// trimming.
    pub fn decision(&mut self, elements: &[(Sdd, Sdd)], v: usize) -> Result<Sdd> {
        if v >= self.vtree.node_count() || self.vtree.is_leaf(v) {
            return Err(Error::input(format!("vtree node {v} is not internal")));
        }
        let (left, right) = (self.vtree.left(v), self.vtree.right(v));
        let mut elems = Vec::with_capacity(elements.len());
        for &(p, s) in elements {
            let (p, s) = (self.check(p)?, self.check(s)?);
            if !self.fits(p, left) || !self.fits(s, right) {
                return Err(Error::Invariant(format!(
                    "element ({p}, {s}) is not normalised for the children of vtree node {v}"
                )));
            }
            elems.push((p, s));
        }
        let mut cover = FALSE;
        for (i, &(p, _)) in elems.iter().enumerate() {
            if p == FALSE {
                continue;
            }
            for &(q, _) in &elems[i + 1..] {
                if self.apply_ids(BoolOp::AND, p, q)? != FALSE {
                    return Err(Error::Invariant(format!("primes {p} and {q} overlap")));
                }
            }
            cover = self.apply_ids(BoolOp::OR, cover, p)?;
        }
        if cover != TRUE {
            return Err(Error::Invariant("primes are not exhaustive".into()));
        }
        let id = self.make_decision(v, elems)?;
        Ok(self.handle(id))
    }

    /// Copies `a` from `other`, which must use a vtree of the same shape.
    pub fn import(&mut self, other: &SddManager, a: Sdd) -> Result<Sdd> {
        let a = other.check(a)?;
        if !self.vtree.same_shape(&other.vtree) {
            return Err(Error::input("managers use different vtrees"));
        }
        let mut memo = FxHashMap::default();
        let id = self.import_rec(other, a, &mut memo);
        Ok(self.handle(id))
    }

    fn import_rec(&mut self, other: &SddManager, a: u32, memo: &mut FxHashMap<u32, u32>) -> u32 {
        if a <= lit_id(Literal::neg(self.var_count())) {
            return a;
        }
        if let Some(&r) = memo.get(&a) {
            return r;
        }
        let node = &other.nodes[a as usize];
        let Kind::Dec(elems) = &node.kind else {
            unreachable!("terminals have fixed ids")
        };
        let mut out: Vec<(u32, u32)> = elems
            .iter()
            .map(|&(p, s)| (self.import_rec(other, p, memo), self.import_rec(other, s, memo)))
            .collect();
        out.sort_unstable();
        let r = self.intern(node.vtree, out.into_boxed_slice());
        memo.insert(a, r);
        r
    }

    pub fn node(&self, a: Sdd) -> SddNode {
        let a = self.own(a);
        match &self.nodes[a as usize].kind {
            Kind::False => SddNode::False,
            Kind::True => SddNode::True,
            Kind::Lit(l) => SddNode::Literal(*l),
            Kind::Dec(elems) => SddNode::Decision {
                vtree: self.nodes[a as usize].vtree as usize,
                elements: elems.iter().map(|&(p, s)| (self.handle(p), self.handle(s))).collect(),
            },
        }
    }

    /// Vtree position the node is normalised for; `None` for constants.
    pub fn vtree_of(&self, a: Sdd) -> Option<usize> {
        self.vt(self.own(a))
    }

    pub fn is_false(&self, a: Sdd) -> bool {
        self.own(a) == FALSE
    }

    pub fn is_true(&self, a: Sdd) -> bool {
        self.own(a) == TRUE
    }

    pub(crate) fn handle(&self, id: u32) -> Sdd {
        Sdd { mgr: self.tag, id }
    }

    pub(crate) fn check(&self, a: Sdd) -> Result<u32> {
        if a.mgr != self.tag {
            return Err(Error::ForeignHandle);
        }
        Ok(a.id)
    }

    /// # Panics
    /// Panics on a handle from another manager.
    pub(crate) fn own(&self, a: Sdd) -> u32 {
        assert_eq!(a.mgr, self.tag, "handle belongs to a different manager");
        a.id
    }

    pub(crate) fn vt(&self, id: u32) -> Option<usize> {
        let v = self.nodes[id as usize].vtree;
        (v != NO_VTREE).then_some(v as usize)
    }

    pub(crate) fn elements(&self, id: u32) -> &[(u32, u32)] {
        match &self.nodes[id as usize].kind {
            Kind::Dec(e) => e,
            _ => &[],
        }
    }

    pub(crate) fn lit_of(&self, id: u32) -> Option<Literal> {
        match self.nodes[id as usize].kind {
            Kind::Lit(l) => Some(l),
            _ => None,
        }
    }


    /// True when node `id` may stand where vtree node `slot` is expected.
    pub(crate) fn fits(&self, id: u32, slot: usize) -> bool {
        self.vt(id).is_none_or(|v| self.vtree.contains(slot, v))
    }

    pub(crate) fn intern(&mut self, v: u32, elems: Box<[(u32, u32)]>) -> u32 {
        if let Some(&id) = self.unique.get(&(v, elems.clone())) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(NodeData {
            vtree: v,
            kind: Kind::Dec(elems.clone()),
        });
        self.unique.insert((v, elems), id);
        id
    }

    /// Compresses, trims and interns a node for vtree node `v`. Primes must
    /// partition the left scope; `⊥` primes are dropped.
    pub(crate) fn make_decision(&mut self, v: usize, mut elems: Vec<(u32, u32)>) -> Result<u32> {
        elems.retain(|&(p, _)| p != FALSE);
        elems.sort_unstable_by_key(|&(p, s)| (s, p));
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(elems.len());
        for (p, s) in elems {
            if let Some(last) = merged.last_mut() {
                if last.1 == s {
                    last.0 = self.apply_ids(BoolOp::OR, last.0, p)?;
                    continue;
                }
            }
            merged.push((p, s));
        }
        match merged.as_slice() {
            [] => return Ok(FALSE),
            [(p, s)] => {
                debug_assert_eq!(*p, TRUE, "single prime of a partition must be ⊤");
                return Ok(*s);
            }
            [(p, TRUE), (_, FALSE)] | [(_, FALSE), (p, TRUE)] => return Ok(*p),
            _ => {}
        }
        merged.sort_unstable();
        Ok(self.intern(v as u32, merged.into_boxed_slice()))
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Error::Interrupted);
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn lit_id(l: Literal) -> u32 {
    2 * l.var.index() as u32 + u32::from(!l.positive)
}

#[cfg(test)]
mod tests;
