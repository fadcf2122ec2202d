//! Scratch copies of a diagram that may be edited locally and then folded
//! back into the canonical store.
//!
//! An [`EditableSdd`] need not be trimmed or compressed, and a child may be
//! normalised for any node inside the slot it occupies. [`EditableSdd::canonicalize`]
//! restores the canonical form bottom-up.

use rustc_hash::{FxHashMap, FxHashSet};

use super::{lit_id, BoolOp, Sdd, SddManager, FALSE, TRUE};
use crate::propcore::Literal;
use crate::{Error, Result};

/// Index of a node inside one [`EditableSdd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ENode {
    False,
    True,
    Literal(Literal),
    Decision {
        vtree: usize,
        elements: Vec<(EId, EId)>,
        /// Canonical node this was copied from, while unedited.
        origin: Option<u32>,
    },
}

#[derive(Debug, Clone)]
pub struct EditableSdd {
    mgr: u32,
    nodes: Vec<ENode>,
    root: EId,
    literals: FxHashMap<Literal, EId>,
}

impl EditableSdd {
    pub const FALSE: EId = EId(0);
    pub const TRUE: EId = EId(1);

    fn empty(m: &SddManager) -> Self {
        EditableSdd {
            mgr: m.tag,
            nodes: vec![ENode::False, ENode::True],
            root: Self::FALSE,
            literals: FxHashMap::default(),
        }
    }

    /// Plain copy of the reachable subgraph of `a`.
    pub fn from_sdd(m: &SddManager, a: Sdd) -> EditableSdd {
        let mut e = Self::empty(m);
        let mut memo = FxHashMap::default();
        e.root = e.adopt(m, m.own(a), &mut memo);
        e
    }

    /// Copy of `a` in which every decision node whose left child is a leaf
    /// `X` has the primes `X` and `¬X` spelled out, and every literal that
    /// trimming had moved above its leaf's parent `w` is put back into a
    /// decision node for `w`.
    pub fn expand(m: &SddManager, a: Sdd) -> EditableSdd {
        let mut e = Self::empty(m);
        let mut memo = FxHashMap::default();
        let mut lifted = FxHashMap::default();
        let root_slot = m.vtree.root();
        e.root = e.expand_rec(m, m.own(a), root_slot, &mut memo, &mut lifted);
        e
    }

    fn expand_rec(
        &mut self,
        m: &SddManager,
        x: u32,
        slot: usize,
        memo: &mut FxHashMap<u32, EId>,
        lifted: &mut FxHashMap<Literal, EId>,
    ) -> EId {
        match x {
            FALSE => return Self::FALSE,
            TRUE => return Self::TRUE,
            _ => {}
        }
        if let Some(l) = m.lit_of(x) {
            let leaf = m.vtree.leaf_of(l.var).expect("manager literal");
            if leaf == slot {
                return self.literal(l);
            }
            if let Some(&id) = lifted.get(&l) {
                return id;
            }
            let w = m.vtree.parent(leaf).expect("a literal below its slot has a parent");
            let lit = self.literal(l);
            let elements = if m.vtree.left(w) == leaf {
                let neg = self.literal(l.negate());
                vec![(lit, Self::TRUE), (neg, Self::FALSE)]
            } else {
                self.split_true_prime(m, w, lit)
            };
            let id = self.push(ENode::Decision {
                vtree: w,
                elements,
                origin: None,
            });
            lifted.insert(l, id);
            return id;
        }
        if let Some(&id) = memo.get(&x) {
            return id;
        }
        let v = m.vt(x).unwrap();
        let (lv, rv) = (m.vtree.left(v), m.vtree.right(v));
        let elements: Vec<(EId, EId)> = m
            .elements(x)
            .to_vec()
            .into_iter()
            .map(|(p, s)| {
                (
                    self.expand_rec(m, p, lv, memo, lifted),
                    self.expand_rec(m, s, rv, memo, lifted),
                )
            })
            .collect();
        let id = self.push(ENode::Decision {
            vtree: v,
            elements,
            origin: Some(x),
        });
        memo.insert(x, id);
        id
    }

    /// Elements for `{(⊤, sub)}` at `w`, written over `Y`/`¬Y` when the left
    /// child of `w` is the leaf of `Y`.
    fn split_true_prime(&mut self, m: &SddManager, w: usize, sub: EId) -> Vec<(EId, EId)> {
        match m.vtree.var(m.vtree.left(w)) {
            Some(y) => {
                let pos = self.literal(Literal::new(y, true));
                let neg = self.literal(Literal::new(y, false));
                vec![(pos, sub), (neg, sub)]
            }
            None => vec![(Self::TRUE, sub)],
        }
    }

    fn adopt(&mut self, m: &SddManager, x: u32, memo: &mut FxHashMap<u32, EId>) -> EId {
        match x {
            FALSE => return Self::FALSE,
            TRUE => return Self::TRUE,
            _ => {}
        }
        if let Some(l) = m.lit_of(x) {
            return self.literal(l);
        }
        if let Some(&id) = memo.get(&x) {
            return id;
        }
        let elements: Vec<(EId, EId)> = m
            .elements(x)
            .to_vec()
            .into_iter()
            .map(|(p, s)| (self.adopt(m, p, memo), self.adopt(m, s, memo)))
            .collect();
        let id = self.push(ENode::Decision {
            vtree: m.vt(x).unwrap(),
            elements,
            origin: Some(x),
        });
        memo.insert(x, id);
        id
    }

    fn push(&mut self, node: ENode) -> EId {
        self.nodes.push(node);
        EId(self.nodes.len() as u32 - 1)
    }

    /// The node for `lit`, shared across the whole copy.
    pub fn literal(&mut self, lit: Literal) -> EId {
        if let Some(&id) = self.literals.get(&lit) {
            return id;
        }
        let id = self.push(ENode::Literal(lit));
        self.literals.insert(lit, id);
        id
    }

    pub fn root(&self) -> EId {
        self.root
    }

    pub fn node(&self, e: EId) -> &ENode {
        &self.nodes[e.0 as usize]
    }

    pub fn elements(&self, e: EId) -> &[(EId, EId)] {
        match self.node(e) {
            ENode::Decision { elements, .. } => elements,
            _ => &[],
        }
    }

    fn vtree_of(&self, m: &SddManager, e: EId) -> Option<usize> {
        match self.node(e) {
            ENode::False | ENode::True => None,
            ENode::Literal(l) => Some(m.vtree.leaf_of(l.var).expect("manager literal")),
            ENode::Decision { vtree, .. } => Some(*vtree),
        }
    }

    /// Nodes reachable from the root, children before parents.
    pub fn reachable(&self) -> Vec<EId> {
        let mut seen = FxHashSet::default();
        let mut order = Vec::new();
        let mut stack = vec![(self.root, false)];
        while let Some((e, done)) = stack.pop() {
            if done {
                order.push(e);
                continue;
            }
            if !seen.insert(e) {
                continue;
            }
            stack.push((e, true));
            for &(p, s) in self.elements(e).iter().rev() {
                stack.push((s, false));
                stack.push((p, false));
            }
        }
        order
    }

    /// Reachable decision nodes normalised for vtree node `v`.
    pub fn decisions_at(&self, v: usize) -> Vec<EId> {
        self.reachable()
            .into_iter()
            .filter(|&e| matches!(self.node(e), ENode::Decision { vtree, .. } if *vtree == v))
            .collect()
    }

    /// Sum of element counts over reachable decision nodes.
    pub fn size(&self) -> usize {
        self.reachable().iter().map(|&e| self.elements(e).len()).sum()
    }

    /// # Panics
    /// Panics if `node` is not a decision node.
    pub fn set_elements(&mut self, node: EId, new: Vec<(EId, EId)>) {
        match &mut self.nodes[node.0 as usize] {
            ENode::Decision { elements, origin, .. } => {
                *elements = new;
                *origin = None;
            }
            other => panic!("{other:?} is not a decision node"),
        }
    }

    /// Makes every reference to `old` point at `new`. Both must be
    /// normalised for the same vtree node; constants fit anywhere.
    pub fn replace(&mut self, m: &SddManager, old: EId, new: EId) -> Result<()> {
        self.check_manager(m)?;
        let (vo, vn) = (self.vtree_of(m, old), self.vtree_of(m, new));
        if let (Some(a), Some(b)) = (vo, vn) {
            if a != b {
                return Err(Error::input(format!(
                    "cannot replace a node for vtree node {a} with one for {b}"
                )));
            }
        }
        if old == new {
            return Ok(());
        }
        for node in &mut self.nodes {
            if let ENode::Decision { elements, origin, .. } = node {
                let mut touched = false;
                for (p, s) in elements.iter_mut() {
                    if *p == old {
                        *p = new;
                        touched = true;
                    }
                    if *s == old {
                        *s = new;
                        touched = true;
                    }
                }
                if touched {
                    *origin = None;
                }
            }
        }
        if self.root == old {
            self.root = new;
        }
        Ok(())
    }

    /// Merges the elements of `node` that share a sub by disjoining their
    /// primes.
    pub fn compress(&mut self, m: &mut SddManager, node: EId) -> Result<()> {
        self.check_manager(m)?;
        let elements = self.elements(node).to_vec();
        let mut groups: Vec<(EId, Vec<EId>)> = Vec::new();
        for (p, s) in elements.iter().copied() {
            match groups.iter_mut().find(|(sub, _)| *sub == s) {
                Some((_, primes)) => primes.push(p),
                None => groups.push((s, vec![p])),
            }
        }
        if groups.len() == elements.len() {
            return Ok(());
        }
        let mut memo = FxHashMap::default();
        let mut merged = Vec::with_capacity(groups.len());
        for (s, primes) in groups {
            if primes.len() == 1 {
                merged.push((primes[0], s));
                continue;
            }
            let mut acc = FALSE;
            for p in primes {
                let cp = self.canon(m, p, &mut memo)?;
                acc = m.apply_ids(BoolOp::OR, acc, cp)?;
            }
            let mut adopt_memo = FxHashMap::default();
            merged.push((self.adopt(m, acc, &mut adopt_memo), s));
        }
        self.set_elements(node, merged);
        Ok(())
    }

    /// Drops elements whose prime is `⊥` everywhere in the copy.
    pub fn prune(&mut self) {
        for node in &mut self.nodes {
            if let ENode::Decision { elements, origin, .. } = node {
                let before = elements.len();
                elements.retain(|&(p, _)| p != Self::FALSE);
                if elements.len() != before {
                    *origin = None;
                }
            }
        }
    }

    /// Rebuilds the copy through the unique table. Every decision node must
    /// still have primes that partition its left scope.
    pub fn canonicalize(&self, m: &mut SddManager) -> Result<Sdd> {
        self.check_manager(m)?;
        let mut memo = FxHashMap::default();
        let id = self.canon(m, self.root, &mut memo)?;
        Ok(m.handle(id))
    }

    fn canon(&self, m: &mut SddManager, e: EId, memo: &mut FxHashMap<EId, u32>) -> Result<u32> {
        let (vtree, elements, origin) = match self.node(e) {
            ENode::False => return Ok(FALSE),
            ENode::True => return Ok(TRUE),
            ENode::Literal(l) => return Ok(lit_id(*l)),
            ENode::Decision {
                vtree,
                elements,
                origin,
            } => (*vtree, elements, *origin),
        };
        if let Some(&r) = memo.get(&e) {
            return Ok(r);
        }
        let mut out = Vec::with_capacity(elements.len());
        for &(p, s) in elements {
            let cp = self.canon(m, p, memo)?;
            if cp == FALSE {
                continue;
            }
            out.push((cp, self.canon(m, s, memo)?));
        }
        let r = match origin {
            Some(o) if m.elements(o) == out.as_slice() => o,
            _ => m.make_decision(vtree, out)?,
        };
        memo.insert(e, r);
        Ok(r)
    }

    fn check_manager(&self, m: &SddManager) -> Result<()> {
        if m.tag != self.mgr {
            return Err(Error::ForeignHandle);
        }
        Ok(())
    }
}
