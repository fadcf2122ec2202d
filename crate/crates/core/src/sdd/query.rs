use rustc_hash::{FxHashMap, FxHashSet};

use super::{Sdd, SddManager, FALSE, TRUE};
use crate::propcore::{Literal, ModelSet};
use crate::{Error, Result};

impl SddManager {
    /// Number of models of `a` over all variables of the vtree.
    pub fn model_count(&self, a: Sdd) -> u128 {
        self.model_count_traced(a).0
    }

    /// Model count together with the number of nodes the traversal
    /// evaluated (each distinct node at most once).
    pub fn model_count_traced(&self, a: Sdd) -> (u128, usize) {
        let a = self.own(a);
        let mut memo = FxHashMap::default();
        let root = self.vtree.root();
        let count = self.mc_scoped(a, root, &mut memo);
        (count, memo.len())
    }

    fn mc_scoped(&self, x: u32, scope: usize, memo: &mut FxHashMap<u32, u128>) -> u128 {
        let width = self.vtree.leaf_count(scope) as u32;
        let local = self.mc_local(x, memo);
        match self.vt(x) {
            None => local << width,
            Some(v) => local << (width - self.vtree.leaf_count(v) as u32),
        }
    }

    /// Count over the node's own scope; constants use the empty scope.
    fn mc_local(&self, x: u32, memo: &mut FxHashMap<u32, u128>) -> u128 {
        if let Some(&c) = memo.get(&x) {
            return c;
        }
        let c = match x {
            FALSE => 0,
            TRUE => 1,
            _ if self.lit_of(x).is_some() => 1,
            _ => {
                let v = self.vt(x).unwrap();
                let (l, r) = (self.vtree.left(v), self.vtree.right(v));
                self.elements(x)
                    .iter()
                    .map(|&(p, s)| self.mc_scoped(p, l, memo) * self.mc_scoped(s, r, memo))
                    .sum()
            }
        };
        memo.insert(x, c);
        c
    }

    /// Whether `a ∧ c` is satisfiable, for a conjunction of literals `c`.
    pub fn satisfies(&self, a: Sdd, c: &[Literal]) -> Result<bool> {
        Ok(self.satisfies_traced(a, c)?.0)
    }

    pub fn satisfies_traced(&self, a: Sdd, c: &[Literal]) -> Result<(bool, usize)> {
        let a = self.check(a)?;
        let mut assign: Vec<Option<bool>> = vec![None; self.var_count() + 1];
        for l in c {
            let slot = assign
                .get_mut(l.var.index())
                .ok_or_else(|| Error::input(format!("{} is outside the vtree", l.var)))?;
            if slot.is_some() {
                return Err(Error::input(format!("{} repeated in the term", l.var)));
            }
            *slot = Some(l.positive);
        }
        let mut memo = FxHashMap::default();
        let r = self.sat_rec(a, &assign, &mut memo);
        Ok((r, memo.len()))
    }

    fn sat_rec(&self, x: u32, assign: &[Option<bool>], memo: &mut FxHashMap<u32, bool>) -> bool {
        if let Some(&r) = memo.get(&x) {
            return r;
        }
        let r = match x {
            FALSE => false,
            TRUE => true,
            _ => match self.lit_of(x) {
                Some(l) => assign[l.var.index()].is_none_or(|v| v == l.positive),
                None => self
                    .elements(x)
                    .iter()
                    .any(|&(p, s)| self.sat_rec(p, assign, memo) && self.sat_rec(s, assign, memo)),
            },
        };
        memo.insert(x, r);
        r
    }

    /// Sum of element counts over the distinct decision nodes reachable
    /// from `a`.
    pub fn size(&self, a: Sdd) -> usize {
        let mut seen = FxHashSet::default();
        self.reachable(self.own(a), &mut seen);
        seen.iter().map(|&x| self.elements(x).len()).sum()
    }

    /// Distinct nodes reachable from `a`, terminals included.
    pub fn node_count(&self, a: Sdd) -> usize {
        let mut seen = FxHashSet::default();
        self.reachable(self.own(a), &mut seen);
        seen.len()
    }

    fn reachable(&self, x: u32, seen: &mut FxHashSet<u32>) {
        if !seen.insert(x) {
            return;
        }
        for &(p, s) in self.elements(x) {
            self.reachable(p, seen);
            self.reachable(s, seen);
        }
    }

    /// Truth value under a total assignment; bit `i - 1` of `bits` is `x_i`.
    pub fn evaluate(&self, a: Sdd, bits: u64) -> bool {
        let mut x = self.own(a);
        loop {
            match x {
                FALSE => return false,
                TRUE => return true,
                _ => {}
            }
            if let Some(l) = self.lit_of(x) {
                return ((bits >> (l.var.index() - 1)) & 1 == 1) == l.positive;
            }
            let elems = self.elements(x);
            let hit = elems
                .iter()
                .find(|&&(p, _)| self.evaluate(self.handle(p), bits))
                .expect("primes are exhaustive");
            x = hit.1;
        }
    }

    /// Models by enumeration of all assignments, for checking against the
    /// oracle.
    pub fn model_set(&self, a: Sdd) -> Result<ModelSet> {
        let n = self.var_count();
        let mut out = ModelSet::empty(n)?;
        for bits in 0..(1u64 << n) {
            if self.evaluate(a, bits) {
                out.insert_bits(bits);
            }
        }
        Ok(out)
    }
}
