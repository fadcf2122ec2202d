use std::fmt;

use rustc_hash::FxHashMap;

use super::{Sdd, SddManager, FALSE, TRUE};
use crate::propcore::Literal;
use crate::Result;

/// A binary Boolean operator given by its truth table: bit `2a + b` holds
/// `op(a, b)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoolOp(pub u8);

impl BoolOp {
    pub const AND: BoolOp = BoolOp(0b1000);
    pub const OR: BoolOp = BoolOp(0b1110);
    pub const XOR: BoolOp = BoolOp(0b0110);
    pub const IFF: BoolOp = BoolOp(0b1001);
    pub const IMPLIES: BoolOp = BoolOp(0b1011);
    pub const NAND: BoolOp = BoolOp(0b0111);
    pub const NOR: BoolOp = BoolOp(0b0001);

    /// All sixteen operators.
    pub fn all() -> impl Iterator<Item = BoolOp> {
        (0..16).map(BoolOp)
    }

    pub fn eval(self, a: bool, b: bool) -> bool {
        (self.0 >> ((u8::from(a) << 1) | u8::from(b))) & 1 == 1
    }

    fn commutative(self) -> bool {
        self.eval(false, true) == self.eval(true, false)
    }
}

impl fmt::Debug for BoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BoolOp::AND => f.write_str("AND"),
            BoolOp::OR => f.write_str("OR"),
            BoolOp::XOR => f.write_str("XOR"),
            BoolOp::IFF => f.write_str("IFF"),
            BoolOp::IMPLIES => f.write_str("IMPLIES"),
            _ => write!(f, "BoolOp({:04b})", self.0),
        }
    }
}

/// What `x ↦ g(x)` is when `g` is known at both inputs.
enum Unary {
    Const(bool),
    Same,
    Flip,
}

fn unary(at_false: bool, at_true: bool) -> Unary {
    match (at_false, at_true) {
        (false, true) => Unary::Same,
        (true, false) => Unary::Flip,
        (v, _) => Unary::Const(v),
    }
}

impl SddManager {
    /// `op(a, b)` as a canonical node.
    pub fn apply(&mut self, a: Sdd, b: Sdd, op: BoolOp) -> Result<Sdd> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        self.apply_calls += 1;
        let r = self.apply_ids(op, a, b)?;
        Ok(self.handle(r))
    }

    pub fn conjoin(&mut self, a: Sdd, b: Sdd) -> Result<Sdd> {
        self.apply(a, b, BoolOp::AND)
    }

    pub fn disjoin(&mut self, a: Sdd, b: Sdd) -> Result<Sdd> {
        self.apply(a, b, BoolOp::OR)
    }

    fn resolve_unary(&mut self, g: Unary, x: u32) -> u32 {
        match g {
            Unary::Const(v) => u32::from(v),
            Unary::Same => x,
            Unary::Flip => self.negate_id(x),
        }
    }

    pub(crate) fn apply_ids(&mut self, op: BoolOp, a: u32, b: u32) -> Result<u32> {
        if a <= TRUE {
            let c = a == TRUE;
            return Ok(self.resolve_unary(unary(op.eval(c, false), op.eval(c, true)), b));
        }
        if b <= TRUE {
            let c = b == TRUE;
            return Ok(self.resolve_unary(unary(op.eval(false, c), op.eval(true, c)), a));
        }
        if a == b {
            return Ok(self.resolve_unary(unary(op.eval(false, false), op.eval(true, true)), a));
        }
        let complementary = match (self.lit_of(a), self.lit_of(b)) {
            (Some(_), Some(_)) => a ^ 1 == b,
            _ => self.negations.get(&a) == Some(&b),
        };
        if complementary {
            return Ok(self.resolve_unary(unary(op.eval(false, true), op.eval(true, false)), a));
        }
        let (a, b) = if op.commutative() && b < a { (b, a) } else { (a, b) };
        if let Some(&r) = self.apply_cache.get(&(op.0, a, b)) {
            return Ok(r);
        }
        self.tick()?;

        let va = self.vt(a).unwrap();
        let vb = self.vt(b).unwrap();
        let w = self.vtree.lca(va, vb);
        let left = self.vtree.left(w);
        let ea = self.elements_at(a, va, w, left);
        let eb = self.elements_at(b, vb, w, left);

        let mut out = Vec::with_capacity(ea.len() * eb.len());
        for &(pa, sa) in &ea {
            for &(pb, sb) in &eb {
                let p = self.apply_ids(BoolOp::AND, pa, pb)?;
                if p == FALSE {
                    continue;
                }
                let s = self.apply_ids(op, sa, sb)?;
                out.push((p, s));
            }
        }
        let r = self.make_decision(w, out)?;
        self.apply_cache.insert((op.0, a, b), r);
        Ok(r)
    }

    /// Elements of `x` viewed as a decomposition at vtree node `w`.
    fn elements_at(&mut self, x: u32, vx: usize, w: usize, w_left: usize) -> Vec<(u32, u32)> {
        if vx == w {
            self.elements(x).to_vec()
        } else if self.vtree.contains(w_left, vx) {
            let nx = self.negate_id(x);
            vec![(x, TRUE), (nx, FALSE)]
        } else {
            vec![(TRUE, x)]
        }
    }

    /// `¬a`.
    pub fn negate(&mut self, a: Sdd) -> Sdd {
        let id = self.own(a);
        let r = self.negate_id(id);
        self.handle(r)
    }

    pub(crate) fn negate_id(&mut self, a: u32) -> u32 {
        match a {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if self.lit_of(a).is_some() {
            return a ^ 1;
        }
        if let Some(&r) = self.negations.get(&a) {
            return r;
        }
        let v = self.nodes[a as usize].vtree;
        let elems: Vec<(u32, u32)> = self.elements(a).to_vec();
        let flipped: Box<[(u32, u32)]> = elems.into_iter().map(|(p, s)| (p, self.negate_id(s))).collect();
        let r = self.intern(v, flipped);
        self.negations.insert(a, r);
        self.negations.insert(r, a);
        r
    }

    /// `a` with `lit` asserted: the variable is fixed to the literal's
    /// polarity.
    pub fn condition(&mut self, a: Sdd, lit: Literal) -> Sdd {
        let id = self.own(a);
        let leaf = self
            .vtree
            .leaf_of(lit.var)
            .expect("conditioning on a variable outside the vtree");
        let mut memo = FxHashMap::default();
        let deadline = self.deadline.take();
        let r = self.condition_id(id, lit, leaf, &mut memo);
        self.deadline = deadline;
        self.handle(r.expect("conditioning runs without a deadline"))
    }

    fn condition_id(&mut self, a: u32, lit: Literal, leaf: usize, memo: &mut FxHashMap<u32, u32>) -> Result<u32> {
        if a <= TRUE {
            return Ok(a);
        }
        if let Some(l) = self.lit_of(a) {
            if l.var != lit.var {
                return Ok(a);
            }
            return Ok(u32::from(l == lit));
        }
        let v = self.vt(a).unwrap();
        if !self.vtree.contains(v, leaf) {
            return Ok(a);
        }
        if let Some(&r) = memo.get(&a) {
            return Ok(r);
        }
        let elems = self.elements(a).to_vec();
        let r = if self.vtree.contains(self.vtree.left(v), leaf) {
            // Conditioned primes overlap, so rebuild by disjunction.
            let mut acc = FALSE;
            for (p, s) in elems {
                let cp = self.condition_id(p, lit, leaf, memo)?;
                let term = self.apply_ids(BoolOp::AND, cp, s)?;
                acc = self.apply_ids(BoolOp::OR, acc, term)?;
            }
            acc
        } else {
            let mut out = Vec::with_capacity(elems.len());
            for (p, s) in elems {
                out.push((p, self.condition_id(s, lit, leaf, memo)?));
            }
            self.make_decision(v, out)?
        };
        memo.insert(a, r);
        Ok(r)
    }
}
