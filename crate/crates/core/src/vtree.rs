//! Variable trees.
//!
//! Nodes are addressed by their in-order position, which makes "is `a`
//! inside the subtree of `b`" a range check. Every node also carries an
//! external id used by the text format; constructed vtrees use the
//! position as id, so the balanced vtree over four variables labels its
//! internal nodes 1, 3 and 5.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;

use crate::propcore::Var;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VtreeKind {
    Leaf(Var),
    Internal { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VtreeNode {
    pub id: usize,
    pub kind: VtreeKind,
    pub position: usize,
    pub parent: Option<usize>,
    /// Inclusive range of positions covered by this subtree.
    pub lo: usize,
    pub hi: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vtree {
    nodes: Vec<VtreeNode>,
    root: usize,
    /// `leaves[i]` is the position of the leaf for `x_{i+1}`.
    leaves: Vec<usize>,
    depth: Vec<u32>,
}

/// Shape description used while building: children are indices into the
/// same list.
enum Shape {
    Leaf(Var, usize),
    Internal(usize, usize, usize),
}

impl Vtree {
    /// Balanced vtree over `x1..xn`; the left subtree gets the extra leaf
    /// when `n` is odd.
    pub fn balanced(n: usize) -> Result<Vtree> {
        check_count(n)?;
        let mut shapes = Vec::new();
        let root = balanced_shape(&mut shapes, 1, n);
        Vtree::assemble(shapes, root, true)
    }

    /// Vtree whose left children are all leaves.
    pub fn right_linear(n: usize) -> Result<Vtree> {
        check_count(n)?;
        let mut shapes = Vec::new();
        let mut acc = push_leaf(&mut shapes, n);
        for i in (1..n).rev() {
            let l = push_leaf(&mut shapes, i);
            shapes.push(Shape::Internal(0, l, acc));
            acc = shapes.len() - 1;
        }
        Vtree::assemble(shapes, acc, true)
    }

    fn assemble(shapes: Vec<Shape>, root: usize, position_ids: bool) -> Result<Vtree> {
        // In-order walk assigns positions.
        let mut order = Vec::with_capacity(shapes.len());
        let mut stack = Vec::new();
        let mut cur = Some(root);
        let mut seen = vec![false; shapes.len()];
        while cur.is_some() || !stack.is_empty() {
            while let Some(c) = cur {
                if seen[c] {
                    return Err(Error::parse(0, "vtree contains a cycle or a shared node"));
                }
                seen[c] = true;
                stack.push(c);
                cur = match shapes[c] {
                    Shape::Internal(_, l, _) => Some(l),
                    Shape::Leaf(..) => None,
                };
            }
            let c = stack.pop().unwrap();
            order.push(c);
            cur = match shapes[c] {
                Shape::Internal(_, _, r) => Some(r),
                Shape::Leaf(..) => None,
            };
        }
        if order.len() != shapes.len() {
            return Err(Error::parse(0, "vtree has nodes unreachable from the root"));
        }
        let mut pos_of = vec![0; shapes.len()];
        for (p, &s) in order.iter().enumerate() {
            pos_of[s] = p;
        }
        let mut nodes: Vec<VtreeNode> = order
            .iter()
            .enumerate()
            .map(|(p, &s)| {
                let (id, kind) = match shapes[s] {
                    Shape::Leaf(v, id) => (id, VtreeKind::Leaf(v)),
                    Shape::Internal(id, l, r) => (
                        id,
                        VtreeKind::Internal {
                            left: pos_of[l],
                            right: pos_of[r],
                        },
                    ),
                };
                VtreeNode {
                    id: if position_ids { p } else { id },
                    kind,
                    position: p,
                    parent: None,
                    lo: p,
                    hi: p,
                }
            })
            .collect();
        let root = pos_of[root];
        let mut depth = vec![0u32; nodes.len()];
        // Children are visited after their parent in a pre-order walk.
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            if let VtreeKind::Internal { left, right } = nodes[p].kind {
                nodes[left].parent = Some(p);
                nodes[right].parent = Some(p);
                depth[left] = depth[p] + 1;
                depth[right] = depth[p] + 1;
                stack.push(left);
                stack.push(right);
            }
        }
        // Subtrees are contiguous in in-order, so ranges are the extreme leaves.
        for p in 0..nodes.len() {
            let (mut lo, mut hi) = (p, p);
            while let VtreeKind::Internal { left, .. } = nodes[lo].kind {
                lo = left;
            }
            while let VtreeKind::Internal { right, .. } = nodes[hi].kind {
                hi = right;
            }
            nodes[p].lo = lo;
            nodes[p].hi = hi;
        }
        let var_count = nodes.iter().filter(|n| matches!(n.kind, VtreeKind::Leaf(_))).count();
        let mut leaves = vec![usize::MAX; var_count];
        for n in &nodes {
            if let VtreeKind::Leaf(v) = n.kind {
                let slot = v.index() - 1;
                if slot >= var_count || leaves[slot] != usize::MAX {
                    return Err(Error::parse(
                        0,
                        format!("leaves must cover x1..x{var_count} exactly once; {v} is out of place"),
                    ));
                }
                leaves[slot] = n.position;
            }
        }
        let mut ids = FxHashMap::default();
        for n in &nodes {
            if ids.insert(n.id, n.position).is_some() {
                return Err(Error::parse(0, format!("duplicate vtree node id {}", n.id)));
            }
        }
        Ok(Vtree {
            nodes,
            root,
            leaves,
            depth,
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn var_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn node(&self, p: usize) -> &VtreeNode {
        &self.nodes[p]
    }

    pub fn nodes(&self) -> &[VtreeNode] {
        &self.nodes
    }

    pub fn is_leaf(&self, p: usize) -> bool {
        matches!(self.nodes[p].kind, VtreeKind::Leaf(_))
    }

    /// # Panics
    /// Panics if `p` is a leaf.
    pub fn left(&self, p: usize) -> usize {
        match self.nodes[p].kind {
            VtreeKind::Internal { left, .. } => left,
            VtreeKind::Leaf(_) => panic!("leaf {p} has no children"),
        }
    }

    /// # Panics
    /// Panics if `p` is a leaf.
    pub fn right(&self, p: usize) -> usize {
        match self.nodes[p].kind {
            VtreeKind::Internal { right, .. } => right,
            VtreeKind::Leaf(_) => panic!("leaf {p} has no children"),
        }
    }

    pub fn parent(&self, p: usize) -> Option<usize> {
        self.nodes[p].parent
    }

    pub fn var(&self, p: usize) -> Option<Var> {
        match self.nodes[p].kind {
            VtreeKind::Leaf(v) => Some(v),
            VtreeKind::Internal { .. } => None,
        }
    }

    pub fn depth(&self, p: usize) -> u32 {
        self.depth[p]
    }

    /// Number of leaves under `p`.
    pub fn leaf_count(&self, p: usize) -> usize {
        let n = &self.nodes[p];
        (n.hi - n.lo) / 2 + 1
    }

    pub fn leaf_of(&self, var: Var) -> Result<usize> {
        self.leaves
            .get(var.index() - 1)
            .copied()
            .ok_or_else(|| Error::input(format!("{var} is not in the vtree over {} variables", self.var_count())))
    }

    /// The internal node whose child is the leaf of `var`.
    pub fn parent_of(&self, var: Var) -> Result<usize> {
        let leaf = self.leaf_of(var)?;
        self.nodes[leaf]
            .parent
            .ok_or_else(|| Error::NoParent(format!("{var} is the only leaf of the vtree")))
    }

    /// True when `inner` lies in the subtree rooted at `outer`.
    pub fn contains(&self, outer: usize, inner: usize) -> bool {
        let o = &self.nodes[outer];
        o.lo <= inner && inner <= o.hi
    }

    /// Lowest common ancestor.
    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.nodes[a].parent.unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.nodes[b].parent.unwrap();
        }
        while a != b {
            a = self.nodes[a].parent.unwrap();
            b = self.nodes[b].parent.unwrap();
        }
        a
    }

    pub fn position_of_id(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Variables in in-order.
    pub fn var_order(&self) -> Vec<Var> {
        self.nodes.iter().filter_map(|n| self.var(n.position)).collect()
    }

    /// Text form: `vtree <count>` followed by one line per node in
    /// post-order, so the root comes last.
    pub fn serialize(&self) -> String {
        let mut out = format!("vtree {}\n", self.nodes.len());
        let mut post = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((p, expanded)) = stack.pop() {
            match self.nodes[p].kind {
                VtreeKind::Internal { left, right } if !expanded => {
                    stack.push((p, true));
                    stack.push((right, false));
                    stack.push((left, false));
                }
                _ => post.push(p),
            }
        }
        for p in post {
            let n = &self.nodes[p];
            match n.kind {
                VtreeKind::Leaf(v) => writeln!(out, "L {} {}", n.id, v.index()),
                VtreeKind::Internal { left, right } => {
                    writeln!(out, "I {} {} {}", n.id, self.nodes[left].id, self.nodes[right].id)
                }
            }
            .unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Vtree> {
        let mut header: Option<usize> = None;
        let mut shapes: Vec<Shape> = Vec::new();
        let mut by_id: FxHashMap<usize, usize> = FxHashMap::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = t.split_whitespace().collect();
            let num = |k: usize| -> Result<usize> {
                f.get(k)
                    .ok_or_else(|| Error::parse(line, "missing field"))?
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad number '{}'", f[k])))
            };
            match f[0] {
                "vtree" if header.is_none() => header = Some(num(1)?),
                "L" | "I" if header.is_none() => return Err(Error::parse(line, "missing 'vtree' header")),
                "L" => {
                    if f.len() != 3 {
                        return Err(Error::parse(line, "expected 'L <id> <var>'"));
                    }
                    let (id, var) = (num(1)?, num(2)?);
                    if var == 0 {
                        return Err(Error::parse(line, "variables are numbered from 1"));
                    }
                    if by_id.insert(id, shapes.len()).is_some() {
                        return Err(Error::parse(line, format!("duplicate node id {id}")));
                    }
                    shapes.push(Shape::Leaf(Var::new(var), id));
                }
                "I" => {
                    if f.len() != 4 {
                        return Err(Error::parse(line, "expected 'I <id> <left> <right>'"));
                    }
                    let (id, l, r) = (num(1)?, num(2)?, num(3)?);
                    let child = |c: usize| {
                        by_id
                            .get(&c)
                            .copied()
                            .ok_or_else(|| Error::parse(line, format!("child {c} not defined before use")))
                    };
                    let (l, r) = (child(l)?, child(r)?);
                    if l == r {
                        return Err(Error::parse(line, "both children are the same node"));
                    }
                    if by_id.insert(id, shapes.len()).is_some() {
                        return Err(Error::parse(line, format!("duplicate node id {id}")));
                    }
                    shapes.push(Shape::Internal(id, l, r));
                }
                other => return Err(Error::parse(line, format!("unknown record '{other}'"))),
            }
        }
        let count = header.ok_or_else(|| Error::parse(1, "missing 'vtree' header"))?;
        if shapes.is_empty() {
            return Err(Error::parse(1, "vtree has no nodes"));
        }
        if shapes.len() != count {
            return Err(Error::parse(
                1,
                format!("header announces {count} nodes but {} were given", shapes.len()),
            ));
        }
        let root = shapes.len() - 1;
        Vtree::assemble(shapes, root, false)
    }

    /// Structural equality ignoring external ids.
    pub fn same_shape(&self, other: &Vtree) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.root == other.root
            && self.nodes.iter().zip(&other.nodes).all(|(a, b)| a.kind == b.kind)
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::input("a vtree needs at least one variable"));
    }
    Ok(())
}

fn push_leaf(shapes: &mut Vec<Shape>, var: usize) -> usize {
    shapes.push(Shape::Leaf(Var::new(var), 0));
    shapes.len() - 1
}

fn balanced_shape(shapes: &mut Vec<Shape>, first: usize, last: usize) -> usize {
    if first == last {
        return push_leaf(shapes, first);
    }
    let count = last - first + 1;
    let split = first + count.div_ceil(2) - 1;
    let l = balanced_shape(shapes, first, split);
    let r = balanced_shape(shapes, split + 1, last);
    shapes.push(Shape::Internal(0, l, r));
    shapes.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn validate(v: &Vtree, n: usize) {
        assert_eq!(v.var_count(), n);
        assert_eq!(v.node_count(), 2 * n - 1);
        for node in v.nodes() {
            if let VtreeKind::Internal { left, right } = node.kind {
                assert!(v.node(left).hi < node.position && node.position < v.node(right).lo);
                assert_eq!(v.parent(left), Some(node.position));
            }
        }
        let order: Vec<usize> = v.var_order().iter().map(|x| x.index()).collect();
        assert_eq!(order, (1..=n).collect::<Vec<_>>());
    }

    #[test]
    fn constructed_shapes_validate() {
        for n in 1..=64 {
            validate(&Vtree::balanced(n).unwrap(), n);
            validate(&Vtree::right_linear(n).unwrap(), n);
        }
        assert!(Vtree::balanced(0).is_err());
        assert!(Vtree::right_linear(0).is_err());
    }

    #[test]
    fn balanced_splits() {
        let v = Vtree::balanced(7).unwrap();
        assert_eq!(v.leaf_count(v.left(v.root())), 4);
        assert_eq!(v.leaf_count(v.right(v.root())), 3);
        let one = Vtree::balanced(1).unwrap();
        assert!(one.is_leaf(one.root()));
    }

    #[test]
    fn right_linear_spine() {
        let v = Vtree::right_linear(4).unwrap();
        let mut p = v.root();
        let mut internal = 0;
        while !v.is_leaf(p) {
            assert!(v.is_leaf(v.left(p)));
            p = v.right(p);
            internal += 1;
        }
        assert_eq!(internal, 3);
        assert_eq!(Vtree::right_linear(2).unwrap().node_count(), 3);
    }

    #[test]
    fn parents_in_four_leaf_balanced() {
        let v = Vtree::balanced(4).unwrap();
        assert_eq!(v.node(v.parent_of(Var::new(1)).unwrap()).id, 1);
        assert_eq!(v.node(v.parent_of(Var::new(3)).unwrap()).id, 5);
        assert_eq!(v.node(v.root()).id, 3);
        let single = Vtree::balanced(1).unwrap();
        assert!(matches!(single.parent_of(Var::new(1)), Err(Error::NoParent(_))));
        assert!(v.parent_of(Var::new(9)).is_err());
    }

    #[test]
    fn lca_and_containment() {
        let v = Vtree::balanced(4).unwrap();
        let l = v.leaf_of(Var::new(1)).unwrap();
        let k = v.leaf_of(Var::new(2)).unwrap();
        let a = v.leaf_of(Var::new(4)).unwrap();
        assert_eq!(v.lca(l, k), 1);
        assert_eq!(v.lca(l, a), v.root());
        assert!(v.contains(v.root(), a));
        assert!(!v.contains(1, a));
    }

    #[test]
    fn round_trips() {
        for v in [Vtree::balanced(2).unwrap(), Vtree::balanced(9).unwrap(), Vtree::right_linear(5).unwrap()] {
            let back = Vtree::parse(&v.serialize()).unwrap();
            assert_eq!(back, v);
        }
        let leaf = Vtree::parse("vtree 1\nL 0 1\n").unwrap();
        assert_eq!(leaf.var_count(), 1);
    }

    #[test]
    fn nested_left_vtree_from_file() {
        // L, then (K P) under node 5, all under 1, with A hanging off the root 3
        let text = "vtree 7\nL 10 1\nL 11 2\nL 12 3\nI 5 11 12\nI 1 10 5\nL 13 4\nI 3 1 13\n";
        let v = Vtree::parse(text).unwrap();
        assert_eq!(v.node(v.parent_of(Var::new(2)).unwrap()).id, 5);
        assert_eq!(v.node(v.root()).id, 3);
        let again = Vtree::parse(&v.serialize()).unwrap();
        assert_eq!(again, v);
        assert!(!again.same_shape(&Vtree::balanced(4).unwrap()));
    }

    #[test]
    fn parse_rejects_bad_files() {
        assert!(Vtree::parse("L 0 1\n").is_err());
        assert!(Vtree::parse("vtree 3\nL 0 1\nL 1 1\nI 2 0 1\n").is_err());
        assert!(Vtree::parse("vtree 3\nL 0 1\nL 1 2\nI 2 0 7\n").is_err());
        assert!(Vtree::parse("vtree 4\nL 0 1\nL 1 2\nI 2 0 1\nL 3 3\n").is_err());
        assert!(Vtree::parse("vtree 3\nL 0 1\nL 1 3\nI 2 0 1\n").is_err());
        assert!(Vtree::parse("vtree 2\nL 0 1\nI 1 0 0\n").is_err());
        assert!(Vtree::parse("vtree 3\nL 0 1\nL 1 2\nI 2 0 1 9\n").is_err());
    }
}
