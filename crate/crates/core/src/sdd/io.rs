//! Text format: `sdd <count>`, then one line per node with children
//! before parents and the root last:
//!
//! ```text
//! F <id>
//! T <id>
//! L <id> <vtree-leaf-id> <signed-var>
//! D <id> <vtree-node-id> <k> <prime> <sub> ...
//! ```

use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{Sdd, SddManager, Terminal, FALSE, TRUE};
use crate::propcore::Literal;
use crate::{Error, Result};

impl SddManager {
    pub fn serialize(&self, a: Sdd) -> String {
        let root = self.own(a);
        let mut order = Vec::new();
        let mut seen = FxHashSet::default();
        let mut stack = vec![(root, false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                order.push(x);
                continue;
            }
            if !seen.insert(x) {
                continue;
            }
            stack.push((x, true));
            for &(p, s) in self.elements(x).iter().rev() {
                stack.push((s, false));
                stack.push((p, false));
            }
        }
        let mut out = format!("sdd {}\n", order.len());
        for x in order {
            match x {
                FALSE => writeln!(out, "F {x}"),
                TRUE => writeln!(out, "T {x}"),
                _ => match self.lit_of(x) {
                    Some(l) => {
                        let leaf = self.vt(x).unwrap();
                        writeln!(out, "L {x} {} {}", self.vtree.node(leaf).id, l.to_dimacs())
                    }
                    None => {
                        let v = self.vt(x).unwrap();
                        let elems = self.elements(x);
                        write!(out, "D {x} {} {}", self.vtree.node(v).id, elems.len()).unwrap();
                        for (p, s) in elems {
                            write!(out, " {p} {s}").unwrap();
                        }
                        writeln!(out)
                    }
                },
            }
            .unwrap();
        }
        out
    }

    /// Reads a diagram written for this manager's vtree. Decision nodes are
    /// validated (placement and partition) before they are interned.
    pub fn parse(&mut self, text: &str) -> Result<Sdd> {
        let mut header: Option<usize> = None;
        let mut defined: FxHashMap<u64, Sdd> = FxHashMap::default();
        let mut last = None;
        let mut count = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = t.split_whitespace().collect();
            let int = |k: usize| -> Result<i64> {
                f.get(k)
                    .ok_or_else(|| Error::parse(line, "missing field"))?
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad number '{}'", f[k])))
            };
            let uint = |k: usize| -> Result<u64> {
                let v = int(k)?;
                u64::try_from(v).map_err(|_| Error::parse(line, format!("negative id {v}")))
            };
            if header.is_none() {
                if f[0] != "sdd" || f.len() != 2 {
                    return Err(Error::parse(line, "missing 'sdd <count>' header"));
                }
                header = Some(uint(1)? as usize);
                continue;
            }
            let id = uint(1)?;
            let at_line = |e: Error| match e {
                Error::Parse { .. } => e,
                other => Error::parse(line, other.to_string()),
            };
            let node = match f[0] {
                "F" | "T" => {
                    if f.len() != 2 {
                        return Err(Error::parse(line, "expected '<F|T> <id>'"));
                    }
                    self.constant(f[0] == "T")
                }
                "L" => {
                    if f.len() != 4 {
                        return Err(Error::parse(line, "expected 'L <id> <leaf> <literal>'"));
                    }
                    let leaf = self.vtree_position(uint(2)?, line)?;
                    let lit = Literal::from_dimacs(int(3)?)
                        .ok_or_else(|| Error::parse(line, "literal 0 is not allowed"))?;
                    self.terminal(Terminal::Literal(lit), leaf).map_err(at_line)?
                }
                "D" => {
                    let v = self.vtree_position(uint(2)?, line)?;
                    let k = uint(3)? as usize;
                    if f.len() != 4 + 2 * k {
                        return Err(Error::parse(line, format!("expected {k} prime/sub pairs")));
                    }
                    let mut elems = Vec::with_capacity(k);
                    for j in 0..k {
                        let get = |idx: usize| -> Result<Sdd> {
                            let cid = uint(idx)?;
                            defined
                                .get(&cid)
                                .copied()
                                .ok_or_else(|| Error::parse(line, format!("node {cid} used before definition")))
                        };
                        elems.push((get(4 + 2 * j)?, get(5 + 2 * j)?));
                    }
                    self.decision(&elems, v).map_err(at_line)?
                }
                other => return Err(Error::parse(line, format!("unknown record '{other}'"))),
            };
            if defined.insert(id, node).is_some() {
                return Err(Error::parse(line, format!("duplicate node id {id}")));
            }
            last = Some(node);
            count += 1;
        }
        let expected = header.ok_or_else(|| Error::parse(1, "missing 'sdd <count>' header"))?;
        if count != expected {
            return Err(Error::parse(
                1,
                format!("header announces {expected} nodes but {count} were given"),
            ));
        }
        last.ok_or_else(|| Error::parse(1, "no nodes"))
    }

    fn vtree_position(&self, id: u64, line: usize) -> Result<usize> {
        self.vtree
            .position_of_id(id as usize)
            .ok_or_else(|| Error::parse(line, format!("no vtree node with id {id}")))
    }
}
