use std::fmt;

use fixedbitset::FixedBitSet;

use super::{Formula, ORACLE_CAP};
use crate::{Error, Result};

/// Total truth assignment over `width` variables; bit `i - 1` holds `x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation {
    width: usize,
    bits: u64,
}

impl Interpretation {
    pub fn new(width: usize, bits: u64) -> Result<Self> {
        if width > 64 {
            return Err(Error::Capacity {
                what: "interpretation width",
                got: width,
                limit: 64,
            });
        }
        if width < 64 && bits >> width != 0 {
            return Err(Error::input(format!("assignment {bits:#b} wider than {width} variables")));
        }
        Ok(Interpretation { width, bits })
    }

    /// Interpretation listing the variables that are true, as in `{X1, X3}`.
    pub fn from_true_vars(width: usize, vars: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &v in vars {
            if v == 0 || v > width {
                return Err(Error::input(format!("variable x{v} outside width {width}")));
            }
            bits |= 1 << (v - 1);
        }
        Interpretation::new(width, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, var_index: usize) -> bool {
        (self.bits >> (var_index - 1)) & 1 == 1
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for i in 1..=self.width {
            if self.get(i) {
                if !first {
                    f.write_str(",")?;
                }
                write!(f, "x{i}")?;
                first = false;
            }
        }
        f.write_str("}")
    }
}

/// A set of interpretations of a fixed width, stored as a 2^n bitmap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModelSet {
    n: usize,
    members: FixedBitSet,
}

impl ModelSet {
    pub fn empty(n: usize) -> Result<Self> {
        check_cap(n)?;
        Ok(ModelSet {
            n,
            members: FixedBitSet::with_capacity(1 << n),
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        let mut s = ModelSet::empty(n)?;
        s.members.insert_range(..);
        Ok(s)
    }

    pub fn from_bits(n: usize, bits: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = ModelSet::empty(n)?;
        for b in bits {
            if b >> n != 0 {
                return Err(Error::input(format!("assignment {b:#b} wider than {n} variables")));
            }
            s.members.insert(b as usize);
        }
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains_bits(&self, bits: u64) -> bool {
        self.members.contains(bits as usize)
    }

    pub fn contains(&self, w: &Interpretation) -> bool {
        w.width() == self.n && self.contains_bits(w.bits())
    }

    pub fn insert_bits(&mut self, bits: u64) {
        self.members.insert(bits as usize);
    }

    /// Members as raw assignments in increasing order.
    pub fn iter_bits(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.ones().map(|b| b as u64)
    }

    pub fn iter(&self) -> impl Iterator<Item = Interpretation> + '_ {
        let n = self.n;
        self.iter_bits().map(move |bits| Interpretation { width: n, bits })
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        assert_eq!(self.n, other.n, "model sets of different widths");
        let mut out = self.clone();
        out.members.union_with(&other.members);
        out
    }

    pub fn intersection(&self, other: &ModelSet) -> ModelSet {
        assert_eq!(self.n, other.n, "model sets of different widths");
        let mut out = self.clone();
        out.members.intersect_with(&other.members);
        out
    }

    pub fn complement(&self) -> ModelSet {
        let mut out = self.clone();
        out.members.toggle_range(..);
        out
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.n == other.n && self.members.is_subset(&other.members)
    }

    /// A DNF whose terms are exactly the members (complete terms).
    pub fn to_formula(&self) -> Formula {
        use super::Literal;
        let n = self.n;
        Formula::or(
            self.iter_bits()
                .map(|b| {
                    let lits: Vec<Literal> =
                        (1..=n).map(|i| Literal::new(super::Var::new(i), (b >> (i - 1)) & 1 == 1)).collect();
                    Formula::term(&lits)
                })
                .collect(),
        )
    }
}

impl fmt::Debug for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|w| w.to_string())).finish()
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > ORACLE_CAP {
        return Err(Error::Capacity {
            what: "variable count",
            got: n,
            limit: ORACLE_CAP,
        });
    }
    Ok(())
}

/// `mod(f)` over the first `n` variables, by enumeration.
pub fn models(f: &Formula, n: usize) -> Result<ModelSet> {
    check_cap(n)?;
    if f.max_var() > n {
        return Err(Error::input(format!("formula mentions x{} but n = {n}", f.max_var())));
    }
    let mut out = ModelSet::empty(n)?;
    for bits in 0..(1u64 << n) {
        if f.eval_bits(bits) {
            out.insert_bits(bits);
        }
    }
    Ok(out)
}

/// Hamming distance.
pub fn distance(a: &Interpretation, b: &Interpretation) -> Result<usize> {
    if a.width() != b.width() {
        return Err(Error::input(format!(
            "interpretations of width {} and {}",
            a.width(),
            b.width()
        )));
    }
    Ok((a.bits() ^ b.bits()).count_ones() as usize)
}

/// Every interpretation within Hamming distance `radius` of some member of `set`.
pub fn ball(set: &ModelSet, radius: usize) -> ModelSet {
    let n = set.width();
    let mut out = ModelSet::empty(n).expect("width already validated");
    if set.is_empty() {
        return out;
    }
    let centres: Vec<u64> = set.iter_bits().collect();
    for candidate in 0..(1u64 << n) {
        if centres
            .iter()
            .any(|&c| (c ^ candidate).count_ones() as usize <= radius)
        {
            out.insert_bits(candidate);
        }
    }
    out
}

/// Models of the `radius`-th relaxation of `f`.
pub fn relax_semantic(f: &Formula, radius: usize, n: usize) -> Result<ModelSet> {
    Ok(ball(&models(f, n)?, radius))
}
