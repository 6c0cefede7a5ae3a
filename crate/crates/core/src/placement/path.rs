use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::numerics::Dyadic;

/// A node of the infinite bisection tree over `[0, 1)`.
///
/// The bit string `b_1 .. b_d` names the interval `[a 2^-d, (a+1) 2^-d)` where `a` is the
/// integer value of the bits; bit 1 selects the right half. The empty path is the root.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct NodePath {
    // MSB-first packing; bits past `len` are always zero so derived Eq/Hash are exact.
    words: SmallVec<[u64; 4]>,
    len: usize,
}

impl NodePath {
    pub fn root() -> Self {
        NodePath::default()
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut p = NodePath::root();
        for &b in bits {
            p.push(b);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn depth(&self) -> usize {
        self.len
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Direction of the node at depth `index + 1` (true = right child).
    pub fn bit(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        (self.words[index / 64] >> (63 - index % 64)) & 1 == 1
    }

    /// Direction of the deepest node; `None` at the root.
    pub fn last(&self) -> Option<bool> {
        self.len.checked_sub(1).map(|i| self.bit(i))
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (63 - self.len % 64);
        }
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<bool> {
        let bit = self.last()?;
        self.truncate(self.len - 1);
        Some(bit)
    }

    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.len = len;
        self.words.truncate(len.div_ceil(64));
        if !len.is_multiple_of(64) {
            let keep = len % 64;
            let last = self.words.last_mut().unwrap();
            *last &= !(u64::MAX >> keep);
        }
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut c = self.clone();
        c.push(bit);
        c
    }

    pub fn parent(&self) -> Option<Self> {
        if self.is_root() {
            None
        } else {
            Some(self.prefix(self.len - 1))
        }
    }

    pub fn prefix(&self, len: usize) -> Self {
        let mut p = self.clone();
        p.truncate(len);
        p
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        self.len <= other.len && other.prefix(self.len) == *self
    }

    /// Integer value `a` of the bit string.
    pub fn value(&self) -> BigUint {
        if self.len == 0 {
            return BigUint::default();
        }
        let bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_be_bytes()).collect();
        BigUint::from_bytes_be(&bytes) >> (self.words.len() * 64 - self.len)
    }

    pub fn lower(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.value()), self.len as u32)
    }

    pub fn upper(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.value()) + 1, self.len as u32)
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.value()) * 2 + 1, self.len as u32 + 1)
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_uint(value: &BigUint, len: usize) -> Self {
        let mut words: SmallVec<[u64; 4]> = SmallVec::new();
        let nwords = len.div_ceil(64);
        if nwords > 0 {
            let shifted = value << (nwords * 64 - len);
            let digits = shifted.to_u64_digits();
            for w in (0..nwords).rev() {
                words.push(digits.get(w).copied().unwrap_or(0));
            }
        }
        NodePath { words, len }
    }

    /// Compares the first `key.len()` bits of `self` with `key`, both read as integers.
    pub fn cmp_prefix(&self, key: &NodePath) -> Ordering {
        debug_assert!(self.len >= key.len);
        let full = key.len / 64;
        for w in 0..full {
            match self.words[w].cmp(&key.words[w]) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        let rest = key.len % 64;
        if rest == 0 {
            return Ordering::Equal;
        }
        let mask = !(u64::MAX >> rest);
        (self.words[full] & mask).cmp(&key.words[full])
    }

    /// Number of 1 bits among positions `from..to`.
    pub fn count_ones(&self, from: usize, to: usize) -> usize {
        (from..to).filter(|&i| self.bit(i)).count()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return f.write_str("<root>");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodePath({self})")
    }
}

impl FromStr for NodePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s == "<root>" {
            return Ok(NodePath::root());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Precondition(format!("bad path character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(|bits| NodePath::from_bits(&bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rational;
    use proptest::prelude::*;

    #[test]
    fn intervals() {
        let p: NodePath = "01".parse().unwrap();
        assert_eq!(p.lower().to_rational(), rational(1, 4));
        assert_eq!(p.upper().to_rational(), rational(1, 2));
        assert_eq!(p.midpoint().to_rational(), rational(3, 8));
        assert_eq!(NodePath::root().midpoint().to_rational(), rational(1, 2));
    }

    #[test]
    fn prefix_comparison() {
        let p: NodePath = "0110".parse().unwrap();
        assert_eq!(p.cmp_prefix(&"011".parse().unwrap()), Ordering::Equal);
        assert_eq!(p.cmp_prefix(&"1".parse().unwrap()), Ordering::Less);
        assert_eq!(p.cmp_prefix(&"0101".parse().unwrap()), Ordering::Greater);
        assert_eq!(p.cmp_prefix(&NodePath::root()), Ordering::Equal);
        assert_eq!(NodePath::from_uint(&BigUint::from(6u32), 4), p);
    }

    proptest! {
        #[test]
        fn push_pop_and_prefix_are_consistent(bits in proptest::collection::vec(any::<bool>(), 0..300), cut in 0usize..300) {
            let p = NodePath::from_bits(&bits);
            prop_assert_eq!(p.len(), bits.len());
            prop_assert_eq!(p.bits().collect::<Vec<_>>(), bits.clone());
            let cut = cut.min(bits.len());
            let q = p.prefix(cut);
            prop_assert_eq!(&q, &NodePath::from_bits(&bits[..cut]));
            prop_assert!(q.is_prefix_of(&p));
            prop_assert_eq!(p.to_string().parse::<NodePath>().unwrap(), p.clone());
            prop_assert_eq!(NodePath::from_uint(&p.value(), p.len()), p.clone());
            let q_ord = NodePath::from_bits(&bits[..cut]).value().cmp(&(p.value() >> (bits.len() - cut)));
            prop_assert_eq!(q_ord, Ordering::Equal);
            prop_assert_eq!(p.cmp_prefix(&q), Ordering::Equal);
            if cut > 0 {
                let mut other = q.clone();
                let flipped = !other.pop().unwrap();
                other.push(flipped);
                let expect = if flipped { Ordering::Less } else { Ordering::Greater };
                prop_assert_eq!(p.cmp_prefix(&other), expect);
            }
        }
    }
}
