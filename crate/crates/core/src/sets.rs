//! Subsets of the additive group of F_q: sumsets, symmetry groups, and the
//! Kneser lower bound.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fq::{AdditiveSubgroup, FieldElement, FieldSpec};

/// Bitset over the element indices of one field.
#[derive(Clone, PartialEq, Eq)]
pub struct FqSet {
    spec: Arc<FieldSpec>,
    words: Vec<u64>,
}

impl fmt::Debug for FqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqSet{:?}", self.indices())
    }
}

impl FqSet {
    pub fn empty(spec: &Arc<FieldSpec>) -> FqSet {
        let words = (spec.q() as usize).div_ceil(64);
        FqSet {
            spec: Arc::clone(spec),
            words: vec![0; words],
        }
    }

    pub fn full(spec: &Arc<FieldSpec>) -> FqSet {
        let mut s = FqSet::empty(spec);
        for i in 0..spec.q() {
            s.insert_idx(i);
        }
        s
    }

    pub fn from_indices(spec: &Arc<FieldSpec>, indices: &[u32]) -> FqSet {
        let mut s = FqSet::empty(spec);
        for &i in indices {
            assert!(i < spec.q(), "element index out of range");
            s.insert_idx(i);
        }
        s
    }

    pub fn from_elements(spec: &Arc<FieldSpec>, elements: &[FieldElement]) -> FqSet {
        let mut s = FqSet::empty(spec);
        for &e in elements {
            s.insert_idx(spec.check(e));
        }
        s
    }

    /// Bitmask from a subset code: bit i of `code` selects element i.
    /// Only valid for q <= 64; used by exhaustive subset sweeps.
    pub fn from_code(spec: &Arc<FieldSpec>, code: u64) -> FqSet {
        assert!(spec.q() <= 64);
        FqSet {
            spec: Arc::clone(spec),
            words: vec![code & (u64::MAX >> (64 - spec.q()))],
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    #[inline]
    pub fn insert_idx(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn contains_idx(&self, i: u32) -> bool {
        self.words[(i / 64) as usize] & (1u64 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Sorted element indices; also the serialization format.
    pub fn indices(&self) -> Vec<u32> {
        (0..self.spec.q()).filter(|&i| self.contains_idx(i)).collect()
    }

    pub fn is_subset_of(&self, other: &FqSet) -> bool {
        assert_eq!(self.spec.tag(), other.spec.tag(), "mixed fields");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// A + B = {a + b}.
    pub fn sumset(&self, other: &FqSet) -> FqSet {
        assert_eq!(self.spec.tag(), other.spec.tag(), "mixed fields");
        let mut out = FqSet::empty(&self.spec);
        let a_idx = self.indices();
        let b_idx = other.indices();
        for &a in &a_idx {
            for &b in &b_idx {
                out.insert_idx(self.spec.add_idx(a, b));
            }
        }
        out
    }

    /// Sym(A) = {h : h + A = A}, returned as a verified additive subgroup.
    pub fn sym(&self) -> AdditiveSubgroup {
        let idx = self.indices();
        let mut members = Vec::new();
        for h in 0..self.spec.q() {
            if idx.iter().all(|&a| self.contains_idx(self.spec.add_idx(h, a))) {
                members.push(self.spec.el(h));
            }
        }
        AdditiveSubgroup::from_elements(&self.spec, members)
            .expect("Sym is closed by construction")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KneserReport {
    pub a_size: usize,
    pub b_size: usize,
    pub sumset_size: usize,
    pub sym_size: usize,
    pub pass: bool,
}

/// Kneser: |A + B| + |Sym(A + B)| >= |A| + |B|. Exact set arithmetic.
pub fn kneser_check(a: &FqSet, b: &FqSet) -> Result<KneserReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("kneser"));
    }
    let sum = a.sumset(b);
    let sym = sum.sym();
    let report = KneserReport {
        a_size: a.len(),
        b_size: b.len(),
        sumset_size: sum.len(),
        sym_size: sym.size(),
        pass: sum.len() + sym.size() >= a.len() + b.len(),
    };
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct IteratedKneserReport {
    pub sizes: Vec<usize>,
    pub sumset_size: usize,
    pub sym_size: usize,
    pub pass: bool,
}

/// |A_1 + ... + A_k| + (k-1)|Sym(sum)| >= |A_1| + ... + |A_k|.
pub fn iterated_kneser_check(sets: &[FqSet]) -> Result<IteratedKneserReport> {
    if sets.is_empty() || sets.iter().any(FqSet::is_empty) {
        return Err(Error::EmptySet("iterated kneser"));
    }
    let mut sum = sets[0].clone();
    for s in &sets[1..] {
        sum = sum.sumset(s);
    }
    let sym = sum.sym();
    let k = sets.len();
    let total: usize = sets.iter().map(FqSet::len).sum();
    Ok(IteratedKneserReport {
        sizes: sets.iter().map(FqSet::len).collect(),
        sumset_size: sum.len(),
        sym_size: sym.size(),
        pass: sum.len() + (k - 1) * sym.size() >= total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::make_field;
    use crate::rng::Stream;

    #[test]
    fn sumset_basics() {
        let f5 = make_field(5, 1).unwrap();
        let a = FqSet::from_indices(&f5, &[0, 1]);
        let sum = a.sumset(&a);
        assert_eq!(sum.indices(), vec![0, 1, 2]);
    }

    #[test]
    fn kneser_equality_cases() {
        // A = B = F_q: q + q >= 2q with Sym = F_q
        let f4 = make_field(2, 2).unwrap();
        let full = FqSet::full(&f4);
        let rep = kneser_check(&full, &full).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.sumset_size + rep.sym_size, rep.a_size + rep.b_size);

        // F_5, A = B = {0,1}: 3 + 1 >= 4
        let f5 = make_field(5, 1).unwrap();
        let ab = FqSet::from_indices(&f5, &[0, 1]);
        let rep = kneser_check(&ab, &ab).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.sumset_size, 3);
        assert_eq!(rep.sym_size, 1);
    }

    #[test]
    fn kneser_rejects_empty() {
        let f5 = make_field(5, 1).unwrap();
        let empty = FqSet::empty(&f5);
        let a = FqSet::from_indices(&f5, &[0]);
        assert!(kneser_check(&empty, &a).is_err());
    }

    #[test]
    fn kneser_exhaustive_f4() {
        let f4 = make_field(2, 2).unwrap();
        for ca in 1u64..16 {
            for cb in 1u64..16 {
                let a = FqSet::from_code(&f4, ca);
                let b = FqSet::from_code(&f4, cb);
                assert!(kneser_check(&a, &b).unwrap().pass, "codes {ca} {cb}");
            }
        }
    }

    #[test]
    fn sym_is_a_subgroup_and_decomposes() {
        let f8 = make_field(2, 3).unwrap();
        let mut stream = Stream::new(9, 0);
        for _ in 0..50 {
            let code = stream.next_u64() & 0xff;
            if code == 0 {
                continue;
            }
            let a = FqSet::from_code(&f8, code);
            let sym = a.sym();
            // A is a union of Sym(A)-cosets, so |Sym| divides |A|
            assert_eq!(a.len() % sym.size(), 0);
            for &h in sym.elements() {
                for &x in &a.indices() {
                    assert!(a.contains_idx(f8.add_idx(f8.check(h), x)));
                }
            }
        }
    }

    #[test]
    fn iterated_kneser_triples() {
        let f9 = make_field(3, 2).unwrap();
        let mut stream = Stream::new(12, 0);
        for _ in 0..300 {
            let sets: Vec<FqSet> = (0..3)
                .map(|_| {
                    let mut s = FqSet::empty(&f9);
                    let size = 1 + stream.below(8);
                    for _ in 0..size {
                        s.insert_idx(stream.below(9) as u32);
                    }
                    s
                })
                .collect();
            assert!(iterated_kneser_check(&sets).unwrap().pass);
        }
    }
}
