//! Exact arithmetic in F_{p^f}: construction with a deterministic modulus,
//! field operations through exp/log tables, the trace map, additive
//! characters, and enumeration of additive subgroups.
//!
//! Elements are stored as their integer encoding (base-p digits of the
//! polynomial residue, low degree first), which is also the serialization
//! format. Every element carries the tag of the field it was created by;
//! mixing elements across fields is a hard error, never a coercion.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_Q: u64 = 1 << 16;

/// Subspace-count budget for full additive-subgroup enumeration.
const SUBGROUP_BUDGET: u128 = 1_000_000;

/// An element of F_{p^f}, identified by its integer encoding and the tag of
/// its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    tag: u64,
    idx: u32,
}

impl FieldElement {
    /// Integer encoding: base-p digits of the residue, low degree first.
    pub fn index(&self) -> u32 {
        self.idx
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "el#{}", self.idx)
    }
}

/// Serializable field description: `{p, f, modulus}` with modulus
/// coefficients low-to-high.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub f: u32,
    pub modulus: Vec<u64>,
}

/// The field F_{p^f} with its modulus and arithmetic tables.
pub struct FieldSpec {
    p: u64,
    f: u32,
    q: u32,
    modulus: Vec<u64>,
    tag: u64,
    pow_p: Vec<u64>,
    // exp[i] = g^i for a fixed generator g, doubled so exp[log a + log b]
    // needs no reduction; log[0] is unused.
    exp: Vec<u32>,
    log: Vec<u32>,
    basis_traces: Vec<u64>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (mod {:?})", self.p, self.f, self.modulus)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn fnv1a(data: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &w in data {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

// ---- polynomial arithmetic over Z/p, used only during construction ----

fn ptrim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of `a` by monic `m`.
fn prem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = a.to_vec();
    ptrim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &c) in m.iter().enumerate() {
                let k = shift + j;
                r[k] = (r[k] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
        ptrim(&mut r);
    }
    r
}

/// Trial division against all monic polynomials of degree at most deg/2.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=(deg / 2) {
        // all monic polynomials of degree d, low coefficients encoded in c
        let count = p.pow(d as u32);
        for c in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut rest = c;
            for _ in 0..d {
                g.push(rest % p);
                rest /= p;
            }
            g.push(1);
            if prem(poly, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Constructs F_{p^f} with the lexicographically smallest monic irreducible
/// modulus (coefficient vectors compared via their base-p integer encoding).
/// Deterministic across runs and platforms.
pub fn make_field(p: u64, f: u32) -> Result<Arc<FieldSpec>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut q: u64 = 1;
    for _ in 0..f {
        q = q.checked_mul(p).filter(|&v| v <= MAX_Q).ok_or(Error::OrderOverflow { p, f })?;
    }
    let low_count = q; // p^f encodings of the f low coefficients
    for c in 0..low_count {
        let mut poly = Vec::with_capacity(f as usize + 1);
        let mut rest = c;
        for _ in 0..f {
            poly.push(rest % p);
            rest /= p;
        }
        poly.push(1);
        if is_irreducible(&poly, p) {
            return Ok(Arc::new(FieldSpec::build(p, f, poly)));
        }
    }
    Err(Error::NoModulus(f))
}

/// Reconstructs a field from a serialized descriptor, re-verifying the
/// modulus.
pub fn field_from_descriptor(d: &FieldDescriptor) -> Result<Arc<FieldSpec>> {
    if !is_prime(d.p) {
        return Err(Error::NotPrime(d.p));
    }
    if d.f == 0 {
        return Err(Error::ZeroDegree);
    }
    if d.modulus.len() != d.f as usize + 1
        || *d.modulus.last().unwrap() != 1
        || d.modulus.iter().any(|&c| c >= d.p)
        || !is_irreducible(&d.modulus, d.p)
    {
        return Err(Error::Config(format!(
            "modulus {:?} is not a monic irreducible of degree {} over Z/{}",
            d.modulus, d.f, d.p
        )));
    }
    let mut q: u64 = 1;
    for _ in 0..d.f {
        q = q
            .checked_mul(d.p)
            .filter(|&v| v <= MAX_Q)
            .ok_or(Error::OrderOverflow { p: d.p, f: d.f })?;
    }
    Ok(Arc::new(FieldSpec::build(d.p, d.f, d.modulus.clone())))
}

impl FieldSpec {
    fn build(p: u64, f: u32, modulus: Vec<u64>) -> FieldSpec {
        let q = {
            let mut q: u64 = 1;
            for _ in 0..f {
                q *= p;
            }
            q as u32
        };
        let mut tagdata = vec![p, f as u64];
        tagdata.extend_from_slice(&modulus);
        let tag = fnv1a(&tagdata);
        let pow_p: Vec<u64> = (0..=f).map(|i| p.pow(i)).collect();

        let mut spec = FieldSpec {
            p,
            f,
            q,
            modulus,
            tag,
            pow_p,
            exp: Vec::new(),
            log: Vec::new(),
            basis_traces: Vec::new(),
        };
        spec.build_tables();
        spec.build_traces();
        spec
    }

    // Multiplication from the polynomial representation; only used to
    // bootstrap the exp/log tables and the trace vector.
    fn mul_poly_idx(&self, a: u32, b: u32) -> u32 {
        let pa = self.idx_to_poly(a);
        let pb = self.idx_to_poly(b);
        let prod = pmul(&pa, &pb, self.p);
        let rem = prem(&prod, &self.modulus, self.p);
        self.poly_to_idx(&rem)
    }

    fn pow_poly_idx(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly_idx(acc, base);
            }
            base = self.mul_poly_idx(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let q = self.q as u64;
        let order = q - 1;
        let factors = prime_factors(order);
        let mut generator = 1u32;
        if order > 1 {
            'search: for g in 2..self.q {
                for &r in &factors {
                    if self.pow_poly_idx(g, order / r) == 1 {
                        continue 'search;
                    }
                }
                generator = g;
                break;
            }
            assert!(generator > 1, "no generator found for F_{}", q);
        }
        let n = order as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; self.q as usize];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().take(n.max(1)).enumerate() {
            *slot = cur;
            if i < n {
                log[cur as usize] = i as u32;
            }
            cur = self.mul_poly_idx(cur, generator);
        }
        assert_eq!(cur, 1, "generator order mismatch");
        for i in 0..n {
            exp[n + i] = exp[i];
        }
        self.exp = exp;
        self.log = log;
    }

    fn build_traces(&mut self) {
        // trace of each power basis element omega^i, by iterated Frobenius
        let mut traces = Vec::with_capacity(self.f as usize);
        for i in 0..self.f {
            let base = self.poly_to_idx(&{
                let mut v = vec![0u64; i as usize + 1];
                v[i as usize] = 1;
                v
            });
            let mut sum = 0u32;
            let mut frob = base;
            for _ in 0..self.f {
                sum = self.add_idx(sum, frob);
                frob = self.pow_poly_idx(frob, self.p);
            }
            let digits = self.idx_to_digits(sum);
            assert!(
                digits[1..].iter().all(|&d| d == 0),
                "trace escaped the prime subfield"
            );
            traces.push(digits[0]);
        }
        self.basis_traces = traces;
    }

    fn idx_to_poly(&self, idx: u32) -> Vec<u64> {
        let mut v = self.idx_to_digits(idx);
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    fn poly_to_idx(&self, poly: &[u64]) -> u32 {
        let mut idx = 0u64;
        for (i, &c) in poly.iter().enumerate() {
            idx += c * self.pow_p[i];
        }
        idx as u32
    }

    fn idx_to_digits(&self, idx: u32) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.f as usize);
        let mut rest = idx as u64;
        for _ in 0..self.f {
            v.push(rest % self.p);
            rest /= self.p;
        }
        v
    }

    // ---- index-level arithmetic (internal fast path) ----

    pub(crate) fn add_idx(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.f == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let mut out = 0u64;
        let (mut ra, mut rb) = (a as u64, b as u64);
        for i in 0..self.f as usize {
            let d = (ra % self.p + rb % self.p) % self.p;
            out += d * self.pow_p[i];
            ra /= self.p;
            rb /= self.p;
        }
        out as u32
    }

    pub(crate) fn neg_idx(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        if self.f == 1 {
            return if a == 0 { 0 } else { (self.p - a as u64) as u32 };
        }
        let mut out = 0u64;
        let mut ra = a as u64;
        for i in 0..self.f as usize {
            let d = ra % self.p;
            if d != 0 {
                out += (self.p - d) * self.pow_p[i];
            }
            ra /= self.p;
        }
        out as u32
    }

    pub(crate) fn sub_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.neg_idx(b))
    }

    pub(crate) fn mul_idx(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub(crate) fn inv_idx(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = (self.q - 1) as usize;
        if n == 1 {
            return Ok(1);
        }
        let l = self.log[a as usize] as usize;
        Ok(self.exp[(n - l) % n])
    }

    pub(crate) fn pow_idx(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = (self.q - 1) as u64;
        if n == 0 {
            return 1;
        }
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % n)) % n) as usize]
    }

    pub(crate) fn trace_idx(&self, a: u32) -> u64 {
        let mut sum = 0u64;
        let mut rest = a as u64;
        for i in 0..self.f as usize {
            sum += (rest % self.p) * self.basis_traces[i];
            rest /= self.p;
        }
        sum % self.p
    }

    // ---- public surface ----

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            f: self.f,
            modulus: self.modulus.clone(),
        }
    }

    pub(crate) fn tag(&self) -> u64 {
        self.tag
    }

    pub fn same_field(&self, other: &FieldSpec) -> bool {
        self.tag == other.tag
    }

    #[inline]
    pub(crate) fn check(&self, a: FieldElement) -> u32 {
        assert_eq!(a.tag, self.tag, "element belongs to a different field");
        a.idx
    }

    #[inline]
    pub(crate) fn wrap(&self, idx: u32) -> FieldElement {
        debug_assert!(idx < self.q);
        FieldElement { tag: self.tag, idx }
    }

    /// The element with the given integer encoding.
    pub fn el(&self, idx: u32) -> FieldElement {
        assert!(idx < self.q, "element index {idx} out of range for q = {}", self.q);
        self.wrap(idx)
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    /// Embedding of Z/p as the constant residues.
    pub fn embed_prime(&self, c: u64) -> FieldElement {
        self.wrap((c % self.p) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |i| self.wrap(i))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (a, b) = (self.check(a), self.check(b));
        self.wrap(self.add_idx(a, b))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (a, b) = (self.check(a), self.check(b));
        self.wrap(self.sub_idx(a, b))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let a = self.check(a);
        self.wrap(self.neg_idx(a))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (a, b) = (self.check(a), self.check(b));
        self.wrap(self.mul_idx(a, b))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        let a = self.check(a);
        Ok(self.wrap(self.inv_idx(a)?))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let (a, b) = (self.check(a), self.check(b));
        Ok(self.wrap(self.mul_idx(a, self.inv_idx(b)?)))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        let a = self.check(a);
        self.wrap(self.pow_idx(a, e))
    }

    /// Field trace Tr(a) = a + a^p + ... + a^{p^{f-1}}, as an element of Z/p.
    pub fn trace(&self, a: FieldElement) -> u64 {
        let a = self.check(a);
        self.trace_idx(a)
    }

    /// Exponent k of the additive character value e^{2 pi i k / p} of the
    /// character labelled `t` at the point `x`; k = Tr(t*x).
    pub fn char_value(&self, t: FieldElement, x: FieldElement) -> u64 {
        let (t, x) = (self.check(t), self.check(x));
        self.trace_idx(self.mul_idx(t, x))
    }

    /// Polynomial-residue coefficients (length f, low degree first).
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let a = self.check(a);
        self.idx_to_digits(a)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        assert_eq!(coeffs.len(), self.f as usize, "coefficient count");
        let mut idx = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            idx += (c % self.p) * self.pow_p[i];
        }
        self.wrap(idx as u32)
    }

    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p)
    }

    pub fn in_prime_subfield(&self, a: FieldElement) -> bool {
        self.check(a) < self.p as u32
    }

    /// How many x in F_q give each character exponent k = Tr(t*x); used for
    /// exact (integer-only) orthogonality checks.
    pub fn char_exponent_counts(&self, t: FieldElement) -> Vec<u64> {
        let t = self.check(t);
        let mut counts = vec![0u64; self.p as usize];
        for x in 0..self.q {
            counts[self.trace_idx(self.mul_idx(t, x)) as usize] += 1;
        }
        counts
    }
}

/// Additive character of F_q labelled by `t`, sending x to
/// e^{2 pi i Tr(t x) / p}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Character {
    pub label: FieldElement,
}

impl Character {
    pub fn value_exponent(&self, spec: &FieldSpec, x: FieldElement) -> u64 {
        spec.char_value(self.label, x)
    }
}

/// Additive subgroup (Z/p-subspace) of F_q, stored with a row-reduced basis
/// of coefficient vectors and the full sorted element list.
#[derive(Clone)]
pub struct AdditiveSubgroup {
    spec: Arc<FieldSpec>,
    basis: Vec<FieldElement>,
    elements: Vec<FieldElement>,
}

impl fmt::Debug for AdditiveSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AdditiveSubgroup(dim {}, basis {:?})",
            self.basis.len(),
            self.basis
        )
    }
}

impl AdditiveSubgroup {
    fn from_basis_rows(spec: &Arc<FieldSpec>, rows: &[Vec<u64>]) -> AdditiveSubgroup {
        let basis: Vec<FieldElement> = rows.iter().map(|r| spec.from_coeffs(r)).collect();
        // span over Z/p
        let mut elements = vec![spec.zero()];
        for &b in &basis {
            let mut next = Vec::with_capacity(elements.len() * spec.p() as usize);
            for &e in &elements {
                let mut scaled = e;
                for _ in 0..spec.p() {
                    next.push(scaled);
                    scaled = spec.add(scaled, b);
                }
            }
            elements = next;
        }
        elements.sort();
        elements.dedup();
        AdditiveSubgroup {
            spec: Arc::clone(spec),
            basis,
            elements,
        }
    }

    /// Builds a subgroup from its element set, verifying closure under
    /// addition and Z/p-scaling exhaustively.
    pub fn from_elements(
        spec: &Arc<FieldSpec>,
        mut elements: Vec<FieldElement>,
    ) -> Result<AdditiveSubgroup> {
        elements.sort();
        elements.dedup();
        if elements.is_empty() || elements[0] != spec.zero() {
            return Err(Error::Config("subgroup must contain zero".into()));
        }
        for &a in &elements {
            for &b in &elements {
                if elements.binary_search(&spec.add(a, b)).is_err() {
                    return Err(Error::Config(format!(
                        "set is not closed under addition at {:?} + {:?}",
                        a, b
                    )));
                }
            }
        }
        let mut rows: Vec<Vec<u64>> = elements
            .iter()
            .filter(|e| e.index() != 0)
            .map(|&e| spec.coeffs(e))
            .collect();
        rref_zp(&mut rows, spec.p());
        let sub = AdditiveSubgroup::from_basis_rows(spec, &rows);
        debug_assert_eq!(sub.elements, elements);
        Ok(sub)
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Index of the coset of `x`, i.e. the smallest element of `x + H`.
    pub fn coset_representative(&self, x: FieldElement) -> FieldElement {
        self.elements
            .iter()
            .map(|&h| self.spec.add(x, h))
            .min()
            .unwrap()
    }
}

// Row reduction of coefficient vectors over Z/p; returns the rank and leaves
// the rows in reduced echelon form (zero rows trimmed).
fn rref_zp(rows: &mut Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = mod_inv(rows[pivot_row][col], p);
        for c in col..ncols {
            rows[pivot_row][c] = rows[pivot_row][c] * inv % p;
        }
        for r in 0..rows.len() {
            if r != pivot_row && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in col..ncols {
                    let sub = factor * rows[pivot_row][c] % p;
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    pivot_row
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn gaussian_subspace_count(p: u128, n: u32) -> u128 {
    // sum over k of the Gaussian binomial [n choose k]_p
    let mut total: u128 = 0;
    for k in 0..=n {
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..k {
            num = num.saturating_mul(p.saturating_pow(n - i).saturating_sub(1));
            den = den.saturating_mul(p.saturating_pow(i + 1).saturating_sub(1));
        }
        total = total.saturating_add(num / den.max(1));
    }
    total
}

/// All distinct assignments of RREF matrices with dimension `k` over Z/p in
/// `n` columns, streamed to `emit` as basis rows.
fn enumerate_rref_zp(p: u64, n: usize, k: usize, emit: &mut dyn FnMut(&[Vec<u64>])) {
    if k == 0 {
        emit(&[]);
        return;
    }
    // choose pivot columns
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free positions: (row i, col j) with j > pivots[i], j not a pivot
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for j in (pc + 1)..n {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let mut rows = vec![vec![0u64; n]; k];
        for (i, &pc) in pivots.iter().enumerate() {
            rows[i][pc] = 1;
        }
        let mut odo = vec![0u64; free.len()];
        loop {
            emit(&rows);
            // increment odometer
            let mut pos = 0;
            loop {
                if pos == odo.len() {
                    break;
                }
                odo[pos] += 1;
                if odo[pos] < p {
                    let (i, j) = free[pos];
                    rows[i][j] = odo[pos];
                    break;
                }
                odo[pos] = 0;
                let (i, j) = free[pos];
                rows[i][j] = 0;
                pos += 1;
            }
            if pos == odo.len() {
                break;
            }
        }
        // next pivot combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if pivots[i] < n - (k - i) {
                pivots[i] += 1;
                for j in (i + 1)..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Enumerates additive subgroups of F_q.
///
/// With `maximal_only`, returns exactly the (q-1)/(p-1) index-p subgroups
/// (kernels of the nonzero trace functionals). Otherwise returns every
/// proper Z/p-subspace of F_q, including the trivial one, in a deterministic
/// order sorted by basis.
pub fn enumerate_additive_subgroups(
    spec: &Arc<FieldSpec>,
    maximal_only: bool,
) -> Result<Vec<AdditiveSubgroup>> {
    let p = spec.p();
    let f = spec.extension_degree() as usize;
    if maximal_only {
        let mut out = Vec::new();
        for t in 1..spec.q() {
            // t and c*t define the same kernel; keep one representative per
            // F_p^* orbit
            let mut orbit_min = t;
            for c in 2..p {
                orbit_min = orbit_min.min(spec.mul_idx(t, c as u32));
            }
            if orbit_min != t {
                continue;
            }
            let mut rows: Vec<Vec<u64>> = Vec::new();
            for x in spec.elements() {
                if spec.char_value(spec.el(t), x) == 0 && x.index() != 0 {
                    rows.push(spec.coeffs(x));
                }
            }
            rref_zp(&mut rows, p);
            out.push(AdditiveSubgroup::from_basis_rows(spec, &rows));
        }
        out.sort_by(|a, b| subgroup_key(a).cmp(&subgroup_key(b)));
        return Ok(out);
    }

    let count = gaussian_subspace_count(p as u128, f as u32);
    if count > SUBGROUP_BUDGET {
        return Err(Error::Budget {
            what: "additive subgroup enumeration",
            needs: count,
            budget: SUBGROUP_BUDGET,
        });
    }
    let mut out = Vec::new();
    for k in 0..f {
        // proper subspaces only: dim < f
        enumerate_rref_zp(p, f, k, &mut |rows| {
            out.push(AdditiveSubgroup::from_basis_rows(spec, rows));
        });
    }
    out.sort_by(|a, b| subgroup_key(a).cmp(&subgroup_key(b)));
    Ok(out)
}

fn subgroup_key(h: &AdditiveSubgroup) -> (usize, Vec<u32>) {
    (h.dim(), h.basis.iter().map(|b| b.index()).collect())
}
