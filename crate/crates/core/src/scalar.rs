//! Scalar abstraction for the two arithmetic modes, plus exact cyclotomic
//! values.
//!
//! Probabilities and Fourier coefficients are generic over [`Scalar`], which
//! is implemented by `f64` (fast sweeps) and [`BigRational`] (exact mode).
//! Complex character sums are represented as elements of the cyclotomic field
//! Q(zeta_p) by [`Cyclo`], so identities like the swap-measure Fourier closed
//! form can be checked by exact equality instead of floating comparison.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Numeric scalar for probabilities and weights.
pub trait Scalar:
    Num + Signed + PartialOrd + Clone + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding anywhere).
    const EXACT: bool;

    fn from_ratio(num: i64, den: u64) -> Self;

    /// Nearest f64, for reports and threshold comparisons.
    fn approx(&self) -> f64;

    fn from_f64_approx(x: f64) -> Self;

    /// Mode tag recorded in reports.
    fn mode_name() -> &'static str {
        if Self::EXACT {
            "exact"
        } else {
            "f64"
        }
    }

    /// JSON form: a number in f64 mode, a "num/den" string in exact mode.
    fn to_json(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn approx(&self) -> f64 {
        *self
    }

    fn from_f64_approx(x: f64) -> Self {
        x
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }

    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_f64()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_approx(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_json(v: &serde_json::Value) -> Option<Self> {
        match v {
            serde_json::Value::String(s) => {
                let (n, d) = s.split_once('/')?;
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(BigRational::new(n, d))
            }
            _ => v.as_f64().and_then(BigRational::from_float),
        }
    }
}

/// Element of Q(zeta_p) with coefficients in `S`, written in the group basis
/// `zeta^0, ..., zeta^{p-1}` modulo the relation `1 + zeta + ... + zeta^{p-1} = 0`.
///
/// The stored form is canonical: the coefficient of `zeta^{p-1}` is zero, so
/// equality of values is coefficient-wise equality. Canonical reduction is
/// subtraction of the all-ones vector, which commutes with the cyclic
/// convolution used for multiplication.
#[derive(Clone, PartialEq)]
pub struct Cyclo<S> {
    p: u32,
    coeffs: Vec<S>,
}

impl<S: Scalar> Cyclo<S> {
    pub fn zero(p: u32) -> Self {
        assert!(p >= 2, "root order must be at least 2");
        Cyclo {
            p,
            coeffs: vec![S::zero(); p as usize],
        }
    }

    pub fn from_scalar(p: u32, s: S) -> Self {
        let mut z = Cyclo::zero(p);
        z.coeffs[0] = s;
        z
    }

    pub fn one(p: u32) -> Self {
        Cyclo::from_scalar(p, S::one())
    }

    /// `weight * zeta^k`.
    pub fn weighted_root(p: u32, k: u32, weight: S) -> Self {
        let mut z = Cyclo::zero(p);
        z.coeffs[(k % p) as usize] = weight;
        z.canonicalize();
        z
    }

    pub fn order(&self) -> u32 {
        self.p
    }

    fn canonicalize(&mut self) {
        let last = self.coeffs[self.p as usize - 1].clone();
        if !last.is_zero() {
            for c in &mut self.coeffs {
                *c = c.clone() - last.clone();
            }
        }
    }

    /// Adds `weight * zeta^k` in place; the workhorse of Fourier table
    /// construction.
    pub fn add_root(&mut self, k: u32, weight: &S) {
        let idx = (k % self.p) as usize;
        self.coeffs[idx] = self.coeffs[idx].clone() + weight.clone();
        if idx == self.p as usize - 1 {
            self.canonicalize();
        }
    }

    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut out = Cyclo::zero(self.p);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[(p - k) % p] = c.clone();
            }
        }
        out.canonicalize();
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = c.clone() * s.clone();
        }
        out
    }

    /// Squared modulus `z * conj(z)`; a real (self-conjugate) value.
    pub fn abs2(&self) -> Self {
        self.clone() * self.conj()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The value as a scalar, when it lies in Q (canonical form has only a
    /// constant term). Always succeeds for real values when p <= 3.
    pub fn as_scalar(&self) -> Option<S> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Complex value as `(re, im)` in f64.
    pub fn approx(&self) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * k as f64 / self.p as f64;
            let w = c.approx();
            re += w * theta.cos();
            im += w * theta.sin();
        }
        (re, im)
    }

    pub fn re_approx(&self) -> f64 {
        self.approx().0
    }

    pub fn abs_approx(&self) -> f64 {
        let (re, im) = self.approx();
        re.hypot(im)
    }
}

impl<S: Scalar> Add for Cyclo<S> {
    type Output = Cyclo<S>;

    fn add(mut self, rhs: Cyclo<S>) -> Cyclo<S> {
        assert_eq!(self.p, rhs.p, "mixed root orders");
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a = a.clone() + b;
        }
        self
    }
}

impl<S: Scalar> Sub for Cyclo<S> {
    type Output = Cyclo<S>;

    fn sub(mut self, rhs: Cyclo<S>) -> Cyclo<S> {
        assert_eq!(self.p, rhs.p, "mixed root orders");
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a = a.clone() - b;
        }
        self
    }
}

impl<S: Scalar> Neg for Cyclo<S> {
    type Output = Cyclo<S>;

    fn neg(mut self) -> Cyclo<S> {
        for a in &mut self.coeffs {
            *a = -a.clone();
        }
        self
    }
}

impl<S: Scalar> Mul for Cyclo<S> {
    type Output = Cyclo<S>;

    fn mul(self, rhs: Cyclo<S>) -> Cyclo<S> {
        assert_eq!(self.p, rhs.p, "mixed root orders");
        let p = self.p as usize;
        let mut out: Cyclo<S> = Cyclo::zero(self.p);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % p;
                out.coeffs[k] = out.coeffs[k].clone() + a.clone() * b.clone();
            }
        }
        out.canonicalize();
        out
    }
}

impl<S: Scalar> fmt::Debug for Cyclo<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo(p={};", self.p)?;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if !first {
                    write!(f, " +")?;
                }
                write!(f, " {c}*z^{k}")?;
                first = false;
            }
        }
        if first {
            write!(f, " 0")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    type Rat = BigRational;

    fn rat(n: i64, d: u64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn all_roots_sum_to_zero() {
        for p in [2u32, 3, 5, 7] {
            let mut z = Cyclo::<Rat>::zero(p);
            for k in 0..p {
                z.add_root(k, &Rat::one());
            }
            assert!(z.is_zero(), "p = {p}");
        }
    }

    #[test]
    fn root_times_conjugate_is_one() {
        for p in [2u32, 3, 5] {
            for k in 0..p {
                let z = Cyclo::<Rat>::weighted_root(p, k, Rat::one());
                assert_eq!(z.abs2(), Cyclo::one(p));
            }
        }
    }

    #[test]
    fn p2_is_signed_arithmetic() {
        // zeta_2 = -1
        let z = Cyclo::<f64>::weighted_root(2, 1, 1.0);
        assert_eq!(z.as_scalar(), Some(-1.0));
        assert_eq!((z.clone() * z).as_scalar(), Some(1.0));
    }

    #[test]
    fn real_values_are_rational_for_p3() {
        let z = Cyclo::<Rat>::weighted_root(3, 1, rat(1, 2));
        let m = z.abs2();
        // |(1/2) zeta_3|^2 = 1/4
        assert_eq!(m.as_scalar(), Some(rat(1, 4)));
    }

    #[test]
    fn approx_matches_euler() {
        let z = Cyclo::<f64>::weighted_root(5, 2, 1.0);
        let (re, im) = z.approx();
        let theta = 4.0 * std::f64::consts::PI / 5.0;
        assert!((re - theta.cos()).abs() < 1e-15);
        assert!((im - theta.sin()).abs() < 1e-15);
    }

    #[test]
    fn mul_descends_to_quotient() {
        // (1 + all-ones) * z equals z + (sum z) * all-ones ~ z
        let mut a = Cyclo::<Rat>::one(3);
        for k in 0..3 {
            a.add_root(k, &Rat::one());
        }
        let z = Cyclo::<Rat>::weighted_root(3, 1, rat(2, 1));
        assert_eq!(a * z.clone(), z);
    }
}
