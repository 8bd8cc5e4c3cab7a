//! Probability measures on F_q: alpha-density, cached Fourier transforms,
//! spectra, and the swap-measure construction.
//!
//! A `Measure<S>` stores its full Fourier table as exact cyclotomic values
//! ([`Cyclo`]), so in rational mode identities like the swap-measure closed
//! form are checked by equality, with f64 magnitudes cached alongside for
//! threshold work.

use std::collections::BTreeMap;
use std::sync::Arc;


use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fq::{FieldElement, FieldSpec};
use crate::rng::Stream;
use crate::scalar::{Cyclo, Scalar};
use crate::tol;

/// The swap-measure mixing weight gamma = 1/8. Fixed, not configurable: the
/// fourth-power domination of property (2) needs this exact value.
pub const SWAP_GAMMA_NUM: i64 = 1;
pub const SWAP_GAMMA_DEN: u64 = 8;

#[derive(Clone)]
pub struct Measure<S: Scalar> {
    spec: Arc<FieldSpec>,
    weights: Vec<S>,
    fourier: Vec<Cyclo<S>>,
    fourier_abs: Vec<f64>,
    alpha: S,
}

impl<S: Scalar> Measure<S> {
    /// Validates and caches. Weights are indexed by element encoding and
    /// must be nonnegative and sum to one (exactly in rational mode, within
    /// `tol::EXACT_EQ` in f64 mode).
    pub fn new(spec: Arc<FieldSpec>, weights: Vec<S>) -> Result<Measure<S>> {
        let q = spec.q() as usize;
        if weights.len() != q {
            return Err(Error::WeightCount {
                expected: q,
                got: weights.len(),
            });
        }
        let mut sum = S::zero();
        for (i, w) in weights.iter().enumerate() {
            if w < &S::zero() {
                return Err(Error::NegativeWeight(i as u32));
            }
            sum = sum + w.clone();
        }
        let ok = if S::EXACT {
            sum.is_one()
        } else {
            (sum.approx() - 1.0).abs() <= tol::EXACT_EQ
        };
        if !ok {
            return Err(Error::WeightSum {
                sum: sum.approx(),
                tol: tol::EXACT_EQ,
            });
        }

        let fourier = fourier_table(&spec, &weights);
        let fourier_abs = fourier.iter().map(Cyclo::abs_approx).collect();
        let alpha = alpha_density(&spec, &weights);
        Ok(Measure {
            spec,
            weights,
            fourier,
            fourier_abs,
            alpha,
        })
    }

    pub fn uniform(spec: Arc<FieldSpec>) -> Measure<S> {
        let q = spec.q();
        let w = S::from_ratio(1, q as u64);
        Measure::new(spec, vec![w; q as usize]).expect("uniform weights are valid")
    }

    /// Bernoulli measure on F_2 with P(1) = a.
    pub fn bernoulli(spec: Arc<FieldSpec>, a: S) -> Result<Measure<S>> {
        if spec.q() != 2 {
            return Err(Error::Config(format!(
                "bernoulli requires F_2, got q = {}",
                spec.q()
            )));
        }
        Measure::new(spec, vec![S::one() - a.clone(), a])
    }

    pub fn point_mass(spec: Arc<FieldSpec>, at: FieldElement) -> Measure<S> {
        let q = spec.q() as usize;
        let idx = spec.check(at) as usize;
        let mut w = vec![S::zero(); q];
        w[idx] = S::one();
        Measure::new(spec, w).expect("point mass is valid")
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, x: FieldElement) -> &S {
        &self.weights[self.spec.check(x) as usize]
    }

    pub(crate) fn weight_idx(&self, idx: u32) -> &S {
        &self.weights[idx as usize]
    }

    /// alpha-density: 1 minus the largest coset mass over maximal proper
    /// additive subgroups. Zero (degenerate) is a valid value.
    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn is_degenerate(&self) -> bool {
        self.alpha.is_zero()
    }

    /// Cached Fourier transform at `t`.
    pub fn fourier(&self, t: FieldElement) -> &Cyclo<S> {
        &self.fourier[self.spec.check(t) as usize]
    }

    pub(crate) fn fourier_idx(&self, idx: u32) -> &Cyclo<S> {
        &self.fourier[idx as usize]
    }

    /// |mu^(t)| as f64.
    pub fn fourier_abs(&self, t: FieldElement) -> f64 {
        self.fourier_abs[self.spec.check(t) as usize]
    }

    pub(crate) fn fourier_abs_idx(&self, idx: u32) -> f64 {
        self.fourier_abs[idx as usize]
    }

    pub fn fourier_abs_table(&self) -> &[f64] {
        &self.fourier_abs
    }

    /// Spec_{1-eps}: characters t with |mu^(t)| >= 1 - eps. Ties at the
    /// threshold are included (the definition uses >=); `tol::SET_SLACK`
    /// keeps rounded-down exact ties inside.
    pub fn spec_set(&self, eps: f64) -> SpectrumReport {
        assert!((0.0..1.0).contains(&eps), "eps must lie in [0, 1)");
        let threshold = 1.0 - eps;
        let members: Vec<u32> = (0..self.spec.q())
            .filter(|&i| self.fourier_abs[i as usize] >= threshold - tol::SET_SLACK)
            .collect();
        SpectrumReport {
            epsilon: eps,
            members,
        }
    }

    /// Checks Spec_{1-e1} + ... + Spec_{1-ek} inside Spec_{1-k(e1+...+ek)}
    /// by exhaustive sumset computation.
    pub fn spec_sumset_check(&self, eps_list: &[f64]) -> SpecSumsetCheck {
        assert!(!eps_list.is_empty());
        let k = eps_list.len();
        let total: f64 = eps_list.iter().sum();
        let target_eps = k as f64 * total;
        let target_threshold = 1.0 - target_eps;

        let mut sum_elems: Vec<u32> = vec![0];
        for &eps in eps_list {
            let part = self.spec_set(eps);
            let mut next: Vec<u32> = Vec::new();
            for &a in &sum_elems {
                for &b in &part.members {
                    next.push(self.spec.add_idx(a, b));
                }
            }
            next.sort_unstable();
            next.dedup();
            sum_elems = next;
        }

        let mut counterexample = None;
        for &s in &sum_elems {
            if self.fourier_abs[s as usize] < target_threshold - tol::SET_SLACK {
                counterexample = Some(SpecSumsetWitness {
                    element: s,
                    magnitude: self.fourier_abs[s as usize],
                    required: target_threshold,
                });
                break;
            }
        }
        SpecSumsetCheck {
            eps_list: eps_list.to_vec(),
            target_eps,
            sumset: sum_elems,
            pass: counterexample.is_none(),
            counterexample,
        }
    }

    /// The swap measure nu: gamma * (mu * mu-)(t) off zero, remainder at
    /// zero, with gamma = 1/8. Its Fourier transform is
    /// 1 - gamma + gamma |mu^|^2.
    pub fn swap_measure(&self) -> Measure<S> {
        let q = self.spec.q();
        let gamma = S::from_ratio(SWAP_GAMMA_NUM, SWAP_GAMMA_DEN);
        let mut weights = vec![S::zero(); q as usize];
        let mut off_zero_total = S::zero();
        for t in 1..q {
            // (mu * mu-)(t) = sum_y mu(y) mu(y - t)
            let mut conv = S::zero();
            for y in 0..q {
                let y_minus_t = self.spec.sub_idx(y, t);
                let w = self.weights[y as usize].clone() * self.weights[y_minus_t as usize].clone();
                conv = conv + w;
            }
            let w = gamma.clone() * conv;
            off_zero_total = off_zero_total + w.clone();
            weights[t as usize] = w;
        }
        weights[0] = S::one() - off_zero_total;
        Measure::new(Arc::clone(&self.spec), weights).expect("swap measure is a valid measure")
    }

    /// Closed form for the swap measure's Fourier transform at `t`:
    /// 1 - gamma + gamma |mu^(t)|^2, as an exact cyclotomic value.
    pub fn swap_fourier_closed_form(&self, t: FieldElement) -> Cyclo<S> {
        let gamma = S::from_ratio(SWAP_GAMMA_NUM, SWAP_GAMMA_DEN);
        let p = self.spec.p() as u32;
        let constant = Cyclo::from_scalar(p, S::one() - gamma.clone());
        constant + self.fourier(t).abs2().scale(&gamma)
    }

    /// Serializes as `{field, weights by element index, mode}`; zero weights
    /// are omitted.
    pub fn to_json(&self) -> serde_json::Value {
        let mut weights = BTreeMap::new();
        for (i, w) in self.weights.iter().enumerate() {
            if !w.is_zero() {
                weights.insert(i.to_string(), w.to_json());
            }
        }
        json!({
            "field": self.spec.descriptor(),
            "weights": weights,
            "mode": S::mode_name(),
        })
    }
}

/// Parses a measure serialized by [`Measure::to_json`]. The field may be
/// given either in the JSON or as `spec`.
pub fn measure_from_json<S: Scalar>(
    spec: &Arc<FieldSpec>,
    v: &serde_json::Value,
) -> Result<Measure<S>> {
    let weights_obj = v
        .get("weights")
        .and_then(|w| w.as_object())
        .ok_or_else(|| Error::Config("measure JSON needs a `weights` object".into()))?;
    let mut weights = vec![S::zero(); spec.q() as usize];
    for (key, value) in weights_obj {
        let idx: usize = key
            .parse()
            .map_err(|_| Error::Config(format!("bad element index `{key}`")))?;
        if idx >= weights.len() {
            return Err(Error::Config(format!(
                "element index {idx} out of range for q = {}",
                spec.q()
            )));
        }
        weights[idx] = S::from_json(value)
            .ok_or_else(|| Error::Config(format!("bad weight for index {idx}")))?;
    }
    Measure::new(Arc::clone(spec), weights)
}

fn fourier_table<S: Scalar>(spec: &FieldSpec, weights: &[S]) -> Vec<Cyclo<S>> {
    let p = spec.p() as u32;
    let q = spec.q();
    let support: Vec<u32> = (0..q).filter(|&x| !weights[x as usize].is_zero()).collect();
    (0..q)
        .map(|t| {
            let mut z = Cyclo::zero(p);
            for &x in &support {
                let e = spec.trace_idx(spec.mul_idx(t, x)) as u32;
                z.add_root(e, &weights[x as usize]);
            }
            z
        })
        .collect()
}

fn alpha_density<S: Scalar>(spec: &FieldSpec, weights: &[S]) -> S {
    // Coset masses of the index-p subgroups: for each functional kernel
    // ker(x -> Tr(tx)), the cosets are the trace classes. Smaller subgroups
    // never attain a larger coset mass (coset monotonicity).
    let p = spec.p();
    let q = spec.q();
    let mut max_mass = S::zero();
    for t in 1..q {
        let mut orbit_min = t;
        for c in 2..p {
            orbit_min = orbit_min.min(spec.mul_idx(t, c as u32));
        }
        if orbit_min != t {
            continue;
        }
        let mut class_mass = vec![S::zero(); p as usize];
        for x in 0..q {
            if weights[x as usize].is_zero() {
                continue;
            }
            let k = spec.trace_idx(spec.mul_idx(t, x)) as usize;
            class_mass[k] = class_mass[k].clone() + weights[x as usize].clone();
        }
        for m in class_mass {
            if m > max_mass {
                max_mass = m;
            }
        }
    }
    S::one() - max_mass
}

/// Spec_{1-eps} of a measure: the element indices whose character has
/// |mu^| >= 1 - eps.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub epsilon: f64,
    pub members: Vec<u32>,
}

impl SpectrumReport {
    pub fn contains(&self, idx: u32) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecSumsetWitness {
    pub element: u32,
    pub magnitude: f64,
    pub required: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecSumsetCheck {
    pub eps_list: Vec<f64>,
    pub target_eps: f64,
    pub sumset: Vec<u32>,
    pub pass: bool,
    pub counterexample: Option<SpecSumsetWitness>,
}

/// Draws Dirichlet(1,...,1)-style weights until the measure clears the
/// alpha floor (default floor 0.05 elsewhere). The floor keeps randomized
/// suites away from degenerate measures.
pub fn random_dense_measure(
    spec: &Arc<FieldSpec>,
    stream: &mut Stream,
    alpha_floor: f64,
) -> Measure<f64> {
    loop {
        let raw: Vec<f64> = (0..spec.q()).map(|_| -(1.0 - stream.next_f64()).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
        if let Ok(m) = Measure::new(Arc::clone(spec), weights) {
            if m.alpha().approx() >= alpha_floor {
                return m;
            }
        }
    }
}

/// Random measure with weights k_i / denom (exact rationals), by dropping
/// `denom` unit masses uniformly into the q classes.
pub fn random_exact_measure<S: Scalar>(
    spec: &Arc<FieldSpec>,
    stream: &mut Stream,
    denom: u64,
) -> Measure<S> {
    assert!(denom > 0);
    let q = spec.q() as usize;
    let mut counts = vec![0u64; q];
    for _ in 0..denom {
        counts[stream.below(q as u64) as usize] += 1;
    }
    let weights: Vec<S> = counts
        .iter()
        .map(|&c| S::from_ratio(c as i64, denom))
        .collect();
    Measure::new(Arc::clone(spec), weights).expect("composition weights are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::make_field;
    use crate::Exact;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: u64) -> Exact {
        Exact::from_ratio(n, d)
    }

    #[test]
    fn uniform_and_bernoulli_weights() {
        let f2 = make_field(2, 1).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f2));
        assert_eq!(u.weights(), &[0.5, 0.5]);
        let b = Measure::bernoulli(Arc::clone(&f2), 0.3).unwrap();
        assert_eq!(b.weights(), &[0.7, 0.3]);
    }

    #[test]
    fn bad_weights_rejected() {
        let f2 = make_field(2, 1).unwrap();
        let short = Measure::<f64>::new(Arc::clone(&f2), vec![1.0]);
        assert!(matches!(short, Err(Error::WeightCount { .. })));
        let neg = Measure::new(Arc::clone(&f2), vec![1.5, -0.5]);
        assert!(matches!(neg, Err(Error::NegativeWeight(1))));
        let bad_sum = Measure::new(Arc::clone(&f2), vec![0.4, 0.5]);
        assert!(matches!(bad_sum, Err(Error::WeightSum { .. })));
        let f4 = make_field(2, 2).unwrap();
        assert!(Measure::<f64>::bernoulli(f4, 0.3).is_err());
    }

    #[test]
    fn alpha_examples() {
        let f3 = make_field(3, 1).unwrap();
        let u3: Measure<Exact> = Measure::uniform(Arc::clone(&f3));
        assert_eq!(u3.alpha(), &rat(2, 3));

        let f4 = make_field(2, 2).unwrap();
        let u4: Measure<Exact> = Measure::uniform(Arc::clone(&f4));
        assert_eq!(u4.alpha(), &rat(1, 2));

        let f2 = make_field(2, 1).unwrap();
        for a in [0.1, 0.25, 0.5, 0.8] {
            let b = Measure::bernoulli(Arc::clone(&f2), a).unwrap();
            assert!((b.alpha().approx() - a.min(1.0 - a)).abs() < 1e-15);
        }
    }

    #[test]
    fn point_mass_is_degenerate() {
        let f3 = make_field(3, 1).unwrap();
        let m: Measure<f64> = Measure::point_mass(Arc::clone(&f3), f3.el(1));
        assert!(m.is_degenerate());
        assert_eq!(m.alpha().approx(), 0.0);
    }

    #[test]
    fn fourier_examples() {
        let f2 = make_field(2, 1).unwrap();
        let b: Measure<Exact> = Measure::bernoulli(Arc::clone(&f2), rat(3, 10)).unwrap();
        // mu^(0) = 1, mu^(1) = 1 - 2a = 2/5
        assert_eq!(b.fourier(f2.el(0)).as_scalar(), Some(rat(1, 1)));
        assert_eq!(b.fourier(f2.el(1)).as_scalar(), Some(rat(2, 5)));

        for (p, f) in [(2u64, 2u32), (3, 1), (5, 1), (3, 2)] {
            let fq = make_field(p, f).unwrap();
            let u: Measure<Exact> = Measure::uniform(Arc::clone(&fq));
            assert_eq!(u.fourier(fq.el(0)).as_scalar(), Some(rat(1, 1)));
            for t in fq.elements().skip(1) {
                assert!(u.fourier(t).is_zero(), "uniform fourier must vanish off 0");
            }
        }
    }

    #[test]
    fn fourier_inversion_and_parseval() {
        for (p, f) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (3, 2), (2, 4), (7, 1), (2, 9)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(99, (p * 100 + f as u64) as u64);
            let m = random_dense_measure(&fq, &mut stream, 0.01);
            let q = fq.q();

            // inversion: mu(x) = q^{-1} sum_t mu^(t) conj(chi_t(x))
            for x in fq.elements() {
                let mut acc = Cyclo::<f64>::zero(p as u32);
                for t in fq.elements() {
                    let e = fq.char_value(t, x) as u32;
                    let chi_conj = Cyclo::weighted_root(p as u32, e, 1.0).conj();
                    acc = acc + m.fourier(t).clone() * chi_conj;
                }
                let (re, im) = acc.approx();
                assert!((re / q as f64 - m.weight(x)).abs() < tol::EXACT_EQ);
                assert!(im.abs() / (q as f64) < tol::EXACT_EQ);
            }

            // Parseval: sum_t |mu^(t)|^2 = q sum_x mu(x)^2
            let lhs: f64 = fq
                .elements()
                .map(|t| m.fourier(t).abs2().re_approx())
                .sum();
            let rhs: f64 = q as f64 * m.weights().iter().map(|w| w * w).sum::<f64>();
            assert!((lhs - rhs).abs() < tol::EXACT_EQ * q as f64);
        }
    }

    #[test]
    fn spec_set_examples() {
        let f5 = make_field(5, 1).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f5));
        assert_eq!(u.spec_set(0.5).members, vec![0]);

        let f2 = make_field(2, 1).unwrap();
        let b = Measure::bernoulli(Arc::clone(&f2), 0.1).unwrap();
        assert_eq!(b.spec_set(0.3).members, vec![0, 1]); // |mu^(1)| = 0.8 >= 0.7
        assert_eq!(b.spec_set(0.1).members, vec![0]);

        // eps = 0 keeps exactly the full-magnitude characters
        let m: Measure<f64> = Measure::point_mass(Arc::clone(&f2), f2.el(1));
        assert_eq!(m.spec_set(0.0).members, vec![0, 1]);
    }

    #[test]
    fn spectrum_closed_under_negation_and_contains_zero() {
        for (p, f) in [(3u64, 1u32), (5, 1), (3, 2)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(5, p + f as u64);
            let m = random_dense_measure(&fq, &mut stream, 0.02);
            for eps in [0.1, 0.3, 0.7] {
                let s = m.spec_set(eps);
                assert!(s.contains(0));
                for &t in &s.members {
                    assert!(s.contains(fq.neg_idx(t)), "negation closure");
                }
            }
        }
    }

    #[test]
    fn spec_sumset_examples() {
        let f7 = make_field(7, 1).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f7));
        assert!(u.spec_sumset_check(&[0.2, 0.3]).pass);

        let f2 = make_field(2, 1).unwrap();
        let b = Measure::bernoulli(Arc::clone(&f2), 0.05).unwrap();
        let check = b.spec_sumset_check(&[0.1, 0.1]);
        assert!(check.pass);
        assert_eq!(check.sumset, vec![0, 1]); // {0,1} + {0,1} over F_2

        // k = 1 is the identity inclusion
        let one = b.spec_sumset_check(&[0.25]);
        assert!(one.pass);
    }

    #[test]
    fn swap_measure_paper_values() {
        let f2 = make_field(2, 1).unwrap();
        // a = 1/2: (mu * mu-)(1) = 1/2, nu(1) = gamma/2 = 1/16
        let b: Measure<Exact> = Measure::bernoulli(Arc::clone(&f2), rat(1, 2)).unwrap();
        let nu = b.swap_measure();
        assert_eq!(nu.weights(), &[rat(15, 16), rat(1, 16)]);
        assert_eq!(nu.fourier(f2.el(1)).as_scalar(), Some(rat(7, 8)));
        assert_eq!(nu.fourier(f2.el(0)).as_scalar(), Some(rat(1, 1)));

        // a = 0.3: nu^(1) = 1 - a(1-a)/2 = 0.895
        let b3: Measure<Exact> = Measure::bernoulli(Arc::clone(&f2), rat(3, 10)).unwrap();
        let nu3 = b3.swap_measure();
        assert_eq!(nu3.fourier(f2.el(1)).as_scalar(), Some(rat(179, 200)));

        // point mass: mu * mu- = delta_0, so nu is the same point mass
        let pm: Measure<Exact> = Measure::point_mass(Arc::clone(&f2), f2.el(0));
        let nu_pm = pm.swap_measure();
        assert_eq!(nu_pm.weights(), &[rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn swap_fourier_closed_form_exact_all_t() {
        for (p, f) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2), (2, 3)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(17, p * 31 + f as u64);
            let m: Measure<Exact> = random_exact_measure(&fq, &mut stream, 64);
            let nu = m.swap_measure();
            for t in fq.elements() {
                assert_eq!(
                    nu.fourier(t),
                    &m.swap_fourier_closed_form(t),
                    "p={p} f={f} t={t:?}"
                );
            }
        }
    }

    #[test]
    fn swap_measure_is_gamma_alpha_dense() {
        for (p, f) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(23, p + 7 * f as u64);
            let m: Measure<Exact> = random_exact_measure(&fq, &mut stream, 32);
            let nu = m.swap_measure();
            let bound = m.alpha().clone() * rat(1, 8);
            assert!(nu.alpha() >= &bound, "nu must be (alpha/8)-dense");
        }
    }

    #[test]
    fn alpha_subgroup_fourier_bound() {
        // |H|^{-1} sum_{t in H} |mu^(wt)|^2 <= 1 - alpha for nontrivial H
        // and nonzero w; exhaustive over proper nontrivial subgroups plus
        // the full group.
        use crate::fq::enumerate_additive_subgroups;
        for (p, f) in [(2u64, 2u32), (2, 3), (3, 2), (2, 4), (2, 6), (3, 3)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(31, p * 13 + f as u64);
            let m = random_dense_measure(&fq, &mut stream, 0.02);
            let bound = 1.0 - m.alpha().approx();
            let mut subgroup_elem_sets: Vec<Vec<u32>> = enumerate_additive_subgroups(&fq, false)
                .unwrap()
                .iter()
                .filter(|h| h.size() > 1)
                .map(|h| h.elements().iter().map(|e| e.index()).collect())
                .collect();
            subgroup_elem_sets.push((0..fq.q()).collect());
            for elems in &subgroup_elem_sets {
                for w in 1..fq.q() {
                    let avg: f64 = elems
                        .iter()
                        .map(|&t| {
                            let wt = fq.mul_idx(w, t);
                            let a = m.fourier_abs_idx(wt);
                            a * a
                        })
                        .sum::<f64>()
                        / elems.len() as f64;
                    assert!(
                        avg <= bound + tol::EXACT_EQ,
                        "p={p} f={f} w={w} avg={avg} bound={bound}"
                    );
                }
            }
        }
    }

    #[test]
    fn measure_json_roundtrip() {
        let f3 = make_field(3, 1).unwrap();
        let m: Measure<Exact> =
            Measure::new(Arc::clone(&f3), vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        let v = m.to_json();
        assert_eq!(v["mode"], "exact");
        let back: Measure<Exact> = measure_from_json(&f3, &v).unwrap();
        assert_eq!(back.weights(), m.weights());

        let mf: Measure<f64> = Measure::uniform(Arc::clone(&f3));
        let vf = mf.to_json();
        let backf: Measure<f64> = measure_from_json(&f3, &vf).unwrap();
        assert_eq!(backf.weights(), mf.weights());
    }

    #[test]
    fn random_exact_measure_sums_to_one() {
        let f9 = make_field(3, 2).unwrap();
        let mut stream = Stream::new(3, 3);
        let m: Measure<Exact> = random_exact_measure(&f9, &mut stream, 100);
        let total: Exact = m.weights().iter().cloned().fold(rat(0, 1), |a, b| a + b);
        assert!(total.to_f64().unwrap() == 1.0);
    }
}
