//! Littlewood-Offord machinery: exact walk distributions, the psi / level-set
//! toolkit, sumset checks, subspace classification, and the swap-measure
//! comparison.
//!
//! The two different f's are disambiguated as `f_add` (additive,
//! f_add(t) = sum_l psi(w_l t)) and `f_mult` (multiplicative,
//! f_mult(t) = prod_l |mu^(w_l t)|); reports always say which.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fq::{AdditiveSubgroup, FieldElement, FieldSpec};
use crate::linalg::{membership_probability, MembershipMethod, Subspace, VectorFq};
use crate::measure::Measure;
use crate::scalar::Scalar;
use crate::tol;

/// Default classification constants.
pub const DEFAULT_DELTA: f64 = 0.01;
pub const DEFAULT_D: f64 = 0.01;
pub const DEFAULT_BIG_D: f64 = 10.0;

/// Fixed weight vector w; `m` is the number of nonzero coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightVector {
    vec: VectorFq,
    m: usize,
}

impl fmt::Debug for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightVector({:?}, m={})", self.vec, self.m)
    }
}

impl WeightVector {
    pub fn new(vec: VectorFq) -> WeightVector {
        let m = vec.support_size();
        WeightVector { vec, m }
    }

    pub fn all_ones(spec: &Arc<FieldSpec>, n: usize) -> WeightVector {
        WeightVector::new(VectorFq::from_indices(Arc::clone(spec), vec![1; n]))
    }

    pub fn vector(&self) -> &VectorFq {
        &self.vec
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.vec.spec()
    }

    pub fn len(&self) -> usize {
        self.vec.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Exact distribution of the dot product w . X on F_q.
#[derive(Clone)]
pub struct WalkDistribution<S: Scalar> {
    spec: Arc<FieldSpec>,
    probs: Vec<S>,
}

impl<S: Scalar> WalkDistribution<S> {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn prob(&self, r: FieldElement) -> &S {
        &self.probs[self.spec.check(r) as usize]
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m: std::collections::BTreeMap<String, serde_json::Value> = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i.to_string(), p.to_json()))
            .collect();
        serde_json::json!(m)
    }
}

/// Distribution of sum_l w_l xi_l by successive convolution of the
/// pushforward measures; cost O(n q^2). Zero coordinates contribute the
/// point mass at zero and are skipped.
pub fn dot_distribution<S: Scalar>(w: &WeightVector, mu: &Measure<S>) -> WalkDistribution<S> {
    let spec = mu.spec();
    assert_eq!(w.spec().tag(), spec.tag(), "weight vector field mismatch");
    let q = spec.q() as usize;
    let mut dist = vec![S::zero(); q];
    dist[0] = S::one();
    for &wl in w.vector().indices() {
        if wl == 0 {
            continue;
        }
        let w_inv = spec.inv_idx(wl).expect("nonzero coordinate");
        // pushforward: pf(y) = mu(y / w_l)
        let pf: Vec<S> = (0..q as u32)
            .map(|y| mu.weight_idx(spec.mul_idx(w_inv, y)).clone())
            .collect();
        let mut next = vec![S::zero(); q];
        for (y, dy) in dist.iter().enumerate() {
            if dy.is_zero() {
                continue;
            }
            for (z, pz) in pf.iter().enumerate() {
                if pz.is_zero() {
                    continue;
                }
                let target = spec.add_idx(y as u32, z as u32) as usize;
                next[target] = next[target].clone() + dy.clone() * pz.clone();
            }
        }
        dist = next;
    }
    WalkDistribution {
        spec: Arc::clone(spec),
        probs: dist,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoBoundReport {
    pub r: u32,
    pub deviation: f64,
    /// deviation * sqrt(alpha * m); the paper-side constant is unspecified,
    /// so only decay/ordering of this quantity is ever asserted.
    pub bound_factor: f64,
    pub m: usize,
    pub alpha: f64,
}

/// Deviation |P(w . X = r) - 1/q| and its normalized product.
pub fn lo_bound_report<S: Scalar>(
    w: &WeightVector,
    mu: &Measure<S>,
    r: FieldElement,
) -> LoBoundReport {
    let spec = mu.spec();
    let dist = dot_distribution(w, mu);
    let q = spec.q() as u64;
    let uniform = S::from_ratio(1, q);
    let dev = {
        let d = dist.prob(r).clone() - uniform;
        if d < S::zero() {
            -d
        } else {
            d
        }
    };
    let alpha = mu.alpha().approx();
    let m = w.m();
    let deviation = dev.approx();
    LoBoundReport {
        r: spec.check(r),
        deviation,
        bound_factor: deviation * (alpha * m as f64).sqrt(),
        m,
        alpha,
    }
}

// ---- psi and the additive level sets ----

/// psi(t) = 1 - |mu^(t)|^2.
pub fn psi_table<S: Scalar>(mu: &Measure<S>) -> Vec<f64> {
    mu.fourier_abs_table().iter().map(|a| 1.0 - a * a).collect()
}

/// f_add(t) = sum_l psi(w_l t).
pub fn f_add_table<S: Scalar>(w: &WeightVector, mu: &Measure<S>) -> Vec<f64> {
    let spec = mu.spec();
    let psi = psi_table(mu);
    (0..spec.q())
        .map(|t| {
            w.vector()
                .indices()
                .iter()
                .map(|&wl| psi[spec.mul_idx(wl, t) as usize])
                .sum()
        })
        .collect()
}

/// T(v) = {t : f_add(t) <= v}, ties included.
pub fn level_set_t<S: Scalar>(w: &WeightVector, mu: &Measure<S>, v: f64) -> Vec<u32> {
    let table = f_add_table(w, mu);
    (0..mu.spec().q())
        .filter(|&t| table[t as usize] <= v + tol::SET_SLACK)
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TSumsetCheck {
    pub v: f64,
    pub k: usize,
    pub t_v: Vec<u32>,
    pub pass: bool,
    pub counterexample: Option<(u32, f64)>,
}

/// k-fold sumset of T(v) must land inside T(k^2 v).
pub fn t_sumset_check<S: Scalar>(
    w: &WeightVector,
    mu: &Measure<S>,
    v: f64,
    k: usize,
) -> TSumsetCheck {
    assert!(k >= 1);
    let spec = mu.spec();
    let table = f_add_table(w, mu);
    let t_v: Vec<u32> = (0..spec.q())
        .filter(|&t| table[t as usize] <= v + tol::SET_SLACK)
        .collect();
    let mut sum: Vec<u32> = vec![0];
    for _ in 0..k.saturating_sub(1) {
        let mut next = Vec::new();
        for &a in &sum {
            for &b in &t_v {
                next.push(spec.add_idx(a, b));
            }
        }
        next.sort_unstable();
        next.dedup();
        sum = next;
    }
    if k >= 1 && sum == vec![0] && !t_v.is_empty() {
        // k = 1: the sumset is T(v) itself
        sum = t_v.clone();
    }
    let bound = (k * k) as f64 * v;
    let mut counterexample = None;
    for &s in &sum {
        if table[s as usize] > bound + tol::PRODUCT_SLACK {
            counterexample = Some((s, table[s as usize]));
            break;
        }
    }
    TSumsetCheck {
        v,
        k,
        t_v,
        pass: counterexample.is_none(),
        counterexample,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupAverageReport {
    pub average: f64,
    pub bound: f64,
    pub witness_t: u32,
    pub witness_value: f64,
    pub pass: bool,
}

/// Averages f_add over a non-trivial subgroup H; the average is at least
/// alpha * m, and the returned witness maximizes f_add over H.
pub fn subgroup_average_check<S: Scalar>(
    w: &WeightVector,
    mu: &Measure<S>,
    h: &AdditiveSubgroup,
) -> Result<SubgroupAverageReport> {
    if h.size() <= 1 {
        return Err(Error::TrivialSubgroup);
    }
    let table = f_add_table(w, mu);
    let mut total = 0.0;
    let mut best = (0u32, f64::NEG_INFINITY);
    for &t in h.elements() {
        let idx = t.index();
        let val = table[idx as usize];
        total += val;
        if val > best.1 {
            best = (idx, val);
        }
    }
    let average = total / h.size() as f64;
    let bound = mu.alpha().approx() * w.m() as f64;
    Ok(SubgroupAverageReport {
        average,
        bound,
        witness_t: best.0,
        witness_value: best.1,
        pass: average >= bound - tol::EXACT_EQ,
    })
}

// ---- cosine inequality ----

#[derive(Clone, Debug, Serialize)]
pub struct CosineReport {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// cos(b_1 + ... + b_k) >= k sum_l cos(b_l) - k^2 + 1.
pub fn cosine_check(betas: &[f64]) -> CosineReport {
    let k = betas.len();
    let lhs = betas.iter().sum::<f64>().cos();
    let rhs = k as f64 * betas.iter().map(|b| b.cos()).sum::<f64>() - (k * k) as f64 + 1.0;
    CosineReport {
        k,
        lhs,
        rhs,
        pass: lhs >= rhs - tol::EXACT_EQ,
    }
}

// ---- multiplicative level sets and the swap comparison ----

/// f_mult(t) = prod_l |mu^(w_l t)|.
pub fn f_mult_table<S: Scalar>(w: &WeightVector, mu: &Measure<S>) -> Vec<f64> {
    let spec = mu.spec();
    (0..spec.q())
        .map(|t| {
            w.vector()
                .indices()
                .iter()
                .map(|&wl| mu.fourier_abs_idx(spec.mul_idx(wl, t)))
                .product()
        })
        .collect()
}

/// g_mult(t) = prod_l nu^(w_l t), with nu^ evaluated as a real number.
pub fn g_mult_table<S: Scalar>(w: &WeightVector, nu: &Measure<S>) -> Vec<f64> {
    let spec = nu.spec();
    (0..spec.q())
        .map(|t| {
            w.vector()
                .indices()
                .iter()
                .map(|&wl| nu.fourier_idx(spec.mul_idx(wl, t)).re_approx())
                .product()
        })
        .collect()
}

/// Level sets of f_mult and g_mult at one threshold, with the full tables.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSetReport {
    pub u: f64,
    pub f_level: Vec<u32>,
    pub g_level: Vec<u32>,
    pub f_table: Vec<f64>,
    pub g_table: Vec<f64>,
}

pub fn level_set_report<S: Scalar>(
    w: &WeightVector,
    mu: &Measure<S>,
    u: f64,
) -> LevelSetReport {
    let nu = mu.swap_measure();
    let f_table = f_mult_table(w, mu);
    let g_table = g_mult_table(w, &nu);
    let f_level = (0..mu.spec().q())
        .filter(|&t| f_table[t as usize] >= u - tol::SET_SLACK)
        .collect();
    let g_level = (0..mu.spec().q())
        .filter(|&t| g_table[t as usize] >= u - tol::SET_SLACK)
        .collect();
    LevelSetReport {
        u,
        f_level,
        g_level,
        f_table,
        g_table,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub pass: bool,
    pub witness: Option<String>,
}

impl PropertyOutcome {
    fn ok() -> PropertyOutcome {
        PropertyOutcome {
            pass: true,
            witness: None,
        }
    }

    fn fail(witness: String) -> PropertyOutcome {
        PropertyOutcome {
            pass: false,
            witness: Some(witness),
        }
    }
}

/// The four swap-measure properties, checked for one (mu, w) pair:
/// level-set sumset inclusion, fourth-power domination, nonnegative nu^,
/// and (alpha/8)-density of nu.
#[derive(Clone, Debug, Serialize)]
pub struct SwapPropertyReport {
    pub levelset_inclusion: PropertyOutcome,
    pub fourth_power_domination: PropertyOutcome,
    pub nu_fourier_nonnegative: PropertyOutcome,
    pub nu_density: PropertyOutcome,
    pub pass: bool,
}

pub fn verify_swap_properties<S: Scalar>(
    mu: &Measure<S>,
    w: &WeightVector,
    u_grid: &[f64],
) -> SwapPropertyReport {
    let spec = mu.spec();
    let q = spec.q();
    let nu = mu.swap_measure();
    let f_table = f_mult_table(w, mu);
    let g_table = g_mult_table(w, &nu);

    // (1) F(u) + F(u) inside G(u) for each grid threshold
    let mut levelset_inclusion = PropertyOutcome::ok();
    'grid: for &u in u_grid {
        assert!(u > 0.0 && u <= 1.0, "u grid lies in (0, 1]");
        let f_u: Vec<u32> = (0..q)
            .filter(|&t| f_table[t as usize] >= u - tol::SET_SLACK)
            .collect();
        for &t1 in &f_u {
            for &t2 in &f_u {
                let s = spec.add_idx(t1, t2);
                if g_table[s as usize] < u - tol::PRODUCT_SLACK {
                    levelset_inclusion = PropertyOutcome::fail(format!(
                        "u={u}: t1={t1}, t2={t2}, g({s}) = {} < {u}",
                        g_table[s as usize]
                    ));
                    break 'grid;
                }
            }
        }
    }

    // (2) |mu^(t)| <= nu^(t)^4 pointwise, hence f <= g^4
    let mut fourth_power_domination = PropertyOutcome::ok();
    for t in 0..q {
        let mu_abs = mu.fourier_abs_idx(t);
        let nu_re = nu.fourier_idx(t).re_approx();
        if mu_abs > nu_re.powi(4) + tol::EXACT_EQ {
            fourth_power_domination = PropertyOutcome::fail(format!(
                "t={t}: |mu^| = {mu_abs} > nu^^4 = {}",
                nu_re.powi(4)
            ));
            break;
        }
    }
    if fourth_power_domination.pass {
        for t in 0..q {
            let (f, g) = (f_table[t as usize], g_table[t as usize]);
            if f > g.powi(4) + tol::PRODUCT_SLACK {
                fourth_power_domination =
                    PropertyOutcome::fail(format!("t={t}: f = {f} > g^4 = {}", g.powi(4)));
                break;
            }
        }
    }

    // (3) nu^(t) >= 0 everywhere (it is in fact >= 1 - gamma)
    let mut nu_fourier_nonnegative = PropertyOutcome::ok();
    for t in 0..q {
        let (re, im) = nu.fourier_idx(t).approx();
        if re < -tol::EXACT_EQ || im.abs() > tol::EXACT_EQ {
            nu_fourier_nonnegative =
                PropertyOutcome::fail(format!("t={t}: nu^ = {re} + {im}i"));
            break;
        }
    }

    // (4) nu is beta-dense for beta = alpha/8
    let alpha = mu.alpha();
    let beta_required = S::from_ratio(1, 8) * alpha.clone();
    let nu_alpha = nu.alpha();
    let dense_ok = if S::EXACT {
        nu_alpha >= &beta_required
    } else {
        nu_alpha.approx() >= beta_required.approx() - tol::EXACT_EQ
    };
    let nu_density = if dense_ok {
        PropertyOutcome::ok()
    } else {
        PropertyOutcome::fail(format!(
            "alpha(nu) = {} < alpha(mu)/8 = {}",
            nu_alpha.approx(),
            beta_required.approx()
        ))
    };

    let pass = levelset_inclusion.pass
        && fourth_power_domination.pass
        && nu_fourier_nonnegative.pass
        && nu_density.pass;
    SwapPropertyReport {
        levelset_inclusion,
        fourth_power_domination,
        nu_fourier_nonnegative,
        nu_density,
        pass,
    }
}

// ---- subspace classification ----

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassifyConstants {
    pub delta: f64,
    pub d: f64,
    pub big_d: f64,
}

impl Default for ClassifyConstants {
    fn default() -> Self {
        ClassifyConstants {
            delta: DEFAULT_DELTA,
            d: DEFAULT_D,
            big_d: DEFAULT_BIG_D,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceLabel {
    Sparse,
    Unsaturated,
    SemiSaturated,
    Saturated,
}

/// Classification of one subspace with the evidence that fired. The
/// saturation thresholds use e^{-d \alpha n} throughout.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceClass {
    pub label: SubspaceLabel,
    pub n: usize,
    pub codim: usize,
    pub min_annihilator_support: Option<usize>,
    pub sparse_threshold: f64,
    pub deviation: f64,
    pub exp_threshold: f64,
    pub dq_threshold: f64,
    pub constants: ClassifyConstants,
}

/// Exactly one of sparse / unsaturated / semi-saturated / saturated, per
/// the deviation |P(X in V) - q^{-k}| against the thresholds e^{-d alpha n}
/// and D q^{-k}.
pub fn classify_subspace<S: Scalar>(
    v: &Subspace,
    mu: &Measure<S>,
    constants: ClassifyConstants,
) -> Result<SubspaceClass> {
    let n = v.ambient_dim();
    let k = v.codim();
    let q = v.spec().q() as f64;
    let min_support = v.min_annihilator_support()?.map(|(s, _)| s);
    let sparse_threshold = constants.delta * n as f64;

    let alpha = mu.alpha().approx();
    let exp_threshold = (-constants.d * alpha * n as f64).exp();
    let dq_threshold = constants.big_d * q.powi(-(k as i32));

    let method = if v.size() <= v.annihilator_size() {
        MembershipMethod::Direct
    } else {
        MembershipMethod::Fourier
    };
    let prob = membership_probability(v, mu, method)?.approx();
    let deviation = (prob - q.powi(-(k as i32))).abs();

    let label = if min_support.is_some_and(|s| s as f64 <= sparse_threshold) {
        SubspaceLabel::Sparse
    } else if deviation > exp_threshold.max(dq_threshold) {
        SubspaceLabel::Unsaturated
    } else if deviation > exp_threshold && deviation <= dq_threshold {
        SubspaceLabel::SemiSaturated
    } else {
        SubspaceLabel::Saturated
    };

    Ok(SubspaceClass {
        label,
        n,
        codim: k,
        min_annihilator_support: min_support,
        sparse_threshold,
        deviation,
        exp_threshold,
        dq_threshold,
        constants,
    })
}

// ---- combinatorial codimension ----

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CombCodim {
    /// d = numer / n, the unique grid point with
    /// (1-alpha)^d <= P < (1-alpha)^{d - 1/n}.
    Finite { numer: u64, n: usize, value: f64 },
    /// P = 1: the definition requires d in Z^+/n, so the full space is
    /// flagged rather than assigned d = 0.
    DegenerateFull,
    /// P = 0.
    Infinite,
}

/// Combinatorial codimension from a membership probability.
pub fn combinatorial_codimension_value(p: f64, alpha: f64, n: usize) -> CombCodim {
    assert!((0.0..=1.0).contains(&p), "P must be a probability");
    assert!(alpha > 0.0 && alpha < 1.0, "alpha in (0,1)");
    assert!(n >= 1);
    if p == 0.0 {
        return CombCodim::Infinite;
    }
    if p >= 1.0 {
        return CombCodim::DegenerateFull;
    }
    let base = 1.0 - alpha;
    let ratio = p.ln() / base.ln(); // positive
    let mut j = (ratio * n as f64).ceil() as i64;
    if j < 1 {
        j = 1;
    }
    // nudge against floating error until the sandwich holds
    let holds = |j: i64| -> bool {
        let left = base.powf(j as f64 / n as f64) <= p;
        let right = p < base.powf((j - 1) as f64 / n as f64);
        left && right
    };
    for _ in 0..4 {
        if holds(j) {
            break;
        }
        if base.powf(j as f64 / n as f64) > p {
            j += 1;
        } else {
            j -= 1;
        }
        if j < 1 {
            j = 1;
        }
    }
    debug_assert!(holds(j), "sandwich must pin down d (P={p}, alpha={alpha}, n={n})");
    CombCodim::Finite {
        numer: j as u64,
        n,
        value: j as f64 / n as f64,
    }
}

/// Combinatorial codimension of a subspace under `mu`, at granularity
/// 1/ambient-dimension.
pub fn combinatorial_codimension<S: Scalar>(v: &Subspace, mu: &Measure<S>) -> Result<CombCodim> {
    let method = if v.size() <= v.annihilator_size() {
        MembershipMethod::Direct
    } else {
        MembershipMethod::Fourier
    };
    let p = membership_probability(v, mu, method)?.approx();
    Ok(combinatorial_codimension_value(
        p,
        mu.alpha().approx(),
        v.ambient_dim(),
    ))
}

// ---- swap comparison on hyperplanes ----

#[derive(Clone, Debug, Serialize)]
pub struct SwapComparison {
    /// |P_mu(X in V) - 1/q|
    pub lhs: f64,
    /// |P_nu(Y in V) - 1/q|
    pub rhs: f64,
    pub ratio: Option<f64>,
    /// Both deviations vanish (e.g. uniform mu).
    pub degenerate: bool,
    /// rhs = 0 with lhs != 0; should not occur while f <= g^4 holds.
    pub ratio_undefined: bool,
}

/// Compares the uniformity deviation of mu against its swap measure on a
/// hyperplane. Only deviation trends are asserted elsewhere; the paper-side
/// factor is asymptotic.
pub fn swap_comparison<S: Scalar>(v: &Subspace, mu: &Measure<S>) -> Result<SwapComparison> {
    if v.codim() != 1 {
        return Err(Error::Dimension(format!(
            "swap comparison needs a hyperplane, got codim {}",
            v.codim()
        )));
    }
    let q = v.spec().q() as f64;
    let nu = mu.swap_measure();
    let p_mu = membership_probability(v, mu, MembershipMethod::Fourier)?.approx();
    let p_nu = membership_probability(v, &nu, MembershipMethod::Fourier)?.approx();
    let lhs = (p_mu - 1.0 / q).abs();
    let rhs = (p_nu - 1.0 / q).abs();
    let degenerate = lhs <= tol::EXACT_EQ && rhs <= tol::EXACT_EQ;
    let ratio_undefined = rhs <= tol::EXACT_EQ && lhs > tol::EXACT_EQ;
    Ok(SwapComparison {
        lhs,
        rhs,
        ratio: if rhs > tol::EXACT_EQ {
            Some(lhs / rhs)
        } else {
            None
        },
        degenerate,
        ratio_undefined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::{enumerate_additive_subgroups, make_field};
    use crate::measure::{random_dense_measure, random_exact_measure};
    use crate::rng::Stream;
    use crate::Exact;

    fn rat(n: i64, d: u64) -> Exact {
        Exact::from_ratio(n, d)
    }

    /// Brute-force oracle: enumerate all q^n outcomes with their weights.
    fn dot_distribution_brute<S: Scalar>(w: &WeightVector, mu: &Measure<S>) -> Vec<S> {
        let spec = mu.spec();
        let q = spec.q();
        let n = w.len();
        let mut probs = vec![S::zero(); q as usize];
        let mut assignment = vec![0u32; n];
        loop {
            let mut weight = S::one();
            let mut acc = 0u32;
            for (l, &x) in assignment.iter().enumerate() {
                weight = weight * mu.weight_idx(x).clone();
                acc = spec.add_idx(acc, spec.mul_idx(w.vector().indices()[l], x));
            }
            probs[acc as usize] = probs[acc as usize].clone() + weight;
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                assignment[pos] += 1;
                if assignment[pos] < q {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
        probs
    }

    #[test]
    fn dot_distribution_examples() {
        let f2 = make_field(2, 1).unwrap();
        // all-ones, fair coin: uniform
        let u: Measure<Exact> = Measure::bernoulli(Arc::clone(&f2), rat(1, 2)).unwrap();
        let w = WeightVector::all_ones(&f2, 5);
        let dist = dot_distribution(&w, &u);
        assert_eq!(dist.probs(), &[rat(1, 2), rat(1, 2)]);

        // zero vector: point mass at 0
        let z = WeightVector::new(VectorFq::zero(Arc::clone(&f2), 4));
        assert_eq!(z.m(), 0);
        let dz = dot_distribution(&z, &u);
        assert_eq!(dz.probs(), &[rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn dot_distribution_closed_form_f2() {
        // P(0) = (1 + (1-2a)^n)/2 for all-ones w over F_2
        let f2 = make_field(2, 1).unwrap();
        let a = rat(3, 10);
        let mu: Measure<Exact> = Measure::bernoulli(Arc::clone(&f2), a.clone()).unwrap();
        for n in 1..=12usize {
            let w = WeightVector::all_ones(&f2, n);
            let dist = dot_distribution(&w, &mu);
            let mut pow = rat(1, 1);
            for _ in 0..n {
                pow = pow * (rat(1, 1) - rat(2, 1) * a.clone());
            }
            let expected = (rat(1, 1) + pow) / rat(2, 1);
            assert_eq!(dist.probs()[0], expected, "n={n}");
        }
    }

    #[test]
    fn dot_distribution_matches_brute_force() {
        for (p, f) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(100, p + f as u64);
            for case in 0..12 {
                let n = 1 + (case % 6) as usize;
                let mu: Measure<Exact> = random_exact_measure(&fq, &mut stream, 32);
                let w = WeightVector::new(VectorFq::from_indices(
                    Arc::clone(&fq),
                    (0..n).map(|_| stream.below(fq.q() as u64) as u32).collect(),
                ));
                let fast = dot_distribution(&w, &mu);
                let brute = dot_distribution_brute(&w, &mu);
                assert_eq!(fast.probs(), &brute[..], "p={p} f={f} case={case}");
            }
        }
    }

    #[test]
    fn lo_bound_examples() {
        let f3 = make_field(3, 1).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f3));
        let w = WeightVector::all_ones(&f3, 6);
        for r in f3.elements() {
            assert!(lo_bound_report(&w, &u, r).deviation < 1e-15);
        }

        // bernoulli(0.25), all-ones, n=16: deviation = 0.5^16 / 2
        let f2 = make_field(2, 1).unwrap();
        let b: Measure<f64> = Measure::bernoulli(Arc::clone(&f2), 0.25).unwrap();
        let w16 = WeightVector::all_ones(&f2, 16);
        let rep = lo_bound_report(&w16, &b, f2.el(0));
        assert!((rep.deviation - 0.5f64.powi(16) / 2.0).abs() < 1e-18);
    }

    #[test]
    fn triangle_inequality_bound() {
        // |P(w.X = r) - 1/q| <= q^{-1} sum_{t != 0} f_mult(t)
        for (p, f) in [(2u64, 1u32), (3, 1), (2, 3)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(200, p * 3 + f as u64);
            for _ in 0..10 {
                let mu = random_dense_measure(&fq, &mut stream, 0.05);
                let n = 4 + stream.below(4) as usize;
                let w = WeightVector::new(VectorFq::from_indices(
                    Arc::clone(&fq),
                    (0..n).map(|_| stream.below(fq.q() as u64) as u32).collect(),
                ));
                let dist = dot_distribution(&w, &mu);
                let f_table = f_mult_table(&w, &mu);
                let q = fq.q() as f64;
                let bound: f64 = f_table[1..].iter().sum::<f64>() / q;
                for r in 0..fq.q() {
                    let dev = (dist.probs()[r as usize] - 1.0 / q).abs();
                    assert!(dev <= bound + tol::EXACT_EQ);
                }
            }
        }
    }

    #[test]
    fn psi_examples() {
        let f2 = make_field(2, 1).unwrap();
        let b: Measure<f64> = Measure::bernoulli(Arc::clone(&f2), 0.2).unwrap();
        let psi = psi_table(&b);
        assert_eq!(psi[0], 0.0);
        assert!((psi[1] - (1.0 - 0.6 * 0.6)).abs() < 1e-15); // 1 - (1-2a)^2

        let f5 = make_field(5, 1).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f5));
        let psi_u = psi_table(&u);
        assert_eq!(psi_u[0], 0.0);
        for t in 1..5 {
            assert!((psi_u[t] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn t_sumset_examples() {
        let f8 = make_field(2, 3).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f8));
        let w = WeightVector::all_ones(&f8, 5);

        // k = 1: T(v) inside T(v)
        assert!(t_sumset_check(&w, &u, 0.5, 1).pass);

        // uniform: T(v) = {0} for v < m, sumset stays {0}
        let check = t_sumset_check(&w, &u, 3.0, 2);
        assert_eq!(check.t_v, vec![0]);
        assert!(check.pass);

        // random measures, v grid, k in {2,3}
        let mut stream = Stream::new(300, 0);
        for _ in 0..20 {
            let mu = random_dense_measure(&f8, &mut stream, 0.05);
            let wv = WeightVector::new(VectorFq::from_indices(
                Arc::clone(&f8),
                (0..6).map(|_| stream.below(8) as u32).collect(),
            ));
            for v in [0.1, 0.5, 1.0, 2.0] {
                for k in [2usize, 3] {
                    assert!(t_sumset_check(&wv, &mu, v, k).pass);
                }
            }
        }
    }

    #[test]
    fn subgroup_average_examples() {
        // uniform over F_2, all-ones w: average over H = F_2 is n/2, bound
        // is alpha * m = n/2; equality
        let f2 = make_field(2, 1).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f2));
        let n = 8;
        let w = WeightVector::all_ones(&f2, n);
        let h = crate::fq::AdditiveSubgroup::from_elements(&f2, vec![f2.el(0), f2.el(1)]).unwrap();
        let rep = subgroup_average_check(&w, &u, &h).unwrap();
        assert!(rep.pass);
        assert!((rep.average - n as f64 / 2.0).abs() < 1e-12);
        assert!((rep.bound - n as f64 / 2.0).abs() < 1e-12);

        // zero weight vector: average 0 >= 0
        let z = WeightVector::new(VectorFq::zero(Arc::clone(&f2), 4));
        let rep0 = subgroup_average_check(&z, &u, &h).unwrap();
        assert!(rep0.pass);
        assert_eq!(rep0.average, 0.0);

        // trivial H errors
        let trivial = crate::fq::AdditiveSubgroup::from_elements(&f2, vec![f2.el(0)]).unwrap();
        assert!(matches!(
            subgroup_average_check(&w, &u, &trivial),
            Err(Error::TrivialSubgroup)
        ));

        // F_4: every index-2 subgroup, uniform mu, average >= m/2
        let f4 = make_field(2, 2).unwrap();
        let u4: Measure<f64> = Measure::uniform(Arc::clone(&f4));
        let w4 = WeightVector::new(VectorFq::from_indices(Arc::clone(&f4), vec![1, 2, 3, 0]));
        for h in enumerate_additive_subgroups(&f4, true).unwrap() {
            let rep = subgroup_average_check(&w4, &u4, &h).unwrap();
            assert!(rep.pass);
            assert!(rep.average >= w4.m() as f64 / 2.0 - 1e-12);
        }
    }

    #[test]
    fn cosine_examples() {
        assert!(cosine_check(&[1.234]).pass); // k = 1 is equality
        let two = cosine_check(&[std::f64::consts::FRAC_PI_2; 2]);
        assert!(two.pass);
        assert!((two.lhs - (-1.0)).abs() < 1e-15);
        assert!((two.rhs - (-3.0)).abs() < 1e-12);

        let mut stream = Stream::new(400, 0);
        for _ in 0..5000 {
            let k = 1 + stream.below(6) as usize;
            let betas: Vec<f64> = (0..k)
                .map(|_| (stream.next_f64() * 2.0 - 1.0) * std::f64::consts::PI)
                .collect();
            assert!(cosine_check(&betas).pass, "betas {betas:?}");
        }
    }

    #[test]
    fn classify_examples() {
        let f2 = make_field(2, 1).unwrap();
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f2));
        let constants = ClassifyConstants::default();

        // uniform measure, non-sparse V: deviation 0, saturated
        let n = 6;
        let dense_normal = VectorFq::from_indices(Arc::clone(&f2), vec![1; n]);
        let v = Subspace::hyperplane(&dense_normal);
        let class = classify_subspace(&v, &u, constants).unwrap();
        assert_eq!(class.label, SubspaceLabel::Saturated);
        assert!(class.deviation < 1e-15);

        // weight-1 annihilator at n = 120, delta = 1/100: sparse
        let n_big = 120;
        let mut e1 = vec![0u32; n_big];
        e1[0] = 1;
        let sparse_v = Subspace::hyperplane(&VectorFq::from_indices(Arc::clone(&f2), e1));
        let class = classify_subspace(&sparse_v, &u, constants).unwrap();
        assert_eq!(class.label, SubspaceLabel::Sparse);
        assert_eq!(class.min_annihilator_support, Some(1));
    }

    #[test]
    fn classify_is_total_and_consistent() {
        let f3 = make_field(3, 1).unwrap();
        let mut stream = Stream::new(500, 0);
        let constants = ClassifyConstants::default();
        for case in 0..40 {
            let n = 2 + (case % 4) as usize;
            let mu = random_dense_measure(&f3, &mut stream, 0.05);
            let v = crate::linalg::random_subspace(&f3, n, 1 + (case % n), &mut stream);
            let c1 = classify_subspace(&v, &mu, constants).unwrap();
            let c2 = classify_subspace(&v, &mu, constants).unwrap();
            assert_eq!(c1.label, c2.label, "classification must recompute identically");
            // evidence recomputes the same label
            let relabel = if c1.min_annihilator_support.is_some_and(|s| s as f64 <= c1.sparse_threshold) {
                SubspaceLabel::Sparse
            } else if c1.deviation > c1.exp_threshold.max(c1.dq_threshold) {
                SubspaceLabel::Unsaturated
            } else if c1.deviation > c1.exp_threshold {
                SubspaceLabel::SemiSaturated
            } else {
                SubspaceLabel::Saturated
            };
            assert_eq!(c1.label, relabel);
        }
    }

    #[test]
    fn comb_codim_examples() {
        // uniform F_2, codim-1: P = 1/2 = (1/2)^1, d = 1
        match combinatorial_codimension_value(0.5, 0.5, 7) {
            CombCodim::Finite { numer, n, .. } => {
                assert_eq!(numer as usize, n); // d = n/n = 1
            }
            other => panic!("expected finite, got {other:?}"),
        }

        // alpha = 1/2, P = 0.3, n = 10: d = 1.8
        match combinatorial_codimension_value(0.3, 0.5, 10) {
            CombCodim::Finite { numer, value, .. } => {
                assert_eq!(numer, 18);
                assert!((value - 1.8).abs() < 1e-12);
            }
            other => panic!("expected finite, got {other:?}"),
        }

        assert_eq!(
            combinatorial_codimension_value(1.0, 0.5, 5),
            CombCodim::DegenerateFull
        );
        assert_eq!(combinatorial_codimension_value(0.0, 0.5, 5), CombCodim::Infinite);
    }

    #[test]
    fn comb_codim_sandwich_randomized() {
        let mut stream = Stream::new(600, 0);
        for _ in 0..2000 {
            let p = (stream.next_f64() * 0.999).max(1e-9);
            let alpha = 0.05 + 0.9 * stream.next_f64();
            let n = 1 + stream.below(40) as usize;
            if let CombCodim::Finite { numer, .. } = combinatorial_codimension_value(p, alpha, n) {
                let base: f64 = 1.0 - alpha;
                let d = numer as f64 / n as f64;
                assert!(base.powf(d) <= p);
                assert!(p < base.powf(d - 1.0 / n as f64));
                assert!(numer >= 1);
            }
        }
    }

    #[test]
    fn swap_comparison_closed_forms() {
        let f2 = make_field(2, 1).unwrap();

        // uniform: both deviations vanish
        let u: Measure<f64> = Measure::uniform(Arc::clone(&f2));
        let v = Subspace::hyperplane(&VectorFq::from_indices(Arc::clone(&f2), vec![1; 6]));
        let cmp = swap_comparison(&v, &u).unwrap();
        assert!(cmp.degenerate);
        assert!(cmp.ratio.is_none());

        // bernoulli(0.3): lhs = 0.4^n / 2, rhs = 0.895^n / 2
        let b: Measure<f64> = Measure::bernoulli(Arc::clone(&f2), 0.3).unwrap();
        for n in [4usize, 8, 12] {
            let v = Subspace::hyperplane(&VectorFq::from_indices(Arc::clone(&f2), vec![1; n]));
            let cmp = swap_comparison(&v, &b).unwrap();
            assert!((cmp.lhs - 0.4f64.powi(n as i32) / 2.0).abs() < 1e-14, "n={n}");
            assert!((cmp.rhs - 0.895f64.powi(n as i32) / 2.0).abs() < 1e-14, "n={n}");
            let ratio = cmp.ratio.unwrap();
            assert!((ratio - (0.4f64 / 0.895).powi(n as i32)).abs() < 1e-10);
        }

        // non-hyperplane is rejected
        let full = Subspace::full(&f2, 3);
        assert!(swap_comparison(&full, &b).is_err());
    }

    #[test]
    fn swap_properties_hold_on_random_measures() {
        let u_grid: Vec<f64> = (1..=8).map(|i| i as f64 / 8.0).collect();
        for (p, f) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1)] {
            let fq = make_field(p, f).unwrap();
            let mut stream = Stream::new(700, p * 11 + f as u64);
            for _ in 0..10 {
                let mu = random_dense_measure(&fq, &mut stream, 0.05);
                let n = 3 + stream.below(5) as usize;
                let w = WeightVector::new(VectorFq::from_indices(
                    Arc::clone(&fq),
                    (0..n).map(|_| stream.below(fq.q() as u64) as u32).collect(),
                ));
                let rep = verify_swap_properties(&mu, &w, &u_grid);
                assert!(rep.pass, "p={p} f={f}: {rep:?}");
            }
        }
    }

    #[test]
    fn level_set_monotone_and_dominated() {
        let f8 = make_field(2, 3).unwrap();
        let mut stream = Stream::new(800, 0);
        let mu = random_dense_measure(&f8, &mut stream, 0.05);
        let w = WeightVector::new(VectorFq::from_indices(
            Arc::clone(&f8),
            vec![1, 3, 5, 7, 2, 6],
        ));
        let r1 = level_set_report(&w, &mu, 0.25);
        let r2 = level_set_report(&w, &mu, 0.5);
        // monotone: F(0.5) inside F(0.25)
        for t in &r2.f_level {
            assert!(r1.f_level.contains(t));
        }
        // 0 is always in both level sets for u <= 1
        assert!(r1.f_level.contains(&0));
        assert!(r1.g_level.contains(&0));
        // f <= g^4 and g <= 1 give f <= g, so F(u) inside G(u)
        for (t, (&fv, &gv)) in r1.f_table.iter().zip(&r1.g_table).enumerate() {
            assert!(fv <= gv.powi(4) + tol::PRODUCT_SLACK, "t={t}");
            assert!(gv <= 1.0 + tol::EXACT_EQ);
        }
        for t in &r1.f_level {
            assert!(r1.g_level.contains(t));
        }
    }
}
