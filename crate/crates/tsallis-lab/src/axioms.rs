//! Axiom checks for candidate entropy functionals.
//!
//! Each check enumerates instances over an exhaustive denominator grid plus
//! seeded random rational vectors, evaluates the axiom residual on every
//! instance, and reports the worst case together with a witness. Residuals
//! compare to exactly zero when every evaluation stayed in exact rational
//! arithmetic; otherwise an absolute float tolerance applies. Continuity and
//! boundedness can only be probed on finite samples and their reports are
//! labeled heuristic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::functionals::EntropyFunctional;
use crate::simplex::{NestedVector, Rational, StochasticVector};
use crate::value::{pow_alpha, Alpha, EntropyValue, Precision};

/// Absolute residual tolerance when any evaluation was inexact. Looser than
/// the evaluation precision so accumulation is not misread as violation.
pub const FLOAT_TOLERANCE: f64 = 1e-10;

/// Default constant C in the continuity threshold C / b^min(alpha, 1).
pub const DEFAULT_CONTINUITY_C: f64 = 8.0;

/// Deterministic description of the instance set: exhaustive vectors on the
/// 1/b grid up to the given length, plus seeded random rational vectors.
/// The same spec always produces the same instances.
#[derive(Clone, Debug, Serialize)]
pub struct SampleSpec {
    pub max_denominator: u32,
    pub max_length: u32,
    pub samples: u32,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(max_denominator: u32, max_length: u32, samples: u32, seed: u64) -> Self {
        assert!(max_denominator >= 1 && max_length >= 1);
        Self {
            max_denominator,
            max_length,
            samples,
            seed,
        }
    }

    /// Exhaustive grid only, no random instances.
    pub fn exhaustive(max_denominator: u32, max_length: u32) -> Self {
        Self::new(max_denominator, max_length, 0, 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "heuristic-pass")]
    HeuristicPass,
}

/// The instance achieving the maximum residual: the vectors involved, the
/// relevant index (merge position, when applicable) and both sides' values.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub vectors: Vec<StochasticVector>,
    pub index: Option<usize>,
    pub lhs: EntropyValue,
    pub rhs: EntropyValue,
}

/// Structured verdict for one axiom.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub verdict: Verdict,
    pub instances: u64,
    pub max_residual: EntropyValue,
    pub tolerance: f64,
    pub exact_mode: bool,
    pub heuristic: bool,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Tracks the worst absolute residual over a deterministic instance stream.
/// Enumeration order is graded (shorter vectors first, lexicographic within
/// a length, random instances last), so keeping the first achiever of the
/// maximum yields the lexicographically smallest witness.
struct Tracker {
    instances: u64,
    all_exact: bool,
    max_abs: EntropyValue,
    witness: Option<Witness>,
}

impl Tracker {
    fn new() -> Self {
        Self {
            instances: 0,
            all_exact: true,
            max_abs: EntropyValue::zero(),
            witness: None,
        }
    }

    fn count(&mut self) {
        self.instances += 1;
    }

    fn record(&mut self, residual: &EntropyValue, witness: impl FnOnce() -> Witness) {
        if !residual.is_exact() {
            self.all_exact = false;
        }
        let abs = residual.abs();
        let bigger = match (abs.exact(), self.max_abs.exact()) {
            (Some(a), Some(b)) => a > b,
            _ => abs.approx() > self.max_abs.approx(),
        };
        if bigger || self.witness.is_none() {
            if bigger {
                self.max_abs = abs;
            }
            if bigger || self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn finish(self, axiom: &str) -> AxiomReport {
        let tolerance = if self.all_exact { 0.0 } else { FLOAT_TOLERANCE };
        let failed = match self.max_abs.exact() {
            Some(r) if self.all_exact => !r.is_zero(),
            _ => self.max_abs.approx().abs() > tolerance,
        };
        AxiomReport {
            axiom: axiom.to_string(),
            verdict: if failed { Verdict::Fail } else { Verdict::Pass },
            instances: self.instances,
            max_residual: self.max_abs,
            tolerance,
            exact_mode: self.all_exact,
            heuristic: false,
            witness: self.witness,
        }
    }
}

/// All length-`parts` sequences of nonnegative numerators summing to
/// `total`, in lexicographic order.
fn compositions(total: u32, parts: u32) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            let mut c = Vec::with_capacity(parts as usize);
            c.push(first);
            c.append(&mut rest);
            out.push(c);
        }
    }
    out
}

/// All stochastic vectors of the given length with components that are
/// multiples of 1/b, in lexicographic order.
pub fn grid_vectors(b: u32, len: u32) -> Vec<StochasticVector> {
    compositions(b, len)
        .into_iter()
        .map(|nums| {
            let nums: Vec<u64> = nums.into_iter().map(u64::from).collect();
            StochasticVector::from_numerators(&nums, u64::from(b))
        })
        .collect()
}

/// All ways to split a length-n flattening into consecutive nonempty blocks.
fn block_partitions(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        if first == n {
            out.push(vec![n]);
        } else {
            for mut rest in block_partitions(n - first) {
                let mut p = Vec::with_capacity(1 + rest.len());
                p.push(first);
                p.append(&mut rest);
                out.push(p);
            }
        }
    }
    out
}

/// All rationals a/q in [0, 1] with denominator q <= b in lowest terms,
/// ascending (the Farey sequence of order b).
pub fn delta2_points(b: u32) -> Vec<Rational> {
    let mut points = Vec::new();
    for q in 1..=b {
        for a in 0..=q {
            if num_integer::gcd(a, q) == 1 {
                points.push(Rational::new(BigInt::from(a), BigInt::from(q)));
            }
        }
    }
    points.sort();
    points.dedup();
    points
}

fn random_vectors(spec: &SampleSpec) -> Vec<StochasticVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.samples as usize);
    for _ in 0..spec.samples {
        let n = rng.gen_range(1..=spec.max_length);
        let d = rng.gen_range(1..=spec.max_denominator) as u64;
        // n-1 sorted cut points in [0, d] induce numerators
        let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.gen_range(0..=d)).collect();
        cuts.sort_unstable();
        cuts.insert(0, 0);
        cuts.push(d);
        let nums: Vec<u64> = cuts.windows(2).map(|w| w[1] - w[0]).collect();
        out.push(StochasticVector::from_numerators(&nums, d));
    }
    out
}

/// The deterministic instance stream: exhaustive grid vectors of every
/// length up to the sample bound, then seeded random vectors.
pub fn instance_vectors(spec: &SampleSpec) -> Vec<StochasticVector> {
    let mut out = Vec::new();
    for len in 1..=spec.max_length {
        out.extend(grid_vectors(spec.max_denominator, len));
    }
    out.extend(random_vectors(spec));
    out
}

/// Pairwise additivity: F(..., p_j, p_{j+1}, ...) equals
/// F(..., p_j + p_{j+1}, ...) + s^alpha F(p_j/s, p_{j+1}/s) with
/// s = p_j + p_{j+1}; instances with s = 0 use only the merge term.
pub fn check_pairwise_additivity(
    f: &dyn EntropyFunctional,
    alpha: &Alpha,
    spec: &SampleSpec,
    prec: Precision,
) -> AxiomReport {
    let mut t = Tracker::new();
    for v in instance_vectors(spec) {
        let n = v.len();
        for j in 0..n.saturating_sub(1) {
            t.count();
            let merged = v.merge_adjacent(j).expect("valid index");
            let s = v.pair_mass(j).expect("valid index");
            let lhs = f.eval(&v);
            let (rhs, witness_vectors) = if s.is_zero() {
                (f.eval(&merged), vec![v.clone(), merged.clone()])
            } else {
                let cond = v.conditional_pair(j).expect("s > 0");
                let weight = pow_alpha(&s, alpha, prec);
                let rhs = &f.eval(&merged) + &(&weight * &f.eval(&cond));
                (rhs, vec![v.clone(), merged.clone(), cond])
            };
            let residual = &lhs - &rhs;
            t.record(&residual, || Witness {
                vectors: witness_vectors,
                index: Some(j),
                lhs,
                rhs,
            });
        }
    }
    t.finish("pairwise-additivity")
}

/// Generalized grouped-outcome additivity: F(flattening) equals F(outer)
/// plus the p_i^alpha weighted entropies of the conditionals. Zero-mass
/// blocks contribute 0. The trivial nesting forces F((1)) = 0, which is
/// checked first.
pub fn check_generalized_additivity(
    f: &dyn EntropyFunctional,
    alpha: &Alpha,
    spec: &SampleSpec,
    prec: Precision,
) -> AxiomReport {
    let mut t = Tracker::new();

    // trivial nesting of (1) forces H(1) = 0
    let point = StochasticVector::point();
    let h1 = f.eval(&point);
    t.count();
    t.record(&h1, || Witness {
        vectors: vec![point.clone()],
        index: None,
        lhs: h1.clone(),
        rhs: EntropyValue::zero(),
    });

    for v in instance_vectors(spec) {
        let n = v.len();
        for sizes in block_partitions(n) {
            t.count();
            let nested = NestedVector::from_flat(&v, &sizes).expect("sizes sum to n");
            let outer = nested.outer();
            let mut rhs = f.eval(outer);
            for (i, p) in outer.components().iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let cond = nested.conditional(i).expect("p_i > 0");
                let weight = pow_alpha(p, alpha, prec);
                rhs = &rhs + &(&weight * &f.eval(&cond));
            }
            let lhs = f.eval(&v);
            let residual = &lhs - &rhs;
            t.record(&residual, || Witness {
                vectors: vec![v.clone(), outer.clone()],
                index: None,
                lhs,
                rhs,
            });
        }
    }
    t.finish("generalized-additivity")
}

/// Expansibility: appending an exact zero leaves the value unchanged.
pub fn check_expansibility(
    f: &dyn EntropyFunctional,
    spec: &SampleSpec,
) -> AxiomReport {
    let mut t = Tracker::new();
    for v in instance_vectors(spec) {
        t.count();
        let extended = v.append_zero();
        let lhs = f.eval(&extended);
        let rhs = f.eval(&v);
        let residual = &lhs - &rhs;
        t.record(&residual, || Witness {
            vectors: vec![v.clone(), extended.clone()],
            index: None,
            lhs,
            rhs,
        });
    }
    t.finish("expansibility")
}

/// Maximality: no sampled vector exceeds the uniform vector of its length.
/// The recorded residual is the excess F(v) - F(uniform(n)) when positive.
pub fn check_maximality(f: &dyn EntropyFunctional, spec: &SampleSpec) -> AxiomReport {
    let mut t = Tracker::new();
    for v in instance_vectors(spec) {
        t.count();
        let uniform = StochasticVector::uniform(v.len());
        let lhs = f.eval(&v);
        let rhs = f.eval(&uniform);
        let diff = &lhs - &rhs;
        let positive = match diff.exact() {
            Some(r) => r.is_positive(),
            None => diff.approx() > 0.0,
        };
        if positive {
            t.record(&diff, || Witness {
                vectors: vec![v.clone(), uniform.clone()],
                index: None,
                lhs,
                rhs,
            });
        } else if !diff.is_exact() {
            t.all_exact = false;
        }
    }
    t.finish("maximality")
}

/// Heuristic continuity probe: compares F at adjacent grid vectors
/// (max-norm distance 1/b) and applies the threshold C / b^min(alpha, 1).
/// A finite sample cannot certify continuity, so a quiet result is only
/// `heuristic-pass`; a jump exceeding ten times the threshold is a fail.
pub fn check_continuity_sampled(
    f: &dyn EntropyFunctional,
    alpha: &Alpha,
    spec: &SampleSpec,
    c_const: f64,
) -> AxiomReport {
    let b = spec.max_denominator;
    let step = Rational::new(BigInt::one(), BigInt::from(b));
    let mut t = Tracker::new();
    for len in 2..=spec.max_length {
        for v in grid_vectors(b, len) {
            let fv = f.eval(&v);
            for i in 0..v.len() {
                for j in 0..v.len() {
                    if i == j || v.component(j) < &step {
                        continue;
                    }
                    let mut comps: Vec<Rational> = v.components().to_vec();
                    comps[i] = &comps[i] + &step;
                    comps[j] = &comps[j] - &step;
                    let w = StochasticVector::from_rationals(comps).expect("still normalized");
                    t.count();
                    let fw = f.eval(&w);
                    let jump = &fw - &fv;
                    t.record(&jump, || Witness {
                        vectors: vec![v.clone(), w.clone()],
                        index: None,
                        lhs: fv.clone(),
                        rhs: fw,
                    });
                }
            }
        }
    }
    let threshold = c_const / (b as f64).powf(alpha.approx().min(1.0));
    let max = t.max_abs.approx().abs();
    AxiomReport {
        axiom: "continuity".to_string(),
        verdict: if max > 10.0 * threshold {
            Verdict::Fail
        } else {
            Verdict::HeuristicPass
        },
        instances: t.instances,
        max_residual: t.max_abs,
        tolerance: 10.0 * threshold,
        exact_mode: false,
        heuristic: true,
        witness: t.witness,
    }
}

/// Symmetry on Δ₂: residual F(p, 1-p) - F(1-p, p) over the Farey grid.
pub fn check_symmetry_delta2(f: &dyn EntropyFunctional, spec: &SampleSpec) -> AxiomReport {
    let mut t = Tracker::new();
    let one = Rational::one();
    for p in delta2_points(spec.max_denominator) {
        t.count();
        let q = &one - &p;
        let v = StochasticVector::from_rationals(vec![p.clone(), q.clone()]).expect("p in [0,1]");
        let w = StochasticVector::from_rationals(vec![q, p]).expect("p in [0,1]");
        let lhs = f.eval(&v);
        let rhs = f.eval(&w);
        let residual = &lhs - &rhs;
        t.record(&residual, || Witness {
            vectors: vec![v.clone(), w.clone()],
            index: None,
            lhs,
            rhs,
        });
    }
    t.finish("symmetry-delta2")
}

/// Sign constancy on Δ₂: all sampled values are >= 0 or all are <= 0.
/// The recorded residual is the smaller magnitude of the two offending
/// extremes when signs are mixed.
pub fn check_sign_constancy(f: &dyn EntropyFunctional, spec: &SampleSpec) -> AxiomReport {
    let one = Rational::one();
    let mut max: Option<(EntropyValue, StochasticVector)> = None;
    let mut min: Option<(EntropyValue, StochasticVector)> = None;
    let mut instances = 0u64;
    let mut all_exact = true;
    for p in delta2_points(spec.max_denominator) {
        instances += 1;
        let q = &one - &p;
        let v = StochasticVector::from_rationals(vec![p, q]).expect("p in [0,1]");
        let value = f.eval(&v);
        if !value.is_exact() {
            all_exact = false;
        }
        if max.as_ref().map_or(true, |(m, _)| value.approx() > m.approx()) {
            max = Some((value.clone(), v.clone()));
        }
        if min.as_ref().map_or(true, |(m, _)| value.approx() < m.approx()) {
            min = Some((value, v));
        }
    }
    let tolerance = if all_exact { 0.0 } else { FLOAT_TOLERANCE };
    let (max, min) = (max.expect("nonempty grid"), min.expect("nonempty grid"));
    let mixed = max.0.approx() > tolerance && min.0.approx() < -tolerance;
    let violation = if mixed {
        let hi = max.0.abs();
        let lo = min.0.abs();
        if hi.approx() < lo.approx() {
            hi
        } else {
            lo
        }
    } else {
        EntropyValue::zero()
    };
    AxiomReport {
        axiom: "sign-constancy".to_string(),
        verdict: if mixed { Verdict::Fail } else { Verdict::Pass },
        instances,
        max_residual: violation,
        tolerance,
        exact_mode: all_exact,
        heuristic: false,
        witness: Some(Witness {
            vectors: vec![max.1, min.1],
            index: None,
            lhs: max.0,
            rhs: min.0,
        }),
    }
}

/// Boundedness estimate: the maximum |F| over the Δ₂ sample. Heuristic;
/// fails only when an evaluation is non-finite.
pub fn check_boundedness_estimate(
    f: &dyn EntropyFunctional,
    spec: &SampleSpec,
) -> AxiomReport {
    let one = Rational::one();
    let mut t = Tracker::new();
    let mut finite = true;
    for p in delta2_points(spec.max_denominator) {
        t.count();
        let q = &one - &p;
        let v = StochasticVector::from_rationals(vec![p, q]).expect("p in [0,1]");
        let value = f.eval(&v);
        if !value.approx().is_finite() {
            finite = false;
        }
        t.record(&value, || Witness {
            vectors: vec![v.clone()],
            index: None,
            lhs: value.clone(),
            rhs: EntropyValue::zero(),
        });
    }
    AxiomReport {
        axiom: "boundedness".to_string(),
        verdict: if finite { Verdict::HeuristicPass } else { Verdict::Fail },
        instances: t.instances,
        max_residual: t.max_abs,
        tolerance: f64::INFINITY,
        exact_mode: t.all_exact,
        heuristic: true,
        witness: t.witness,
    }
}

/// Runs every check in a fixed order.
pub fn full_report(
    f: &dyn EntropyFunctional,
    alpha: &Alpha,
    spec: &SampleSpec,
    prec: Precision,
) -> Vec<AxiomReport> {
    vec![
        check_pairwise_additivity(f, alpha, spec, prec),
        check_generalized_additivity(f, alpha, spec, prec),
        check_expansibility(f, spec),
        check_maximality(f, spec),
        check_continuity_sampled(f, alpha, spec, DEFAULT_CONTINUITY_C),
        check_symmetry_delta2(f, spec),
        check_sign_constancy(f, spec),
        check_boundedness_estimate(f, spec),
    ]
}

/// True when no report in the sequence is a hard fail.
pub fn all_passed(reports: &[AxiomReport]) -> bool {
    reports.iter().all(AxiomReport::passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{FnFunctional, Perturbed, Shannon, Tabulated, Tsallis};
    use crate::simplex::parse_rational;
    use std::sync::Arc;

    fn v(s: &str) -> StochasticVector {
        s.parse().unwrap()
    }

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn prec() -> Precision {
        Precision::default()
    }

    fn tsallis_fn(alpha: u64) -> Tsallis {
        Tsallis::new(Alpha::from_u64(alpha), prec()).unwrap()
    }

    #[test]
    fn grid_vectors_enumerates_the_simplex() {
        let vs = grid_vectors(2, 2);
        assert_eq!(vs, vec![v("0,1"), v("1/2,1/2"), v("1,0")]);
        assert_eq!(grid_vectors(6, 4).len(), 84);
    }

    #[test]
    fn delta2_points_is_the_farey_sequence() {
        let pts = delta2_points(3);
        let expected: Vec<Rational> =
            ["0", "1/3", "1/2", "2/3", "1"].iter().map(|s| r(s)).collect();
        assert_eq!(pts, expected);
    }

    #[test]
    fn pairwise_additivity_tsallis_is_exact() {
        let spec = SampleSpec::new(4, 3, 50, 7);
        let report = check_pairwise_additivity(&tsallis_fn(2), &Alpha::from_u64(2), &spec, prec());
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.exact_mode);
        assert_eq!(report.max_residual.exact(), Some(&r("0")));
    }

    #[test]
    fn pairwise_additivity_single_instance_example() {
        // F = tsallis alpha=2, v = (1/2,1/4,1/4), merge at the second pair:
        // F(v) = 5/8, merged gives 1/2, weighted conditional term 1/8
        let f = tsallis_fn(2);
        let x = v("1/2,1/4,1/4");
        let lhs = f.eval(&x);
        assert_eq!(lhs.exact(), Some(&r("5/8")));
        let merged = x.merge_adjacent(1).unwrap();
        let cond = x.conditional_pair(1).unwrap();
        let s = x.pair_mass(1).unwrap();
        let rhs = &f.eval(&merged)
            + &(&pow_alpha(&s, &Alpha::from_u64(2), prec()) * &f.eval(&cond));
        assert_eq!((&lhs - &rhs).exact(), Some(&r("0")));
    }

    #[test]
    fn pairwise_additivity_detects_perturbation() {
        let base = Arc::new(tsallis_fn(2));
        let perturbed = Perturbed::new(base, v("1/2,1/2"), r("1/1000"));
        let spec = SampleSpec::exhaustive(4, 3);
        let report =
            check_pairwise_additivity(&perturbed, &Alpha::from_u64(2), &spec, prec());
        assert_eq!(report.verdict, Verdict::Fail);
        let max = report.max_residual.exact().unwrap();
        assert!(*max >= r("1/1000"));
        assert!(report.witness.is_some());
    }

    #[test]
    fn pairwise_additivity_vacuous_on_delta1() {
        let spec = SampleSpec::exhaustive(1, 1);
        let report = check_pairwise_additivity(&tsallis_fn(2), &Alpha::from_u64(2), &spec, prec());
        assert_eq!(report.instances, 0);
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn generalized_additivity_tsallis_example() {
        // outer (1/2,1/2), both conditionals (1/2,1/2), alpha=3:
        // F(1/4,...,1/4) = 15/32 = 3/8 + 2 * (1/8)(3/8)
        let f = tsallis_fn(3);
        assert_eq!(f.eval(&v("1/4,1/4,1/4,1/4")).exact(), Some(&r("15/32")));
        let spec = SampleSpec::exhaustive(4, 4);
        let report =
            check_generalized_additivity(&f, &Alpha::from_u64(3), &spec, prec());
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.exact_mode);
    }

    #[test]
    fn generalized_additivity_shannon_classical_weights() {
        let f = Shannon::new(prec());
        let spec = SampleSpec::new(5, 3, 20, 3);
        let report = check_generalized_additivity(&f, &Alpha::from_u64(1), &spec, prec());
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.max_residual.approx() <= FLOAT_TOLERANCE);
    }

    #[test]
    fn generalized_additivity_enforces_h1_zero() {
        let f = FnFunctional::new("constant-one", None, |_| {
            EntropyValue::from_rational(Rational::one())
        });
        let spec = SampleSpec::exhaustive(2, 2);
        let report = check_generalized_additivity(&f, &Alpha::from_u64(2), &spec, prec());
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn expansibility_examples() {
        let spec = SampleSpec::exhaustive(4, 3);
        let report = check_expansibility(&tsallis_fn(2), &spec);
        assert_eq!(report.verdict, Verdict::Pass);

        let base = Arc::new(tsallis_fn(2));
        let spiked = Tabulated::new(
            [(v("1/2,1/2,0"), EntropyValue::from_rational(r("1")))],
            base,
        );
        let report = check_expansibility(&spiked, &SampleSpec::exhaustive(2, 2));
        assert_eq!(report.verdict, Verdict::Fail);
        assert_eq!(report.max_residual.exact(), Some(&r("1/2")));
    }

    #[test]
    fn maximality_pass_and_fail() {
        let spec = SampleSpec::exhaustive(6, 3);
        assert_eq!(check_maximality(&tsallis_fn(2), &spec).verdict, Verdict::Pass);

        let negated = FnFunctional::new("negated-tsallis", Some(Alpha::from_u64(2)), {
            let f = tsallis_fn(2);
            move |x| -&f.eval(x)
        });
        let report = check_maximality(&negated, &spec);
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report.witness.is_some());
    }

    #[test]
    fn continuity_tsallis_smooth() {
        let spec = SampleSpec::exhaustive(100, 2);
        let report = check_continuity_sampled(
            &tsallis_fn(2),
            &Alpha::from_u64(2),
            &spec,
            DEFAULT_CONTINUITY_C,
        );
        assert_eq!(report.verdict, Verdict::HeuristicPass);
        assert!(report.heuristic);
        // |d/dp (1 - p^2 - (1-p)^2)| <= 2 so adjacent jumps stay below 4/100
        assert!(report.max_residual.approx() <= 0.04);
    }

    #[test]
    fn continuity_spike_fails() {
        let base = Arc::new(tsallis_fn(2));
        let spiked = Tabulated::new(
            [(v("33/100,67/100"), EntropyValue::from_rational(r("3/2")))],
            base,
        );
        let spec = SampleSpec::exhaustive(100, 2);
        let report = check_continuity_sampled(
            &spiked,
            &Alpha::from_u64(2),
            &spec,
            DEFAULT_CONTINUITY_C,
        );
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn continuity_constant_zero() {
        let zero = FnFunctional::new("zero", None, |_| EntropyValue::zero());
        let spec = SampleSpec::exhaustive(10, 2);
        let report =
            check_continuity_sampled(&zero, &Alpha::from_u64(2), &spec, DEFAULT_CONTINUITY_C);
        assert_eq!(report.verdict, Verdict::HeuristicPass);
        assert!(report.max_residual.is_zero());
    }

    #[test]
    fn symmetry_examples() {
        let spec = SampleSpec::exhaustive(8, 2);
        assert_eq!(
            check_symmetry_delta2(&tsallis_fn(2), &spec).verdict,
            Verdict::Pass
        );

        let first = FnFunctional::new("first-component", None, |x: &StochasticVector| {
            EntropyValue::from_rational(x.component(0).clone())
        });
        let report = check_symmetry_delta2(&first, &spec);
        assert_eq!(report.verdict, Verdict::Fail);
        // max residual |2p - 1| = 1, achieved at p = 0 and p = 1; the
        // lexicographically smallest achiever wins the tie-break
        assert_eq!(report.max_residual.exact(), Some(&r("1")));
        let w = report.witness.unwrap();
        assert_eq!(w.vectors[0], v("0,1"));
    }

    #[test]
    fn sign_constancy_examples() {
        let spec = SampleSpec::exhaustive(8, 2);
        assert_eq!(
            check_sign_constancy(&tsallis_fn(2), &spec).verdict,
            Verdict::Pass
        );

        let shifted = FnFunctional::new("tsallis-minus-quarter", None, {
            let f = tsallis_fn(2);
            move |x| &f.eval(x) - &EntropyValue::from_rational(r("1/4"))
        });
        assert_eq!(check_sign_constancy(&shifted, &spec).verdict, Verdict::Fail);

        let zero = FnFunctional::new("zero", None, |_| EntropyValue::zero());
        assert_eq!(check_sign_constancy(&zero, &spec).verdict, Verdict::Pass);
    }

    #[test]
    fn boundedness_examples() {
        let spec = SampleSpec::exhaustive(16, 2);
        let report = check_boundedness_estimate(&tsallis_fn(2), &spec);
        assert_eq!(report.verdict, Verdict::HeuristicPass);
        assert_eq!(report.max_residual.exact(), Some(&r("1/2")));

        let report = check_boundedness_estimate(&Shannon::new(prec()), &spec);
        assert!((report.max_residual.approx() - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn full_report_composition() {
        let spec = SampleSpec::new(4, 3, 20, 11);
        let reports = full_report(&tsallis_fn(3), &Alpha::from_u64(3), &spec, prec());
        assert!(all_passed(&reports));

        let perturbed = Perturbed::new(Arc::new(tsallis_fn(3)), v("1/2,1/2"), r("1/100"));
        let reports = full_report(&perturbed, &Alpha::from_u64(3), &spec, prec());
        assert!(!all_passed(&reports));
        assert_eq!(reports[0].axiom, "pairwise-additivity");
        assert_eq!(reports[0].verdict, Verdict::Fail);
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = SampleSpec::new(4, 3, 40, 99);
        let a = full_report(&tsallis_fn(2), &Alpha::from_u64(2), &spec, prec());
        let b = full_report(&tsallis_fn(2), &Alpha::from_u64(2), &spec, prec());
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
