//! The proof machinery behind the characterization, as executable
//! identities: the two-point relation, the interval map f with its orbits
//! and denominator descent, the symmetry-defect recursion, inductive
//! reconstruction from two-component data, and the rational-grid
//! reconstruction route.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::functionals::{EntropyFunctional, FunctionalRef};
use crate::simplex::{Rational, StochasticVector};
use crate::value::{
    pow_alpha, pow_exp_f64, pow_exp_rational, Alpha, EntropyValue, Precision,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("p = {0} outside [1/2, 1]")]
    Domain(String),
    #[error("orbit did not reach 1 within {0} steps")]
    StepLimitExceeded(usize),
    #[error("merge strategies disagree at {vector}: {left} vs {right}")]
    AmbiguousReconstruction {
        vector: String,
        left: String,
        right: String,
    },
    #[error("alpha = 1 is the Shannon branch; this operation requires alpha != 1")]
    AlphaIsOne,
    #[error("uniform ratio needs m, n >= 2, got m={m}, n={n}")]
    RatioArgs { m: u64, n: u64 },
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

fn two_thirds() -> Rational {
    Rational::new(BigInt::from(2), BigInt::from(3))
}

fn pair(p: &Rational) -> StochasticVector {
    let q = Rational::one() - p;
    StochasticVector::from_rationals(vec![p.clone(), q]).expect("p in [0, 1]")
}

fn swapped_pair(p: &Rational) -> StochasticVector {
    let q = Rational::one() - p;
    StochasticVector::from_rationals(vec![q, p.clone()]).expect("p in [0, 1]")
}

/// Residual of the two-point relation
/// (1 - 3·2^{-α}) F(p, 1-p) + 2^{-α} F(1-p, p) = F(1/2,1/2)(1 - p^α - (1-p)^α).
/// Zero for any functional satisfying pairwise additivity.
pub fn lemma1_residual(
    f: &dyn EntropyFunctional,
    alpha: &Alpha,
    p: &Rational,
    prec: Precision,
) -> EntropyValue {
    assert!(!p.is_negative() && *p <= Rational::one(), "p must be in [0, 1]");
    let v = pair(p);
    let w = swapped_pair(p);
    let uniform2 = StochasticVector::uniform(2);

    let two_neg_alpha = pow_alpha(&half(), alpha, prec); // 2^{-alpha}
    let one = EntropyValue::from_rational(Rational::one());
    let three = EntropyValue::from_rational(Rational::from(BigInt::from(3)));
    let coeff = &one - &(&three * &two_neg_alpha); // 1 - 3·2^{-alpha}

    let lhs = &(&coeff * &f.eval(&v)) + &(&two_neg_alpha * &f.eval(&w));
    let q = Rational::one() - p;
    let weight = &(&one - &pow_alpha(p, alpha, prec)) - &pow_alpha(&q, alpha, prec);
    let rhs = &f.eval(&uniform2) * &weight;
    &lhs - &rhs
}

/// Residual of the α=2 specialization
/// F(p, 1-p) + F(1-p, p) = 4 F(1/2,1/2)(1 - p² - (1-p)²).
pub fn alpha2_sum_residual(
    f: &dyn EntropyFunctional,
    p: &Rational,
    prec: Precision,
) -> EntropyValue {
    let alpha = Alpha::from_u64(2);
    let v = pair(p);
    let w = swapped_pair(p);
    let uniform2 = StochasticVector::uniform(2);
    let one = EntropyValue::from_rational(Rational::one());
    let four = Rational::from(BigInt::from(4));
    let q = Rational::one() - p;
    let weight = &(&one - &pow_alpha(p, &alpha, prec)) - &pow_alpha(&q, &alpha, prec);
    let lhs = &f.eval(&v) + &f.eval(&w);
    let rhs = &f.eval(&uniform2).scale(&four) * &weight;
    &lhs - &rhs
}

/// The interval map f(p) = max{(1-p)/p, 1 - (1-p)/p} on [1/2, 1].
pub fn f_map(p: &Rational) -> Result<Rational, CharError> {
    if *p < half() || *p > Rational::one() {
        return Err(CharError::Domain(p.to_string()));
    }
    let ratio = (Rational::one() - p) / p;
    let complement = Rational::one() - &ratio;
    Ok(ratio.max(complement))
}

/// The symmetry defect D(p) = |F(p, 1-p) - F(1-p, p)| for p in [1/2, 1].
pub fn symmetry_defect(
    f: &dyn EntropyFunctional,
    p: &Rational,
) -> EntropyValue {
    assert!(
        *p >= half() && *p <= Rational::one(),
        "symmetry defect needs p in [1/2, 1]"
    );
    (&f.eval(&pair(p)) - &f.eval(&swapped_pair(p))).abs()
}

/// The iterated sequence p, f(p), f∘f(p), ... together with denominator
/// and hitting-interval bookkeeping.
///
/// The hitting set is the CLOSED interval [1/2, 2/3]: orbits of the
/// exceptional family k/(k+1) pass through exactly 2/3 and 1/2 without
/// entering the open interval, and the trace records both notions.
#[derive(Clone, Debug)]
pub struct OrbitTrace {
    pub start: Rational,
    pub points: Vec<Rational>,
    pub denominators: Vec<BigInt>,
    /// First index with a point in the closed interval [1/2, 2/3].
    pub hit_index: Option<usize>,
    /// Whether any point lies in the open interval (1/2, 2/3).
    pub entered_open_interval: bool,
    pub reached_one: bool,
}

impl OrbitTrace {
    /// CSV rows: step, value `a/b`, denominator, in_closed_hitting_set,
    /// in_open_interval.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,value,denominator,in_closed_hitting_set,in_open_interval\n");
        for (i, p) in self.points.iter().enumerate() {
            let closed = in_closed_hitting_set(p);
            let open = in_open_interval(p);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i,
                p,
                self.denominators[i],
                u8::from(closed),
                u8::from(open)
            ));
        }
        out
    }
}

fn in_closed_hitting_set(p: &Rational) -> bool {
    *p >= half() && *p <= two_thirds()
}

fn in_open_interval(p: &Rational) -> bool {
    *p > half() && *p < two_thirds()
}

/// Iterates f from p until the value 1 is reached or `max_steps` map
/// applications are exhausted. For rational p = a/b the denominators
/// strictly decrease until 1 is reached, so max_steps >= b always
/// terminates.
pub fn orbit(p: &Rational, max_steps: usize) -> Result<OrbitTrace, CharError> {
    if *p < half() || *p > Rational::one() {
        return Err(CharError::Domain(p.to_string()));
    }
    let mut points = vec![p.clone()];
    let mut current = p.clone();
    let mut steps = 0usize;
    while !current.is_one() {
        if steps >= max_steps {
            return Err(CharError::StepLimitExceeded(max_steps));
        }
        current = f_map(&current).expect("f maps [1/2,1] into itself");
        points.push(current.clone());
        steps += 1;
    }
    let denominators: Vec<BigInt> = points.iter().map(|q| q.denom().clone()).collect();
    let hit_index = points.iter().position(in_closed_hitting_set);
    let entered_open_interval = points.iter().any(in_open_interval);
    Ok(OrbitTrace {
        start: p.clone(),
        points,
        denominators,
        hit_index,
        entered_open_interval,
        reached_one: true,
    })
}

/// Residual of the defect product recursion
/// D(p) = (∏_{k=1}^n f^∘k(p))² · D(f^∘n(p)).
/// Zero for any functional satisfying pairwise additivity with α = 2.
pub fn defect_recursion_residual(
    f: &dyn EntropyFunctional,
    p: &Rational,
    n: usize,
    prec: Precision,
) -> EntropyValue {
    assert!(n >= 1, "recursion depth must be >= 1");
    let _ = prec;
    let lhs = symmetry_defect(f, p);
    let mut product = Rational::one();
    let mut iterate = p.clone();
    for _ in 0..n {
        iterate = f_map(&iterate).expect("f maps [1/2,1] into itself");
        product *= &iterate;
    }
    let rhs = symmetry_defect(f, &iterate).scale(&(&product * &product));
    &lhs - &rhs
}

/// H restricted to Δ₁ ∪ Δ₂: the base data the induction rebuilds from.
/// The value at (1) is pinned to 0.
pub struct Delta2Restriction {
    eval: Box<dyn Fn(&StochasticVector) -> EntropyValue + Send + Sync>,
}

impl Delta2Restriction {
    pub fn new(
        eval: impl Fn(&StochasticVector) -> EntropyValue + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Box::new(eval),
        }
    }

    /// Restriction of a full functional to Δ₂.
    pub fn from_functional(f: FunctionalRef) -> Self {
        Self::new(move |v| f.eval(v))
    }

    /// Total on Δ₁ ∪ Δ₂; (1) evaluates to exactly 0.
    pub fn eval(&self, v: &StochasticVector) -> EntropyValue {
        assert!(v.len() <= 2, "Delta2Restriction domain is Δ₁ ∪ Δ₂");
        if v.len() == 1 {
            return EntropyValue::zero();
        }
        (self.eval)(v)
    }
}

/// Order in which adjacent pairs are merged during reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MergeStrategy {
    LeftmostFirst,
    RightmostFirst,
    LargestMassFirst,
    /// Evaluates all three orders and demands agreement.
    Consistent,
}

fn pick_merge_index(v: &StochasticVector, strategy: MergeStrategy) -> usize {
    let n = v.len();
    match strategy {
        MergeStrategy::LeftmostFirst => 0,
        MergeStrategy::RightmostFirst => n - 2,
        MergeStrategy::LargestMassFirst => {
            let mut best = 0usize;
            let mut best_mass = v.pair_mass(0).expect("n >= 2");
            for j in 1..n - 1 {
                let mass = v.pair_mass(j).expect("valid j");
                if mass > best_mass {
                    best = j;
                    best_mass = mass;
                }
            }
            best
        }
        MergeStrategy::Consistent => unreachable!("resolved by caller"),
    }
}

fn reconstruct_single(
    base: &Delta2Restriction,
    alpha: &Alpha,
    v: &StochasticVector,
    strategy: MergeStrategy,
    prec: Precision,
) -> EntropyValue {
    if v.len() <= 2 {
        return base.eval(v);
    }
    let j = pick_merge_index(v, strategy);
    let s = v.pair_mass(j).expect("valid j");
    let merged = v.merge_adjacent(j).expect("valid j");
    // zero-mass pairs merge freely with a vanishing additivity term
    let term = if s.is_zero() {
        EntropyValue::zero()
    } else {
        let cond = v.conditional_pair(j).expect("s > 0");
        &pow_alpha(&s, alpha, prec) * &base.eval(&cond)
    };
    &reconstruct_single(base, alpha, &merged, strategy, prec) + &term
}

/// Rebuilds H(v) from its Δ₂ restriction by repeatedly applying the
/// pairwise additivity identity until only Δ₁ remains. With the
/// `Consistent` strategy all three merge orders are evaluated and must
/// agree (exactly in exact mode, within the float tolerance otherwise).
pub fn reconstruct_from_pairs(
    base: &Delta2Restriction,
    alpha: &Alpha,
    v: &StochasticVector,
    strategy: MergeStrategy,
    prec: Precision,
) -> Result<EntropyValue, CharError> {
    if strategy != MergeStrategy::Consistent {
        return Ok(reconstruct_single(base, alpha, v, strategy, prec));
    }
    let left = reconstruct_single(base, alpha, v, MergeStrategy::LeftmostFirst, prec);
    for other in [MergeStrategy::RightmostFirst, MergeStrategy::LargestMassFirst] {
        let candidate = reconstruct_single(base, alpha, v, other, prec);
        let diff = &left - &candidate;
        let disagrees = match diff.exact() {
            Some(r) => !r.is_zero(),
            None => diff.approx().abs() > crate::axioms::FLOAT_TOLERANCE,
        };
        if disagrees {
            return Err(CharError::AmbiguousReconstruction {
                vector: v.to_string(),
                left: left.to_string(),
                right: candidate.to_string(),
            });
        }
    }
    Ok(left)
}

fn uniform_ratio_unchecked(
    alpha: &Alpha,
    m: u64,
    n: u64,
    prec: Precision,
) -> EntropyValue {
    // (1 - m^{1-alpha}) / (1 - n^{1-alpha})
    let one = EntropyValue::from_rational(Rational::one());
    let power = |k: u64| -> EntropyValue {
        let base = Rational::from(BigInt::from(k));
        match alpha.exact() {
            Some(a) => pow_exp_rational(&base, &(Rational::one() - a), prec),
            None => pow_exp_f64(&base, 1.0 - alpha.approx(), prec),
        }
    };
    let num = &one - &power(m);
    let den = &one - &power(n);
    match (num.exact(), den.exact()) {
        (Some(a), Some(b)) => EntropyValue::from_rational(a / b),
        _ => EntropyValue::from_f64(num.approx() / den.approx()),
    }
}

/// The uniform-vector ratio (1 - m^{1-α})/(1 - n^{1-α}) relating
/// H(1/m,...,1/m) to H(1/n,...,1/n) under generalized additivity.
pub fn rational_uniform_ratio(
    alpha: &Alpha,
    m: u64,
    n: u64,
    prec: Precision,
) -> Result<EntropyValue, CharError> {
    if alpha.is_one() {
        return Err(CharError::AlphaIsOne);
    }
    if m < 2 || n < 2 {
        return Err(CharError::RatioArgs { m, n });
    }
    Ok(uniform_ratio_unchecked(alpha, m, n, prec))
}

/// Computes H(p₁,...,pₙ) by the rational-grid proof route: common
/// denominator b, the refinement identity through H(1/(b·n),...), and the
/// uniform-vector ratios. Deliberately avoids the closed form, so that
/// agreement with it is evidence rather than tautology.
pub fn rational_reconstruct(
    alpha: &Alpha,
    v: &StochasticVector,
    c: &EntropyValue,
    prec: Precision,
) -> Result<EntropyValue, CharError> {
    if alpha.is_one() {
        return Err(CharError::AlphaIsOne);
    }
    let n = v.len() as u64;
    if n == 1 {
        return Ok(EntropyValue::zero());
    }
    // write p_i = a_i / b over the least common denominator
    let b = v
        .components()
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let numerators: Vec<BigInt> = v
        .components()
        .iter()
        .map(|p| p.numer() * &b / p.denom())
        .collect();
    let b = b.to_u64().expect("grid denominators fit in u64");

    // H(uniform(n)) = c * ratio(n, 2)
    let h_uniform_n = c * &uniform_ratio_unchecked(alpha, n, 2, prec);

    // bracket = 1 + n^{1-alpha} * ratio(b, n) - sum p_i^alpha * ratio(a_i*n, n)
    let one = EntropyValue::from_rational(Rational::one());
    let n_rat = Rational::from(BigInt::from(n));
    let n_pow = match alpha.exact() {
        Some(a) => pow_exp_rational(&n_rat, &(Rational::one() - a), prec),
        None => pow_exp_f64(&n_rat, 1.0 - alpha.approx(), prec),
    };
    let mut bracket = &one + &(&n_pow * &uniform_ratio_unchecked(alpha, b, n, prec));
    for (p, a) in v.components().iter().zip(&numerators) {
        if p.is_zero() {
            continue;
        }
        let a = a.to_u64().expect("numerators fit in u64");
        let ratio = uniform_ratio_unchecked(alpha, a * n, n, prec);
        bracket = &bracket - &(&pow_alpha(p, alpha, prec) * &ratio);
    }
    Ok(&h_uniform_n * &bracket)
}
