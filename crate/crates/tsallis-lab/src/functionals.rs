//! Entropy functionals: Tsallis, Shannon, the closed forms, and the
//! tabulated / perturbed wrappers used as counterexample candidates.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::simplex::{parse_rational, Rational, SimplexError, StochasticVector};
use crate::value::{
    ln_rational, log2_rational, pow_alpha, rational_to_f64, two_pow_one_minus_alpha, Alpha,
    EntropyValue, Precision, ValueError,
};

#[derive(Debug, Error)]
pub enum FunctionalError {
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("cannot read table file: {0}")]
    Io(#[from] std::io::Error),
    #[error("table line {line}: expected `vector ; value`, got {content:?}")]
    TableFormat { line: usize, content: String },
}

/// An evaluatable candidate H: Δ → values.
///
/// Evaluation must be deterministic: the same vector always yields the same
/// value. Implementations are immutable after construction and safe for
/// concurrent evaluation.
pub trait EntropyFunctional: Send + Sync {
    fn name(&self) -> String;

    /// The declared alpha, when the functional has one.
    fn alpha(&self) -> Option<Alpha> {
        None
    }

    fn eval(&self, v: &StochasticVector) -> EntropyValue;
}

/// Shared handle to a functional.
pub type FunctionalRef = Arc<dyn EntropyFunctional>;

fn is_deterministic(v: &StochasticVector) -> bool {
    v.components().iter().all(|p| p.is_zero() || p.is_one())
}

/// Sum of p_i^alpha over the components, exact whenever possible.
pub fn power_sum(v: &StochasticVector, alpha: &Alpha, prec: Precision) -> EntropyValue {
    let mut acc = EntropyValue::zero();
    for p in v.components() {
        acc = &acc + &pow_alpha(p, alpha, prec);
    }
    acc
}

/// Tsallis entropy (1 - Σ p_i^α)/(α - 1); requires alpha != 1.
pub fn tsallis(
    v: &StochasticVector,
    alpha: &Alpha,
    prec: Precision,
) -> Result<EntropyValue, ValueError> {
    if alpha.is_one() {
        return Err(ValueError::AlphaIsOne);
    }
    let one = EntropyValue::from_rational(Rational::one());
    let num = &one - &power_sum(v, alpha, prec);
    Ok(match alpha.exact() {
        Some(a) => num.div_rational(&(a - Rational::one())),
        None => EntropyValue::from_f64(num.approx() / (alpha.approx() - 1.0)),
    })
}

/// Shannon entropy -Σ p_i ln p_i, with 0 ln 0 = 0.
pub fn shannon(v: &StochasticVector, prec: Precision) -> EntropyValue {
    if is_deterministic(v) {
        return EntropyValue::zero();
    }
    let mut acc = 0.0f64;
    for p in v.components() {
        if !p.is_zero() {
            acc -= rational_to_f64(p) * ln_rational(p, prec);
        }
    }
    EntropyValue::from_f64(acc)
}

/// The closed forms parametrized by c, the intended value at (1/2, 1/2):
/// c·(1-Σp_i^α)/(1-2^{1-α}) for α ∉ {1,2}, 2c(1-Σp_i²) for α = 2, and
/// -c·Σ p_i log₂ p_i for α = 1.
pub fn closed_form(
    v: &StochasticVector,
    alpha: &Alpha,
    c: &EntropyValue,
    prec: Precision,
) -> EntropyValue {
    if alpha.is_one() {
        if is_deterministic(v) {
            return EntropyValue::zero();
        }
        let mut acc = 0.0f64;
        for p in v.components() {
            if !p.is_zero() {
                acc += rational_to_f64(p) * log2_rational(p, prec);
            }
        }
        return EntropyValue::from_f64(-c.approx() * acc);
    }
    let one = EntropyValue::from_rational(Rational::one());
    let num = &one - &power_sum(v, alpha, prec);
    if alpha.as_positive_integer() == Some(2) {
        let two = Rational::from(BigInt::from(2));
        return &c.scale(&two) * &num;
    }
    let denom = &one - &two_pow_one_minus_alpha(alpha, prec);
    match (num.exact(), denom.exact(), c.exact()) {
        (Some(n), Some(d), Some(cr)) => EntropyValue::from_rational(cr * n / d),
        _ => EntropyValue::from_f64(c.approx() * num.approx() / denom.approx()),
    }
}

/// Tsallis entropy functional for a fixed alpha != 1.
pub struct Tsallis {
    alpha: Alpha,
    prec: Precision,
}

impl Tsallis {
    pub fn new(alpha: Alpha, prec: Precision) -> Result<Self, FunctionalError> {
        if alpha.is_one() {
            return Err(ValueError::AlphaIsOne.into());
        }
        Ok(Self { alpha, prec })
    }
}

impl EntropyFunctional for Tsallis {
    fn name(&self) -> String {
        format!("tsallis(alpha={})", self.alpha)
    }

    fn alpha(&self) -> Option<Alpha> {
        Some(self.alpha.clone())
    }

    fn eval(&self, v: &StochasticVector) -> EntropyValue {
        tsallis(v, &self.alpha, self.prec).expect("alpha != 1 by construction")
    }
}

/// Shannon entropy functional (natural logarithm).
pub struct Shannon {
    prec: Precision,
}

impl Shannon {
    pub fn new(prec: Precision) -> Self {
        Self { prec }
    }
}

impl EntropyFunctional for Shannon {
    fn name(&self) -> String {
        "shannon".to_string()
    }

    fn alpha(&self) -> Option<Alpha> {
        Some(Alpha::from_u64(1))
    }

    fn eval(&self, v: &StochasticVector) -> EntropyValue {
        shannon(v, self.prec)
    }
}

/// The closed-form family with multiplicative constant c = H(1/2, 1/2).
pub struct ClosedForm {
    alpha: Alpha,
    c: EntropyValue,
    prec: Precision,
}

impl ClosedForm {
    pub fn new(alpha: Alpha, c: EntropyValue, prec: Precision) -> Self {
        Self { alpha, c, prec }
    }
}

impl EntropyFunctional for ClosedForm {
    fn name(&self) -> String {
        format!("closed-form(alpha={}, c={})", self.alpha, self.c)
    }

    fn alpha(&self) -> Option<Alpha> {
        Some(self.alpha.clone())
    }

    fn eval(&self, v: &StochasticVector) -> EntropyValue {
        closed_form(v, &self.alpha, &self.c, self.prec)
    }
}

/// Table lookup with fallback; the carrier for counterexample candidates.
pub struct Tabulated {
    table: HashMap<StochasticVector, EntropyValue>,
    fallback: FunctionalRef,
}

impl Tabulated {
    pub fn new(
        entries: impl IntoIterator<Item = (StochasticVector, EntropyValue)>,
        fallback: FunctionalRef,
    ) -> Self {
        Self {
            table: entries.into_iter().collect(),
            fallback,
        }
    }

    /// Loads entries from a text file: one `vector ; value` line per entry,
    /// the vector in the comma-separated rational format and the value as a
    /// rational `a/b` or decimal literal. Blank lines and `#` comments are
    /// skipped.
    pub fn from_file(path: &Path, fallback: FunctionalRef) -> Result<Self, FunctionalError> {
        let text = fs::read_to_string(path)?;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((vec_part, val_part)) = line.split_once(';') else {
                return Err(FunctionalError::TableFormat {
                    line: i + 1,
                    content: raw.to_string(),
                });
            };
            let v: StochasticVector = vec_part.parse()?;
            let value = EntropyValue::from_rational(parse_rational(val_part)?);
            entries.push((v, value));
        }
        Ok(Self::new(entries, fallback))
    }
}

impl EntropyFunctional for Tabulated {
    fn name(&self) -> String {
        format!("tabulated({} entries, fallback {})", self.table.len(), self.fallback.name())
    }

    fn alpha(&self) -> Option<Alpha> {
        self.fallback.alpha()
    }

    fn eval(&self, v: &StochasticVector) -> EntropyValue {
        match self.table.get(v) {
            Some(value) => value.clone(),
            None => self.fallback.eval(v),
        }
    }
}

/// A functional equal to `base` everywhere except at one vector, where the
/// value is shifted by `delta`. Negative-test generator.
pub struct Perturbed {
    base: FunctionalRef,
    at: StochasticVector,
    delta: Rational,
}

impl Perturbed {
    pub fn new(base: FunctionalRef, at: StochasticVector, delta: Rational) -> Self {
        Self { base, at, delta }
    }
}

impl EntropyFunctional for Perturbed {
    fn name(&self) -> String {
        format!("perturb({} at {} by {})", self.base.name(), self.at, self.delta)
    }

    fn alpha(&self) -> Option<Alpha> {
        self.base.alpha()
    }

    fn eval(&self, v: &StochasticVector) -> EntropyValue {
        let base = self.base.eval(v);
        if *v == self.at {
            &base + &EntropyValue::from_rational(self.delta.clone())
        } else {
            base
        }
    }
}

/// A functional defined by an arbitrary closure; test scaffolding for
/// hand-built candidates.
pub struct FnFunctional {
    name: String,
    alpha: Option<Alpha>,
    f: Box<dyn Fn(&StochasticVector) -> EntropyValue + Send + Sync>,
}

impl FnFunctional {
    pub fn new(
        name: impl Into<String>,
        alpha: Option<Alpha>,
        f: impl Fn(&StochasticVector) -> EntropyValue + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            alpha,
            f: Box::new(f),
        }
    }
}

impl EntropyFunctional for FnFunctional {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn alpha(&self) -> Option<Alpha> {
        self.alpha.clone()
    }

    fn eval(&self, v: &StochasticVector) -> EntropyValue {
        (self.f)(v)
    }
}
