//! Stochastic vectors with exact rational components and the structural
//! operations every axiom instance is built from.
//!
//! A [`StochasticVector`] is an element of the simplex Δₙ: finitely many
//! nonnegative rationals summing to exactly one. All operations are exact
//! and return fresh values; nothing here ever rounds.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplexError {
    #[error("vector must have at least one component")]
    Empty,
    #[error("component {index} is negative: {value}")]
    NegativeComponent { index: usize, value: String },
    #[error("components must sum to 1, got {sum}")]
    NotNormalized { sum: String },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("adjacent pair at index {index} has zero mass")]
    ZeroMass { index: usize },
    #[error("expected {expected} conditional vectors, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("conditional vector {index} is invalid: {source}")]
    InvalidConditional {
        index: usize,
        source: Box<SimplexError>,
    },
    #[error("not a permutation of 0..{len}: {perm:?}")]
    InvalidPermutation { len: usize, perm: Vec<usize> },
    #[error("cannot parse rational token {token:?}")]
    ParseToken { token: String },
}

/// An element of Δₙ: nonnegative rationals summing to exactly 1.
///
/// Equality is componentwise exact rational equality with no reordering;
/// symmetry is a property under test, never an identification.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StochasticVector {
    components: Vec<Rational>,
}

impl StochasticVector {
    /// Validates and wraps a sequence of rationals as a stochastic vector.
    pub fn from_rationals(values: Vec<Rational>) -> Result<Self, SimplexError> {
        if values.is_empty() {
            return Err(SimplexError::Empty);
        }
        for (index, v) in values.iter().enumerate() {
            if v.is_negative() {
                return Err(SimplexError::NegativeComponent {
                    index,
                    value: v.to_string(),
                });
            }
        }
        let sum: Rational = values.iter().sum();
        if !sum.is_one() {
            return Err(SimplexError::NotNormalized {
                sum: sum.to_string(),
            });
        }
        Ok(Self { components: values })
    }

    /// The uniform vector (1/n, ..., 1/n).
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform vector needs n >= 1");
        let p = Rational::new(BigInt::one(), BigInt::from(n));
        Self {
            components: vec![p; n],
        }
    }

    /// The one-point vector (1).
    pub fn point() -> Self {
        Self {
            components: vec![Rational::one()],
        }
    }

    /// Builds a vector from integer numerators over a common denominator.
    /// Panics if the numerators do not sum to the denominator.
    pub fn from_numerators(numerators: &[u64], denominator: u64) -> Self {
        let vals: Vec<Rational> = numerators
            .iter()
            .map(|&a| Rational::new(BigInt::from(a), BigInt::from(denominator)))
            .collect();
        Self::from_rationals(vals).expect("numerators must sum to the denominator")
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: length >= 1
    }

    pub fn components(&self) -> &[Rational] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Rational {
        &self.components[i]
    }

    /// Appends an exact zero component, per the expansibility axiom shape.
    pub fn append_zero(&self) -> Self {
        let mut components = self.components.clone();
        components.push(Rational::zero());
        Self { components }
    }

    /// Replaces components j and j+1 by their sum (0-based j).
    pub fn merge_adjacent(&self, j: usize) -> Result<Self, SimplexError> {
        let n = self.len();
        if n < 2 || j > n - 2 {
            return Err(SimplexError::IndexOutOfRange { index: j, len: n });
        }
        let mut components = Vec::with_capacity(n - 1);
        components.extend_from_slice(&self.components[..j]);
        components.push(&self.components[j] + &self.components[j + 1]);
        components.extend_from_slice(&self.components[j + 2..]);
        Ok(Self { components })
    }

    /// The conditional pair (p_j/s, p_{j+1}/s) with s = p_j + p_{j+1}.
    pub fn conditional_pair(&self, j: usize) -> Result<Self, SimplexError> {
        let n = self.len();
        if n < 2 || j > n - 2 {
            return Err(SimplexError::IndexOutOfRange { index: j, len: n });
        }
        let s = &self.components[j] + &self.components[j + 1];
        if s.is_zero() {
            return Err(SimplexError::ZeroMass { index: j });
        }
        Ok(Self {
            components: vec![&self.components[j] / &s, &self.components[j + 1] / &s],
        })
    }

    /// Mass of the adjacent pair at j: p_j + p_{j+1}.
    pub fn pair_mass(&self, j: usize) -> Result<Rational, SimplexError> {
        let n = self.len();
        if n < 2 || j > n - 2 {
            return Err(SimplexError::IndexOutOfRange { index: j, len: n });
        }
        Ok(&self.components[j] + &self.components[j + 1])
    }

    /// Reorders components: result component i is input component perm[i].
    pub fn permute(&self, perm: &[usize]) -> Result<Self, SimplexError> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(SimplexError::InvalidPermutation {
                len: n,
                perm: perm.to_vec(),
            });
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(SimplexError::InvalidPermutation {
                    len: n,
                    perm: perm.to_vec(),
                });
            }
            seen[p] = true;
        }
        Ok(Self {
            components: perm.iter().map(|&p| self.components[p].clone()).collect(),
        })
    }

    /// Graded-lexicographic comparison: by length first, then componentwise.
    pub fn graded_lex_cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.components.cmp(&other.components))
    }
}

impl serde::Serialize for StochasticVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for StochasticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl fmt::Display for StochasticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn parse_rational_token(token: &str) -> Result<Rational, SimplexError> {
    let bad = || SimplexError::ParseToken {
        token: token.to_string(),
    };
    if let Some((num, den)) = token.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    } else if let Some((int_part, frac_part)) = token.split_once('.') {
        // decimal literal, parsed exactly
        let digits: String = format!("{int_part}{frac_part}");
        let n = BigInt::from_str(digits.trim()).map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac_part.trim().len() as u32);
        Ok(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(token.trim()).map_err(|_| bad())?;
        Ok(Rational::from(n))
    }
}

/// Parses a single rational from the textual format: `a/b`, integer, or
/// decimal literal (parsed exactly).
pub fn parse_rational(s: &str) -> Result<Rational, SimplexError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    parse_rational_token(&compact)
}

impl FromStr for StochasticVector {
    type Err = SimplexError;

    /// Textual vector format: comma-separated `a/b` or integer tokens,
    /// whitespace ignored, e.g. `1/2,1/4,1/4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let values = compact
            .split(',')
            .map(parse_rational_token)
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rationals(values)
    }
}

/// A grouped refinement of an outer vector: block i sums to outer
/// component i, and the concatenation of all blocks is itself a valid
/// stochastic vector. This is the shape of the grouped-outcome additivity
/// axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedVector {
    outer: StochasticVector,
    blocks: Vec<Vec<Rational>>,
}

impl NestedVector {
    /// Builds the nested vector with blocks p_i * conditional_i.
    ///
    /// `conditionals` carries one vector per *positive* outer component, in
    /// order; zero outer components take a placeholder block `[0]` and
    /// consume no conditional.
    pub fn compose(
        outer: &StochasticVector,
        conditionals: &[StochasticVector],
    ) -> Result<Self, SimplexError> {
        let positive = outer.components().iter().filter(|p| !p.is_zero()).count();
        if conditionals.len() != positive {
            return Err(SimplexError::ArityMismatch {
                expected: positive,
                got: conditionals.len(),
            });
        }
        let mut blocks = Vec::with_capacity(outer.len());
        let mut next = 0usize;
        for p in outer.components() {
            if p.is_zero() {
                blocks.push(vec![Rational::zero()]);
            } else {
                let cond = &conditionals[next];
                next += 1;
                blocks.push(cond.components().iter().map(|q| p * q).collect());
            }
        }
        Ok(Self {
            outer: outer.clone(),
            blocks,
        })
    }

    /// Reassembles a nested vector from a flattening and block sizes.
    /// Block sizes must sum to the flattening's length.
    pub fn from_flat(
        flat: &StochasticVector,
        block_sizes: &[usize],
    ) -> Result<Self, SimplexError> {
        let total: usize = block_sizes.iter().sum();
        if total != flat.len() || block_sizes.iter().any(|&m| m == 0) {
            return Err(SimplexError::ArityMismatch {
                expected: flat.len(),
                got: total,
            });
        }
        let mut blocks = Vec::with_capacity(block_sizes.len());
        let mut outer = Vec::with_capacity(block_sizes.len());
        let mut pos = 0usize;
        for &m in block_sizes {
            let block: Vec<Rational> = flat.components()[pos..pos + m].to_vec();
            outer.push(block.iter().sum());
            blocks.push(block);
            pos += m;
        }
        Ok(Self {
            outer: StochasticVector::from_rationals(outer)?,
            blocks,
        })
    }

    pub fn outer(&self) -> &StochasticVector {
        &self.outer
    }

    pub fn blocks(&self) -> &[Vec<Rational>] {
        &self.blocks
    }

    /// Concatenates all blocks into a single stochastic vector.
    pub fn flatten(&self) -> StochasticVector {
        let components: Vec<Rational> = self.blocks.iter().flatten().cloned().collect();
        StochasticVector::from_rationals(components)
            .expect("blocks sum to outer components, which sum to 1")
    }

    /// The conditional vector of block i, or `None` when the outer
    /// component is zero (the quotient p_{i,j}/p_i is undefined there and
    /// the additivity term is defined as 0).
    pub fn conditional(&self, i: usize) -> Option<StochasticVector> {
        let p = self.outer.component(i);
        if p.is_zero() {
            return None;
        }
        let components: Vec<Rational> = self.blocks[i].iter().map(|q| q / p).collect();
        Some(StochasticVector::from_rationals(components).expect("block i sums to p_i"))
    }
}
