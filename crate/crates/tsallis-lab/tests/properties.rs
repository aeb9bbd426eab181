//! Randomized structural properties of the simplex operations and the
//! entropy identities.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tsallis_lab::characterization::{f_map, lemma1_residual, orbit};
use tsallis_lab::functionals::{tsallis, Perturbed, Tsallis};
use tsallis_lab::simplex::{NestedVector, Rational, StochasticVector};
use tsallis_lab::value::{Alpha, Precision};

fn prec() -> Precision {
    Precision::default()
}

/// A stochastic vector from raw nonnegative numerators: (a_1, ..., a_n)
/// with positive sum S becomes (a_1/S, ..., a_n/S).
fn vector_strategy(max_len: usize) -> impl Strategy<Value = StochasticVector> {
    prop::collection::vec(0u64..=20, 1..=max_len)
        .prop_filter("needs positive mass", |nums| nums.iter().sum::<u64>() > 0)
        .prop_map(|nums| {
            let total: u64 = nums.iter().sum();
            StochasticVector::from_numerators(&nums, total)
        })
}

proptest! {
    #[test]
    fn merge_preserves_mass_and_conditionals_scale_back(
        v in vector_strategy(6),
        j_seed in 0usize..100,
    ) {
        prop_assume!(v.len() >= 2);
        let j = j_seed % (v.len() - 1);
        let merged = v.merge_adjacent(j).unwrap();
        prop_assert_eq!(merged.len(), v.len() - 1);
        let s = v.pair_mass(j).unwrap();
        prop_assert_eq!(merged.component(j), &s);
        if !s.is_zero() {
            let cond = v.conditional_pair(j).unwrap();
            prop_assert_eq!(&(cond.component(0) * &s), v.component(j));
            prop_assert_eq!(&(cond.component(1) * &s), v.component(j + 1));
        }
    }

    #[test]
    fn permutation_round_trip(v in vector_strategy(6)) {
        let n = v.len();
        // reversal is an involution
        let perm: Vec<usize> = (0..n).rev().collect();
        let there = v.permute(&perm).unwrap();
        let back = there.permute(&perm).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn arbitrary_permutation_invertible(
        v in vector_strategy(6),
        seed in any::<u64>(),
    ) {
        let n = v.len();
        // Fisher-Yates from the seed
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let j = (state >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let mut inverse = vec![0usize; n];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let there = v.permute(&perm).unwrap();
        let back = there.permute(&inverse).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn nested_flatten_preserves_mass(
        nums in prop::collection::vec(0u64..=9, 2..=9),
    ) {
        prop_assume!(nums.iter().sum::<u64>() > 0);
        let total: u64 = nums.iter().sum();
        let flat = StochasticVector::from_numerators(&nums, total);
        // split into two blocks
        let k = nums.len() / 2;
        let nested = NestedVector::from_flat(&flat, &[k, nums.len() - k]).unwrap();
        prop_assert_eq!(nested.flatten(), flat.clone());
        let outer_sum: Rational = nested.outer().components().iter().sum();
        prop_assert_eq!(outer_sum, Rational::one());
    }

    #[test]
    fn tsallis_is_permutation_invariant(
        v in vector_strategy(6),
        alpha in 2u64..=5,
    ) {
        let a = Alpha::from_u64(alpha);
        let perm: Vec<usize> = (0..v.len()).rev().collect();
        let w = v.permute(&perm).unwrap();
        let hv = tsallis(&v, &a, prec()).unwrap();
        let hw = tsallis(&w, &a, prec()).unwrap();
        prop_assert_eq!(hv.exact(), hw.exact());
    }

    #[test]
    fn closed_form_constant_links_to_two_point_uniform(alpha in 2u64..=6) {
        // the defining formula evaluated at (1/2, 1/2) is the constant the
        // closed form is normalized by
        let a = Alpha::from_u64(alpha);
        let c = tsallis(&StochasticVector::uniform(2), &a, prec()).unwrap();
        let expected = Rational::new(
            BigInt::one(),
            BigInt::from(alpha - 1),
        ) * (Rational::one() - Rational::new(BigInt::from(2), BigInt::from(2u64.pow(alpha as u32))));
        prop_assert_eq!(c.exact(), Some(&expected));
    }

    #[test]
    fn perturbations_are_detected(
        num in 1u64..=999_999,
    ) {
        // any rational bump delta >= 1e-9 at (1/4, 3/4) shows up in the
        // two-point relation residual at p = 1/4
        let delta = Rational::new(BigInt::from(num), BigInt::from(1_000_000_000u64));
        let a = Alpha::from_u64(3);
        let f = Perturbed::new(
            Arc::new(Tsallis::new(a.clone(), prec()).unwrap()),
            "1/4,3/4".parse().unwrap(),
            delta,
        );
        let p = Rational::new(BigInt::one(), BigInt::from(4));
        let res = lemma1_residual(&f, &a, &p, prec());
        prop_assert!(!res.exact().unwrap().is_zero());
    }

    #[test]
    fn orbit_descends_and_terminates(a in 1u64..=199, b in 2u64..=200) {
        prop_assume!(2 * a >= b && a <= b);
        let p = Rational::new(BigInt::from(a), BigInt::from(b));
        let trace = orbit(&p, b as usize).unwrap();
        prop_assert!(trace.reached_one);
        for w in trace.denominators.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        // one map application agrees with the trace
        if trace.points.len() > 1 {
            prop_assert_eq!(f_map(&p).unwrap(), trace.points[1].clone());
        }
    }
}
