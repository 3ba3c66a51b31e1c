use cilab::toy_ci::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn lemma_holds_to_twelve_steps() {
    let t = toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift: 0 }, 12).unwrap();
    assert!(lemma_bound_holds(&t));
    assert!(ratios_in_band(&t));
    assert!(averaged_defect_recursion_check(&t));
    assert_eq!(t.defects[1], rat(3, 4));
    assert_eq!(t.defects[2], rat(39, 64));
    assert!(t.defects.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn faster_schedule_keeps_the_bound() {
    let t = toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift: 3 }, 3).unwrap();
    assert!(lemma_bound_holds(&t));
    assert!(averaged_defect_recursion_check(&t));
}

#[test]
fn increments_and_table() {
    let t = toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift: 0 }, 8).unwrap();
    let inc = increment_norms(&t).unwrap();
    for r in &inc {
        assert_eq!(r.l1, &t.defects[r.k] / rat(2, 1));
        let scale = BigRational::from_integer(BigInt::from(r.lambda)) * &t.defects[r.k];
        assert!(r.tv <= &scale * rat(4, 1) && &r.tv * rat(4, 1) >= scale);
    }
    assert!(increment_norms(&toy_run(&PiecewiseConstantFn::zero(), &Schedule::Dyadic { shift: 0 }, 0).unwrap()).is_err());
}

fn start_strategy() -> impl Strategy<Value = (u32, Vec<i64>)> {
    (0u32..3).prop_flat_map(|m| (Just(m), prop::collection::vec(-999i64..=999, 1usize << m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_dyadic_starts((m, nums) in start_strategy()) {
        let pieces = 1i64 << m;
        let bps: Vec<BigRational> = (0..=pieces).map(|i| rat(i, pieces)).collect();
        let vals: Vec<BigRational> = nums.iter().map(|n| rat(*n, 1000)).collect();
        let u0 = PiecewiseConstantFn::new(bps, vals).unwrap();
        let t = toy_run(&u0, &Schedule::Dyadic { shift: m }, 4).unwrap();
        prop_assert!(averaged_defect_recursion_check(&t));
        for w in t.defects.windows(2) {
            // ratio lies in [3/4, 1 - D/4]: the per-piece factor is 1 - E/4 and ∫E² ≥ (∫E)²
            prop_assert!(w[1] < w[0]);
            prop_assert!(&w[1] * rat(4, 1) >= &w[0] * rat(3, 1));
            prop_assert!(w[1] <= &w[0] * (BigRational::one() - &w[0] / rat(4, 1)));
        }
        for s in &t.states {
            prop_assert!(s.sup_abs() < BigRational::one());
        }
        let inc = increment_norms(&t).unwrap();
        for r in &inc {
            prop_assert_eq!(&r.l1, &(&t.defects[r.k] / rat(2, 1)));
            prop_assert!(r.tv > BigRational::zero());
        }
    }
}
