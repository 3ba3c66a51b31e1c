use cilab::fields::*;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn commutator_slopes_match_two_alpha_minus_one() {
    for alpha in [0.6, 0.75, 0.9] {
        let fit = commutator_exponent(alpha, &commutator::default_scales(), 7).unwrap();
        let target = 2.0 * alpha - 1.0;
        assert!((fit.slope - target).abs() <= 0.15, "alpha {alpha}: slope {}", fit.slope);
    }
}

#[test]
fn l2_of_sine_converges() {
    let g = Grid::periodic(2, 256, 1.0).unwrap();
    let f = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
    assert!((discrete_norms(&f).l2 - 0.5f64.sqrt()).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_is_idempotent(seed in 0u64..1000) {
        let g = Grid::periodic(2, 16, 1.0).unwrap();
        let s = seed as f64;
        let w = VectorField::from_fn(g, |x, y, _| {
            [(2.0 * PI * (x + 0.3 * s)).sin() * (4.0 * PI * y).cos() + s.sin(),
             (2.0 * PI * (2.0 * x - y + s)).cos()]
        });
        let p = solenoidal_project(&w).unwrap();
        let pp = solenoidal_project(&p).unwrap();
        for c in 0..2 {
            for (a, b) in p.comps[c].iter().zip(&pp.comps[c]) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pullback_is_psd(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let g = Grid::periodic(2, 16, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x, y, _| {
            [a * (2.0 * PI * x).sin() + y, b * (2.0 * PI * y).cos(), c * (2.0 * PI * (x + y)).sin()]
        });
        let m = pullback_metric(&u).unwrap();
        for i in 0..g.len() {
            let e = m.at(i);
            prop_assert!(sym2_eigs(e[0], e[1], e[2]).0 >= -1e-10);
        }
    }

    #[test]
    fn mollify_commutes_with_cell_shifts(shift in 0usize..32, seed in 0u64..100) {
        let g = Grid::periodic(2, 32, 1.0).unwrap();
        let s = seed as f64;
        let f = ScalarField::from_fn(g, |x, y, _| ((7.0 * x + s).sin() * (3.0 * y).cos() + x * y).sin());
        let n = g.resolution;
        let shifted = ScalarField::new(
            g,
            (0..g.len()).map(|i| f.values[(i % n + shift) % n + n * (i / n)]).collect(),
        )
        .unwrap();
        let k = Kernel::quartic();
        let a = mollify(&f, 0.1, &k).unwrap().field;
        let b = mollify(&shifted, 0.1, &k).unwrap().field;
        for i in 0..g.len() {
            let j = (i % n + shift) % n + n * (i / n);
            prop_assert_eq!(b.values[i], a.values[j]);
        }
    }
}
