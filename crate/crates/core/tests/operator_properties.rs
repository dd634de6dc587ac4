use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wlmean::harness::random_spd;
use wlmean::operator::{loewner_leq, op_weighted_geom, op_weighted_log, SpdMatrix};
use wlmean::Weight;

fn max_rel_diff(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    (x - y).amax() / x.amax().max(y.amax())
}

fn operands(seed: u64, dim: usize) -> (SpdMatrix, SpdMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (
        random_spd(&mut rng, dim, 1e3).unwrap(),
        random_spd(&mut rng, dim, 1e3).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_operands_flips_the_weight(seed in any::<u64>(), dim in 1usize..6, v in 0.01f64..0.99) {
        let (a, b) = operands(seed, dim);
        let w = Weight::new(v).unwrap();
        let g = op_weighted_geom(&a, &b, w).unwrap();
        let h = op_weighted_geom(&b, &a, w.flipped()).unwrap();
        prop_assert!(max_rel_diff(g.matrix(), h.matrix()) < 1e-9);
        let l = op_weighted_log(&a, &b, w).unwrap();
        let m = op_weighted_log(&b, &a, w.flipped()).unwrap();
        prop_assert!(max_rel_diff(l.matrix(), m.matrix()) < 1e-9);
    }

    #[test]
    fn means_are_positively_homogeneous(seed in any::<u64>(), dim in 1usize..6, v in 0.01f64..0.99, t in 0.1f64..10.0) {
        let (a, b) = operands(seed, dim);
        let w = Weight::new(v).unwrap();
        let l = op_weighted_log(&a, &b, w).unwrap();
        let lt = op_weighted_log(&a.scaled(t).unwrap(), &b.scaled(t).unwrap(), w).unwrap();
        prop_assert!(max_rel_diff(&(l.matrix() * t), lt.matrix()) < 1e-9);
    }

    #[test]
    fn means_are_monotone_in_the_second_operand(seed in any::<u64>(), dim in 1usize..6, v in 0.01f64..0.99) {
        let (a, b) = operands(seed, dim);
        let bigger = SpdMatrix::new(b.matrix() + DMatrix::identity(dim, dim)).unwrap();
        let w = Weight::new(v).unwrap();
        let x = op_weighted_log(&a, &b, w).unwrap();
        let y = op_weighted_log(&a, &bigger, w).unwrap();
        prop_assert!(loewner_leq(x.matrix(), y.matrix(), 1e-10).unwrap().holds);
    }
}
