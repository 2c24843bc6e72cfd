use proptest::prelude::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensorop::interchange::{check_l_monotone, grothendieck_poset, l_images};
use tensorop::operad_core::random_small_operad;
use tensorop::tensor_calculus::{bounded_tensor_classes, tensor_binary_carrier};
use tensorop::topology::betti_numbers;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn low_arity_word_problem_matches_closed_forms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_small_operad(&mut rng, 3);
        let b = random_small_operad(&mut rng, 3);
        let unary = bounded_tensor_classes(&a, &b, 1, 6).unwrap();
        prop_assert_eq!(unary.stable_count(), a.size(1) * b.size(1));
        let binary = bounded_tensor_classes(&a, &b, 2, 6).unwrap();
        prop_assert_eq!(binary.count(), tensor_binary_carrier(&a, &b).unwrap().size);
    }
}

#[test]
fn grothendieck_posets_have_monotone_l_and_sphere_homology() {
    for (k, l, expected) in [(1, 1, vec![1, 1]), (1, 2, vec![1, 0, 1]), (2, 1, vec![1, 0, 1])] {
        let g = grothendieck_poset(k, l, 2).unwrap();
        let images = l_images(&g).unwrap();
        assert!(check_l_monotone(&g, &images).is_ok());
        assert_eq!(betti_numbers(&g.poset).unwrap(), expected, "{k} {l}");
    }
}
