use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::perm::Permutation;
use crate::triple::PtsTriple;

pub fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v).unwrap())
}

pub fn triple_strategy(n: usize) -> impl Strategy<Value = PtsTriple> {
    (perm_strategy(n), perm_strategy(n), perm_strategy(n))
        .prop_map(|(a, b, c)| PtsTriple::new(a, b, c).unwrap())
}

pub fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::from_images(&v).unwrap()
}

pub fn random_triple<R: Rng>(rng: &mut R, n: usize) -> PtsTriple {
    PtsTriple::new(
        random_perm(rng, n),
        random_perm(rng, n),
        random_perm(rng, n),
    )
    .unwrap()
}

pub fn random_connected_triple<R: Rng>(rng: &mut R, n: usize) -> PtsTriple {
    loop {
        let x = random_triple(rng, n);
        if x.is_connected() {
            return x;
        }
    }
}
