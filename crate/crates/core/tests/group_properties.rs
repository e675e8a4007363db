use l2tors::chain::ChainComplex;
use l2tors::group::{
    validate_tower, AutomorphismSpec, GroupPresentation, Permutation, QuotientLevel, QuotientTower,
    RingElement, RingMatrix, Word,
};
use proptest::prelude::*;

fn word(ngens: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..ngens, -2i64..=2), 0..5).prop_map(Word::from_syllables)
}

fn element(ngens: usize) -> impl Strategy<Value = RingElement> {
    prop::collection::vec((word(ngens), -3i64..=3), 0..5).prop_map(RingElement::from_terms)
}

fn free_group() -> GroupPresentation {
    GroupPresentation::parse("gens a b; rels ;").unwrap()
}

/// `a ↦ ab, b ↦ b` and `a ↦ b, b ↦ a⁻¹`.
fn automorphisms() -> Vec<AutomorphismSpec> {
    let g = free_group();
    vec![
        AutomorphismSpec::from_strings(&g, &[("a", "a b"), ("b", "b")]).unwrap(),
        AutomorphismSpec::from_strings(&g, &[("a", "b"), ("b", "A")]).unwrap(),
    ]
}

proptest! {
    #[test]
    fn automorphism_is_a_ring_homomorphism(x in element(2), y in element(2), which in 0usize..2) {
        let phi = &automorphisms()[which];
        prop_assert_eq!(phi.apply_element(&(&x * &y)), &phi.apply_element(&x) * &phi.apply_element(&y));
        prop_assert_eq!(phi.apply_element(&(&x + &y)), &phi.apply_element(&x) + &phi.apply_element(&y));
        prop_assert_eq!(phi.apply_element(&RingElement::one()), RingElement::one());
    }

    #[test]
    fn star_is_an_anti_involution(x in element(2), y in element(2)) {
        prop_assert_eq!(x.star().star(), x.clone());
        prop_assert_eq!((&x * &y).star(), &y.star() * &x.star());
    }

    #[test]
    fn laplacian_is_star_fixed(p in element(2), q in element(2)) {
        let g = GroupPresentation::parse("gens a b; rels a b A B;").unwrap();
        let d1 = RingMatrix::from_rows(vec![vec![p, q]]);
        let c = ChainComplex::new(g, vec![1, 2], vec![d1], None).unwrap();
        for deg in 0..=1 {
            let lap = c.laplacian(deg).unwrap();
            prop_assert_eq!(lap.star(), lap);
        }
    }
}

fn random_level(images: Vec<Vec<u32>>) -> QuotientLevel {
    let degree = images[0].len();
    let perms = images
        .into_iter()
        .map(|v| Permutation::from_images(v).unwrap())
        .collect();
    QuotientLevel::new(degree as i64, degree, perms).unwrap()
}

/// Grid levels of `ℤ²` mixed with random two-generator permutation levels,
/// most of which fail the commutator relator or regularity.
fn mixed_tower() -> impl Strategy<Value = QuotientTower> {
    let grid = (1usize..6, 1usize..6).prop_map(|(x, y)| QuotientLevel::grid(&[x, y], (x * y) as i64).unwrap());
    let shuffled = (2usize..7)
        .prop_flat_map(|n| {
            let perm = Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle();
            (perm.clone(), perm)
        })
        .prop_map(|(a, b)| random_level(vec![a, b]));
    prop::collection::vec(prop_oneof![grid, shuffled], 1..6)
        .prop_map(|levels| QuotientTower::new(levels, None).unwrap())
}

proptest! {
    #[test]
    fn tower_validation_is_monotone(t in mixed_tower()) {
        let g = GroupPresentation::free_abelian(2);
        let full = validate_tower(&g, &t);
        for i in 0..t.len() {
            let smaller = validate_tower(&g, &t.without_level(i));
            if full.pass {
                prop_assert!(smaller.pass);
            }
            prop_assert!(smaller.failures().len() <= full.failures().len());
        }
    }
}

#[test]
fn removing_the_only_bad_level_restores_a_pass() {
    let g = GroupPresentation::free_abelian(2);
    let s3 = random_level(vec![vec![1, 0, 2], vec![0, 2, 1]]);
    let mut levels: Vec<QuotientLevel> = QuotientTower::grid(2, &[2, 4]).unwrap().levels().to_vec();
    levels.insert(1, s3);
    let t = QuotientTower::new(levels, None).unwrap();
    assert!(!validate_tower(&g, &t).pass);
    assert!(validate_tower(&g, &t.without_level(1)).pass);
}
