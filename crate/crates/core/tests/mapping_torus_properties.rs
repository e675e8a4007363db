use l2tors::chain::{extend_tower, mapping_torus, validate_complex, ChainComplex, MappingTorusSpec};
use l2tors::group::{AutomorphismSpec, GroupPresentation, QuotientTower, RingElement, RingMatrix, Word};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = RingElement> {
    prop::collection::vec(-3i64..=3, 3)
        .prop_map(|c| RingElement::from_terms(c.into_iter().enumerate().map(|(i, x)| (Word::power_of(0, i as i64 - 1), x))))
}

fn single(x: RingElement) -> RingMatrix {
    RingMatrix::from_rows(vec![vec![x]])
}

/// Circle base with `Φ = id` and `f₀ = f₁ = x`, or `Φ: a ↦ a⁻¹` with
/// `f₀ = x`, `f₁ = −x a⁻¹`; both satisfy `∂ f₁ = f₀ Φ(∂)`.
fn spec(x: RingElement, invert: bool) -> MappingTorusSpec {
    let base = ChainComplex::circle();
    let g = base.group().clone();
    if invert {
        let phi = AutomorphismSpec::from_strings(&g, &[("a", "A")]).unwrap();
        let f1 = -&(&x * &RingElement::monomial(Word::power_of(0, -1), 1));
        MappingTorusSpec::new(base, phi, vec![single(x), single(f1)]).unwrap()
    } else {
        let phi = AutomorphismSpec::identity(1);
        MappingTorusSpec::new(base, phi, vec![single(x.clone()), single(x)]).unwrap()
    }
}

/// `∂'_n = [[∂_n, (−1)ⁿ(1 − f_{n−1})], [0, ∂_{n−1}]]`, built by hand.
fn cone(s: &MappingTorusSpec) -> Vec<RingMatrix> {
    let d1 = s.base.boundary(1).entry(0, 0);
    let one = RingElement::one();
    let f = |n: usize| s.chain_map[n].entry(0, 0);
    let b1 = RingMatrix::from_rows(vec![vec![d1.clone(), -&(&one - &f(0))]]);
    let b2 = RingMatrix::from_rows(vec![vec![&one - &f(1)], vec![d1]]);
    vec![b1, b2]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn erasing_t_gives_the_cone(x in element(), invert in any::<bool>()) {
        let s = spec(x, invert);
        let tower = QuotientTower::cyclic(&[3, 6]).unwrap();
        let (ext, c) = mapping_torus(&s, &tower).unwrap();
        let t = ext.stable_letter;
        let erase = |w: &Word| Word::from_syllables(w.syllables().iter().copied().filter(|&(g, _)| g != t));
        let erased: Vec<RingMatrix> = c
            .boundaries()
            .iter()
            .map(|b| b.map_entries(|e| e.map_words(erase)))
            .collect();
        prop_assert_eq!(erased, cone(&s));
    }

    #[test]
    fn produced_complex_validates_on_extended_levels(x in element(), invert in any::<bool>(), m in 1usize..4) {
        let s = spec(x, invert);
        let tower = QuotientTower::cyclic(&[3, 4, 6]).unwrap();
        let (_, c) = mapping_torus(&s, &tower).unwrap();
        let ext = extend_tower(s.base.group(), &tower, &s.automorphism, m).unwrap();
        prop_assert!(validate_complex(&c, &ext).unwrap().pass);
    }
}

#[test]
fn broken_chain_map_is_rejected() {
    let base = ChainComplex::circle();
    let g: GroupPresentation = base.group().clone();
    let phi = AutomorphismSpec::from_strings(&g, &[("a", "A")]).unwrap();
    let one = RingMatrix::identity(1);
    let s = MappingTorusSpec::new(base, phi, vec![one.clone(), one]).unwrap();
    assert!(mapping_torus(&s, &QuotientTower::cyclic(&[3]).unwrap()).is_err());
}
