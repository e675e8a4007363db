use l2tors::combine::{
    cell_sum, graph_of_groups, scale, surface_auto, DecompositionSpec, Quantity, Scaling,
    TorsionValue,
};
use l2tors::Provenance;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = BigRational> {
    (-1000i64..=1000, 1i64..=60).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn asserted() -> impl Strategy<Value = TorsionValue> {
    rational().prop_map(TorsionValue::asserted)
}

fn mixed() -> impl Strategy<Value = TorsionValue> {
    prop_oneof![
        asserted(),
        (-10.0f64..10.0).prop_map(|x| TorsionValue::computed(x, Provenance::Approximated)),
        (0.0f64..20.0).prop_map(|v| surface_auto(&[v]).unwrap()),
    ]
}

fn quantities_close(a: &Quantity, b: &Quantity) -> bool {
    let near = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()));
    a.exact == b.exact && near(a.volume, b.volume) && near(a.real, b.real)
}

proptest! {
    #[test]
    fn restriction_undoes_finite_quotient_exactly(v in asserted(), n in 1u64..500) {
        let down = scale(&Scaling::FiniteQuotient(n), &v).unwrap();
        let back = scale(&Scaling::Restriction(n), &down).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn restriction_undoes_finite_quotient_on_real_parts(v in mixed(), n in 1u64..500) {
        let down = scale(&Scaling::FiniteQuotient(n), &v).unwrap();
        let back = scale(&Scaling::Restriction(n), &down).unwrap();
        prop_assert!(quantities_close(&back.quantity, &v.quantity));
        prop_assert_eq!(back.provenance, v.provenance);
    }

    #[test]
    fn power_distributes_over_cell_sum(
        cells in prop::collection::vec((0usize..4, asserted()), 0..8),
        n in 1u64..50,
    ) {
        let whole = scale(&Scaling::Power(n), &cell_sum(&cells)).unwrap();
        let parts: Vec<(usize, TorsionValue)> = cells
            .iter()
            .map(|(d, v)| (*d, scale(&Scaling::Power(n), v).unwrap()))
            .collect();
        prop_assert_eq!(whole, cell_sum(&parts));
    }

    #[test]
    fn power_distributes_over_graph_of_groups(
        vertices in prop::collection::vec(mixed(), 1..6),
        edges in prop::collection::vec(mixed(), 0..6),
        n in 1u64..50,
    ) {
        let p = |v: &TorsionValue| scale(&Scaling::Power(n), v).unwrap();
        let whole = p(&graph_of_groups(&vertices, &edges));
        let vs: Vec<TorsionValue> = vertices.iter().map(p).collect();
        let es: Vec<TorsionValue> = edges.iter().map(p).collect();
        let split = graph_of_groups(&vs, &es);
        prop_assert!(quantities_close(&whole.quantity, &split.quantity));
        prop_assert_eq!(whole.provenance, split.provenance);
    }

    #[test]
    fn adding_a_volume_strictly_lowers_surface_value(
        volumes in prop::collection::vec(0.0f64..100.0, 0..6),
        extra in 0.5f64..50.0,
    ) {
        let before = surface_auto(&volumes).unwrap().value();
        let mut more = volumes.clone();
        more.push(extra);
        prop_assert!(surface_auto(&more).unwrap().value() < before);
    }

    #[test]
    fn weakest_provenance_wins(vertices in prop::collection::vec(mixed(), 1..6)) {
        let joined = graph_of_groups(&vertices, &[]).provenance;
        let weakest = vertices.iter().map(|v| v.provenance).fold(Provenance::ClosedForm, Provenance::join);
        prop_assert_eq!(joined, weakest);
    }
}

/// A random amalgam/graph tree as JSON text.
fn tree(depth: u32) -> BoxedStrategy<serde_json::Value> {
    let leaf = (-50i64..50, 1i64..9)
        .prop_map(|(n, d)| serde_json::json!({ "rule": "leaf", "value": format!("{n}/{d}") }))
        .boxed();
    if depth == 0 {
        return leaf;
    }
    let sub = tree(depth - 1);
    prop_oneof![
        leaf,
        (sub.clone(), sub.clone(), sub.clone())
            .prop_map(|(a, b, c)| serde_json::json!({ "rule": "amalgam", "factors": [a, b], "edge": c })),
        (sub, 1u64..5).prop_map(|(a, n)| serde_json::json!({ "rule": "power", "n": n, "child": a })),
    ]
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_deterministic(root in tree(3)) {
        let text = root.to_string();
        let spec = DecompositionSpec::from_json(&text).unwrap();
        let a = spec.evaluate().unwrap();
        let b = DecompositionSpec::from_json(&text).unwrap().evaluate().unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(a.trace_text(), b.trace_text());
    }
}
