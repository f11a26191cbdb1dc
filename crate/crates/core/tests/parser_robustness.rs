//! The fuzz entry points, exercised with mutated seeds so panics surface
//! under plain `cargo test` as well.

use proptest::prelude::*;
use varlab::cli::{prepare, Scenario};
use varlab::geometry::from_edges;

const SEED: &str = include_str!("../../../scenarios/small_graph_d.toml");

fn mutate(text: &str, cuts: &[(usize, String)]) -> String {
    let mut s = text.to_string();
    for (pos, insert) in cuts {
        let mut at = pos % (s.len() + 1);
        while !s.is_char_boundary(at) {
            at -= 1;
        }
        s.insert_str(at, insert);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scenario_parser_never_panics(text in "\\PC{0,400}") {
        let _ = Scenario::from_toml(&text);
        let _ = prepare(&text, None, None);
    }

    #[test]
    fn mutated_scenarios_never_panic(cuts in prop::collection::vec((any::<usize>(), "[-0-9.e=\\[\\]{}\",a-z \\n]{0,8}"), 1..6)) {
        let text = mutate(SEED, &cuts);
        let _ = prepare(&text, None, None);
    }

    #[test]
    fn graph_builder_never_panics(
        weights in prop::collection::vec(prop_oneof![any::<f64>(), -2.0f64..2.0], 0..12),
        edges in prop::collection::vec((0usize..14, 0usize..14, prop_oneof![any::<f64>(), -2.0f64..2.0], prop_oneof![any::<f64>(), 0.0f64..2.0]), 0..20),
        base in 0usize..14,
    ) {
        let _ = from_edges(weights, &edges, base);
    }
}
