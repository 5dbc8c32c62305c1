use arena_agents::causal::{parse_relations, CausalGraph, CausalRelation};
use proptest::prelude::*;

const MUSHROOM: &str = include_str!("data/red_mushroom.graph");
const FARMING: &str = include_str!("data/red_farming.graph");

/// Independent count: lines that start a relation.
fn counted(text: &str) -> usize {
    text.lines().filter(|l| l.starts_with("Action: ")).count()
}

#[test]
fn learned_graphs_parse_and_round_trip() {
    for (text, expected) in [(MUSHROOM, 23), (FARMING, 87)] {
        assert_eq!(counted(text), expected, "line-count oracle");
        let g = CausalGraph::from_lines(text).unwrap();
        assert_eq!(g.len(), expected);
        assert_eq!(g.to_lines(), text, "serialized text must match the fixture byte for byte");
        let again = CausalGraph::from_lines(&g.to_lines()).unwrap();
        assert_eq!(again, g);
    }
}

#[test]
fn fixture_relations_are_read_through_the_response_parser_too() {
    assert_eq!(parse_relations(MUSHROOM).unwrap().len(), 23);
}

#[test]
fn bread_relation() {
    let text = r#"[{"action": "craftItem(bot, \"bread\", 5)", "causes": ["wheat"], "effects": ["bread"]}]"#;
    let g = CausalGraph::from(parse_relations(text).unwrap());
    let r = g.get(r#"craftItem(bot, "bread", 5)"#).unwrap();
    assert_eq!((r.causes.as_slice(), r.effects.as_slice()), (&["wheat".to_string()][..], &["bread".to_string()][..]));
    assert_eq!(r.to_string(), r#"Action: craftItem(bot, "bread", 5); Cause: ['wheat']; Effect ['bread']"#);
}

#[test]
fn json_serialization_keeps_order() {
    let g = CausalGraph::from_lines(FARMING).unwrap();
    let json = serde_json::to_string(&g).unwrap();
    let back: CausalGraph = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_lines(), FARMING);
}

fn relation() -> impl Strategy<Value = CausalRelation> {
    let item = prop::sample::select(vec!["wheat", "bread", "coal", "slime_block", "egg", "sugar"]);
    (
        prop::sample::select(vec!["mineBlock", "craftItem", "farm", "smeltItem"]),
        0u8..6,
        prop::collection::vec(item.clone(), 0..3),
        prop::collection::vec(item, 0..3),
    )
        .prop_map(|(name, n, causes, effects)| CausalRelation {
            action: format!("{name}(bot, \"x{n}\", 1)"),
            causes: causes.into_iter().map(String::from).collect(),
            effects: effects.into_iter().map(String::from).collect(),
        })
}

proptest! {
    #[test]
    fn union_is_monotone(
        start in prop::collection::vec(relation(), 0..12),
        updates in prop::collection::vec(prop::collection::vec(relation(), 0..8), 1..6),
    ) {
        let mut g = CausalGraph::from(start);
        for update in updates {
            let before = g.clone();
            let added = g.union(update.clone());
            prop_assert_eq!(g.len(), before.len() + added);
            for r in before.iter() {
                prop_assert_eq!(g.get(&r.action), Some(r));
            }
            for r in &update {
                prop_assert!(g.get(&r.action).is_some());
            }
            // keys are unique and the prefix order is unchanged
            let old: Vec<_> = before.iter().map(|r| r.action.clone()).collect();
            let new: Vec<_> = g.iter().take(old.len()).map(|r| r.action.clone()).collect();
            prop_assert_eq!(old, new);
        }
    }

    #[test]
    fn line_form_round_trips(rels in prop::collection::vec(relation(), 0..20)) {
        let g = CausalGraph::from(rels);
        let text = g.to_lines();
        prop_assert_eq!(CausalGraph::from_lines(&text).unwrap(), g);
    }
}
