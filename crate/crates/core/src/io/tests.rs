use serde_json::json;

use super::render;
use super::*;
use crate::model::{Amount, ItemSet, Rational, Valuation};
use crate::second_chance::Appeal;

const VICKREY: &str = r#"{
  "items": 1,
  "agents": [
    {"name": "Alice", "valuation": {"kind": "additive", "values": [2000]}},
    {"name": "Bob", "valuation": {"kind": "additive", "values": ["1700"]}},
    {"valuation": {"kind": "single_minded", "bundle": 1, "value": 1000.5}}
  ]
}"#;

#[test]
fn parses_profile_with_mixed_amounts() {
    let inst = parse_profile(VICKREY).unwrap();
    assert_eq!(inst.names, vec!["Alice", "Bob", "agent2"]);
    assert_eq!(inst.profile.valuation(1).evaluate(ItemSet::full(1)), Amount::from_units(1700));
    assert_eq!(inst.profile.valuation(2).evaluate(ItemSet::full(1)), Amount::from_micros(1_000_500_000));
    assert!(inst.range.is_none());
    assert!(inst.algorithm("in_range").is_err());
}

#[test]
fn tables_are_closed_upwards() {
    let text = r#"{"items": 2, "agents": [{"valuation": {"kind": "table", "values": {"1": 2, "2": "1"}}}]}"#;
    let inst = parse_profile(text).unwrap();
    let v = inst.profile.valuation(0);
    assert_eq!(v.evaluate(ItemSet::full(2)), Amount::from_units(2));
    let bad_key = r#"{"items": 1, "agents": [{"valuation": {"kind": "table", "values": {"4": 1}}}]}"#;
    assert!(parse_profile(bad_key).is_err());
    let empty_valued = r#"{"items": 1, "agents": [{"valuation": {"kind": "table", "values": {"0": 1}}}]}"#;
    assert!(parse_profile(empty_valued).is_err());
    let too_precise = r#"{"items": 1, "agents": [{"valuation": {"kind": "additive", "values": ["0.0000001"]}}]}"#;
    assert!(parse_profile(too_precise).is_err());
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_profile("{\n  \"items\": 1,\n  \"agents\": [oops]\n}").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn ranges_and_algorithms() {
    let text = r#"{"items": 2, "agents": [
        {"valuation": {"kind": "additive", "values": [1, 1]}},
        {"valuation": {"kind": "additive", "values": [1, 1]}}],
      "range": [[3, 0], [0, 3], [1, 2]]}"#;
    let inst = parse_profile(text).unwrap();
    assert_eq!(inst.range.as_ref().unwrap().len(), 3);
    assert!(inst.algorithm("in_range").is_ok());
    let overlapping = text.replace("[1, 2]", "[1, 1]");
    assert!(parse_profile(&overlapping).is_err());
}

#[test]
fn parses_actions() {
    let text = r#"{"actions": [
        {"declaration": {"kind": "additive", "values": [2000]},
         "appeal": {"kind": "replace_own", "agent": 0, "declaration": {"kind": "additive", "values": [1500]}}},
        {"declaration": {"kind": "additive", "values": [1700]}},
        {"declaration": {"kind": "additive", "values": [1000]},
         "appeal": {"kind": "best_of", "agent": 2, "scoring": {"kind": "additive", "values": [1000]},
                    "alg": "second_highest", "appeals": [{"kind": "decline"}, {"kind": "chain", "appeals": []}]}}
    ]}"#;
    let actions = parse_actions(text, 1).unwrap();
    assert_eq!(actions.len(), 3);
    assert!(matches!(actions[0].appeal, Appeal::ReplaceOwn { agent: 0, .. }));
    assert!(actions[1].appeal.is_decline());
    assert!(matches!(&actions[2].appeal, Appeal::BestOf(b) if b.include_input && b.appeals.len() == 2));
    assert!(parse_actions(r#"{"actions": [{"declaration": {"kind": "bogus"}}]}"#, 1).is_err());
}

#[test]
fn parses_cmap_instances() {
    let graph = json!({
        "nodes": 2, "source": 0, "terminals": [1], "kind": "shortest_path",
        "edges": [{"from": 0, "to": 1, "owner": 0, "cost": 1}, {"from": 0, "to": 1, "owner": 1, "cost": 2}]
    });
    let (inst, v) = parse_cmap(&graph.to_string()).unwrap();
    assert_eq!(inst.layout(), &[1, 1]);
    assert_eq!(v.flat(), vec![Amount::from_units(-1), Amount::from_units(-2)]);

    let cut = json!({
        "nodes": 2, "source": 0, "terminals": [1],
        "edges": [{"from": 0, "to": 1, "owner": 0, "cost": 1}]
    });
    assert!(parse_cmap(&cut.to_string()).is_err());

    let explicit = json!({"components": [1, 1], "outputs": [[1, 0], [0, 1]], "type": [["-1"], [-2]]});
    let (inst, _) = parse_cmap(&explicit.to_string()).unwrap();
    assert_eq!(inst.allowable_outputs().unwrap().len(), 2);
}

#[test]
fn rendering() {
    assert_eq!(render::money(Amount::from_micros(-1_500_000)), json!({"micros": -1500000, "units": "-1.500000"}));
    assert_eq!(render::rational(&Rational::new(9, 2)), json!({"exact": "9/2", "decimal": "4.5"}));
    assert_eq!(render::rational(&Rational::new(-1, 40)), json!({"exact": "-1/40", "decimal": "-0.025"}));
    assert_eq!(render::rational(&Rational::new(1, 3)), json!({"exact": "1/3"}));
    assert_eq!(render::rational(&Rational::from_integer(6)), json!({"exact": "6", "decimal": "6"}));

    let v = Valuation::xor(vec![(ItemSet::from_bits(3), Amount::from_units(3))]).unwrap();
    let wire: WireValuation = serde_json::from_value(render::valuation(&v, 2)).unwrap();
    assert_eq!(wire.build(2).unwrap(), v);
    let t = Valuation::table(vec![Amount::ZERO, Amount::from_units(1), Amount::from_units(1), Amount::from_units(2)]).unwrap();
    let wire: WireValuation = serde_json::from_value(render::valuation(&t, 2)).unwrap();
    assert_eq!(wire.build(2).unwrap(), t);
}
