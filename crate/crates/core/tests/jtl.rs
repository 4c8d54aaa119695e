mod common;

use common::{build_dag, dag_spec, lib};
use proptest::prelude::*;
use rqlsha::adders::{adder_block, AdderKind};
use rqlsha::jtl::{attribute, insert_jtls};
use rqlsha::netlist::{Category, Driver, Netlist};

/// Independent count: one JTL per load of every non-constant net, plus one per
/// loaded XOR output.
fn oracle(nl: &Netlist) -> (u64, u64) {
    let mut loads = vec![0u64; nl.net_count()];
    for g in &nl.gates {
        for &i in &g.inputs {
            loads[i as usize] += 1;
        }
    }
    for &o in &nl.outputs {
        loads[o as usize] += 1;
    }
    let fanout: u64 = (0..nl.net_count())
        .filter(|&n| !matches!(nl.driver(n as u32), Driver::Const(_)))
        .map(|n| loads[n])
        .sum();
    let phase = nl
        .gates
        .iter()
        .filter(|g| g.cell == "XOR" && loads[g.output as usize] > 0)
        .count() as u64;
    (fanout, phase)
}

#[test]
fn rca32_interconnect_matches_hand_count() {
    let lib = lib();
    let nl = adder_block(AdderKind::Rca, 32, 2, &lib).unwrap();
    let ann = insert_jtls(&nl, &lib);
    // 64 operand loads, 65 carry loads, 32*(2+2) internal, 33 outputs; 32 loaded XOR outputs (the propagate terms)
    let (f, p) = oracle(&nl);
    assert_eq!((ann.rule2_fanout, ann.rule3_phase), (f, p));
    assert_eq!(ann.rule1_skew, 0);
    assert_eq!(ann.total_interconnect_jj, 2 * ann.total_jtl);
    assert_eq!(nl.gate_jj(&lib) + ann.total_interconnect_jj, 1314);
}

#[test]
fn adder_pins_own_their_jtls() {
    let lib = lib();
    let nl = adder_block(AdderKind::Ksa, 32, 2, &lib).unwrap();
    let ann = insert_jtls(&nl, &lib);
    let att = attribute(&nl, &ann, &lib);
    assert_eq!(att.by_category[&Category::Adder], ann.total_interconnect_jj);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rules_match_oracle(spec in dag_spec()) {
        let lib = lib();
        let nl = build_dag(&spec, &lib);
        let ann = insert_jtls(&nl, &lib);
        let (f, p) = oracle(&nl);
        prop_assert_eq!(ann.rule2_fanout, f);
        prop_assert_eq!(ann.rule3_phase, p);
        prop_assert_eq!(ann.total_jtl, ann.rule1_skew + f + p);
        prop_assert_eq!(ann.per_net.iter().map(|&x| x as u64).sum::<u64>(), ann.total_jtl);
    }

    #[test]
    fn attribution_is_a_partition(spec in dag_spec()) {
        let lib = lib();
        let nl = build_dag(&spec, &lib);
        let ann = insert_jtls(&nl, &lib);
        let att = attribute(&nl, &ann, &lib);
        prop_assert_eq!(att.by_category.values().sum::<u64>(), ann.total_interconnect_jj);
        prop_assert_eq!(att.by_block.iter().sum::<u64>() <= ann.total_interconnect_jj, true);
    }

    #[test]
    fn chain_positions_are_distinct_per_net(spec in dag_spec()) {
        let lib = lib();
        let nl = build_dag(&spec, &lib);
        let ann = insert_jtls(&nl, &lib);
        let mut seen = std::collections::BTreeSet::new();
        for g in &nl.gates {
            for (k, &i) in g.inputs.iter().enumerate() {
                if !nl.is_const(i) {
                    prop_assert!(seen.insert((i, ann.pin_jtls[g.id as usize][k])));
                }
            }
        }
    }
}
