//! JTL insertion and interconnect JJ accounting.
//!
//! Three rules, applied per net:
//! 1. skew: after five consecutive logic gates with no JTL between them, one JTL;
//! 2. fanout: one JTL per load (gate pin or primary output), chained so that
//!    load `k` sits behind `k` JTLs;
//! 3. phase: one extra JTL on every loaded XOR-class output.
//!
//! Rule 2 puts a JTL on every wire that carries a signal, so rule 1 can only fire
//! on netlists where some loads are exempt; it is still evaluated faithfully.

use std::collections::BTreeMap;

use crate::cell::CellLibrary;
use crate::netlist::{Category, Driver, Netlist};

pub const SKEW_RUN: u32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct JtlAnnotation {
    /// Inserted JTLs per net (all rules).
    pub per_net: Vec<u32>,
    pub rule1_skew: u64,
    pub rule2_fanout: u64,
    pub rule3_phase: u64,
    pub total_jtl: u64,
    pub total_interconnect_jj: u64,
    /// JTLs a signal crosses from its driver to each gate pin.
    pub pin_jtls: Vec<Vec<u32>>,
    /// JTLs crossed to reach each primary output reference.
    pub output_jtls: Vec<u32>,
    rule1_net: Vec<u32>,
    rule3_net: Vec<bool>,
}

impl JtlAnnotation {
    pub fn rule1_on(&self, net: u32) -> u32 {
        self.rule1_net[net as usize]
    }

    pub fn rule3_on(&self, net: u32) -> bool {
        self.rule3_net[net as usize]
    }
}

pub fn insert_jtls(nl: &Netlist, lib: &CellLibrary) -> JtlAnnotation {
    let n = nl.net_count();
    let jtl_jj = lib.jtl_jj() as u64;
    let mut rule2 = vec![0u32; n];
    let mut rule3 = vec![false; n];
    for net in 0..n as u32 {
        if nl.is_const(net) {
            continue;
        }
        rule2[net as usize] = nl.loads(net);
        if let Driver::Gate(g) = nl.driver(net) {
            rule3[net as usize] = nl.is_phase_boundary(g) && nl.loads(net) > 0;
        }
    }

    // Rule 1: run length of JTL-free gates ending at each net's driver.
    let mut run = vec![0u32; n];
    let mut rule1 = vec![0u32; n];
    for &g in nl.topo_order() {
        let gate = &nl.gates[g as usize];
        let carried = gate
            .inputs
            .iter()
            .map(|&i| match nl.driver(i) {
                Driver::Gate(_) if rule2[i as usize] == 0 && !rule3[i as usize] => run[i as usize],
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        let out = gate.output as usize;
        run[out] = carried + 1;
        if run[out] >= SKEW_RUN && nl.loads(gate.output) > 0 {
            rule1[out] = 1;
            run[out] = 0;
        }
    }

    let mut per_net = vec![0u32; n];
    let (mut r1, mut r2, mut r3) = (0u64, 0u64, 0u64);
    for i in 0..n {
        per_net[i] = rule1[i] + rule2[i] + rule3[i] as u32;
        r1 += rule1[i] as u64;
        r2 += rule2[i] as u64;
        r3 += rule3[i] as u64;
    }

    // Chain positions: gate pins in gate-id order first, then output references.
    let mut next_slot = vec![0u32; n];
    let base = |i: usize| rule1[i] + rule3[i] as u32;
    let mut pin_jtls = Vec::with_capacity(nl.gates.len());
    for g in &nl.gates {
        let row = g
            .inputs
            .iter()
            .map(|&i| {
                let i = i as usize;
                if nl.is_const(i as u32) {
                    return 0;
                }
                next_slot[i] += 1;
                base(i) + next_slot[i]
            })
            .collect();
        pin_jtls.push(row);
    }
    let output_jtls = nl
        .outputs
        .iter()
        .map(|&o| {
            let o = o as usize;
            if nl.is_const(o as u32) {
                return 0;
            }
            next_slot[o] += 1;
            base(o) + next_slot[o]
        })
        .collect();

    let total = r1 + r2 + r3;
    JtlAnnotation {
        per_net,
        rule1_skew: r1,
        rule2_fanout: r2,
        rule3_phase: r3,
        total_jtl: total,
        total_interconnect_jj: total * jtl_jj,
        pin_jtls,
        output_jtls,
        rule1_net: rule1,
        rule3_net: rule3,
    }
}

pub fn interconnect_jj(ann: &JtlAnnotation) -> u64 {
    ann.total_interconnect_jj
}

/// Interconnect JJs split by owner.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Attribution {
    pub by_category: BTreeMap<Category, u64>,
    /// Per netlist block; register-driven JTLs live only in `by_category`.
    pub by_block: Vec<u64>,
}

/// Charge every inserted JTL to a block.
///
/// Adders own the JTLs on their input pins, exactly as a standalone adder
/// measurement counts its port JTLs. Everything else (remaining fanout JTLs,
/// phase and skew JTLs) belongs to whatever drives the net; primary inputs are
/// register outputs.
pub fn attribute(nl: &Netlist, ann: &JtlAnnotation, lib: &CellLibrary) -> Attribution {
    let jj = lib.jtl_jj() as u64;
    let mut by_category: BTreeMap<Category, u64> = Category::ALL.iter().map(|&c| (c, 0)).collect();
    let mut by_block = vec![0u64; nl.blocks.len()];
    let mut charge_driver = |net: u32, count: u64, by_category: &mut BTreeMap<Category, u64>| {
        match nl.driver(net) {
            Driver::Gate(g) => {
                let b = nl.gates[g as usize].block as usize;
                by_block[b] += count * jj;
                *by_category.get_mut(&nl.blocks[b].category).unwrap() += count * jj;
            }
            _ => *by_category.get_mut(&Category::Register).unwrap() += count * jj,
        }
    };
    let mut adder_pins = vec![0u64; nl.blocks.len()];
    for net in 0..nl.net_count() as u32 {
        let extra = ann.rule1_on(net) as u64 + ann.rule3_on(net) as u64;
        if extra > 0 {
            charge_driver(net, extra, &mut by_category);
        }
    }
    for g in &nl.gates {
        let blk = &nl.blocks[g.block as usize];
        for &i in &g.inputs {
            if nl.is_const(i) {
                continue;
            }
            if blk.category == Category::Adder {
                adder_pins[g.block as usize] += 1;
            } else {
                charge_driver(i, 1, &mut by_category);
            }
        }
    }
    for &o in &nl.outputs {
        if !nl.is_const(o) {
            charge_driver(o, 1, &mut by_category);
        }
    }
    for (b, &count) in adder_pins.iter().enumerate() {
        by_block[b] += count * jj;
        *by_category.get_mut(&Category::Adder).unwrap() += count * jj;
    }
    Attribution {
        by_category,
        by_block,
    }
}
