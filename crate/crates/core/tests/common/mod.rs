#![allow(dead_code)]

use proptest::prelude::*;
use rqlsha::cell::CellLibrary;
use rqlsha::netlist::{Category, Netlist, NetlistBuilder};

/// Recipe for a random combinational netlist: each gate names a cell and picks
/// its inputs among all earlier nets by index modulo the current count.
#[derive(Debug, Clone)]
pub struct DagSpec {
    pub inputs: usize,
    pub gates: Vec<(usize, Vec<usize>, usize)>,
}

pub const CELLS: [&str; 5] = ["AND", "OR", "XOR", "ANOTB", "NOT"];

pub fn dag_spec() -> impl Strategy<Value = DagSpec> {
    (1usize..6, prop::collection::vec((0usize..5, prop::collection::vec(any::<usize>(), 2), 0usize..3), 1..40))
        .prop_map(|(inputs, gates)| DagSpec { inputs, gates })
}

pub fn build_dag(spec: &DagSpec, lib: &CellLibrary) -> Netlist {
    let mut b = NetlistBuilder::new("dag", lib);
    let mut nets: Vec<u32> = (0..spec.inputs).map(|i| b.input(&format!("i{i}"))).collect();
    let cats = [Category::Adder, Category::Register, Category::Other];
    for (k, (cell, picks, blk)) in spec.gates.iter().enumerate() {
        if k % 7 == 0 {
            b.block(&format!("b{k}"), cats[*blk]);
        }
        let cell = CELLS[*cell];
        let arity = lib.cells[cell].inputs;
        let ins: Vec<u32> = picks.iter().take(arity).map(|p| nets[p % nets.len()]).collect();
        nets.push(b.gate(cell, &ins));
    }
    let last = *nets.last().unwrap();
    b.output(last);
    b.build().unwrap()
}

pub fn lib() -> CellLibrary {
    CellLibrary::default()
}
