//! Flat gate-level netlists.
//!
//! Every net has exactly one driver: a primary input, a tied-off constant, or a
//! gate output. Gates are tagged with a block (name + cost category); reports
//! rebuild hierarchy from block names since the graph itself is flat.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cell::{CellLibrary, LogicFn};
use crate::error::{Error, Result};

pub type NetId = u32;
/// LSB-first bundle of nets.
pub type Word = Vec<NetId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Adder,
    Register,
    Other,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Adder, Category::Register, Category::Other];

    pub fn name(self) -> &'static str {
        match self {
            Category::Adder => "adders",
            Category::Register => "registers",
            Category::Other => "other",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "adder" | "adders" => Some(Category::Adder),
            "register" | "registers" => Some(Category::Register),
            "other" => Some(Category::Other),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: u32,
    pub cell: String,
    pub inputs: Vec<NetId>,
    pub output: NetId,
    pub block: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Input(u32),
    Const(bool),
    Gate(u32),
}

#[derive(Debug, Clone)]
pub struct Netlist {
    pub name: String,
    pub gates: Vec<Gate>,
    pub inputs: Vec<NetId>,
    pub outputs: Vec<NetId>,
    pub blocks: Vec<Block>,
    net_names: Vec<String>,
    drivers: Vec<Driver>,
    topo: Vec<u32>,
    loads: Vec<u32>,
    funcs: Vec<LogicFn>,
    phase: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanoutDistribution {
    /// fanout -> number of gates with that fanout
    pub histogram: BTreeMap<u32, u64>,
    pub mean_fanout: Ratio<u64>,
}

impl FanoutDistribution {
    pub fn gate_count(&self) -> u64 {
        self.histogram.values().sum()
    }

    pub fn fraction_above(&self, fanout: u32) -> f64 {
        let n = self.gate_count();
        if n == 0 {
            return 0.0;
        }
        let above: u64 = self.histogram.range(fanout + 1..).map(|(_, c)| c).sum();
        above as f64 / n as f64
    }

    pub fn mean(&self) -> f64 {
        *self.mean_fanout.numer() as f64 / *self.mean_fanout.denom() as f64
    }
}

impl Netlist {
    pub fn net_count(&self) -> usize {
        self.drivers.len()
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.net_names[net as usize]
    }

    pub fn driver(&self, net: NetId) -> Driver {
        self.drivers[net as usize]
    }

    pub fn is_const(&self, net: NetId) -> bool {
        matches!(self.drivers[net as usize], Driver::Const(_))
    }

    /// Gate pins plus primary-output references reading this net.
    pub fn loads(&self, net: NetId) -> u32 {
        self.loads[net as usize]
    }

    /// Gate indices in a deterministic topological order.
    pub fn topo_order(&self) -> &[u32] {
        &self.topo
    }

    pub fn logic_fn(&self, gate: u32) -> LogicFn {
        self.funcs[gate as usize]
    }

    pub fn is_phase_boundary(&self, gate: u32) -> bool {
        self.phase[gate as usize]
    }

    pub fn gate_category(&self, gate: u32) -> Category {
        self.blocks[self.gates[gate as usize].block as usize].category
    }

    /// Category owning a net's driver; primary inputs are register outputs.
    pub fn driver_category(&self, net: NetId) -> Category {
        match self.drivers[net as usize] {
            Driver::Gate(g) => self.gate_category(g),
            _ => Category::Register,
        }
    }

    /// Gates whose outputs nothing reads (tied-off constants leave some behind).
    pub fn unloaded_gates(&self) -> Vec<u32> {
        self.gates
            .iter()
            .filter(|g| self.loads[g.output as usize] == 0)
            .map(|g| g.id)
            .collect()
    }

    pub fn cell_counts(&self) -> BTreeMap<String, u64> {
        let mut m = BTreeMap::new();
        for g in &self.gates {
            *m.entry(g.cell.clone()).or_insert(0) += 1;
        }
        m
    }

    pub fn gate_jj(&self, lib: &CellLibrary) -> u64 {
        self.gates.iter().map(|g| lib.jj(&g.cell) as u64).sum()
    }

    /// For every net, the (gate, pin) pairs reading it, in gate-id order.
    pub fn load_pins(&self) -> Vec<Vec<(u32, u32)>> {
        let mut pins = vec![Vec::new(); self.net_count()];
        for g in &self.gates {
            for (k, &n) in g.inputs.iter().enumerate() {
                pins[n as usize].push((g.id, k as u32));
            }
        }
        pins
    }

    pub fn fanout_histogram(&self) -> FanoutDistribution {
        let mut histogram = BTreeMap::new();
        let mut total: u64 = 0;
        for g in &self.gates {
            let f = self.loads[g.output as usize];
            *histogram.entry(f).or_insert(0) += 1;
            total += f as u64;
        }
        let n = self.gates.len() as u64;
        let mean_fanout = if n == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(total, n)
        };
        FanoutDistribution {
            histogram,
            mean_fanout,
        }
    }

    /// Evaluate every net; `inputs` follows `self.inputs` order.
    pub fn eval_nets(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.inputs.len() {
            let missing = self
                .inputs
                .get(inputs.len())
                .map(|&n| self.net_name(n).to_string())
                .unwrap_or_else(|| "<extra input>".into());
            return Err(Error::MissingInput(missing));
        }
        let mut v = vec![false; self.net_count()];
        for (i, d) in self.drivers.iter().enumerate() {
            if let Driver::Const(b) = d {
                v[i] = *b;
            }
        }
        for (&net, &b) in self.inputs.iter().zip(inputs) {
            v[net as usize] = b;
        }
        let mut buf = Vec::with_capacity(11);
        for &g in &self.topo {
            let gate = &self.gates[g as usize];
            buf.clear();
            buf.extend(gate.inputs.iter().map(|&n| v[n as usize]));
            v[gate.output as usize] = self.funcs[g as usize].eval(&buf);
        }
        Ok(v)
    }

    pub fn eval(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        let v = self.eval_nets(inputs)?;
        Ok(self.outputs.iter().map(|&n| v[n as usize]).collect())
    }

    /// Evaluate with inputs given by net name.
    pub fn eval_named(&self, assignment: &BTreeMap<String, bool>) -> Result<BTreeMap<String, bool>> {
        let mut ins = Vec::with_capacity(self.inputs.len());
        for &n in &self.inputs {
            let name = self.net_name(n);
            match assignment.get(name) {
                Some(&b) => ins.push(b),
                None => return Err(Error::MissingInput(name.to_string())),
            }
        }
        let v = self.eval_nets(&ins)?;
        Ok(self
            .outputs
            .iter()
            .map(|&n| (self.net_name(n).to_string(), v[n as usize]))
            .collect())
    }

    /// Line-oriented interchange text: `id cell out in1 [in2 ...]`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, ".name {}", self.name);
        let names = |nets: &[NetId]| {
            nets.iter()
                .map(|&n| self.net_name(n))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(s, ".inputs {}", names(&self.inputs));
        let _ = writeln!(s, ".outputs {}", names(&self.outputs));
        for (i, d) in self.drivers.iter().enumerate() {
            if let Driver::Const(b) = d {
                let _ = writeln!(s, ".const{} {}", *b as u8, self.net_names[i]);
            }
        }
        let mut cur = u32::MAX;
        for g in &self.gates {
            if g.block != cur {
                let b = &self.blocks[g.block as usize];
                let cat = match b.category {
                    Category::Adder => "adder",
                    Category::Register => "register",
                    Category::Other => "other",
                };
                let _ = writeln!(s, ".block {} {}", b.name, cat);
                cur = g.block;
            }
            let _ = writeln!(
                s,
                "{} {} {} {}",
                g.id,
                g.cell,
                self.net_name(g.output),
                names(&g.inputs)
            );
        }
        s
    }

    pub fn from_text(text: &str, lib: &CellLibrary) -> Result<Netlist> {
        let mut b = NetlistBuilder::new("netlist", lib);
        let mut by_name: HashMap<String, NetId> = HashMap::new();
        let mut net = |b: &mut NetlistBuilder, name: &str| -> NetId {
            *by_name
                .entry(name.to_string())
                .or_insert_with(|| b.undriven(name))
        };
        let mut outputs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let head = tok.next().unwrap();
            let err = |m: &str| Error::Parse(format!("line {}: {m}", lineno + 1));
            match head {
                ".name" => b.name = tok.next().ok_or_else(|| err("missing name"))?.to_string(),
                ".inputs" => {
                    for t in tok {
                        let n = net(&mut b, t);
                        b.drive(n, Driver::Input(b.inputs.len() as u32));
                        b.inputs.push(n);
                    }
                }
                ".outputs" => outputs.extend(tok.map(str::to_string)),
                ".const0" | ".const1" => {
                    let v = head == ".const1";
                    for t in tok {
                        let n = net(&mut b, t);
                        b.drive(n, Driver::Const(v));
                    }
                }
                ".block" => {
                    let name = tok.next().ok_or_else(|| err("missing block name"))?;
                    let cat = tok.next().map_or(Some(Category::Other), Category::parse);
                    let cat = cat.ok_or_else(|| err("unknown block category"))?;
                    b.block(name, cat);
                }
                _ => {
                    head.parse::<u32>()
                        .map_err(|_| err("expected gate id or directive"))?;
                    let cell = tok.next().ok_or_else(|| err("missing cell"))?;
                    let out = tok.next().ok_or_else(|| err("missing output net"))?;
                    let out = net(&mut b, out);
                    let ins: Vec<NetId> = tok.map(|t| net(&mut b, t)).collect();
                    b.gate_into(cell, &ins, out);
                }
            }
        }
        for o in outputs {
            let n = net(&mut b, &o);
            b.output(n);
        }
        b.build()
    }
}

/// Incremental netlist construction; errors are deferred to [`NetlistBuilder::build`].
pub struct NetlistBuilder<'a> {
    lib: &'a CellLibrary,
    pub name: String,
    gates: Vec<Gate>,
    net_names: Vec<String>,
    drivers: Vec<Option<Driver>>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    blocks: Vec<Block>,
    cur_block: u32,
    consts: [Option<NetId>; 2],
    error: Option<Error>,
}

impl<'a> NetlistBuilder<'a> {
    pub fn new(name: &str, lib: &'a CellLibrary) -> Self {
        NetlistBuilder {
            lib,
            name: name.to_string(),
            gates: Vec::new(),
            net_names: Vec::new(),
            drivers: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            blocks: vec![Block {
                name: "top".into(),
                category: Category::Other,
            }],
            cur_block: 0,
            consts: [None, None],
            error: None,
        }
    }

    pub fn library(&self) -> &'a CellLibrary {
        self.lib
    }

    fn fail(&mut self, e: Error) {
        if self.error.is_none() {
            self.error = Some(e);
        }
    }

    fn undriven(&mut self, name: &str) -> NetId {
        let id = self.net_names.len() as NetId;
        self.net_names.push(name.to_string());
        self.drivers.push(None);
        id
    }

    fn fresh(&mut self) -> NetId {
        let id = self.net_names.len();
        self.undriven(&format!("n{id}"))
    }

    fn drive(&mut self, net: NetId, d: Driver) {
        if self.drivers[net as usize].is_some() {
            let name = self.net_names[net as usize].clone();
            self.fail(Error::MultipleDrivers(name));
        } else {
            self.drivers[net as usize] = Some(d);
        }
    }

    /// Switch the block subsequent gates belong to; reuses a block of the same name.
    pub fn block(&mut self, name: &str, category: Category) -> u32 {
        let id = match self.blocks.iter().position(|b| b.name == name) {
            Some(i) => i as u32,
            None => {
                self.blocks.push(Block {
                    name: name.to_string(),
                    category,
                });
                (self.blocks.len() - 1) as u32
            }
        };
        self.cur_block = id;
        id
    }

    pub fn input(&mut self, name: &str) -> NetId {
        let n = self.undriven(name);
        self.drivers[n as usize] = Some(Driver::Input(self.inputs.len() as u32));
        self.inputs.push(n);
        n
    }

    pub fn input_word(&mut self, name: &str, width: usize) -> Word {
        (0..width).map(|i| self.input(&format!("{name}[{i}]"))).collect()
    }

    pub fn constant(&mut self, value: bool) -> NetId {
        if let Some(n) = self.consts[value as usize] {
            return n;
        }
        let n = self.undriven(if value { "const1" } else { "const0" });
        self.drivers[n as usize] = Some(Driver::Const(value));
        self.consts[value as usize] = Some(n);
        n
    }

    pub fn const_word(&mut self, value: u64, width: usize) -> Word {
        (0..width).map(|i| self.constant(value >> i & 1 == 1)).collect()
    }

    pub fn gate(&mut self, cell: &str, ins: &[NetId]) -> NetId {
        let out = self.fresh();
        self.gate_into(cell, ins, out);
        out
    }

    pub fn gate_into(&mut self, cell: &str, ins: &[NetId], out: NetId) {
        let id = self.gates.len() as u32;
        match self.lib.get(cell) {
            Err(e) => self.fail(e),
            Ok(kind) if kind.inputs != ins.len() => self.fail(Error::Arity {
                gate: id,
                cell: cell.to_string(),
                expected: kind.inputs,
                got: ins.len(),
            }),
            Ok(_) => {}
        }
        self.drive(out, Driver::Gate(id));
        self.gates.push(Gate {
            id,
            cell: cell.to_string(),
            inputs: ins.to_vec(),
            output: out,
            block: self.cur_block,
        });
    }

    pub fn output(&mut self, net: NetId) {
        self.outputs.push(net);
    }

    pub fn output_word(&mut self, word: &[NetId]) {
        self.outputs.extend_from_slice(word);
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn build(self) -> Result<Netlist> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let n = self.net_names.len();
        let mut loads = vec![0u32; n];
        for g in &self.gates {
            for &i in &g.inputs {
                loads[i as usize] += 1;
            }
        }
        for &o in &self.outputs {
            loads[o as usize] += 1;
        }
        let mut drivers = Vec::with_capacity(n);
        for (i, d) in self.drivers.iter().enumerate() {
            match d {
                Some(d) => drivers.push(*d),
                None => return Err(Error::Dangling(self.net_names[i].clone())),
            }
        }
        // Kahn's algorithm, seeded and drained in gate-id order.
        let mut indeg = vec![0u32; self.gates.len()];
        let mut readers: Vec<Vec<u32>> = vec![Vec::new(); n];
        for g in &self.gates {
            for &i in &g.inputs {
                if let Driver::Gate(_) = drivers[i as usize] {
                    indeg[g.id as usize] += 1;
                    readers[i as usize].push(g.id);
                }
            }
        }
        let mut queue: VecDeque<u32> = (0..self.gates.len() as u32)
            .filter(|&g| indeg[g as usize] == 0)
            .collect();
        let mut topo = Vec::with_capacity(self.gates.len());
        while let Some(g) = queue.pop_front() {
            topo.push(g);
            for &r in &readers[self.gates[g as usize].output as usize] {
                indeg[r as usize] -= 1;
                if indeg[r as usize] == 0 {
                    queue.push_back(r);
                }
            }
        }
        if topo.len() != self.gates.len() {
            let stuck = (0..self.gates.len() as u32)
                .find(|&g| indeg[g as usize] > 0)
                .unwrap();
            return Err(Error::Cycle(stuck));
        }
        let funcs = self
            .gates
            .iter()
            .map(|g| self.lib.cells[&g.cell].function)
            .collect();
        let phase = self
            .gates
            .iter()
            .map(|g| self.lib.cells[&g.cell].phase_boundary)
            .collect();
        Ok(Netlist {
            name: self.name,
            gates: self.gates,
            inputs: self.inputs,
            outputs: self.outputs,
            blocks: self.blocks,
            net_names: self.net_names,
            drivers,
            topo,
            loads,
            funcs,
            phase,
        })
    }
}

/// Pack an LSB-first word of bits into an integer.
pub fn bits_to_u64(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
}

pub fn u64_to_bits(value: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| value >> i & 1 == 1).collect()
}
