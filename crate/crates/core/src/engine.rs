//! Generator for the fully unrolled 128-stage double-SHA-256 engine.
//!
//! Each pipeline stage is one round: a compression block (CFG) updating a..h and
//! a message-schedule block (MSU) producing `W[t+16]` while rounds 0..47 still
//! need new words. Rotations and shifts are wiring; round constants are tied off.
//! The intermediate hash collector (IHC) adds the chaining values after round 63
//! of each hash.
//!
//! Stages sharing a shape (MSU present or not, W+K precompute present or not)
//! share one costed netlist; layouts record the per-stage specifics.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::adders::{carry_save, kogge_stone, ripple_carry, AdderKind};
use crate::cell::{CellLibrary, DREG};
use crate::cost::{self, CostReport, CriticalPath, PhysicsConstants};
use crate::error::{Error, Result};
use crate::jtl::{attribute, insert_jtls, Attribution, JtlAnnotation};
use crate::netlist::{Category, NetId, Netlist, NetlistBuilder, Word};
use crate::sha::K;

pub const WIDTH: usize = 32;
pub const ROUNDS: usize = 64;
pub const FULL_STAGES: usize = 2 * ROUNDS;
/// Rounds that still compute a new schedule word.
pub const MSU_ROUNDS: usize = 48;
/// Window positions kept in registers under delay-line storage.
pub const DELAY_LINE_TAPS: [usize; 4] = [0, 1, 9, 14];
/// Bypass interface: four 32-bit words per stage boundary.
pub const BYPASS_WORDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AdderStrategy {
    Rca,
    /// Kogge-Stone on the four CFG adders of the T1 -> a' chain.
    KsaCritical,
    Csa3,
    /// Four-operand CSA for T1 and W[t+16], with W+K computed a stage early.
    Csa4,
    Csa4DelayLine,
}

impl AdderStrategy {
    pub const ALL: [AdderStrategy; 5] = [
        AdderStrategy::Rca,
        AdderStrategy::KsaCritical,
        AdderStrategy::Csa3,
        AdderStrategy::Csa4,
        AdderStrategy::Csa4DelayLine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdderStrategy::Rca => "RCA",
            AdderStrategy::KsaCritical => "KSA",
            AdderStrategy::Csa3 => "CSA3",
            AdderStrategy::Csa4 => "CSA4",
            AdderStrategy::Csa4DelayLine => "CSA4+DL",
        }
    }

    fn precomputes_wk(self) -> bool {
        matches!(self, AdderStrategy::Csa4 | AdderStrategy::Csa4DelayLine)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StorageStrategy {
    Registers,
    DelayLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EngineConfig {
    pub adder: AdderStrategy,
    pub storage: StorageStrategy,
    pub stages: usize,
    pub spare_stages: usize,
    pub redundant_mux: bool,
}

impl EngineConfig {
    pub fn new(adder: AdderStrategy) -> Self {
        let storage = if adder == AdderStrategy::Csa4DelayLine {
            StorageStrategy::DelayLine
        } else {
            StorageStrategy::Registers
        };
        EngineConfig {
            adder,
            storage,
            stages: FULL_STAGES,
            spare_stages: 0,
            redundant_mux: false,
        }
    }

    pub fn with_spares(mut self, spares: usize, redundant_mux: bool) -> Self {
        self.spare_stages = spares;
        self.redundant_mux = redundant_mux;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages == 0 || self.stages > FULL_STAGES {
            return Err(Error::Config(format!(
                "stages must be in 1..={FULL_STAGES}, got {}",
                self.stages
            )));
        }
        if self.adder == AdderStrategy::Csa4DelayLine && self.storage != StorageStrategy::DelayLine {
            return Err(Error::Config("CSA4+DL requires delay-line storage".into()));
        }
        if self.redundant_mux && self.spare_stages == 0 {
            return Err(Error::Config("redundant muxes need at least one spare stage".into()));
        }
        Ok(())
    }

    pub fn uses_wk(&self) -> bool {
        self.adder.precomputes_wk()
    }

    pub fn physical_stages(&self) -> usize {
        self.stages + self.spare_stages
    }

    pub fn label(&self) -> String {
        let mut s = self.adder.name().to_string();
        if self.storage == StorageStrategy::DelayLine && self.adder != AdderStrategy::Csa4DelayLine {
            s.push_str("+DL");
        }
        if self.spare_stages > 0 {
            s.push_str(&format!("+{}spare", self.spare_stages));
        }
        if self.redundant_mux {
            s.push_str("+rmux");
        }
        s
    }
}

/// Stage netlist plus the bit ranges of its named word ports.
#[derive(Debug, Clone)]
pub struct StageNetlist {
    pub netlist: Netlist,
    pub inputs: Vec<(String, Range<usize>)>,
    pub outputs: Vec<(String, Range<usize>)>,
}

impl StageNetlist {
    pub fn input_range(&self, name: &str) -> Option<Range<usize>> {
        self.inputs.iter().find(|(n, _)| n == name).map(|(_, r)| r.clone())
    }

    pub fn output_range(&self, name: &str) -> Option<Range<usize>> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, r)| r.clone())
    }

    /// Evaluate with word-valued inputs; missing words are an error.
    pub fn eval_words(&self, inputs: &BTreeMap<String, u32>) -> Result<BTreeMap<String, u32>> {
        let mut bits = vec![false; self.netlist.inputs.len()];
        for (name, r) in &self.inputs {
            let v = *inputs
                .get(name)
                .ok_or_else(|| Error::MissingInput(name.clone()))?;
            for (k, i) in r.clone().enumerate() {
                bits[i] = v >> k & 1 == 1;
            }
        }
        let out = self.netlist.eval(&bits)?;
        Ok(self
            .outputs
            .iter()
            .map(|(n, r)| {
                let v = r.clone().enumerate().fold(0u32, |acc, (k, i)| acc | (out[i] as u32) << k);
                (n.clone(), v)
            })
            .collect())
    }
}

struct PortedBuilder<'a> {
    b: NetlistBuilder<'a>,
    inputs: Vec<(String, Range<usize>)>,
    outputs: Vec<(String, Range<usize>)>,
    n_in: usize,
    n_out: usize,
}

impl<'a> PortedBuilder<'a> {
    fn new(name: &str, lib: &'a CellLibrary) -> Self {
        PortedBuilder {
            b: NetlistBuilder::new(name, lib),
            inputs: Vec::new(),
            outputs: Vec::new(),
            n_in: 0,
            n_out: 0,
        }
    }

    fn input(&mut self, name: &str) -> Word {
        let w = self.b.input_word(name, WIDTH);
        self.inputs.push((name.to_string(), self.n_in..self.n_in + WIDTH));
        self.n_in += WIDTH;
        w
    }

    fn output(&mut self, name: &str, w: &[NetId]) {
        self.b.output_word(w);
        self.outputs.push((name.to_string(), self.n_out..self.n_out + w.len()));
        self.n_out += w.len();
    }

    fn finish(self) -> Result<StageNetlist> {
        Ok(StageNetlist {
            netlist: self.b.build()?,
            inputs: self.inputs,
            outputs: self.outputs,
        })
    }
}

fn rotr(x: &[NetId], r: usize) -> Word {
    (0..WIDTH).map(|i| x[(i + r) % WIDTH]).collect()
}

fn shr(x: &[NetId], r: usize) -> Vec<Option<NetId>> {
    (0..WIDTH).map(|i| x.get(i + r).copied()).collect()
}

fn xor_terms(b: &mut NetlistBuilder, terms: &[Vec<Option<NetId>>]) -> Word {
    (0..WIDTH)
        .map(|i| {
            let mut present = terms.iter().filter_map(|t| t[i]);
            let first = present.next().expect("at least one term per bit");
            present.fold(first, |acc, t| b.gate("XOR", &[acc, t]))
        })
        .collect()
}

fn some(w: Word) -> Vec<Option<NetId>> {
    w.into_iter().map(Some).collect()
}

/// Role of every adder in a stage, with the kind used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdderSlot {
    pub role: String,
    pub kind: AdderKind,
    pub operands: usize,
    pub width: usize,
}

struct StageGen<'a, 'b> {
    pb: &'b mut PortedBuilder<'a>,
    strategy: AdderStrategy,
    adders: Vec<AdderSlot>,
}

impl<'a> StageGen<'a, '_> {
    fn add(&mut self, role: &str, x: &[NetId], y: &[NetId]) -> Word {
        let kind = match (self.strategy, role) {
            (AdderStrategy::KsaCritical, "x1" | "x2" | "t1" | "a") => AdderKind::Ksa,
            _ => AdderKind::Rca,
        };
        let b = &mut self.pb.b;
        b.block(role, Category::Adder);
        let zero = b.constant(false);
        let sum = match kind {
            AdderKind::Ksa => kogge_stone(b, x, y, zero).0,
            _ => ripple_carry(b, x, y, zero).0,
        };
        self.adders.push(AdderSlot {
            role: role.into(),
            kind,
            operands: 2,
            width: WIDTH,
        });
        sum
    }

    fn csa(&mut self, role: &str, ops: &[Word]) -> Word {
        let b = &mut self.pb.b;
        b.block(role, Category::Adder);
        let sum = carry_save(b, ops);
        self.adders.push(AdderSlot {
            role: role.into(),
            kind: AdderKind::Csa,
            operands: ops.len(),
            width: WIDTH,
        });
        sum
    }

    fn other(&mut self, name: &str) -> &mut NetlistBuilder<'a> {
        self.pb.b.block(name, Category::Other);
        &mut self.pb.b
    }
}

/// Whether round `r` of a hash computes a schedule word / precomputes the next W+K.
pub fn stage_shape(round: usize, cfg: &EngineConfig) -> ShapeKey {
    ShapeKey {
        msu: round < MSU_ROUNDS,
        wk_next: cfg.uses_wk() && round + 1 < ROUNDS,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ShapeKey {
    pub msu: bool,
    pub wk_next: bool,
}

/// Combinational netlist of one pipeline stage computing `round` (0..63).
///
/// Inputs: `a`..`h`, the schedule window (`w0`..`w15`, or only the tap words
/// under delay-line storage) and `wk` when W+K is precomputed. Outputs are the
/// next stage's register inputs; pure copies (b' = a, ...) appear as outputs
/// driven directly by inputs.
pub fn build_stage(cfg: &EngineConfig, round: usize, lib: &CellLibrary) -> Result<(StageNetlist, Vec<AdderSlot>)> {
    if round >= ROUNDS {
        return Err(Error::Config(format!("round {round} out of range")));
    }
    let key = stage_shape(round, cfg);
    let mut pb = PortedBuilder::new(&format!("stage_r{round}"), lib);
    let r: Vec<Word> = ["a", "b", "c", "d", "e", "f", "g", "h"]
        .iter()
        .map(|n| pb.input(n))
        .collect();
    let window_slots: Vec<usize> = match cfg.storage {
        StorageStrategy::Registers => (0..16).collect(),
        StorageStrategy::DelayLine => DELAY_LINE_TAPS.to_vec(),
    };
    let mut w: BTreeMap<usize, Word> = BTreeMap::new();
    for &j in &window_slots {
        w.insert(j, pb.input(&format!("w{j}")));
    }
    let wk = cfg.uses_wk().then(|| pb.input("wk"));
    let k_word = pb.b.const_word(K[round] as u64, WIDTH);
    let k_next = key
        .wk_next
        .then(|| pb.b.const_word(K[round + 1] as u64, WIDTH));
    let (a, b_, c, d, e, f, g, h) = (&r[0], &r[1], &r[2], &r[3], &r[4], &r[5], &r[6], &r[7]);

    let mut sg = StageGen {
        pb: &mut pb,
        strategy: cfg.adder,
        adders: Vec::new(),
    };
    let s1 = {
        let b = sg.other("sigma1");
        xor_terms(b, &[some(rotr(e, 6)), some(rotr(e, 11)), some(rotr(e, 25))])
    };
    let chv: Word = {
        let b = sg.other("ch");
        (0..WIDTH)
            .map(|i| {
                let ef = b.gate("AND", &[e[i], f[i]]);
                let ge = b.gate("ANOTB", &[g[i], e[i]]);
                b.gate("OR", &[ef, ge])
            })
            .collect()
    };
    let s0 = {
        let b = sg.other("sigma0");
        xor_terms(b, &[some(rotr(a, 2)), some(rotr(a, 13)), some(rotr(a, 22))])
    };
    let mj: Word = {
        let b = sg.other("maj");
        (0..WIDTH)
            .map(|i| {
                let ab = b.gate("AND", &[a[i], b_[i]]);
                let aob = b.gate("OR", &[a[i], b_[i]]);
                let cab = b.gate("AND", &[c[i], aob]);
                b.gate("OR", &[ab, cab])
            })
            .collect()
    };
    let (ss0, ss1) = if key.msu {
        let w1 = w[&1].clone();
        let w14 = w[&14].clone();
        let b = sg.other("ssigma0");
        let ss0 = xor_terms(b, &[some(rotr(&w1, 7)), some(rotr(&w1, 18)), shr(&w1, 3)]);
        let b = sg.other("ssigma1");
        let ss1 = xor_terms(b, &[some(rotr(&w14, 17)), some(rotr(&w14, 19)), shr(&w14, 10)]);
        (Some(ss0), Some(ss1))
    } else {
        (None, None)
    };

    let (a_next, e_next, w16, wk_next);
    match cfg.adder {
        AdderStrategy::Rca | AdderStrategy::KsaCritical => {
            let kw = sg.add("kw", &w[&0], &k_word);
            let x1 = sg.add("x1", &s1, &chv);
            let x2 = sg.add("x2", &x1, h);
            let t1 = sg.add("t1", &x2, &kw);
            let t2 = sg.add("t2", &s0, &mj);
            a_next = sg.add("a", &t1, &t2);
            e_next = sg.add("e", d, &t1);
            w16 = key.msu.then(|| {
                let m1 = sg.add("m1", ss1.as_ref().unwrap(), &w[&9]);
                let m2 = sg.add("m2", &m1, ss0.as_ref().unwrap());
                sg.add("m3", &m2, &w[&0])
            });
            wk_next = None;
        }
        AdderStrategy::Csa3 => {
            let x2 = sg.csa("x2", &[s1.clone(), chv.clone(), h.clone()]);
            let kw = sg.add("kw", &w[&0], &k_word);
            let t1 = sg.add("t1", &x2, &kw);
            let t2 = sg.add("t2", &s0, &mj);
            a_next = sg.add("a", &t1, &t2);
            e_next = sg.add("e", d, &t1);
            w16 = key.msu.then(|| {
                let m2 = sg.csa("m2", &[ss1.clone().unwrap(), w[&9].clone(), ss0.clone().unwrap()]);
                sg.add("m3", &m2, &w[&0])
            });
            wk_next = None;
        }
        AdderStrategy::Csa4 | AdderStrategy::Csa4DelayLine => {
            let wk = wk.clone().unwrap();
            let t1 = sg.csa("t1", &[h.clone(), s1.clone(), chv.clone(), wk]);
            a_next = sg.csa("a", &[t1.clone(), s0.clone(), mj.clone()]);
            e_next = sg.add("e", d, &t1);
            w16 = key.msu.then(|| {
                sg.csa(
                    "w16",
                    &[ss1.clone().unwrap(), w[&9].clone(), ss0.clone().unwrap(), w[&0].clone()],
                )
            });
            wk_next = k_next.as_ref().map(|kn| sg.add("wk", &w[&1], kn));
        }
    }
    let adders = sg.adders;

    pb.output("a", &a_next);
    pb.output("b", a);
    pb.output("c", b_);
    pb.output("d", c);
    pb.output("e", &e_next);
    pb.output("f", e);
    pb.output("g", f);
    pb.output("h", g);
    match cfg.storage {
        StorageStrategy::Registers => {
            for j in 0..15 {
                pb.output(&format!("w{j}"), &w[&(j + 1)]);
            }
            let last = match &w16 {
                Some(x) => x.clone(),
                None => pb.b.const_word(0, WIDTH),
            };
            pb.output("w15", &last);
        }
        StorageStrategy::DelayLine => {
            // w1 moves to the next w0 register; w9/w14/W[t+16] enter line segments.
            pb.output("w0", &w[&1]);
            pb.output("line8", &w[&9]);
            pb.output("line13", &w[&14]);
            if let Some(x) = &w16 {
                pb.output("line15", x);
            }
        }
    }
    if let Some(x) = &wk_next {
        pb.output("wk", x);
    }
    Ok((pb.finish()?, adders))
}

/// Netlist with its JTL annotation and JJ attribution.
#[derive(Debug, Clone)]
pub struct CostedNetlist {
    pub netlist: Netlist,
    pub jtl: JtlAnnotation,
    pub attribution: Attribution,
    pub gate_jj: BTreeMap<Category, u64>,
}

impl CostedNetlist {
    pub fn new(netlist: Netlist, lib: &CellLibrary) -> Self {
        let jtl = insert_jtls(&netlist, lib);
        let attribution = attribute(&netlist, &jtl, lib);
        let mut gate_jj: BTreeMap<Category, u64> = Category::ALL.iter().map(|&c| (c, 0)).collect();
        for g in &netlist.gates {
            *gate_jj.get_mut(&netlist.gate_category(g.id)).unwrap() += lib.jj(&g.cell) as u64;
        }
        CostedNetlist {
            netlist,
            jtl,
            attribution,
            gate_jj,
        }
    }

    pub fn jj_gate(&self) -> u64 {
        self.gate_jj.values().sum()
    }

    pub fn jj_interconnect(&self) -> u64 {
        self.jtl.total_interconnect_jj
    }

    pub fn jj_system(&self) -> u64 {
        cost::system_jj(self.jj_gate(), self.jj_interconnect())
    }

    pub fn breakdown(&self) -> BTreeMap<Category, u64> {
        Category::ALL
            .iter()
            .map(|c| (*c, self.gate_jj[c] + self.attribution.by_category[c]))
            .collect()
    }

    pub fn critical_path(&self, lib: &CellLibrary, phys: &PhysicsConstants, skew: f64) -> CriticalPath {
        cost::critical_path(&self.netlist, &self.jtl, lib, phys.t_switch, skew)
    }
}

/// Cost of a standalone adder after the JTL pass.
pub fn standalone_adder_jj(kind: AdderKind, width: usize, operands: usize, lib: &CellLibrary) -> Result<u64> {
    let nl = crate::adders::adder_block(kind, width, operands, lib)?;
    Ok(CostedNetlist::new(nl, lib).jj_system())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BypassBlock {
    /// 32-bit 2:1 multiplexers.
    pub mux2_words: usize,
    /// 32-bit 8:1 multiplexers (redundant path).
    pub mux8_words: usize,
}

impl BypassBlock {
    pub fn jj(&self, lib: &CellLibrary) -> u64 {
        (WIDTH * (self.mux2_words * lib.jj("MUX2") as usize + self.mux8_words * lib.jj("MUX8") as usize))
            as u64
    }

    pub fn mux_blocks(&self) -> usize {
        self.mux2_words + self.mux8_words
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageLayout {
    pub index: usize,
    /// (hash, round); `None` for spare stages.
    pub round: Option<(usize, usize)>,
    pub spare: bool,
    pub shape: usize,
    /// 32-bit words held in registers by the schedule window (+ W+K register).
    pub msu_registers: usize,
    pub cfg_registers: usize,
    /// One-cycle 32-bit delay-line segments.
    pub delay_line_segments: usize,
    pub adders: Vec<AdderSlot>,
    pub round_constant: u32,
    /// Boundary in front of this stage.
    pub bypass: Option<BypassBlock>,
}

/// Storage JJs of one stage.
pub fn storage_cost(layout: &StageLayout, lib: &CellLibrary) -> u64 {
    let reg = (layout.msu_registers + layout.cfg_registers) * WIDTH * lib.register_bit_jj() as usize;
    let line = layout.delay_line_segments * WIDTH * lib.delay_line_jj_per_cycle_bit as usize;
    (reg + line) as u64
}

#[derive(Debug, Clone)]
pub struct StageShape {
    pub key: ShapeKey,
    pub stage: StageNetlist,
    pub cost: CostedNetlist,
    pub adders: Vec<AdderSlot>,
    /// Block-level critical path in JJ switchings.
    pub depth: u64,
}

#[derive(Debug, Clone)]
pub struct EngineDesign {
    pub config: EngineConfig,
    pub layouts: Vec<StageLayout>,
    pub shapes: Vec<StageShape>,
    pub ihc: CostedNetlist,
    /// Midstate holding registers in the hash collector.
    pub ihc_register_jj: u64,
    pub adder_count: usize,
    pub boundaries: usize,
    pub bypass_jj: u64,
    /// Cycle-determining depth including bypass muxes.
    pub stage_depth: u64,
    storage_jj: u64,
}

/// Window slots stage `round` reads.
pub fn window_reads(cfg: &EngineConfig, round: usize) -> Vec<usize> {
    let key = stage_shape(round, cfg);
    let mut r = Vec::new();
    if key.msu || !cfg.uses_wk() {
        r.push(0);
    }
    if key.msu || key.wk_next {
        r.push(1);
    }
    if key.msu {
        r.extend([9, 14]);
    }
    r
}

/// Window slots at the input of stage `round` whose word is still read by this
/// or a later stage of the same hash.
pub fn live_window_slots(cfg: &EngineConfig, round: usize) -> Vec<usize> {
    (0..16)
        .filter(|&j| {
            (round..ROUNDS)
                .take_while(|&t| t - round <= j)
                .any(|t| window_reads(cfg, t).contains(&(j - (t - round))))
        })
        .collect()
}

/// (tap registers, one-cycle line segments) of the schedule window under
/// delay-line storage. Lines are cut to the lifetime of the words they carry.
pub fn delay_line_storage(cfg: &EngineConfig, round: Option<usize>) -> (usize, usize) {
    let Some(round) = round else {
        // spares must cover the fullest round
        return (DELAY_LINE_TAPS.len(), 16 - DELAY_LINE_TAPS.len());
    };
    let reads = window_reads(cfg, round);
    let live = live_window_slots(cfg, round);
    let segments = live.iter().filter(|j| !reads.contains(j)).count();
    (reads.len(), segments)
}

fn layout_for(cfg: &EngineConfig, index: usize, round: Option<(usize, usize)>, shape: usize, adders: Vec<AdderSlot>) -> StageLayout {
    let wk = cfg.uses_wk() as usize;
    let (msu_registers, segments) = match cfg.storage {
        StorageStrategy::Registers => (16 + wk, 0),
        StorageStrategy::DelayLine => {
            let (taps, seg) = delay_line_storage(cfg, round.map(|(_, r)| r));
            (taps + wk, seg)
        }
    };
    let bypass = (cfg.spare_stages > 0).then_some(BypassBlock {
        mux2_words: BYPASS_WORDS,
        mux8_words: cfg.redundant_mux as usize,
    });
    StageLayout {
        index,
        round,
        spare: round.is_none(),
        shape,
        msu_registers,
        cfg_registers: 8,
        delay_line_segments: segments,
        adders,
        round_constant: round.map_or(0, |(_, r)| K[r]),
        bypass,
    }
}

/// Intermediate hash collector: chaining additions after each hash, plus the
/// first W+K of each hash when W+K is precomputed.
fn build_ihc(cfg: &EngineConfig, lib: &CellLibrary) -> Result<(Netlist, usize)> {
    let mut b = NetlistBuilder::new("ihc", lib);
    let mut adders = 0;
    let hashes = cfg.stages.div_ceil(ROUNDS);
    for hsh in 0..hashes {
        let state: Vec<Word> = (0..8).map(|i| b.input_word(&format!("s{hsh}_{i}"), WIDTH)).collect();
        let chain: Vec<Word> = (0..8)
            .map(|i| {
                if hsh == 0 {
                    b.input_word(&format!("mid_{i}"), WIDTH)
                } else {
                    b.const_word(crate::sha::IV[i] as u64, WIDTH)
                }
            })
            .collect();
        let mut digest = Vec::new();
        for i in 0..8 {
            b.block(&format!("ihc{hsh}_{i}"), Category::Adder);
            let zero = b.constant(false);
            let (s, _) = ripple_carry(&mut b, &state[i], &chain[i], zero);
            adders += 1;
            b.output_word(&s);
            digest.push(s);
        }
        if cfg.uses_wk() {
            // W[0] + K[0] for this hash's first stage.
            let w0 = if hsh == 0 {
                b.input_word(&format!("w0_{hsh}"), WIDTH)
            } else {
                digest[0].clone()
            };
            let k0 = b.const_word(K[0] as u64, WIDTH);
            b.block(&format!("wk0_{hsh}"), Category::Adder);
            let zero = b.constant(false);
            let (s, _) = ripple_carry(&mut b, &w0, &k0, zero);
            adders += 1;
            b.output_word(&s);
        }
    }
    Ok((b.build()?, adders))
}

pub fn generate_engine(cfg: &EngineConfig, lib: &CellLibrary) -> Result<EngineDesign> {
    cfg.validate()?;
    let phys = PhysicsConstants::default();
    let mut shapes: Vec<StageShape> = Vec::new();
    let mut shape_of: BTreeMap<ShapeKey, usize> = BTreeMap::new();
    let mut shape_for_round = |round: usize, shapes: &mut Vec<StageShape>| -> Result<usize> {
        let key = stage_shape(round, cfg);
        if let Some(&i) = shape_of.get(&key) {
            return Ok(i);
        }
        let (stage, adders) = build_stage(cfg, round, lib)?;
        let cost = CostedNetlist::new(stage.netlist.clone(), lib);
        let depth = cost::block_critical_path(&cost.netlist, &cost.jtl, lib, phys.t_switch, 0.0)?.depth;
        shapes.push(StageShape {
            key,
            stage,
            cost,
            adders,
            depth,
        });
        shape_of.insert(key, shapes.len() - 1);
        Ok(shapes.len() - 1)
    };

    let mut layouts = Vec::with_capacity(cfg.physical_stages());
    for s in 0..cfg.stages {
        let (hsh, round) = (s / ROUNDS, s % ROUNDS);
        let shape = shape_for_round(round, &mut shapes)?;
        let adders = shapes[shape].adders.clone();
        layouts.push(layout_for(cfg, s, Some((hsh, round)), shape, adders));
    }
    for k in 0..cfg.spare_stages {
        // A spare must be able to stand in for any round: give it the full shape.
        let shape = shape_for_round(0, &mut shapes)?;
        let adders = shapes[shape].adders.clone();
        layouts.push(layout_for(cfg, cfg.stages + k, None, shape, adders));
    }

    let (ihc_nl, ihc_adders) = build_ihc(cfg, lib)?;
    let ihc = CostedNetlist::new(ihc_nl, lib);
    let hashes = cfg.stages.div_ceil(ROUNDS);
    let ihc_register_jj = (hashes.min(1) * 8 * WIDTH) as u64 * lib.jj(DREG) as u64;
    let adder_count = layouts.iter().map(|l| l.adders.len()).sum::<usize>() + ihc_adders;
    let storage_jj = layouts.iter().map(|l| storage_cost(l, lib)).sum();
    let boundaries = if cfg.spare_stages > 0 {
        cfg.physical_stages() + 1
    } else {
        0
    };
    let bypass_jj = layouts
        .first()
        .and_then(|l| l.bypass)
        .map_or(0, |b| b.jj(lib) * boundaries as u64);
    let mux_delay = if cfg.spare_stages > 0 {
        let mut d = lib.cells["MUX2"].delay_depth + lib.jtl_delay();
        if cfg.redundant_mux {
            d += lib.cells["MUX8"].delay_depth + lib.jtl_delay();
        }
        d as u64
    } else {
        0
    };
    let stage_depth = shapes.iter().map(|s| s.depth).max().unwrap_or(0) + mux_delay;
    Ok(EngineDesign {
        config: *cfg,
        layouts,
        shapes,
        ihc,
        ihc_register_jj,
        adder_count,
        boundaries,
        bypass_jj,
        stage_depth,
        storage_jj,
    })
}

/// Same design with `spares` spare stages and bypass muxes on every boundary.
pub fn add_fault_tolerance(design: &EngineDesign, spares: usize, redundant: bool, lib: &CellLibrary) -> Result<EngineDesign> {
    if spares == 0 && !redundant {
        return Ok(design.clone());
    }
    generate_engine(&design.config.with_spares(spares, redundant), lib)
}

impl EngineDesign {
    fn stage_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.shapes.len()];
        for l in &self.layouts {
            counts[l.shape] += 1;
        }
        counts
    }

    pub fn storage_jj(&self) -> u64 {
        self.storage_jj
    }

    pub fn jj_gate(&self) -> u64 {
        let counts = self.stage_counts();
        let comb: u64 = self
            .shapes
            .iter()
            .zip(&counts)
            .map(|(s, &n)| s.cost.jj_gate() * n)
            .sum();
        comb + self.storage_jj + self.ihc.jj_gate() + self.ihc_register_jj + self.bypass_jj
    }

    pub fn jj_interconnect(&self) -> u64 {
        let counts = self.stage_counts();
        let comb: u64 = self
            .shapes
            .iter()
            .zip(&counts)
            .map(|(s, &n)| s.cost.jj_interconnect() * n)
            .sum();
        comb + self.ihc.jj_interconnect()
    }

    pub fn jj_system(&self) -> u64 {
        cost::system_jj(self.jj_gate(), self.jj_interconnect())
    }

    /// Adders / registers / other; exhaustive and disjoint.
    pub fn complexity_breakdown(&self) -> BTreeMap<Category, u64> {
        let counts = self.stage_counts();
        let mut out: BTreeMap<Category, u64> = Category::ALL.iter().map(|&c| (c, 0)).collect();
        for (s, &n) in self.shapes.iter().zip(&counts) {
            for (c, v) in s.cost.breakdown() {
                *out.get_mut(&c).unwrap() += v * n;
            }
        }
        for (c, v) in self.ihc.breakdown() {
            *out.get_mut(&c).unwrap() += v;
        }
        *out.get_mut(&Category::Register).unwrap() += self.storage_jj;
        *out.get_mut(&Category::Other).unwrap() += self.ihc_register_jj + self.bypass_jj;
        out
    }

    /// JJs of one physical stage (logic + storage + its boundary muxes).
    pub fn stage_jj(&self, index: usize, lib: &CellLibrary) -> u64 {
        let l = &self.layouts[index];
        self.shapes[l.shape].cost.jj_system() + storage_cost(l, lib) + l.bypass.map_or(0, |b| b.jj(lib))
    }

    /// Mean JJs per pipeline stage, hash collector excluded.
    pub fn mean_stage_jj(&self, lib: &CellLibrary) -> f64 {
        let total: u64 = (0..self.layouts.len()).map(|i| self.stage_jj(i, lib)).sum();
        total as f64 / self.layouts.len() as f64
    }

    pub fn cost_report(&self, calib: &Calibration, phys: &PhysicsConstants, alpha: f64) -> Result<CostReport> {
        CostReport::new(
            &self.config.label(),
            self.jj_gate(),
            self.jj_interconnect(),
            self.stage_depth,
            calib.cycle_time(self.stage_depth, phys),
            alpha,
            phys,
            self.complexity_breakdown(),
        )
    }
}

/// Whether published hashrates already include the clock-skew margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkewMode {
    Included,
    Excluded,
}

/// Maps JJ-switching depth to seconds. Cell delays are unpublished, so the
/// baseline RCA engine is anchored to its published hashrate and every other
/// design follows from its depth ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub anchor_depth: u64,
    pub anchor_hashrate: f64,
    pub skew_margin: f64,
    pub skew_mode: SkewMode,
}

impl Calibration {
    pub fn anchored(anchor_depth: u64, anchor_hashrate: f64) -> Self {
        Calibration {
            anchor_depth,
            anchor_hashrate,
            skew_margin: cost::SKEW_MARGIN,
            skew_mode: SkewMode::Included,
        }
    }

    /// Anchor on the baseline RCA engine built from `lib`.
    pub fn from_baseline(lib: &CellLibrary, anchor_hashrate: f64) -> Result<Self> {
        let d = generate_engine(&EngineConfig::new(AdderStrategy::Rca), lib)?;
        Ok(Self::anchored(d.stage_depth, anchor_hashrate))
    }

    /// Seconds per JJ switching, skew margin included.
    pub fn seconds_per_switch(&self) -> f64 {
        let t = 1.0 / (self.anchor_hashrate * self.anchor_depth as f64);
        match self.skew_mode {
            SkewMode::Included => t,
            SkewMode::Excluded => t * (1.0 + self.skew_margin),
        }
    }

    /// Ratio of calibrated switching time to the nominal one.
    pub fn scale(&self, phys: &PhysicsConstants) -> f64 {
        self.seconds_per_switch() / (phys.t_switch * (1.0 + self.skew_margin))
    }

    pub fn cycle_time(&self, depth: u64, _phys: &PhysicsConstants) -> f64 {
        depth as f64 * self.seconds_per_switch()
    }

    pub fn hashrate(&self, depth: u64) -> f64 {
        1.0 / (depth as f64 * self.seconds_per_switch())
    }
}
