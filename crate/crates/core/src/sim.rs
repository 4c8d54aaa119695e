//! Word-level, cycle-accurate simulation of the unrolled double-SHA pipeline.
//!
//! Every physical stage holds one architectural state (a..h, the 16-word
//! schedule window and, with W+K precompute, the `wk` word) at its input. Each
//! cycle every occupied stage applies its round and hands the result to the next
//! stage. Bypassed stages forward their input unchanged but still take a cycle.
//! The hash collector sits behind the stage computing round 63 of the first hash
//! and behind the last stage.

use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::engine::{live_window_slots, EngineConfig, EngineDesign, FULL_STAGES, MSU_ROUNDS, ROUNDS};
use crate::error::{Error, Result};
use crate::fault::FaultMap;
use crate::sha::{
    big_sigma0, big_sigma1, ch, digest_block, maj, meets_target, small_sigma0, small_sigma1,
    words_to_digest, Digest, Header, IV, K,
};

pub const REG_BITS: usize = 8 * 32;
pub const WINDOW_BITS: usize = 16 * 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShaState {
    /// a..h
    pub regs: [u32; 8],
    /// `w[j]` = W[t + j] at the input of round t.
    pub w: [u32; 16],
    /// W[t] + K[t], precomputed by the previous stage.
    pub wk: u32,
}

impl ShaState {
    pub fn initial(chaining: &[u32; 8], block: &[u32; 16], uses_wk: bool) -> Self {
        ShaState {
            regs: *chaining,
            w: *block,
            wk: if uses_wk { block[0].wrapping_add(K[0]) } else { 0 },
        }
    }

    /// Architectural bits: regs, window, then wk when present.
    pub fn bit_count(uses_wk: bool) -> usize {
        REG_BITS + WINDOW_BITS + if uses_wk { 32 } else { 0 }
    }

    pub fn flip(&mut self, bit: usize) {
        let (word, b) = (bit / 32, bit % 32);
        match word {
            0..=7 => self.regs[word] ^= 1 << b,
            8..=23 => self.w[word - 8] ^= 1 << b,
            24 => self.wk ^= 1 << b,
            _ => panic!("state bit {bit} out of range"),
        }
    }

    /// Ones over regs, the listed window slots and wk.
    pub fn ones(&self, live: &[usize], uses_wk: bool) -> u32 {
        let mut n: u32 = self.regs.iter().map(|x| x.count_ones()).sum();
        n += live.iter().map(|&j| self.w[j].count_ones()).sum::<u32>();
        if uses_wk {
            n += self.wk.count_ones();
        }
        n
    }
}

/// One pipeline stage computing `round` (0..63) of a hash.
pub fn round_step(s: &ShaState, round: usize, uses_wk: bool) -> ShaState {
    let [a, b, c, d, e, f, g, h] = s.regs;
    let wk = if uses_wk { s.wk } else { s.w[0].wrapping_add(K[round]) };
    let t1 = h
        .wrapping_add(big_sigma1(e))
        .wrapping_add(ch(e, f, g))
        .wrapping_add(wk);
    let t2 = big_sigma0(a).wrapping_add(maj(a, b, c));
    let mut w = [0u32; 16];
    w[..15].copy_from_slice(&s.w[1..]);
    if round < MSU_ROUNDS {
        w[15] = small_sigma1(s.w[14])
            .wrapping_add(s.w[9])
            .wrapping_add(small_sigma0(s.w[1]))
            .wrapping_add(s.w[0]);
    }
    let wk = if uses_wk && round + 1 < ROUNDS {
        s.w[1].wrapping_add(K[round + 1])
    } else {
        0
    };
    ShaState {
        regs: [t1.wrapping_add(t2), a, b, c, d.wrapping_add(t1), e, f, g],
        w,
        wk,
    }
}

fn add8(x: &[u32; 8], y: &[u32; 8]) -> [u32; 8] {
    std::array::from_fn(|i| x[i].wrapping_add(y[i]))
}

/// Hash-collector work after logical round `logical` (0..127), if any.
/// Returns the state entering the next stage, or the final digest.
pub enum Collected {
    Next(ShaState),
    Digest(Digest),
}

fn collect(s: ShaState, logical: usize, midstate: &[u32; 8], uses_wk: bool) -> Collected {
    if logical == ROUNDS - 1 {
        let d1 = add8(&s.regs, midstate);
        Collected::Next(ShaState::initial(&IV, &digest_block(&d1), uses_wk))
    } else if logical == FULL_STAGES - 1 {
        Collected::Digest(words_to_digest(&add8(&s.regs, &IV)))
    } else {
        Collected::Next(s)
    }
}

/// Straight-line evaluation of one nonce, optionally flipping `bit` of the state
/// entering logical stage `stage`. Mirrors the fault-free pipeline exactly.
pub fn hash_nonce(header: &Header, nonce: u32, uses_wk: bool, flip: Option<(usize, usize)>) -> Digest {
    let mid = header.midstate();
    let mut s = ShaState::initial(&mid, &header.tail_block(nonce), uses_wk);
    for logical in 0..FULL_STAGES {
        if let Some((st, bit)) = flip {
            if st == logical {
                s.flip(bit);
            }
        }
        let next = round_step(&s, logical % ROUNDS, uses_wk);
        match collect(next, logical, &mid, uses_wk) {
            Collected::Next(n) => s = n,
            Collected::Digest(d) => return d,
        }
    }
    unreachable!("pipeline always ends in a digest")
}

/// Output bit a permanently faulty active stage corrupts: one bit of a..h.
pub fn stage_fault_bit(stage: usize) -> usize {
    (stage * 37 + 5) % REG_BITS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub nonce: u32,
    pub state: ShaState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Completed {
    pub nonce: u32,
    pub digest: Digest,
    pub cycle: u64,
}

/// Contents of every stage input register plus the bypass selects.
#[derive(Debug, Clone)]
pub struct PipelineState {
    pub header: Header,
    pub midstate: [u32; 8],
    pub slots: Vec<Option<Slot>>,
    pub bypass: Vec<bool>,
    pub cycle: u64,
}

impl PipelineState {
    /// Empty pipeline; spare stages (the last ones) start bypassed.
    pub fn new(design: &EngineDesign, header: Header) -> Self {
        let p = design.layouts.len();
        let bypass = (0..p).map(|i| i >= design.config.stages).collect();
        PipelineState {
            header,
            midstate: header.midstate(),
            slots: vec![None; p],
            bypass,
            cycle: 0,
        }
    }

    /// Bypass exactly the given physical stages.
    pub fn set_bypass(&mut self, stages: &[usize]) {
        for (i, b) in self.bypass.iter_mut().enumerate() {
            *b = stages.contains(&i);
        }
    }

    pub fn occupied(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Logical round index of each active physical stage.
    fn logical_rounds(&self) -> Vec<Option<usize>> {
        let mut k = 0;
        self.bypass
            .iter()
            .map(|&b| {
                if b {
                    None
                } else {
                    k += 1;
                    Some(k - 1)
                }
            })
            .collect()
    }
}

fn check_dims(state: &PipelineState, design: &EngineDesign) -> Result<()> {
    let p = design.layouts.len();
    if design.config.stages != FULL_STAGES {
        return Err(Error::Dimension(format!(
            "simulation needs all {FULL_STAGES} stages, design has {}",
            design.config.stages
        )));
    }
    if state.slots.len() != p || state.bypass.len() != p {
        return Err(Error::Dimension(format!(
            "pipeline state has {} stages, design {p}",
            state.slots.len()
        )));
    }
    let active = state.bypass.iter().filter(|b| !**b).count();
    if active != FULL_STAGES {
        return Err(Error::Dimension(format!(
            "{active} active stages, need {FULL_STAGES}"
        )));
    }
    Ok(())
}

/// Advance one cycle, optionally feeding `input` into stage 0.
pub fn step_pipeline(
    state: &mut PipelineState,
    design: &EngineDesign,
    faults: Option<&FaultMap>,
    input: Option<u32>,
) -> Result<Vec<Completed>> {
    check_dims(state, design)?;
    let uses_wk = design.config.uses_wk();
    let p = state.slots.len();
    if let Some(t) = faults.and_then(|f| f.transient) {
        if t.cycle == state.cycle {
            if let Some(Some(slot)) = state.slots.get_mut(t.stage) {
                slot.state.flip(t.bit);
            }
        }
    }
    let logical = state.logical_rounds();
    let mut done = Vec::new();
    let mut next: Vec<Option<Slot>> = vec![None; p];
    for i in (0..p).rev() {
        let Some(slot) = state.slots[i] else { continue };
        let out = match logical[i] {
            None => Collected::Next(slot.state),
            Some(l) => {
                let mut s = round_step(&slot.state, l % ROUNDS, uses_wk);
                if faults.is_some_and(|f| f.stages.contains(&i)) {
                    s.flip(stage_fault_bit(i));
                }
                collect(s, l, &state.midstate, uses_wk)
            }
        };
        match out {
            Collected::Digest(digest) => done.push(Completed {
                nonce: slot.nonce,
                digest,
                cycle: state.cycle + 1,
            }),
            Collected::Next(s) if i + 1 < p => {
                next[i + 1] = Some(Slot {
                    nonce: slot.nonce,
                    state: s,
                })
            }
            // stage after the last active one: only bypassed stages remain
            Collected::Next(_) => {
                return Err(Error::Dimension("pipeline ended before the final round".into()))
            }
        }
    }
    if let Some(n) = input {
        let block = state.header.tail_block(n);
        next[0] = Some(Slot {
            nonce: n,
            state: ShaState::initial(&state.midstate, &block, uses_wk),
        });
    }
    state.slots = next;
    state.cycle += 1;
    Ok(done)
}

/// Stream `nonces` through the pipeline and drain it.
pub fn run_nonces(
    state: &mut PipelineState,
    design: &EngineDesign,
    faults: Option<&FaultMap>,
    nonces: impl IntoIterator<Item = u32>,
) -> Result<Vec<Completed>> {
    let mut out = Vec::new();
    for n in nonces {
        out.extend(step_pipeline(state, design, faults, Some(n))?);
    }
    while state.occupied() > 0 {
        out.extend(step_pipeline(state, design, faults, None)?);
    }
    Ok(out)
}

/// Digest of one nonce through a fresh pipeline with the given bypass set.
pub fn run_single(
    design: &EngineDesign,
    header: &Header,
    bypass: &[usize],
    faults: Option<&FaultMap>,
    nonce: u32,
) -> Result<Digest> {
    let mut st = PipelineState::new(design, *header);
    st.set_bypass(bypass);
    let out = run_nonces(&mut st, design, faults, [nonce])?;
    Ok(out[0].digest)
}

/// Mining work unit.
///
/// JSON: `{"header": "<160 hex chars>", "nonce_start": 0, "nonce_end": 1023,
/// "target": "<hex>"}`. The range is inclusive; the target is a big-endian hex
/// integer up to 2^256 (`"1" + 64 zeros`). The header is the 80-byte bitcoin
/// wire header; its nonce field (bytes 76..80, little-endian) is overwritten.
#[derive(Debug, Clone, PartialEq)]
pub struct MiningJob {
    pub header: Header,
    pub nonce_start: u32,
    pub nonce_end: u32,
    pub target: BigUint,
}

#[derive(Serialize, Deserialize)]
struct JobFile {
    header: String,
    nonce_start: u32,
    nonce_end: u32,
    target: String,
}

impl MiningJob {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: JobFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("job file: {e}")))?;
        let header = Header::from_hex(&f.header).map_err(Error::Validation)?;
        let target = BigUint::parse_bytes(f.target.trim().trim_start_matches("0x").as_bytes(), 16)
            .ok_or_else(|| Error::Validation(format!("target is not hex: {}", f.target)))?;
        if target > BigUint::from(1u8) << 256 {
            return Err(Error::Validation("target exceeds 2^256".into()));
        }
        if f.nonce_end < f.nonce_start {
            return Err(Error::Validation("empty nonce range".into()));
        }
        Ok(MiningJob {
            header,
            nonce_start: f.nonce_start,
            nonce_end: f.nonce_end,
            target,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&JobFile {
            header: self.header.to_hex(),
            nonce_start: self.nonce_start,
            nonce_end: self.nonce_end,
            target: self.target.to_str_radix(16),
        })
        .expect("job serializes")
    }

    /// Target needing `bits` leading zero bits of the digest number.
    pub fn target_with_zero_bits(bits: u32) -> BigUint {
        BigUint::from(1u8) << (256 - bits.min(256))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MineOutcome {
    pub found: Option<(u32, Digest)>,
    pub hashes: u64,
    pub cycles: u64,
}

/// First nonce in range (in order) whose digest is below the target.
pub fn mine(job: &MiningJob, design: &EngineDesign) -> Result<MineOutcome> {
    let mut st = PipelineState::new(design, job.header);
    let mut hashes = 0u64;
    let mut next = Some(job.nonce_start);
    loop {
        let input = next;
        next = match next {
            Some(n) if n < job.nonce_end => Some(n + 1),
            _ => None,
        };
        for c in step_pipeline(&mut st, design, None, input)? {
            hashes += 1;
            if meets_target(&c.digest, &job.target) {
                return Ok(MineOutcome {
                    found: Some((c.nonce, c.digest)),
                    hashes,
                    cycles: st.cycle,
                });
            }
        }
        if input.is_none() && st.occupied() == 0 {
            return Ok(MineOutcome {
                found: None,
                hashes,
                cycles: st.cycle,
            });
        }
    }
}

/// Per-cycle count of ones over all stage input registers.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityTrace {
    /// (cycle, ones)
    pub samples: Vec<(u64, u64)>,
    /// Architectural bits tracked each cycle (dead window slots included as zeros).
    pub total_bits: u64,
    /// Cycles before the pipeline is full.
    pub warmup: u64,
}

impl ActivityTrace {
    /// Mean activity once the pipeline is full.
    pub fn alpha(&self) -> Result<f64> {
        let ones: Vec<u64> = self
            .samples
            .iter()
            .filter(|(c, _)| *c >= self.warmup)
            .map(|&(_, n)| n)
            .collect();
        crate::cost::derive_activity_factor(&ones, self.total_bits)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["cycle", "ones_count"]).map_err(csv_err)?;
        for (c, n) in &self.samples {
            wr.write_record([c.to_string(), n.to_string()]).map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Live window slots by round; dead slots count as zeros.
pub fn live_slots_by_round(cfg: &EngineConfig) -> Vec<Vec<usize>> {
    (0..ROUNDS).map(|r| live_window_slots(cfg, r)).collect()
}

/// Run `nonces` through the pipeline, sampling ones after every cycle.
pub fn record_activity(
    design: &EngineDesign,
    header: &Header,
    nonces: impl IntoIterator<Item = u32>,
    tracing: bool,
) -> Result<ActivityTrace> {
    if !tracing {
        return Err(Error::Config("activity recording needs tracing enabled".into()));
    }
    let uses_wk = design.config.uses_wk();
    let live = live_slots_by_round(&design.config);
    let mut st = PipelineState::new(design, *header);
    let p = st.slots.len() as u64;
    let mut samples = Vec::new();
    let sample = |st: &PipelineState| {
        let logical = st.logical_rounds();
        let ones: u64 = st
            .slots
            .iter()
            .zip(&logical)
            .map(|(s, l)| match (s, l) {
                (Some(s), Some(l)) => s.state.ones(&live[l % ROUNDS], uses_wk) as u64,
                _ => 0,
            })
            .sum();
        (st.cycle, ones)
    };
    for n in nonces {
        step_pipeline(&mut st, design, None, Some(n))?;
        samples.push(sample(&st));
    }
    Ok(ActivityTrace {
        samples,
        total_bits: p * ShaState::bit_count(uses_wk) as u64,
        warmup: p,
    })
}
