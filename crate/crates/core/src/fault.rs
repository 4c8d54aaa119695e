//! Fault models, AVF measurement, bypass-based fault isolation, reliability
//! analytics and better-than-worst-case Ic tuning.
//!
//! Fault units are Josephson junctions: a unit fails independently with
//! probability `p`, and a region (stage, mux block, hash collector) is faulty
//! when any of its units is.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cell::CellLibrary;
use crate::cost::{self, PhysicsConstants, IC_NOMINAL};
use crate::engine::{generate_engine, EngineConfig, EngineDesign, FULL_STAGES, ROUNDS, WIDTH};
use crate::error::{Error, Result};
use crate::sha::Header;
use crate::sim::{self, hash_nonce, ShaState, REG_BITS};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_2019;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultKind {
    IidGate,
    FluxTrapRegion,
    TransientBit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Gate,
    MuxBlock,
    Stage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultModel {
    pub kind: FaultKind,
    pub p: f64,
    pub region: Region,
    pub seed: u64,
}

impl FaultModel {
    pub fn iid(p: f64, seed: u64) -> Self {
        FaultModel {
            kind: FaultKind::IidGate,
            p,
            region: Region::Gate,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("fault probability {} outside [0, 1]", self.p)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransientBit {
    pub stage: usize,
    pub bit: usize,
    pub cycle: u64,
}

/// Faults present for one cooldown epoch.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FaultMap {
    /// Physical stages with at least one faulty unit.
    pub stages: BTreeSet<usize>,
    /// (boundary, block) mux blocks with at least one faulty unit.
    pub mux_blocks: BTreeSet<(usize, usize)>,
    pub ihc: bool,
    /// Faulty units in total (unit-level sampling only).
    pub faulty_units: u64,
    pub transient: Option<TransientBit>,
}

impl FaultMap {
    pub fn is_empty(&self) -> bool {
        self.stages.is_empty() && self.mux_blocks.is_empty() && !self.ihc && self.transient.is_none()
    }
}

/// Fault-unit counts of every region of a design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Geometry {
    pub stage_units: Vec<u64>,
    /// Per boundary, units of each mux block (empty without sparing).
    pub mux_units: Vec<Vec<u64>>,
    pub ihc_units: u64,
    pub spares: usize,
    pub redundant_mux: bool,
    pub uses_wk: bool,
}

impl Geometry {
    pub fn from_design(design: &EngineDesign, lib: &CellLibrary) -> Self {
        let stage_units = (0..design.layouts.len())
            .map(|i| {
                let l = &design.layouts[i];
                design.shapes[l.shape].cost.jj_system() + crate::engine::storage_cost(l, lib)
            })
            .collect();
        let mux_units = match design.layouts.first().and_then(|l| l.bypass) {
            Some(b) => {
                let mut blocks = vec![(WIDTH as u64) * lib.jj("MUX2") as u64; b.mux2_words];
                blocks.extend(vec![(WIDTH as u64) * lib.jj("MUX8") as u64; b.mux8_words]);
                vec![blocks; design.boundaries]
            }
            None => Vec::new(),
        };
        Geometry {
            stage_units,
            mux_units,
            ihc_units: design.ihc.jj_system() + design.ihc_register_jj,
            spares: design.config.spare_stages,
            redundant_mux: design.config.redundant_mux,
            uses_wk: design.config.uses_wk(),
        }
    }

    pub fn total_units(&self) -> u64 {
        self.stage_units.iter().sum::<u64>()
            + self.mux_units.iter().flatten().sum::<u64>()
            + self.ihc_units
    }

    /// Mux faults a boundary survives.
    pub fn mux_tolerance(&self) -> usize {
        self.redundant_mux as usize
    }

    /// Whether bypassing can route around every fault in `map`.
    pub fn isolable(&self, map: &FaultMap) -> bool {
        if map.ihc || map.stages.len() > self.spares {
            return false;
        }
        let tol = self.mux_tolerance();
        let mut per_boundary = std::collections::BTreeMap::<usize, usize>::new();
        for &(b, _) in &map.mux_blocks {
            *per_boundary.entry(b).or_default() += 1;
        }
        per_boundary.values().all(|&n| n <= tol)
    }
}

/// Counter-keyed generator: trial `i` of `seed` is reproducible on its own.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

/// Indices of faulty units among `n`, each faulty with probability `p`.
fn sample_units(n: u64, p: f64, rng: &mut impl Rng, mut hit: impl FnMut(u64)) {
    if p <= 0.0 || n == 0 {
        return;
    }
    if p >= 1.0 {
        (0..n).for_each(hit);
        return;
    }
    let l = (-p).ln_1p();
    let mut i: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let skip = (u.ln() / l).floor();
        if skip >= (n - i) as f64 {
            return;
        }
        i += skip as u64;
        hit(i);
        i += 1;
        if i >= n {
            return;
        }
    }
}

/// Region faulty if any of its `units` fails: 1 - (1-p)^units.
pub fn region_fault_prob(p: f64, units: u64) -> f64 {
    if p >= 1.0 {
        return if units > 0 { 1.0 } else { 0.0 };
    }
    -((units as f64) * (-p).ln_1p()).exp_m1()
}

fn sample_with(model: &FaultModel, g: &Geometry, rng: &mut ChaCha8Rng) -> FaultMap {
    let mut map = FaultMap::default();
    match (model.kind, model.region) {
        (FaultKind::TransientBit, _) => {
            let stage = rng.gen_range(0..g.stage_units.len());
            let bits = ShaState::bit_count(g.uses_wk);
            map.transient = Some(TransientBit {
                stage,
                bit: rng.gen_range(0..bits),
                cycle: rng.gen_range(0..g.stage_units.len() as u64),
            });
        }
        (FaultKind::IidGate, _) | (FaultKind::FluxTrapRegion, Region::Gate) if model.p >= 1.0 => {
            map.stages = (0..g.stage_units.len()).filter(|&i| g.stage_units[i] > 0).collect();
            for (b, blocks) in g.mux_units.iter().enumerate() {
                map.mux_blocks.extend((0..blocks.len()).map(|k| (b, k)));
            }
            map.ihc = g.ihc_units > 0;
            map.faulty_units = g.total_units();
        }
        (FaultKind::IidGate, _) | (FaultKind::FluxTrapRegion, Region::Gate) => {
            // one pass over all units laid end to end
            let mut bounds: Vec<(u64, Option<(usize, usize)>, usize)> = Vec::new();
            let mut acc = 0;
            for (i, &u) in g.stage_units.iter().enumerate() {
                acc += u;
                bounds.push((acc, None, i));
            }
            for (b, blocks) in g.mux_units.iter().enumerate() {
                for (k, &u) in blocks.iter().enumerate() {
                    acc += u;
                    bounds.push((acc, Some((b, k)), 0));
                }
            }
            let region_end = acc;
            acc += g.ihc_units;
            let mut count = 0;
            sample_units(acc, model.p, rng, |i| {
                count += 1;
                if i >= region_end {
                    map.ihc = true;
                    return;
                }
                let r = bounds.partition_point(|&(end, _, _)| end <= i);
                match bounds[r] {
                    (_, None, s) => {
                        map.stages.insert(s);
                    }
                    (_, Some(bk), _) => {
                        map.mux_blocks.insert(bk);
                    }
                }
            });
            map.faulty_units = count;
        }
        (FaultKind::FluxTrapRegion, region) => {
            for (i, &u) in g.stage_units.iter().enumerate() {
                let q = if region == Region::Stage { region_fault_prob(model.p, u) } else { 0.0 };
                if rng.gen::<f64>() < q {
                    map.stages.insert(i);
                }
            }
            for (b, blocks) in g.mux_units.iter().enumerate() {
                for (k, &u) in blocks.iter().enumerate() {
                    if rng.gen::<f64>() < region_fault_prob(model.p, u) {
                        map.mux_blocks.insert((b, k));
                    }
                }
            }
            map.ihc = rng.gen::<f64>() < region_fault_prob(model.p, g.ihc_units);
        }
    }
    map
}

/// One fault map drawn from `model` over the design's regions.
pub fn sample_fault_map(model: &FaultModel, g: &Geometry) -> Result<FaultMap> {
    model.validate()?;
    Ok(sample_with(model, g, &mut trial_rng(model.seed, 0)))
}

/// Trial `trial` of the map sequence for `model.seed`.
pub fn sample_fault_map_trial(model: &FaultModel, g: &Geometry, trial: u64) -> Result<FaultMap> {
    model.validate()?;
    Ok(sample_with(model, g, &mut trial_rng(model.seed, trial)))
}

/// Whether injections into dead schedule-window slots are part of the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AvfAccounting {
    /// Uniform over bits that hold a live value.
    Occupied,
    /// Uniform over every architectural state bit, dead slots included.
    AllBits,
}

impl AvfAccounting {
    pub fn name(self) -> &'static str {
        match self {
            AvfAccounting::Occupied => "occupied",
            AvfAccounting::AllBits => "all-bits",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvfReport {
    pub design: String,
    pub trials: u64,
    pub corrupted: u64,
    pub avf: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub accounting: AvfAccounting,
    pub seed: u64,
}

/// 95% Wilson score interval.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let n = trials as f64;
    let ph = successes as f64 / n;
    let den = 1.0 + z * z / n;
    let c = (ph + z * z / (2.0 * n)) / den;
    let h = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / den;
    ((c - h).max(0.0), (c + h).min(1.0))
}

/// Injectable (logical stage, bit) population.
fn avf_population(cfg: &EngineConfig, mode: AvfAccounting) -> Vec<(usize, Vec<usize>)> {
    let uses_wk = cfg.uses_wk();
    let live = sim::live_slots_by_round(cfg);
    (0..FULL_STAGES)
        .map(|s| {
            let mut bits: Vec<usize> = (0..REG_BITS).collect();
            let slots: Vec<usize> = match mode {
                AvfAccounting::Occupied => live[s % ROUNDS].clone(),
                AvfAccounting::AllBits => (0..16).collect(),
            };
            for j in slots {
                bits.extend(REG_BITS + 32 * j..REG_BITS + 32 * (j + 1));
            }
            if uses_wk {
                bits.extend(REG_BITS + 512..REG_BITS + 544);
            }
            (s, bits)
        })
        .collect()
}

/// Fraction of single-bit transients that change the final digest. Each trial
/// draws a random header, nonce and (stage, bit) uniformly over the population.
pub fn measure_avf(design: &EngineDesign, trials: u64, seed: u64, mode: AvfAccounting) -> Result<AvfReport> {
    if trials == 0 {
        return Err(Error::Domain("AVF needs at least one trial".into()));
    }
    let cfg = design.config;
    let uses_wk = cfg.uses_wk();
    let pop = avf_population(&cfg, mode);
    let cum: Vec<usize> = pop
        .iter()
        .scan(0, |acc, (_, b)| {
            *acc += b.len();
            Some(*acc)
        })
        .collect();
    let total = *cum.last().unwrap();
    let corrupted: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut hdr = [0u8; 80];
            rng.fill(&mut hdr[..]);
            let header = Header(hdr);
            let nonce: u32 = rng.gen();
            let k = rng.gen_range(0..total);
            let s = cum.partition_point(|&c| c <= k);
            let off = k - if s == 0 { 0 } else { cum[s - 1] };
            let bit = pop[s].1[off];
            let good = hash_nonce(&header, nonce, uses_wk, None);
            let bad = hash_nonce(&header, nonce, uses_wk, Some((s, bit)));
            (good != bad) as u64
        })
        .sum();
    let (lo, hi) = wilson_interval(corrupted, trials);
    Ok(AvfReport {
        design: cfg.label(),
        trials,
        corrupted,
        avf: corrupted as f64 / trials as f64,
        ci_low: lo,
        ci_high: hi,
        accounting: mode,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Detection {
    /// The default configuration already yields the golden digest.
    Healthy,
    /// Bypassing this physical stage restores the golden digest.
    Stage(usize),
    /// No single bypass position works; Ic must go back up.
    NotIsolable,
}

/// Sweep the bypass position with a known (header, nonce, digest) triple.
pub fn detect_faulty_stage(
    design: &EngineDesign,
    faults: &FaultMap,
    golden: (&Header, u32, &crate::sha::Digest),
) -> Result<Detection> {
    let spares = design.config.spare_stages;
    if spares == 0 {
        return Err(Error::Config("fault isolation needs a spare stage".into()));
    }
    let p = design.layouts.len();
    let (header, nonce, digest) = golden;
    let tail: Vec<usize> = (design.config.stages..p).collect();
    if sim::run_single(design, header, &tail, Some(faults), nonce)? == *digest {
        return Ok(Detection::Healthy);
    }
    for i in 0..p {
        // bypass stage i plus enough tail spares to keep 128 stages active
        let mut set = vec![i];
        set.extend(tail.iter().copied().filter(|&t| t != i).take(spares - 1));
        if set.len() < spares {
            continue;
        }
        if sim::run_single(design, header, &set, Some(faults), nonce)? == *digest {
            return Ok(Detection::Stage(i));
        }
    }
    Ok(Detection::NotIsolable)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    Baseline,
    SpareBypass,
    SpareRedundantMux,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Baseline, Variant::SpareBypass, Variant::SpareRedundantMux];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::SpareBypass => "spare-bypass",
            Variant::SpareRedundantMux => "spare-redundant-mux",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "baseline" => Ok(Variant::Baseline),
            "spare-bypass" | "bypass" => Ok(Variant::SpareBypass),
            "spare-redundant-mux" | "redundant" | "redundant-mux" => Ok(Variant::SpareRedundantMux),
            _ => Err(Error::Config(format!("unknown variant `{s}`"))),
        }
    }

    /// The variant applied to a base engine configuration (one spare stage).
    pub fn config(self, base: &EngineConfig) -> EngineConfig {
        let b = EngineConfig {
            spare_stages: 0,
            redundant_mux: false,
            ..*base
        };
        match self {
            Variant::Baseline => b,
            Variant::SpareBypass => b.with_spares(1, false),
            Variant::SpareRedundantMux => b.with_spares(1, true),
        }
    }

    pub fn geometry(self, base: &EngineConfig, lib: &CellLibrary) -> Result<Geometry> {
        Ok(Geometry::from_design(&generate_engine(&self.config(base), lib)?, lib))
    }
}

/// 1 - (1-p)^n without cancellation.
pub fn baseline_failure_prob(p: f64, n: u64) -> f64 {
    region_fault_prob(p, n)
}

/// P(more than `k` of the independent events with probabilities `q` occur),
/// accumulated without subtracting from one.
pub fn prob_more_than(q: &[f64], k: usize) -> f64 {
    let pairs: Vec<(f64, f64)> = q.iter().map(|&qi| (qi, 1.0 - qi)).collect();
    tail_split(&pairs, k).0
}

/// (P(count > k), P(count <= k)) for events given as (p_fault, p_ok) pairs,
/// each side accumulated directly so neither loses precision near 0 or 1.
fn tail_split(q: &[(f64, f64)], k: usize) -> (f64, f64) {
    let mut dist = vec![0.0; k + 1];
    dist[0] = 1.0;
    let mut over = 0.0;
    for &(qi, ok) in q {
        over += dist[k] * qi;
        for j in (1..=k).rev() {
            dist[j] = dist[j] * ok + dist[j - 1] * qi;
        }
        dist[0] *= ok;
    }
    (over.min(1.0), dist.iter().sum::<f64>().min(1.0))
}

fn region_pair(p: f64, units: u64) -> (f64, f64) {
    let l = units as f64 * (-p).ln_1p();
    (-l.exp_m1(), l.exp())
}

/// ln P(count <= k), taken from whichever tail is accurate.
fn log_within(q: &[(f64, f64)], k: usize) -> f64 {
    let (over, within) = tail_split(q, k);
    if over < 0.5 {
        (-over).ln_1p()
    } else {
        within.ln()
    }
}

/// System failure probability under iid unit faults.
///
/// The design survives when the faulty stages fit in the spares, every
/// boundary has at most as many faulty mux blocks as it tolerates (none with
/// plain bypass, one with the redundant 8:1 path) and the hash collector, which
/// nothing protects, is fault-free. Without spares any fault is fatal.
pub fn analytic_failure_prob(g: &Geometry, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    if g.spares == 0 && g.mux_units.is_empty() {
        return Ok(baseline_failure_prob(p, g.total_units()));
    }
    if p >= 1.0 {
        return Ok(1.0);
    }
    let qs: Vec<(f64, f64)> = g.stage_units.iter().map(|&u| region_pair(p, u)).collect();
    let mut log_ok = log_within(&qs, g.spares);
    for blocks in &g.mux_units {
        let qb: Vec<(f64, f64)> = blocks.iter().map(|&u| region_pair(p, u)).collect();
        log_ok += log_within(&qb, g.mux_tolerance());
    }
    log_ok += g.ihc_units as f64 * (-p).ln_1p();
    Ok(-log_ok.exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub failures: u64,
    pub trials: u64,
    /// Standard error of the estimate.
    pub sigma: f64,
    /// 95% half-width.
    pub half_width: f64,
}

/// Sample fault maps and apply the structural isolation check per trial.
pub fn monte_carlo_failure_prob(g: &Geometry, p: f64, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials < 1000 {
        return Err(Error::Domain("Monte Carlo needs at least 10^3 trials".into()));
    }
    let model = FaultModel::iid(p, seed);
    model.validate()?;
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let map = sample_with(&model, g, &mut trial_rng(seed, t));
            let ok = if g.spares == 0 && g.mux_units.is_empty() {
                map.faulty_units == 0
            } else {
                g.isolable(&map)
            };
            (!ok) as u64
        })
        .sum();
    let n = trials as f64;
    let est = failures as f64 / n;
    let sigma = (est * (1.0 - est) / n).sqrt();
    Ok(McEstimate {
        estimate: est,
        failures,
        trials,
        sigma,
        half_width: 1.96 * sigma,
    })
}

/// `n_per_decade` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n_per_decade: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let steps = ((b - a) * n_per_decade as f64).round() as usize;
    (0..=steps)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps.max(1) as f64))
        .collect()
}

pub fn default_pgrid() -> Vec<f64> {
    log_grid(1e-9, 1e-4, 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Analytic,
    MonteCarlo { trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityCurve {
    pub variant: Variant,
    pub method: Method,
    /// (p_gate, p_fail, half-width)
    pub points: Vec<(f64, f64, f64)>,
}

pub fn reliability_curve(
    variant: Variant,
    g: &Geometry,
    pgrid: &[f64],
    monte_carlo: Option<(u64, u64)>,
) -> Result<ReliabilityCurve> {
    let mut points = Vec::with_capacity(pgrid.len());
    for &p in pgrid {
        points.push(match monte_carlo {
            None => (p, analytic_failure_prob(g, p)?, 0.0),
            Some((trials, seed)) => {
                let e = monte_carlo_failure_prob(g, p, trials, seed)?;
                (p, e.estimate, e.half_width)
            }
        });
    }
    Ok(ReliabilityCurve {
        variant,
        method: match monte_carlo {
            None => Method::Analytic,
            Some((trials, _)) => Method::MonteCarlo { trials },
        },
        points,
    })
}

impl ReliabilityCurve {
    pub const CSV_HEADER: [&'static str; 6] = ["p_gate", "p_fail", "half_width", "variant", "method", "trials"];

    pub fn write_csv<W: Write>(curves: &[ReliabilityCurve], w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(Self::CSV_HEADER).map_err(sim::csv_err)?;
        for c in curves {
            let (m, t) = match c.method {
                Method::Analytic => ("analytic", String::new()),
                Method::MonteCarlo { trials } => ("monte_carlo", trials.to_string()),
            };
            for &(p, f, h) in &c.points {
                wr.write_record([
                    cost::sig4(p),
                    cost::sig4(f),
                    cost::sig4(h),
                    c.variant.name().to_string(),
                    m.to_string(),
                    t.clone(),
                ])
                .map_err(sim::csv_err)?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// Synthetic unit-fault probability as a function of Ic. No published curve exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FaultVsIc {
    /// `p_high` strictly below `threshold`, zero at or above it.
    Step { threshold: f64, p_high: f64 },
    /// log10 p rises linearly as Ic falls: `p = p_ref * 10^((ic_ref - ic) / decade)`, capped at 1.
    Ramp { ic_ref: f64, p_ref: f64, decade: f64 },
    Constant(f64),
}

impl FaultVsIc {
    pub fn p(&self, ic: f64) -> f64 {
        match *self {
            FaultVsIc::Step { threshold, p_high } => {
                if ic < threshold {
                    p_high
                } else {
                    0.0
                }
            }
            FaultVsIc::Ramp { ic_ref, p_ref, decade } => (p_ref * 10f64.powf((ic_ref - ic) / decade)).min(1.0),
            FaultVsIc::Constant(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneStep {
    pub ic: f64,
    pub p: f64,
    pub faulty_stages: usize,
    pub isolable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub chosen_ic: f64,
    pub steps: Vec<TuneStep>,
    /// efficiency(chosen) / efficiency(38 µA) under the power model.
    pub efficiency_gain: f64,
}

/// Lower Ic along a descending grid until a fault cannot be isolated, then step
/// back up one point. Every grid point draws its own fault map.
pub fn tune_ic(g: &Geometry, ic_grid: &[f64], fault_vs_ic: &FaultVsIc, seed: u64) -> Result<TuneResult> {
    if ic_grid.is_empty() {
        return Err(Error::Domain("empty Ic grid".into()));
    }
    if ic_grid.windows(2).any(|w| w[1] >= w[0]) || ic_grid.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain("Ic grid must be positive and strictly descending".into()));
    }
    if g.spares == 0 {
        return Err(Error::Config("Ic tuning needs a fault-tolerant design".into()));
    }
    let mut steps = Vec::new();
    let mut chosen = ic_grid[0];
    for (k, &ic) in ic_grid.iter().enumerate() {
        let p = fault_vs_ic.p(ic);
        let map = sample_with(&FaultModel::iid(p, seed), g, &mut trial_rng(seed, k as u64));
        let ok = g.isolable(&map);
        steps.push(TuneStep {
            ic,
            p,
            faulty_stages: map.stages.len(),
            isolable: ok,
        });
        if !ok {
            chosen = if k == 0 { ic } else { ic_grid[k - 1] };
            break;
        }
        chosen = ic;
    }
    Ok(TuneResult {
        chosen_ic: chosen,
        steps,
        efficiency_gain: efficiency_gain(chosen)?,
    })
}

/// efficiency(Ic) / efficiency(38 µA) for a fixed design, from the power model.
pub fn efficiency_gain(ic: f64) -> Result<f64> {
    let phys = PhysicsConstants::default();
    let (n, f, alpha) = (1.0e6, 1.0e9, cost::ALPHA_FALLBACK);
    let at = |ic: f64| -> Result<f64> {
        let p = cost::total_power(cost::dynamic_power(n, f, ic, alpha, phys.phi0)?, phys.cooling_factor);
        cost::energy_efficiency(f, p)
    };
    Ok(at(ic)? / at(IC_NOMINAL)?)
}

/// Chance a transient fault turns a winning nonce into a miss: p / 2^32.
pub fn mining_loss_probability(p_transient: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_transient) {
        return Err(Error::Domain(format!("p = {p_transient} outside [0, 1]")));
    }
    Ok(p_transient / 4_294_967_296.0)
}
