//! Area, timing, power and efficiency models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cell::CellLibrary;
use crate::error::{Error, Result};
use crate::jtl::JtlAnnotation;
use crate::netlist::{Category, Driver, Netlist};

pub const PHI0: f64 = 2.067833848e-15;
pub const IC_NOMINAL: f64 = 38e-6;
pub const IC_BTWC: f64 = 10e-6;
pub const SKEW_MARGIN: f64 = 0.20;
/// Fallback activity for analytic-only runs (derived by inverting the published power rows).
pub const ALPHA_FALLBACK: f64 = 0.446;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConstants {
    pub phi0: f64,
    pub t_switch: f64,
    pub cooling_factor: f64,
    pub ic: f64,
}

impl Default for PhysicsConstants {
    fn default() -> Self {
        PhysicsConstants {
            phi0: PHI0,
            t_switch: 2e-12,
            cooling_factor: 300.0,
            ic: IC_NOMINAL,
        }
    }
}

impl PhysicsConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi0 > 0.0 && self.t_switch > 0.0 && self.cooling_factor >= 1.0 && self.ic > 0.0) {
            return Err(Error::Domain(format!("bad physics constants {self:?}")));
        }
        Ok(())
    }

    pub fn with_ic(self, ic: f64) -> Self {
        PhysicsConstants { ic, ..self }
    }
}

pub fn system_jj(jj_gate: u64, jj_interconnect: u64) -> u64 {
    jj_gate + jj_interconnect
}

/// `(2/3) n f Ic phi0 alpha`, in watts at 4 K.
pub fn dynamic_power(n: f64, f: f64, ic: f64, alpha: f64, phi0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0, 1]")));
    }
    if n < 0.0 || f < 0.0 || ic < 0.0 || phi0 <= 0.0 {
        return Err(Error::Domain("power arguments must be nonnegative".into()));
    }
    Ok(2.0 / 3.0 * n * f * ic * phi0 * alpha)
}

pub fn total_power(p_dynamic: f64, cooling_factor: f64) -> f64 {
    cooling_factor * p_dynamic
}

pub fn energy_efficiency(hashrate: f64, p_total: f64) -> Result<f64> {
    if p_total <= 0.0 {
        return Err(Error::Domain("efficiency needs positive power".into()));
    }
    Ok(hashrate / p_total)
}

/// Full-adder delays of an `n`-operand, `k`-bit carry-save addition.
pub fn csa_latency(k: u32, n: u32) -> Result<u32> {
    if k < 1 || n < 2 {
        return Err(Error::Domain(format!("csa_latency({k}, {n})")));
    }
    Ok(k + n - 1)
}

/// Mean fraction of tracked bits at logic 1.
pub fn derive_activity_factor(ones_per_cycle: &[u64], total_bits: u64) -> Result<f64> {
    if ones_per_cycle.is_empty() || total_bits == 0 {
        return Err(Error::Domain("empty activity trace".into()));
    }
    let sum: f64 = ones_per_cycle.iter().map(|&c| c as f64).sum();
    Ok(sum / (ones_per_cycle.len() as f64 * total_bits as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPath {
    /// JJ switching events along the longest path.
    pub depth: u64,
    pub cycle_time: f64,
}

pub fn cycle_time(depth: u64, t_switch: f64, skew_margin: f64) -> f64 {
    depth as f64 * t_switch * (1.0 + skew_margin)
}

fn cell_delays(nl: &Netlist, lib: &CellLibrary) -> Vec<u64> {
    nl.gates
        .iter()
        .map(|g| lib.cells[&g.cell].delay_depth as u64)
        .collect()
}

/// Arrival time at every gate output, with nets outside `scope` arriving at 0.
fn arrivals(
    nl: &Netlist,
    ann: &JtlAnnotation,
    lib: &CellLibrary,
    scope: Option<u32>,
) -> Vec<u64> {
    let jd = lib.jtl_delay() as u64;
    let delays = cell_delays(nl, lib);
    let mut arr = vec![0u64; nl.net_count()];
    for &g in nl.topo_order() {
        let gate = &nl.gates[g as usize];
        if scope.is_some_and(|b| gate.block != b) {
            continue;
        }
        let mut t = 0;
        for (k, &i) in gate.inputs.iter().enumerate() {
            if nl.is_const(i) {
                continue;
            }
            let upstream = match (nl.driver(i), scope) {
                (Driver::Gate(d), Some(b)) if nl.gates[d as usize].block != b => 0,
                _ => arr[i as usize],
            };
            t = t.max(upstream + jd * ann.pin_jtls[g as usize][k] as u64);
        }
        arr[gate.output as usize] = t + delays[g as usize];
    }
    arr
}

/// Flat gate-level longest path, JTL delays included.
pub fn critical_path(
    nl: &Netlist,
    ann: &JtlAnnotation,
    lib: &CellLibrary,
    t_switch: f64,
    skew_margin: f64,
) -> CriticalPath {
    let jd = lib.jtl_delay() as u64;
    let arr = arrivals(nl, ann, lib, None);
    let mut depth = nl.gates.iter().map(|g| arr[g.output as usize]).max().unwrap_or(0);
    for (k, &o) in nl.outputs.iter().enumerate() {
        depth = depth.max(arr[o as usize] + jd * ann.output_jtls[k] as u64);
    }
    CriticalPath {
        depth,
        cycle_time: cycle_time(depth, t_switch, skew_margin),
    }
}

/// Latency of each block measured in isolation (its inputs arrive together).
pub fn block_latencies(nl: &Netlist, ann: &JtlAnnotation, lib: &CellLibrary) -> Vec<u64> {
    (0..nl.blocks.len() as u32)
        .map(|b| {
            let arr = arrivals(nl, ann, lib, Some(b));
            nl.gates
                .iter()
                .filter(|g| g.block == b)
                .map(|g| arr[g.output as usize])
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Block-synchronous longest path: a block starts once every block feeding it
/// has finished, and contributes its isolated latency. Arithmetic units are
/// treated as atomic, which is how whole-stage paths are reasoned about
/// ("four adders on the critical path").
pub fn block_critical_path(
    nl: &Netlist,
    ann: &JtlAnnotation,
    lib: &CellLibrary,
    t_switch: f64,
    skew_margin: f64,
) -> Result<CriticalPath> {
    let lat = block_latencies(nl, ann, lib);
    let nb = nl.blocks.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for g in &nl.gates {
        for &i in &g.inputs {
            if let Driver::Gate(d) = nl.driver(i) {
                let from = nl.gates[d as usize].block as usize;
                let to = g.block as usize;
                if from != to && !preds[to].contains(&from) {
                    preds[to].push(from);
                }
            }
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; nb];
    let mut finish = vec![0u64; nb];
    for start in 0..nb {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (b, ref mut next)) = stack.last_mut() {
            if *next < preds[b].len() {
                let p = preds[b][*next];
                *next += 1;
                match state[p] {
                    0 => {
                        state[p] = 1;
                        stack.push((p, 0));
                    }
                    1 => return Err(Error::Cycle(b as u32)),
                    _ => {}
                }
            } else {
                let start_t = preds[b].iter().map(|&p| finish[p]).max().unwrap_or(0);
                finish[b] = start_t + lat[b];
                state[b] = 2;
                stack.pop();
            }
        }
    }
    let jd = lib.jtl_delay() as u64;
    let mut depth = finish.iter().copied().max().unwrap_or(0);
    for (k, &o) in nl.outputs.iter().enumerate() {
        let t = match nl.driver(o) {
            Driver::Gate(g) => finish[nl.gates[g as usize].block as usize],
            _ => 0,
        };
        depth = depth.max(t + jd * ann.output_jtls[k] as u64);
    }
    Ok(CriticalPath {
        depth,
        cycle_time: cycle_time(depth, t_switch, skew_margin),
    })
}

/// Figures of merit for one design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub design: String,
    pub jj_gate: u64,
    pub jj_interconnect: u64,
    pub jj_system: u64,
    pub critical_path_depth: u64,
    pub cycle_time: f64,
    pub hashrate: f64,
    pub alpha: f64,
    pub p_dynamic: f64,
    pub p_total: f64,
    pub efficiency: f64,
    pub breakdown: BTreeMap<Category, u64>,
}

impl CostReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        design: &str,
        jj_gate: u64,
        jj_interconnect: u64,
        depth: u64,
        cycle_time: f64,
        alpha: f64,
        phys: &PhysicsConstants,
        breakdown: BTreeMap<Category, u64>,
    ) -> Result<Self> {
        let jj_system = system_jj(jj_gate, jj_interconnect);
        let hashrate = 1.0 / cycle_time;
        let p_dynamic = dynamic_power(jj_system as f64, hashrate, phys.ic, alpha, phys.phi0)?;
        let p_total = total_power(p_dynamic, phys.cooling_factor);
        let efficiency = energy_efficiency(hashrate, p_total)?;
        Ok(CostReport {
            design: design.to_string(),
            jj_gate,
            jj_interconnect,
            jj_system,
            critical_path_depth: depth,
            cycle_time,
            hashrate,
            alpha,
            p_dynamic,
            p_total,
            efficiency,
            breakdown,
        })
    }

    pub fn share(&self, cat: Category) -> f64 {
        self.breakdown.get(&cat).copied().unwrap_or(0) as f64 / self.jj_system.max(1) as f64
    }

    pub const CSV_HEADER: [&'static str; 14] = [
        "design",
        "jj_gate",
        "jj_interconnect",
        "jj_system",
        "adders_jj",
        "registers_jj",
        "other_jj",
        "critical_path_depth",
        "cycle_time_s",
        "hashrate_ghs",
        "alpha",
        "p_dynamic_w",
        "p_total_w",
        "efficiency_ghj",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        let cat = |c| self.breakdown.get(&c).copied().unwrap_or(0).to_string();
        vec![
            self.design.clone(),
            self.jj_gate.to_string(),
            self.jj_interconnect.to_string(),
            self.jj_system.to_string(),
            cat(Category::Adder),
            cat(Category::Register),
            cat(Category::Other),
            self.critical_path_depth.to_string(),
            sig4(self.cycle_time),
            sig4(self.hashrate / 1e9),
            sig4(self.alpha),
            sig4(self.p_dynamic),
            sig4(self.p_total),
            sig4(self.efficiency / 1e9),
        ]
    }
}

/// Four significant digits, plain or scientific notation depending on magnitude.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..6).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.3e}")
    }
}
