//! Reproduction reports and design sweeps.
//!
//! Published figures live in `data/published.json`, each with a short source
//! description and, when there is an acceptance band, its tolerance. Reports
//! never hardcode them. Every row says whether its reference is a published
//! figure, an analytic result or a fixed constant.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adders::AdderKind;
use crate::cell::CellLibrary;
use crate::cost::{self, sig4, CostReport, PhysicsConstants};
use crate::engine::{
    generate_engine, standalone_adder_jj, AdderStrategy, Calibration, EngineConfig, EngineDesign,
};
use crate::error::{Error, Result};
use crate::fault::{self, FaultVsIc, Variant, DEFAULT_SEED};
use crate::netlist::Category;
use crate::sha::Header;
use crate::sim;

const DEFAULT_PUBLISHED: &str = include_str!("../data/published.json");

/// Nonces streamed through the baseline engine to measure activity.
pub const ACTIVITY_NONCES: usize = 2048;
pub const MC_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedValue {
    pub value: f64,
    pub unit: String,
    pub source: String,
    #[serde(default)]
    pub tol_rel: Option<f64>,
    #[serde(default)]
    pub tol_abs: Option<f64>,
}

impl PublishedValue {
    pub fn tolerance(&self) -> Option<Tol> {
        match (self.tol_rel, self.tol_abs) {
            (Some(r), _) => Some(Tol::Rel(r)),
            (None, Some(a)) => Some(Tol::Abs(a)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Published {
    pub version: String,
    pub values: BTreeMap<String, PublishedValue>,
}

impl Default for Published {
    fn default() -> Self {
        Self::from_json(DEFAULT_PUBLISHED).expect("shipped constants parse")
    }
}

impl Published {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("published constants: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Result<&PublishedValue> {
        self.values
            .get(key)
            .ok_or_else(|| Error::Validation(format!("no published value `{key}`")))
    }

    pub fn value(&self, key: &str) -> Result<f64> {
        Ok(self.get(key)?.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tol {
    /// |c - r| <= x * |r|
    Rel(f64),
    /// |c - r| <= x
    Abs(f64),
    /// c >= r
    AtLeast,
}

impl Tol {
    pub fn holds(self, computed: f64, reference: f64) -> bool {
        match self {
            Tol::Rel(x) => (computed - reference).abs() <= x * reference.abs() + f64::EPSILON * reference.abs(),
            Tol::Abs(x) => (computed - reference).abs() <= x + 1e-12 * reference.abs(),
            Tol::AtLeast => computed >= reference,
        }
    }

    fn describe(self) -> String {
        match self {
            Tol::Rel(x) => format!("±{}%", sig4(x * 100.0)),
            Tol::Abs(x) => format!("±{}", sig4(x)),
            Tol::AtLeast => "≥".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RefKind {
    Published,
    Analytic,
    Constant,
    None,
}

impl RefKind {
    fn name(self) -> &'static str {
        match self {
            RefKind::Published => "published",
            RefKind::Analytic => "analytic",
            RefKind::Constant => "constant",
            RefKind::None => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub quantity: String,
    pub unit: String,
    /// `None` for rows that only restate a constant or an uncomputed figure.
    pub computed: Option<f64>,
    pub reference: Option<f64>,
    pub ref_kind: RefKind,
    pub tol: Option<Tol>,
    pub status: Status,
    pub note: String,
}

impl Row {
    pub fn delta_pct(&self) -> Option<f64> {
        match (self.computed, self.reference) {
            (Some(c), Some(r)) if r != 0.0 => Some((c - r) / r * 100.0),
            _ => None,
        }
    }

    fn checked(quantity: &str, unit: &str, computed: f64, reference: f64, kind: RefKind, tol: Option<Tol>) -> Row {
        let status = match tol {
            Some(t) if t.holds(computed, reference) => Status::Pass,
            Some(_) => Status::Fail,
            None => Status::Info,
        };
        Row {
            quantity: quantity.into(),
            unit: unit.into(),
            computed: Some(computed),
            reference: Some(reference),
            ref_kind: kind,
            tol,
            status,
            note: String::new(),
        }
    }

    fn info(quantity: &str, unit: &str, computed: f64) -> Row {
        Row {
            quantity: quantity.into(),
            unit: unit.into(),
            computed: Some(computed),
            reference: None,
            ref_kind: RefKind::None,
            tol: None,
            status: Status::Info,
            note: String::new(),
        }
    }

    fn note(mut self, s: impl Into<String>) -> Row {
        self.note = s.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ReportId {
    T2,
    T3,
    T4,
    T5,
    Fig10,
    Fig12,
}

impl ReportId {
    pub const ALL: [ReportId; 6] = [ReportId::T2, ReportId::T3, ReportId::T4, ReportId::T5, ReportId::Fig10, ReportId::Fig12];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T2" => Ok(ReportId::T2),
            "T3" => Ok(ReportId::T3),
            "T4" => Ok(ReportId::T4),
            "T5" => Ok(ReportId::T5),
            "FIG10" => Ok(ReportId::Fig10),
            "FIG12" => Ok(ReportId::Fig12),
            _ => Err(Error::UnknownReport(s.into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReportId::T2 => "T2",
            ReportId::T3 => "T3",
            ReportId::T4 => "T4",
            ReportId::T5 => "T5",
            ReportId::Fig10 => "FIG10",
            ReportId::Fig12 => "FIG12",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ReportId::T2 => "Baseline performance and energy (RCA / KSA engines)",
            ReportId::T3 => "JJ-complexity breakdown",
            ReportId::T4 => "Performance and energy after optimization",
            ReportId::T5 => "Methodology validation on standalone blocks",
            ReportId::Fig10 => "System failure probability vs unit fault probability",
            ReportId::Fig12 => "Energy efficiency relative to the CMOS reference",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub id: ReportId,
    pub title: String,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl TableReport {
    pub fn breached(&self) -> bool {
        self.rows.iter().any(|r| r.status == Status::Fail)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} — {}", self.id.name(), self.title);
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.quantity.clone(),
                    r.computed.map_or("not computed".into(), |c| format!("{} {}", sig4(c), r.unit).trim().to_string()),
                    r.reference.map_or(String::new(), |v| format!("{} {}", sig4(v), r.unit).trim().to_string()),
                    r.ref_kind.name().into(),
                    r.delta_pct().map_or(String::new(), |d| format!("{:+.2}%", d)),
                    match (r.status, r.tol) {
                        (Status::Info, _) => "info".into(),
                        (st, Some(t)) => format!("{} ({})", st.name(), t.describe()),
                        (st, None) => st.name().into(),
                    },
                    r.note.clone(),
                ]
            })
            .collect();
        let head = ["quantity", "computed", "reference", "source", "delta", "status", "note"];
        let mut w = head.map(|h| h.chars().count());
        for c in &cells {
            for (k, v) in c.iter().enumerate() {
                w[k] = w[k].max(v.chars().count());
            }
        }
        let line = |s: &mut String, c: &[String]| {
            let parts: Vec<String> = c
                .iter()
                .enumerate()
                .map(|(k, v)| format!("{v}{}", " ".repeat(w[k] - v.chars().count())))
                .collect();
            let _ = writeln!(s, "  {}", parts.join("  ").trim_end());
        };
        line(&mut s, &head.map(String::from));
        for c in &cells {
            line(&mut s, c);
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        let _ = writeln!(
            s,
            "  result: {}",
            if self.breached() { "TOLERANCE BREACH" } else { "within tolerance" }
        );
        s
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["quantity", "unit", "computed", "reference", "reference_kind", "delta_pct", "status", "note"];

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(Self::CSV_HEADER).map_err(sim::csv_err)?;
        for r in &self.rows {
            wr.write_record([
                r.quantity.clone(),
                r.unit.clone(),
                r.computed.map_or(String::new(), sig4),
                r.reference.map_or(String::new(), sig4),
                r.ref_kind.name().to_string(),
                r.delta_pct().map_or(String::new(), sig4),
                r.status.name().to_string(),
                r.note.clone(),
            ])
            .map_err(sim::csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Measured activity of `design` over a seeded random header and nonce stream.
pub fn measure_alpha(design: &EngineDesign, seed: u64, nonces: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hdr = [0u8; 80];
    rng.fill(&mut hdr[..]);
    let stream: Vec<u32> = (0..nonces).map(|_| rng.gen()).collect();
    sim::record_activity(design, &Header(hdr), stream, true)?.alpha()
}

/// Everything a reproduction run needs, built once.
#[derive(Debug, Clone)]
pub struct Study {
    pub lib: CellLibrary,
    pub phys: PhysicsConstants,
    pub published: Published,
    pub calib: Calibration,
    pub seed: u64,
    pub mc_trials: u64,
    /// Measured on the baseline engine; one value for every design.
    pub alpha: f64,
    pub designs: BTreeMap<AdderStrategy, EngineDesign>,
}

impl Study {
    pub fn new(lib: CellLibrary, seed: u64) -> Result<Self> {
        let published = Published::default();
        let designs: BTreeMap<_, _> = AdderStrategy::ALL
            .iter()
            .map(|&a| Ok((a, generate_engine(&EngineConfig::new(a), &lib)?)))
            .collect::<Result<_>>()?;
        let base = &designs[&AdderStrategy::Rca];
        let calib = Calibration::anchored(base.stage_depth, published.value("t2.rca.hashrate")? * 1e9);
        let alpha = measure_alpha(base, seed, ACTIVITY_NONCES)?;
        Ok(Study {
            lib,
            phys: PhysicsConstants::default(),
            published,
            calib,
            seed,
            mc_trials: MC_TRIALS,
            alpha,
            designs,
        })
    }

    pub fn default_study() -> Result<Self> {
        Self::new(CellLibrary::default(), DEFAULT_SEED)
    }

    pub fn design(&self, a: AdderStrategy) -> &EngineDesign {
        &self.designs[&a]
    }

    pub fn hashrate(&self, a: AdderStrategy) -> f64 {
        self.calib.hashrate(self.design(a).stage_depth)
    }

    /// Total (cooled) power in W for a JJ count and clock rate.
    pub fn total_power(&self, n: f64, f: f64, ic: f64) -> Result<f64> {
        let pd = cost::dynamic_power(n, f, ic, self.alpha, self.phys.phi0)?;
        Ok(cost::total_power(pd, self.phys.cooling_factor))
    }

    /// Efficiency in GH/J; the clock rate cancels out of hashrate / power.
    pub fn efficiency(&self, n: f64, ic: f64) -> Result<f64> {
        let f = 1e9;
        Ok(cost::energy_efficiency(f, self.total_power(n, f, ic)?)? / 1e9)
    }

    pub fn cost_report(&self, design: &EngineDesign) -> Result<CostReport> {
        design.cost_report(&self.calib, &self.phys, self.alpha)
    }

    fn pv(&self, key: &str) -> Result<f64> {
        self.published.value(key)
    }

    /// Row checked against a published value and its stored tolerance.
    fn vs(&self, quantity: &str, computed: f64, key: &str) -> Result<Row> {
        let p = self.published.get(key)?;
        Ok(Row::checked(quantity, &p.unit, computed, p.value, RefKind::Published, p.tolerance()))
    }

    /// Same, with the published value rescaled to the computed value's unit.
    fn vs_scaled(&self, quantity: &str, unit: &str, computed: f64, key: &str, scale: f64) -> Result<Row> {
        let p = self.published.get(key)?;
        Ok(Row::checked(quantity, unit, computed, p.value * scale, RefKind::Published, p.tolerance()))
    }

    fn constant(&self, quantity: &str, key: &str) -> Result<Row> {
        let p = self.published.get(key)?;
        Ok(Row {
            quantity: quantity.into(),
            unit: p.unit.clone(),
            computed: None,
            reference: Some(p.value),
            ref_kind: RefKind::Constant,
            tol: None,
            status: Status::Info,
            note: "fixed constant, never computed".into(),
        })
    }

    /// Per-stage JJ saving of delay-line storage on the CSA4 engine, in percent.
    pub fn delay_line_saving_pct(&self) -> f64 {
        let reg = self.design(AdderStrategy::Csa4).mean_stage_jj(&self.lib);
        let dl = self.design(AdderStrategy::Csa4DelayLine).mean_stage_jj(&self.lib);
        (1.0 - dl / reg) * 100.0
    }

    pub fn fault_tolerant(&self, redundant: bool) -> Result<EngineDesign> {
        let v = if redundant { Variant::SpareRedundantMux } else { Variant::SpareBypass };
        generate_engine(&v.config(&EngineConfig::new(AdderStrategy::Csa4DelayLine)), &self.lib)
    }

    /// Efficiency with the power model closed on published JJ counts and clock
    /// rates (only the measured activity is ours).
    pub fn closure_efficiency(&self, jj_key: &str) -> Result<f64> {
        self.efficiency(self.pv(jj_key)?, self.phys.ic)
    }

    pub fn closure_power_mw(&self, jj_key: &str, hr_key: &str) -> Result<f64> {
        Ok(self.total_power(self.pv(jj_key)?, self.pv(hr_key)? * 1e9, self.phys.ic)? * 1e3)
    }

    pub fn reproduce(&self, id: ReportId) -> Result<TableReport> {
        match id {
            ReportId::T2 => self.t2(),
            ReportId::T3 => self.t3(),
            ReportId::T4 => self.t4(),
            ReportId::T5 => self.t5(),
            ReportId::Fig10 => self.fig10(),
            ReportId::Fig12 => self.fig12(),
        }
    }

    fn report(&self, id: ReportId, rows: Vec<Row>, notes: Vec<String>) -> TableReport {
        TableReport {
            id,
            title: id.title().into(),
            rows,
            notes,
        }
    }

    fn alpha_row(&self) -> Row {
        Row::info("activity factor alpha (measured)", "", self.alpha).note(format!(
            "baseline engine, {ACTIVITY_NONCES} random nonces, seed {}",
            self.seed
        ))
    }

    fn t2(&self) -> Result<TableReport> {
        let mut rows = vec![
            self.constant("CMOS hashrate", "cmos.hashrate")?,
            self.constant("CMOS power", "cmos.power")?,
            self.constant("CMOS efficiency", "cmos.efficiency")?,
            self.alpha_row(),
        ];
        let cmos = self.pv("cmos.efficiency")?;
        for (a, tag) in [(AdderStrategy::Rca, "rca"), (AdderStrategy::KsaCritical, "ksa")] {
            let d = self.design(a);
            let n = a.name();
            rows.push(self.vs(&format!("{n} JJ complexity"), d.jj_system() as f64, &format!("t2.{tag}.jj"))?);
            let hr = self.vs(&format!("{n} hashrate"), self.hashrate(a) / 1e9, &format!("t2.{tag}.hashrate"))?;
            rows.push(if a == AdderStrategy::Rca { hr.note("calibration anchor") } else { hr.note("from critical-path ratio") });
            let p = self.closure_power_mw(&format!("t2.{tag}.jj"), &format!("t2.{tag}.hashrate"))?;
            rows.push(self.vs(&format!("{n} total power"), p, &format!("t2.{tag}.power"))?.note("published n, f; measured alpha"));
            let e = self.closure_efficiency(&format!("t2.{tag}.jj"))?;
            rows.push(self.vs(&format!("{n} efficiency"), e, &format!("t2.{tag}.efficiency"))?.note("published n, f; measured alpha"));
            rows.push(Row::info(&format!("{n} efficiency vs CMOS"), "x", e / cmos));
            let r = self.cost_report(d)?;
            rows.push(Row::info(&format!("{n} total power, full model"), "mW", r.p_total * 1e3).note("computed n, f"));
            rows.push(Row::info(&format!("{n} efficiency, full model"), "GH/J", r.efficiency / 1e9).note("computed n"));
        }
        Ok(self.report(ReportId::T2, rows, vec![]))
    }

    fn t3(&self) -> Result<TableReport> {
        let mut rows = Vec::new();
        for (a, tag) in [(AdderStrategy::Rca, "rca"), (AdderStrategy::KsaCritical, "ksa")] {
            let d = self.design(a);
            let total = d.jj_system() as f64;
            let b = d.complexity_breakdown();
            let n = a.name();
            for (cat, key) in [(Category::Adder, "adders"), (Category::Register, "registers"), (Category::Other, "other")] {
                let v = b[&cat] as f64;
                rows.push(self.vs(&format!("{n} {key}"), v, &format!("t3.{tag}.{key}"))?);
                rows.push(self.vs(&format!("{n} {key} share"), v / total * 100.0, &format!("t3.{tag}.{key}_pct"))?);
            }
            rows.push(self.vs(&format!("{n} total"), total, &format!("t3.{tag}.total"))?);
        }
        Ok(self.report(
            ReportId::T3,
            rows,
            vec!["adders own their input-pin JTLs; other JTLs belong to the driving block, with register outputs counted as registers".into()],
        ))
    }

    fn t4(&self) -> Result<TableReport> {
        let cols = [
            (AdderStrategy::Rca, "rca"),
            (AdderStrategy::KsaCritical, "ksa"),
            (AdderStrategy::Csa4, "csa4"),
            (AdderStrategy::Csa4DelayLine, "csa4dl"),
        ];
        let cmos = self.pv("cmos.efficiency")?;
        let mut rows = vec![self.alpha_row()];
        for (a, tag) in cols {
            let n = a.name();
            let d = self.design(a);
            rows.push(self.vs(&format!("{n} JJ complexity"), d.jj_system() as f64, &format!("t4.{tag}.jj"))?);
            rows.push(self.vs(&format!("{n} hashrate"), self.hashrate(a) / 1e9, &format!("t4.{tag}.hashrate"))?);
            let p = self.closure_power_mw(&format!("t4.{tag}.jj"), &format!("t4.{tag}.hashrate"))?;
            rows.push(self.vs(&format!("{n} total power"), p, &format!("t4.{tag}.power"))?.note("published n, f; measured alpha"));
            let e = self.closure_efficiency(&format!("t4.{tag}.jj"))?;
            rows.push(self.vs(&format!("{n} efficiency"), e, &format!("t4.{tag}.efficiency"))?.note("published n, f; measured alpha"));
            rows.push(Row::info(&format!("{n} efficiency vs CMOS"), "x", e / cmos));
            let r = self.cost_report(d)?;
            rows.push(Row::info(&format!("{n} efficiency, full model"), "GH/J", r.efficiency / 1e9).note("computed n"));
        }
        let cmos_hr = self.pv("cmos.hashrate")?;
        let dl = AdderStrategy::Csa4DelayLine;
        rows.push(
            Row::info(&format!("{} hashrate vs CMOS", dl.name()), "x", self.hashrate(dl) / 1e9 / cmos_hr)
                .note(format!("table ratio {:.2}", self.pv("t4.csa4dl.hashrate")? / cmos_hr)),
        );
        rows.push(self.constant("CMOS performance multiple claimed in text", "cmos.perf_claim")?.note("baseline unclear; both ratios shown"));
        let base = self.design(AdderStrategy::Rca).stage_depth as f64;
        for (a, key) in [(AdderStrategy::KsaCritical, "speedup.ksa"), (AdderStrategy::Csa4, "speedup.csa4")] {
            let ratio = base / self.design(a).stage_depth as f64;
            rows.push(
                self.vs(&format!("hashrate {} / RCA", a.name()), ratio, key)?
                    .note(format!("critical path {} vs {} JJ", self.design(a).stage_depth, base)),
            );
        }
        rows.push(self.vs("delay-line per-stage saving", self.delay_line_saving_pct(), "dl.saving_pct")?);
        Ok(self.report(ReportId::T4, rows, vec![]))
    }

    fn t5(&self) -> Result<TableReport> {
        let mut rows = Vec::new();
        for (kind, tag) in [(AdderKind::Rca, "rca32"), (AdderKind::Ksa, "ksa32")] {
            let jj = standalone_adder_jj(kind, 32, 2, &self.lib)? as f64;
            let reported = self.pv(&format!("t5.{tag}.reported"))?;
            let name = format!("32-bit {}", kind.name());
            rows.push(self.vs(&format!("{name} JJ complexity"), jj, &format!("t5.{tag}.estimated"))?);
            rows.push(Row::checked(&format!("{name} foundry-reported"), "JJ", reported, reported, RefKind::Constant, None));
            let err = (reported - jj).abs() / reported * 100.0;
            rows.push(self.vs(&format!("{name} error vs reported"), err, &format!("t5.{tag}.error_pct"))?);
        }
        for (q, key) in [
            ("integer multiplier JJ complexity", "t5.mult.estimated"),
            ("integer multiplier foundry-reported", "t5.mult.reported"),
            ("integer multiplier error vs reported", "t5.mult.error_pct"),
        ] {
            rows.push(self.constant(q, key)?.note("not computed (multiplier generator not built)"));
        }
        Ok(self.report(
            ReportId::T5,
            rows,
            vec![format!("cell library `{}`", self.lib.version)],
        ))
    }

    /// Reliability geometry of each variant on the final (CSA4 + delay line) engine.
    pub fn variant_geometries(&self) -> Result<Vec<(Variant, fault::Geometry)>> {
        let base = EngineConfig::new(AdderStrategy::Csa4DelayLine);
        Variant::ALL
            .iter()
            .map(|&v| Ok((v, v.geometry(&base, &self.lib)?)))
            .collect()
    }

    pub fn fig10_curves(&self, pgrid: &[f64]) -> Result<Vec<fault::ReliabilityCurve>> {
        self.variant_geometries()?
            .iter()
            .map(|(v, g)| fault::reliability_curve(*v, g, pgrid, None))
            .collect()
    }

    fn fig10(&self) -> Result<TableReport> {
        let geos = self.variant_geometries()?;
        let grid = fault::default_pgrid();
        let mut rows = Vec::new();
        for &p in &grid {
            let f: Vec<f64> = geos
                .iter()
                .map(|(_, g)| fault::analytic_failure_prob(g, p))
                .collect::<Result<_>>()?;
            for ((v, _), fv) in geos.iter().zip(&f) {
                rows.push(Row::info(&format!("P_fail {} @ p={}", v.name(), sig4(p)), "", *fv));
            }
            let ok = f[2] <= f[1] && f[1] <= f[0];
            rows.push(Row {
                quantity: format!("dominance @ p={}", sig4(p)),
                unit: String::new(),
                computed: None,
                reference: None,
                ref_kind: RefKind::None,
                tol: None,
                status: if ok { Status::Pass } else { Status::Fail },
                note: "redundant <= bypass <= baseline".into(),
            });
        }
        for p in [1e-7, 1e-6, 1e-5] {
            for (v, g) in &geos {
                let a = fault::analytic_failure_prob(g, p)?;
                let m = fault::monte_carlo_failure_prob(g, p, self.mc_trials, self.seed)?;
                let sigma = (a * (1.0 - a) / self.mc_trials as f64).sqrt();
                rows.push(
                    Row::checked(
                        &format!("Monte Carlo {} @ p={}", v.name(), sig4(p)),
                        "",
                        m.estimate,
                        a,
                        RefKind::Analytic,
                        Some(Tol::Abs(3.0 * sigma)),
                    )
                    .note(format!("{} trials, 3 sigma", self.mc_trials)),
                );
            }
        }
        let p8 = 1e-8;
        let fb = fault::analytic_failure_prob(&geos[0].1, p8)?;
        let fr = fault::analytic_failure_prob(&geos[2].1, p8)?;
        let floor = self.published.get("rel.redundant_vs_baseline_min")?;
        rows.push(
            Row::checked(
                "reliability gain redundant-mux vs baseline @ p=1e-8",
                "x",
                fb / fr,
                floor.value,
                RefKind::Published,
                Some(Tol::AtLeast),
            )
            .note("failure needs two faults: gain is about 2/(N p)"),
        );
        let n = geos[0].1.total_units();
        rows.push(Row::info("fault units (JJ) in baseline", "JJ", n as f64));
        Ok(self.report(
            ReportId::Fig10,
            rows,
            vec![
                "unit = one JJ; a region is faulty if any of its JJs is".into(),
                "survival: faulty stages <= spares, <= 1 faulty mux block per boundary with the redundant path (0 without), hash collector fault-free".into(),
            ],
        ))
    }

    /// Efficiency of the one-spare fault-tolerant design (GH/J), closing the
    /// power model on the published delay-line JJ count scaled by our JJ ratio.
    pub fn fault_tolerant_efficiency(&self) -> Result<f64> {
        let ft = self.fault_tolerant(false)?;
        let dl = self.design(AdderStrategy::Csa4DelayLine);
        let n = self.pv("t4.csa4dl.jj")? * ft.jj_system() as f64 / dl.jj_system() as f64;
        self.efficiency(n, self.phys.ic)
    }

    pub fn btwc(&self, ic_grid: &[f64], step_threshold: f64) -> Result<fault::TuneResult> {
        let ft = self.fault_tolerant(false)?;
        let g = fault::Geometry::from_design(&ft, &self.lib);
        let f = FaultVsIc::Step {
            threshold: step_threshold,
            p_high: 1e-4,
        };
        fault::tune_ic(&g, ic_grid, &f, self.seed)
    }

    fn fig12(&self) -> Result<TableReport> {
        let cmos = self.pv("cmos.efficiency")?;
        let mut rows = vec![
            self.constant("CMOS reference", "fig12.cmos")?,
            self.constant("commercial ASIC", "fig12.antminer")?,
            self.alpha_row(),
        ];
        let basic = self.closure_efficiency("t4.rca.jj")? / cmos;
        rows.push(self.vs("direct JJ port (RCA)", basic, "fig12.basic")?);
        let tech = self.closure_efficiency("t4.csa4dl.jj")? / cmos;
        rows.push(self.vs("technology-aware (CSA4 + delay line)", tech, "fig12.tech_aware")?);
        let ft = self.fault_tolerant_efficiency()? / cmos;
        rows.push(self.vs("fault-tolerant, one spare stage", ft, "fig12.fault_tolerant")?);
        let ic_nom = self.pv("ic.nominal")?;
        let ic_low = self.pv("ic.btwc")?;
        let grid: Vec<f64> = (10..=38).rev().step_by(4).map(|u| u as f64 / 1e6).collect();
        let tuned = self.btwc(&grid, ic_low)?;
        rows.push(Row::checked("tuned Ic", "A", tuned.chosen_ic, ic_low, RefKind::Published, Some(Tol::Rel(1e-9))));
        rows.push(self.vs_scaled("BTWC efficiency gain", "x", tuned.efficiency_gain, "btwc.gain", 1.0)?.note(format!(
            "Ic {} -> {} A",
            sig4(ic_nom),
            sig4(tuned.chosen_ic)
        )));
        let roll = ft * tuned.efficiency_gain;
        rows.push(self.vs("fault-tolerant at tuned Ic", roll, "fig12.btwc")?);
        Ok(self.report(
            ReportId::Fig12,
            rows,
            vec!["efficiencies close the power model on published JJ counts with the measured alpha".into()],
        ))
    }
}

/// Cost every configuration; a bad configuration errors only its own row.
pub fn sweep(configs: &[EngineConfig], study: &Study) -> Result<Vec<Result<CostReport>>> {
    if configs.is_empty() {
        return Err(Error::Config("sweep needs at least one configuration".into()));
    }
    use rayon::prelude::*;
    Ok(configs
        .par_iter()
        .map(|c| {
            let d = generate_engine(c, &study.lib)?;
            study.cost_report(&d)
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[Result<CostReport>], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut head: Vec<&str> = CostReport::CSV_HEADER.to_vec();
    head.push("error");
    wr.write_record(&head).map_err(sim::csv_err)?;
    for r in rows {
        let mut rec = match r {
            Ok(c) => {
                let mut v = c.csv_row();
                v.push(String::new());
                v
            }
            Err(e) => {
                let mut v = vec![String::new(); CostReport::CSV_HEADER.len()];
                v.push(e.to_string());
                v
            }
        };
        rec.truncate(head.len());
        wr.write_record(&rec).map_err(sim::csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

/// JJ and timing summary of a standalone netlist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetlistAnalysis {
    pub name: String,
    pub gates: usize,
    pub nets: usize,
    pub cells: BTreeMap<String, u64>,
    pub jj_gate: u64,
    pub jtl_skew: u64,
    pub jtl_fanout: u64,
    pub jtl_phase: u64,
    pub jj_interconnect: u64,
    pub jj_system: u64,
    pub breakdown: BTreeMap<Category, u64>,
    /// Flat gate-level longest path, JJ switchings.
    pub depth: u64,
    /// Block-synchronous longest path.
    pub block_depth: u64,
    pub mean_fanout: f64,
    pub fanout_histogram: BTreeMap<u32, u64>,
}

pub fn analyze_netlist(nl: &crate::netlist::Netlist, lib: &CellLibrary) -> Result<NetlistAnalysis> {
    let c = crate::engine::CostedNetlist::new(nl.clone(), lib);
    let flat = cost::critical_path(nl, &c.jtl, lib, 1.0, 0.0);
    let blk = cost::block_critical_path(nl, &c.jtl, lib, 1.0, 0.0)?;
    let fan = nl.fanout_histogram();
    Ok(NetlistAnalysis {
        name: nl.name.clone(),
        gates: nl.gates.len(),
        nets: nl.net_count(),
        cells: nl.cell_counts(),
        jj_gate: c.jj_gate(),
        jtl_skew: c.jtl.rule1_skew,
        jtl_fanout: c.jtl.rule2_fanout,
        jtl_phase: c.jtl.rule3_phase,
        jj_interconnect: c.jj_interconnect(),
        jj_system: c.jj_system(),
        breakdown: c.breakdown(),
        depth: flat.depth,
        block_depth: blk.depth,
        mean_fanout: fan.mean(),
        fanout_histogram: fan.histogram,
    })
}

impl NetlistAnalysis {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "netlist {}: {} gates, {} nets", self.name, self.gates, self.nets);
        let cells: Vec<String> = self.cells.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "  cells: {}", cells.join(" "));
        let _ = writeln!(s, "  JJ gate {}  interconnect {}  system {}", self.jj_gate, self.jj_interconnect, self.jj_system);
        let _ = writeln!(s, "  JTLs: skew {}  fanout {}  phase {}", self.jtl_skew, self.jtl_fanout, self.jtl_phase);
        let b: Vec<String> = self.breakdown.iter().map(|(k, v)| format!("{}={v}", k.name())).collect();
        let _ = writeln!(s, "  breakdown: {}", b.join(" "));
        let _ = writeln!(s, "  critical path: {} JJ flat, {} JJ block-level", self.depth, self.block_depth);
        let h: Vec<String> = self.fanout_histogram.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        let _ = writeln!(s, "  fanout mean {:.3}  histogram {}", self.mean_fanout, h.join(" "));
        s
    }
}
