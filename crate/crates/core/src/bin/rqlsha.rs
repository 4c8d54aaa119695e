//! Command-line front end. Text goes to stdout; CSV/JSON artifacts go to the
//! output directory (`RQLSHA_OUT_DIR`, default `./rqlsha-out`).

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rqlsha::cell::CellLibrary;
use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig, StorageStrategy};
use rqlsha::fault::{self, AvfAccounting, ReliabilityCurve, Variant, DEFAULT_SEED};
use rqlsha::netlist::Netlist;
use rqlsha::report::{self, ReportId, Study};
use rqlsha::sim::{self, MiningJob};

const OUT_DIR_ENV: &str = "RQLSHA_OUT_DIR";

#[derive(Parser)]
#[command(name = "rqlsha", version, about = "RQL double-SHA-256 engine design-space explorer")]
struct Cli {
    /// Cell library JSON (defaults to the built-in calibrated library).
    #[arg(long, global = true)]
    library: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// JTL insertion, JJ complexity and critical path of a netlist file.
    Analyze { netlist: PathBuf },
    /// Build an engine and export its stage netlists and cost report.
    Generate(DesignArgs),
    /// Run a mining job through the cycle-level pipeline.
    Simulate {
        #[arg(long)]
        job: PathBuf,
        /// Record per-cycle activity and derive alpha.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Single-bit transient injection campaign.
    Avf {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AvfMode::Occupied)]
        mode: AvfMode,
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Failure probability vs per-JJ fault probability.
    Reliability {
        /// baseline, spare-bypass, spare-redundant-mux or all.
        #[arg(long, default_value = "all")]
        variant: String,
        /// Comma-separated p values (default 1e-9..1e-4, two per decade).
        #[arg(long, value_delimiter = ',')]
        pgrid: Vec<f64>,
        /// Monte Carlo trials per point instead of the analytic model.
        #[arg(long)]
        monte_carlo: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Better-than-worst-case Ic tuning on the one-spare design.
    Btwc {
        /// Descending Ic values in amperes, or with a `u` suffix in µA (e.g. 38u,34u).
        #[arg(long, value_delimiter = ',', required = true)]
        ic_grid: Vec<String>,
        /// Step threshold of the synthetic fault-vs-Ic curve, in amperes.
        #[arg(long, default_value_t = 10e-6)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Recompute a published table or figure; exits 1 on a tolerance breach.
    Reproduce {
        /// T2, T3, T4, T5, FIG10, FIG12 or ALL.
        id: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Cost every adder strategy (baseline storage, no spares) into one CSV.
    Sweep {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct DesignArgs {
    #[arg(long, value_enum, default_value_t = AdderArg::Rca)]
    adder: AdderArg,
    /// Defaults to registers.
    #[arg(long, value_enum)]
    storage: Option<StorageArg>,
    #[arg(long, default_value_t = 0)]
    spares: usize,
    #[arg(long)]
    redundant_mux: bool,
    /// JSON engine configuration; overrides the flags above.
    #[arg(long)]
    design: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum AdderArg {
    Rca,
    Ksa,
    Csa3,
    Csa4,
}

#[derive(ValueEnum, Clone, Copy)]
enum StorageArg {
    Reg,
    Delayline,
}

#[derive(ValueEnum, Clone, Copy)]
enum AvfMode {
    Occupied,
    AllBits,
}

impl DesignArgs {
    fn config(&self) -> Result<EngineConfig> {
        if let Some(p) = &self.design {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let cfg: EngineConfig = serde_json::from_str(&text).context("parsing design file")?;
            cfg.validate()?;
            return Ok(cfg);
        }
        let dl = matches!(self.storage, Some(StorageArg::Delayline));
        let adder = match (self.adder, dl) {
            (AdderArg::Rca, _) => AdderStrategy::Rca,
            (AdderArg::Ksa, _) => AdderStrategy::KsaCritical,
            (AdderArg::Csa3, _) => AdderStrategy::Csa3,
            (AdderArg::Csa4, false) => AdderStrategy::Csa4,
            (AdderArg::Csa4, true) => AdderStrategy::Csa4DelayLine,
        };
        let mut cfg = EngineConfig::new(adder).with_spares(self.spares, self.redundant_mux);
        if dl {
            cfg.storage = StorageStrategy::DelayLine;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir() -> Result<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("rqlsha-out"), PathBuf::from);
    fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("writing {}", path.display()))?,
    ))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn library(path: &Option<PathBuf>) -> Result<CellLibrary> {
    Ok(match path {
        Some(p) => CellLibrary::load(p)?,
        None => CellLibrary::default(),
    })
}

fn slug(label: &str) -> String {
    label.to_ascii_lowercase().replace('+', "_")
}

fn parse_ic(s: &str) -> Result<f64> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix("uA").or_else(|| t.strip_suffix('u')) {
        Some(n) => (n, 1e-6),
        None => (t, 1.0),
    };
    let v: f64 = num.parse().with_context(|| format!("bad Ic value `{s}`"))?;
    // exact micro-amp grids: 10u must equal 10e-6 bit for bit
    Ok(if scale == 1.0 { v } else { v / 1e6 })
}

#[derive(Serialize)]
struct ShapeEntry {
    file: String,
    msu: bool,
    wk_next: bool,
    gates: usize,
    jj_system: u64,
    depth: u64,
    stages: Vec<usize>,
}

#[derive(Serialize)]
struct Manifest {
    config: EngineConfig,
    label: String,
    physical_stages: usize,
    adder_count: usize,
    shapes: Vec<ShapeEntry>,
    cost: rqlsha::cost::CostReport,
}

fn generate(lib: &CellLibrary, args: &DesignArgs) -> Result<()> {
    let cfg = args.config()?;
    let design = generate_engine(&cfg, lib)?;
    let study = Study::new(lib.clone(), DEFAULT_SEED)?;
    let cost = study.cost_report(&design)?;
    let dir = out_dir()?.join(slug(&cfg.label()));
    fs::create_dir_all(&dir)?;
    let mut shapes = Vec::new();
    for (k, s) in design.shapes.iter().enumerate() {
        let file = format!("stage_shape_{k}.net");
        fs::write(dir.join(&file), s.stage.netlist.to_text())?;
        shapes.push(ShapeEntry {
            file,
            msu: s.key.msu,
            wk_next: s.key.wk_next,
            gates: s.stage.netlist.gates.len(),
            jj_system: s.cost.jj_system(),
            depth: s.depth,
            stages: design.layouts.iter().filter(|l| l.shape == k).map(|l| l.index).collect(),
        });
    }
    fs::write(dir.join("ihc.net"), design.ihc.netlist.to_text())?;
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            config: cfg,
            label: cfg.label(),
            physical_stages: cfg.physical_stages(),
            adder_count: design.adder_count,
            shapes,
            cost: cost.clone(),
        },
    )?;
    let mut w = csv::Writer::from_writer(create(&dir.join("cost.csv"))?);
    w.write_record(rqlsha::cost::CostReport::CSV_HEADER)?;
    w.write_record(cost.csv_row())?;
    w.flush()?;

    println!("design {}", cfg.label());
    println!("  physical stages {}  adders {}", cfg.physical_stages(), design.adder_count);
    println!(
        "  JJ gate {}  interconnect {}  system {}",
        cost.jj_gate, cost.jj_interconnect, cost.jj_system
    );
    for (c, v) in &cost.breakdown {
        println!("  {:<9} {:>9} JJ  {:>5.1}%", c.name(), v, 100.0 * cost.share(*c));
    }
    println!("  stage depth {} JJ  hashrate {:.4} GH/s", cost.critical_path_depth, cost.hashrate / 1e9);
    println!(
        "  alpha {:.4}  power {:.3} mW  efficiency {:.2} GH/J",
        cost.alpha,
        cost.p_total * 1e3,
        cost.efficiency / 1e9
    );
    println!("  {} stage shapes exported", design.shapes.len());
    Ok(())
}

fn simulate(lib: &CellLibrary, job_path: &Path, trace: bool, args: &DesignArgs) -> Result<()> {
    let job = MiningJob::load(job_path)?;
    let design = generate_engine(&args.config()?, lib)?;
    let out = sim::mine(&job, &design)?;
    println!("design {}", design.config.label());
    println!("nonces {}..={}", job.nonce_start, job.nonce_end);
    match &out.found {
        Some((n, d)) => println!("found nonce {n} digest {}", hex::encode(d)),
        None => println!("no nonce below target"),
    }
    println!("hashes {}  cycles {}", out.hashes, out.cycles);
    if trace {
        let tr = sim::record_activity(&design, &job.header, job.nonce_start..=job.nonce_end, true)?;
        let path = out_dir()?.join("activity.csv");
        tr.write_csv(create(&path)?)?;
        match tr.alpha() {
            Ok(a) => println!("alpha {a:.4} over {} cycles", tr.samples.len()),
            Err(_) => println!(
                "alpha unavailable: the pipeline never filled ({} nonces, {} stages)",
                u64::from(job.nonce_end - job.nonce_start) + 1,
                design.config.physical_stages()
            ),
        }
    }
    Ok(())
}

fn avf(lib: &CellLibrary, trials: u64, seed: u64, mode: AvfMode, args: &DesignArgs) -> Result<()> {
    let design = generate_engine(&args.config()?, lib)?;
    let mode = match mode {
        AvfMode::Occupied => AvfAccounting::Occupied,
        AvfMode::AllBits => AvfAccounting::AllBits,
    };
    let r = fault::measure_avf(&design, trials, seed, mode)?;
    write_json(&out_dir()?.join("avf.json"), &r)?;
    println!("design {}  accounting {:?}  seed {}", r.design, r.accounting, r.seed);
    println!("corrupted {}/{}  AVF {:.4}  95% CI [{:.4}, {:.4}]", r.corrupted, r.trials, r.avf, r.ci_low, r.ci_high);
    Ok(())
}

fn reliability(lib: &CellLibrary, variant: &str, pgrid: Vec<f64>, mc: Option<u64>, seed: u64) -> Result<()> {
    let variants = if variant.eq_ignore_ascii_case("all") {
        Variant::ALL.to_vec()
    } else {
        variant.split(',').map(Variant::parse).collect::<rqlsha::Result<_>>()?
    };
    let grid = if pgrid.is_empty() { fault::default_pgrid() } else { pgrid };
    let base = EngineConfig::new(AdderStrategy::Csa4DelayLine);
    let mut curves = Vec::new();
    for v in variants {
        let g = v.geometry(&base, lib)?;
        curves.push(fault::reliability_curve(v, &g, &grid, mc.map(|t| (t, seed)))?);
    }
    ReliabilityCurve::write_csv(&curves, create(&out_dir()?.join("reliability.csv"))?)?;
    ReliabilityCurve::write_csv(&curves, std::io::stdout().lock())?;
    Ok(())
}

fn btwc(lib: &CellLibrary, grid: &[String], threshold: f64, seed: u64) -> Result<()> {
    let grid: Vec<f64> = grid.iter().map(|s| parse_ic(s)).collect::<Result<_>>()?;
    let study = Study::new(lib.clone(), seed)?;
    let r = study.btwc(&grid, threshold)?;
    let mut w = csv::Writer::from_writer(create(&out_dir()?.join("btwc.csv"))?);
    w.write_record(["ic_a", "p_gate", "faulty_stages", "isolable"])?;
    for s in &r.steps {
        println!(
            "Ic {:>6.2} uA  p {:<8}  faulty stages {}  {}",
            s.ic * 1e6,
            rqlsha::cost::sig4(s.p),
            s.faulty_stages,
            if s.isolable { "isolable" } else { "not isolable" }
        );
        w.write_record([
            rqlsha::cost::sig4(s.ic),
            rqlsha::cost::sig4(s.p),
            s.faulty_stages.to_string(),
            s.isolable.to_string(),
        ])?;
    }
    w.flush()?;
    println!("chosen Ic {:.2} uA  efficiency gain {:.4}x", r.chosen_ic * 1e6, r.efficiency_gain);
    Ok(())
}

fn reproduce(lib: &CellLibrary, id: &str, seed: u64) -> Result<bool> {
    let ids = if id.eq_ignore_ascii_case("all") {
        ReportId::ALL.to_vec()
    } else {
        vec![ReportId::parse(id)?]
    };
    let study = Study::new(lib.clone(), seed)?;
    let dir = out_dir()?;
    let mut breached = false;
    for id in ids {
        let r = study.reproduce(id)?;
        print!("{}", r.render_text());
        r.write_csv(create(&dir.join(format!("{}.csv", id.name().to_ascii_lowercase())))?)?;
        breached |= r.breached();
    }
    Ok(breached)
}

fn sweep(lib: &CellLibrary, seed: u64) -> Result<()> {
    let study = Study::new(lib.clone(), seed)?;
    let configs: Vec<EngineConfig> = AdderStrategy::ALL.iter().map(|&a| EngineConfig::new(a)).collect();
    let rows = report::sweep(&configs, &study)?;
    report::write_sweep_csv(&rows, create(&out_dir()?.join("sweep.csv"))?)?;
    report::write_sweep_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let lib = library(&cli.library)?;
    match cli.cmd {
        Cmd::Analyze { netlist } => {
            let text = fs::read_to_string(&netlist).with_context(|| format!("reading {}", netlist.display()))?;
            let nl = Netlist::from_text(&text, &lib)?;
            let a = report::analyze_netlist(&nl, &lib)?;
            write_json(&out_dir()?.join(format!("analyze_{}.json", slug(&a.name))), &a)?;
            print!("{}", a.render_text());
        }
        Cmd::Generate(args) => generate(&lib, &args)?,
        Cmd::Simulate { job, trace, design } => simulate(&lib, &job, trace, &design)?,
        Cmd::Avf { trials, seed, mode, design } => avf(&lib, trials, seed, mode, &design)?,
        Cmd::Reliability {
            variant,
            pgrid,
            monte_carlo,
            seed,
        } => reliability(&lib, &variant, pgrid, monte_carlo, seed)?,
        Cmd::Btwc { ic_grid, threshold, seed } => {
            if ic_grid.is_empty() {
                bail!("empty Ic grid");
            }
            btwc(&lib, &ic_grid, threshold, seed)?
        }
        Cmd::Reproduce { id, seed } => return reproduce(&lib, &id, seed),
        Cmd::Sweep { seed } => sweep(&lib, seed)?,
    }
    Ok(false)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("tolerance breach");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
