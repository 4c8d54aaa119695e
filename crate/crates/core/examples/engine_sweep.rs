//! Cost every adder strategy, then the fault-tolerant variants of the final design.

use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig};
use rqlsha::report::{sweep, write_sweep_csv, Study};

fn main() -> rqlsha::Result<()> {
    let study = Study::default_study()?;
    let mut configs: Vec<EngineConfig> = AdderStrategy::ALL.iter().map(|&a| EngineConfig::new(a)).collect();
    let dl = EngineConfig::new(AdderStrategy::Csa4DelayLine);
    configs.push(dl.with_spares(1, false));
    configs.push(dl.with_spares(1, true));
    let rows = sweep(&configs, &study)?;
    write_sweep_csv(&rows, std::io::stdout().lock())?;

    let d = generate_engine(&dl, &study.lib)?;
    println!("\n{}: {} adders, {} stage shapes", dl.label(), d.adder_count, d.shapes.len());
    println!("delay-line per-stage saving vs CSA4 registers: {:.2}%", study.delay_line_saving_pct());
    Ok(())
}
