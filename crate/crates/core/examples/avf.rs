//! Single-bit transient injection under both accounting modes.

use rqlsha::cell::CellLibrary;
use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig};
use rqlsha::fault::{measure_avf, AvfAccounting, DEFAULT_SEED};

fn main() -> rqlsha::Result<()> {
    let d = generate_engine(&EngineConfig::new(AdderStrategy::Rca), &CellLibrary::default())?;
    for mode in [AvfAccounting::Occupied, AvfAccounting::AllBits] {
        let r = measure_avf(&d, 10_000, DEFAULT_SEED, mode)?;
        println!(
            "{:?}: {}/{} corrupted, AVF {:.4} [{:.4}, {:.4}]",
            mode, r.corrupted, r.trials, r.avf, r.ci_low, r.ci_high
        );
    }
    Ok(())
}
