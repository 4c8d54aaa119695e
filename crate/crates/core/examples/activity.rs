//! Extract the activity factor from a pipeline trace.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rqlsha::cell::CellLibrary;
use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig};
use rqlsha::sha::Header;
use rqlsha::sim::record_activity;

fn main() -> rqlsha::Result<()> {
    let lib = CellLibrary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hdr = [0u8; 80];
    rng.fill(&mut hdr[..]);
    for a in [AdderStrategy::Rca, AdderStrategy::Csa4DelayLine] {
        let d = generate_engine(&EngineConfig::new(a), &lib)?;
        let tr = record_activity(&d, &Header(hdr), 0..1024u32, true)?;
        println!(
            "{:<8} {} bits tracked, warmup {} cycles, alpha {:.4}",
            a.name(),
            tr.total_bits,
            tr.warmup,
            tr.alpha()?
        );
    }
    Ok(())
}
