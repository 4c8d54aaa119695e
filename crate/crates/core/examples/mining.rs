//! Mine the genesis block's nonce through the cycle-level pipeline.

use rqlsha::cell::CellLibrary;
use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig};
use rqlsha::sha::{double_sha256, Header};
use rqlsha::sim::{mine, MiningJob};

const GENESIS: &str = "0100000000000000000000000000000000000000000000000000000000000000000000003ba3edfd7a7b12b27ac72c3e67768f617fc81bc3888a51323a9fb8aa4b1e5e4a29ab5f49ffff001d1dac2b7c";

fn main() -> rqlsha::Result<()> {
    let header = Header::from_hex(GENESIS).map_err(rqlsha::Error::Parse)?;
    let lib = CellLibrary::default();
    let design = generate_engine(&EngineConfig::new(AdderStrategy::Csa4DelayLine).with_spares(1, false), &lib)?;
    let job = MiningJob {
        header,
        nonce_start: 2_083_236_800,
        nonce_end: 2_083_237_000,
        target: MiningJob::target_with_zero_bits(32),
    };
    let out = mine(&job, &design)?;
    let (nonce, digest) = out.found.expect("genesis nonce is in range");
    println!("{}: nonce {nonce} after {} hashes, {} cycles", design.config.label(), out.hashes, out.cycles);
    let mut shown = digest;
    shown.reverse();
    println!("block hash {}", hex::encode(shown));
    assert_eq!(digest, double_sha256(&header.with_nonce(nonce).0));
    println!("job file:\n{}", job.to_json());
    Ok(())
}
