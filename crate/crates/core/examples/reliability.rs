//! Failure probability of the three sparing variants, analytic and sampled,
//! and fault isolation by sweeping the bypass position.

use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig};
use rqlsha::fault::{analytic_failure_prob, detect_faulty_stage, monte_carlo_failure_prob, FaultMap, DEFAULT_SEED};
use rqlsha::report::Study;
use rqlsha::sha::{double_sha256, Header};

fn main() -> rqlsha::Result<()> {
    let study = Study::default_study()?;
    let geos = study.variant_geometries()?;
    println!("{:<8} {:>20} {:>12} {:>12}", "p", "variant", "analytic", "MC 1e5");
    for p in [1e-8, 1e-7, 1e-6, 1e-5] {
        for (v, g) in &geos {
            let a = analytic_failure_prob(g, p)?;
            let m = monte_carlo_failure_prob(g, p, 100_000, DEFAULT_SEED)?;
            println!("{p:<8.0e} {:>20} {a:>12.4e} {:>12.4e}", v.name(), m.estimate);
        }
    }

    let d = generate_engine(&EngineConfig::new(AdderStrategy::Csa4DelayLine).with_spares(1, false), &study.lib)?;
    let h = Header([0x42; 80]);
    let golden = double_sha256(&h.with_nonce(9).0);
    let mut faults = FaultMap::default();
    faults.stages.insert(42);
    println!("stuck fault in stage 42 -> {:?}", detect_faulty_stage(&d, &faults, (&h, 9, &golden))?);
    faults.stages.insert(77);
    println!("faults in 42 and 77 -> {:?}", detect_faulty_stage(&d, &faults, (&h, 9, &golden))?);
    Ok(())
}
