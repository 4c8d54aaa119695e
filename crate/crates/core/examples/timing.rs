//! Stage critical paths and the hashrate they imply under the RCA anchor.

use rqlsha::engine::AdderStrategy;
use rqlsha::report::Study;

fn main() -> rqlsha::Result<()> {
    let study = Study::default_study()?;
    let rca = study.hashrate(AdderStrategy::Rca);
    println!("anchor: {} JJ -> {:.3} GH/s", study.calib.anchor_depth, rca / 1e9);
    for a in AdderStrategy::ALL {
        let d = study.design(a);
        let hr = study.hashrate(a);
        println!(
            "{:<8} depth {:>4} JJ  {:.3} GH/s  x{:.3} vs RCA",
            a.name(),
            d.stage_depth,
            hr / 1e9,
            hr / rca
        );
    }
    Ok(())
}
