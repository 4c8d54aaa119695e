//! Dynamic and cooled power, efficiency, and how both move with Ic.

use rqlsha::cost::{dynamic_power, energy_efficiency, total_power, PhysicsConstants};
use rqlsha::engine::AdderStrategy;
use rqlsha::fault::efficiency_gain;
use rqlsha::report::Study;

fn main() -> rqlsha::Result<()> {
    let study = Study::default_study()?;
    let phys = PhysicsConstants::default();
    println!("measured alpha {:.4}", study.alpha);
    for a in AdderStrategy::ALL {
        let r = study.cost_report(study.design(a))?;
        println!(
            "{:<8} {:>9} JJ  {:.3} GH/s  {:>6.2} mW  {:>5.2} GH/J",
            a.name(),
            r.jj_system,
            r.hashrate / 1e9,
            r.p_total * 1e3,
            r.efficiency / 1e9
        );
    }

    // one million JJs at 1 GHz, by hand
    let pd = dynamic_power(1e6, 1e9, phys.ic, study.alpha, phys.phi0)?;
    let pt = total_power(pd, phys.cooling_factor);
    println!("1M JJ @ 1 GHz: {:.3e} W at 4 K, {:.3e} W cooled, {:.1} GH/J", pd, pt, energy_efficiency(1e9, pt)? / 1e9);
    for ic in [38e-6, 30e-6, 20e-6, 10e-6] {
        println!("Ic {:>4.0} uA: efficiency x{:.3}", ic * 1e6, efficiency_gain(ic)?);
    }
    Ok(())
}
