//! Lower Ic step by step while the spare can absorb the faults it causes.

use rqlsha::report::Study;

fn main() -> rqlsha::Result<()> {
    let study = Study::default_study()?;
    let grid: Vec<f64> = (6..=38).rev().step_by(4).map(|u| u as f64 / 1e6).collect();
    let r = study.btwc(&grid, 10e-6)?;
    for s in &r.steps {
        println!("Ic {:>4.0} uA  p {:.0e}  faulty stages {:>3}  isolable {}", s.ic * 1e6, s.p, s.faulty_stages, s.isolable);
    }
    let ft = study.fault_tolerant_efficiency()?;
    println!("chosen {:.0} uA, gain x{:.2}", r.chosen_ic * 1e6, r.efficiency_gain);
    println!("fault-tolerant design: {:.1} GH/J -> {:.1} GH/J", ft, ft * r.efficiency_gain);
    Ok(())
}
