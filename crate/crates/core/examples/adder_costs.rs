//! JJ cost and depth of standalone 32-bit adders, plus a netlist round trip.

use rqlsha::adders::{adder_block, AdderKind};
use rqlsha::cell::CellLibrary;
use rqlsha::cost::csa_latency;
use rqlsha::netlist::Netlist;
use rqlsha::report::analyze_netlist;

fn main() -> rqlsha::Result<()> {
    let lib = CellLibrary::default();
    for (kind, ops) in [(AdderKind::Rca, 2), (AdderKind::Ksa, 2), (AdderKind::Csa, 3), (AdderKind::Csa, 4)] {
        let nl = adder_block(kind, 32, ops, &lib)?;
        let a = analyze_netlist(&nl, &lib)?;
        println!(
            "{} x{ops}: {:>5} gates  {:>6} JJ  (gate {}, JTL {})  depth {}",
            kind.name(),
            a.gates,
            a.jj_system,
            a.jj_gate,
            a.jj_interconnect,
            a.depth
        );
    }
    println!("CSA latency, 32 bits, 4 operands: {} full-adder delays", csa_latency(32, 4)?);

    // the text format round-trips
    let rca = adder_block(AdderKind::Rca, 8, 2, &lib)?;
    let back = Netlist::from_text(&rca.to_text(), &lib)?;
    assert_eq!(back.gate_jj(&lib), rca.gate_jj(&lib));
    print!("{}", analyze_netlist(&back, &lib)?.render_text());
    Ok(())
}
