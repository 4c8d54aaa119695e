//! Print the calibrated cell library and evaluate an A-AND-NOT-B gate.

use rqlsha::cell::CellLibrary;

fn main() {
    let lib = CellLibrary::default();
    println!("library {}", lib.version);
    for c in lib.cells.values() {
        println!("  {:<6} {:>3} JJ  inputs {}  depth {}", c.name, c.jj_count, c.inputs, c.delay_depth);
    }
    println!("  delay line: {} JJ per bit per cycle", lib.delay_line_jj_per_cycle_bit);

    let anotb = lib.get("ANOTB").unwrap().function;
    for a in [false, true] {
        for b in [false, true] {
            println!("  ANOTB({}, {}) = {}", a as u8, b as u8, anotb.eval(&[a, b]) as u8);
        }
    }
}
