//! Adder generators: ripple-carry, Kogge-Stone and carry-save trees.
//!
//! Generators append gates to a [`NetlistBuilder`] in its current block, so the
//! same code builds standalone adders and adders embedded in a pipeline stage.

use serde::{Deserialize, Serialize};

use crate::cell::CellLibrary;
use crate::error::{Error, Result};
use crate::netlist::{Category, NetId, Netlist, NetlistBuilder, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AdderKind {
    Rca,
    Ksa,
    Csa,
}

impl AdderKind {
    pub fn name(self) -> &'static str {
        match self {
            AdderKind::Rca => "RCA",
            AdderKind::Ksa => "KSA",
            AdderKind::Csa => "CSA",
        }
    }
}

pub fn full_adder(b: &mut NetlistBuilder, x: NetId, y: NetId, c: NetId) -> (NetId, NetId) {
    let p = b.gate("XOR", &[x, y]);
    let s = b.gate("XOR", &[p, c]);
    let g1 = b.gate("AND", &[x, y]);
    let g2 = b.gate("AND", &[p, c]);
    let co = b.gate("OR", &[g1, g2]);
    (s, co)
}

/// Ripple-carry adder; returns (sum, carry-out).
pub fn ripple_carry(b: &mut NetlistBuilder, x: &[NetId], y: &[NetId], cin: NetId) -> (Word, NetId) {
    assert_eq!(x.len(), y.len());
    let mut c = cin;
    let mut sum = Vec::with_capacity(x.len());
    for (&xi, &yi) in x.iter().zip(y) {
        let (s, co) = full_adder(b, xi, yi, c);
        sum.push(s);
        c = co;
    }
    (sum, c)
}

/// Radix-2 Kogge-Stone adder with every prefix node kept (no pruning).
pub fn kogge_stone(b: &mut NetlistBuilder, x: &[NetId], y: &[NetId], cin: NetId) -> (Word, NetId) {
    assert_eq!(x.len(), y.len());
    let w = x.len();
    let p0: Word = (0..w).map(|i| b.gate("XOR", &[x[i], y[i]])).collect();
    let mut g: Word = (0..w).map(|i| b.gate("AND", &[x[i], y[i]])).collect();
    let mut p = p0.clone();
    let t = b.gate("AND", &[p0[0], cin]);
    g[0] = b.gate("OR", &[g[0], t]);
    let mut d = 1;
    while d < w {
        let (mut g2, mut p2) = (g.clone(), p.clone());
        for i in d..w {
            let t = b.gate("AND", &[p[i], g[i - d]]);
            g2[i] = b.gate("OR", &[g[i], t]);
            p2[i] = b.gate("AND", &[p[i], p[i - d]]);
        }
        g = g2;
        p = p2;
        d *= 2;
    }
    let mut sum = Vec::with_capacity(w);
    sum.push(b.gate("XOR", &[p0[0], cin]));
    for i in 1..w {
        sum.push(b.gate("XOR", &[p0[i], g[i - 1]]));
    }
    (sum, g[w - 1])
}

/// One 3:2 compressor row: (sum, carry shifted left by one, MSB dropped).
pub fn compress_row(b: &mut NetlistBuilder, x: &[NetId], y: &[NetId], z: &[NetId]) -> (Word, Word) {
    let zero = b.constant(false);
    let mut s = Vec::with_capacity(x.len());
    let mut c = vec![zero];
    for i in 0..x.len() {
        let (si, ci) = full_adder(b, x[i], y[i], z[i]);
        s.push(si);
        if i + 1 < x.len() {
            c.push(ci);
        }
    }
    (s, c)
}

/// Modular multi-operand sum: 3:2 rows down to two operands, then a ripple-carry adder.
pub fn carry_save(b: &mut NetlistBuilder, operands: &[Word]) -> Word {
    let mut ops: Vec<Word> = operands.to_vec();
    while ops.len() > 2 {
        let (s, c) = compress_row(b, &ops[0], &ops[1], &ops[2]);
        ops.drain(..3);
        ops.push(s);
        ops.push(c);
    }
    let zero = b.constant(false);
    ripple_carry(b, &ops[0], &ops[1], zero).0
}

/// 3:2 rows needed to reduce `n` operands to two.
pub fn csa_rows(n: usize) -> usize {
    n.saturating_sub(2)
}

/// Standalone adder with ports. Two-operand adders expose `cin` and `cout`;
/// carry-save adders take 3–4 operands and return the modular sum.
pub fn adder_block(kind: AdderKind, width: usize, operands: usize, lib: &CellLibrary) -> Result<Netlist> {
    match (kind, operands) {
        (AdderKind::Rca | AdderKind::Ksa, 2) | (AdderKind::Csa, 3 | 4) if width >= 1 => {}
        _ => {
            return Err(Error::Config(format!(
                "unsupported adder {} with {operands} operands, width {width}",
                kind.name()
            )))
        }
    }
    let name = format!("{}{width}x{operands}", kind.name().to_lowercase());
    let mut b = NetlistBuilder::new(&name, lib);
    b.block(&name, Category::Adder);
    let ops: Vec<Word> = (0..operands)
        .map(|k| b.input_word(&((b'a' + k as u8) as char).to_string(), width))
        .collect();
    match kind {
        AdderKind::Csa => {
            let s = carry_save(&mut b, &ops);
            b.output_word(&s);
        }
        _ => {
            let cin = b.input("cin");
            let (s, cout) = if kind == AdderKind::Rca {
                ripple_carry(&mut b, &ops[0], &ops[1], cin)
            } else {
                kogge_stone(&mut b, &ops[0], &ops[1], cin)
            };
            b.output_word(&s);
            b.output(cout);
        }
    }
    b.build()
}
