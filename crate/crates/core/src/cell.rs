//! RQL cell library: JJ cost, switching depth and boolean behaviour per cell.
//!
//! The shipped defaults (`data/cells.json`) are calibrated, not measured. The
//! AND/OR/XOR costs were fitted so that the generated 32-bit ripple-carry and
//! Kogge-Stone adders land on the foundry-flow totals once the JTL pass has run.
//! JTL = 2 and DREG = 12 are fixed by the technology and enforced on load.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const JTL: &str = "JTL";
pub const DREG: &str = "DREG";

/// Cells every library must provide.
pub const REQUIRED: [&str; 8] = ["AND", "OR", "XOR", "ANOTB", JTL, DREG, "MUX2", "MUX8"];

const DEFAULT_LIBRARY: &str = include_str!("../data/cells.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicFn {
    And,
    Or,
    Xor,
    /// A-AND-NOT-B: A passes unless B pulses in the same phase.
    Anotb,
    Not,
    Buf,
    /// inputs `[a, b, sel]`, output `sel ? b : a`
    Mux2,
    /// inputs `[d0..d7, s0, s1, s2]`
    Mux8,
}

impl LogicFn {
    pub fn arity(self) -> usize {
        match self {
            LogicFn::Not | LogicFn::Buf => 1,
            LogicFn::Mux2 => 3,
            LogicFn::Mux8 => 11,
            _ => 2,
        }
    }

    /// Total over every input combination of the right arity.
    pub fn eval(self, ins: &[bool]) -> bool {
        match self {
            LogicFn::And => ins[0] & ins[1],
            LogicFn::Or => ins[0] | ins[1],
            LogicFn::Xor => ins[0] ^ ins[1],
            LogicFn::Anotb => ins[0] & !ins[1],
            LogicFn::Not => !ins[0],
            LogicFn::Buf => ins[0],
            LogicFn::Mux2 => {
                if ins[2] {
                    ins[1]
                } else {
                    ins[0]
                }
            }
            LogicFn::Mux8 => {
                let sel = ins[8] as usize | (ins[9] as usize) << 1 | (ins[10] as usize) << 2;
                ins[sel]
            }
        }
    }
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellKind {
    pub name: String,
    pub jj_count: u32,
    #[serde(default = "one")]
    pub delay_depth: u32,
    pub function: LogicFn,
    pub inputs: usize,
    #[serde(default)]
    pub phase_boundary: bool,
    #[serde(default = "one")]
    pub max_drive: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct LibraryFile {
    version: String,
    #[serde(default = "four")]
    delay_line_jj_per_cycle_bit: u32,
    cells: Vec<CellKind>,
}

fn four() -> u32 {
    4
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellLibrary {
    pub version: String,
    pub cells: BTreeMap<String, CellKind>,
    /// Delay-line storage cost; a scalar rather than a cell.
    pub delay_line_jj_per_cycle_bit: u32,
}

impl CellLibrary {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: LibraryFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("cell library: {e}")))?;
        let mut cells = BTreeMap::new();
        for cell in file.cells {
            validate_cell(&cell)?;
            if cells.insert(cell.name.clone(), cell.clone()).is_some() {
                return Err(Error::Validation(format!("cell {} defined twice", cell.name)));
            }
        }
        for name in REQUIRED {
            if !cells.contains_key(name) {
                return Err(Error::Validation(format!("library lacks required cell {name}")));
            }
        }
        if file.delay_line_jj_per_cycle_bit == 0 {
            return Err(Error::Validation("delay_line_jj_per_cycle_bit must be positive".into()));
        }
        Ok(CellLibrary {
            version: file.version,
            cells,
            delay_line_jj_per_cycle_bit: file.delay_line_jj_per_cycle_bit,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let file = LibraryFile {
            version: self.version.clone(),
            delay_line_jj_per_cycle_bit: self.delay_line_jj_per_cycle_bit,
            cells: self.cells.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).expect("library serializes")
    }

    pub fn get(&self, name: &str) -> Result<&CellKind> {
        self.cells
            .get(name)
            .ok_or_else(|| Error::UnknownCell(name.to_string()))
    }

    pub fn jj(&self, name: &str) -> u32 {
        self.cells[name].jj_count
    }

    pub fn jtl_jj(&self) -> u32 {
        self.jj(JTL)
    }

    pub fn jtl_delay(&self) -> u32 {
        self.cells[JTL].delay_depth
    }

    pub fn register_bit_jj(&self) -> u32 {
        self.jj(DREG)
    }
}

impl Default for CellLibrary {
    fn default() -> Self {
        Self::from_json(DEFAULT_LIBRARY).expect("shipped cell library is valid")
    }
}

fn validate_cell(cell: &CellKind) -> Result<()> {
    let bad = |why: &str| Err(Error::Validation(format!("cell {}: {why}", cell.name)));
    if cell.jj_count < 1 {
        return bad("jj_count must be >= 1");
    }
    if cell.name == JTL && cell.jj_count != 2 {
        return bad("a JTL is exactly 2 JJs");
    }
    if cell.name == DREG && cell.jj_count != 12 {
        return bad("a register bit is exactly 12 JJs");
    }
    if cell.max_drive != 1 {
        return bad("RQL cells drive a single load (max_drive = 1)");
    }
    if cell.inputs != cell.function.arity() {
        return bad("input count does not match the logic function");
    }
    Ok(())
}
