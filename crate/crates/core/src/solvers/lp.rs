//! 0-1 ILP export of coverage instances in CPLEX LP format.
//!
//! Variables are `X_j` (set `j` chosen) and `Y_i` (element `i` covered),
//! numbered by set index and element index.
//!
//! Max coverage:
//! ```text
//! max  sum_i W_i Y_i
//! s.t. sum_j X_j <= k
//!      Y_i - sum_{j covers i} X_j <= 0          for every element
//! ```
//! Separate coverage constraint (blacks weighted, whites counted):
//! ```text
//! max  sum_{i black} W_i Y_i
//! s.t. sum_{i white} Y_i <= k
//!      Y_i - sum_{j covers i} X_j <= 0          for every element
//!      Y_i - X_j >= 0                           for every white i, covering set j
//! ```
//! The last family forces a white element to count as covered as soon as a
//! covering set is chosen. Blacks only need the upper link since the
//! objective pushes their `Y` up.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::instance::{Color, CoverageBudget, CoverageInstance};

/// Covering sets of every element.
fn coverers(inst: &CoverageInstance) -> Vec<Vec<usize>> {
    let mut by_element = vec![Vec::new(); inst.element_count()];
    for s in 0..inst.set_count() {
        for &e in inst.members(s) {
            by_element[e].push(s);
        }
    }
    by_element
}

pub fn export_ilp(inst: &CoverageInstance) -> String {
    let mut out = String::new();
    // Writing to a String cannot fail.
    let _ = write_ilp(inst, &mut out);
    out
}

fn write_ilp(inst: &CoverageInstance, out: &mut String) -> core::fmt::Result {
    let separate = matches!(inst.budget(), CoverageBudget::WhiteElements(_));
    let elements = inst.elements();
    writeln!(out, "\\ {}", if separate { "max coverage with white threshold" } else { "max coverage" })?;
    writeln!(out, "Maximize")?;
    write!(out, " obj:")?;
    let mut terms = 0;
    for (i, e) in elements.iter().enumerate().filter(|(_, e)| e.color == Color::Black) {
        write!(out, "{} {} Y_{i}", if terms == 0 { "" } else { " +" }, e.weight)?;
        terms += 1;
    }
    if terms == 0 {
        write!(out, " 0 X_0")?;
    }
    writeln!(out)?;
    writeln!(out, "Subject To")?;
    match inst.budget() {
        CoverageBudget::Sets(k) => {
            write!(out, " budget:")?;
            for j in 0..inst.set_count() {
                write!(out, "{} X_{j}", if j == 0 { "" } else { " +" })?;
            }
            writeln!(out, " <= {k}")?;
        }
        CoverageBudget::WhiteElements(k) => {
            write!(out, " whites:")?;
            let mut first = true;
            for (i, _) in elements.iter().enumerate().filter(|(_, e)| e.color == Color::White) {
                write!(out, "{} Y_{i}", if first { "" } else { " +" })?;
                first = false;
            }
            if first {
                write!(out, " 0 X_0")?;
            }
            writeln!(out, " <= {k}")?;
        }
    }
    let by_element = coverers(inst);
    for (i, sets) in by_element.iter().enumerate() {
        write!(out, " cover_{i}: Y_{i}")?;
        for &j in sets {
            write!(out, " - X_{j}")?;
        }
        writeln!(out, " <= 0")?;
    }
    if separate {
        for (i, sets) in by_element.iter().enumerate() {
            if elements[i].color != Color::White {
                continue;
            }
            for &j in sets {
                writeln!(out, " link_{i}_{j}: Y_{i} - X_{j} >= 0")?;
            }
        }
    }
    writeln!(out, "Binary")?;
    for j in 0..inst.set_count() {
        writeln!(out, " X_{j}")?;
    }
    for i in 0..inst.element_count() {
        writeln!(out, " Y_{i}")?;
    }
    writeln!(out, "End")
}
