//! Maximum coverage and its separate-white-constraint variant.

use alloc::format;
use alloc::vec;

use crate::instance::{Color, CoverageBudget, CoverageInstance};
use crate::solution::SolveError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coverage {
    /// Total weight of covered black elements, summed in element order.
    pub black_weight: f64,
    pub white_count: usize,
}

/// Union coverage of a selection of distinct set ids.
pub fn coverage_of(inst: &CoverageInstance, selection: &[usize]) -> Result<Coverage, SolveError> {
    let mut chosen = vec![false; inst.set_count()];
    for &s in selection {
        if s >= inst.set_count() || chosen[s] {
            return Err(SolveError::Infeasible(format!("invalid or repeated set id {s}")));
        }
        chosen[s] = true;
    }
    let mut covered = vec![false; inst.element_count()];
    for &s in selection {
        for &e in inst.members(s) {
            covered[e] = true;
        }
    }
    let mut black_weight = 0.0;
    let mut white_count = 0;
    for (elem, _) in inst.elements().iter().zip(&covered).filter(|(_, &c)| c) {
        match elem.color {
            Color::Black => black_weight += elem.weight,
            Color::White => white_count += 1,
        }
    }
    Ok(Coverage { black_weight, white_count })
}

/// Covered weight, after checking the selection against the budget.
pub fn cost(inst: &CoverageInstance, selection: &[usize]) -> Result<f64, SolveError> {
    let cov = coverage_of(inst, selection)?;
    match inst.budget() {
        CoverageBudget::Sets(k) if selection.len() > k => Err(SolveError::Infeasible(format!(
            "{} sets selected, budget is {k}",
            selection.len()
        ))),
        CoverageBudget::WhiteElements(k) if cov.white_count > k => Err(SolveError::Infeasible(
            format!("{} white elements covered, threshold is {k}", cov.white_count),
        )),
        _ => Ok(cov.black_weight),
    }
}
