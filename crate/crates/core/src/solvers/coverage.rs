//! Coverage heuristics.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Color, CoverageBudget, CoverageInstance};

/// Running union of chosen sets.
struct Cover<'a> {
    inst: &'a CoverageInstance,
    covered: Vec<bool>,
    whites: usize,
}

impl<'a> Cover<'a> {
    fn new(inst: &'a CoverageInstance) -> Self {
        Cover { inst, covered: vec![false; inst.element_count()], whites: 0 }
    }

    /// (new black weight, new white count) if `set` were added.
    fn delta(&self, set: usize) -> (f64, usize) {
        let elements = self.inst.elements();
        let mut black = 0.0;
        let mut white = 0;
        for &e in self.inst.members(set).iter().filter(|&&e| !self.covered[e]) {
            match elements[e].color {
                Color::Black => black += elements[e].weight,
                Color::White => white += 1,
            }
        }
        (black, white)
    }

    fn add(&mut self, set: usize) {
        for &e in self.inst.members(set) {
            if !self.covered[e] {
                self.covered[e] = true;
                if self.inst.elements()[e].color == Color::White {
                    self.whites += 1;
                }
            }
        }
    }
}

fn white_threshold(inst: &CoverageInstance) -> usize {
    match inst.budget() {
        CoverageBudget::WhiteElements(k) => k,
        CoverageBudget::Sets(_) => usize::MAX,
    }
}

/// Repeatedly takes the set adding the most uncovered weight, until the set
/// budget is spent or nothing adds weight.
pub fn greedy(inst: &CoverageInstance) -> Vec<usize> {
    let k = match inst.budget() {
        CoverageBudget::Sets(k) => k,
        CoverageBudget::WhiteElements(_) => inst.set_count(),
    };
    let mut cover = Cover::new(inst);
    let mut chosen = vec![false; inst.set_count()];
    let mut picked = Vec::new();
    while picked.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for s in (0..inst.set_count()).filter(|&s| !chosen[s]) {
            let (gain, _) = cover.delta(s);
            if gain > 0.0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((s, gain));
            }
        }
        let Some((s, _)) = best else { break };
        chosen[s] = true;
        cover.add(s);
        picked.push(s);
    }
    picked
}

/// Scans sets in id order and keeps each one that covers something and keeps
/// the white count within the threshold.
pub fn local(inst: &CoverageInstance) -> Vec<usize> {
    let k = white_threshold(inst);
    let mut cover = Cover::new(inst);
    let mut picked = Vec::new();
    for s in 0..inst.set_count() {
        if inst.members(s).is_empty() {
            continue;
        }
        let (_, white) = cover.delta(s);
        if cover.whites + white <= k {
            cover.add(s);
            picked.push(s);
        }
    }
    picked
}

/// Repeatedly takes the addable set with the best black-weight gain per newly
/// covered white element. Sets adding no whites rank above all others, by
/// larger black gain.
pub fn greedy_average(inst: &CoverageInstance) -> Vec<usize> {
    let k = white_threshold(inst);
    let mut cover = Cover::new(inst);
    let mut chosen = vec![false; inst.set_count()];
    let mut picked = Vec::new();
    loop {
        // (set, free-of-whites, score)
        let mut best: Option<(usize, bool, f64)> = None;
        for s in (0..inst.set_count()).filter(|&s| !chosen[s]) {
            let (black, white) = cover.delta(s);
            if black <= 0.0 || cover.whites + white > k {
                continue;
            }
            let free = white == 0;
            let score = if free { black } else { black / white as f64 };
            let better = match best {
                None => true,
                Some((_, bfree, bscore)) => (free, score) > (bfree, bscore),
            };
            if better {
                best = Some((s, free, score));
            }
        }
        let Some((s, _, _)) = best else { break };
        chosen[s] = true;
        cover.add(s);
        picked.push(s);
    }
    picked
}
