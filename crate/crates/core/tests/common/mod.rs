#![allow(dead_code)]

use corobust_core::*;
use proptest::prelude::*;

/// Random DAG: edges go forward in a shuffled order, so any topology is
/// reachable.
pub fn dag(max_jobs: usize) -> impl Strategy<Value = Instance> {
    (1..=max_jobs)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((1u32..=20, 5u32..=100), n),
                prop::collection::vec(prop::bool::weighted(0.35), n * (n - 1) / 2),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|(jobs, mask, order)| {
            let n = jobs.len();
            let jobs = jobs.into_iter().map(|(d, r)| Job::new(d as f64, r as f64 / 100.0)).collect();
            let mut edges = Vec::new();
            let mut bit = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if mask[bit] {
                        edges.push((order[i], order[j]));
                    }
                    bit += 1;
                }
            }
            Instance::Dag(DagInstance::new(jobs, edges).unwrap())
        })
}

pub fn atsp(min_cities: usize, max_cities: usize) -> impl Strategy<Value = Instance> {
    (min_cities..=max_cities)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(1u32..=100, n * n)))
        .prop_map(|(n, w)| Instance::Atsp(AtspInstance::new(n, w.into_iter().map(f64::from).collect()).unwrap()))
}

fn memberships(sets: usize, elements: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.3), elements), sets).prop_map(|rows| {
        rows.into_iter()
            .map(|row| row.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| e).collect())
            .collect()
    })
}

pub fn mc(max_sets: usize, max_elements: usize) -> impl Strategy<Value = Instance> {
    (1..=max_sets, 1..=max_elements)
        .prop_flat_map(|(s, e)| {
            (prop::collection::vec(1u32..=100, e), memberships(s, e), 1..=s)
        })
        .prop_map(|(w, sets, k)| {
            let elements = w.into_iter().map(|w| Element::black(w as f64)).collect();
            Instance::Coverage(CoverageInstance::new(elements, sets, CoverageBudget::Sets(k)).unwrap())
        })
}

pub fn mcscc(max_sets: usize, max_elements: usize) -> impl Strategy<Value = Instance> {
    (1..=max_sets, 2..=max_elements)
        .prop_flat_map(|(s, e)| {
            (prop::collection::vec(prop::option::weighted(0.3, 1u32..=100), e), memberships(s, e), 0..=e)
        })
        .prop_map(|(w, sets, k)| {
            let elements: Vec<Element> = w
                .into_iter()
                .map(|w| w.map_or(Element::white(), |w| Element::black(w as f64 / 100.0)))
                .collect();
            let whites = elements.iter().filter(|e| e.color == Color::White).count();
            Instance::Coverage(
                CoverageInstance::new(elements, sets, CoverageBudget::WhiteElements(k.min(whites))).unwrap(),
            )
        })
}

/// Any of the four problem kinds at exhaustive-search size.
pub fn small_instance() -> impl Strategy<Value = Instance> {
    prop_oneof![dag(7), atsp(2, 7), mc(6, 8), mcscc(5, 8)]
}

pub fn first_heuristic(kind: ProblemKind) -> Heuristic {
    Heuristic::for_kind(kind).next().unwrap()
}

/// Replays a trace from the clean instance.
pub fn replay(clean: &Instance, trace: &[corobust_core::attack::TraceStep]) -> Instance {
    trace.iter().fold(clean.clone(), |q, s| q.apply_action(&s.action).unwrap())
}
