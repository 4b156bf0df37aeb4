use polarconv::asymptotic::{SequenceOracle, SolverConfig, TailWindow};
use polarconv::extraction::{diagonal_select, extract_strong_delta, radius_of_subsequence, ExtractionSchedule};
use polarconv::spaces::{Point, SpaceDescriptor};
use proptest::prelude::*;

fn alternating() -> SequenceOracle {
    SequenceOracle::from_fn(SpaceDescriptor::euclidean(1), 96, true, |n| {
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        Point::vector([s + 1.0 / (n + 1) as f64])
    })
    .unwrap()
}

#[test]
fn alternating_sequence_yields_a_branch() {
    let o = alternating();
    let t = extract_strong_delta(&o, &TailWindow::default(), &ExtractionSchedule::default(), &SolverConfig::default()).unwrap();
    assert!(t.verdict.is_certified(), "{:?}", t.verdict.status);
    let parity = t.final_indices[0] % 2;
    assert!(t.final_indices.iter().all(|k| k % 2 == parity));
    assert!(t.final_radius() < 0.05);
    let c = t.center.center.as_vector().unwrap()[0];
    assert!((c.abs() - 1.0).abs() < 0.05);
}

#[test]
fn stages_are_nested_with_shrinking_radii() {
    let s = SpaceDescriptor::euclidean(2);
    let o = SequenceOracle::from_fn(s, 128, true, |n| {
        let k = (n % 3) as f64;
        Point::vector([(2.0 * k).cos() + 0.5 / (n + 1) as f64, (2.0 * k).sin()])
    })
    .unwrap();
    let w = TailWindow::default();
    let t = extract_strong_delta(&o, &w, &ExtractionSchedule::default(), &SolverConfig::default()).unwrap();
    for pair in t.stages.windows(2) {
        assert!(pair[1].radius <= pair[0].radius + 1e-9);
        assert!(pair[1].indices.iter().all(|i| pair[0].indices.contains(i)));
    }
    let spec = polarconv::convergence::SubsequenceSpec::new(t.final_indices.clone()).unwrap();
    let again = radius_of_subsequence(&o, &spec, &w, &SolverConfig::default()).unwrap();
    assert!((again - t.final_radius()).abs() < 1e-6);
}

#[test]
fn short_horizons_are_rejected() {
    let o = SequenceOracle::constant(SpaceDescriptor::euclidean(1), Point::vector([0.0]), 16);
    assert!(extract_strong_delta(&o, &TailWindow::default(), &ExtractionSchedule::default(), &SolverConfig::default()).is_err());
}

fn nested_sets() -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<usize>)> {
    (4usize..8, prop::collection::vec(prop::bool::weighted(0.7), 200)).prop_map(|(count, keep)| {
        let mut sets = vec![(0..200).collect::<Vec<usize>>()];
        for k in 1..count {
            let prev = sets.last().unwrap();
            let next: Vec<usize> = prev.iter().copied().filter(|i| keep[(i * (k + 3)) % 200]).collect();
            sets.push(next);
        }
        let drops = vec![0; count];
        (sets, drops)
    })
}

proptest! {
    #[test]
    fn diagonal_picks_increasing_members((sets, drops) in nested_sets()) {
        prop_assume!(sets.last().unwrap().len() >= sets.len() + 4);
        let d = diagonal_select(&sets, &drops).unwrap();
        let idx = d.indices();
        prop_assert_eq!(idx.len(), sets.len());
        prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        for (k, i) in idx.iter().enumerate() {
            prop_assert!(sets[k].contains(i));
            // from position k on, the diagonal stays inside set k
            prop_assert!(idx[k..].iter().all(|j| sets[k].contains(j)));
        }
    }
}
