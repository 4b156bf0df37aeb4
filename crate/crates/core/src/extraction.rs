//! Greedy extraction of a subsequence with small asymptotic radius, and
//! diagonal selection from nested index sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotic::{asymptotic_center, chebyshev_radius_with, CenterResult, SequenceOracle, SolverConfig, TailWindow};
use crate::convergence::{strong_delta_test, ConvergenceVerdict, SubsequenceSpec};
use crate::spaces::{sample_probes, ProbeConfig, ProbeStrategy};
use crate::{Error, Result};

pub const MIN_EXTRACTION_HORIZON: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionSchedule {
    /// ε_k = epsilon0 · 2^{-k}
    pub epsilon0: f64,
    pub stages: usize,
    pub seed: u64,
    /// Candidate subsequences shorter than this are not considered.
    pub min_length: usize,
    pub probes: usize,
}

impl Default for ExtractionSchedule {
    fn default() -> Self {
        ExtractionSchedule { epsilon0: 0.1, stages: 8, seed: 0, min_length: 16, probes: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub indices: Vec<usize>,
    pub radius: f64,
    /// ε of the step that produced this stage; 0 for the initial stage.
    pub epsilon: f64,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionTrace {
    pub stages: Vec<Stage>,
    pub final_indices: Vec<usize>,
    pub center: CenterResult,
    pub schedule: ExtractionSchedule,
    pub tolerance: f64,
    pub verdict: ConvergenceVerdict,
    pub notes: Vec<String>,
}

impl ExtractionTrace {
    pub fn final_radius(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.radius)
    }
}

/// Asymptotic radius of n ↦ x_{k_n}.
pub fn radius_of_subsequence(
    oracle: &SequenceOracle,
    spec: &SubsequenceSpec,
    window: &TailWindow,
    cfg: &SolverConfig,
) -> Result<f64> {
    Ok(asymptotic_center(&oracle.subsequence(spec)?, window, cfg)?.radius)
}

/// Farthest-point (Gonzalez) clustering of `indices` into k groups; the
/// first center is drawn with the seed. Groups keep the order of
/// `indices` and are returned ordered by their first element.
fn k_center_groups(oracle: &SequenceOracle, indices: &[usize], k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<usize>>> {
    let space = oracle.space();
    let mut centers = vec![indices[rng.random_range(0..indices.len())]];
    let mut nearest: Vec<f64> = indices
        .iter()
        .map(|&i| space.distance(oracle.point(i), oracle.point(centers[0])))
        .collect::<Result<_>>()?;
    while centers.len() < k {
        let (far, d) = nearest.iter().enumerate().fold((0, -1.0), |b, (j, &d)| if d > b.1 { (j, d) } else { b });
        if d <= 0.0 {
            break;
        }
        centers.push(indices[far]);
        for (j, &i) in indices.iter().enumerate() {
            nearest[j] = nearest[j].min(space.distance(oracle.point(i), oracle.point(indices[far]))?);
        }
    }
    let mut groups = vec![Vec::new(); centers.len()];
    for &i in indices {
        let mut best = (0, f64::INFINITY);
        for (c, &ci) in centers.iter().enumerate() {
            let d = space.distance(oracle.point(i), oracle.point(ci))?;
            if d < best.1 {
                best = (c, d);
            }
        }
        groups[best.0].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups.sort_by_key(|g| g[0]);
    Ok(groups)
}

pub fn extract_strong_delta(
    oracle: &SequenceOracle,
    window: &TailWindow,
    schedule: &ExtractionSchedule,
    solver: &SolverConfig,
) -> Result<ExtractionTrace> {
    window.validate()?;
    if oracle.horizon() < MIN_EXTRACTION_HORIZON {
        return Err(Error::InsufficientData { needed: MIN_EXTRACTION_HORIZON, got: oracle.horizon() });
    }
    if !(schedule.epsilon0 > 0.0) || schedule.min_length < 4 {
        return Err(Error::Configuration("epsilon0 must be positive and min_length at least 4".into()));
    }
    let radius_of = |idx: &[usize]| -> Result<f64> { Ok(asymptotic_center(&oracle.select(idx), window, solver)?.radius) };
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut current: Vec<usize> = (0..oracle.horizon()).collect();
    let mut radius = radius_of(&current)?;
    let mut stages = vec![Stage { indices: current.clone(), radius, epsilon: 0.0, source: "full".into() }];
    let mut notes = Vec::new();
    for k in 0..schedule.stages {
        let eps = schedule.epsilon0 * 0.5f64.powi(k as i32);
        let mut candidates: Vec<(String, Vec<usize>)> = vec![("suffix".into(), current[current.len() / 2..].to_vec())];
        for groups in [2usize, 3] {
            for (j, g) in k_center_groups(oracle, &current, groups, &mut rng)?.into_iter().enumerate() {
                candidates.push((format!("cluster {j}/{groups}"), g));
            }
        }
        candidates.retain(|(_, c)| c.len() >= schedule.min_length && c.len() < current.len());
        if candidates.is_empty() {
            notes.push(format!("stage {k}: horizon exhausted"));
            break;
        }
        let mut best: Option<(f64, String, Vec<usize>)> = None;
        for (source, c) in candidates {
            let r = radius_of(&c)?;
            if best.as_ref().is_none_or(|b| r < b.0) {
                best = Some((r, source, c));
            }
        }
        let (r, source, c) = best.expect("nonempty");
        if r <= radius - eps {
            radius = r;
            current = c;
            stages.push(Stage { indices: current.clone(), radius, epsilon: eps, source });
        }
    }
    let sub = oracle.select(&current);
    let center = asymptotic_center(&sub, window, solver)?;
    // finite-horizon drift: the radius of the late tail against the full tail
    let late = &sub.points()[window.secondary_tail(sub.horizon())];
    let drift = (center.radius - chebyshev_radius_with(sub.space(), late, solver)?.radius).abs();
    let tolerance = (3.0 * (center.optimality_gap + center.stability_gap + drift)).max(1e-12 * (1.0 + center.radius));
    let probe_cfg = ProbeConfig::new(
        ProbeStrategy::BallUniform,
        schedule.probes.max(1),
        schedule.seed.wrapping_add(17),
        center.radius.max(1e-3) * 2.0,
    );
    let probes = sample_probes(oracle.space(), &center.center, &probe_cfg, None)?.excluding_near(
        oracle.space(),
        &center.center,
        1e-9,
    )?;
    let verdict = strong_delta_test(&sub, &center.center, &probes, window, tolerance)?;
    notes.push("greedy descent of the radius; maximality of the subsequence is not certified".into());
    Ok(ExtractionTrace {
        stages,
        final_indices: current,
        center,
        schedule: schedule.clone(),
        tolerance,
        verdict,
        notes,
    })
}

/// Picks the k-th output index from the k-th set, strictly increasing.
/// Set j (after dropping its first `drops[j]` entries) must be contained
/// in set j − 1.
pub fn diagonal_select(sets: &[Vec<usize>], drops: &[usize]) -> Result<SubsequenceSpec> {
    if sets.len() != drops.len() {
        return Err(Error::Domain("one drop count per set is required".into()));
    }
    for (j, s) in sets.iter().enumerate() {
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!("set {j} is not strictly increasing")));
        }
        if j > 0 {
            let prev = &sets[j - 1];
            let kept = s.get(drops[j]..).unwrap_or(&[]);
            if let Some(bad) = kept.iter().find(|i| prev.binary_search(i).is_err()) {
                return Err(Error::Domain(format!("set {j} leaves set {} at index {bad}", j - 1)));
            }
        }
    }
    let mut out: Vec<usize> = Vec::with_capacity(sets.len());
    for (s, &d) in sets.iter().zip(drops) {
        let kept = s.get(d..).unwrap_or(&[]);
        let next = match out.last() {
            Some(&last) => kept.iter().copied().find(|&i| i > last),
            None => kept.first().copied(),
        };
        match next {
            Some(i) => out.push(i),
            None => break,
        }
    }
    SubsequenceSpec::new(out)
}
