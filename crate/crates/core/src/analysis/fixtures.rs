//! Grid discretizations of (0, 2π) and oscillating sequences on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotic::SequenceOracle;
use crate::spaces::{Point, ProbeSet, SpaceDescriptor};
use crate::Result;

/// Midpoints t_i = 2π(i + ½)/g with equal weights 2π/g.
pub fn circle_grid(g: usize, p: f64) -> Result<SpaceDescriptor> {
    SpaceDescriptor::grid(vec![std::f64::consts::TAU / g as f64; g], p)
}

pub fn grid_nodes(g: usize) -> Vec<f64> {
    (0..g).map(|i| std::f64::consts::TAU * (i as f64 + 0.5) / g as f64).collect()
}

/// c₀ + Σ (a_j cos(jt) + b_j sin(jt)) on the grid nodes; `terms` holds
/// (j, a_j, b_j).
pub fn trig_polynomial(g: usize, constant: f64, terms: &[(usize, f64, f64)]) -> Vec<f64> {
    grid_nodes(g)
        .into_iter()
        .map(|t| constant + terms.iter().map(|&(j, a, b)| a * (j as f64 * t).cos() + b * (j as f64 * t).sin()).sum::<f64>())
        .collect()
}

/// x_k = base + amplitude·(sin(nt) + κ·cos(2nt)) with n = first_frequency + k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub amplitude: f64,
    pub kappa: f64,
    pub first_frequency: usize,
    pub horizon: usize,
}

pub fn oscillating_sequence(space: &SpaceDescriptor, base: &[f64], osc: &Oscillation) -> Result<SequenceOracle> {
    let g = base.len();
    let nodes = grid_nodes(g);
    SequenceOracle::from_fn(space.clone(), osc.horizon, true, |k| {
        let n = (osc.first_frequency + k) as f64;
        Point::Vector(
            base.iter()
                .zip(&nodes)
                .map(|(b, t)| b + osc.amplitude * ((n * t).sin() + osc.kappa * (2.0 * n * t).cos()))
                .collect(),
        )
    })
}

/// center + a random trigonometric polynomial of degree ≤ `max_frequency`,
/// rescaled to norm in [0.2, 1]·scale. Low frequencies stay orthogonal to
/// fast oscillations, which is what a probe of a weak-type limit needs.
pub fn smooth_probes(
    space: &SpaceDescriptor,
    center: &[f64],
    count: usize,
    seed: u64,
    scale: f64,
    max_frequency: usize,
) -> Result<ProbeSet> {
    let g = center.len();
    let norm = space.norm().ok_or_else(|| crate::Error::Domain("smooth probes need a normed space".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count);
    for _ in 0..count {
        let c0 = rng.random::<f64>() * 2.0 - 1.0;
        let terms: Vec<(usize, f64, f64)> = (1..=max_frequency)
            .map(|j| (j, rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        let h = trig_polynomial(g, c0, &terms);
        let n = norm.value(&h);
        let r = scale * (0.2 + 0.8 * rng.random::<f64>());
        pts.push(Point::Vector(center.iter().zip(&h).map(|(c, v)| c + r * v / n).collect()));
    }
    Ok(ProbeSet::new(format!("smooth trigonometric probes (degree ≤ {max_frequency}, scale {scale}, seed {seed})"), pts))
}
