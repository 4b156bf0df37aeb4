//! Staples rotundity: Chebyshev radii of ball intersections, modulus
//! estimation on a δ grid, and the claim-verification harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::asymptotic::{asymptotic_center, chebyshev_radius_with, eval_i, SequenceOracle, SolverConfig, TailWindow};
use crate::convergence::{delta_test, polar_test, DeltaConfig, Status};
use crate::spaces::{sample_probes, Point, ProbeConfig, ProbeStrategy, SpaceDescriptor, SpaceKind};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LensEstimate {
    pub radius: f64,
    pub center: Point,
    pub samples: usize,
    pub solver_gap: f64,
}

/// Solver settings for lens point clouds: one start and short phases are
/// enough for the small dimensions used here.
pub fn lens_solver() -> SolverConfig {
    SolverConfig { restarts: 1, iterations: 400, phases: 3, ..SolverConfig::default() }
}

/// Chebyshev radius of B_ρ(x) ∩ B_ρ(y) estimated from a point cloud:
/// rejection samples from the box around the midpoint plus sphere points of
/// each ball that lie in the other.
pub fn lens_chebyshev_radius(
    space: &SpaceDescriptor,
    x: &Point,
    y: &Point,
    rho: f64,
    samples: usize,
    seed: u64,
) -> Result<LensEstimate> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive, got {rho}")));
    }
    let d = space.distance(x, y)?;
    if let SpaceKind::Discrete = space.kind {
        // closed balls of radius ≥ 1 are the whole space
        return if rho >= 1.0 {
            Ok(LensEstimate { radius: 1.0, center: x.clone(), samples: 2, solver_gap: 0.0 })
        } else if d == 0.0 {
            Ok(LensEstimate { radius: 0.0, center: x.clone(), samples: 1, solver_gap: 0.0 })
        } else {
            Err(Error::LensEmpty)
        };
    }
    let mid = space.midpoint(x, y)?;
    let (Some(mid), Some(norm)) = (mid, space.norm()) else {
        return Err(Error::NoMidpoint);
    };
    if d >= 2.0 * rho {
        return Err(Error::LensEmpty);
    }
    let (cx, cy, cm) = (space.coords(x)?, space.coords(y)?, space.coords(&mid)?);
    let dim = cm.len();
    let inside = |z: &[f64]| {
        let dx: Vec<f64> = z.iter().zip(&cx).map(|(a, b)| a - b).collect();
        let dy: Vec<f64> = z.iter().zip(&cy).map(|(a, b)| a - b).collect();
        norm.value(&dx) <= rho && norm.value(&dy) <= rho && space.contains(&Point::Vector(z.to_vec()))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cloud: Vec<Point> = vec![mid.clone()];
    let half: Vec<f64> = (0..dim).map(|k| rho / norm.unit_norm(k)).collect();
    let mut accepted = 0;
    for _ in 0..samples.saturating_mul(200) {
        if accepted >= samples {
            break;
        }
        let z: Vec<f64> = (0..dim).map(|k| cm[k] + half[k] * (2.0 * rng.random::<f64>() - 1.0)).collect();
        if inside(&z) {
            cloud.push(Point::Vector(z));
            accepted += 1;
        }
    }
    for i in 0..samples {
        let dir: Vec<f64> = if dim == 2 {
            let t = std::f64::consts::TAU * i as f64 / samples as f64;
            vec![t.cos(), t.sin()]
        } else {
            (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let n = norm.value(&dir);
        if n == 0.0 {
            continue;
        }
        for c in [&cx, &cy] {
            let z: Vec<f64> = c.iter().zip(&dir).map(|(a, u)| a + rho * u / n).collect();
            if inside(&z) {
                cloud.push(Point::Vector(z));
            }
        }
    }
    if cloud.is_empty() {
        return Err(Error::LensEmpty);
    }
    let sol = chebyshev_radius_with(space, &cloud, &lens_solver())?;
    Ok(LensEstimate { radius: sol.radius, center: sol.center, samples: cloud.len(), solver_gap: sol.gap })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SrConfig {
    pub deltas: Vec<f64>,
    pub pairs: usize,
    pub lens_samples: usize,
    pub seed: u64,
    pub sampling_tol: f64,
}

/// 0.2, 0.1, 0.05, … down to 1e-3, with 1e-3 itself as the last entry.
pub fn default_delta_grid() -> Vec<f64> {
    let mut g = Vec::new();
    let mut d = 0.2;
    while d >= 1e-3 {
        g.push(d);
        d /= 2.0;
    }
    g.push(1e-3);
    g
}

impl Default for SrConfig {
    fn default() -> Self {
        SrConfig { deltas: default_delta_grid(), pairs: 6, lens_samples: 600, seed: 0, sampling_tol: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub delta: f64,
    pub worst_lens_radius: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrFailure {
    pub delta: f64,
    pub x: Point,
    pub y: Point,
    pub lens_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrModulusEstimate {
    pub r: f64,
    pub d_bar: f64,
    pub delta_hat: f64,
    pub samples: usize,
    pub worst_lens_radius: f64,
    pub rows: Vec<DeltaRow>,
    pub failure: Option<SrFailure>,
    pub notes: Vec<String>,
}

/// Pairs at separation exactly d̄ (larger separations only shrink the
/// lens): along the coordinate axes first, then seeded random directions.
fn sample_pairs(space: &SpaceDescriptor, d_bar: f64, count: usize, seed: u64) -> Result<Vec<(Point, Point)>> {
    if let SpaceKind::Discrete = space.kind {
        return Ok(if d_bar <= 1.0 { vec![(Point::vector([0.0]), Point::vector([1.0]))] } else { Vec::new() });
    }
    let (Some(norm), Some(dim)) = (space.norm(), space.dim()) else {
        return Err(Error::NoMidpoint);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let u: Vec<f64> = if i < dim {
            (0..dim).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
        } else {
            (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let n = norm.value(&u);
        let h = 0.5 * d_bar / n;
        out.push((Point::Vector(u.iter().map(|v| -h * v).collect()), Point::Vector(u.iter().map(|v| h * v).collect())));
    }
    Ok(out)
}

/// Largest grid δ with lens radius ≤ r − δ (+ sampling tolerance) for all
/// sampled pairs at ρ = r + δ. Grid values are tried from the largest down
/// and the search stops at the first pass.
pub fn estimate_sr_modulus(space: &SpaceDescriptor, r: f64, d_bar: f64, cfg: &SrConfig) -> Result<SrModulusEstimate> {
    if !(r > 0.0 && d_bar > 0.0) {
        return Err(Error::Domain("r and d̄ must be positive".into()));
    }
    let mut est = SrModulusEstimate {
        r,
        d_bar,
        delta_hat: 0.0,
        samples: 0,
        worst_lens_radius: 0.0,
        rows: Vec::new(),
        failure: None,
        notes: Vec::new(),
    };
    let pairs = match sample_pairs(space, d_bar, cfg.pairs.max(1), cfg.seed) {
        Ok(p) => p,
        Err(Error::NoMidpoint) => {
            est.notes.push("the space has no metric midpoints; no lens can be sampled".into());
            return Ok(est);
        }
        Err(e) => return Err(e),
    };
    let mut deltas = cfg.deltas.clone();
    deltas.sort_by(|a, b| b.total_cmp(a));
    deltas.dedup();
    for &delta in &deltas {
        let rho = r + delta;
        let bound = r - delta + cfg.sampling_tol;
        let mut worst: Option<(f64, &Point, &Point)> = None;
        for (i, (x, y)) in pairs.iter().enumerate() {
            let lens = match lens_chebyshev_radius(space, x, y, rho, cfg.lens_samples, cfg.seed.wrapping_add(i as u64)) {
                Ok(l) => l,
                Err(Error::LensEmpty) => continue,
                Err(e) => return Err(e),
            };
            est.samples += lens.samples;
            if worst.is_none_or(|w| lens.radius > w.0) {
                worst = Some((lens.radius, x, y));
            }
        }
        let worst_radius = worst.map_or(f64::NEG_INFINITY, |w| w.0);
        est.worst_lens_radius = est.worst_lens_radius.max(worst_radius);
        let pass = worst_radius <= bound;
        est.rows.push(DeltaRow { delta, worst_lens_radius: worst_radius, bound, pass });
        if pass {
            est.delta_hat = delta;
            break;
        }
        let (lens_radius, x, y) = worst.expect("a failing δ has a lens");
        est.failure = Some(SrFailure { delta, x: x.clone(), y: y.clone(), lens_radius });
    }
    Ok(est)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClaimsConfig {
    pub window: TailWindow,
    pub restarts: usize,
    pub probes: usize,
    pub cauchy_probes: usize,
    pub seed: u64,
    pub sr: SrConfig,
}

impl Default for ClaimsConfig {
    fn default() -> Self {
        ClaimsConfig {
            window: TailWindow::default(),
            restarts: 5,
            probes: 48,
            cauchy_probes: 200,
            seed: 0,
            sr: SrConfig { pairs: 4, lens_samples: 300, ..SrConfig::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureClaims {
    pub name: String,
    pub radius: f64,
    pub delta_tolerance: f64,
    pub delta_status: Status,
    pub polar_status: Status,
    /// Δ and polar verdicts agree on whether the center is certified.
    pub claim_a: bool,
    pub center_spread: f64,
    pub spread_limit: f64,
    pub claim_b: bool,
    pub cauchy_epsilon: f64,
    pub cauchy_d_bar: f64,
    pub cauchy_max_pair: f64,
    pub cauchy_members: usize,
    pub claim_c: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrClaimsReport {
    pub space: SpaceDescriptor,
    pub fixtures: Vec<FixtureClaims>,
}

impl SrClaimsReport {
    pub fn all_pass(&self) -> bool {
        self.fixtures.iter().all(|f| f.claim_a && f.claim_b && f.claim_c)
    }
}

/// Runs the three SR consequences on each fixture: Δ/polar agreement at the
/// asymptotic center, agreement of independently started solver runs, and
/// closeness of near-minimizers of I.
pub fn verify_sr_claims(space: &SpaceDescriptor, fixtures: &[(String, SequenceOracle)], cfg: &ClaimsConfig) -> Result<SrClaimsReport> {
    if !space.claims_sr {
        return Err(Error::Refused(format!(
            "{:?} is not flagged as Staples rotund; the claims need not hold there",
            space.kind
        )));
    }
    // norms are homogeneous, so δ(r, r/2) = r·δ(1, 1/2) and one estimate,
    // on a grid continued down to 1e-5, serves every fixture
    let unit_modulus = if space.norm().is_some() && space.ball_radius().is_none() && !fixtures.is_empty() {
        let mut deltas = cfg.sr.deltas.clone();
        let mut d = deltas.last().copied().unwrap_or(1e-3) / 2.0;
        while d >= 1e-5 {
            deltas.push(d);
            d /= 2.0;
        }
        Some(estimate_sr_modulus(space, 1.0, 0.5, &SrConfig { seed: cfg.seed, deltas, ..cfg.sr.clone() })?.delta_hat)
    } else {
        None
    };
    let mut out = Vec::new();
    for (f, (name, oracle)) in fixtures.iter().enumerate() {
        if oracle.space() != space {
            return Err(Error::Configuration(format!("fixture {name} lives in a different space")));
        }
        let seed = cfg.seed.wrapping_add(f as u64);
        let solver = SolverConfig { seed, ..SolverConfig::default() };
        let center = asymptotic_center(oracle, &cfg.window, &solver)?;
        let radius = center.radius;

        let scale = (2.0 * radius).max(0.5);
        let probes = sample_probes(space, &center.center, &ProbeConfig::new(ProbeStrategy::BallUniform, cfg.probes, seed, scale), None)?
            .excluding_near(space, &center.center, 1e-9)?;
        let delta_tolerance = (3.0 * (center.optimality_gap + center.stability_gap)).max(1e-9);
        let dv = delta_test(oracle, &center.center, &probes, &cfg.window, delta_tolerance, &DeltaConfig { seed, ..DeltaConfig::default() })?;
        let pv = polar_test(oracle, &center.center, &probes, &cfg.window)?;

        let mut centers = Vec::new();
        let mut worst_gap = center.optimality_gap;
        for k in 0..cfg.restarts.max(1) {
            let run = SolverConfig {
                seed: seed.wrapping_mul(31).wrapping_add(k as u64 + 1),
                restarts: 1,
                midpoint_start: false,
                closed_form: false,
                ..SolverConfig::default()
            };
            let c = asymptotic_center(oracle, &cfg.window, &run)?;
            worst_gap = worst_gap.max(c.optimality_gap);
            centers.push(c.center);
        }
        let mut spread = 0.0f64;
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                spread = spread.max(space.distance(a, b)?);
            }
        }
        let spread_limit = (10.0 * worst_gap).max(1e-6);

        let (epsilon, d_bar) = if radius > 1e-9 {
            let d_bar = 0.5 * radius;
            let delta_hat = match unit_modulus {
                Some(u) => radius * u,
                None => estimate_sr_modulus(space, radius, d_bar, &SrConfig { seed, ..cfg.sr.clone() })?.delta_hat,
            };
            (if delta_hat > 0.0 { delta_hat } else { d_bar / 2.0 }, d_bar)
        } else {
            (5e-4, 1e-3)
        };
        let cauchy_scale = ((radius + epsilon).powi(2) - radius * radius).max(0.0).sqrt() * 2.0 + epsilon;
        let cloud = sample_probes(
            space,
            &center.center,
            &ProbeConfig::new(ProbeStrategy::BallUniform, cfg.cauchy_probes, seed.wrapping_add(99), cauchy_scale),
            None,
        )?;
        let mut members = vec![center.center.clone()];
        for p in cloud.points {
            if eval_i(oracle, &p, &cfg.window)?.value <= radius + epsilon {
                members.push(p);
            }
        }
        let mut max_pair = 0.0f64;
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                max_pair = max_pair.max(space.distance(a, b)?);
            }
        }
        out.push(FixtureClaims {
            name: name.clone(),
            radius,
            delta_tolerance,
            delta_status: dv.status,
            polar_status: pv.status,
            claim_a: dv.is_certified() == pv.is_certified(),
            center_spread: spread,
            spread_limit,
            claim_b: spread <= spread_limit,
            cauchy_epsilon: epsilon,
            cauchy_d_bar: d_bar,
            cauchy_max_pair: max_pair,
            cauchy_members: members.len(),
            claim_c: max_pair < d_bar,
        });
    }
    Ok(SrClaimsReport { space: space.clone(), fixtures: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_grid_shape() {
        let g = default_delta_grid();
        assert_eq!(g[0], 0.2);
        assert_eq!(*g.last().unwrap(), 1e-3);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn separated_balls_have_empty_lens() {
        let s = SpaceDescriptor::euclidean(2);
        let r = lens_chebyshev_radius(&s, &Point::vector([0.0, 0.0]), &Point::vector([2.0, 0.0]), 1.0, 50, 0);
        assert_eq!(r.unwrap_err(), Error::LensEmpty);
    }

    #[test]
    fn discrete_modulus_is_zero() {
        let e = estimate_sr_modulus(&SpaceDescriptor::discrete(), 1.0, 1.0, &SrConfig::default()).unwrap();
        assert_eq!(e.delta_hat, 0.0);
        assert!(e.failure.is_some());
    }

    #[test]
    fn non_sr_space_is_refused() {
        let s = SpaceDescriptor::sup(2);
        assert!(matches!(verify_sr_claims(&s, &[], &ClaimsConfig::default()), Err(Error::Refused(_))));
    }
}
