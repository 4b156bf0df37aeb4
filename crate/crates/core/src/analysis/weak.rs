use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{lp_structure, pairing};
use crate::asymptotic::{require_horizon, SequenceOracle, TailWindow};
use crate::convergence::Status;
use crate::spaces::Point;
use crate::{Error, Result};

/// Finite family of test vectors: coordinate indicators, the constant
/// function and seeded Gaussian bumps, all restricted to the first
/// `support` coordinates when set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestFamily {
    pub support: Option<usize>,
    pub indicators: bool,
    pub constant: bool,
    pub bumps: usize,
    pub seed: u64,
}

impl Default for TestFamily {
    fn default() -> Self {
        TestFamily { support: None, indicators: true, constant: true, bumps: 8, seed: 0 }
    }
}

impl TestFamily {
    pub fn head(support: usize) -> Self {
        TestFamily { support: Some(support), ..Self::default() }
    }

    pub fn label(&self) -> String {
        let span = self.support.map_or("all".to_string(), |s| format!("first {s}"));
        format!(
            "weak tests on {span} coordinates: indicators={}, constant={}, {} gaussian bumps (seed {})",
            self.indicators, self.constant, self.bumps, self.seed
        )
    }

    pub fn vectors(&self, dim: usize) -> Vec<(String, Vec<f64>)> {
        let span = self.support.unwrap_or(dim).min(dim);
        let mut out = Vec::new();
        if span == 0 {
            return out;
        }
        if self.indicators {
            for i in 0..span {
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                out.push((format!("indicator {i}"), v));
            }
        }
        if self.constant {
            out.push(("constant".into(), (0..dim).map(|i| if i < span { 1.0 } else { 0.0 }).collect()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for b in 0..self.bumps {
            let c = rng.random::<f64>() * span as f64;
            let w = (span as f64 / 16.0 + rng.random::<f64>() * span as f64 * 3.0 / 16.0).max(1.0);
            let v = (0..dim)
                .map(|i| if i < span { (-0.5 * ((i as f64 - c) / w).powi(2)).exp() } else { 0.0 })
                .collect();
            out.push((format!("bump {b}"), v));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakWitness {
    pub test: String,
    pub index: usize,
    pub pairing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakVerdict {
    pub status: Status,
    pub tolerance: f64,
    /// Largest |⟨φ, x_n − u⟩| over the tail and the family.
    pub worst: f64,
    pub tests: usize,
    pub witness: Option<WeakWitness>,
    pub family: String,
}

impl WeakVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }
}

/// Certified iff |⟨φ, x_n − u⟩| ≤ tol over the tail for every φ; falsified
/// when a violation reaches the final quarter.
pub fn weak_pairing_test(
    oracle: &SequenceOracle,
    u: &Point,
    family: &TestFamily,
    window: &TailWindow,
    tol: f64,
) -> Result<WeakVerdict> {
    window.validate()?;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::Configuration(format!("tolerance must be finite and nonnegative, got {tol}")));
    }
    let n = oracle.horizon();
    require_horizon(n)?;
    let space = oracle.space();
    let (weights, _) = lp_structure(space)?;
    let u = space.coords(u)?;
    let tests = family.vectors(weights.len());
    if tests.is_empty() {
        return Err(Error::Configuration("weak test family is empty".into()));
    }
    let tail = window.tail(n);
    let quarter = window.final_quarter(n);
    let mut worst = 0.0f64;
    let mut late: Option<WeakWitness> = None;
    let mut early: Option<WeakWitness> = None;
    for k in tail {
        let x = space.coords(oracle.point(k))?;
        let d: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a - b).collect();
        for (label, phi) in &tests {
            let v = pairing(&weights, phi, &d);
            worst = worst.max(v.abs());
            if v.abs() > tol {
                let w = WeakWitness { test: label.clone(), index: k, pairing: v };
                if quarter.contains(&k) {
                    late.get_or_insert(w);
                } else {
                    early.get_or_insert(w);
                }
            }
        }
    }
    let status = if late.is_some() {
        Status::Falsified
    } else if early.is_some() {
        Status::Inconclusive
    } else {
        Status::Certified
    };
    Ok(WeakVerdict { status, tolerance: tol, worst, tests: tests.len(), witness: late.or(early), family: family.label() })
}
