//! Detectors for Δ-, strong-Δ- and polar convergence relative to finite
//! probe families, polar neighborhoods, and the counterexample fixtures.

mod detectors;
mod dirichlet;
mod fixtures;

use serde::{Deserialize, Serialize};

pub use detectors::{delta_test, polar_nbhd_member, polar_test, strong_delta_test, DeltaConfig};
pub use dirichlet::{btn_violation_dirichlet, default_challenge, BtnOptions, BtnWitness};
pub use fixtures::{
    indicator_probes, l1_fixture, linf_fixture, linf_gamma_probe, nonunique_strong_delta_demo, NonuniqueDemo,
};

use crate::asymptotic::{SequenceOracle, MIN_HORIZON};
use crate::spaces::Point;
use crate::{Error, Result};

/// Strictly increasing indices into an oracle's horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsequenceSpec {
    indices: Vec<usize>,
}

impl SubsequenceSpec {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.len() < MIN_HORIZON {
            return Err(Error::InsufficientData { needed: MIN_HORIZON, got: indices.len() });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("subsequence indices must be strictly increasing".into()));
        }
        Ok(SubsequenceSpec { indices })
    }

    pub fn within(indices: Vec<usize>, horizon: usize) -> Result<Self> {
        let spec = Self::new(indices)?;
        if let Some(&last) = spec.indices.last() {
            if last >= horizon {
                return Err(Error::Domain(format!("index {last} beyond horizon {horizon}")));
            }
        }
        Ok(spec)
    }

    pub fn full(horizon: usize) -> Result<Self> {
        Self::new((0..horizon).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

impl TryFrom<Vec<usize>> for SubsequenceSpec {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SubsequenceSpec> for Vec<usize> {
    fn from(s: SubsequenceSpec) -> Self {
        s.indices
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Delta,
    StrongDelta,
    Polar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    Falsified,
    Inconclusive,
}

/// What to report when a violation shows up in the tail but not in its
/// final quarter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InconclusivePolicy {
    #[default]
    Keep,
    Falsify,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub probe_index: usize,
    /// Polar mode: least index from which the strict inequality holds
    /// through the horizon.
    pub m: Option<usize>,
    /// Polar: min of d(x_n,y) − d(x_n,x) for n ≥ M(y). Otherwise the worst
    /// excess of the candidate over the probe (≤ tol when passing).
    pub gap: f64,
}

/// A violation that can be re-checked from distances alone. `probe` is
/// `None` for the oscillation part of the strong-Δ test, where the
/// candidate is compared with itself at another index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub mode: Mode,
    pub probe_index: Option<usize>,
    pub probe: Option<Point>,
    pub candidate_indices: Vec<usize>,
    pub probe_indices: Vec<usize>,
    pub candidate_distance: f64,
    pub probe_distance: f64,
    pub tolerance: f64,
}

impl Witness {
    /// Recomputes the distances. Δ compares the max of d(x_k,x) over
    /// `candidate_indices` with the max of d(x_k,y) over `probe_indices`;
    /// strong-Δ compares max with min; polar asks for d(x_n,x) ≥ d(x_n,y)
    /// exactly.
    pub fn recheck(&self, oracle: &SequenceOracle, candidate: &Point) -> Result<bool> {
        let space = oracle.space();
        let rival = self.probe.as_ref().unwrap_or(candidate);
        if self.mode == Mode::Polar {
            let n = *self.candidate_indices.first().ok_or_else(|| Error::Domain("empty witness".into()))?;
            let ord = space.cmp_distances(oracle.point(n), candidate, rival)?;
            return Ok(ord != std::cmp::Ordering::Less);
        }
        let mut cd = f64::NEG_INFINITY;
        for &k in &self.candidate_indices {
            cd = cd.max(space.distance(oracle.point(k), candidate)?);
        }
        let mut pd = if self.mode == Mode::Delta { f64::NEG_INFINITY } else { f64::INFINITY };
        for &k in &self.probe_indices {
            let d = space.distance(oracle.point(k), rival)?;
            pd = if self.mode == Mode::Delta { pd.max(d) } else { pd.min(d) };
        }
        Ok(cd == self.candidate_distance && pd == self.probe_distance && cd - pd > self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub mode: Mode,
    pub status: Status,
    pub tolerance: f64,
    pub margin: f64,
    pub witness: Option<Witness>,
    pub probes: Vec<ProbeRow>,
    pub probe_family: String,
    pub notes: Vec<String>,
}

impl ConvergenceVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn is_falsified(&self) -> bool {
        self.status == Status::Falsified
    }

    /// Under `Falsify`, an inconclusive verdict carrying a transient witness
    /// becomes falsified.
    pub fn with_policy(mut self, policy: InconclusivePolicy) -> Self {
        if policy == InconclusivePolicy::Falsify && self.status == Status::Inconclusive && self.witness.is_some() {
            self.status = Status::Falsified;
            self.notes.push("inconclusive verdict resolved as falsified by policy".into());
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsequence_spec_validation() {
        assert!(SubsequenceSpec::new(vec![0, 2, 4, 6]).is_ok());
        assert!(matches!(SubsequenceSpec::new(vec![0, 2, 4]), Err(Error::InsufficientData { .. })));
        assert!(matches!(SubsequenceSpec::new(vec![0, 2, 2, 6]), Err(Error::Domain(_))));
        assert!(SubsequenceSpec::within(vec![0, 1, 2, 9], 9).is_err());
        let json = serde_json::to_string(&SubsequenceSpec::full(4).unwrap()).unwrap();
        assert_eq!(json, "[0,1,2,3]");
        assert!(serde_json::from_str::<SubsequenceSpec>("[3,2,1,0]").is_err());
    }
}
