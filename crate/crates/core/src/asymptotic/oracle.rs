use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::convergence::SubsequenceSpec;
use crate::spaces::{Point, SpaceDescriptor};
use crate::{Error, Result};

/// Finite-horizon view of a sequence. Points are generated once and kept,
/// so repeated queries are free and reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceOracle {
    space: SpaceDescriptor,
    points: Vec<Point>,
    declared_bounded: bool,
}

impl SequenceOracle {
    pub fn from_fn<F: FnMut(usize) -> Point>(
        space: SpaceDescriptor,
        horizon: usize,
        declared_bounded: bool,
        f: F,
    ) -> Result<Self> {
        Self::from_points(space, (0..horizon).map(f).collect(), declared_bounded)
    }

    pub fn from_points(space: SpaceDescriptor, points: Vec<Point>, declared_bounded: bool) -> Result<Self> {
        for p in &points {
            space.check_point(p)?;
        }
        let oracle = SequenceOracle { space, points, declared_bounded };
        if declared_bounded {
            oracle.check_bounded()?;
        }
        Ok(oracle)
    }

    pub fn constant(space: SpaceDescriptor, c: Point, horizon: usize) -> Self {
        SequenceOracle { space, points: vec![c; horizon], declared_bounded: true }
    }

    /// Max pairwise distance over an evenly spread sample of at most 64 points.
    fn check_bounded(&self) -> Result<()> {
        let n = self.points.len();
        let step = n.div_ceil(64).max(1);
        let sample: Vec<&Point> = self.points.iter().step_by(step).collect();
        for (i, a) in sample.iter().enumerate() {
            for b in &sample[i + 1..] {
                if !self.space.distance(a, b)?.is_finite() {
                    return Err(Error::Domain("declared bounded sequence has infinite diameter".into()));
                }
            }
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, n: usize) -> &Point {
        &self.points[n]
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn is_bounded(&self) -> bool {
        self.declared_bounded
    }

    /// Re-indexed oracle n ↦ x_{k_n}.
    pub fn subsequence(&self, spec: &SubsequenceSpec) -> Result<SequenceOracle> {
        if let Some(&last) = spec.indices().last() {
            if last >= self.horizon() {
                return Err(Error::Domain(format!("index {last} beyond horizon {}", self.horizon())));
            }
        }
        Ok(self.select(spec.indices()))
    }

    pub(crate) fn select(&self, indices: &[usize]) -> SequenceOracle {
        SequenceOracle {
            space: self.space.clone(),
            points: indices.iter().map(|&k| self.points[k].clone()).collect(),
            declared_bounded: self.declared_bounded,
        }
    }
}

/// Finite surrogate for lim sup: the tail [⌈βN⌉, N), with a later window
/// [⌈β′N⌉, N) kept as a stability diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailWindow {
    pub start: f64,
    pub secondary: f64,
}

impl Default for TailWindow {
    fn default() -> Self {
        TailWindow { start: 0.5, secondary: 0.75 }
    }
}

impl TailWindow {
    pub fn new(start: f64, secondary: f64) -> Result<Self> {
        let w = TailWindow { start, secondary };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if 0.0 < self.start && self.start < self.secondary && self.secondary < 1.0 {
            Ok(())
        } else {
            Err(Error::Configuration(format!(
                "tail window needs 0 < β < β′ < 1, got β = {}, β′ = {}",
                self.start, self.secondary
            )))
        }
    }

    fn cut(frac: f64, n: usize) -> usize {
        ((frac * n as f64).ceil() as usize).min(n.saturating_sub(1))
    }

    pub fn tail(&self, n: usize) -> Range<usize> {
        Self::cut(self.start, n)..n
    }

    pub fn secondary_tail(&self, n: usize) -> Range<usize> {
        Self::cut(self.secondary, n)..n
    }

    /// Last quarter (at least one index) of the tail.
    pub fn final_quarter(&self, n: usize) -> Range<usize> {
        let t = self.tail(n);
        let len = t.len().div_ceil(4).max(1);
        n.saturating_sub(len)..n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_ranges() {
        let w = TailWindow::default();
        assert_eq!(w.tail(64), 32..64);
        assert_eq!(w.secondary_tail(64), 48..64);
        assert_eq!(w.final_quarter(64), 56..64);
        assert_eq!(w.tail(5), 3..5);
        assert_eq!(w.final_quarter(5), 4..5);
        assert!(TailWindow::new(0.6, 0.5).is_err());
        assert!(TailWindow::new(0.0, 0.5).is_err());
    }
}
