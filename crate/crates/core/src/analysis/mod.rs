//! Discrete Lᵖ: grid functions, the normalized duality map, a weak
//! convergence surrogate, and the checks built on them.

mod bl;
mod conj;
mod fixtures;
mod opial;
mod weak;

use serde::{Deserialize, Serialize};

pub use bl::{brezis_lieb_check, BlConfig, BlMode, BlReport};
pub use conj::{conj_equivalence_check, ConjConfig, ConjReport};
pub use fixtures::{circle_grid, grid_nodes, oscillating_sequence, smooth_probes, trig_polynomial, Oscillation};
pub use opial::{opial_lp_divergence_demo, OpialConfig, OpialDemo};
pub use weak::{weak_pairing_test, TestFamily, WeakVerdict, WeakWitness};

use crate::numeric::compensated_sum;
use crate::spaces::{Point, SpaceDescriptor, SpaceKind};
use crate::{Error, Result};

/// Values on a weighted grid with exponent p: ‖u‖ = (Σ μᵢ|uᵢ|^p)^{1/p}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub p: f64,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, p: f64) -> Result<Self> {
        if values.len() != weights.len() || values.is_empty() {
            return Err(Error::Representation("values and weights must have the same nonzero length".into()));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("exponent must satisfy 1 < p < ∞, got {p}")));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Domain("weights must be positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Representation("values must be finite".into()));
        }
        Ok(GridFunction { values, weights, p })
    }

    pub fn unit_weights(values: Vec<f64>, p: f64) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![1.0; n], p)
    }

    pub fn from_point(space: &SpaceDescriptor, x: &Point) -> Result<Self> {
        let (weights, p) = lp_structure(space)?;
        Self::new(space.coords(x)?, weights, p)
    }

    pub fn norm(&self) -> f64 {
        weighted_norm(&self.values, &self.weights, self.p)
    }

    /// Rows `index,weight,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,weight,value\n");
        for (i, (w, v)) in self.weights.iter().zip(&self.values).enumerate() {
            s.push_str(&format!("{i},{w:?},{v:?}\n"));
        }
        s
    }

    pub fn from_csv(text: &str, p: f64) -> Result<Self> {
        let mut weights = Vec::new();
        let mut values = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (line_no == 0 && line.starts_with("index")) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Representation(format!("line {}: {e}", line_no + 1)));
            match fields.as_slice() {
                [idx, w, v] => {
                    let idx: usize = idx.parse().map_err(|e| Error::Representation(format!("line {}: {e}", line_no + 1)))?;
                    if idx != weights.len() {
                        return Err(Error::Representation(format!("line {}: expected index {}", line_no + 1, weights.len())));
                    }
                    weights.push(parse(w)?);
                    values.push(parse(v)?);
                }
                _ => return Err(Error::Representation(format!("line {}: expected index,weight,value", line_no + 1))),
            }
        }
        Self::new(values, weights, p)
    }
}

pub(crate) fn weighted_norm(values: &[f64], weights: &[f64], p: f64) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * compensated_sum(weights.iter().zip(values).map(|(w, v)| w * (v.abs() / scale).powf(p))).powf(1.0 / p)
}

pub(crate) fn pairing(weights: &[f64], a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(weights.iter().zip(a).zip(b).map(|((w, x), y)| w * x * y))
}

/// Weights and exponent of a Euclidean or Lᵖ-type space (balls included).
pub fn lp_structure(space: &SpaceDescriptor) -> Result<(Vec<f64>, f64)> {
    fn of(kind: &SpaceKind) -> Result<(Vec<f64>, f64)> {
        match kind {
            SpaceKind::Euclidean { dim } => Ok((vec![1.0; *dim], 2.0)),
            SpaceKind::LpVec { dim, p } => Ok((vec![1.0; *dim], *p)),
            SpaceKind::LpGrid { weights, p } => Ok((weights.clone(), *p)),
            SpaceKind::ClampedBall { base, .. } => of(base),
            other => Err(Error::Domain(format!("{other:?} is not an Lᵖ-type space"))),
        }
    }
    of(&space.kind)
}

/// The space holding duality vectors: same weights, conjugate exponent.
pub fn dual_space(space: &SpaceDescriptor) -> Result<SpaceDescriptor> {
    let (weights, p) = lp_structure(space)?;
    let q = p / (p - 1.0);
    match &space.kind {
        SpaceKind::LpGrid { .. } => SpaceDescriptor::grid(weights, q),
        _ if p == 2.0 => Ok(SpaceDescriptor::euclidean(weights.len())),
        _ => SpaceDescriptor::lp(weights.len(), q),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityVector {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub p_conj: f64,
}

impl DualityVector {
    pub fn dual_norm(&self) -> f64 {
        weighted_norm(&self.values, &self.weights, self.p_conj)
    }

    /// Σ μᵢ u*ᵢ uᵢ
    pub fn pair(&self, u: &GridFunction) -> f64 {
        pairing(&self.weights, &self.values, &u.values)
    }
}

/// u*ᵢ = |uᵢ|^{p−1} sign(uᵢ) / ‖u‖^{p−1}, so that ‖u*‖_{p′} = 1 and
/// ⟨u*, u⟩ = ‖u‖.
pub fn duality_map(u: &GridFunction) -> Result<DualityVector> {
    let n = u.norm();
    if n == 0.0 {
        return Err(Error::Domain("the duality map is not normalized at zero".into()));
    }
    let p = u.p;
    let values = u.values.iter().map(|v| (v.abs() / n).powf(p - 1.0) * v.signum() * (*v != 0.0) as u8 as f64).collect();
    Ok(DualityVector { values, weights: u.weights.clone(), p_conj: p / (p - 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vector_is_self_dual() {
        for p in [1.5, 2.0, 3.0, 7.0] {
            let u = GridFunction::unit_weights(vec![1.0, 0.0, 0.0], p).unwrap();
            assert_eq!(duality_map(&u).unwrap().values, vec![1.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn cubic_example() {
        let u = GridFunction::unit_weights(vec![2.0, 1.0], 3.0).unwrap();
        let d = duality_map(&u).unwrap();
        let s = 9f64.powf(2.0 / 3.0);
        assert!((d.values[0] - 4.0 / s).abs() < 1e-15);
        assert!((d.values[1] - 1.0 / s).abs() < 1e-15);
        assert!((d.dual_norm() - 1.0).abs() < 1e-12);
        assert!((d.pair(&u) - u.norm()).abs() < 1e-12);
    }

    #[test]
    fn zero_has_no_normalized_dual() {
        let u = GridFunction::unit_weights(vec![0.0, 0.0], 2.0).unwrap();
        assert!(matches!(duality_map(&u), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_round_trip() {
        let u = GridFunction::new(vec![0.1, -2.5, 3.0], vec![0.5, 0.25, 0.25], 4.0).unwrap();
        assert_eq!(GridFunction::from_csv(&u.to_csv(), 4.0).unwrap(), u);
        assert!(GridFunction::from_csv("index,weight,value\n0,1,2\n2,1,1\n", 2.0).is_err());
    }
}
