//! Failure of (BTN) for the metric |x − y| + (1 + D(x − y))δ(x, y) on the
//! line, with D the Dirichlet function. Points are a + b√2 with rational
//! a, b, so every comparison below is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spaces::{dirichlet_distance, rational_from_f64, sqrt2_upper_approx, QuadRational};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BtnOptions {
    /// Tried first as z̄; rejected unless x̄ − z̄ is irrational and small.
    pub z_proposal: Option<QuadRational>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BtnWitness {
    pub x_bar: QuadRational,
    pub y_bar: QuadRational,
    pub ys: Vec<QuadRational>,
    pub epsilon: QuadRational,
    pub z_bar: QuadRational,
    pub z_rejections: usize,
    pub zs: Vec<QuadRational>,
    pub eta: QuadRational,
    pub v: QuadRational,
    /// z̄ ∈ N_Y(x̄)
    pub z_in_ny: bool,
    /// v ∈ N_Z(z̄)
    pub v_in_nz: bool,
    /// d(v, ȳ) ≤ d(v, x̄), i.e. v ∉ N_ȳ(x̄)
    pub v_outside: bool,
}

impl BtnWitness {
    pub fn holds(&self) -> bool {
        self.z_in_ny && self.v_in_nz && self.v_outside
    }
}

fn q(r: BigRational) -> QuadRational {
    QuadRational::rational(r)
}

/// Largest power-of-two fraction 2^{-k} of `start` with 2·ε < |c − w| for
/// every w.
fn separating_radius(c: &QuadRational, others: &[QuadRational]) -> BigRational {
    let mut eps = BigRational::one();
    let two = q(BigRational::from_integer(BigInt::from(2)));
    loop {
        let ok = others.iter().all(|w| (two.clone() * q(eps.clone()) - (c.clone() - w.clone()).abs()).signum().is_lt());
        if ok {
            return eps;
        }
        eps /= BigInt::from(2);
    }
}

/// A seeded finite challenge set Z avoiding z̄, mixing far points with
/// points close to z̄ on both the rational and the irrational side.
pub fn default_challenge(z_bar: &QuadRational, seed: u64) -> Vec<QuadRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_5a5a);
    let count = rng.random_range(1..=6);
    (0..count)
        .map(|_| {
            let scale = 2f64.powi(-rng.random_range(0..12));
            let a = rational_from_f64((rng.random::<f64>() - 0.5) * scale);
            let b = rational_from_f64((rng.random::<f64>() - 0.5) * scale);
            let offset = QuadRational::new(a, b);
            if offset.is_zero() {
                z_bar.clone() + q(BigRational::one())
            } else {
                z_bar.clone() + offset
            }
        })
        .collect()
}

/// Runs the construction. `challenge` plays the adversary: it receives z̄
/// and returns the finite set Z.
pub fn btn_violation_dirichlet<F>(
    x_bar: &QuadRational,
    y_bar: &QuadRational,
    ys: &[QuadRational],
    challenge: F,
    opts: &BtnOptions,
) -> Result<BtnWitness>
where
    F: FnOnce(&QuadRational) -> Vec<QuadRational>,
{
    if x_bar == y_bar {
        return Err(Error::Domain("x̄ and ȳ must differ".into()));
    }
    let sep = (y_bar.clone() - x_bar.clone()).abs();
    if (sep - q(BigRational::one())).signum().is_gt() {
        return Err(Error::Domain("|x̄ − ȳ| must be at most 1".into()));
    }
    if (y_bar.clone() - x_bar.clone()).is_rational() {
        return Err(Error::Domain("ȳ − x̄ must be irrational".into()));
    }
    if ys.contains(x_bar) {
        return Err(Error::Domain("x̄ must not belong to Y".into()));
    }

    let epsilon = separating_radius(x_bar, ys);
    let t = epsilon.clone() / BigInt::from(2);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rejections = 0usize;
    let mut proposal = opts.z_proposal.clone();
    let z_bar = loop {
        let z = match proposal.take() {
            Some(z) => z,
            None => {
                // x̄ ± s·t·√2 with rational s in (0, 1]
                let s = BigRational::new(BigInt::from(rng.random_range(1..=64)), BigInt::from(64));
                let sign = if rng.random::<bool>() { BigRational::one() } else { -BigRational::one() };
                x_bar.clone() + QuadRational::new(BigRational::zero(), sign * s * t.clone())
            }
        };
        let diff = z.clone() - x_bar.clone();
        if !diff.is_rational() && (diff.abs() - q(epsilon.clone())).signum().is_lt() {
            break z;
        }
        rejections += 1;
    };

    let zs = challenge(&z_bar);
    if zs.contains(&z_bar) {
        return Err(Error::Domain("the challenge set Z must not contain z̄".into()));
    }
    let eta = if zs.is_empty() { BigRational::one() } else { separating_radius(&z_bar, &zs) };
    // v = x̄ + (rational approximation of z̄ − x̄ = c√2) within η
    let c = (z_bar.clone() - x_bar.clone()).b;
    let tol = eta.clone() / c.abs();
    let r = sqrt2_upper_approx(&tol);
    let v = x_bar.clone() + q(c * r);
    debug_assert!(((v.clone() - z_bar.clone()).abs() - q(eta.clone())).signum().is_lt());

    let z_in_ny = ys.iter().all(|y| dirichlet_distance(&z_bar, x_bar) < dirichlet_distance(&z_bar, y));
    let v_in_nz = zs.iter().all(|z| dirichlet_distance(&v, &z_bar) < dirichlet_distance(&v, z));
    let v_outside = dirichlet_distance(&v, y_bar) <= dirichlet_distance(&v, x_bar);
    Ok(BtnWitness {
        x_bar: x_bar.clone(),
        y_bar: y_bar.clone(),
        ys: ys.to_vec(),
        epsilon: q(epsilon),
        z_bar,
        z_rejections: rejections,
        zs,
        eta: q(eta),
        v,
        z_in_ny,
        v_in_nz,
        v_outside,
    })
}
