//! Analytic round counts of the general algorithm.

use serde::{Deserialize, Serialize};

use crate::error::SpannerError;
use crate::spanner::{epoch_count, stretch_exponent};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub k: u32,
    pub t: u32,
    pub gamma: f64,
    pub epochs: u32,
    /// `epochs * t`.
    pub iterations: u64,
    /// `ceil(iterations / gamma)`, in model rounds.
    pub mpc_rounds: u64,
    /// `iterations`, in model rounds.
    pub clique_rounds: u64,
    pub stretch_exponent: f64,
}

impl CostModel {
    pub fn new(k: u32, t: u32, gamma: f64) -> Result<Self, SpannerError> {
        if k == 0 {
            return Err(SpannerError::InvalidK);
        }
        if t == 0 {
            return Err(SpannerError::InvalidT);
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(SpannerError::InvalidGamma(gamma));
        }
        let epochs = epoch_count(k, t);
        let iterations = u64::from(epochs) * u64::from(t);
        Ok(Self {
            k,
            t,
            gamma,
            epochs,
            iterations,
            mpc_rounds: ceil_near_integer(iterations as f64 / gamma),
            clique_rounds: iterations,
            stretch_exponent: stretch_exponent(t),
        })
    }
}

/// Ceiling that ignores floating noise just above an integer, so that
/// `4 / 0.1` is 40 and not 41.
fn ceil_near_integer(x: f64) -> u64 {
    let r = libm::round(x);
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        libm::ceil(x) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k16_t1_half_gamma() {
        let c = CostModel::new(16, 1, 0.5).unwrap();
        assert_eq!((c.epochs, c.iterations, c.mpc_rounds), (4, 4, 8));
    }

    #[test]
    fn regimes() {
        assert_eq!(CostModel::new(256, 1, 1.0).unwrap().epochs, 8);
        let bs = CostModel::new(8, 8, 1.0).unwrap();
        assert_eq!((bs.epochs, bs.iterations), (1, 8));
        assert_eq!(CostModel::new(256, 8, 1.0).unwrap().epochs, 3);
    }

    #[test]
    fn gamma_rounding() {
        assert_eq!(CostModel::new(16, 1, 0.1).unwrap().mpc_rounds, 40);
        assert_eq!(CostModel::new(16, 1, 0.3).unwrap().mpc_rounds, 14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CostModel::new(0, 1, 0.5).is_err());
        assert!(CostModel::new(4, 0, 0.5).is_err());
        assert!(CostModel::new(4, 1, 0.0).is_err());
        assert!(CostModel::new(4, 1, 1.5).is_err());
    }
}
