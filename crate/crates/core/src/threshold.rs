//! Threshold rules `r_h`.
//!
//! An increment whose square exceeds `r_h` is attributed to a jump. The rule
//! must vanish as `h -> 0`, but more slowly than the Brownian modulus of
//! continuity `2 h log(1/h)`. Within the power family `r_h = c h^β` this is
//! exactly `c > 0`, `0 < β < 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything that maps a mesh `h` to a threshold `r_h`.
pub trait ThresholdRule {
    fn value(&self, h: f64) -> Result<f64>;
}

/// The power family `r_h = c h^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    c: f64,
    beta: f64,
}

impl ThresholdSpec {
    pub fn new(c: f64, beta: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidThreshold(format!(
                "c must be positive, got {c}"
            )));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidThreshold(format!(
                "beta must lie strictly inside (0, 1), got {beta}; \
                 r_h must vanish more slowly than h log(1/h)"
            )));
        }
        Ok(Self { c, beta })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `c h^β`.
    pub fn threshold(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mesh h must be positive, got {h}"
            )));
        }
        Ok(self.c * h.powf(self.beta))
    }
}

impl Default for ThresholdSpec {
    /// `r_h = 0.1 h^0.99`.
    fn default() -> Self {
        Self { c: 0.1, beta: 0.99 }
    }
}

impl ThresholdRule for ThresholdSpec {
    fn value(&self, h: f64) -> Result<f64> {
        self.threshold(h)
    }
}

/// Arbitrary user-supplied rule. Only positivity of the output is checked;
/// the vanishing conditions are the caller's responsibility.
pub struct CustomThreshold<F>(pub F);

impl<F: Fn(f64) -> f64> ThresholdRule for CustomThreshold<F> {
    fn value(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mesh h must be positive, got {h}"
            )));
        }
        let r = (self.0)(h);
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::InvalidThreshold(format!(
                "custom rule returned {r} at h = {h}"
            )))
        }
    }
}

/// Checks that a raw threshold value is usable (`r_h > 0`; `+inf` allowed and
/// disables truncation).
pub(crate) fn check_r_h(r_h: f64) -> Result<()> {
    if r_h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(format!(
            "r_h must be positive, got {r_h}"
        )))
    }
}
