use serde::{Deserialize, Serialize};

use super::sources::interpolation;
use crate::error::{Error, Result};

/// Mobility `m(φ)` or `n(φ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mobility {
    Constant { value: f64 },
    /// `healthy + (tumour − healthy)·h(φ)`.
    Interpolated { healthy: f64, tumour: f64 },
}

impl Default for Mobility {
    fn default() -> Self {
        Mobility::Constant { value: 1.0 }
    }
}

impl Mobility {
    pub fn constant(value: f64) -> Self {
        Mobility::Constant { value }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        match *self {
            Mobility::Constant { value } => value,
            Mobility::Interpolated { healthy, tumour } => {
                healthy + (tumour - healthy) * interpolation(phi)
            }
        }
    }

    /// `(m₀, m₁)`.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Mobility::Constant { value } => (value, value),
            Mobility::Interpolated { healthy, tumour } => (healthy.min(tumour), healthy.max(tumour)),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Mobility::Constant { .. })
    }

    pub fn check(&self, name: &str) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} mobility bounds ({lo}, {hi}) must be positive and finite"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolated_bounds() {
        let m = Mobility::Interpolated {
            healthy: 0.5,
            tumour: 2.0,
        };
        assert_eq!(m.eval(-1.0), 0.5);
        assert_eq!(m.eval(1.0), 2.0);
        assert_eq!(m.eval(5.0), 2.0);
        assert_eq!(m.bounds(), (0.5, 2.0));
        assert!(m.check("m").is_ok());
        assert!(Mobility::constant(0.0).check("m").is_err());
    }
}
