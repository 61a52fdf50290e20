use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar coefficients of the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Weight `A` of the double-well potential.
    pub potential_weight: f64,
    /// Weight `B` of the gradient energy.
    pub gradient_weight: f64,
    /// Darcy permeability `K`.
    pub permeability: f64,
    /// Nutrient diffusivity `D`.
    pub diffusivity: f64,
    /// Chemotaxis / active transport strength `χ`.
    pub chemotaxis: f64,
    /// Robin exchange coefficient `b` on the nutrient boundary.
    pub boundary_exchange: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            potential_weight: 1.0,
            gradient_weight: 0.01,
            permeability: 1.0,
            diffusivity: 1.0,
            chemotaxis: 0.05,
            boundary_exchange: 0.1,
        }
    }
}

/// Switches selecting one of the reduced systems.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitFlags {
    /// Drop the Darcy subsystem entirely: `v = 0`.
    #[serde(default)]
    pub no_flow: bool,
    /// Drop every chemotaxis term: `χ = 0`.
    #[serde(default)]
    pub no_chemotaxis: bool,
}

impl ModelParams {
    /// `χ` as seen by the equations under `flags`.
    pub fn effective_chemotaxis(&self, flags: LimitFlags) -> f64 {
        if flags.no_chemotaxis {
            0.0
        } else {
            self.chemotaxis
        }
    }

    /// Hard constraints, independent of the regime analysis.
    ///
    /// `K` and `χ` may be zero only when the matching limit flag is set;
    /// `b = 0` switches the Robin exchange off and is always allowed.
    pub fn check(&self, flags: LimitFlags) -> Result<()> {
        let named = [
            ("potential_weight", self.potential_weight),
            ("gradient_weight", self.gradient_weight),
            ("permeability", self.permeability),
            ("diffusivity", self.diffusivity),
            ("chemotaxis", self.chemotaxis),
            ("boundary_exchange", self.boundary_exchange),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [
            ("potential_weight", self.potential_weight),
            ("gradient_weight", self.gradient_weight),
            ("diffusivity", self.diffusivity),
        ] {
            if v == 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.permeability == 0.0 && !flags.no_flow {
            return Err(Error::InvalidParameter(
                "permeability = 0 requires the no-flow limit mode".into(),
            ));
        }
        if self.chemotaxis == 0.0 && !flags.no_chemotaxis {
            return Err(Error::InvalidParameter(
                "chemotaxis = 0 requires the no-chemotaxis limit mode".into(),
            ));
        }
        Ok(())
    }
}
