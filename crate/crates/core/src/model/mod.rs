//! Model data and the pointwise and elliptic operators of the
//! Cahn–Hilliard–Darcy system with nutrient.

mod data;
mod mobility;
mod operators;
mod params;
mod potential;
mod sources;
mod validate;

pub use data::{BoundarySupply, CosineTerm, InitialProfile, VolumeSource};
pub use mobility::Mobility;
pub use operators::{
    chemical_potential, evaluate_sources, nutrient_free_energy_density, solve_darcy,
    DarcySolution, Derived, NutrientEnergy,
};
pub use params::{LimitFlags, ModelParams};
pub use potential::{GrowthBounds, Potential, PotentialKind, PotentialSpec};
pub use sources::{
    interpolation, CustomSources, RateProfile, SourceModel, SourceSpec, SourceTerms,
};
pub use validate::{validate_assumptions, Check, Regime, SampleBox, ValidationReport};

use crate::error::Result;
use crate::spectral::SpectralBasis;

/// Complete description of the system being integrated.
#[derive(Clone, Debug)]
pub struct Model {
    pub params: ModelParams,
    pub potential: Potential,
    /// `m(φ)`, mobility of the chemical-potential flux.
    pub mobility: Mobility,
    /// `n(φ)`, mobility of the nutrient flux.
    pub nutrient_mobility: Mobility,
    pub sources: SourceModel,
    /// `σ∞(t)`.
    pub supply: BoundarySupply,
    /// `Γ_v(x, t)`.
    pub volume_source: VolumeSource,
    pub flags: LimitFlags,
}

impl Model {
    pub fn new(params: ModelParams) -> Self {
        Model {
            params,
            potential: Potential::quartic(),
            mobility: Mobility::default(),
            nutrient_mobility: Mobility::default(),
            sources: SourceModel::none(),
            supply: BoundarySupply::default(),
            volume_source: VolumeSource::Zero,
            flags: LimitFlags::default(),
        }
    }

    pub fn with_sources(mut self, s: SourceModel) -> Self {
        self.sources = s;
        self
    }

    pub fn with_flags(mut self, f: LimitFlags) -> Self {
        self.flags = f;
        self
    }

    pub fn with_supply(mut self, s: BoundarySupply) -> Self {
        self.supply = s;
        self
    }

    pub fn with_volume_source(mut self, g: VolumeSource) -> Self {
        self.volume_source = g;
        self
    }

    /// `χ` as the equations see it.
    pub fn chi(&self) -> f64 {
        self.params.effective_chemotaxis(self.flags)
    }

    /// Whether the flow subsystem is active.
    pub fn has_flow(&self) -> bool {
        !self.flags.no_flow
    }

    /// Hard checks that make the discrete problem well defined.
    pub fn check(&self, basis: &SpectralBasis) -> Result<()> {
        self.params.check(self.flags)?;
        self.mobility.check("m")?;
        self.nutrient_mobility.check("n")?;
        self.sources.check()?;
        self.supply.check()?;
        self.volume_source.check(basis)?;
        Ok(())
    }

    /// Whether the energy is a Lyapunov functional: no sources, no boundary
    /// exchange and no volume source.
    pub fn is_dissipative(&self) -> bool {
        self.sources.is_none() && self.params.boundary_exchange == 0.0 && self.volume_source.is_zero()
    }
}
