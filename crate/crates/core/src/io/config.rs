use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dynamics::{project_initial_data, step_count, SimState, Stepper, StepperConfig};
use crate::error::{Error, Result};
use crate::model::{
    validate_assumptions, BoundarySupply, InitialProfile, LimitFlags, Mobility, Model, ModelParams,
    Potential, PotentialSpec, RateProfile, SampleBox, SourceModel, SourceSpec, ValidationReport,
    VolumeSource,
};
use crate::spectral::{Discretization, Domain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    /// Record diagnostics every `cadence` steps.
    pub cadence: u64,
    /// Write a field snapshot every `snapshot_every` steps; 0 keeps only the
    /// initial and final states.
    pub snapshot_every: u64,
    /// Write a checkpoint every `checkpoint_every` steps; 0 only at the end.
    pub checkpoint_every: u64,
    pub dir: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            cadence: 1,
            snapshot_every: 0,
            checkpoint_every: 0,
            dir: None,
        }
    }
}

/// A complete, serializable run description. The default is the reference
/// run used by the acceptance tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub domain: Domain,
    /// Modes per dimension.
    pub modes: usize,
    pub t_end: f64,
    pub stepper: StepperConfig,
    pub params: ModelParams,
    pub potential: PotentialSpec,
    pub mobility: Mobility,
    pub nutrient_mobility: Mobility,
    pub sources: SourceSpec,
    pub volume_source: VolumeSource,
    pub supply: BoundarySupply,
    pub initial_phi: InitialProfile,
    pub initial_sigma: InitialProfile,
    pub limits: LimitFlags,
    pub sample_box: SampleBox,
    pub seed: u64,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            domain: Domain::Rectangle { lx: 1.0, ly: 1.0 },
            modes: 32,
            t_end: 0.5,
            stepper: StepperConfig::with_dt(1e-3),
            params: ModelParams {
                potential_weight: 1.0,
                gradient_weight: 0.01,
                permeability: 1.0,
                diffusivity: 1.0,
                chemotaxis: 0.05,
                boundary_exchange: 0.1,
            },
            potential: PotentialSpec::default(),
            mobility: Mobility::constant(1.0),
            nutrient_mobility: Mobility::constant(1.0),
            sources: SourceSpec::Hawkins {
                rate: 0.1,
                profile: RateProfile::Constant,
            },
            volume_source: VolumeSource::Zero,
            supply: BoundarySupply::Constant { value: 1.0 },
            initial_phi: InitialProfile::TanhFront {
                center: [0.5, 0.5],
                semi_axes: [0.3, 0.2],
                width: 0.1,
                inside: 1.0,
                outside: -1.0,
            },
            initial_sigma: InitialProfile::Constant { value: 0.5 },
            limits: LimitFlags::default(),
            sample_box: SampleBox::default(),
            seed: 0,
            output: OutputConfig::default(),
        }
    }
}

/// Built objects for one run.
#[derive(Clone, Debug)]
pub struct Setup {
    pub config: RunConfig,
    pub model: Model,
    pub disc: Discretization,
}

impl Setup {
    pub fn initial_state(&self) -> Result<SimState> {
        project_initial_data(
            &self.config.initial_phi,
            &self.config.initial_sigma,
            &self.disc,
            self.config.seed,
        )
    }

    pub fn stepper(&self) -> Result<Stepper<'_>> {
        Stepper::new(&self.model, &self.disc, self.config.stepper.clone())
    }

    pub fn total_steps(&self) -> Result<u64> {
        step_count(self.config.t_end, self.config.stepper.dt)
    }
}

impl RunConfig {
    /// Parse JSON. Unknown keys are errors under `strict` and warnings
    /// otherwise; the warnings are returned.
    pub fn from_json(text: &str, strict: bool) -> Result<(Self, Vec<String>)> {
        let raw: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        let cfg: RunConfig = serde_json::from_value(raw.clone()).map_err(|e| Error::Config(e.to_string()))?;
        let known = serde_json::to_value(&cfg).map_err(|e| Error::Config(e.to_string()))?;
        let mut unknown = Vec::new();
        unknown_keys(&raw, &known, "", &mut unknown);
        if strict && !unknown.is_empty() {
            return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
        }
        let warnings = unknown.into_iter().map(|k| format!("ignoring unknown key {k}")).collect();
        Ok((cfg, warnings))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn model(&self) -> Result<Model> {
        Ok(Model {
            params: self.params,
            potential: Potential::from_spec(&self.potential)?,
            mobility: self.mobility.clone(),
            nutrient_mobility: self.nutrient_mobility.clone(),
            sources: SourceModel::from_spec(self.sources.clone()),
            supply: self.supply.clone(),
            volume_source: self.volume_source.clone(),
            flags: self.limits,
        })
    }

    /// Assumption report for the configured model.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.domain.validate()?;
        Ok(validate_assumptions(&self.model()?, &self.domain, self.sample_box))
    }

    /// Every structural check, then the build. Assumption failures are errors.
    pub fn build(&self) -> Result<Setup> {
        let report = self.validate()?;
        if !report.passed() {
            let failed: Vec<String> = report
                .failures()
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            let why = if failed.is_empty() {
                "no admissible regime applies".to_string()
            } else {
                failed.join("; ")
            };
            return Err(Error::Assumption(why));
        }
        self.build_unchecked()
    }

    /// Build without the assumption audit (the hard checks still run).
    pub fn build_unchecked(&self) -> Result<Setup> {
        let model = self.model()?;
        let disc = Discretization::new(self.domain, self.modes)?;
        model.check(&disc.basis)?;
        self.stepper.check(&model)?;
        self.initial_phi.check()?;
        self.initial_sigma.check()?;
        step_count(self.t_end, self.stepper.dt)?;
        Ok(Setup {
            config: self.clone(),
            model,
            disc,
        })
    }

    /// SHA-256 of the canonical JSON with the output section cleared.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn unknown_keys(raw: &Value, known: &Value, path: &str, out: &mut Vec<String>) {
    match (raw, known) {
        (Value::Object(r), Value::Object(k)) => {
            for (key, v) in r {
                let p = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                match k.get(key) {
                    Some(kv) => unknown_keys(v, kv, &p, out),
                    None if v.is_null() => {}
                    None => out.push(p),
                }
            }
        }
        (Value::Array(r), Value::Array(k)) => {
            for (i, (a, b)) in r.iter().zip(k).enumerate() {
                unknown_keys(a, b, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

/// Parse and fully validate, including the assumption audit.
pub fn parse_config(text: &str, strict: bool) -> Result<RunConfig> {
    let (cfg, _) = RunConfig::from_json(text, strict)?;
    cfg.build()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, strict: bool) -> Result<(RunConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_json(&text, strict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Regime;

    const MINIMAL: &str = r#"{
        "domain": {"kind": "interval", "length": 1.0},
        "modes": 16,
        "sources": {"kind": "hawkins", "rate": 0.1, "profile": "constant"},
        "initial_phi": {"kind": "planar", "position": 0.5, "width": 0.1}
    }"#;

    #[test]
    fn minimal_config_is_case_two() {
        let cfg = parse_config(MINIMAL, true).unwrap();
        assert_eq!(cfg.modes, 16);
        assert_eq!(cfg.validate().unwrap().regime, Some(Regime::PositiveUptake));
    }

    #[test]
    fn strong_chemotaxis_rejected() {
        let text = MINIMAL.replace(
            "\"modes\": 16,",
            "\"modes\": 16, \"params\": {\"chemotaxis\": 10.0, \"potential_weight\": 1.0, \"diffusivity\": 1.0},",
        );
        match parse_config(&text, true) {
            Err(Error::Assumption(m)) => assert!(m.contains("A > 2chi^2/(D R1)"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_permeability_rejected() {
        let text = MINIMAL.replace("\"modes\": 16,", "\"modes\": 16, \"params\": {\"permeability\": -1.0},");
        let err = parse_config(&text, true).unwrap_err().to_string();
        assert!(err.contains("permeability") || err.contains("K"), "{err}");
    }

    #[test]
    fn unknown_keys_strict_and_lenient() {
        let text = MINIMAL.replace("\"modes\": 16,", "\"modes\": 16, \"bogus\": 1, \"params\": {\"kay\": 2},");
        let err = RunConfig::from_json(&text, true).unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("params.kay"), "{err}");
        let (_, warn) = RunConfig::from_json(&text, false).unwrap();
        assert_eq!(warn.len(), 2);
    }

    #[test]
    fn round_trip_and_hash() {
        let cfg = RunConfig::default();
        let (back, warn) = RunConfig::from_json(&cfg.to_json(), true).unwrap();
        assert!(warn.is_empty());
        assert_eq!(back, cfg);
        let mut other = cfg.clone();
        other.output.dir = Some("elsewhere".into());
        assert_eq!(other.hash(), cfg.hash());
        other.seed = 1;
        assert_ne!(other.hash(), cfg.hash());
    }

    #[test]
    fn reference_config_builds() {
        let cfg = RunConfig::default();
        assert!(cfg.validate().unwrap().passed());
        let s = cfg.build().unwrap();
        assert_eq!(s.total_steps().unwrap(), 500);
    }
}
