//! Experiment config files (TOML).
//!
//! ```toml
//! mode = "standard"            # or "interleaved"
//! lengths = [2, 4, 8, 16]
//! sequences_per_length = 500
//! shots = 0                    # 0 = exact expectation per sequence
//! seed = 7
//! prep = "zero"                # named state or [c_I, c_X, c_Y, c_Z]
//! measurement = "zero"
//!
//! [group]
//! j = 8
//!
//! [noise.default]
//! kind = "depolarizing"
//! fidelity = 0.9975
//!
//! [noise.t_gate]
//! kind = "over_rotation"
//! fidelity = 0.99
//!
//! [output]
//! data_path = "d8.csv"
//! report_path = "d8.report.json"
//! ```
//!
//! Unknown keys are rejected.

use std::path::PathBuf;

use serde::Deserialize;

use crate::dihedral::GroupElement;
use crate::error::{Error, Result};
use crate::liouville::{PauliVector, UnitarySpec};
use crate::noise::{
    depolarizing_for_fidelity, over_rotation_for_fidelity, GateNoiseMap, NoiseSpec,
};
use crate::protocol::{ExperimentPlan, Mode};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub group: GroupSection,
    pub mode: Mode,
    pub lengths: Vec<usize>,
    pub sequences_per_length: usize,
    pub shots: u64,
    pub seed: u64,
    /// Run the `b2 = 1` settings; defaults to true for even `j`.
    #[serde(default)]
    pub toggle_z: Option<bool>,
    pub prep: StateConfig,
    pub measurement: StateConfig,
    #[serde(default)]
    pub noise: NoiseSection,
    pub output: OutputSection,
    #[serde(default)]
    pub fit: FitSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub j: u32,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum StateConfig {
    Named(String),
    Coefficients([f64; 4]),
}

impl StateConfig {
    pub fn to_pauli(&self) -> Result<PauliVector> {
        match self {
            StateConfig::Coefficients(c) => Ok(PauliVector::new(c[0], c[1], c[2], c[3])),
            StateConfig::Named(name) => match name.as_str() {
                "zero" => Ok(PauliVector::zero()),
                "one" => Ok(PauliVector::one()),
                "plus" => Ok(PauliVector::plus()),
                "minus" => Ok(PauliVector::minus()),
                "plus_i" => Ok(PauliVector::plus_i()),
                "minus_i" => Ok(PauliVector::minus_i()),
                "mixed" => Ok(PauliVector::maximally_mixed()),
                "octant" => Ok(PauliVector::octant()),
                other => Err(Error::config(format!(
                    "unknown state {other:?}; expected zero, one, plus, minus, plus_i, minus_i, mixed, octant or [c_I, c_X, c_Y, c_Z]"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub default: Option<NoiseConfig>,
    /// Error after the `R(1)` factor: the interleaved gate, or the odd
    /// rotations of `D_j` when running a standard experiment.
    #[serde(default)]
    pub t_gate: Option<NoiseConfig>,
    #[serde(default)]
    pub overrides: Vec<OverrideConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideConfig {
    pub z: u32,
    pub x: u8,
    pub noise: NoiseConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    None,
    Depolarizing {
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        fidelity: Option<f64>,
    },
    OverRotation {
        #[serde(default)]
        axis: Option<[f64; 3]>,
        #[serde(default)]
        angle: Option<f64>,
        #[serde(default)]
        fidelity: Option<f64>,
    },
    Composed {
        children: Vec<NoiseConfig>,
    },
}

impl NoiseConfig {
    pub fn to_spec(&self) -> Result<NoiseSpec> {
        self.to_spec_at_depth(0)
    }

    fn to_spec_at_depth(&self, depth: usize) -> Result<NoiseSpec> {
        if depth > 16 {
            return Err(Error::config("composed noise nested too deeply"));
        }
        match self {
            NoiseConfig::None => Ok(NoiseSpec::None),
            NoiseConfig::Depolarizing { p, fidelity } => match (p, fidelity) {
                (Some(p), None) => {
                    if !(0.0..=1.0).contains(p) {
                        return Err(Error::config(format!(
                            "depolarizing p = {p} outside [0, 1]"
                        )));
                    }
                    Ok(NoiseSpec::Depolarizing { p: *p })
                }
                (None, Some(f)) => depolarizing_for_fidelity(*f).map_err(as_config),
                _ => Err(Error::config(
                    "depolarizing noise needs exactly one of p or fidelity",
                )),
            },
            NoiseConfig::OverRotation {
                axis,
                angle,
                fidelity,
            } => {
                let axis = axis.unwrap_or([0.0, 0.0, 1.0]);
                match (angle, fidelity) {
                    (Some(theta), None) => UnitarySpec::new(axis, *theta)
                        .map(NoiseSpec::OverRotation)
                        .map_err(as_config),
                    (None, Some(f)) => over_rotation_for_fidelity(axis, *f).map_err(as_config),
                    _ => Err(Error::config(
                        "over_rotation noise needs exactly one of angle or fidelity",
                    )),
                }
            }
            NoiseConfig::Composed { children } => children
                .iter()
                .map(|c| c.to_spec_at_depth(depth + 1))
                .collect::<Result<Vec<_>>>()
                .map(NoiseSpec::Composed),
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidInput(msg) => Error::Config(msg),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub data_path: PathBuf,
    pub report_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
}

impl Default for FitSection {
    fn default() -> Self {
        FitSection {
            bootstrap_resamples: default_resamples(),
        }
    }
}

fn default_resamples() -> usize {
    200
}

/// Parses config text; schema errors only, no semantic checks.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| Error::config(e.to_string()))
}

impl ConfigFile {
    /// Validated experiment plan.
    pub fn to_plan(&self) -> Result<ExperimentPlan> {
        let order = self.group.j;
        if order == 0 {
            return Err(Error::config("group.j must be positive"));
        }
        if order > 1 << 16 {
            return Err(Error::config("group.j is unreasonably large"));
        }
        let toggle_z = self.toggle_z.unwrap_or(order.is_multiple_of(2));
        let default = match &self.noise.default {
            Some(n) => n.to_spec()?,
            None => NoiseSpec::None,
        };
        let mut noise = GateNoiseMap::uniform(default);
        if let Some(t) = &self.noise.t_gate {
            let spec = t.to_spec()?;
            if self.mode == Mode::Standard && !order.is_multiple_of(2) {
                return Err(Error::config(
                    "noise.t_gate in standard mode splits D_j into cosets and needs even j",
                ));
            }
            noise = noise.with_generator_noise(spec);
        }
        for o in &self.noise.overrides {
            if o.x > 1 {
                return Err(Error::config("override x must be 0 or 1"));
            }
            if o.z >= order {
                return Err(Error::config(format!(
                    "override z = {} is not an element of Z_{order}",
                    o.z
                )));
            }
            let g = GroupElement::new(order, o.z as i64, o.x == 1)?;
            if noise.overrides.iter().any(|(h, _)| *h == g) {
                return Err(Error::config(format!("duplicate override for {g}")));
            }
            noise = noise.with_override(g, o.noise.to_spec()?);
        }
        let plan = ExperimentPlan {
            order,
            mode: self.mode,
            lengths: self.lengths.clone(),
            sequences_per_length: self.sequences_per_length,
            shots: self.shots,
            prep: self.prep.to_pauli()?,
            measurement: self.measurement.to_pauli()?,
            noise,
            seed: self.seed,
            toggle_z,
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
mode = "standard"
lengths = [1, 2, 4]
sequences_per_length = 10
shots = 0
seed = 1
prep = "zero"
measurement = [1.0, 0.0, 0.0, 1.0]

[group]
j = 8

[noise.default]
kind = "depolarizing"
p = 0.99

[noise.t_gate]
kind = "over_rotation"
fidelity = 0.99

[[noise.overrides]]
z = 3
x = 1
noise = { kind = "none" }

[output]
data_path = "out.csv"
report_path = "out.json"
"#;

    #[test]
    fn parses_full_config() {
        let cfg = parse_config(BASE).unwrap();
        let plan = cfg.to_plan().unwrap();
        assert_eq!(plan.order, 8);
        assert!(plan.toggle_z);
        assert_eq!(plan.noise.overrides.len(), 1);
        assert!(plan.noise.generator_noise.is_some());
        assert_eq!(cfg.fit.bootstrap_resamples, 200);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = BASE.replace("seed = 1", "seed = 1\ncolour = 3");
        assert!(matches!(parse_config(&text), Err(Error::Config(_))));
        let text = BASE.replace("p = 0.99", "p = 0.99\nq = 1");
        assert!(matches!(parse_config(&text), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_values() {
        let cases = [
            BASE.replace("p = 0.99", "p = -0.5"),
            BASE.replace("p = 0.99", "p = 0.5\nfidelity = 0.9"),
            BASE.replace("j = 8", "j = 0"),
            BASE.replace("z = 3", "z = 9"),
            BASE.replace("prep = \"zero\"", "prep = \"up\""),
            BASE.replace("mode = \"standard\"", "mode = \"interleaved\""),
            BASE.replace("seed = 1", "seed = 1\ntoggle_z = true")
                .replace("j = 8", "j = 5"),
        ];
        for text in cases {
            let result = parse_config(&text).and_then(|c| c.to_plan());
            assert!(
                matches!(result, Err(Error::Config(_))),
                "{result:?}\n{text}"
            );
        }
    }

    #[test]
    fn unphysical_state_is_its_own_category() {
        let text = BASE.replace("prep = \"zero\"", "prep = [1.0, 1.0, 1.0, 0.0]");
        let result = parse_config(&text).unwrap().to_plan();
        assert!(matches!(result, Err(Error::Unphysical(_))));
    }
}
