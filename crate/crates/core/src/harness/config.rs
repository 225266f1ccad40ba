//! Flat `key = value` experiment documents.
//!
//! ```text
//! # two one-particle states, weak hits
//! n_vertices = 8
//! epsilon = 0.05
//! theta_over_pi = 0.1
//! t_max = 2000
//! ```
//!
//! `x`/`epsilon`, `theta`/`theta_over_pi` and `values`/`values_over_pi` are
//! alternatives: a document may give one of each pair. A later layer (such as
//! command-line overrides) replaces whichever form an earlier layer used.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::BlockNorm;
use crate::dynamics::{FieldMode, InitialState, MarginalTiming, RunConfig};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Epsilon,
    Theta,
    ParticleNumber,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Theta => "theta",
            SweepAxis::ParticleNumber => "particle_number",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [SweepAxis::Epsilon, SweepAxis::Theta, SweepAxis::ParticleNumber]
            .into_iter()
            .find(|a| a.name() == s)
    }
}

/// Everything a CLI invocation can be configured with.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub run: RunConfig,
    pub axis: Option<SweepAxis>,
    /// Sweep values in axis units (theta in radians).
    pub values: Vec<f64>,
    pub seeds_per_value: usize,
    pub control_modes: Vec<FieldMode>,
    /// Worker threads for batches; `None` lets the pool decide.
    pub threads: Option<usize>,
    pub plot_scripts: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            run: RunConfig::default(),
            axis: None,
            values: Vec::new(),
            seeds_per_value: 5,
            control_modes: vec![
                FieldMode::SampledFrom1,
                FieldMode::AllOnes,
                FieldMode::AllZeros,
                FieldMode::IidUniform,
            ],
            threads: None,
            plot_scripts: false,
        }
    }
}

/// One `key = value` assignment and where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Setting {
    pub line: Option<usize>,
    pub key: String,
    pub value: String,
}

/// Splits a document into settings. Blank lines and `#` comments are skipped.
pub fn parse_settings(text: &str) -> Result<Vec<Setting>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(Some(k + 1), None, format!("expected `key = value`, got `{line}`")));
        };
        out.push(Setting {
            line: Some(k + 1),
            key: key.trim().to_owned(),
            value: value.trim().to_owned(),
        });
    }
    Ok(out)
}

/// Parses a `key=value` override.
pub fn parse_override(s: &str) -> Result<Setting> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| Error::config(None, None, format!("override `{s}` is not of the form key=value")))?;
    Ok(Setting {
        line: None,
        key: key.trim().to_owned(),
        value: value.trim().to_owned(),
    })
}

const ALTERNATIVES: [(&str, &str); 3] = [("x", "epsilon"), ("theta", "theta_over_pi"), ("values", "values_over_pi")];

#[derive(Default)]
struct Explicit {
    state_1: bool,
    state_2: bool,
}

impl ExperimentConfig {
    /// Reads an optional config file, then applies `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        Self::load_over(Vec::new(), path, overrides)
    }

    /// Like [`load`](Self::load), with `base` settings applied first.
    pub fn load_over(base: Vec<Setting>, path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut layers = vec![base];
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            layers.push(parse_settings(&text)?);
        }
        layers.push(overrides.iter().map(|s| parse_override(s)).collect::<Result<_>>()?);
        Self::from_layers(&layers)
    }

    /// Applies layers in order over the defaults.
    pub fn from_layers(layers: &[Vec<Setting>]) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut explicit = Explicit::default();
        for layer in layers {
            check_layer(layer)?;
            for s in layer {
                cfg.apply(s, &mut explicit)?;
            }
        }
        let n = cfg.run.n_vertices;
        if !explicit.state_1 {
            cfg.run.initial_state_1 = InitialState::one_particle(n, 0);
        }
        if !explicit.state_2 {
            cfg.run.initial_state_2 = InitialState::one_particle(n, n);
        }
        Ok(cfg)
    }

    fn apply(&mut self, s: &Setting, explicit: &mut Explicit) -> Result<()> {
        let err = |msg: String| Error::config(s.line, Some(&s.key), msg);
        let float = || -> Result<f64> {
            s.value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("expected a number, got `{}`", s.value)))
        };
        let uint = || -> Result<u64> {
            s.value
                .parse::<u64>()
                .map_err(|_| err(format!("expected a non-negative integer, got `{}`", s.value)))
        };
        let list = || -> Result<Vec<f64>> {
            s.value
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(|v| {
                    v.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| err(format!("expected a number in the list, got `{v}`")))
                })
                .collect()
        };
        let run = &mut self.run;
        match s.key.as_str() {
            "n_vertices" => run.n_vertices = uint()? as usize,
            "x" => run.x = float()?,
            "epsilon" => run.x = 1.0 - float()?,
            "theta" => run.theta = float()?,
            "theta_over_pi" => run.theta = float()? * std::f64::consts::PI,
            "seed" => run.seed = uint()?,
            "t_max" => run.t_max = uint()?,
            "block_m" => run.block_m = uint()?,
            "delta" => run.delta = float()?,
            "initial_state_1" => {
                run.initial_state_1 = InitialState::parse(&s.value);
                explicit.state_1 = true;
            }
            "initial_state_2" => {
                run.initial_state_2 = InitialState::parse(&s.value);
                explicit.state_2 = true;
            }
            "field_mode" => {
                run.field_mode = FieldMode::parse(&s.value).ok_or_else(|| err(format!("unknown field mode `{}`", s.value)))?
            }
            "history_file" => run.history_file = Some(PathBuf::from(&s.value)),
            "marginal_timing" => {
                run.marginal_timing = MarginalTiming::parse(&s.value)
                    .ok_or_else(|| err(format!("expected pre_jump or post_jump, got `{}`", s.value)))?
            }
            "block_norm" => {
                run.block_norm = BlockNorm::parse(&s.value)
                    .ok_or_else(|| err(format!("expected absolute_links or signed, got `{}`", s.value)))?
            }
            "axis" => {
                self.axis = Some(SweepAxis::parse(&s.value).ok_or_else(|| err(format!("unknown axis `{}`", s.value)))?)
            }
            "values" => self.values = list()?,
            "values_over_pi" => self.values = list()?.into_iter().map(|v| v * std::f64::consts::PI).collect(),
            "seeds_per_value" => self.seeds_per_value = uint()? as usize,
            "control_modes" => {
                self.control_modes = s
                    .value
                    .split(',')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(|v| FieldMode::parse(v).ok_or_else(|| err(format!("unknown field mode `{v}`"))))
                    .collect::<Result<_>>()?
            }
            "threads" => self.threads = Some(uint()? as usize).filter(|&t| t > 0),
            "plot_scripts" => {
                self.plot_scripts = s
                    .value
                    .parse()
                    .map_err(|_| err(format!("expected true or false, got `{}`", s.value)))?
            }
            _ => return Err(err("unknown key".into())),
        }
        Ok(())
    }
}

fn check_layer(layer: &[Setting]) -> Result<()> {
    for (i, s) in layer.iter().enumerate() {
        if let Some(first) = layer[..i].iter().find(|t| t.key == s.key) {
            if s.line.is_some() {
                return Err(Error::config(
                    s.line,
                    Some(&s.key),
                    format!("duplicate key, first set on line {}", first.line.unwrap_or(0)),
                ));
            }
        }
        for (a, b) in ALTERNATIVES {
            if s.key == b {
                if let Some(other) = layer.iter().find(|t| t.key == a) {
                    return Err(Error::config(
                        s.line.or(other.line),
                        Some(b),
                        format!("`{a}` and `{b}` are alternatives; give only one"),
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, overrides: &[&str]) -> Result<ExperimentConfig> {
        let over: Vec<Setting> = overrides.iter().map(|s| parse_override(s).unwrap()).collect();
        ExperimentConfig::from_layers(&[parse_settings(text)?, over])
    }

    #[test]
    fn parses_documents() {
        let c = load(
            "# comment\nn_vertices = 4\nepsilon = 0.1  # trailing\ntheta_over_pi=0.25\nseed = 9\n\nfield_mode = iid_uniform\n",
            &[],
        )
        .unwrap();
        assert_eq!(c.run.n_vertices, 4);
        assert!((c.run.x - 0.9).abs() < 1e-15);
        assert!((c.run.theta - 0.25 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(c.run.seed, 9);
        assert_eq!(c.run.field_mode, FieldMode::IidUniform);
        assert_eq!(c.run.initial_state_1, InitialState::Bits("10000000".into()));
        assert_eq!(c.run.initial_state_2, InitialState::Bits("00001000".into()));
    }

    #[test]
    fn override_replaces_counterpart() {
        let c = load("x = 0.9\n", &["epsilon=0.05"]).unwrap();
        assert!((c.run.x - 0.95).abs() < 1e-15);
        let c = load("theta_over_pi = 0.1\n", &["theta=0.5"]).unwrap();
        assert_eq!(c.run.theta, 0.5);
    }

    #[test]
    fn alternatives_conflict_within_a_document() {
        let err = load("x = 0.9\nepsilon = 0.1\n", &[]).unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(2), key: Some(ref k), .. } if k == "epsilon"));
        assert!(load("", &["x=0.9", "epsilon=0.1"]).is_err());
    }

    #[test]
    fn errors_name_line_and_key() {
        let err = load("seed = 1\nbogus = 3\n", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("bogus"), "{msg}");
        let err = load("t_max = ten\n", &[]).unwrap_err();
        assert!(err.to_string().contains("t_max"));
        let err = load("seed = 1\nseed = 2\n", &[]).unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = load("just text\n", &[]).unwrap_err();
        assert!(err.to_string().contains("line 1"));
        assert!(load("", &["nope=1"]).unwrap_err().to_string().contains("nope"));
    }

    #[test]
    fn sweep_keys() {
        let c = load(
            "axis = theta\nvalues_over_pi = 0.1, 0.2\nseeds_per_value = 3\ncontrol_modes = all_ones,iid_uniform\n",
            &[],
        )
        .unwrap();
        assert_eq!(c.axis, Some(SweepAxis::Theta));
        assert!((c.values[1] - 0.2 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(c.seeds_per_value, 3);
        assert_eq!(c.control_modes, vec![FieldMode::AllOnes, FieldMode::IidUniform]);
    }

    #[test]
    fn explicit_states_kept() {
        let c = load("n_vertices = 2\ninitial_state_1 = 0110\n", &[]).unwrap();
        assert_eq!(c.run.initial_state_1, InitialState::Bits("0110".into()));
        assert_eq!(c.run.initial_state_2, InitialState::Bits("0010".into()));
    }
}
