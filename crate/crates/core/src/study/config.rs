use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::asymptotics::Mode;
use crate::bell::RuleId;
use crate::error::{Error, Result};
use crate::material::{MaterialInput, MaterialParams};
use crate::mesh::DomainSpec;

/// One JSON document describing a case and, optionally, a sweep around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub material: MaterialInput,
    pub geometry: DomainSpec,
    #[serde(default = "default_rule")]
    pub quadrature: RuleId,
    #[serde(default = "yes")]
    pub enrichment: bool,
    /// Applied traction t [Pa].
    pub load: f64,
    #[serde(default)]
    pub study: Study,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_rule() -> RuleId {
    RuleId::P13
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Study {
    #[default]
    Single,
    Convergence(ConvergenceSweep),
    SizeEffect(SizeEffectSweep),
}

/// Fan radius, fan count and quadrature sweeps for one geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSweep {
    #[serde(default = "default_r_over_ell")]
    pub r_over_ell: Vec<f64>,
    /// R/ℓ of the enriched self-reference.
    #[serde(default = "default_reference")]
    pub reference_r_over_ell: f64,
    /// R/ℓ at which fan count and quadrature are varied.
    #[serde(default = "default_probe")]
    pub probe_r_over_ell: f64,
    #[serde(default = "default_fan_counts")]
    pub fan_counts: Vec<usize>,
    #[serde(default = "default_rules")]
    pub quadratures: Vec<RuleId>,
}

impl Default for ConvergenceSweep {
    fn default() -> Self {
        Self {
            r_over_ell: default_r_over_ell(),
            reference_r_over_ell: default_reference(),
            probe_r_over_ell: default_probe(),
            fan_counts: default_fan_counts(),
            quadratures: default_rules(),
        }
    }
}

fn default_r_over_ell() -> Vec<f64> {
    vec![1.0, 0.5, 0.2, 0.1, 0.05, 0.01, 0.005]
}

fn default_reference() -> f64 {
    0.005
}

fn default_probe() -> f64 {
    0.1
}

fn default_fan_counts() -> Vec<usize> {
    vec![4, 5, 6, 8]
}

fn default_rules() -> Vec<RuleId> {
    RuleId::ALL.to_vec()
}

/// Crack size and length scale sweep; lengths relative to L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeEffectSweep {
    #[serde(default = "default_d_over_l")]
    pub d_over_l: Vec<f64>,
    #[serde(default = "default_ell_over_l")]
    pub ell_over_l: Vec<f64>,
    #[serde(default = "default_probe")]
    pub r_over_ell: f64,
}

impl Default for SizeEffectSweep {
    fn default() -> Self {
        Self { d_over_l: default_d_over_l(), ell_over_l: default_ell_over_l(), r_over_ell: default_probe() }
    }
}

fn default_d_over_l() -> Vec<f64> {
    vec![1.0 / 40.0, 1.0 / 20.0, 1.0 / 10.0, 1.0 / 8.0, 1.0 / 6.0, 1.0 / 5.0, 1.0 / 4.0, 1.0 / 3.0, 0.4, 0.5]
}

fn default_ell_over_l() -> Vec<f64> {
    vec![0.005, 0.01, 0.02]
}

impl RunConfig {
    /// Paper-style defaults: E = 1 GPa, ν = 0.3, L = 1 m, t = 1 MPa,
    /// d/L = 1/5, ℓ = d/10, R = ℓ/10, M = 5.
    pub fn baseline(mode: Mode) -> Self {
        let (d, ell) = (0.2, 0.02);
        Self {
            mode,
            material: MaterialInput { e: 1e9, nu: 0.3, ell },
            geometry: DomainSpec::new(d, 1.0, 0.1 * ell, 5),
            quadrature: default_rule(),
            enrichment: true,
            load: 1e6,
            study: Study::Single,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn material(&self) -> Result<MaterialParams> {
        MaterialParams::try_from(self.material)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.material().map_err(cfg)?;
        self.geometry.validate().map_err(cfg)?;
        if !(self.load.is_finite() && self.load > 0.0) {
            return Err(Error::Config(format!("load must be positive, got {}", self.load)));
        }
        let positive = |name: &str, v: &[f64]| {
            if v.is_empty() {
                return Err(Error::Config(format!("sweep list '{name}' is empty")));
            }
            if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::Config(format!("sweep list '{name}' must hold positive values")));
            }
            Ok(())
        };
        match &self.study {
            Study::Single => {}
            Study::Convergence(s) => {
                positive("r_over_ell", &s.r_over_ell)?;
                positive("reference_r_over_ell", &[s.reference_r_over_ell, s.probe_r_over_ell])?;
                if s.fan_counts.is_empty() || s.quadratures.is_empty() {
                    return Err(Error::Config("fan_counts and quadratures must be non-empty".into()));
                }
            }
            Study::SizeEffect(s) => {
                positive("d_over_l", &s.d_over_l)?;
                positive("ell_over_l", &s.ell_over_l)?;
                positive("r_over_ell", &[s.r_over_ell])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::baseline(Mode::I);
        for study in [Study::Single, Study::Convergence(Default::default()), Study::SizeEffect(Default::default())] {
            cfg.study = study;
            let text = cfg.to_json();
            let back = RunConfig::from_json(&text).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::baseline(Mode::II).to_json()).unwrap();
        v["materail"] = serde_json::json!(1);
        assert!(matches!(RunConfig::from_json(&v.to_string()), Err(Error::Config(_))));
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::baseline(Mode::II).to_json()).unwrap();
        v["geometry"]["radius"] = serde_json::json!(1);
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn minimal_document() {
        let text = r#"{"mode":"II","material":{"E":1e9,"nu":0.3,"ell":0.01},
            "geometry":{"d":0.2,"L":1,"R":0.001,"M":5},"load":1e6,
            "study":{"kind":"size_effect","d_over_l":[0.1,0.2]}}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.quadrature, RuleId::P13);
        assert!(cfg.enrichment);
        assert_eq!(cfg.geometry.grading, 1.3);
        match cfg.study {
            Study::SizeEffect(s) => assert_eq!(s.ell_over_l, vec![0.005, 0.01, 0.02]),
            _ => panic!(),
        }
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let mut cfg = RunConfig::baseline(Mode::I);
        cfg.material.nu = 0.5;
        assert!(matches!(RunConfig::from_json(&cfg.to_json()), Err(Error::Config(_))));
        let mut cfg = RunConfig::baseline(Mode::I);
        cfg.study = Study::SizeEffect(SizeEffectSweep { d_over_l: vec![], ..Default::default() });
        assert!(matches!(RunConfig::from_json(&cfg.to_json()), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_json("{\"mode\":\"III\"}"), Err(Error::Config(_))));
    }
}
