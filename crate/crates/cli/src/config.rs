use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use attnstab_core::graph::PerturbMode;
use attnstab_core::motif::{MAX_CYCLE_LEN, MIN_CYCLE_LEN};
use attnstab_core::Variant;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Attention,
    Spectral,
    Motifs,
    Nstc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Attention, Method::Spectral, Method::Motifs, Method::Nstc];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Attention => "attention",
            Method::Spectral => "spectral",
            Method::Motifs => "motifs",
            Method::Nstc => "nstc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected attention, spectral, motifs, nstc or all)"))
    }
}

/// Parses `all` or a comma-separated list. Repeated names collapse.
pub fn parse_methods(items: &[String]) -> Result<BTreeSet<Method>> {
    let mut out = BTreeSet::new();
    for item in items {
        for name in item.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if name == "all" {
                out.extend(Method::ALL);
            } else {
                out.insert(name.parse::<Method>().map_err(anyhow::Error::msg)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub model_path: PathBuf,
    pub variant: Variant,
    pub methods: BTreeSet<Method>,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    pub iterations: usize,
    pub learning_rate: f64,
    pub leaky_slope: f64,
    pub perturb_node: usize,
    pub perturb_factor: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_step: f64,
    pub perturb_mode: PerturbMode,
    pub max_motif_size: usize,
    pub top_k: usize,
}

impl AnalysisConfig {
    /// Defaults for everything except the paths.
    pub fn new(model_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        let h = attnstab_core::agcn::AgcnHyperparams::default();
        Self {
            model_path: model_path.into(),
            variant: Variant::Appendix,
            methods: Method::ALL.into_iter().collect(),
            output_dir: output_dir.into(),
            seeds: (0..10).collect(),
            iterations: h.iterations,
            learning_rate: h.learning_rate,
            leaky_slope: h.leaky_slope,
            perturb_node: 0,
            perturb_factor: 2.0,
            delta_min: 0.5,
            delta_max: 3.0,
            delta_step: 0.5,
            perturb_mode: PerturbMode::default(),
            max_motif_size: MAX_CYCLE_LEN,
            top_k: 2,
        }
    }

    pub fn with_methods(mut self, methods: impl IntoIterator<Item = Method>) -> Self {
        self.methods = methods.into_iter().collect();
        self
    }

    /// Checks that do not need the model. Errors name the offending option.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            bail!("--method: at least one method is required");
        }
        if self.methods.contains(&Method::Attention) {
            if self.seeds.is_empty() {
                bail!("--seed: at least one seed is required for attention");
            }
            if self.iterations == 0 {
                bail!("--iters: must be at least 1");
            }
            if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
                bail!("--lr: must be finite and >= 0, got {}", self.learning_rate);
            }
            if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
                bail!("--leaky-slope: must lie in (0, 1), got {}", self.leaky_slope);
            }
            if !self.perturb_factor.is_finite() {
                bail!("--perturb-factor: must be finite");
            }
        }
        if !(self.delta_step > 0.0 && self.delta_step.is_finite()) {
            bail!("--delta-step: must be > 0, got {}", self.delta_step);
        }
        if !(self.delta_min.is_finite() && self.delta_max.is_finite()) || self.delta_max < self.delta_min {
            bail!("--delta-min/--delta-max: need finite values with min <= max");
        }
        if !(MIN_CYCLE_LEN..=MAX_CYCLE_LEN).contains(&self.max_motif_size) {
            bail!("--max-motif-size: must lie in {MIN_CYCLE_LEN}..={MAX_CYCLE_LEN}, got {}", self.max_motif_size);
        }
        if self.top_k == 0 {
            bail!("--top-k: must be at least 1");
        }
        Ok(())
    }
}
