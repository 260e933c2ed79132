//! JSON session documents.
//!
//! ```json
//! {
//!   "graph": {"k": 2, "sizes": [2, 3], "theta": "division"},
//!   "action": {"kind": "product_odometers", "sizes": [2, 3]},
//!   "cap": 1000000, "depth": 2, "g_bound": 8, "seed": 0, "format": "text"
//! }
//! ```
//!
//! `graph` is required for `"explicit"` actions and optional otherwise; when
//! present it must agree with the graph the action kind builds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kgraph::{make_theta, KGraph, KGraphError, ThetaFamily, ThetaKind, DEFAULT_ENUMERATION_CAP};
use crate::selfsim::{
    make_gbs, make_lambda_one, make_odometer, make_product_of_odometers, validate_selfsim, EdgeActionSpec,
    SelfSimError, SelfSimilarKGraph, ValidationOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("graph spec: {0}")]
    Graph(#[from] KGraphError),
    #[error("action spec: {0}")]
    Action(#[from] SelfSimError),
    #[error("{0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Named(ThetaKind),
    Tables { tables: Vec<Vec<(u32, u32)>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub theta: ThetaSpec,
}

impl GraphSpec {
    pub fn build(&self, cap: u64) -> Result<KGraph> {
        if self.sizes.len() != self.k {
            return Err(ConfigError::Inconsistent(format!(
                "k = {} but {} sizes given",
                self.k,
                self.sizes.len()
            )));
        }
        let theta = match &self.theta {
            ThetaSpec::Named(kind) => make_theta(*kind, &self.sizes)?,
            ThetaSpec::Tables { tables } => ThetaFamily::from_tables(self.sizes.clone(), tables.clone())?,
        };
        Ok(KGraph::new(theta)?.with_cap(cap))
    }

    pub fn of(graph: &KGraph) -> Self {
        GraphSpec {
            k: graph.rank(),
            sizes: graph.sizes().to_vec(),
            theta: ThetaSpec::Tables {
                tables: graph.theta().to_tables(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub n: usize,
    pub rho: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionSpec {
    Odometer { n: usize, m: i64 },
    Gbs { orbits: Vec<OrbitSpec> },
    ProductOdometers { sizes: Vec<usize> },
    LambdaOne { m: Vec<i64> },
    Explicit { sigma: Vec<Vec<u32>>, rho: Vec<Vec<i64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

fn default_depth() -> u32 {
    ValidationOptions::default().depth
}

fn default_g_bound() -> i64 {
    ValidationOptions::default().g_bound
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    pub action: ActionSpec,
    #[serde(default = "default_cap")]
    pub cap: u64,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_g_bound")]
    pub g_bound: i64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
}

impl SessionConfig {
    pub fn new(action: ActionSpec) -> Self {
        SessionConfig {
            graph: None,
            action,
            cap: default_cap(),
            depth: default_depth(),
            g_bound: default_g_bound(),
            seed: 0,
            format: OutputFormat::Text,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn options(&self) -> ValidationOptions {
        ValidationOptions {
            depth: self.depth,
            g_bound: self.g_bound,
        }
    }

    /// Builds and validates the configured action.
    pub fn build(&self) -> Result<SelfSimilarKGraph> {
        let ss = match &self.action {
            ActionSpec::Explicit { sigma, rho } => {
                let graph = self
                    .graph
                    .as_ref()
                    .ok_or_else(|| ConfigError::Inconsistent("explicit action needs a graph".into()))?
                    .build(self.cap)?;
                let spec = EdgeActionSpec {
                    sigma: sigma.clone(),
                    rho: rho.clone(),
                };
                return Ok(validate_selfsim(graph, spec, self.options())?.with_label("explicit"));
            }
            ActionSpec::Odometer { n, m } => make_odometer(*n, *m)?,
            ActionSpec::Gbs { orbits } => {
                let data: Vec<(usize, Vec<i64>)> = orbits.iter().map(|o| (o.n, o.rho.clone())).collect();
                make_gbs(&data)?
            }
            ActionSpec::ProductOdometers { sizes } => make_product_of_odometers(sizes)?,
            ActionSpec::LambdaOne { m } => make_lambda_one(m)?,
        };
        if let Some(spec) = &self.graph {
            let declared = spec.build(self.cap)?;
            if declared.theta() != ss.graph().theta() {
                return Err(ConfigError::Inconsistent(format!(
                    "declared graph does not match the graph of {}",
                    ss.label()
                )));
            }
        }
        Ok(ss.with_cap(self.cap))
    }
}
