//! Experiment configuration: JSON in, fully materialized settings out.
//!
//! Users supply a sparse JSON object; every absent field is filled with the
//! experiment's default, and the resulting [`ResolvedConfig`] — the complete
//! record of what will run — is embedded in the report and hashed to name
//! the output directory. Two runs with the same resolved configuration are
//! byte-identical (timestamps excluded).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::shadowing::{PoolSpec, SearchConfig};
use crate::systems::{
    chart_linear, degenerate_circle_line, doubling, rotation, toral_auto, MapSystem,
};

/// The packaged experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    HyperbolicEis,
    WeakContinuity,
    Usc,
    Escape,
    FixedSegment,
    Poisson,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::HyperbolicEis => "hyperbolic_eis",
            ExperimentKind::WeakContinuity => "weak_continuity",
            ExperimentKind::Usc => "usc",
            ExperimentKind::Escape => "escape",
            ExperimentKind::FixedSegment => "fixed_segment",
            ExperimentKind::Poisson => "poisson",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            ExperimentKind::HyperbolicEis => {
                "ergodic tracking of a hyperbolic toral automorphism against the adversary pool"
            }
            ExperimentKind::WeakContinuity => {
                "W1 continuity of orbit and periodic measures under size-d method perturbations"
            }
            ExperimentKind::Usc => {
                "inclusion gap of method measures in the reference family along a d-ladder"
            }
            ExperimentKind::Escape => "exit-time law k ≈ ε/δ for constant drifts off a fixed circle",
            ExperimentKind::FixedSegment => {
                "a segment of fixed points defeats every drift; its measure is exactly invariant"
            }
            ExperimentKind::Poisson => "near-returns of a perturbed rotation within tolerance",
        }
    }

    pub fn all() -> [ExperimentKind; 6] {
        [
            ExperimentKind::HyperbolicEis,
            ExperimentKind::WeakContinuity,
            ExperimentKind::Usc,
            ExperimentKind::Escape,
            ExperimentKind::FixedSegment,
            ExperimentKind::Poisson,
        ]
    }

    pub fn parse(name: &str) -> Result<Self> {
        ExperimentKind::all()
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::all().iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown experiment '{name}'; expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

/// Map selection with optional parameters; absent parameters use the
/// catalog defaults.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub map: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[i64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

impl MapConfig {
    pub fn named(map: &str) -> Self {
        MapConfig {
            map: map.into(),
            alpha: None,
            matrix: None,
            beta: None,
            lambda: None,
            a: None,
        }
    }

    pub fn build(&self) -> Result<MapSystem> {
        match self.map.as_str() {
            "rotation" => rotation(self.alpha.unwrap_or(0.618_033_988_7)),
            "doubling" => Ok(doubling()),
            "toral_auto" => toral_auto(self.matrix.unwrap_or([[2, 1], [1, 1]])),
            "degenerate_circle_line" => degenerate_circle_line(self.beta.unwrap_or(0.5)),
            "chart_linear" => chart_linear(self.lambda.unwrap_or(3.0), self.a.unwrap_or(1.0)),
            other => Err(Error::Config(format!(
                "unknown map '{other}'; expected rotation, doubling, toral_auto, \
                 degenerate_circle_line, or chart_linear"
            ))),
        }
    }
}

/// Sparse user-facing configuration. Every field is optional; unknown keys
/// are rejected so typos surface as config errors.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Must match the experiment being run when present.
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub d: Option<f64>,
    pub d_ladder: Option<Vec<f64>>,
    pub horizon: Option<i64>,
    pub samples: Option<usize>,
    pub tail_window: Option<usize>,
    pub measure_horizon: Option<usize>,
    pub quantize_resolution: Option<usize>,
    pub grid_resolution: Option<usize>,
    pub tolerance: Option<f64>,
    pub map: Option<MapConfig>,
    pub pool: Option<PoolSpec>,
    pub search: Option<SearchConfig>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }
}

/// The complete, validated settings of one run.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub experiment: String,
    pub seed: u64,
    pub epsilon: f64,
    pub d: f64,
    pub d_ladder: Vec<f64>,
    pub horizon: i64,
    pub samples: usize,
    pub tail_window: usize,
    pub measure_horizon: usize,
    pub quantize_resolution: usize,
    pub grid_resolution: usize,
    pub tolerance: f64,
    pub map: MapConfig,
    pub pool: PoolSpec,
    pub search: SearchConfig,
}

impl ResolvedConfig {
    /// Fill every absent field of `cfg` with the defaults of `kind`, then
    /// validate the result.
    pub fn resolve(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<Self> {
        if let Some(named) = &cfg.experiment {
            if named != kind.name() {
                return Err(Error::Config(format!(
                    "config names experiment '{named}' but '{}' was requested",
                    kind.name()
                )));
            }
        }
        let d = cfg.d.unwrap_or(1e-3);
        let defaults = match kind {
            ExperimentKind::HyperbolicEis => (0.05, vec![], 200, 16, "toral_auto"),
            ExperimentKind::WeakContinuity => (0.05, vec![], 200, 4, "toral_auto"),
            ExperimentKind::Usc => (0.02, vec![3e-2, 1e-2, 3e-3, 1e-3], 200, 2, "toral_auto"),
            ExperimentKind::Escape => {
                (0.05, vec![1e-2, 1e-3, 1e-4], 200, 1, "degenerate_circle_line")
            }
            ExperimentKind::FixedSegment => {
                (0.05, vec![1e-2, 1e-3], 200, 8, "degenerate_circle_line")
            }
            ExperimentKind::Poisson => (0.05, vec![], 10_000, 8, "rotation"),
        };
        let (eps_default, ladder_default, horizon_default, samples_default, map_default) = defaults;

        let search_default = SearchConfig {
            horizon: cfg.horizon.unwrap_or(horizon_default),
            resolution: if kind == ExperimentKind::FixedSegment { 32 } else { 64 },
            levels: 3,
            shrink: 8.0,
            use_tracer_seed: true,
        };
        let resolved = ResolvedConfig {
            experiment: kind.name().into(),
            seed: cfg.seed.unwrap_or(0),
            epsilon: cfg.epsilon.unwrap_or(eps_default),
            d,
            d_ladder: cfg.d_ladder.clone().unwrap_or(ladder_default),
            horizon: cfg.horizon.unwrap_or(horizon_default),
            samples: cfg.samples.unwrap_or(samples_default),
            tail_window: cfg.tail_window.unwrap_or(40),
            measure_horizon: cfg.measure_horizon.unwrap_or(match kind {
                ExperimentKind::Usc => 60_000,
                _ => 5_000,
            }),
            quantize_resolution: cfg.quantize_resolution.unwrap_or(match kind {
                // The hull search solves many flow instances; a coarser
                // lattice keeps them tractable without moving the gap.
                ExperimentKind::Usc => 32,
                _ => 45,
            }),
            grid_resolution: cfg.grid_resolution.unwrap_or(32),
            tolerance: cfg.tolerance.unwrap_or(0.01),
            map: cfg.map.clone().unwrap_or_else(|| MapConfig::named(map_default)),
            pool: cfg.pool.clone().unwrap_or_default(),
            search: cfg.search.clone().unwrap_or(search_default),
        };
        resolved.validate()?;
        Ok(resolved)
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 || self.epsilon.is_nan() {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.d <= 0.0 || self.d.is_nan() {
            return Err(Error::Config("d must be positive".into()));
        }
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.samples < 1 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.tail_window < 1 {
            return Err(Error::Config("tail_window must be at least 1".into()));
        }
        if self.measure_horizon < 1 {
            return Err(Error::Config("measure_horizon must be at least 1".into()));
        }
        if self.quantize_resolution < 1 || self.grid_resolution < 1 {
            return Err(Error::Config("resolutions must be at least 1".into()));
        }
        if self.tolerance < 0.0 || self.tolerance.is_nan() {
            return Err(Error::Config("tolerance must be nonnegative".into()));
        }
        if self.d_ladder.iter().any(|&d| d <= 0.0 || d.is_nan()) {
            return Err(Error::Config("d_ladder entries must be positive".into()));
        }
        if self.d_ladder.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config("d_ladder must be strictly decreasing".into()));
        }
        self.map.build().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Twelve hex characters of the SHA-256 of the canonical JSON encoding;
    /// names the output directory so distinct settings never collide.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::default();
        let r = ResolvedConfig::resolve(ExperimentKind::HyperbolicEis, &cfg).unwrap();
        assert_eq!(r.epsilon, 0.05);
        assert_eq!(r.d, 1e-3);
        assert_eq!(r.horizon, 200);
        assert_eq!(r.samples, 16);
        assert_eq!(r.map.map, "toral_auto");
        let r = ResolvedConfig::resolve(ExperimentKind::Escape, &cfg).unwrap();
        assert_eq!(r.d_ladder, vec![1e-2, 1e-3, 1e-4]);
        assert_eq!(r.map.map, "degenerate_circle_line");
        let r = ResolvedConfig::resolve(ExperimentKind::Poisson, &cfg).unwrap();
        assert_eq!(r.map.map, "rotation");
        assert_eq!(r.horizon, 10_000);
    }

    #[test]
    fn overrides_apply_and_hash_changes() {
        let base = ResolvedConfig::resolve(ExperimentKind::Escape, &ExperimentConfig::default())
            .unwrap();
        let cfg = ExperimentConfig {
            epsilon: Some(0.1),
            ..Default::default()
        };
        let changed = ResolvedConfig::resolve(ExperimentKind::Escape, &cfg).unwrap();
        assert_eq!(changed.epsilon, 0.1);
        assert_ne!(base.hash(), changed.hash());
        assert_eq!(base.hash().len(), 12);
        assert_eq!(
            base.hash(),
            ResolvedConfig::resolve(ExperimentKind::Escape, &ExperimentConfig::default())
                .unwrap()
                .hash()
        );
    }

    #[test]
    fn bad_values_are_config_errors() {
        let cfg = ExperimentConfig {
            epsilon: Some(-1.0),
            ..Default::default()
        };
        let err = ResolvedConfig::resolve(ExperimentKind::Poisson, &cfg).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("epsilon must be positive")));

        let cfg = ExperimentConfig {
            d_ladder: Some(vec![1e-3, 1e-2]),
            ..Default::default()
        };
        assert!(ResolvedConfig::resolve(ExperimentKind::Escape, &cfg).is_err());

        let cfg = ExperimentConfig {
            experiment: Some("poisson".into()),
            ..Default::default()
        };
        assert!(ResolvedConfig::resolve(ExperimentKind::Escape, &cfg).is_err());
    }

    #[test]
    fn json_round_trip_rejects_unknown_keys() {
        let cfg = ExperimentConfig::from_json(r#"{"epsilon": 0.07, "seed": 5}"#).unwrap();
        assert_eq!(cfg.epsilon, Some(0.07));
        assert_eq!(cfg.seed, Some(5));
        let err = ExperimentConfig::from_json(r#"{"epsilonn": 0.07}"#).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(ExperimentConfig::from_json("not json").is_err());
    }

    #[test]
    fn map_config_builds_catalog_maps() {
        assert_eq!(MapConfig::named("toral_auto").build().unwrap().name(), "toral_auto");
        assert_eq!(MapConfig::named("doubling").build().unwrap().name(), "doubling");
        let mut cfg = MapConfig::named("rotation");
        cfg.alpha = Some(0.25);
        assert_eq!(cfg.build().unwrap().params()["alpha"], 0.25);
        assert!(MapConfig::named("nope").build().is_err());
    }

    #[test]
    fn experiment_names_parse() {
        for kind in ExperimentKind::all() {
            assert_eq!(ExperimentKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(ExperimentKind::parse("bogus").is_err());
    }
}
