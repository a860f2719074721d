//! Single JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cloud::PipelineConfig;
use crate::demand::DemandParams;
use crate::error::{Error, Result};
use crate::road::DEFAULT_GEOMETRY_WINDOW;
use crate::sight::SweepConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkbenchConfig {
    pub pipeline: PipelineConfig,
    /// Needed to compute required distances; no meaningful default exists.
    pub demand: Option<DemandParams>,
    pub sweep: SweepConfig,
    /// Window for curvature/grade estimation when the trajectory lacks them (m).
    pub geometry_window: f64,
}

impl Default for WorkbenchConfig {
    fn default() -> Self {
        WorkbenchConfig {
            pipeline: PipelineConfig::default(),
            demand: None,
            sweep: SweepConfig::default(),
            geometry_window: DEFAULT_GEOMETRY_WINDOW,
        }
    }
}

impl WorkbenchConfig {
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            context: origin.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.sweep.validate()?;
        if let Some(d) = &self.demand {
            d.validate()?;
        }
        if !(self.geometry_window > 0.0) {
            return Err(Error::param("geometry_window", "must be positive"));
        }
        Ok(())
    }

    pub fn demand(&self) -> Result<&DemandParams> {
        self.demand
            .as_ref()
            .ok_or_else(|| Error::param("demand", "configuration has no `demand` section (base_v85 is required)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c = WorkbenchConfig::from_json_str("{}", "test").unwrap();
        assert_eq!(c, WorkbenchConfig::default());
        assert!(c.demand().is_err());
    }

    #[test]
    fn nested_sections() {
        let c = WorkbenchConfig::from_json_str(
            r#"{"demand":{"base_v85":25},"sweep":{"mode":"fixed","target":{"kind":"box"}},"pipeline":{"keep_every":2}}"#,
            "test",
        )
        .unwrap();
        assert_eq!(c.demand().unwrap().base_v85, 25.0);
        assert_eq!(c.pipeline.keep_every, 2);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = WorkbenchConfig::from_json_str(r#"{"sweeps":{}}"#, "cfg.json").unwrap_err();
        assert!(err.to_string().contains("cfg.json"));
    }
}
