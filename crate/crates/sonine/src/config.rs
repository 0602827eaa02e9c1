//! Run configuration: grid profiles, named tolerances, seeds, output paths.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transforms::{make_log_grid, LogGrid};

/// Grid resolution profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Profile {
    /// L = 4, N = 256; for CI and smoke runs.
    Fast,
    /// L = 6, N = 1024; the reference desk-scale profile.
    Default,
    /// User-specified half-extent and point count.
    Custom { l: f64, n: usize },
}

impl Profile {
    pub fn parse(text: &str) -> Result<Profile> {
        match text {
            "fast" => Ok(Profile::Fast),
            "default" => Ok(Profile::Default),
            other => {
                // custom:L=5,N=512
                if let Some(args) = other.strip_prefix("custom:") {
                    let mut l = None;
                    let mut n = None;
                    for part in args.split(',') {
                        if let Some(v) = part.strip_prefix("L=") {
                            l = v.parse::<f64>().ok();
                        } else if let Some(v) = part.strip_prefix("N=") {
                            n = v.parse::<usize>().ok();
                        }
                    }
                    if let (Some(l), Some(n)) = (l, n) {
                        return Ok(Profile::Custom { l, n });
                    }
                }
                Err(Error::InvalidParameter(format!(
                    "unknown profile '{other}' (use fast, default, or custom:L=<v>,N=<v>)"
                )))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Profile::Fast => "fast".into(),
            Profile::Default => "default".into(),
            Profile::Custom { l, n } => format!("custom:L={l},N={n}"),
        }
    }

    pub fn grid_parameters(&self) -> (f64, usize) {
        match self {
            Profile::Fast => (4.0, 256),
            Profile::Default => (6.0, 1024),
            Profile::Custom { l, n } => (*l, *n),
        }
    }

    pub fn make_grid(&self) -> Result<Arc<LogGrid>> {
        let (l, n) = self.grid_parameters();
        make_log_grid(l, n)
    }
}

/// Named tolerances with their defaults; any entry is overridable from the
/// command line via `--tol name=value`.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    let mut t = BTreeMap::new();
    t.insert("nullspace".into(), 1e-8);
    t.insert("tail".into(), 1e-10);
    t.insert("involution".into(), 2e-6);
    t.insert("detection_threshold".into(), 5e-3);
    t.insert("zero_match".into(), 5e-2);
    t.insert("route_agreement".into(), 1e-6);
    t.insert("principal_angle".into(), 1e-3);
    t.insert("containment".into(), 1e-4);
    t
}

/// The runtime configuration shared by all CLI commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: Profile,
    pub lambda: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            profile: Profile::Default,
            lambda: 2.0,
            tolerances: default_tolerances(),
            output_dir: PathBuf::from("out"),
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn tol(&self, name: &str) -> f64 {
        *self
            .tolerances
            .get(name)
            .unwrap_or_else(|| panic!("unknown tolerance '{name}'"))
    }

    /// Apply `name=value` overrides.
    pub fn apply_tol_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let (name, value) = item.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("--tol expects name=value, got '{item}'"))
            })?;
            let value: f64 = value.parse().map_err(|_| {
                Error::InvalidParameter(format!("bad tolerance value in '{item}'"))
            })?;
            if !(value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance '{name}' must be strictly positive"
                )));
            }
            self.tolerances.insert(name.to_string(), value);
        }
        Ok(())
    }

    pub fn space_options(&self) -> crate::spaces::SpaceOptions {
        crate::spaces::SpaceOptions {
            nullspace_tol: self.tol("nullspace"),
            certify: true,
            tail_log: 3.0,
            tail_tol: self.tol("tail"),
            involution_tol: self.tol("involution"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_parsing() {
        assert_eq!(Profile::parse("fast").unwrap(), Profile::Fast);
        assert_eq!(Profile::parse("default").unwrap(), Profile::Default);
        assert_eq!(
            Profile::parse("custom:L=5,N=512").unwrap(),
            Profile::Custom { l: 5.0, n: 512 }
        );
        assert!(Profile::parse("huge").is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_tol_overrides(&["nullspace=1e-9".into()]).unwrap();
        assert_eq!(cfg.tol("nullspace"), 1e-9);
        assert!(cfg.apply_tol_overrides(&["bad".into()]).is_err());
        assert!(cfg.apply_tol_overrides(&["nullspace=-1".into()]).is_err());
    }
}
