//! Run configuration: a TOML file whose values are overridden by flags.

use std::path::{Path, PathBuf};

use koiter::experiments::{case_by_name, ShellCase, ShellKind};
use koiter::geometry::BuiltinChart;
use koiter::solver::{MethodChoice, SolverSettings, ITERATIVE_TOL};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshOverride {
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub n1_3d: Option<usize>,
    pub n2_3d: Option<usize>,
    pub layers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    ITERATIVE_TOL
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: MethodChoice::Auto,
            tol: ITERATIVE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportConfig {
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default)]
    pub vtk: bool,
}

fn yes() -> bool {
    true
}

impl Default for ExportConfig {
    fn default() -> Self {
        Self { csv: true, vtk: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// name of a built-in case
    pub case: Option<String>,
    /// a fully specified case, used instead of `case`
    pub case_override: Option<ShellCase>,
    /// chart for `geometry-check` when no case is given
    pub chart: Option<BuiltinChart>,
    pub out: Option<PathBuf>,
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub mesh: MeshOverride,
    #[serde(default)]
    pub solver: SolverConfig,
    pub penalty: Option<f64>,
    #[serde(default)]
    pub export: ExportConfig,
    #[serde(default)]
    pub seed: u64,
    /// skip the 3D model
    #[serde(default)]
    pub surface_only: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        // toml errors carry line, column and key context
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            method: self.solver.method,
            tol: self.solver.tol,
        }
    }

    /// Cases selected by the configuration, or `default` names when none
    /// is given, with the overrides applied.
    pub fn cases(&self, default: &[&str]) -> Result<Vec<ShellCase>, ConfigError> {
        let base: Vec<ShellCase> = if let Some(c) = &self.case_override {
            vec![c.clone()]
        } else if let Some(name) = &self.case {
            vec![lookup(name)?]
        } else {
            default.iter().map(|n| lookup(n)).collect::<Result<_, _>>()?
        };
        Ok(base.into_iter().map(|c| self.apply(c)).collect())
    }

    fn apply(&self, mut case: ShellCase) -> ShellCase {
        if let Some(eps) = &self.eps {
            case.eps_list = eps.clone();
        }
        let m = &self.mesh;
        let r = &mut case.mesh;
        r.n1 = m.n1.unwrap_or(r.n1);
        r.n2 = m.n2.unwrap_or(r.n2);
        r.n1_3d = m.n1_3d.unwrap_or(r.n1_3d);
        r.n2_3d = m.n2_3d.unwrap_or(r.n2_3d);
        r.layers = m.layers.unwrap_or(r.layers);
        // only the flexural limit has a penalty
        if self.penalty.is_some() && case.kind == ShellKind::Flexural {
            case.penalty = self.penalty;
        }
        case
    }
}

fn lookup(name: &str) -> Result<ShellCase, ConfigError> {
    case_by_name(name).ok_or_else(|| {
        ConfigError::Invalid(format!(
            "unknown case {name:?}; built-in cases are elliptic, generalized and flexural"
        ))
    })
}

/// Parses `n1,n2,layers` or `n1,n2,n1_3d,n2_3d,layers`. With three values
/// the 3D base mesh is half the surface mesh, as in the defaults.
pub fn parse_mesh(text: &str) -> Result<MeshOverride, ConfigError> {
    let v: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| ConfigError::Invalid(format!("--mesh expects comma-separated integers, got {text:?}")))?;
    match v[..] {
        [n1, n2, layers] => Ok(MeshOverride {
            n1: Some(n1),
            n2: Some(n2),
            n1_3d: Some((n1 / 2).max(1)),
            n2_3d: Some((n2 / 2).max(1)),
            layers: Some(layers),
        }),
        [n1, n2, n1_3d, n2_3d, layers] => Ok(MeshOverride {
            n1: Some(n1),
            n2: Some(n2),
            n1_3d: Some(n1_3d),
            n2_3d: Some(n2_3d),
            layers: Some(layers),
        }),
        _ => Err(ConfigError::Invalid(format!(
            "--mesh expects n1,n2,layers or n1,n2,n1_3d,n2_3d,layers, got {text:?}"
        ))),
    }
}

pub fn parse_eps(text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError::Invalid(format!("--eps expects comma-separated numbers, got {text:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("case = \"elliptic\"\nbogus = 1\n", Path::new("c.toml")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn overrides_apply() {
        let cfg = RunConfig::from_toml(
            "case = \"flexural\"\neps = [0.1]\npenalty = 1e8\n[mesh]\nn1 = 8\n",
            Path::new("c.toml"),
        )
        .unwrap();
        let c = &cfg.cases(&[]).unwrap()[0];
        assert_eq!(c.eps_list, vec![0.1]);
        assert_eq!(c.penalty, Some(1e8));
        assert_eq!(c.mesh.n1, 8);
        assert_eq!(c.mesh.n2, 32);
    }

    #[test]
    fn mesh_flag_forms() {
        let m = parse_mesh("16,16,2").unwrap();
        assert_eq!((m.n1_3d, m.layers), (Some(8), Some(2)));
        assert!(parse_mesh("1,2").is_err());
        assert!(parse_mesh("a,b,c").is_err());
    }

    #[test]
    fn unknown_case_is_a_config_error() {
        let cfg = RunConfig {
            case: Some("sphere".into()),
            ..Default::default()
        };
        assert!(matches!(cfg.cases(&[]), Err(ConfigError::Invalid(_))));
    }
}
