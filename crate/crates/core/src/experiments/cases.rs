//! Definitions of the three shell experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BuiltinChart;
use crate::kinematics::Lame;
use crate::mesh::{BoundarySpec, Side};

/// Which thin-shell regime the case exercises; decides the limit problem
/// and the norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellKind {
    EllipticMembrane,
    GeneralizedMembrane,
    Flexural,
}

/// How the physical forces depend on the thickness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceScaling {
    /// `f^{i,eps} = f^i`, `h^{i,eps} = eps h^i`
    MembraneData,
    /// `f^{i,eps} = eps^2 f^i`, `h^{i,eps} = eps^3 h^i`
    FlexuralData,
}

impl ForceScaling {
    /// Physical body force `f^{i,eps}`.
    pub fn body_force(self, f: [f64; 3], eps: f64) -> [f64; 3] {
        match self {
            Self::MembraneData => f,
            Self::FlexuralData => f.map(|v| eps * eps * v),
        }
    }

    /// Physical surface force `h^{i,eps}`.
    pub fn surface_force(self, h: [f64; 3], eps: f64) -> [f64; 3] {
        match self {
            Self::MembraneData => h.map(|v| eps * v),
            Self::FlexuralData => h.map(|v| eps * eps * eps * v),
        }
    }

    /// Factor between the limit load `p^i` and the Koiter load `p^{i,eps}`.
    pub fn koiter_load_factor(self, eps: f64) -> f64 {
        match self {
            Self::MembraneData => eps,
            Self::FlexuralData => eps * eps * eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshResolution {
    /// surface meshes (Koiter and limit problems)
    pub n1: usize,
    pub n2: usize,
    /// base mesh of the 3D problem
    pub n1_3d: usize,
    pub n2_3d: usize,
    pub layers: usize,
}

impl Default for MeshResolution {
    fn default() -> Self {
        Self {
            n1: 32,
            n2: 32,
            n1_3d: 16,
            n2_3d: 16,
            layers: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellCase {
    pub name: String,
    pub kind: ShellKind,
    pub chart: BuiltinChart,
    pub boundary: BoundarySpec,
    pub lame: Lame,
    #[serde(default)]
    pub young: Option<f64>,
    #[serde(default)]
    pub poisson: Option<f64>,
    /// `f^i`, constant covariant components
    pub body_force: [f64; 3],
    /// `h^i` on both faces
    #[serde(default)]
    pub surface_force: [f64; 3],
    pub scaling: ForceScaling,
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub mesh: MeshResolution,
    /// relative penalty of the flexural limit problem
    #[serde(default)]
    pub penalty: Option<f64>,
}

pub const DEFAULT_PENALTY: f64 = 1e6;

/// Tolerance on the Lame constants computed from `E` and `nu`.
pub const LAME_CONSISTENCY_TOL: f64 = 0.02;

impl ShellCase {
    pub fn validate(&self) -> Result<()> {
        self.lame.validate()?;
        if let (Some(e), Some(nu)) = (self.young, self.poisson) {
            let from = Lame::from_young_poisson(e, nu)?;
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            if rel(self.lame.lambda, from.lambda) > LAME_CONSISTENCY_TOL
                || rel(self.lame.mu, from.mu) > LAME_CONSISTENCY_TOL
            {
                return Err(Error::Config(format!(
                    "case {}: Lame constants ({}, {}) disagree with E = {e}, nu = {nu} ({}, {})",
                    self.name, self.lame.lambda, self.lame.mu, from.lambda, from.mu
                )));
            }
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(Error::Config(format!(
                "case {}: eps values must be positive",
                self.name
            )));
        }
        let m = &self.mesh;
        if m.n1 == 0 || m.n2 == 0 || m.n1_3d == 0 || m.n2_3d == 0 {
            return Err(Error::InvalidResolution {
                n1: m.n1.min(m.n1_3d),
                n2: m.n2.min(m.n2_3d),
            });
        }
        if m.layers < 2 || m.layers % 2 == 1 {
            return Err(Error::OddLayerCount(m.layers));
        }
        if let Some(p) = self.penalty {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidPenalty(p));
            }
        }
        Ok(())
    }

    pub fn penalty(&self) -> f64 {
        self.penalty.unwrap_or(DEFAULT_PENALTY)
    }

    /// Scaled limit load `p^i = int_{-1}^{1} f^i dx3 + h^i_+ + h^i_-`.
    pub fn limit_load(&self) -> [f64; 3] {
        std::array::from_fn(|i| 2.0 * (self.body_force[i] + self.surface_force[i]))
    }
}

pub fn elliptic_membrane() -> ShellCase {
    ShellCase {
        name: "elliptic".into(),
        kind: ShellKind::EllipticMembrane,
        chart: BuiltinChart::ellipsoid(),
        boundary: BoundarySpec::EntireBoundary,
        lame: Lame {
            lambda: 8.0e10,
            mu: 8.0e10,
        },
        young: Some(2.0e11),
        poisson: Some(0.25),
        body_force: [0.1; 3],
        surface_force: [0.0; 3],
        scaling: ForceScaling::MembraneData,
        eps_list: vec![8e-2, 4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4],
        mesh: MeshResolution::default(),
        penalty: None,
    }
}

pub fn generalized_membrane() -> ShellCase {
    ShellCase {
        name: "generalized".into(),
        kind: ShellKind::GeneralizedMembrane,
        chart: BuiltinChart::cylinder(),
        boundary: BoundarySpec::EdgeSet(vec![Side::Bottom]),
        lame: Lame {
            lambda: 1.68e7,
            mu: 1.86e6,
        },
        young: Some(5.4e6),
        poisson: Some(0.45),
        body_force: [2.0; 3],
        surface_force: [0.0; 3],
        scaling: ForceScaling::MembraneData,
        eps_list: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
        mesh: MeshResolution::default(),
        penalty: None,
    }
}

pub fn flexural() -> ShellCase {
    ShellCase {
        name: "flexural".into(),
        kind: ShellKind::Flexural,
        chart: BuiltinChart::cone(),
        boundary: BoundarySpec::EdgeSet(vec![Side::Left]),
        lame: Lame {
            lambda: 1.68e7,
            mu: 1.86e6,
        },
        young: Some(5.4e6),
        poisson: Some(0.45),
        body_force: [80.0; 3],
        surface_force: [0.0; 3],
        scaling: ForceScaling::FlexuralData,
        eps_list: vec![5.02655e-1, 5.02655e-2, 5.02655e-3, 5.02655e-4, 5.02655e-5, 5.02655e-6],
        mesh: MeshResolution::default(),
        penalty: Some(DEFAULT_PENALTY),
    }
}

pub fn builtin_cases() -> Vec<ShellCase> {
    vec![elliptic_membrane(), generalized_membrane(), flexural()]
}

pub fn case_by_name(name: &str) -> Option<ShellCase> {
    builtin_cases().into_iter().find(|c| c.name == name)
}
