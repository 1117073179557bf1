//! Cartesian error norms between surface vector fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::assembly::{map_cells, map_rule};
use crate::fem::field::{CartesianJet, SurfaceVectorField};
use crate::fem::quadrature::TriangleRule;
use crate::geometry::{surface_at, Chart};
use crate::mesh::TriMesh;

/// Which Sobolev norm each part of the field is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `H1` on the tangential part, `L2` on the normal part
    Membrane,
    /// `H1` on the tangential part, `H2` on the normal part
    Flexural,
    /// `H1` on both parts
    FlexuralH1,
}

impl NormKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Membrane => "H1xH1xL2",
            Self::Flexural => "H1xH1xH2",
            Self::FlexuralH1 => "H1xH1xH1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorm {
    pub absolute: f64,
    /// norm of the reference field
    pub reference: f64,
    pub relative: f64,
}

/// Squared pointwise integrand of the chosen norm.
pub fn pointwise_sq(j: &CartesianJet, kind: NormKind) -> Result<f64> {
    let mut s = j.tangential.norm_squared() + j.normal.norm_squared();
    for b in 0..2 {
        s += j.d_tangential[b].norm_squared();
        if kind != NormKind::Membrane {
            s += j.d_normal[b].norm_squared();
        }
    }
    if kind == NormKind::Flexural {
        let h = j.dd_normal.ok_or(Error::MissingSecondDerivatives)?;
        for row in &h {
            for v in row {
                s += v.norm_squared();
            }
        }
    }
    Ok(s)
}

fn difference(a: &CartesianJet, b: &CartesianJet) -> CartesianJet {
    CartesianJet {
        tangential: a.tangential - b.tangential,
        d_tangential: [
            a.d_tangential[0] - b.d_tangential[0],
            a.d_tangential[1] - b.d_tangential[1],
        ],
        normal: a.normal - b.normal,
        d_normal: [a.d_normal[0] - b.d_normal[0], a.d_normal[1] - b.d_normal[1]],
        dd_normal: match (a.dd_normal, b.dd_normal) {
            (Some(x), Some(y)) => Some([
                [x[0][0] - y[0][0], x[0][1] - y[0][1]],
                [x[1][0] - y[1][0], x[1][1] - y[1][1]],
            ]),
            _ => None,
        },
    }
}

/// True when every triangle of `fine` lies inside one triangle of `coarse`.
pub fn is_nested(fine: &TriMesh, coarse: &TriMesh) -> bool {
    if fine == coarse {
        return true;
    }
    match (&fine.grid, &coarse.grid) {
        (Some(f), Some(c)) => {
            // equal refinement factors keep the cell diagonals aligned
            f.rect == c.rect && f.n1 % c.n1 == 0 && f.n2 % c.n2 == 0 && f.n1 / c.n1 == f.n2 / c.n2
        }
        _ => false,
    }
}

/// Picks the finer mesh of the two and checks that the other one is nested
/// in it.
fn integration_mesh<'a>(a: &'a TriMesh, b: &'a TriMesh) -> Result<&'a TriMesh> {
    let (fine, coarse) = if a.triangles.len() >= b.triangles.len() {
        (a, b)
    } else {
        (b, a)
    };
    if !is_nested(fine, coarse) {
        return Err(Error::MeshMismatch(format!(
            "meshes with {} and {} triangles are not nested",
            fine.triangles.len(),
            coarse.triangles.len()
        )));
    }
    Ok(fine)
}

/// `|a - b|` and `|b|` in the chosen norm, integrated over the parameter
/// domain on the finer of the two meshes, each triangle split at its
/// centroid so piecewise-polynomial C1 fields are integrated per piece.
pub fn error_norms(
    a: &dyn SurfaceVectorField,
    b: &dyn SurfaceVectorField,
    chart: &dyn Chart,
    kind: NormKind,
    rule: &TriangleRule,
) -> Result<ErrorNorm> {
    let mesh = integration_mesh(a.mesh(), b.mesh())?;
    let cells = map_cells(mesh.triangles.len(), |t| {
        let p = mesh.corners(t);
        let c = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
        let (mut diff, mut refr) = (0.0, 0.0);
        for k in 0..3 {
            for (y, w) in map_rule([p[k], p[(k + 1) % 3], c], rule) {
                let geom = surface_at(chart, y)?;
                let ja = a.cartesian(&geom)?;
                let jb = b.cartesian(&geom)?;
                diff += w * pointwise_sq(&difference(&ja, &jb), kind)?;
                refr += w * pointwise_sq(&jb, kind)?;
            }
        }
        Ok((diff, refr))
    })?;
    let (mut diff, mut refr) = (0.0, 0.0);
    for (d, r) in cells {
        diff += d;
        refr += r;
    }
    let absolute = diff.sqrt();
    let reference = refr.sqrt();
    Ok(ErrorNorm {
        absolute,
        reference,
        relative: if reference > 0.0 {
            absolute / reference
        } else {
            f64::NAN
        },
    })
}

/// Norm of a single field.
pub fn field_norm(a: &dyn SurfaceVectorField, chart: &dyn Chart, kind: NormKind, rule: &TriangleRule) -> Result<f64> {
    Ok(error_norms(&Zero(a.mesh()), a, chart, kind, rule)?.reference)
}

struct Zero<'a>(&'a TriMesh);

impl SurfaceVectorField for Zero<'_> {
    fn mesh(&self) -> &TriMesh {
        self.0
    }

    fn cartesian(&self, _: &crate::geometry::SurfaceGeometry) -> Result<CartesianJet> {
        Ok(CartesianJet {
            dd_normal: Some(Default::default()),
            ..Default::default()
        })
    }
}
