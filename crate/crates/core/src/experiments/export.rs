//! CSV result tables and legacy VTK surface exports.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::field::SurfaceVectorField;
use crate::geometry::{surface_at, Chart, Vec3};
use crate::mesh::TriMesh;

use super::ResultRow;

pub const CSV_HEADER: [&str; 18] = [
    "case",
    "eps",
    "err_lk",
    "err_3dk",
    "err_3dl",
    "abs_lk",
    "abs_3dk",
    "abs_3dl",
    "norm_lk",
    "norm_3d",
    "koiter_dofs",
    "volume_dofs",
    "limit_dofs",
    "membrane_fraction",
    "residual_koiter",
    "residual_3d",
    "residual_limit",
    "status",
];

/// Marker for values that do not apply to a case.
pub const NOT_APPLICABLE: &str = "n/a";

fn num(v: f64) -> String {
    // 17 significant digits round-trip every f64
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NOT_APPLICABLE.to_string(), num)
}

fn opt_str(v: &Option<String>) -> String {
    v.clone().unwrap_or_else(|| NOT_APPLICABLE.to_string())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

pub fn export_table(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.case.clone(),
            num(r.eps),
            opt(r.err_lk),
            opt(r.err_3dk),
            opt(r.err_3dl),
            opt(r.abs_lk),
            opt(r.abs_3dk),
            opt(r.abs_3dl),
            opt_str(&r.norm_lk),
            opt_str(&r.norm_3d),
            r.koiter_dofs.to_string(),
            r.volume_dofs.to_string(),
            r.limit_dofs
                .map_or_else(|| NOT_APPLICABLE.to_string(), |d| d.to_string()),
            opt(r.membrane_fraction),
            opt(r.residual_koiter),
            opt(r.residual_3d),
            opt(r.residual_limit),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Config(format!("csv: bad number {s:?}")))
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s == NOT_APPLICABLE {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Config(format!("csv: bad count {s:?}")))
}

/// Reads a table written by [`export_table`]. Wall times are not stored and
/// come back as zero.
pub fn parse_table(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Config("csv: unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let f = |i: usize| rec.get(i).unwrap_or_default();
        let s = |i: usize| {
            if f(i) == NOT_APPLICABLE {
                None
            } else {
                Some(f(i).to_string())
            }
        };
        rows.push(ResultRow {
            case: f(0).to_string(),
            eps: parse_f64(f(1))?,
            err_lk: parse_opt(f(2))?,
            err_3dk: parse_opt(f(3))?,
            err_3dl: parse_opt(f(4))?,
            abs_lk: parse_opt(f(5))?,
            abs_3dk: parse_opt(f(6))?,
            abs_3dl: parse_opt(f(7))?,
            norm_lk: s(8),
            norm_3d: s(9),
            koiter_dofs: parse_usize(f(10))?,
            volume_dofs: parse_usize(f(11))?,
            limit_dofs: if f(12) == NOT_APPLICABLE {
                None
            } else {
                Some(parse_usize(f(12))?)
            },
            membrane_fraction: parse_opt(f(13))?,
            residual_koiter: parse_opt(f(14))?,
            residual_3d: parse_opt(f(15))?,
            residual_limit: parse_opt(f(16))?,
            status: f(17).to_string(),
            wall_seconds: 0.0,
        });
    }
    Ok(rows)
}

/// Cartesian displacement of a field at the vertices of its mesh.
pub fn vertex_displacements(field: &dyn SurfaceVectorField, chart: &dyn Chart) -> Result<Vec<Vec3>> {
    field
        .mesh()
        .vertices
        .iter()
        .map(|&y| Ok(field.cartesian(&surface_at(chart, y)?)?.value()))
        .collect()
}

/// Legacy ASCII VTK unstructured grid of the deformed surface
/// `theta(y) + u(y)` with `u` attached as point vectors.
pub fn export_vtk(mesh: &TriMesh, chart: &dyn Chart, displacement: &[Vec3], title: &str) -> Result<String> {
    if displacement.len() != mesh.vertices.len() {
        return Err(Error::MeshMismatch(format!(
            "{} displacement values for {} vertices",
            displacement.len(),
            mesh.vertices.len()
        )));
    }
    let mut s = String::new();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(
        s,
        "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID"
    );
    let _ = writeln!(s, "POINTS {} double", mesh.vertices.len());
    for (&y, u) in mesh.vertices.iter().zip(displacement) {
        let p = chart.point(y) + u;
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    let nt = mesh.triangles.len();
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {}\nVECTORS displacement double", mesh.vertices.len());
    for u in displacement {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", u.x, u.y, u.z);
    }
    Ok(s)
}

/// Exports a surface field on its own mesh.
pub fn export_field_vtk(field: &dyn SurfaceVectorField, chart: &dyn Chart, title: &str) -> Result<String> {
    let u = vertex_displacements(field, chart)?;
    export_vtk(field.mesh(), chart, &u, title)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BuiltinChart;
    use crate::mesh::{structured_tri, BoundarySpec};

    fn row() -> ResultRow {
        ResultRow {
            case: "x".into(),
            eps: 0.1,
            err_lk: Some(1.0 / 3.0),
            err_3dk: None,
            err_3dl: Some(f64::MIN_POSITIVE),
            abs_lk: Some(2.5e-300),
            abs_3dk: None,
            abs_3dl: Some(7.0),
            norm_lk: Some("H1xH1xL2".into()),
            norm_3d: None,
            koiter_dofs: 10,
            volume_dofs: 20,
            limit_dofs: None,
            membrane_fraction: Some(0.999),
            residual_koiter: Some(1e-14),
            residual_3d: None,
            residual_limit: None,
            status: "a, \"quoted\" status".into(),
            wall_seconds: 0.0,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let s = export_table(&[]).unwrap();
        assert_eq!(s.lines().count(), 1);
        assert!(s.starts_with("case,eps,err_lk"));
    }

    #[test]
    fn table_round_trips() {
        let rows = vec![row(), ResultRow { eps: 1e-8, ..row() }];
        let s = export_table(&rows).unwrap();
        assert_eq!(parse_table(&s).unwrap(), rows);
    }

    #[test]
    fn two_triangle_vtk() {
        let chart = BuiltinChart::plane();
        let mesh = structured_tri(chart_rect(&chart), 1, 1, BoundarySpec::EntireBoundary).unwrap();
        let u = vec![Vec3::new(0.0, 0.0, 1.0); 4];
        let s = export_vtk(&mesh, &chart, &u, "t").unwrap();
        assert!(s.contains("POINTS 4 double"));
        assert!(s.contains("CELLS 2 8"));
        assert_eq!(s.matches("VECTORS").count(), 1);
        assert!(export_vtk(&mesh, &chart, &u[..3], "t").is_err());
    }

    fn chart_rect(c: &BuiltinChart) -> crate::geometry::ParamRect {
        c.rect()
    }
}
