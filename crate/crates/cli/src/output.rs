use std::fmt::Write as _;
use std::path::Path;

use vvp_core::fe::{Continuity, DiscreteField, FieldValue};
use vvp_core::mesh::Mesh;
use vvp_core::verify::ConvergenceReport;

use crate::CliError;

pub const CSV_HEADER: &str = "dof,h,e_u,r_u,e_w,r_w,e_p,r_p";

/// Error table, one row per level. Rates are blank on the first row; a
/// partial study ends with `# partial: level L non-converged`, `L` counted
/// from zero.
pub fn format_csv(report: &ConvergenceReport) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for (i, level) in report.levels.iter().enumerate() {
        let e = level.errors.as_array();
        let r = if i == 0 { [None; 3] } else { report.rates[i - 1].map(Some) };
        let rate = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{:.2e},{:.2e},{},{:.2e},{},{:.2e},{}",
            level.dofs,
            level.h,
            e[0],
            rate(r[0]),
            e[1],
            rate(r[1]),
            e[2],
            rate(r[2])
        );
    }
    if let Some(level) = report.partial {
        let _ = writeln!(s, "# partial: level {level} non-converged");
    }
    s
}

pub fn write_csv(report: &ConvergenceReport, path: &Path) -> Result<(), CliError> {
    write_file(path, &format_csv(report))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Reference coordinates of the local vertices.
const CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Field values at mesh vertices. Continuous fields are read off any incident
/// cell; discontinuous ones are averaged over all incident cells.
fn vertex_samples(mesh: &Mesh, field: &DiscreteField) -> Result<Vec<[f64; 2]>, CliError> {
    let mut sum = vec![[0.0; 2]; mesh.n_vertices()];
    let mut count = vec![0usize; mesh.n_vertices()];
    let average = field.space().family().continuity() == Continuity::Discontinuous;
    for (cell, verts) in mesh.cells.iter().enumerate() {
        for (&v, xi) in verts.iter().zip(CORNERS) {
            if !average && count[v] > 0 {
                continue;
            }
            let value = match field.eval_cell(cell, xi)? {
                FieldValue::Scalar { value, .. } => [value, 0.0],
                FieldValue::Vector { value, .. } => value,
            };
            sum[v][0] += value[0];
            sum[v][1] += value[1];
            count[v] += 1;
        }
    }
    Ok(sum.iter().zip(&count).map(|(s, &c)| [s[0] / c as f64, s[1] / c as f64]).collect())
}

/// Legacy ASCII VTK unstructured grid with triangle cells and point data.
pub fn format_vtk(mesh: &Mesh, fields: &[(&str, &DiscreteField)]) -> Result<String, CliError> {
    for (name, f) in fields {
        if **f.space().mesh() != *mesh {
            return Err(vvp_core::Error::Usage(format!("field `{name}` lives on a different mesh")).into());
        }
    }
    let mut s = String::from("# vtk DataFile Version 3.0\nvvp solution\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.n_vertices());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?} 0.0", p[0], p[1]);
    }
    let n = mesh.n_cells();
    let _ = writeln!(s, "CELLS {n} {}", 4 * n);
    for c in &mesh.cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {n}");
    for _ in 0..n {
        s.push_str("5\n");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.n_vertices());
    }
    for (name, f) in fields {
        let values = vertex_samples(mesh, f)?;
        if f.space().is_vector() {
            let _ = writeln!(s, "VECTORS {name} double");
            for v in values {
                let _ = writeln!(s, "{:?} {:?} 0.0", v[0], v[1]);
            }
        } else {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for v in values {
                let _ = writeln!(s, "{:?}", v[0]);
            }
        }
    }
    Ok(s)
}

pub fn write_vtk(mesh: &Mesh, fields: &[(&str, &DiscreteField)], path: &Path) -> Result<(), CliError> {
    write_file(path, &format_vtk(mesh, fields)?)
}
