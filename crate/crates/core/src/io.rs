//! VTK legacy (2.0, ASCII) output of nodal fields.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::mesh::Mesh;

/// Writes `mesh` as an `UNSTRUCTURED_GRID` of triangles with one scalar
/// `POINT_DATA` array per entry of `fields`.
pub fn write_vtk<W: Write>(
    mut out: W,
    title: &str,
    mesh: &Mesh,
    fields: &[(&str, &[f64])],
) -> io::Result<()> {
    let n = mesh.num_vertices();
    let nt = mesh.num_triangles();
    writeln!(out, "# vtk DataFile Version 2.0")?;
    // the title line is limited to one line of at most 256 characters
    let title: String = title
        .lines()
        .next()
        .unwrap_or("")
        .chars()
        .take(255)
        .collect();
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {n} double")?;
    for p in mesh.vertices() {
        writeln!(out, "{:?} {:?} 0", p[0], p[1])?;
    }
    writeln!(out, "CELLS {nt} {}", 4 * nt)?;
    for [a, b, c] in mesh.triangles() {
        writeln!(out, "3 {a} {b} {c}")?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "5")?;
    }
    writeln!(out, "POINT_DATA {n}")?;
    for (name, values) in fields {
        if values.len() != n {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("field '{name}' has {} values for {n} points", values.len()),
            ));
        }
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in *values {
            writeln!(out, "{v:?}")?;
        }
    }
    out.flush()
}

pub fn write_vtk_file(
    path: &Path,
    title: &str,
    mesh: &Mesh,
    fields: &[(&str, &[f64])],
) -> io::Result<()> {
    write_vtk(BufWriter::new(fs::File::create(path)?), title, mesh, fields)
}
