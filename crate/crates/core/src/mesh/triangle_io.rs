//! Reader and writer for Triangle `.node` / `.ele` files.
//!
//! Records are whitespace separated, `#` starts a comment. Indices may be 0-
//! or 1-based; the base is taken from the first `.node` record.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{Mesh, MeshError, Point};

struct Records {
    path: PathBuf,
    /// `(1-based line number, fields)`
    lines: Vec<(usize, Vec<String>)>,
}

impl Records {
    fn read(path: &Path) -> Result<Self, MeshError> {
        let text = fs::read_to_string(path).map_err(|source| MeshError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::from_text(path, &text))
    }

    fn from_text(path: &Path, text: &str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(k, line)| {
                let content = line.split('#').next().unwrap_or("");
                let fields: Vec<String> = content.split_whitespace().map(str::to_owned).collect();
                (!fields.is_empty()).then_some((k + 1, fields))
            })
            .collect();
        Self {
            path: path.to_path_buf(),
            lines,
        }
    }

    fn error(&self, line: usize, message: impl Into<String>) -> MeshError {
        MeshError::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn parse<T: std::str::FromStr>(
        &self,
        line: usize,
        field: &str,
        what: &str,
    ) -> Result<T, MeshError> {
        field
            .parse()
            .map_err(|_| self.error(line, format!("cannot parse {what} from '{field}'")))
    }
}

/// Loads a triangulation from a Triangle `.node` / `.ele` pair.
pub fn load_mesh(node_file: &Path, ele_file: &Path) -> Result<Mesh, MeshError> {
    build(Records::read(node_file)?, Records::read(ele_file)?)
}

/// Parses a `.node` / `.ele` pair held in memory. Errors name the files as
/// `<node>` and `<ele>`.
pub fn parse_mesh(node_text: &str, ele_text: &str) -> Result<Mesh, MeshError> {
    build(
        Records::from_text(Path::new("<node>"), node_text),
        Records::from_text(Path::new("<ele>"), ele_text),
    )
}

/// The bundled first-level unstructured Delaunay mesh of the unit square
/// (513 vertices, 80 on the boundary, 944 triangles).
pub fn unstructured_unit_square() -> Mesh {
    parse_mesh(
        include_str!("../../data/square_l1.node"),
        include_str!("../../data/square_l1.ele"),
    )
    .expect("bundled mesh is valid")
}

fn build(nodes: Records, eles: Records) -> Result<Mesh, MeshError> {
    let (node_file, ele_file) = (nodes.path.clone(), eles.path.clone());
    let (&(hline, ref header), body) = nodes
        .lines
        .split_first()
        .ok_or_else(|| nodes.error(1, "missing header"))?;
    if header.len() < 2 {
        return Err(nodes.error(
            hline,
            "header must be '<#vertices> 2 <#attributes> <#markers>'",
        ));
    }
    let count: usize = nodes.parse(hline, &header[0], "vertex count")?;
    let dim: usize = nodes.parse(hline, &header[1], "dimension")?;
    if dim != 2 {
        return Err(nodes.error(hline, format!("dimension must be 2, got {dim}")));
    }
    if body.len() < count {
        return Err(nodes.error(
            body.last().map_or(hline, |l| l.0),
            format!("expected {count} vertex records, found {}", body.len()),
        ));
    }
    let mut base = 0;
    let mut vertices: Vec<Point> = Vec::with_capacity(count);
    let mut vertex_lines = Vec::with_capacity(count);
    for (k, (line, fields)) in body.iter().take(count).enumerate() {
        if fields.len() < 3 {
            return Err(nodes.error(*line, "vertex record needs 'index x y'"));
        }
        let index: usize = nodes.parse(*line, &fields[0], "vertex index")?;
        if k == 0 {
            if index > 1 {
                return Err(nodes.error(*line, "first vertex index must be 0 or 1"));
            }
            base = index;
        }
        if index != k + base {
            return Err(nodes.error(
                *line,
                format!("expected vertex index {}, got {index}", k + base),
            ));
        }
        let x: f64 = nodes.parse(*line, &fields[1], "x coordinate")?;
        let y: f64 = nodes.parse(*line, &fields[2], "y coordinate")?;
        vertices.push([x, y]);
        vertex_lines.push(*line);
    }

    let (&(hline, ref header), body) = eles
        .lines
        .split_first()
        .ok_or_else(|| eles.error(1, "missing header"))?;
    if header.len() < 2 {
        return Err(eles.error(hline, "header must be '<#triangles> 3 <#attributes>'"));
    }
    let ntri: usize = eles.parse(hline, &header[0], "triangle count")?;
    let per: usize = eles.parse(hline, &header[1], "nodes per triangle")?;
    if per != 3 {
        return Err(eles.error(
            hline,
            format!("only 3-node triangles are supported, got {per}"),
        ));
    }
    if body.len() < ntri {
        return Err(eles.error(
            body.last().map_or(hline, |l| l.0),
            format!("expected {ntri} triangle records, found {}", body.len()),
        ));
    }
    let mut triangles = Vec::with_capacity(ntri);
    let mut triangle_lines = Vec::with_capacity(ntri);
    for (line, fields) in body.iter().take(ntri) {
        if fields.len() < 4 {
            return Err(eles.error(*line, "triangle record needs 'index v1 v2 v3'"));
        }
        let mut tri = [0usize; 3];
        for (slot, field) in tri.iter_mut().zip(&fields[1..4]) {
            let v: usize = eles.parse(*line, field, "vertex index")?;
            if v < base || v - base >= count {
                return Err(eles.error(
                    *line,
                    format!(
                        "vertex index {v} out of range ({} vertices, base {base})",
                        count
                    ),
                ));
            }
            *slot = v - base;
        }
        triangles.push(tri);
        triangle_lines.push(*line);
    }

    Mesh::new(vertices, triangles).map_err(|err| {
        let (path, line) = match &err {
            MeshError::VertexOutOfRange { triangle, .. }
            | MeshError::DegenerateTriangle { triangle }
            | MeshError::InvertedTriangle { triangle, .. }
            | MeshError::NonManifoldEdge { triangle, .. } => (&ele_file, triangle_lines[*triangle]),
            MeshError::HangingNode { vertex, .. } | MeshError::OpenBoundary { vertex } => {
                (&node_file, vertex_lines[*vertex])
            }
            _ => return err,
        };
        MeshError::AtLine {
            path: path.clone(),
            line,
            source: Box::new(err),
        }
    })
}

/// Writes `<base>.node` and `<base>.ele` with 1-based indices.
pub fn save_mesh(mesh: &Mesh, base: &Path) -> Result<(), MeshError> {
    let write = |path: PathBuf, body: String| {
        fs::File::create(&path)
            .and_then(|mut f| f.write_all(body.as_bytes()))
            .map_err(|source| MeshError::Io { path, source })
    };
    let mut node = format!("{} 2 0 1\n", mesh.num_vertices());
    for (v, p) in mesh.vertices().iter().enumerate() {
        let marker = u8::from(mesh.is_boundary_vertex(v));
        node.push_str(&format!("{} {:?} {:?} {}\n", v + 1, p[0], p[1], marker));
    }
    let mut ele = format!("{} 3 0\n", mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        ele.push_str(&format!(
            "{} {} {} {}\n",
            t + 1,
            tri[0] + 1,
            tri[1] + 1,
            tri[2] + 1
        ));
    }
    write(base.with_extension("node"), node)?;
    write(base.with_extension("ele"), ele)
}
