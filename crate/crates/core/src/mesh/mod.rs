//! Conforming triangulations: construction, validation, topology queries,
//! refinement, and recovery patches.

mod patch;
mod refine;
mod triangle_io;

use std::collections::HashMap;
use std::path::PathBuf;

use thiserror::Error;

pub use patch::{build_patch, Patch};
pub use refine::{uniform_refine, uniform_refine_with_parents, MeshLadder, Refinement};
pub use triangle_io::{load_mesh, parse_mesh, save_mesh, unstructured_unit_square};

pub type Point = [f64; 2];

/// Two boundary normals closer than this (in `1 − n₁·n₂`) belong to a
/// straight piece of boundary.
const CORNER_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("uniform mesh needs at least 2 subdivisions, got {0}")]
    TooFewSubdivisions(usize),
    #[error("invalid domain: lower corner {lower:?} is not below-left of {upper:?}")]
    InvalidDomain { lower: Point, upper: Point },
    #[error("triangle {triangle} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        count: usize,
    },
    #[error("triangle {triangle} repeats a vertex")]
    DegenerateTriangle { triangle: usize },
    #[error("triangle {triangle} has non-positive signed area {area:e} (inverted or degenerate)")]
    InvertedTriangle { triangle: usize, area: f64 },
    #[error("edge ({}, {}) is shared by {count} triangles", edge[0], edge[1])]
    NonManifoldEdge {
        edge: [usize; 2],
        count: usize,
        triangle: usize,
    },
    #[error("hanging node: vertex {vertex} lies inside boundary edge ({}, {})", edge[0], edge[1])]
    HangingNode { vertex: usize, edge: [usize; 2] },
    #[error("boundary is not a set of closed loops at vertex {vertex}")]
    OpenBoundary { vertex: usize },
    #[error("mesh has no triangles")]
    Empty,
    #[error("vertex {vertex} is out of range")]
    NoSuchVertex { vertex: usize },
    #[error(
        "patch around vertex {vertex} covers the whole mesh without satisfying the rank condition"
    )]
    PatchExhausted { vertex: usize },
    #[error("mesh is not a regular-pattern uniform mesh")]
    NotUniform,
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: {source}")]
    AtLine {
        path: PathBuf,
        line: usize,
        #[source]
        source: Box<MeshError>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A boundary edge oriented with the domain on its left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    /// Outward unit normal.
    pub normal: Point,
    pub length: f64,
    pub triangle: usize,
}

/// Grid bookkeeping for a regular-pattern uniform mesh: `m × m` cells, each
/// split by its lower-left to upper-right diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid {
    m: usize,
    lower: Point,
    upper: Point,
    /// `(i, j)` of each vertex.
    coords: Vec<[usize; 2]>,
    /// Vertex at `j·(m+1) + i`.
    index: Vec<usize>,
}

impl UniformGrid {
    fn new(m: usize, lower: Point, upper: Point, coords: Vec<[usize; 2]>) -> Self {
        let mut index = vec![usize::MAX; (m + 1) * (m + 1)];
        for (v, &[i, j]) in coords.iter().enumerate() {
            index[j * (m + 1) + i] = v;
        }
        debug_assert!(index.iter().all(|&v| v != usize::MAX));
        Self {
            m,
            lower,
            upper,
            coords,
            index,
        }
    }

    pub fn subdivisions(&self) -> usize {
        self.m
    }

    pub fn lower(&self) -> Point {
        self.lower
    }

    pub fn upper(&self) -> Point {
        self.upper
    }

    /// Cell widths `[hx, hy]`.
    pub fn spacing(&self) -> [f64; 2] {
        let m = self.m as f64;
        [
            (self.upper[0] - self.lower[0]) / m,
            (self.upper[1] - self.lower[1]) / m,
        ]
    }

    pub fn coords(&self, vertex: usize) -> [usize; 2] {
        self.coords[vertex]
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        self.index[j * (self.m + 1) + i]
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    /// Sorted vertex pairs.
    edges: Vec<[usize; 2]>,
    /// Triangles on either side of each edge.
    edge_triangles: Vec<[Option<usize>; 2]>,
    /// `triangle_edges[t][k]` is the edge opposite local vertex `k`.
    triangle_edges: Vec<[usize; 3]>,
    vertex_triangles: Vec<Vec<usize>>,
    boundary_edges: Vec<BoundaryEdge>,
    /// Indices into `boundary_edges` touching each vertex.
    vertex_boundary_edges: Vec<Vec<usize>>,
    grid: Option<UniformGrid>,
}

impl Mesh {
    /// Validates and builds the topology of a triangulation with
    /// counter-clockwise triangles.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        Self::with_grid(vertices, triangles, None)
    }

    pub(crate) fn with_grid(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        grid: Option<UniformGrid>,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(MeshError::VertexOutOfRange {
                        triangle: t,
                        vertex: v,
                        count: nv,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area.is_nan() || area <= 0.0 {
                return Err(MeshError::InvertedTriangle { triangle: t, area });
            }
        }

        let mut edge_map: HashMap<[usize; 2], usize> =
            HashMap::with_capacity(3 * triangles.len() / 2 + nv);
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<[Option<usize>; 2]> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0; 3];
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *edge_map.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_triangles.push([None, None]);
                    edges.len() - 1
                });
                match edge_triangles[e] {
                    [None, _] => edge_triangles[e][0] = Some(t),
                    [Some(_), None] => edge_triangles[e][1] = Some(t),
                    [Some(_), Some(_)] => {
                        return Err(MeshError::NonManifoldEdge {
                            edge: key,
                            count: 3,
                            triangle: t,
                        })
                    }
                }
                local[k] = e;
            }
            triangle_edges.push(local);
        }

        let mut vertex_triangles = vec![Vec::new(); nv];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }

        let mut boundary_edges = Vec::new();
        for (e, sides) in edge_triangles.iter().enumerate() {
            if let [Some(t), None] = *sides {
                let tri = triangles[t];
                let k = (0..3).find(|&k| triangle_edges[t][k] == e).unwrap();
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let (pa, pb) = (vertices[a], vertices[b]);
                let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
                let length = dx.hypot(dy);
                boundary_edges.push(BoundaryEdge {
                    vertices: [a, b],
                    normal: [dy / length, -dx / length],
                    length,
                    triangle: t,
                });
            }
        }
        let mut vertex_boundary_edges = vec![Vec::new(); nv];
        let mut out_degree = vec![0usize; nv];
        let mut in_degree = vec![0usize; nv];
        for (k, be) in boundary_edges.iter().enumerate() {
            vertex_boundary_edges[be.vertices[0]].push(k);
            vertex_boundary_edges[be.vertices[1]].push(k);
            out_degree[be.vertices[0]] += 1;
            in_degree[be.vertices[1]] += 1;
        }

        check_hanging_nodes(&vertices, &boundary_edges, &vertex_boundary_edges)?;
        for v in 0..nv {
            if out_degree[v] != in_degree[v] || out_degree[v] > 1 {
                return Err(MeshError::OpenBoundary { vertex: v });
            }
        }

        Ok(Self {
            vertices,
            triangles,
            edges,
            edge_triangles,
            triangle_edges,
            vertex_triangles,
            boundary_edges,
            vertex_boundary_edges,
            grid,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Edges of triangle `t`; entry `k` is opposite local vertex `k`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// The triangle across local edge `k` of `t`, if any.
    pub fn neighbor(&self, t: usize, k: usize) -> Option<usize> {
        let [a, b] = self.edge_triangles[self.triangle_edges[t][k]];
        if a == Some(t) {
            b
        } else {
            a
        }
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        !self.vertex_boundary_edges[v].is_empty()
    }

    /// Outward normals of the boundary edges at `v`; empty for interior vertices.
    pub fn boundary_normals(&self, v: usize) -> Vec<Point> {
        self.vertex_boundary_edges[v]
            .iter()
            .map(|&k| self.boundary_edges[k].normal)
            .collect()
    }

    /// A boundary vertex whose two boundary edges have distinct normals.
    pub fn is_corner(&self, v: usize) -> bool {
        match self.boundary_normals(v).as_slice() {
            [n1, n2] => 1.0 - (n1[0] * n2[0] + n1[1] * n2[1]) > CORNER_TOL,
            _ => false,
        }
    }

    /// Longest edge length.
    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| dist(self.vertices[a], self.vertices[b]))
            .fold(0.0, f64::max)
    }

    /// Grid spacing on uniform meshes, longest edge otherwise.
    pub fn mesh_size(&self) -> f64 {
        match &self.grid {
            Some(g) => {
                let [hx, hy] = g.spacing();
                hx.max(hy)
            }
            None => self.max_edge_length(),
        }
    }

    pub fn uniform_grid(&self) -> Option<&UniformGrid> {
        self.grid.as_ref()
    }

    pub fn is_uniform_regular(&self) -> bool {
        self.grid.is_some()
    }

    /// `[min, max]` corners of the bounding box.
    pub fn bounding_box(&self) -> [Point; 2] {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        [lo, hi]
    }
}

fn check_hanging_nodes(
    vertices: &[Point],
    boundary_edges: &[BoundaryEdge],
    vertex_boundary_edges: &[Vec<usize>],
) -> Result<(), MeshError> {
    let boundary_vertices: Vec<usize> = (0..vertices.len())
        .filter(|&v| !vertex_boundary_edges[v].is_empty())
        .collect();
    // sort boundary vertices by x to prune the segment tests
    let mut by_x = boundary_vertices.clone();
    by_x.sort_by(|&a, &b| vertices[a][0].total_cmp(&vertices[b][0]));
    let xs: Vec<f64> = by_x.iter().map(|&v| vertices[v][0]).collect();
    for be in boundary_edges {
        let [a, b] = be.vertices;
        let (pa, pb) = (vertices[a], vertices[b]);
        let eps = 1e-10 * be.length;
        let (x0, x1) = (pa[0].min(pb[0]) - eps, pa[0].max(pb[0]) + eps);
        let start = xs.partition_point(|&x| x < x0);
        for &v in by_x[start..].iter().take_while(|&&v| vertices[v][0] <= x1) {
            if v == a || v == b {
                continue;
            }
            let p = vertices[v];
            let cross = (pb[0] - pa[0]) * (p[1] - pa[1]) - (pb[1] - pa[1]) * (p[0] - pa[0]);
            if cross.abs() > eps * be.length {
                continue;
            }
            let t = ((p[0] - pa[0]) * (pb[0] - pa[0]) + (p[1] - pa[1]) * (pb[1] - pa[1]))
                / (be.length * be.length);
            if t > 1e-12 && t < 1.0 - 1e-12 {
                return Err(MeshError::HangingNode {
                    vertex: v,
                    edge: be.vertices,
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Regular-pattern uniform mesh of the unit square with `m × m` cells.
pub fn build_uniform_mesh(m: usize) -> Result<Mesh, MeshError> {
    build_uniform_mesh_on(m, [0.0, 0.0], [1.0, 1.0])
}

/// Regular-pattern uniform mesh of the rectangle `[lower, upper]`.
///
/// Vertex `(i, j)` gets index `j·(m+1) + i`; each cell is split along its
/// lower-left to upper-right diagonal.
pub fn build_uniform_mesh_on(m: usize, lower: Point, upper: Point) -> Result<Mesh, MeshError> {
    if m < 2 {
        return Err(MeshError::TooFewSubdivisions(m));
    }
    if !(upper[0] > lower[0] && upper[1] > lower[1]) {
        return Err(MeshError::InvalidDomain { lower, upper });
    }
    let n = m + 1;
    let mut vertices = Vec::with_capacity(n * n);
    let mut coords = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            // exact endpoints, no accumulated spacing error
            let x = lower[0] + (upper[0] - lower[0]) * i as f64 / m as f64;
            let y = lower[1] + (upper[1] - lower[1]) * j as f64 / m as f64;
            vertices.push([x, y]);
            coords.push([i, j]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * m * m);
    for j in 0..m {
        for i in 0..m {
            let v00 = j * n + i;
            let v10 = v00 + 1;
            let v01 = v00 + n;
            let v11 = v01 + 1;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let grid = UniformGrid::new(m, lower, upper, coords);
    Mesh::with_grid(vertices, triangles, Some(grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangle_square() -> Mesh {
        Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn uniform_counts_m2() {
        let mesh = build_uniform_mesh(2).unwrap();
        assert_eq!(mesh.num_vertices(), 9);
        assert_eq!(mesh.num_triangles(), 8);
        assert_eq!(mesh.boundary_edges().len(), 8);
        assert!(mesh.is_uniform_regular());
    }

    #[test]
    fn uniform_interior_vertices_have_six_triangles() {
        let mesh = build_uniform_mesh(4).unwrap();
        for v in 0..mesh.num_vertices() {
            if !mesh.is_boundary_vertex(v) {
                assert_eq!(mesh.vertex_triangles(v).len(), 6);
            }
        }
    }

    #[test]
    fn uniform_area_is_one() {
        let mesh = build_uniform_mesh(16).unwrap();
        assert!((mesh.total_area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_subdivisions() {
        assert!(matches!(
            build_uniform_mesh(1),
            Err(MeshError::TooFewSubdivisions(1))
        ));
    }

    #[test]
    fn euler_relation() {
        for mesh in [two_triangle_square(), build_uniform_mesh(7).unwrap()] {
            let chi =
                mesh.num_vertices() as i64 - mesh.num_edges() as i64 + mesh.num_triangles() as i64;
            assert_eq!(chi, 1);
        }
    }

    #[test]
    fn uniform_normals_axis_aligned_and_outward() {
        let mesh = build_uniform_mesh_on(5, [-1.0, -1.0], [1.0, 1.0]).unwrap();
        for be in mesh.boundary_edges() {
            let [nx, ny] = be.normal;
            assert!((nx.hypot(ny) - 1.0).abs() < 1e-15);
            assert!(nx == 0.0 || ny == 0.0);
            // midpoint plus normal leaves the domain
            let [a, b] = be.vertices.map(|v| mesh.vertex(v));
            let p = [
                0.5 * (a[0] + b[0]) + 0.1 * nx,
                0.5 * (a[1] + b[1]) + 0.1 * ny,
            ];
            assert!(p[0].abs() > 1.0 || p[1].abs() > 1.0);
        }
    }

    #[test]
    fn corners_have_two_normals() {
        let mesh = build_uniform_mesh(3).unwrap();
        let corners: Vec<usize> = (0..mesh.num_vertices())
            .filter(|&v| mesh.is_corner(v))
            .collect();
        assert_eq!(corners, vec![0, 3, 12, 15]);
        assert_eq!(mesh.boundary_normals(1).len(), 2);
        assert!(!mesh.is_corner(1));
        assert!(mesh.boundary_normals(5).is_empty());
    }

    #[test]
    fn inverted_triangle_is_rejected() {
        let err = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 2, 1]]).unwrap_err();
        assert!(matches!(
            err,
            MeshError::InvertedTriangle { triangle: 0, .. }
        ));
    }

    #[test]
    fn hanging_node_is_rejected() {
        // left triangle split at the midpoint of the shared edge, right one not
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let triangles = vec![[0, 1, 2], [0, 4, 3], [4, 2, 3]];
        let err = Mesh::new(vertices, triangles).unwrap_err();
        assert!(matches!(err, MeshError::HangingNode { vertex: 4, .. }));
    }

    #[test]
    fn out_of_range_vertex() {
        let err = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0]], vec![[0, 1, 2]]).unwrap_err();
        assert!(matches!(err, MeshError::VertexOutOfRange { vertex: 2, .. }));
    }
}
