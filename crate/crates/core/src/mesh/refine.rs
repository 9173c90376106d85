use super::{Mesh, UniformGrid};

/// Result of one uniform refinement step.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub mesh: Mesh,
    /// For each fine vertex, the coarse vertices it sits between (equal for
    /// vertices inherited from the coarse mesh).
    pub parents: Vec<[usize; 2]>,
}

impl Refinement {
    /// Injects a coarse piecewise linear field into the fine mesh. Exact for
    /// nested meshes.
    pub fn prolongate(&self, coarse: &[f64]) -> Vec<f64> {
        prolongate(&self.parents, coarse)
    }
}

/// Red refinement: every triangle is split into four congruent children by
/// its edge midpoints.
pub fn uniform_refine(mesh: &Mesh) -> Mesh {
    uniform_refine_with_parents(mesh).mesh
}

pub fn uniform_refine_with_parents(mesh: &Mesh) -> Refinement {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices().to_vec();
    let mut parents: Vec<[usize; 2]> = (0..nv).map(|v| [v, v]).collect();
    for &[a, b] in mesh.edges() {
        let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        parents.push([a, b]);
    }
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle(t);
        // midpoint opposite local vertex k
        let [ma, mb, mc] = mesh.triangle_edges(t).map(|e| nv + e);
        triangles.push([a, mc, mb]);
        triangles.push([mc, b, ma]);
        triangles.push([mb, ma, c]);
        triangles.push([mc, ma, mb]);
    }
    let grid = mesh.uniform_grid().map(|g| {
        let coords = parents
            .iter()
            .map(|&[a, b]| {
                let (ca, cb) = (g.coords(a), g.coords(b));
                [ca[0] + cb[0], ca[1] + cb[1]]
            })
            .collect();
        UniformGrid::new(2 * g.subdivisions(), g.lower(), g.upper(), coords)
    });
    let mesh =
        Mesh::with_grid(vertices, triangles, grid).expect("refinement of a valid mesh is valid");
    Refinement { mesh, parents }
}

/// A coarse mesh and its successive uniform refinements, with the vertex
/// parents of every refinement step.
#[derive(Clone, Debug)]
pub struct MeshLadder {
    meshes: Vec<Mesh>,
    /// `parents[k]` maps level `k + 1` vertices onto level `k`.
    parents: Vec<Vec<[usize; 2]>>,
}

impl MeshLadder {
    /// `levels` meshes, the first being `coarse`.
    pub fn new(coarse: Mesh, levels: usize) -> Self {
        let mut meshes = vec![coarse];
        let mut parents = Vec::new();
        for _ in 1..levels {
            let r = uniform_refine_with_parents(meshes.last().expect("non-empty"));
            meshes.push(r.mesh);
            parents.push(r.parents);
        }
        Self { meshes, parents }
    }

    pub fn meshes(&self) -> &[Mesh] {
        &self.meshes
    }

    pub fn len(&self) -> usize {
        self.meshes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meshes.is_empty()
    }

    /// Injects a field on level `k` into level `k + 1`.
    pub fn prolongate(&self, k: usize, coarse: &[f64]) -> Vec<f64> {
        prolongate(&self.parents[k], coarse)
    }
}

fn prolongate(parents: &[[usize; 2]], coarse: &[f64]) -> Vec<f64> {
    parents
        .iter()
        .map(|&[a, b]| {
            if a == b {
                coarse[a]
            } else {
                0.5 * (coarse[a] + coarse[b])
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::build_uniform_mesh;
    use super::*;

    fn key(p: [f64; 2]) -> (i64, i64) {
        ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64)
    }

    fn triangle_set(mesh: &Mesh) -> std::collections::BTreeSet<Vec<(i64, i64)>> {
        mesh.triangles()
            .iter()
            .map(|tri| {
                let mut pts: Vec<_> = tri.iter().map(|&v| key(mesh.vertex(v))).collect();
                pts.sort();
                pts
            })
            .collect()
    }

    #[test]
    fn two_triangle_square() {
        let mesh = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let fine = uniform_refine(&mesh);
        assert_eq!(fine.num_triangles(), 8);
        assert_eq!(fine.num_vertices(), 9);
        assert!((fine.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn self_similar_uniform_mesh() {
        let refined = uniform_refine(&build_uniform_mesh(4).unwrap());
        let direct = build_uniform_mesh(8).unwrap();
        assert_eq!(triangle_set(&refined), triangle_set(&direct));
        let g = refined.uniform_grid().expect("grid survives refinement");
        assert_eq!(g.subdivisions(), 8);
        for v in 0..refined.num_vertices() {
            let [i, j] = g.coords(v);
            assert_eq!(
                key(refined.vertex(v)),
                key([i as f64 / 8.0, j as f64 / 8.0])
            );
        }
    }

    #[test]
    fn vertex_count_follows_v_plus_e() {
        let mesh = build_uniform_mesh(3).unwrap();
        let fine = uniform_refine(&mesh);
        assert_eq!(fine.num_vertices(), mesh.num_vertices() + mesh.num_edges());
        assert_eq!(fine.num_triangles(), 4 * mesh.num_triangles());
    }

    #[test]
    fn prolongation_reproduces_linears() {
        let mesh = build_uniform_mesh(3).unwrap();
        let r = uniform_refine_with_parents(&mesh);
        let f = |p: [f64; 2]| 2.0 * p[0] - 3.0 * p[1] + 0.5;
        let coarse: Vec<f64> = mesh.vertices().iter().map(|&p| f(p)).collect();
        for (v, value) in r.prolongate(&coarse).into_iter().enumerate() {
            assert!((value - f(r.mesh.vertex(v))).abs() < 1e-14);
        }
    }
}
