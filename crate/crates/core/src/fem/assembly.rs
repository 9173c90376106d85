use rayon::prelude::*;

use super::quadrature::{barycentric_point, edge_rule, triangle_rule};
use crate::linalg::CsrMatrix;
use crate::mesh::{BoundaryEdge, Mesh, Point};

/// Gradients of the three barycentric basis functions of a triangle, and its
/// area.
pub fn basis_gradients(tri: &[Point; 3]) -> ([[f64; 2]; 3], f64) {
    let [a, b, c] = *tri;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let grads = [
        [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
        [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
    ];
    (grads, 0.5 * det)
}

/// Constant gradient of the linear interpolant of `u` on triangle `t`.
pub fn element_gradient(mesh: &Mesh, t: usize, u: &[f64]) -> [f64; 2] {
    let (g, _) = basis_gradients(&mesh.triangle_points(t));
    let tri = mesh.triangle(t);
    let mut out = [0.0; 2];
    for k in 0..3 {
        out[0] += u[tri[k]] * g[k][0];
        out[1] += u[tri[k]] * g[k][1];
    }
    out
}

/// Assembles `Σ_T local(T)` from 3×3 element matrices.
fn assemble<F>(mesh: &Mesh, local: F) -> CsrMatrix
where
    F: Fn(&[Point; 3]) -> [[f64; 3]; 3] + Sync,
{
    let triplets: Vec<(usize, usize, f64)> = (0..mesh.num_triangles())
        .into_par_iter()
        .flat_map_iter(|t| {
            let tri = mesh.triangle(t);
            let m = local(&mesh.triangle_points(t));
            (0..9).map(move |k| (tri[k / 3], tri[k % 3], m[k / 3][k % 3]))
        })
        .collect();
    let n = mesh.num_vertices();
    CsrMatrix::from_triplets(n, n, &triplets)
}

/// Consistent P1 mass matrix, `M_ij = ∫ φ_i φ_j`.
pub fn mass_matrix(mesh: &Mesh) -> CsrMatrix {
    assemble(mesh, |tri| {
        let (_, area) = basis_gradients(tri);
        let d = area / 6.0;
        let o = area / 12.0;
        [[d, o, o], [o, d, o], [o, o, d]]
    })
}

/// P1 stiffness matrix, `K_ij = ∫ ∇φ_i·∇φ_j`.
pub fn stiffness_matrix(mesh: &Mesh) -> CsrMatrix {
    assemble(mesh, |tri| {
        let (g, area) = basis_gradients(tri);
        let mut k = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
        k
    })
}

/// Nodal values of `f`.
pub fn interpolate<F>(mesh: &Mesh, f: F) -> Vec<f64>
where
    F: Fn(Point) -> f64 + Sync,
{
    mesh.vertices().par_iter().map(|&p| f(p)).collect()
}

/// `(f, φ_i)` for every node, with the degree-4 triangle rule.
pub fn load_vector<F>(mesh: &Mesh, f: F) -> Vec<f64>
where
    F: Fn(Point) -> f64 + Sync,
{
    let rule = triangle_rule();
    let local: Vec<[f64; 3]> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let tri = mesh.triangle_points(t);
            let area = mesh.area(t);
            let mut b = [0.0; 3];
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let fv = w * area * f(barycentric_point(&tri, *l));
                for k in 0..3 {
                    b[k] += fv * l[k];
                }
            }
            b
        })
        .collect();
    let mut out = vec![0.0; mesh.num_vertices()];
    for (tri, b) in mesh.triangles().iter().zip(local) {
        for k in 0..3 {
            out[tri[k]] += b[k];
        }
    }
    out
}

/// `Σ_e ∫_e f(e, s) ds` over the boundary edges, with the two-point Gauss
/// rule in the edge parameter `s ∈ [0, 1]` (from `vertices[0]` to
/// `vertices[1]`).
pub fn boundary_integral<F>(mesh: &Mesh, f: F) -> f64
where
    F: Fn(&BoundaryEdge, f64) -> f64,
{
    let rule = edge_rule();
    mesh.boundary_edges()
        .iter()
        .map(|e| {
            let s: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(&s, w)| w * f(e, s))
                .sum();
            e.length * s
        })
        .sum()
}

/// `∫_{∂Ω} u_h v_h ds` for nodal vectors `u`, `v`.
pub fn boundary_edge_integral(mesh: &Mesh, u: &[f64], v: &[f64]) -> f64 {
    let trace = |w: &[f64], e: &BoundaryEdge, s: f64| {
        let [a, b] = e.vertices;
        (1.0 - s) * w[a] + s * w[b]
    };
    boundary_integral(mesh, |e, s| trace(u, e, s) * trace(v, e, s))
}

/// Element sums reduced in a fixed order, independent of the thread count.
pub(crate) fn sum_over_triangles<F>(mesh: &Mesh, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    const CHUNK: usize = 1024;
    let n = mesh.num_triangles();
    let partial: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..n.min((c + 1) * CHUNK)).map(&f).sum())
        .collect();
    partial.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_mesh;

    fn two_triangle_square() -> Mesh {
        Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn load_vector_of_linear_field_is_mass_times_nodal_values() {
        let mesh = build_uniform_mesh(5).unwrap();
        let f = |p: Point| 1.0 + 2.0 * p[0] - 3.0 * p[1];
        let exact = mass_matrix(&mesh).mul_vec(&interpolate(&mesh, f));
        for (a, b) in load_vector(&mesh, f).iter().zip(&exact) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn mass_sums_to_area() {
        let m = mass_matrix(&two_triangle_square());
        assert!((m.values().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(m.max_asymmetry(), 0.0);
    }

    #[test]
    fn stiffness_interior_row_is_graph_laplacian() {
        let mesh = build_uniform_mesh(4).unwrap();
        let k = stiffness_matrix(&mesh);
        let g = mesh.uniform_grid().unwrap();
        let z = g.vertex(2, 2);
        let (cols, vals) = k.row(z);
        let nonzero: Vec<(usize, f64)> = cols
            .iter()
            .copied()
            .zip(vals.iter().copied())
            .filter(|e| e.1.abs() > 1e-14)
            .collect();
        assert_eq!(nonzero.len(), 5);
        assert!((k.get(z, z) - 4.0).abs() < 1e-14);
        for (i, j) in [(1, 2), (3, 2), (2, 1), (2, 3)] {
            assert!((k.get(z, g.vertex(i, j)) + 1.0).abs() < 1e-14);
        }
        assert!(k.row_sums().iter().all(|s| s.abs() < 1e-13));
        assert_eq!(k.max_asymmetry(), 0.0);
    }

    #[test]
    fn boundary_integrals_on_unit_square() {
        let mesh = build_uniform_mesh(5).unwrap();
        let one = vec![1.0; mesh.num_vertices()];
        let x = interpolate(&mesh, |p| p[0]);
        assert!((boundary_edge_integral(&mesh, &one, &one) - 4.0).abs() < 1e-13);
        assert!((boundary_edge_integral(&mesh, &x, &one) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn interpolation_takes_nodal_values() {
        let mesh = build_uniform_mesh(4).unwrap();
        let x = interpolate(&mesh, |p| p[0]);
        let v = mesh.uniform_grid().unwrap().vertex(2, 1);
        assert_eq!(mesh.vertex(v), [0.5, 0.25]);
        assert_eq!(x[v], 0.5);
        assert!(interpolate(&mesh, |_| 2.5).iter().all(|&c| c == 2.5));
    }

    #[test]
    fn basis_gradients_partition_unity() {
        let tri = [[0.1, 0.2], [0.9, 0.3], [0.4, 0.8]];
        let (g, area) = basis_gradients(&tri);
        assert!((g[0][0] + g[1][0] + g[2][0]).abs() < 1e-14);
        assert!((g[0][1] + g[1][1] + g[2][1]).abs() < 1e-14);
        assert!((area - crate::mesh::signed_area(tri[0], tri[1], tri[2])).abs() < 1e-15);
    }
}
