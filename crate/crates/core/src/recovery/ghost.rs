//! Five-point Laplacian with the homogeneous Neumann condition built in.
//!
//! At a boundary vertex the stencil reaches a ghost point outside the
//! domain. The central difference `(u_ghost − u_inner)/(2h) = 0` replaces the
//! ghost value by its mirror image across the boundary, so each missing
//! neighbor doubles the weight of the opposite one. A corner loses two
//! neighbors and doubles both interior-direction weights.

use super::{BoundaryMode, RecoveryError, RecoveryOperator};
use crate::linalg::CsrMatrix;
use crate::mesh::Mesh;

pub fn build_ghost_point_laplacian(mesh: &Mesh) -> Result<RecoveryOperator, RecoveryError> {
    let grid = mesh.uniform_grid().ok_or(RecoveryError::NotUniform)?;
    let m = grid.subdivisions();
    let [hx, hy] = grid.spacing();
    let (cx, cy) = (1.0 / (hx * hx), 1.0 / (hy * hy));
    let n = mesh.num_vertices();

    // second difference along one axis, with a mirrored ghost at either end
    let axis = |k: usize| -> [(isize, f64); 2] {
        if k == 0 {
            [(1, 2.0), (1, 0.0)]
        } else if k == m {
            [(-1, 2.0), (-1, 0.0)]
        } else {
            [(-1, 1.0), (1, 1.0)]
        }
    };

    let mut xx_rows = Vec::with_capacity(n);
    let mut yy_rows = Vec::with_capacity(n);
    for v in 0..n {
        let [i, j] = grid.coords(v);
        let mut xx = vec![(v, -2.0 * cx)];
        for (di, w) in axis(i) {
            if w != 0.0 {
                xx.push((grid.vertex((i as isize + di) as usize, j), w * cx));
            }
        }
        let mut yy = vec![(v, -2.0 * cy)];
        for (dj, w) in axis(j) {
            if w != 0.0 {
                yy.push((grid.vertex(i, (j as isize + dj) as usize), w * cy));
            }
        }
        xx_rows.push(xx);
        yy_rows.push(yy);
    }
    let hxx = CsrMatrix::from_rows(n, xx_rows);
    let hyy = CsrMatrix::from_rows(n, yy_rows);
    let lap = CsrMatrix::linear_combination(&[(1.0, &hxx), (1.0, &hyy)]);
    Ok(RecoveryOperator {
        gx: CsrMatrix::zeros(n, n),
        gy: CsrMatrix::zeros(n, n),
        hxx,
        hxy: CsrMatrix::zeros(n, n),
        hyy,
        lap,
        boundary_mode: BoundaryMode::GhostPoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_mesh;

    #[test]
    fn bottom_edge_row() {
        let m = 4;
        let mesh = build_uniform_mesh(m).unwrap();
        let g = mesh.uniform_grid().unwrap();
        let lap = build_ghost_point_laplacian(&mesh).unwrap().lap;
        let inv = (m * m) as f64;
        let z = g.vertex(2, 0);
        assert_eq!(lap.row(z).0.len(), 4);
        assert_eq!(lap.get(z, g.vertex(1, 0)), inv);
        assert_eq!(lap.get(z, g.vertex(3, 0)), inv);
        assert_eq!(lap.get(z, g.vertex(2, 1)), 2.0 * inv);
        assert_eq!(lap.get(z, z), -4.0 * inv);
    }

    /// Corner (0,0): the stencil `(u_E + u_W + u_N + u_S − 4u₀)/h²` needs the
    /// ghosts `u_W = u(−h,0)` and `u_S = u(0,−h)`. The Neumann conditions
    /// `(u_E − u_W)/(2h) = 0` and `(u_N − u_S)/(2h) = 0` give `u_W = u_E`,
    /// `u_S = u_N`, hence `(2u_E + 2u_N − 4u₀)/h²`.
    #[test]
    fn corner_row_by_ghost_elimination() {
        let m = 5;
        let mesh = build_uniform_mesh(m).unwrap();
        let g = mesh.uniform_grid().unwrap();
        let lap = build_ghost_point_laplacian(&mesh).unwrap().lap;
        let inv = (m * m) as f64;
        let z = g.vertex(0, 0);
        assert_eq!(lap.row(z).0.len(), 3);
        assert!((lap.get(z, g.vertex(1, 0)) - 2.0 * inv).abs() < 1e-12 * inv);
        assert!((lap.get(z, g.vertex(0, 1)) - 2.0 * inv).abs() < 1e-12 * inv);
        assert!((lap.get(z, z) + 4.0 * inv).abs() < 1e-12 * inv);
        let top_right = g.vertex(m, m);
        assert!((lap.get(top_right, g.vertex(m - 1, m)) - 2.0 * inv).abs() < 1e-12 * inv);
    }

    #[test]
    fn constants_map_to_zero() {
        let mesh = build_uniform_mesh(6).unwrap();
        let lap = build_ghost_point_laplacian(&mesh).unwrap().lap;
        assert!(lap
            .mul_vec(&vec![3.5; mesh.num_vertices()])
            .iter()
            .all(|&r| r == 0.0));
    }

    #[test]
    fn rejects_unstructured_meshes() {
        let mesh = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        assert!(matches!(
            build_ghost_point_laplacian(&mesh),
            Err(RecoveryError::NotUniform)
        ));
    }
}
